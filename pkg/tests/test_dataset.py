import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditboost.dataset import (
    ColumnSchema,
    Dataset,
    load_csv,
    save_csv,
    stratified_split,
    temporal_split,
)
from creditboost.errors import (
    DegenerateClass,
    MissingColumn,
    MissingTimeValue,
    UnknownLabelValue,
    UnparseableNumeric,
)

from conftest import make_dataset


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return path


BASIC_SCHEMA = [
    ColumnSchema("age", "numeric"),
    ColumnSchema("state", "categorical"),
    ColumnSchema("y", "categorical", role="label"),
]


class TestLoadCsv:
    def test_empty_numeric_cell_is_flagged_missing(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,CA,1\n,NY,0\n3,CA,0\n")
        d = load_csv(p, BASIC_SCHEMA)
        col = d.column("age")
        assert col.missing.tolist() == [False, True, False]
        assert np.array_equal(d.labels, [1, 0, 0])

    def test_third_label_value_rejected(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,CA,good\n2,NY,bad\n3,CA,meh\n")
        with pytest.raises(UnknownLabelValue):
            load_csv(p, BASIC_SCHEMA, label_positive="bad")

    def test_custom_markers_parse_oracle(self, tmp_path):
        # cells "NA", "7.5", "" with markers {NA, ""} -> (missing, 7.5, missing)
        p = write_csv(tmp_path / "d.csv", "age,state,y\nNA,CA,1\n7.5,NY,0\n,CA,0\n")
        d = load_csv(p, BASIC_SCHEMA, missing_markers={"NA", ""})
        col = d.column("age")
        assert col.missing.tolist() == [True, False, True]
        assert col.values[1] == 7.5

    def test_unparseable_numeric_reports_row_and_column(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,CA,1\noops,NY,0\n")
        with pytest.raises(UnparseableNumeric) as exc:
            load_csv(p, BASIC_SCHEMA)
        assert exc.value.row == 1
        assert exc.value.column == "age"

    def test_missing_schema_column_raises(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,y\n1,1\n")
        with pytest.raises(MissingColumn):
            load_csv(p, BASIC_SCHEMA)

    def test_label_positive_maps_source_encoding(self, tmp_path):
        # the source marks Good as "G"; Bads must become 1 internally
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,CA,G\n2,NY,B\n")
        d = load_csv(p, BASIC_SCHEMA, label_positive="B")
        assert d.labels.tolist() == [0, 1]

    def test_missing_label_cell_rejected(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,CA,1\n2,NY,\n")
        with pytest.raises(UnknownLabelValue):
            load_csv(p, BASIC_SCHEMA)

    def test_categorical_interning_is_first_appearance(self, tmp_path):
        p = write_csv(tmp_path / "d.csv", "age,state,y\n1,NY,1\n2,CA,0\n3,NY,0\n")
        d = load_csv(p, BASIC_SCHEMA)
        assert d.column("state").categories == ("NY", "CA")

    def test_exclude_role_drops_column(self, tmp_path):
        schema = BASIC_SCHEMA + [ColumnSchema("note", "categorical", role="exclude")]
        p = write_csv(tmp_path / "d.csv", "age,state,y,note\n1,CA,1,x\n2,NY,0,y\n")
        d = load_csv(p, schema)
        assert d.feature_names == ["age", "state"]

    def test_schema_requires_one_label(self):
        with pytest.raises(ValueError):
            load_csv("whatever.csv", [ColumnSchema("age", "numeric")])

    def test_roundtrip_identity(self, tmp_path):
        d = make_dataset(
            numeric={"age": [1.5, None, 3.25e-7]},
            categorical={"state": ["CA", None, "NY"]},
            labels=[1, 0, 0],
        )
        path = tmp_path / "out.csv"
        save_csv(d, path, label_name="y")
        d2 = load_csv(path, BASIC_SCHEMA)
        a, a2 = d.column("age"), d2.column("age")
        assert a.missing.tolist() == a2.missing.tolist()
        assert np.array_equal(a.values[~a.missing], a2.values[~a2.missing])
        s, s2 = d.column("state"), d2.column("state")
        assert [s.value_at(i) for i in range(3)] == [s2.value_at(i) for i in range(3)]
        assert np.array_equal(d.labels, d2.labels)


class TestStratifiedSplit:
    def _dataset(self, n_good, n_bad):
        n = n_good + n_bad
        return make_dataset(
            numeric={"x": list(range(n))},
            labels=[0] * n_good + [1] * n_bad,
        )

    def test_counting_oracle_90_10(self):
        d = self._dataset(90, 10)
        train, test = stratified_split(d, 0.2, seed=3)
        assert int(np.sum(test.labels == 0)) == 18
        assert int(np.sum(test.labels == 1)) == 2
        assert train.row_count == 80

    def test_partition_no_duplicates(self):
        d = self._dataset(37, 13)
        train, test = stratified_split(d, 0.31, seed=9)
        xs = np.concatenate([train.column("x").values, test.column("x").values])
        assert len(xs) == 50
        assert len(np.unique(xs)) == 50

    def test_same_seed_identical(self):
        d = self._dataset(30, 10)
        a = stratified_split(d, 0.25, seed=42)
        b = stratified_split(d, 0.25, seed=42)
        for left, right in zip(a, b):
            assert np.array_equal(left.column("x").values, right.column("x").values)

    def test_degenerate_class(self):
        d = self._dataset(10, 1)
        with pytest.raises(DegenerateClass):
            stratified_split(d, 0.5, seed=0)

    @given(
        n_good=st.integers(5, 60),
        n_bad=st.integers(2, 20),
        fraction=st.floats(0.05, 0.95),
        seed=st.integers(0, 2**30),
    )
    @settings(max_examples=40, deadline=None)
    def test_prevalence_preserved_within_one_row(self, n_good, n_bad, fraction, seed):
        d = self._dataset(n_good, n_bad)
        train, test = stratified_split(d, fraction, seed=seed)
        assert train.row_count + test.row_count == d.row_count
        for k, count in ((0, n_good), (1, n_bad)):
            want = count * fraction
            got = int(np.sum(test.labels == k))
            assert abs(got - want) <= 1


class TestTemporalSplit:
    def _dataset(self):
        return make_dataset(numeric={"t": [1, 2, 3], "x": [9, 8, 7]}, labels=[0, 1, 0])

    def test_cutoff_below_min(self):
        in_time, oot = temporal_split(self._dataset(), "t", 0)
        assert in_time.row_count == 0
        assert oot.row_count == 3

    def test_cutoff_at_max(self):
        in_time, oot = temporal_split(self._dataset(), "t", 3)
        assert in_time.row_count == 3
        assert oot.row_count == 0

    def test_cutoff_mid(self):
        in_time, oot = temporal_split(self._dataset(), "t", 2)
        assert (in_time.row_count, oot.row_count) == (2, 1)
        assert oot.column("x").values.tolist() == [7]

    def test_missing_time_rejected(self):
        d = make_dataset(numeric={"t": [1, None]}, labels=[0, 1])
        with pytest.raises(MissingTimeValue):
            temporal_split(d, "t", 1)


class TestDatasetInvariants:
    def test_weights_default_to_one(self):
        d = make_dataset(numeric={"x": [1, 2]}, labels=[0, 1])
        assert d.weights.tolist() == [1.0, 1.0]

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            make_dataset(numeric={"x": [1, 2]}, labels=[0, 1], weights=[1.0, -0.5])

    def test_mismatched_column_length_rejected(self):
        with pytest.raises(ValueError):
            Dataset(
                columns=make_dataset(numeric={"x": [1, 2, 3]}, labels=[0, 1, 1]).columns,
                labels=np.array([0, 1], dtype=np.int8),
            )

    def test_non_binary_labels_rejected(self):
        with pytest.raises(ValueError):
            make_dataset(numeric={"x": [1, 2]}, labels=[0, 2])
