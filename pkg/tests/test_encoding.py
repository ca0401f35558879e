import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditboost.encoding import apply_woe, export_mapping, fit_woe, woe_map_from_rows
from creditboost.errors import NotCategorical, SingleClassDataset

from conftest import make_dataset


def dataset_with_counts(counts):
    """Build a single-column dataset from {category: (goods, bads)}."""
    cells, labels = [], []
    for cat, (goods, bads) in counts.items():
        cells += [cat] * (goods + bads)
        labels += [0] * goods + [1] * bads
    return make_dataset(categorical={"c": cells}, labels=labels)


class TestFitWoe:
    def test_equal_shares_give_zero(self):
        # both categories hold half the goods and half the bads
        d = dataset_with_counts({"a": (5, 3), "b": (5, 3)})
        m = fit_woe(d, "c", smoothing=0.0)
        assert m.entries["a"][2] == pytest.approx(0.0, abs=1e-12)

    def test_ln2_case(self):
        # category a: goods share 0.4, bads share 0.2 -> ln(2) x 100
        d = dataset_with_counts({"a": (4, 2), "b": (6, 8)})
        m = fit_woe(d, "c", smoothing=0.0)
        assert m.entries["a"][2] == pytest.approx(math.log(2) * 100, abs=1e-9)

    def test_zero_bads_finite_with_smoothing(self):
        d = dataset_with_counts({"a": (5, 0), "b": (5, 5)})
        m = fit_woe(d, "c", smoothing=0.5)
        assert math.isfinite(m.entries["a"][2])
        assert m.entries["a"][2] > 0

    def test_counts_recorded(self):
        d = dataset_with_counts({"a": (4, 2), "b": (6, 8)})
        m = fit_woe(d, "c")
        assert m.entries["a"][:2] == (4, 2)
        assert m.entries["b"][:2] == (6, 8)
        total_goods = sum(e[0] for e in m.entries.values())
        total_bads = sum(e[1] for e in m.entries.values())
        assert (total_goods, total_bads) == (10, 10)

    def test_missing_is_its_own_category(self):
        d = make_dataset(categorical={"c": ["a", None, "a", None]}, labels=[0, 1, 1, 0])
        m = fit_woe(d, "c")
        assert None in m.entries
        assert m.entries[None][:2] == (1, 1)

    def test_not_categorical(self):
        d = make_dataset(numeric={"x": [1, 2]}, labels=[0, 1])
        with pytest.raises(NotCategorical):
            fit_woe(d, "x")

    def test_single_class_rejected(self):
        d = make_dataset(categorical={"c": ["a", "b"]}, labels=[0, 0])
        with pytest.raises(SingleClassDataset):
            fit_woe(d, "c")

    @given(
        goods_a=st.integers(1, 30),
        bads_a=st.integers(1, 30),
        goods_b=st.integers(1, 30),
        bads_b=st.integers(1, 30),
        extra_bads=st.integers(1, 10),
    )
    @settings(max_examples=50, deadline=None)
    def test_more_bads_never_raise_woe(self, goods_a, bads_a, goods_b, bads_b, extra_bads):
        base = dataset_with_counts({"a": (goods_a, bads_a), "b": (goods_b, bads_b)})
        bumped = dataset_with_counts({"a": (goods_a, bads_a + extra_bads), "b": (goods_b, bads_b)})
        woe_base = fit_woe(base, "c").entries["a"][2]
        woe_bumped = fit_woe(bumped, "c").entries["a"][2]
        assert woe_bumped <= woe_base + 1e-12

    @given(
        goods_a=st.integers(1, 25),
        bads_a=st.integers(1, 25),
        goods_b=st.integers(1, 25),
        bads_b=st.integers(1, 25),
    )
    @settings(max_examples=50, deadline=None)
    def test_unsmoothed_matches_share_ratio_formula(self, goods_a, bads_a, goods_b, bads_b):
        # with s=0 and positive counts the value is exactly
        # ln((goods share)/(bads share)) x 100
        d = dataset_with_counts({"a": (goods_a, bads_a), "b": (goods_b, bads_b)})
        m = fit_woe(d, "c", smoothing=0.0)
        goods_total = goods_a + goods_b
        bads_total = bads_a + bads_b
        want = math.log((goods_a / goods_total) / (bads_a / bads_total)) * 100
        assert m.entries["a"][2] == pytest.approx(want, abs=1e-9)

    @given(goods_a=st.integers(1, 30), bads_a=st.integers(1, 30), rest=st.integers(2, 40))
    @settings(max_examples=50, deadline=None)
    def test_sign_property(self, goods_a, bads_a, rest):
        d = dataset_with_counts({"a": (goods_a, bads_a), "b": (rest, rest)})
        m = fit_woe(d, "c", smoothing=0.0)
        goods_total = goods_a + rest
        bads_total = bads_a + rest
        good_share = goods_a / goods_total
        bad_share = bads_a / bads_total
        woe = m.entries["a"][2]
        if good_share > bad_share:
            assert woe > 0
        elif good_share < bad_share:
            assert woe < 0
        else:
            assert woe == pytest.approx(0.0, abs=1e-9)


class TestApplyWoe:
    def fitted(self):
        d = make_dataset(categorical={"c": ["a", "b", "a", None]}, labels=[0, 1, 0, 1])
        return fit_woe(d, "c")

    def test_seen_category_lookup(self):
        m = self.fitted()
        out = apply_woe(m, ["a", "b"])
        assert out[0] == m.entries["a"][2]
        assert out[1] == m.entries["b"][2]

    def test_unseen_maps_to_neutral_zero(self):
        assert apply_woe(self.fitted(), ["zzz"])[0] == 0.0

    def test_missing_maps_to_missing_pseudocategory(self):
        m = self.fitted()
        assert apply_woe(m, [None])[0] == m.entries[None][2]

    def test_column_and_list_inputs_agree(self):
        d = make_dataset(categorical={"c": ["a", "b", None, "a"]}, labels=[0, 1, 0, 1])
        m = fit_woe(d, "c")
        col = d.column("c")
        as_list = [col.value_at(i) for i in range(d.row_count)]
        assert np.array_equal(apply_woe(m, col), apply_woe(m, as_list))


class TestExportMapping:
    def test_three_rows_out(self):
        d = dataset_with_counts({"a": (4, 2), "b": (6, 8), "e": (2, 2)})
        rows = export_mapping(fit_woe(d, "c"))
        assert len(rows) == 3

    def test_values_match_fit(self):
        d = dataset_with_counts({"a": (4, 2), "b": (6, 8)})
        m = fit_woe(d, "c")
        for cat, goods, bads, woe in export_mapping(m):
            assert m.entries[cat] == (goods, bads, woe)

    def test_sorted_by_woe_descending(self):
        d = dataset_with_counts({"a": (4, 2), "b": (6, 8), "e": (1, 9)})
        woes = [row[3] for row in export_mapping(fit_woe(d, "c"))]
        assert woes == sorted(woes, reverse=True)

    def test_roundtrip_rebuild(self):
        d = make_dataset(categorical={"c": ["a", "b", None, "a", "b"]}, labels=[0, 1, 0, 1, 0])
        m = fit_woe(d, "c")
        rebuilt = woe_map_from_rows("c", export_mapping(m), unseen_woe=m.unseen_woe, smoothing=m.smoothing)
        assert rebuilt == m
