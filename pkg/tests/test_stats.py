import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from pfslit.stats import CRITICAL_099, critical_value, pearson_chi_square, pool_bins


def test_table_matches_scipy():
    k = np.arange(1, len(CRITICAL_099) + 1)
    np.testing.assert_allclose(CRITICAL_099, sps.chi2.ppf(0.99, k), rtol=1e-10)


@pytest.mark.parametrize("dof", [301, 500, 2000])
def test_wilson_hilferty_tail(dof):
    assert critical_value(dof) == pytest.approx(sps.chi2.ppf(0.99, dof), rel=1e-3)


def test_bad_dof():
    with pytest.raises(ValueError):
        critical_value(0)


@given(st.lists(st.floats(0, 20), min_size=1, max_size=60))
def test_pooling_partitions_bins(expected):
    groups = pool_bins(expected)
    flat = np.concatenate(groups)
    assert list(flat) == list(range(len(expected)))
    sums = [sum(expected[i] for i in g) for g in groups]
    if sum(expected) >= 5:
        assert all(s >= 5 - 1e-9 for s in sums)


def test_perfect_match_is_zero():
    exp = np.full(20, 50.0)
    r = pearson_chi_square(exp, exp)
    assert r.statistic == 0.0 and r.dof == 19 and r.passed


def test_all_in_one_bin():
    n, b = 1000, 10
    counts = np.zeros(b)
    counts[0] = n
    r = pearson_chi_square(counts, np.full(b, n / b))
    assert r.statistic == pytest.approx(n * (b - 1))
    assert not r.passed


def test_single_group_has_no_verdict():
    r = pearson_chi_square([3, 1], [2.0, 2.0])
    assert r.passed is None and r.n_groups == 1
