from fractions import Fraction as F

import pytest

from chainwalk.errors import NonPositiveTolerance, NonPositiveTosses
from chainwalk.series import short_table_series, truncated_lottery_ev


@pytest.mark.parametrize("start, p", [(1, 1 / 3), (2, 2 / 3)])
def test_short_table_series(start, p):
    res = short_table_series(start, 1e-12)
    assert res.p_right == pytest.approx(p, abs=1e-11)
    assert res.mean_steps == pytest.approx(2, abs=1e-10)


def test_partial_sums_monotone_and_bounded():
    prev_p = prev_s = 0.0
    for k in range(1, 60):
        res = short_table_series(2, 1e-300, max_terms=k)
        assert res.terms_used == k
        assert prev_p <= res.p_right <= 2 / 3
        assert prev_s <= res.mean_steps <= 2
        prev_p, prev_s = res.p_right, res.mean_steps
    assert short_table_series(2, 1e-12, max_terms=1).p_right == 0.5
    assert short_table_series(1, 1e-12, max_terms=1).p_right == 0.0


@pytest.mark.parametrize("tol", [1e-3, 1e-6, 1e-9])
def test_series_within_ten_tol(tol):
    for start, p in [(1, 1 / 3), (2, 2 / 3)]:
        res = short_table_series(start, tol)
        assert abs(res.p_right - p) <= 10 * tol
        assert abs(res.mean_steps - 2) <= 10 * tol


def test_series_bad_tol():
    with pytest.raises(NonPositiveTolerance):
        short_table_series(1, 0)


def test_lottery_ev():
    assert truncated_lottery_ev(1) == F(1, 2)
    assert truncated_lottery_ev(10) == 5
    values = [truncated_lottery_ev(m) for m in range(1, 61)]
    assert values == [F(m, 2) for m in range(1, 61)]
    assert all(a < b for a, b in zip(values, values[1:]))
    with pytest.raises(NonPositiveTosses):
        truncated_lottery_ev(0)
