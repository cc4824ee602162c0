import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softbudget import DomainError, ParameterError, QuadraticCost, TabulatedCost


def test_quadratic_marginal_values(bench_cost):
    assert bench_cost.marginal(0.0) == 0.2
    assert bench_cost.marginal(0.8) == pytest.approx(1.0, abs=1e-15)
    assert bench_cost.marginal_at_zero == 0.2
    assert bench_cost.value(0.8) == pytest.approx(0.2 * 0.8 + 0.5 * 0.64, abs=1e-15)


def test_quadratic_inverse_marginal(bench_cost):
    res = bench_cost.inverse_marginal(1.0)
    assert res.payout == pytest.approx(0.8, abs=1e-15)
    assert res.below_origin is False
    low = bench_cost.inverse_marginal(0.1)
    assert low.payout == 0.0
    assert low.below_origin is True
    arr = bench_cost.inverse_marginal(np.array([0.1, 0.2, 0.7]))
    assert np.allclose(arr.payout, [0.0, 0.0, 0.5])
    assert list(arr.below_origin) == [True, False, False]


def test_quadratic_validation():
    with pytest.raises(ParameterError):
        QuadraticCost(-0.1, 1.0)
    with pytest.raises(ParameterError):
        QuadraticCost(0.2, 0.0)
    with pytest.raises(DomainError):
        QuadraticCost(0.2, 1.0).marginal(-0.5)


def test_tabulated_interpolates_and_inverts():
    cost = TabulatedCost([0.0, 1.0], [0.1, 0.5])
    assert cost.marginal(0.5) == pytest.approx(0.3, abs=1e-15)
    res = cost.inverse_marginal(0.3)
    assert res.payout == pytest.approx(0.5, abs=1e-12)
    assert res.below_origin is False
    below = cost.inverse_marginal(0.05)
    assert below.payout == 0.0
    assert below.below_origin is True
    # exact value from integrating the linear marginal
    assert cost.value(1.0) == pytest.approx(0.3, abs=1e-15)
    assert cost.value(0.5) == pytest.approx(0.1 * 0.5 + 0.5 * 0.4 * 0.25, abs=1e-15)


def test_tabulated_plateau_returns_leftmost_preimage():
    cost = TabulatedCost([0.0, 0.3, 0.7, 1.0], [0.1, 0.4, 0.4, 0.9])
    res = cost.inverse_marginal(0.4)
    assert res.payout == pytest.approx(0.3, abs=1e-9)
    assert res.below_origin is False


def test_tabulated_rejects_targets_beyond_table():
    cost = TabulatedCost([0.0, 1.0], [0.1, 0.5])
    with pytest.raises(ParameterError):
        cost.inverse_marginal(0.6)


def test_tabulated_validation():
    with pytest.raises(ParameterError):
        TabulatedCost([0.1, 1.0], [0.1, 0.5])  # grid must start at 0
    with pytest.raises(ParameterError):
        TabulatedCost([0.0, 1.0], [0.5, 0.1])  # decreasing marginal
    with pytest.raises(ParameterError):
        TabulatedCost([0.0, 0.0, 1.0], [0.1, 0.2, 0.5])  # non-increasing grid
    with pytest.raises(ParameterError):
        TabulatedCost([0.0], [0.1])


@given(y=st.floats(min_value=0.2, max_value=50.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_quadratic_inverse_identity(y):
    cost = QuadraticCost(0.2, 1.0)
    x = cost.inverse_marginal(y).payout
    assert abs(cost.marginal(x) - y) <= 1e-9 * max(1.0, abs(y))


@given(y=st.floats(min_value=0.1, max_value=0.9, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_tabulated_inverse_identity(y):
    cost = TabulatedCost([0.0, 0.25, 0.5, 1.0], [0.1, 0.3, 0.6, 0.9])
    x = cost.inverse_marginal(y).payout
    assert abs(cost.marginal(x) - y) <= 1e-6


@given(x=st.floats(min_value=0.0, max_value=2.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_marginal_is_derivative_of_value(x):
    cost = TabulatedCost([0.0, 0.25, 0.5, 1.0], [0.1, 0.3, 0.6, 0.9])
    eps = 1e-6
    fd = (cost.value(x + eps) - cost.value(max(x - eps, 0.0))) / (eps + min(x, eps))
    assert abs(fd - cost.marginal(x)) <= 1e-4
