import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dhoa.errors import DomainError
from dhoa.weightfn import (
    EdgeKind,
    EssentialEdge,
    Interval,
    LogGaussian,
    Power,
    PowerBeta,
    StretchedExp,
    TabulatedPositive,
    edge_behavior,
    evaluate,
    from_params,
)


class TestInterval:
    def test_accepts_ring_and_half_line(self):
        assert Interval(1, 4).contains(2.0)
        assert Interval(0, math.inf).contains(1e300)

    @pytest.mark.parametrize("a,b", [(-1, 1), (2, 1), (1, 1), (math.inf, math.inf)])
    def test_rejects_bad_bounds(self, a, b):
        with pytest.raises((DomainError, ValueError)):
            Interval(a, b)

    def test_open_interval(self):
        iv = Interval(1, 4)
        assert not iv.contains(1.0)
        assert not iv.contains(4.0)


class TestEvaluate:
    def test_power(self):
        assert evaluate(Power(2.0, 0.0, 1.0), 0.5) == pytest.approx(0.25, rel=1e-15)

    def test_stretched_exp(self):
        assert evaluate(StretchedExp(1, 1), 1.0) == pytest.approx(math.exp(-1), rel=1e-15)

    def test_stretched_exp_fractional_exponent(self):
        # exp(-x^(k/m)) with k/m = 1/2
        assert evaluate(StretchedExp(1, 2), 4.0) == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_log_gaussian(self):
        assert evaluate(LogGaussian(1.0, 1), 1.0) == 1.0
        x = 3.0
        assert evaluate(LogGaussian(0.5, 2), x) == pytest.approx(math.exp(-0.5 * math.log(x) ** 4), rel=1e-14)

    def test_power_beta(self):
        w = PowerBeta(1.0, 2.5, 2.0)
        assert evaluate(w, 0.5) == pytest.approx(0.5 * 1.5 ** 2.5, rel=1e-14)

    def test_essential_edge(self):
        w = EssentialEdge(1.0)
        assert evaluate(w, 0.5) == pytest.approx(math.exp(1 / (0.5 - 1)), rel=1e-14)
        # flat at the edge: underflows to 0 long before x reaches beta
        assert evaluate(w, 1 - 1e-3) < 1e-400 or evaluate(w, 1 - 1e-3) == 0.0

    @pytest.mark.parametrize("x", [0.0, 1.0, 1.5, -0.2])
    def test_outside_raises(self, x):
        with pytest.raises(DomainError):
            evaluate(Power(0.0, 0.0, 1.0), x)

    def test_vectorized(self):
        x = np.array([0.25, 0.5])
        np.testing.assert_allclose(evaluate(Power(2.0, 0.0, 1.0), x), x ** 2, rtol=1e-15)


class TestParameters:
    def test_power_beta_needs_eta_above_minus_one(self):
        with pytest.raises(DomainError):
            PowerBeta(0.0, -1.0)

    def test_stretched_exp_reduces_ratio(self):
        w = StretchedExp(2, 4)
        assert (w.k, w.m) == (1, 2)

    @pytest.mark.parametrize("k,m", [(0, 1), (-1, 2), (1, 0)])
    def test_stretched_exp_rejects_nonpositive(self, k, m):
        with pytest.raises(DomainError):
            StretchedExp(k, m)

    def test_log_gaussian_needs_positive_sigma_and_integer_n(self):
        with pytest.raises(DomainError):
            LogGaussian(0.0, 1)
        with pytest.raises(DomainError):
            LogGaussian(1.0, 1.5)

    def test_from_params_round_trip(self):
        w = from_params("power", sigma=2.0, alpha=1.0, beta=3.0)
        assert w == Power(2.0, 1.0, 3.0)
        assert from_params("stretched-exp", k=1, m=2) == StretchedExp(1, 2)

    def test_from_params_unknown_family(self):
        with pytest.raises(ValueError, match="unknown weight family"):
            from_params("gaussian", sigma=1.0)

    def test_from_params_rejects_wrong_interval(self):
        with pytest.raises(DomainError):
            from_params("stretched_exp", k=1, m=1, beta=2.0)

    def test_describe_lists_interval(self):
        d = Power(1.0, 1.0, 2.0).describe()
        assert d == {"family": "power", "sigma": 1.0, "alpha": 1.0, "beta": 2.0}


class TestEdgeBehavior:
    def test_power_ring_edges_nonzero(self):
        assert edge_behavior(Power(1.0, 1.0, 2.0), "upper").kind is EdgeKind.NONZERO_VALUE
        assert edge_behavior(Power(1.0, 1.0, 2.0), "lower").kind is EdgeKind.NONZERO_VALUE

    def test_power_beta_integer_eta(self):
        e = edge_behavior(PowerBeta(0.0, 3.0, 1.0), "upper")
        assert e.kind is EdgeKind.VANISHING_DERIVATIVE
        assert e.order == 3
        assert e.regular

    def test_power_beta_eta_zero_is_nonzero_value(self):
        assert edge_behavior(PowerBeta(0.0, 0.0, 1.0), "upper").kind is EdgeKind.NONZERO_VALUE

    def test_power_beta_fractional_eta_singular(self):
        e = edge_behavior(PowerBeta(0.0, 2.5, 1.0), "upper")
        assert e.kind is EdgeKind.SINGULAR
        assert not e.regular

    def test_essential_edge(self):
        assert edge_behavior(EssentialEdge(1.0), "upper").kind is EdgeKind.ALL_DERIVATIVES_VANISH

    @pytest.mark.parametrize("w,edge", [(Power(0.0, 0.0, 1.0), "lower"), (StretchedExp(1, 1), "upper"),
                                        (LogGaussian(1.0), "lower")])
    def test_zero_or_infinite_edges_are_singular(self, w, edge):
        assert edge_behavior(w, edge).kind is EdgeKind.SINGULAR

    def test_order_required_for_derivative_kind(self):
        from dhoa.weightfn import EdgeBehavior

        with pytest.raises(ValueError):
            EdgeBehavior("upper", EdgeKind.VANISHING_DERIVATIVE, 0)


class TestTabulated:
    def test_reproduces_grid(self):
        x = np.linspace(1, 4, 7)
        y = 1 + np.sin(x) ** 2
        w = TabulatedPositive(x, y)
        np.testing.assert_allclose(evaluate(w, x[1:-1]), y[1:-1], rtol=1e-14)

    @pytest.mark.parametrize("y", [[1, 0, 1], [1, -1, 2], [1, float("nan"), 1]])
    def test_rejects_nonpositive(self, y):
        with pytest.raises(DomainError):
            TabulatedPositive([0, 1, 2], y)

    def test_rejects_unsorted_grid(self):
        with pytest.raises(DomainError):
            TabulatedPositive([0, 2, 1], [1, 1, 1])

    def test_interval_is_grid_span(self):
        w = TabulatedPositive([0.5, 1, 3], [1, 2, 1])
        assert (w.interval.alpha, w.interval.beta) == (0.5, 3.0)

    @given(st.lists(st.floats(1e-6, 1e6), min_size=3, max_size=12))
    def test_stays_positive_between_samples(self, ys):
        x = np.arange(1, len(ys) + 1, dtype=float)
        w = TabulatedPositive(x, ys)
        dense = np.linspace(x[0], x[-1], 400)[1:-1]
        v = evaluate(w, dense)
        assert np.all(v > 0)
        # shape preserving: never outside the sample range
        assert np.all(v <= max(ys) * (1 + 1e-12))
        assert np.all(v >= min(ys) * (1 - 1e-12))


_families = st.one_of(
    st.builds(Power, st.floats(-3, 3), st.just(1.0), st.floats(1.5, 10)),
    st.builds(Power, st.floats(-3, 3), st.just(0.0), st.floats(0.5, 10)),
    st.builds(PowerBeta, st.floats(-0.9, 3), st.floats(-0.9, 4), st.floats(0.5, 5)),
    st.builds(StretchedExp, st.integers(1, 4), st.integers(1, 4)),
    st.builds(LogGaussian, st.floats(0.1, 5), st.integers(1, 3)),
    st.builds(EssentialEdge, st.floats(0.5, 5)),
)


@given(_families, st.floats(0.001, 0.999))
def test_positive_inside_interval(w, u):
    iv = w.interval
    hi = iv.beta if math.isfinite(iv.beta) else iv.alpha + 50.0
    x = iv.alpha + u * (hi - iv.alpha)
    # positivity is checked on ln F: F itself may underflow in double precision
    assert np.isfinite(w.log_f(x))
    assert evaluate(w, x) >= 0
