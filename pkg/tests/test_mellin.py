import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dhoa.errors import NumericalFailure
from dhoa.mellin import (
    MellinProfile,
    RatioLimits,
    convergence_abscissa,
    log_integrate,
    mellin_transform,
    numeric_abscissa,
    ratio_limits,
    wynn_epsilon,
)
from dhoa.weightfn import (
    EssentialEdge,
    LogGaussian,
    Power,
    PowerBeta,
    StretchedExp,
    TabulatedPositive,
)

mpmath.mp.dps = 30


def mp_mellin(f, a, b, rho):
    """Independent oracle: mpmath tanh-sinh in x, 30 digits."""
    g = lambda x: f(x) * x ** (rho - 1)
    if b == math.inf:
        return float(mpmath.quad(g, [a, 1, 10, mpmath.inf] if a < 1 else [a, a + 10, mpmath.inf]))
    return float(mpmath.quad(g, [a, b]))


ORACLE_CASES = [
    (Power(0.0, 1.0, 4.0), lambda x: 1, 1, 4),
    (Power(2.0, 1.0, 4.0), lambda x: x ** 2, 1, 4),
    (Power(-1.0, 1.0, 4.0), lambda x: 1 / x, 1, 4),
    (Power(1.0, 0.0, 2.0), lambda x: x, 0, 2),
    (PowerBeta(0.0, 2.5, 1.0), lambda x: (1 - x) ** mpmath.mpf(2.5), 0, 1),
    (PowerBeta(1.0, 1.0, 2.0), lambda x: x * (2 - x), 0, 2),
    (StretchedExp(1, 1), lambda x: mpmath.exp(-x), 0, math.inf),
    (StretchedExp(1, 2), lambda x: mpmath.exp(-mpmath.sqrt(x)), 0, math.inf),
    (StretchedExp(2, 1), lambda x: mpmath.exp(-x ** 2), 0, math.inf),
    (LogGaussian(1.0, 1), lambda x: mpmath.exp(-mpmath.log(x) ** 2), 0, math.inf),
    (LogGaussian(0.5, 2), lambda x: mpmath.exp(-0.5 * mpmath.log(x) ** 4), 0, math.inf),
    (EssentialEdge(1.0), lambda x: mpmath.exp(1 / (x - 1)), 0, 1),
]


@pytest.mark.parametrize("case", ORACLE_CASES, ids=lambda c: f"{c[0].family}{c[0].params()}")
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.7, 6.0])
def test_quadrature_matches_mpmath(case, rho):
    w, f, a, b = case
    want = mp_mellin(f, a, b, rho)
    got = mellin_transform(MellinProfile(w, method="quadrature"), rho)
    assert got == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("rho", [-6.0, -2.5, -0.3])
def test_quadrature_negative_rho_on_ring(rho):
    w = Power(2.0, 1.0, 4.0)
    want = mp_mellin(lambda x: x ** 2, 1, 4, rho)
    assert mellin_transform(MellinProfile(w, method="quadrature"), rho) == pytest.approx(want, rel=1e-10)


class TestClosedForms:
    def test_gamma(self):
        assert mellin_transform(MellinProfile(StretchedExp(1, 1)), 5.0) == pytest.approx(24.0, rel=1e-14)

    def test_unit_interval(self):
        assert mellin_transform(MellinProfile(Power(0.0, 0.0, 1.0)), 2.0) == pytest.approx(0.5, rel=1e-15)

    def test_gaussian(self):
        assert mellin_transform(MellinProfile(LogGaussian(1.0, 1)), 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_beta_function(self):
        w = PowerBeta(0.5, 1.5, 2.0)
        rho = 1.25
        want = 2.0 ** (1.5 + 0.5 + rho) * math.gamma(rho + 0.5) * math.gamma(2.5) / math.gamma(rho + 0.5 + 2.5)
        assert mellin_transform(MellinProfile(w), rho) == pytest.approx(want, rel=1e-13)

    def test_power_at_log_singularity(self):
        # sigma + rho = 0 gives ln(beta/alpha)
        assert mellin_transform(MellinProfile(Power(-1.0, 1.0, 4.0)), 1.0) == pytest.approx(math.log(4), rel=1e-14)

    def test_method_selection(self):
        assert MellinProfile(StretchedExp(1, 1)).method == "closed-form"
        assert MellinProfile(LogGaussian(1.0, 2)).method == "quadrature"
        assert MellinProfile(EssentialEdge(1.0)).method == "quadrature"
        with pytest.raises(ValueError):
            MellinProfile(EssentialEdge(1.0), method="closed-form")


def _closed_form_families():
    return [Power(0.0, 1.0, 4.0), Power(2.0, 1.0, 4.0), Power(-1.0, 1.0, 4.0), Power(0.0, 0.0, 1.0),
            Power(3.0, 0.0, 2.0), PowerBeta(0.0, 1.0, 1.0), PowerBeta(0.0, 2.5, 1.0), PowerBeta(1.0, 0.5, 3.0),
            StretchedExp(1, 1), StretchedExp(1, 2), StretchedExp(2, 1), StretchedExp(3, 2), LogGaussian(1.0, 1),
            LogGaussian(2.5, 1)]


@pytest.mark.parametrize("w", _closed_form_families(), ids=lambda w: f"{w.family}{w.params()}")
def test_closed_form_agrees_with_quadrature(w):
    cf = MellinProfile(w, method="closed-form")
    qd = MellinProfile(w, method="quadrature")
    nu = cf.nu
    grid = np.linspace(-20, 20, 41) if math.isinf(nu) else np.linspace(nu + 0.5, nu + 20, 40)
    for rho in grid:
        assert qd.log_value(rho) == pytest.approx(cf.log_value(rho), abs=1e-8), rho


class TestAbscissa:
    @pytest.mark.parametrize("w,nu", [
        (Power(3.0, 0.0, 1.0), -3.0),
        (Power(0.0, 1.0, 2.0), -math.inf),
        (EssentialEdge(1.0), 0.0),
        (StretchedExp(1, 2), 0.0),
        (LogGaussian(1.0, 2), -math.inf),
        (PowerBeta(2.0, 0.5, 1.0), -2.0),
        (EssentialEdge(1.0, 0.5), -math.inf),
    ])
    def test_analytic(self, w, nu):
        assert convergence_abscissa(MellinProfile(w)) == nu

    def test_nowhere_convergent(self):
        p = MellinProfile(Power(0.0, 0.0, math.inf))
        assert p.nu == math.inf
        assert not p.converges(1.0)

    def test_upper_abscissa_for_half_line(self):
        p = MellinProfile(Power(1.0, 2.0, math.inf))
        assert p.nu == -math.inf
        assert p.nu_upper == -1.0

    def test_divergent_below_abscissa(self):
        p = MellinProfile(Power(3.0, 0.0, 1.0))
        assert mellin_transform(p, -3.0) == math.inf
        assert mellin_transform(p, -4.5) == math.inf
        assert mellin_transform(p, -2.9) == pytest.approx(10.0, rel=1e-12)

    @pytest.mark.parametrize("w,nu", [(Power(3.0, 0.0, 1.0), -3.0), (EssentialEdge(1.0), 0.0),
                                      (StretchedExp(1, 1), 0.0)])
    def test_numeric_fallback_matches_analytic(self, w, nu):
        assert numeric_abscissa(w, "lower") == pytest.approx(nu, abs=1e-4)

    def test_numeric_fallback_whole_axis(self):
        assert numeric_abscissa(LogGaussian(1.0, 1), "lower") == -math.inf
        assert numeric_abscissa(LogGaussian(1.0, 1), "upper") == math.inf

    def test_tabulated_weight_uses_numeric_abscissa(self):
        w = TabulatedPositive([0.0, 0.5, 1.0], [1.0, 2.0, 1.5])
        assert MellinProfile(w).nu == pytest.approx(0.0, abs=1e-4)


class TestRatioLimits:
    def test_ring_closed_form(self):
        lim = ratio_limits(MellinProfile(Power(0.0, 1.0, 4.0)))
        assert (lim.at_minus_infinity, lim.at_plus_infinity) == (1.0, 4.0)
        assert lim.confidence == "closed-form"

    def test_ring_extrapolated(self):
        lim = ratio_limits(MellinProfile(Power(0.0, 1.0, 4.0)), force_extrapolation=True)
        assert lim.confidence == "extrapolated"
        assert lim.at_minus_infinity == pytest.approx(1.0, abs=1e-4)
        assert lim.at_plus_infinity == pytest.approx(4.0, abs=1e-4)

    def test_essential_edge_tends_to_beta(self):
        lim = MellinProfile(EssentialEdge(1.0)).limits
        assert lim.at_minus_infinity is None
        assert lim.confidence == "extrapolated"
        assert lim.samples["plus"]["estimate"] == pytest.approx(1.0, abs=1e-3)
        assert lim.at_plus_infinity == pytest.approx(1.0, abs=1e-3)

    def test_essential_edge_other_beta(self):
        lim = MellinProfile(EssentialEdge(2.0)).limits
        assert lim.samples["plus"]["estimate"] == pytest.approx(2.0, abs=2e-3)

    def test_log_gaussian(self):
        lim = MellinProfile(LogGaussian(1.0, 1)).limits
        assert (lim.at_minus_infinity, lim.at_plus_infinity) == (0.0, math.inf)

    def test_log_gaussian_extrapolated(self):
        lim = ratio_limits(MellinProfile(LogGaussian(1.0, 1)), force_extrapolation=True)
        assert lim.at_plus_infinity == math.inf
        assert lim.at_minus_infinity == 0.0

    def test_stretched_exp_unbounded(self):
        lim = MellinProfile(StretchedExp(2, 1)).limits
        assert lim.at_plus_infinity == math.inf
        assert lim.at_minus_infinity is None

    def test_values_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            RatioLimits(-1.0, 2.0)


class TestWynn:
    def test_accelerates_alternating_series(self):
        partial = np.cumsum([(-1) ** k / (k + 1) for k in range(14)])
        est = wynn_epsilon(list(partial))
        assert abs(est[-1] - math.log(2)) < 1e-10
        assert abs(partial[-1] - math.log(2)) > 1e-2

    def test_geometric_limit_exact(self):
        seq = [1 - 0.5 ** k for k in range(1, 6)]
        assert wynn_epsilon(seq)[-1] == pytest.approx(1.0, abs=1e-14)


class TestLogIntegrate:
    def test_gaussian(self):
        val, err = log_integrate(lambda t: -t * t, -math.inf, math.inf)
        assert val == pytest.approx(0.5 * math.log(math.pi), abs=1e-13)
        assert err < 1e-10

    def test_large_scale(self):
        # exp(1000 - t^2): the log is returned without overflow
        val, _ = log_integrate(lambda t: 1000.0 - t * t, -math.inf, math.inf)
        assert val == pytest.approx(1000.0 + 0.5 * math.log(math.pi), abs=1e-12)

    def test_divergent_tail(self):
        val, _ = log_integrate(lambda t: 0.1 * t, 0.0, math.inf)
        assert val == math.inf


class TestCache:
    def test_memo_reused(self):
        p = MellinProfile(EssentialEdge(1.0))
        a = p.log_value(2.0)
        assert len(p._memo) == 1
        assert p.log_value(2.0 + 1e-14) == a
        assert len(p._memo) == 1

    def test_cache_can_be_disabled(self):
        p = MellinProfile(EssentialEdge(1.0), cache=False)
        assert p.log_value(2.0) == pytest.approx(MellinProfile(EssentialEdge(1.0)).log_value(2.0), rel=1e-13)

    def test_thread_safe(self):
        from concurrent.futures import ThreadPoolExecutor

        p = MellinProfile(LogGaussian(1.0, 2))
        rhos = [0.25 * k for k in range(-8, 9)] * 3
        with ThreadPoolExecutor(4) as ex:
            vals = list(ex.map(p.log_value, rhos))
        serial = [MellinProfile(LogGaussian(1.0, 2)).log_value(r) for r in rhos]
        assert vals == pytest.approx(serial, rel=1e-13)


def test_nonconvergent_quadrature_raises():
    class Spiky(Power):
        """x^0 times a kink the integrator cannot resolve to 1e-10."""

        def log_f_t(self, t):
            return np.log1p(0.9 * np.sign(np.sin(1e4 * np.asarray(t))))

    w = Spiky(0.0, 1.0, 50.0)
    with pytest.raises(NumericalFailure) as info:
        MellinProfile(w, method="quadrature").value(1.0)
    assert info.value.estimate is not None


# -- properties ------------------------------------------------------------

_profiles = {
    "ring": MellinProfile(Power(1.0, 1.0, 4.0)),
    "disk": MellinProfile(Power(0.0, 0.0, 1.0)),
    "stretched": MellinProfile(StretchedExp(1, 2)),
    "log_gaussian_2": MellinProfile(LogGaussian(1.0, 2)),
    "essential": MellinProfile(EssentialEdge(1.0)),
    "beta": MellinProfile(PowerBeta(0.0, 2.5, 1.0)),
}


def _rho(p, u):
    lo = p.nu + 0.05 if math.isfinite(p.nu) else -15.0
    return lo + u * 15.0


@given(st.sampled_from(sorted(_profiles)), st.floats(0.0, 1.0))
def test_positive_where_finite(name, u):
    p = _profiles[name]
    assert mellin_transform(p, _rho(p, u)) > 0


@given(st.sampled_from(sorted(_profiles)), st.floats(0.0, 1.0), st.sampled_from([0.5, 1.0]))
def test_log_convexity(name, u, h):
    p = _profiles[name]
    rho = _rho(p, u) + h
    lhs = 2 * p.log_value(rho)
    rhs = p.log_value(rho - h) + p.log_value(rho + h)
    assert lhs <= rhs + 1e-10 * max(1.0, abs(rhs))


@given(st.sampled_from(sorted(_profiles)), st.floats(0.0, 1.0))
def test_bound_by_neighbouring_integers(name, u):
    p = _profiles[name]
    rho = _rho(p, u)
    n = math.floor(rho)
    if not p.converges(n):
        return
    assert p.value(rho) <= (p.value(n) + p.value(n + 1)) * (1 + 1e-12)


@given(st.sampled_from(sorted(_profiles)), st.floats(0.0, 1.0), st.floats(0.01, 3.0))
def test_ratio_nondecreasing(name, u, d):
    p = _profiles[name]
    rho = _rho(p, u)

    def r(x):
        return math.exp(p.log_value(x + 1) - p.log_value(x))

    assert r(rho + d) >= r(rho) * (1 - 1e-10)


@given(st.floats(-30, 30), st.sampled_from([(1.0, 4.0, 0.0), (1.0, 4.0, 2.0), (0.5, 3.0, -1.5)]))
def test_ratio_between_ring_edges(rho, ring):
    a, b, sigma = ring
    p = _profiles["ring"] if (a, b, sigma) == (1.0, 4.0, 1.0) else MellinProfile(Power(sigma, a, b))
    r = math.exp(p.log_value(rho + 1) - p.log_value(rho))
    assert a * (1 - 1e-12) <= r <= b * (1 + 1e-12)


@given(st.floats(0.1, 10.0))
def test_log_gaussian_even(rho):
    # the transform of exp(-sigma t^(2n)) is even in rho
    for n in (1, 2):
        p = MellinProfile(LogGaussian(0.7, n), method="quadrature")
        assert p.log_value(-rho) == pytest.approx(p.log_value(rho), abs=1e-10)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 4.0])
def test_essential_edge_moment_recursion(rho):
    # differentiating exp(1/(x - 1)) and expanding (1 - x)^-2 gives
    # rho F^(rho) = sum_n (n + 1) F^(rho + n + 1), which pins the limit to beta = 1
    p = MellinProfile(EssentialEdge(1.0))
    total, n = 0.0, 0
    while True:
        term = (n + 1) * p.value(rho + n + 1)
        total += term
        if term < 1e-14 * total:
            break
        n += 1
    assert total == pytest.approx(rho * p.value(rho), rel=1e-9)
