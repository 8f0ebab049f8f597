"""Mellin transform of a weight, its convergence abscissa and ratio limits.

All values are handled as logarithms internally: moments of weights such
as ``exp(-x**(1/2))`` overflow a double long before the ratios built from
them do. The quadrature path integrates in ``t = ln x``,

    F^(rho) = int exp(ln F(e^t) + rho t) dt,

which turns both the 0 and the infinity edge into ordinary tails.
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .errors import DomainError, NumericalFailure
from .weightfn import (
    EssentialEdge,
    LogGaussian,
    Power,
    PowerBeta,
    StretchedExp,
    TabulatedPositive,
    WeightFunction,
    edge_behavior,
)

__all__ = [
    "MellinProfile",
    "RatioLimits",
    "mellin_transform",
    "log_mellin_transform",
    "convergence_abscissa",
    "ratio_limits",
    "log_integrate",
    "wynn_epsilon",
    "numeric_abscissa",
]

RTOL_TARGET = 1e-12
RTOL_ACCEPT = 1e-10
PANEL_BUDGET = 10_000
# tails are cut where the integrand drops below exp(-TAIL_LOG) of its peak
TAIL_LOG = 60.0


def _peak(h, a, b, n=129):
    """Locate the maximum of ``h`` on the finite interval ``[a, b]``."""
    ts = np.linspace(a, b, n)
    with np.errstate(all="ignore"):
        vals = np.array([h(t) for t in ts], dtype=float)
    # log-weights may be +-inf exactly at an edge
    vals[~np.isfinite(vals)] = -np.inf
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        inner = np.linspace(a, b, n + 2)[1:-1]
        vals_in = np.array([h(t) for t in inner], dtype=float)
        vals_in[~np.isfinite(vals_in)] = -np.inf
        j = int(np.argmax(vals_in))
        if not np.isfinite(vals_in[j]):
            raise NumericalFailure("integrand vanishes on the whole sampled range")
        ts, vals, i = inner, vals_in, j
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    if hi - lo > 0:
        res = minimize_scalar(lambda t: -h(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, abs(ts[i]))})
        if res.success and np.isfinite(res.fun) and -res.fun >= vals[i]:
            return float(res.x), float(-res.fun)
    return float(ts[i]), float(vals[i])


def _tail_cut(h, t0, c, direction, limit):
    """Walk from ``t0`` in ``direction`` until ``h`` falls TAIL_LOG below ``c``."""
    # start tiny: the peak may be a spike far narrower than one unit of t
    d = 2.0**-40
    while d < 2.0**52:
        t = t0 + direction * d
        if (direction > 0 and t >= limit) or (direction < 0 and t <= limit):
            return limit
        if h(t) - c < -TAIL_LOG:
            return t
        d *= 2.0
    return None


def log_integrate(h, a, b, upper_weight_exponent=0.0, rtol=RTOL_TARGET, breakpoints=()):
    """``log int_a^b exp(h(t)) dt`` for a log-integrand ``h``.

    Infinite limits are replaced by cut points where ``h`` has dropped
    ``TAIL_LOG`` below its maximum. When ``upper_weight_exponent`` is
    nonzero the integrand is ``exp(h(t)) * (b - t)**exponent`` with ``h``
    regular at ``b``; the panel touching ``b`` is then integrated with an
    algebraic endpoint weight. ``breakpoints`` are interior points where
    ``h`` has a kink; they are handed to the panel integrator.

    Returns
    -------
    (log_value, relative_error); ``log_value`` is ``inf`` when the tail
    never decays (divergent integral).
    """
    eta = upper_weight_exponent
    if eta != 0.0 and not math.isfinite(b):
        raise ValueError("an endpoint weight needs a finite upper limit")

    def hw(t):
        if eta == 0.0:
            return h(t)
        return h(t) + eta * math.log(b - t) if t < b else (-math.inf if eta > 0 else math.inf)

    fin_a, fin_b = math.isfinite(a), math.isfinite(b)
    if fin_a and fin_b:
        wa, wb = a, b
    elif fin_b:
        wa, wb = b - 64.0, b
    elif fin_a:
        wa, wb = a, a + 64.0
    else:
        wa, wb = -64.0, 64.0
    try:
        tp, c = _peak(h, wa, wb)
    except NumericalFailure:
        if fin_a and fin_b:
            # the integrand underflows everywhere on a finite panel
            return -math.inf, 0.0
        raise
    # on an infinite side the maximum may lie beyond the window: widen it
    for _ in range(60):
        width = wb - wa
        if not fin_a and tp <= wa + 1e-6 * width:
            wa -= width
        elif not fin_b and tp >= wb - 1e-6 * width:
            wb += width
        else:
            break
        tp, c = _peak(h, wa, wb)
    else:
        return math.inf, 0.0

    # finite ends are cut too: a narrow spike at one end of a long panel
    # would otherwise be missed by the first quadrature sweep
    lo = _tail_cut(h, tp, c, -1, a)
    hi = _tail_cut(h, tp, c, +1, b)
    if lo is None or hi is None:
        return math.inf, 0.0

    split = min(max(tp, lo), hi)
    if eta != 0.0:
        # the weighted panel must not be empty
        split = min(split, hi - min(1.0, 0.5 * (hi - lo)))

    for _ in range(4):
        seen = [-math.inf]

        def f(t, g=hw):
            v = g(t) - c
            if v > seen[0]:
                seen[0] = v
            return math.exp(min(v, 700.0)) if v > -745.0 else 0.0

        def kinks(u, v):
            inner = [x for x in breakpoints if u < x < v]
            return {"points": inner} if inner else {}

        total, err = 0.0, 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            if split > lo:
                v, e = quad(f, lo, split, epsabs=0.0, epsrel=rtol, limit=PANEL_BUDGET,
                            **kinks(lo, split))
                total += v
                err += e
            if hi > split:
                if eta != 0.0:
                    v, e = quad(lambda t: f(t, h), split, hi, weight="alg", wvar=(0.0, eta),
                                epsabs=0.0, epsrel=rtol, limit=PANEL_BUDGET)
                else:
                    v, e = quad(f, split, hi, epsabs=0.0, epsrel=rtol, limit=PANEL_BUDGET,
                                **kinks(split, hi))
                total += v
                err += e
        # the sampled peak undershot the true maximum: rescale and redo
        if seen[0] <= 50.0:
            break
        c += seen[0]
    if not total > 0:
        raise NumericalFailure("quadrature returned a nonpositive value", estimate=total, error=err)
    return c + math.log(total), err / total


@dataclass(frozen=True)
class RatioLimits:
    """Limits of ``F^(rho+1)/F^(rho)`` as ``rho`` goes to -inf and +inf.

    A side is ``None`` when it does not apply (the transform diverges on
    that side). ``confidence`` is ``"closed-form"`` or ``"extrapolated"``;
    in the latter case ``residual`` holds the last accepted change of the
    accelerated sequence and ``samples`` the raw ratios.
    """

    at_minus_infinity: float | None
    at_plus_infinity: float | None
    confidence: str = "closed-form"
    residual: float | None = None
    samples: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for v in (self.at_minus_infinity, self.at_plus_infinity):
            if v is not None and not v >= 0:
                raise ValueError(f"ratio limits must be nonnegative, got {v}")


class _Memo:
    """Thread-safe memo table keyed on rho rounded to 12 decimals."""

    def __init__(self):
        self._lock = threading.Lock()
        self._d = {}

    def get(self, rho, compute):
        key = round(float(rho), 12)
        with self._lock:
            if key in self._d:
                return self._d[key]
        val = compute(rho)
        with self._lock:
            self._d.setdefault(key, val)
        return val

    def __len__(self):
        return len(self._d)


def _has_closed_form(w: WeightFunction) -> bool:
    if isinstance(w, (Power, PowerBeta, StretchedExp)):
        return True
    return isinstance(w, LogGaussian) and w.n == 1


def _log_closed_form(w: WeightFunction, rho: float) -> float:
    if isinstance(w, Power):
        s = w.sigma + rho
        la, lb = w.interval.log_alpha, w.interval.log_beta
        if w.alpha == 0.0:
            return s * lb - math.log(s)
        if math.isinf(w.beta):
            return s * la - math.log(-s)
        if s == 0.0:
            return math.log(lb - la)
        if s > 0:
            return s * lb + math.log(-math.expm1(s * (la - lb))) - math.log(s)
        return s * la + math.log(-math.expm1(s * (lb - la))) - math.log(-s)
    if isinstance(w, StretchedExp):
        c = w.m / w.k
        return math.log(c) + float(gammaln(rho * c))
    if isinstance(w, PowerBeta):
        s = rho + w.sigma
        return ((w.eta + s) * math.log(w.beta) + float(gammaln(s))
                + float(gammaln(w.eta + 1.0)) - float(gammaln(s + w.eta + 1.0)))
    if isinstance(w, LogGaussian) and w.n == 1:
        return 0.5 * math.log(math.pi / w.sigma) + rho * rho / (4.0 * w.sigma)
    raise NotImplementedError(f"no closed form for {w.family}")


def _analytic_abscissae(w: WeightFunction):
    """(nu, nu_upper) when known analytically, else None."""
    a, b = w.interval.alpha, w.interval.beta
    if isinstance(w, Power):
        if a > 0 and math.isfinite(b):
            return -math.inf, math.inf
        if a == 0 and math.isfinite(b):
            return -w.sigma, math.inf
        if a > 0:
            return -math.inf, -w.sigma
        return math.inf, math.inf
    if isinstance(w, PowerBeta):
        return -w.sigma, math.inf
    if isinstance(w, StretchedExp):
        # Gamma(rho m/k) diverges for rho <= 0
        return 0.0, math.inf
    if isinstance(w, LogGaussian):
        return -math.inf, math.inf
    if isinstance(w, EssentialEdge):
        return (0.0 if a == 0 else -math.inf), math.inf
    if isinstance(w, TabulatedPositive) and a > 0:
        return -math.inf, math.inf
    return None


class MellinProfile:
    """Evaluator for the Mellin transform of a weight.

    Parameters
    ----------
    weight
        The weight function.
    method
        ``"auto"`` (closed form when the family has one), ``"closed-form"``
        or ``"quadrature"``.
    cache
        Memoize values; the memo is guarded by a lock.
    ratio_start, ratio_tol, ratio_max_samples
        Controls for the extrapolated ratio limits: samples at
        ``ratio_start * 2**k`` until the accelerated estimate changes by
        less than ``ratio_tol``.
    """

    def __init__(self, weight: WeightFunction, method: str = "auto", cache: bool = True,
                 ratio_start: float = 16.0, ratio_tol: float = 1e-6, ratio_max_samples: int = 14):
        if method not in ("auto", "closed-form", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        if method == "closed-form" and not _has_closed_form(weight):
            raise ValueError(f"{weight.family} has no closed-form Mellin transform")
        if method == "auto":
            method = "closed-form" if _has_closed_form(weight) else "quadrature"
        self.weight = weight
        self.method = method
        self.ratio_start = ratio_start
        self.ratio_tol = ratio_tol
        self.ratio_max_samples = ratio_max_samples
        self._memo = _Memo() if cache else None
        self._abscissae = None
        self._limits = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"MellinProfile({self.weight!r}, method={self.method!r})"

    @property
    def nu(self) -> float:
        """Lower convergence abscissa: finite exactly for ``rho > nu``."""
        return self._get_abscissae()[0]

    @property
    def nu_upper(self) -> float:
        """Upper convergence abscissa: finite exactly for ``rho < nu_upper``."""
        return self._get_abscissae()[1]

    def _get_abscissae(self):
        with self._lock:
            if self._abscissae is None:
                ab = _analytic_abscissae(self.weight)
                if ab is None:
                    ab = (numeric_abscissa(self.weight, "lower"), numeric_abscissa(self.weight, "upper"))
                self._abscissae = ab
            return self._abscissae

    @property
    def normalization(self) -> float:
        """``F^(1)``."""
        return self.value(1.0)

    def converges(self, rho: float) -> bool:
        return self.nu < rho < self.nu_upper

    def log_value(self, rho: float) -> float:
        """``ln F^(rho)``; ``inf`` outside the convergence strip."""
        rho = float(rho)
        if not self.converges(rho):
            return math.inf
        if self._memo is None:
            return self._compute(rho)
        return self._memo.get(rho, self._compute)

    def value(self, rho: float) -> float:
        return math.exp(self.log_value(rho))

    def _compute(self, rho: float) -> float:
        if self.method == "closed-form":
            return _log_closed_form(self.weight, rho)
        return _log_quadrature(self.weight, rho)

    @property
    def limits(self) -> RatioLimits:
        with self._lock:
            cached = self._limits
        if cached is None:
            cached = ratio_limits(self)
            with self._lock:
                self._limits = cached
        return cached


def _log_quadrature(w: WeightFunction, rho: float) -> float:
    la, lb = w.interval.log_alpha, w.interval.log_beta
    eta = w.upper_algebraic_exponent

    def h(t):
        return float(w.log_f_t_regular(t)) + rho * t

    val, rel = log_integrate(h, la, lb, upper_weight_exponent=eta, breakpoints=w.breakpoints_t())
    if math.isinf(val):
        return math.inf
    if rel > RTOL_ACCEPT:
        raise NumericalFailure(
            f"Mellin quadrature at rho={rho} reached relative error {rel:.2e}",
            estimate=math.exp(val) if val < 709 else math.inf, error=rel)
    return val


def mellin_transform(p: MellinProfile, rho: float) -> float:
    """``F^(rho) = int_alpha^beta F(x) x**(rho-1) dx``.

    Returns ``math.inf`` when the integral diverges (``rho <= nu``).
    """
    return p.value(rho)


def log_mellin_transform(p: MellinProfile, rho: float) -> float:
    return p.log_value(rho)


def convergence_abscissa(p: MellinProfile) -> float:
    """Lower convergence abscissa ``nu`` (``-inf``, finite or ``+inf``)."""
    return p.nu


# -- numeric abscissa --------------------------------------------------------

_DIVERGENCE_FACTOR = 10.0
_REFINEMENTS = 22


def _tail_diverges(w: WeightFunction, rho: float, side: str) -> bool:
    """Growth test of partial integrals over shrinking edge neighbourhoods.

    In ``t = ln x`` the neighbourhood of the 0 edge is ``t < -T``. The
    partial integral over ``[-T_j, t_ref]`` with ``T_j`` doubling is
    declared divergent when it grows by more than a factor 10 across
    three successive refinements (a convergent tail grows at most 8x,
    linearly in ``T``, then saturates).
    """
    sgn = -1.0 if side == "lower" else 1.0
    la, lb = w.interval.log_alpha, w.interval.log_beta
    if side == "lower" and math.isfinite(la):
        return False
    if side == "upper" and math.isfinite(lb):
        return False
    if math.isfinite(lb):
        t_ref = lb - 1.0
    elif math.isfinite(la):
        t_ref = la + 1.0
    else:
        t_ref = 0.0

    def h(t):
        return float(w.log_f_t(t)) + rho * t

    logs = []
    acc = -math.inf
    prev = t_ref
    for j in range(_REFINEMENTS):
        edge = t_ref + sgn * 2.0**j
        a, b = (edge, prev) if sgn < 0 else (prev, edge)
        piece, _ = log_integrate(h, a, b, rtol=1e-8)
        if piece == math.inf:
            return True
        acc = np.logaddexp(acc, piece)
        logs.append(acc)
        prev = edge
    # only the last refinements probe the asymptotic tail
    return logs[-1] - logs[-4] > math.log(_DIVERGENCE_FACTOR)


def numeric_abscissa(w: WeightFunction, side: str = "lower", search: float = 256.0,
                     xtol: float = 1e-6, snap: float = 1e-4) -> float:
    """Convergence abscissa of ``w`` at one infinite-``t`` edge, by bisection.

    Values within ``snap`` of an integer are rounded to it.
    """
    if side == "lower":
        if not _tail_diverges(w, -search, side):
            return -math.inf
        if _tail_diverges(w, search, side):
            return math.inf
        lo, hi = -search, search  # diverges at lo, converges at hi
    else:
        if not _tail_diverges(w, search, side):
            return math.inf
        if _tail_diverges(w, -search, side):
            return -math.inf
        lo, hi = -search, search  # converges at lo, diverges at hi
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        div = _tail_diverges(w, mid, side)
        if (side == "lower") == div:
            lo = mid
        else:
            hi = mid
    nu = 0.5 * (lo + hi)
    if abs(nu - round(nu)) < snap:
        nu = float(round(nu))
    return nu


# -- ratio limits ------------------------------------------------------------

def wynn_epsilon(seq):
    """Best estimates of the Wynn epsilon table, one per sequence prefix.

    Returns a list whose k-th entry is the highest even column value
    available from the first ``k+1`` terms.
    """
    s = [float(v) for v in seq]
    out = []
    for n in range(1, len(s) + 1):
        prev = [0.0] * (n + 1)
        cur = s[:n]
        best = cur[-1]
        col = 0
        while len(cur) > 1:
            diffs = np.diff(cur)
            nxt = [prev[i + 1] + (1.0 / diffs[i] if diffs[i] != 0 else math.inf)
                   for i in range(len(cur) - 1)]
            prev, cur = cur, nxt
            col += 1
            if not all(math.isfinite(v) for v in cur):
                # an exact repeat: the sequence has already converged
                break
            if col % 2 == 0:
                best = cur[-1]
        out.append(best)
    return out


def _ratio_at(p: MellinProfile, rho: float) -> float:
    return math.exp(p.log_value(rho + 1.0) - p.log_value(rho))


def _extrapolate(p: MellinProfile, sign: int):
    rhos, rs, est = [], [], []
    mono_slack = 1e-9
    for k in range(p.ratio_max_samples):
        rho = sign * p.ratio_start * 2.0**k
        r = _ratio_at(p, rho)
        rhos.append(rho)
        rs.append(r)
        samples = {"rho": list(rhos), "ratio": list(rs)}
        if k >= 1:
            # r is nondecreasing in rho by log-convexity
            step = (rs[-1] - rs[-2]) * sign
            if step < -mono_slack * max(abs(rs[-1]), 1e-300):
                raise NumericalFailure("ratio samples are not monotone", samples=samples)
        if k >= 3:
            g = [rs[i] / rs[i - 1] for i in range(len(rs) - 3, len(rs))]
            if sign > 0 and all(x >= 1.2 for x in g):
                d = np.diff(rs[-4:])
                if d[-1] >= 0.5 * d[-2] >= 0:
                    return math.inf, None, samples
            if sign < 0 and all(x <= 1 / 1.2 for x in g) and rs[-1] < p.ratio_tol:
                return 0.0, rs[-1], samples
        if k >= 2:
            est = wynn_epsilon(rs)
            change = abs(est[-1] - est[-2])
            if change <= p.ratio_tol * max(1.0, abs(est[-1])):
                samples["estimate"] = float(est[-1])
                return max(float(est[-1]), 0.0), float(change), samples
    raise NumericalFailure("ratio extrapolation did not settle", estimate=est[-1] if est else None,
                           samples={"rho": rhos, "ratio": rs})


def ratio_limits(p: MellinProfile, force_extrapolation: bool = False) -> RatioLimits:
    """Limits of ``F^(rho+1)/F^(rho)`` at both infinities.

    Closed-form answers come from the edge behaviour of the weight: a
    regular finite edge gives the edge itself, the stretched exponential
    and log-Gaussian families are unbounded at +inf, the log-Gaussian
    tends to 0 at -inf. Everything else is extrapolated from samples at
    ``R, 2R, 4R, ...`` accelerated by the epsilon algorithm.
    """
    w = p.weight
    a, b = w.interval.alpha, w.interval.beta
    samples, residuals = {}, []
    extrapolated = False

    # +inf side
    if not math.isinf(p.nu_upper):
        plus = None
    elif not force_extrapolation and math.isfinite(b) and (
            edge_behavior(w, "upper").regular or isinstance(w, PowerBeta)):
        plus = float(b)
    elif not force_extrapolation and isinstance(w, (StretchedExp, LogGaussian)):
        plus = math.inf
    else:
        plus, res, smp = _extrapolate(p, +1)
        if math.isfinite(b):
            plus = min(plus, float(b))
        samples["plus"] = smp
        residuals.append(res)
        extrapolated = True

    # -inf side
    if not math.isinf(p.nu):
        minus = None
    elif not force_extrapolation and a > 0 and edge_behavior(w, "lower").regular:
        minus = float(a)
    elif not force_extrapolation and isinstance(w, LogGaussian):
        minus = 0.0
    else:
        minus, res, smp = _extrapolate(p, -1)
        minus = max(minus, float(a))
        samples["minus"] = smp
        residuals.append(res)
        extrapolated = True

    if not extrapolated:
        return RatioLimits(minus, plus)
    known = [r for r in residuals if r is not None]
    return RatioLimits(minus, plus, "extrapolated", float(max(known)) if known else None, samples)


def check_domain(p: MellinProfile, rho: float):
    if not p.converges(rho):
        raise DomainError(f"Mellin transform diverges at rho={rho} (convergence strip ({p.nu}, {p.nu_upper}))")
