"""Weight functions F on an interval of the positive half-line.

A weight ``F`` defines the scalar product of a Bargmann space through
``(g, f) = int F(|z|^2) f(z) conj(g(z)) dz dzbar`` over the ring
``alpha < |z|^2 < beta``. Each family below knows its logarithm both in
``x`` and in the exponential variable ``t = ln x`` (the variable used by
the Mellin quadrature), plus an analytic classification of its behaviour
at the finite edges of the interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

__all__ = [
    "Interval",
    "EdgeKind",
    "EdgeBehavior",
    "WeightFunction",
    "Power",
    "PowerBeta",
    "StretchedExp",
    "LogGaussian",
    "EssentialEdge",
    "TabulatedPositive",
    "evaluate",
    "edge_behavior",
    "from_params",
]


@dataclass(frozen=True)
class Interval:
    """Open interval ``(alpha, beta)`` of squared moduli ``|z|^2``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha >= 0.0):
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not (self.beta > self.alpha):
            raise DomainError(f"need alpha < beta, got ({self.alpha}, {self.beta})")

    def contains(self, x) -> bool:
        return self.alpha < x < self.beta

    @property
    def log_alpha(self) -> float:
        return math.log(self.alpha) if self.alpha > 0 else -math.inf

    @property
    def log_beta(self) -> float:
        return math.log(self.beta) if math.isfinite(self.beta) else math.inf


class EdgeKind(str, Enum):
    NONZERO_VALUE = "nonzero-value"
    VANISHING_DERIVATIVE = "first-nonvanishing-derivative"
    ALL_DERIVATIVES_VANISH = "all-derivatives-vanish"
    SINGULAR = "singular"


@dataclass(frozen=True)
class EdgeBehavior:
    edge: str
    kind: EdgeKind
    order: int | None = None

    def __post_init__(self):
        if self.edge not in ("lower", "upper"):
            raise ValueError(f"edge must be 'lower' or 'upper', got {self.edge!r}")
        if self.kind is EdgeKind.VANISHING_DERIVATIVE and (self.order is None or self.order < 1):
            raise ValueError("a vanishing edge needs a derivative order >= 1")

    @property
    def regular(self) -> bool:
        """True when the value or a finite-order derivative is nonzero there."""
        return self.kind in (EdgeKind.NONZERO_VALUE, EdgeKind.VANISHING_DERIVATIVE)


def _is_positive_int(v: float) -> bool:
    return v > 0 and float(v).is_integer()


class WeightFunction:
    """Base class for a positive weight on ``interval``.

    Subclasses implement :meth:`log_f_t`, the logarithm of ``F(e^t)``, and
    :meth:`_edge_kind`. Everything else is derived from those two.
    """

    family: str = "abstract"
    interval: Interval

    #: exponent ``eta`` of an algebraic factor ``(beta - x)^eta`` at the
    #: upper edge; nonzero values let the quadrature use an endpoint weight.
    upper_algebraic_exponent: float = 0.0

    def log_f_t(self, t):
        raise NotImplementedError

    def log_f_t_regular(self, t):
        """``ln F(e^t)`` minus the algebraic edge factor ``eta * ln(ln beta - t)``."""
        return self.log_f_t(t)

    def breakpoints_t(self) -> tuple:
        """Values of ``t = ln x`` where ``ln F`` is not smooth (none by default)."""
        return ()

    def log_f(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.log_f_t(np.log(x))

    def __call__(self, x):
        return evaluate(self, x)

    def params(self) -> dict:
        raise NotImplementedError

    def _edge_kind(self, edge: str) -> EdgeBehavior:
        raise NotImplementedError

    def describe(self) -> dict:
        d = {"family": self.family}
        d.update(self.params())
        d["alpha"] = self.interval.alpha
        d["beta"] = self.interval.beta
        return d


def evaluate(w: WeightFunction, x):
    """Return ``F(x)`` for ``x`` strictly inside ``w.interval``.

    Accepts scalars or arrays; raises :class:`DomainError` otherwise.
    """
    xa = np.asarray(x, dtype=float)
    a, b = w.interval.alpha, w.interval.beta
    if np.any(~((xa > a) & (xa < b))):
        raise DomainError(f"x={x} outside the open interval ({a}, {b})")
    val = np.exp(w.log_f(xa))
    return float(val) if val.ndim == 0 else val


def edge_behavior(w: WeightFunction, edge: str) -> EdgeBehavior:
    """Analytic classification of ``F`` at a finite edge.

    Edges at 0 or +infinity are reported as singular: the edge
    conditions of the ring case do not apply there.
    """
    if edge not in ("lower", "upper"):
        raise ValueError(f"edge must be 'lower' or 'upper', got {edge!r}")
    value = w.interval.alpha if edge == "lower" else w.interval.beta
    if value == 0.0 or math.isinf(value):
        return EdgeBehavior(edge, EdgeKind.SINGULAR)
    return w._edge_kind(edge)


@dataclass(frozen=True)
class Power(WeightFunction):
    """``F(x) = x**sigma`` on ``(alpha, beta)``."""

    sigma: float
    alpha: float = 0.0
    beta: float = 1.0
    family = "power"

    def __post_init__(self):
        object.__setattr__(self, "interval", Interval(self.alpha, self.beta))

    def log_f_t(self, t):
        return self.sigma * np.asarray(t, dtype=float)

    def params(self):
        return {"sigma": self.sigma}

    def _edge_kind(self, edge):
        return EdgeBehavior(edge, EdgeKind.NONZERO_VALUE)


@dataclass(frozen=True)
class PowerBeta(WeightFunction):
    """``F(x) = x**sigma * (beta - x)**eta`` on ``(0, beta)``, ``eta > -1``."""

    sigma: float
    eta: float
    beta: float = 1.0
    family = "power_beta"

    def __post_init__(self):
        if not self.eta + 1 > 0:
            raise DomainError(f"need eta + 1 > 0, got eta={self.eta}")
        object.__setattr__(self, "interval", Interval(0.0, self.beta))
        object.__setattr__(self, "upper_algebraic_exponent", float(self.eta))

    def log_f_t(self, t):
        t = np.asarray(t, dtype=float)
        lb = math.log(self.beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            # beta - e^t = beta * (1 - e^(t - ln beta)), kept accurate near the edge
            return self.sigma * t + self.eta * (lb + np.log(-np.expm1(t - lb)))

    def log_f_t_regular(self, t):
        t = np.asarray(t, dtype=float)
        lb = math.log(self.beta)
        u = lb - t
        with np.errstate(divide="ignore", invalid="ignore"):
            # (beta - e^t) / (ln beta - t) = beta * (1 - e^-u) / u, equal to beta at u = 0
            q = np.where(u > 0, -np.expm1(-u) / np.where(u > 0, u, 1.0), 1.0)
            return self.sigma * t + self.eta * (lb + np.log(q))

    def params(self):
        return {"sigma": self.sigma, "eta": self.eta}

    def _edge_kind(self, edge):
        # only the upper edge is finite and nonzero
        if self.eta == 0:
            return EdgeBehavior(edge, EdgeKind.NONZERO_VALUE)
        if _is_positive_int(self.eta):
            return EdgeBehavior(edge, EdgeKind.VANISHING_DERIVATIVE, int(self.eta))
        return EdgeBehavior(edge, EdgeKind.SINGULAR)


@dataclass(frozen=True)
class StretchedExp(WeightFunction):
    """``F(x) = exp(-x**(k/m))`` on ``(0, inf)``.

    ``k`` and ``m`` are positive integers; the ratio is stored reduced.
    ``k = m = 1`` is the weight of the usual Bargmann space.
    """

    k: int
    m: int = 1
    family = "stretched_exp"

    def __post_init__(self):
        if int(self.k) != self.k or int(self.m) != self.m or self.k <= 0 or self.m <= 0:
            raise DomainError(f"k and m must be positive integers, got k={self.k}, m={self.m}")
        r = Fraction(int(self.k), int(self.m))
        object.__setattr__(self, "k", r.numerator)
        object.__setattr__(self, "m", r.denominator)
        object.__setattr__(self, "interval", Interval(0.0, math.inf))

    @property
    def ratio(self) -> float:
        """The exponent ``k/m``."""
        return self.k / self.m

    def log_f_t(self, t):
        with np.errstate(over="ignore"):
            return -np.exp(self.ratio * np.asarray(t, dtype=float))

    def params(self):
        return {"k": self.k, "m": self.m}

    def _edge_kind(self, edge):
        return EdgeBehavior(edge, EdgeKind.SINGULAR)


@dataclass(frozen=True)
class LogGaussian(WeightFunction):
    """``F(x) = exp(-sigma * (ln x)**(2n))`` on ``(0, inf)``."""

    sigma: float
    n: int = 1
    family = "log_gaussian"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "interval", Interval(0.0, math.inf))

    def log_f_t(self, t):
        return -self.sigma * np.asarray(t, dtype=float) ** (2 * self.n)

    def params(self):
        return {"sigma": self.sigma, "n": self.n}

    def _edge_kind(self, edge):
        return EdgeBehavior(edge, EdgeKind.SINGULAR)


@dataclass(frozen=True)
class EssentialEdge(WeightFunction):
    """``F(x) = exp(1/(x - beta))`` on ``(alpha, beta)``.

    Every derivative vanishes at ``beta``.
    """

    beta: float = 1.0
    alpha: float = 0.0
    family = "essential_edge"

    def __post_init__(self):
        object.__setattr__(self, "interval", Interval(self.alpha, self.beta))

    def log_f_t(self, t):
        t = np.asarray(t, dtype=float)
        lb = math.log(self.beta)
        with np.errstate(divide="ignore"):
            # 1/(e^t - beta) = 1/(beta * expm1(t - ln beta))
            return 1.0 / (self.beta * np.expm1(t - lb))

    def params(self):
        return {}

    def _edge_kind(self, edge):
        if edge == "upper":
            return EdgeBehavior(edge, EdgeKind.ALL_DERIVATIVES_VANISH)
        return EdgeBehavior(edge, EdgeKind.NONZERO_VALUE)


@dataclass(frozen=True, eq=False)
class TabulatedPositive(WeightFunction):
    """Weight sampled on a grid, interpolated by a monotone cubic (PCHIP).

    The interpolant is shape preserving, so it stays between neighbouring
    sample values and therefore positive. The interval is the grid span.
    """

    x: tuple
    y: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)
    family = "tabulated"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise DomainError("tabulated weight needs two 1-d arrays of equal length >= 2")
        if np.any(np.diff(x) <= 0):
            raise DomainError("grid must be strictly increasing")
        if x[0] < 0:
            raise DomainError("grid must lie on the nonnegative half-line")
        if np.any(~np.isfinite(y)) or np.any(y <= 0):
            raise DomainError("tabulated values must be finite and strictly positive")
        object.__setattr__(self, "x", tuple(x.tolist()))
        object.__setattr__(self, "y", tuple(y.tolist()))
        object.__setattr__(self, "interval", Interval(float(x[0]), float(x[-1])))
        object.__setattr__(self, "_interp", PchipInterpolator(x, y, extrapolate=False))

    def log_f(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.x[0], self.x[-1])
        return np.log(self._interp(x))

    def log_f_t(self, t):
        return self.log_f(np.exp(np.asarray(t, dtype=float)))

    def breakpoints_t(self):
        with np.errstate(divide="ignore"):
            t = np.log(np.asarray(self.x[1:-1]))
        return tuple(t[np.isfinite(t)].tolist())

    def params(self):
        return {"x": list(self.x), "y": list(self.y)}

    def describe(self):
        d = {"family": self.family, "points": len(self.x)}
        d["alpha"] = self.interval.alpha
        d["beta"] = self.interval.beta
        return d

    def _edge_kind(self, edge):
        return EdgeBehavior(edge, EdgeKind.NONZERO_VALUE)


_FAMILIES = {
    "power": Power,
    "power_beta": PowerBeta,
    "stretched_exp": StretchedExp,
    "log_gaussian": LogGaussian,
    "essential_edge": EssentialEdge,
    "tabulated": TabulatedPositive,
}


def from_params(family: str, **params) -> WeightFunction:
    """Build a weight from a family name and keyword parameters.

    ``alpha``/``beta`` are accepted for every family but only honoured
    where the family allows a free interval; a mismatch raises.
    """
    key = family.lower().replace("-", "_")
    if key not in _FAMILIES:
        raise ValueError(f"unknown weight family {family!r}; choose from {sorted(_FAMILIES)}")
    cls = _FAMILIES[key]
    alpha = params.pop("alpha", None)
    beta = params.pop("beta", None)
    if cls is Power:
        return Power(params["sigma"], 0.0 if alpha is None else alpha, 1.0 if beta is None else beta)
    if cls is EssentialEdge:
        return EssentialEdge(1.0 if beta is None else beta, 0.0 if alpha is None else alpha)
    if cls is PowerBeta:
        if alpha not in (None, 0, 0.0):
            raise DomainError("power_beta lives on (0, beta)")
        return PowerBeta(params["sigma"], params["eta"], 1.0 if beta is None else beta)
    if cls in (StretchedExp, LogGaussian):
        if alpha not in (None, 0, 0.0) or beta not in (None, math.inf):
            raise DomainError(f"{key} lives on (0, inf)")
        return cls(**params)
    return cls(params["x"], params["y"])
