"""Deformed oscillator algebra reconstructed from a Mellin profile.

The algebra is generated by ``a``, ``a+``, ``N`` with

    [a, N] = a,   a+ a = psi(N),   a a+ = psi(N + 1),

and is fixed here by its characteristic function, a ratio of Mellin
transform values of the weight:

* annihilation mode (coherent states are eigenvectors of ``a``):
  ``psi(rho) = F^(rho - mu + 1) / F^(rho - mu)``
* creation mode (eigenvectors of ``a+``):
  ``psi(rho) = F^(2 - (rho - mu)) / F^(1 - (rho - mu))``

Basis vectors carry integer labels ``n`` and ``N|n> = (n + mu)|n>``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConstructionRejected, DomainError
from .mellin import MellinProfile, RatioLimits
from .weightfn import edge_behavior

__all__ = [
    "Mode",
    "SpectrumDescriptor",
    "CoherentDomain",
    "Check",
    "DiagnosticsReport",
    "DeformedAlgebra",
    "build_algebra",
    "psi",
    "psi_factorial",
    "dual_algebra",
    "check_sufficient",
    "psi_grid",
]

INTEGER_TOL = 1e-9


class Mode(str, Enum):
    ANNIHILATION = "annihilation"
    CREATION = "creation"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        key = str(value).lower().replace("_", "-")
        if key in ("annihilation", "annihilation-coherent", "a"):
            return cls.ANNIHILATION
        if key in ("creation", "creation-coherent", "a+", "adag"):
            return cls.CREATION
        raise ValueError(f"unknown mode {value!r}")

    @property
    def flipped(self) -> "Mode":
        return Mode.CREATION if self is Mode.ANNIHILATION else Mode.ANNIHILATION


@dataclass(frozen=True)
class SpectrumDescriptor:
    """Set of labels ``n`` of the number basis.

    ``shape`` is ``"all-integers"``, ``"lower-bounded"`` (labels
    ``n >= bound``, ``bound <= 0``) or ``"upper-bounded"`` (labels
    ``n <= bound``, ``bound >= 0``). Eigenvalues of ``N`` are ``n + mu``.
    """

    shape: str
    bound: int | None = None
    mu: float = 0.0

    def __post_init__(self):
        if self.shape == "all-integers":
            if self.bound is not None:
                raise ValueError("an unbounded spectrum has no bound")
        elif self.shape == "lower-bounded":
            if self.bound is None or self.bound > 0:
                raise ValueError("a lower bound must be a nonpositive integer")
        elif self.shape == "upper-bounded":
            if self.bound is None or self.bound < 0:
                raise ValueError("an upper bound must be a nonnegative integer")
        else:
            raise ValueError(f"unknown spectrum shape {self.shape!r}")

    @property
    def lower(self) -> float:
        return self.bound if self.shape == "lower-bounded" else -math.inf

    @property
    def upper(self) -> float:
        return self.bound if self.shape == "upper-bounded" else math.inf

    def __contains__(self, n) -> bool:
        return float(n).is_integer() and self.lower <= n <= self.upper

    def reflected(self, mu: float) -> "SpectrumDescriptor":
        if self.shape == "lower-bounded":
            return SpectrumDescriptor("upper-bounded", -self.bound, mu)
        if self.shape == "upper-bounded":
            return SpectrumDescriptor("lower-bounded", -self.bound, mu)
        return SpectrumDescriptor("all-integers", None, mu)

    def to_dict(self) -> dict:
        return {"shape": self.shape, "bound": self.bound, "mu": self.mu}


@dataclass(frozen=True)
class CoherentDomain:
    """Ring ``inner_sq < |z|^2 < outer_sq`` where coherent states exist."""

    inner_sq: float
    outer_sq: float

    def __post_init__(self):
        if not (0.0 <= self.inner_sq < self.outer_sq):
            raise ValueError(f"empty coherent domain ({self.inner_sq}, {self.outer_sq})")

    def contains(self, z) -> bool:
        r2 = abs(z) ** 2
        return self.inner_sq < r2 < self.outer_sq

    def to_dict(self) -> dict:
        return {"inner_sq": self.inner_sq, "outer_sq": self.outer_sq}


@dataclass
class Check:
    name: str
    status: str
    residual: float | None = None
    statement: str = ""
    necessary: bool = True

    def __post_init__(self):
        if self.status not in ("pass", "fail", "not-applicable"):
            raise ValueError(f"bad status {self.status!r}")

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "residual": self.residual,
                "statement": self.statement, "necessary": self.necessary}


@dataclass
class DiagnosticsReport:
    """Ordered list of checks plus a verdict derived from them.

    ``data`` holds auxiliary tables (sample points, constants) that do not
    count as checks.
    """

    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, status, residual=None, statement="", necessary=True) -> Check:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"check {name!r} recorded twice")
        if residual is not None:
            residual = float(residual)
        c = Check(name, status, residual, statement, necessary)
        self.checks.append(c)
        return c

    def extend(self, other: "DiagnosticsReport", prefix: str = "") -> None:
        for c in other.checks:
            self.add(prefix + c.name, c.status, c.residual, c.statement, c.necessary)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(c.name == name for c in self.checks)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    @property
    def verdict(self) -> str:
        return "rejected" if any(c.necessary for c in self.failed) else "constructible"

    @property
    def reason(self) -> str | None:
        for c in self.failed:
            if c.necessary:
                return c.statement or c.name
        return None

    @property
    def all_passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason,
                "checks": [c.to_dict() for c in self.checks], "data": self.data}


@dataclass(eq=False)
class DeformedAlgebra:
    profile: MellinProfile
    mode: Mode
    mu: float
    spectrum: SpectrumDescriptor
    domain: CoherentDomain
    limits: RatioLimits
    report: DiagnosticsReport
    _logfact: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    # -- characteristic function -------------------------------------------

    def _mellin_arg(self, rho: float) -> float:
        """``x`` with ``psi(rho) = F^(x+1) / F^(x)``."""
        if self.mode is Mode.ANNIHILATION:
            return rho - self.mu
        return 1.0 - (rho - self.mu)

    def log_psi(self, rho: float) -> float:
        rho = float(rho)
        p = self.profile
        x = self._mellin_arg(rho)
        nu = p.nu
        if math.isfinite(nu) and abs(x - nu) <= INTEGER_TOL * max(1.0, abs(nu)):
            return -math.inf
        if x <= nu:
            raise DomainError(f"psi undefined at rho={rho}: beyond the spectrum edge")
        return p.log_value(x + 1.0) - p.log_value(x)

    def psi(self, rho):
        if np.ndim(rho) == 0:
            return math.exp(self.log_psi(rho))
        return np.array([math.exp(self.log_psi(r)) for r in np.ravel(rho)]).reshape(np.shape(rho))

    def psi_label(self, n):
        """``psi(n + mu)``: the value governing ``a|n>`` for label ``n``."""
        return self.psi(np.asarray(n, dtype=float) + self.mu)

    @property
    def zero(self) -> float | None:
        """Argument where psi vanishes (finite spectra edge), else None."""
        if self.spectrum.shape == "lower-bounded":
            return self.spectrum.bound + self.mu
        if self.spectrum.shape == "upper-bounded":
            return self.spectrum.bound + 1 + self.mu
        return None

    # -- generalized factorial ---------------------------------------------

    def log_psi_factorial(self, n: int) -> float:
        if n not in self.spectrum:
            raise DomainError(f"label {n} outside the spectrum")
        n = int(n)
        if n == 0:
            return 0.0
        with self._lock:
            if n in self._logfact:
                return self._logfact[n]
        step = 1 if n > 0 else -1
        # psi(n+1)! = psi(n)! psi(n+1) upward, psi(n-1)! = psi(n)! psi(n) downward
        k, acc = 0, 0.0
        with self._lock:
            known = [m for m in self._logfact if (m > 0) == (n > 0) and abs(m) <= abs(n)]
        if known:
            k = max(known, key=abs)
            acc = self._logfact[k]
        while k != n:
            acc += self.log_psi((k + 1 if step > 0 else k) + self.mu)
            k += step
            with self._lock:
                self._logfact[k] = acc
        return acc

    def psi_factorial(self, n: int) -> float:
        return math.exp(self.log_psi_factorial(n))

    def dual(self) -> "DeformedAlgebra":
        return dual_algebra(self)

    def summary(self) -> dict:
        return {
            "mode": self.mode.value,
            "mu": self.mu,
            "spectrum": self.spectrum.to_dict(),
            "domain": self.domain.to_dict(),
            "nu": self.profile.nu,
            "limits": {"at_minus_infinity": self.limits.at_minus_infinity,
                       "at_plus_infinity": self.limits.at_plus_infinity,
                       "confidence": self.limits.confidence,
                       "residual": self.limits.residual},
        }


def _is_nonpositive_integer(v: float) -> bool:
    return v <= INTEGER_TOL and abs(v - round(v)) <= INTEGER_TOL * max(1.0, abs(v))


def build_algebra(p: MellinProfile, mode="annihilation", mu: float = 0.0) -> DeformedAlgebra:
    """Construct the algebra defined by the weight behind ``p``.

    Runs the necessary conditions first: the transform must exist on an
    interval unbounded above; a finite lower edge must be a nonpositive
    integer; with no lower edge the ratio limits must be strictly
    ordered. Any failure raises :class:`ConstructionRejected` carrying
    the report.
    """
    mode = Mode.parse(mode)
    mu = float(mu)
    report = DiagnosticsReport()
    nu, nu_up = p.nu, p.nu_upper

    if math.isinf(nu) and nu > 0:
        report.add("transform-exists", "fail",
                   statement="the Mellin transform of the weight diverges for every rho")
    elif math.isfinite(nu_up) and math.isfinite(nu):
        report.add("transform-exists", "fail",
                   statement=f"the Mellin transform only exists on the bounded interval ({nu}, {nu_up}):"
                             " finite spectrum, no Bargmann representation")
    elif math.isfinite(nu_up):
        report.add("transform-exists", "fail",
                   statement=f"the Mellin transform only exists below rho={nu_up}:"
                             " psi would be singular at finite distance")
    else:
        report.add("transform-exists", "pass",
                   statement=f"Mellin transform finite on ({nu}, +inf)")

    if report.failed:
        raise ConstructionRejected(report)

    if math.isfinite(nu):
        if _is_nonpositive_integer(nu):
            report.add("abscissa-nonpositive-integer", "pass", residual=abs(nu - round(nu)),
                       statement=f"convergence abscissa nu={nu:g} is a nonpositive integer")
        else:
            report.add("abscissa-nonpositive-integer", "fail", residual=abs(nu - round(nu)),
                       statement=f"nu not a nonpositive integer: the convergence abscissa nu={nu:g}"
                                 " must be 0 or a negative integer")
            raise ConstructionRejected(report)
    else:
        report.add("abscissa-nonpositive-integer", "not-applicable",
                   statement="transform finite on the whole real axis")

    limits = p.limits
    if math.isinf(nu):
        lo, hi = limits.at_minus_infinity, limits.at_plus_infinity
        if lo < hi:
            report.add("ratio-limits-ordered", "pass", residual=hi - lo if math.isfinite(hi) else None,
                       statement=f"lim ratio at -inf = {lo:g} < lim at +inf = {hi:g}")
        else:
            why = "empty coherent domain" if lo == hi else "ratio limits in the wrong order"
            report.add("ratio-limits-ordered", "fail", residual=lo - hi,
                       statement=f"{why}: lim at -inf = {lo:g}, lim at +inf = {hi:g}")
            raise ConstructionRejected(report)
        domain = CoherentDomain(lo, hi)
        spectrum = SpectrumDescriptor("all-integers", None, mu)
    else:
        report.add("ratio-limits-ordered", "not-applicable",
                   statement="spectrum bounded: the domain is a disk")
        lam = int(round(nu))
        domain = CoherentDomain(0.0, limits.at_plus_infinity)
        if mode is Mode.ANNIHILATION:
            spectrum = SpectrumDescriptor("lower-bounded", lam, mu)
        else:
            spectrum = SpectrumDescriptor("upper-bounded", -lam, mu)

    return DeformedAlgebra(p, mode, mu, spectrum, domain, limits, report)


def psi(alg: DeformedAlgebra, rho):
    return alg.psi(rho)


def psi_factorial(alg: DeformedAlgebra, n: int) -> float:
    """``psi(n)!``: 1 at 0, ``prod_{i=1}^n psi(i)`` above, ``prod_{i=n+1}^0 psi(i)`` below."""
    return alg.psi_factorial(n)


def dual_algebra(alg: DeformedAlgebra) -> DeformedAlgebra:
    """Partner algebra with the roles of ``a`` and ``a+`` exchanged.

    Its characteristic function is ``psi(1 - rho)``. The offset changes
    sign so that this holds for any ``mu``.
    """
    mode = alg.mode.flipped
    mu = 0.0 - alg.mu  # never -0.0 in reports
    return DeformedAlgebra(alg.profile, mode, mu, alg.spectrum.reflected(mu), alg.domain,
                           alg.limits, alg.report)


def psi_grid(alg: DeformedAlgebra, points: int = 201, span: float = 1e3,
             min_step: float = 1e-2) -> np.ndarray:
    """Sample arguments for psi, geometric toward both infinities.

    Clipped to the interval where psi is positive.
    """
    z = alg.zero
    if z is None:
        half = (points - 1) // 2
        g = np.geomspace(min_step, span, half)
        return np.concatenate([alg.mu - g[::-1], [alg.mu], alg.mu + g])
    g = np.geomspace(min_step, span, points)
    if alg.mode is Mode.ANNIHILATION:
        return z + g
    return z - g[::-1]


def check_sufficient(alg: DeformedAlgebra, grid=None, limit_tol: float = 1e-4) -> DiagnosticsReport:
    """Which sufficient condition covers the weight, then the direct checks.

    The direct checks are the band condition ``alpha <= psi <= beta``,
    agreement of the coherent domain with the ring of the given space,
    and strict containment of sampled psi values between the limits.
    """
    p = alg.profile
    w = p.weight
    a, b = w.interval.alpha, w.interval.beta
    lower, upper = edge_behavior(w, "lower"), edge_behavior(w, "upper")
    nu = p.nu
    rep = DiagnosticsReport()
    direct = "not covered: consistency must be verified directly"

    ring = a > 0 and math.isfinite(b)
    disk = a == 0 and math.isfinite(b)
    if ring and lower.regular and upper.regular:
        rep.add("ring-edge-conditions", "pass", necessary=False,
                statement=f"F regular at both edges ({lower.kind.value}, {upper.kind.value})")
    else:
        why = "domain is not a ring" if not ring else f"edge behaviour ({lower.kind.value}, {upper.kind.value})"
        rep.add("ring-edge-conditions", "not-applicable", necessary=False, statement=f"{why}; {direct}")

    lim_minus = alg.limits.at_minus_infinity
    if disk and math.isinf(nu) and upper.regular and lim_minus == 0.0:
        rep.add("disk-whole-axis-conditions", "pass", necessary=False,
                statement="transform finite everywhere, regular upper edge, ratio -> 0 at -inf")
    else:
        rep.add("disk-whole-axis-conditions", "not-applicable", necessary=False, statement=direct)

    if disk and math.isfinite(nu) and _is_nonpositive_integer(nu) and upper.regular:
        rep.add("disk-abscissa-conditions", "pass", necessary=False,
                statement=f"abscissa nu={nu:g} admissible, upper edge {upper.kind.value}")
    else:
        why = f"upper edge {upper.kind.value}" if disk else "domain is not a disk"
        rep.add("disk-abscissa-conditions", "not-applicable", necessary=False, statement=f"{why}; {direct}")

    rhos = psi_grid(alg) if grid is None else np.asarray(grid, dtype=float)
    vals = alg.psi(rhos)

    # band condition
    scale = max(1.0, float(np.max(vals)))
    viol = max(float(np.max(a - vals)), float(np.max(vals - b)) if math.isfinite(b) else 0.0, 0.0)
    rep.add("band-condition", "pass" if viol <= 1e-12 * scale else "fail", residual=viol,
            statement=f"{a:g} <= psi(rho) <= {b:g} on {len(rhos)} points")

    # domain vs the ring of the given space
    dom = alg.domain
    tol = 1e-12 if alg.limits.confidence == "closed-form" else limit_tol
    expected_inner = a
    d_in = abs(dom.inner_sq - expected_inner)
    if math.isfinite(b):
        d_out = abs(dom.outer_sq - b) / b
    else:
        d_out = 0.0 if math.isinf(dom.outer_sq) else math.inf
    dev = max(d_in, d_out)
    rep.add("domain-matches-space", "pass" if dev <= tol else "fail", residual=dev,
            statement=f"coherent domain ({dom.inner_sq:g}, {dom.outer_sq:g}) vs space ({a:g}, {b:g})")

    # strict containment between the limits
    lo = dom.inner_sq
    hi = dom.outer_sq
    inside = bool(np.all((vals > lo) & (vals < hi)))
    gap = float(min(np.min(vals - lo), np.min(hi - vals))) if math.isfinite(hi) else float(np.min(vals - lo))
    rep.add("psi-between-limits", "pass" if inside else "fail", residual=gap,
            statement=f"{lo:g} < psi(rho) < {hi:g} at all sampled points")

    # monotonicity follows from log-convexity of the transform; reported only
    d = np.diff(vals)
    if alg.mode is Mode.CREATION:
        d = -d
    worst = float(np.min(d / np.maximum(np.abs(vals[1:]), 1e-300)))
    rep.add("psi-monotone", "pass" if worst >= -1e-10 else "fail", residual=min(worst, 0.0),
            statement="psi monotone on the grid (sanity check)", necessary=False)

    z = alg.zero
    if z is not None:
        edge_val = alg.psi(z)
        eps = 1e-7
        right = alg.psi(z + eps if alg.mode is Mode.ANNIHILATION else z - eps)
        rep.add("spectrum-edge-zero", "pass" if edge_val == 0.0 and right < 1e-6 else "fail",
                residual=right, statement=f"psi({z:g}) = {edge_val:g}, one-sided value {right:.3g}")
    else:
        rep.add("spectrum-edge-zero", "not-applicable", statement="spectrum is all of Z")
    return rep
