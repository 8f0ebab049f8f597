"""Bargmann representation of a deformed oscillator algebra.

States are holomorphic functions on the coherent domain with scalar
product

    <f, g> = K * integral over D of F(|z|^2) f(z) conj(g(z)) r dr dtheta,

where ``K = 1 / (pi F^(1))`` makes the constant function a unit vector.
The number state with label ``n`` is the monomial ``c_n z**e_n``; the
exponent is ``e_n = n`` in annihilation mode and ``e_n = -n`` in creation
mode, and ``c_n**-2 = F^(e_n + 1) / F^(1)``, which the moment identity
ties to ``psi(n)!``.

In both modes the operator that lowers the exponent is
``z^-1 R(z d/dz)`` with ``R(x) = F^(x + 1) / F^(x)``. Coherent states are
its eigenvectors. The creation-mode picture is therefore the
annihilation-mode picture of the dual algebra read with reflected labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import DeformedAlgebra, DiagnosticsReport, Mode
from .errors import DomainError, NumericalFailure
from .quadrature import de_rule

__all__ = [
    "TruncatedBasis",
    "OperatorMatrix",
    "CoherentVector",
    "Tolerances",
    "truncated_basis",
    "operator_matrices",
    "differential_form",
    "multiplication_form",
    "coherent_vector",
    "eigen_residual",
    "kernel",
    "kernel_with_bound",
    "normalization_constant",
    "gram_matrix",
    "scalar_product",
    "resolution_of_identity",
    "verify_representation",
]

DEFAULT_NMAX = 64


# -- basis -------------------------------------------------------------------

def _log_R(alg: DeformedAlgebra, e: float) -> float:
    """``ln R(e) = ln F^(e+1) - ln F^(e)``; ``-inf`` at the spectrum edge."""
    p = alg.profile
    lo = p.log_value(e)
    if math.isinf(lo):
        return -math.inf
    return p.log_value(e + 1.0) - lo


@dataclass(frozen=True)
class TruncatedBasis:
    """Finite window of the number basis, ordered by increasing label.

    Attributes
    ----------
    labels : ndarray of int
        Labels ``n`` (eigenvalue of ``N`` is ``n + mu``).
    exponents : ndarray of int
        Power of ``z`` carried by each basis function.
    log_norms : ndarray
        ``ln c_n``: the basis function is ``c_n z**e_n``.
    """

    labels: np.ndarray
    exponents: np.ndarray
    log_norms: np.ndarray
    mode: Mode

    @property
    def n_min(self) -> int:
        return int(self.labels[0])

    @property
    def n_max(self) -> int:
        return int(self.labels[-1])

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def norm_table(self) -> dict:
        return {int(n): math.exp(v) for n, v in zip(self.labels, self.log_norms)}

    def index(self, n: int) -> int:
        i = int(n) - self.n_min
        if not 0 <= i < self.size:
            raise KeyError(n)
        return i

    def restrict(self, e_lo: int, e_hi: int) -> "TruncatedBasis":
        """Sub-basis of functions with exponents in ``[e_lo, e_hi]``."""
        keep = (self.exponents >= e_lo) & (self.exponents <= e_hi)
        return TruncatedBasis(self.labels[keep], self.exponents[keep], self.log_norms[keep], self.mode)


def truncated_basis(alg: DeformedAlgebra, n_max: int = DEFAULT_NMAX, n_min: int | None = None) -> TruncatedBasis:
    """Basis of monomials ``z**e`` with ``e_min <= e <= n_max``.

    The bounds are exponents of ``z``, so the same call gives the
    equivalent window in both modes. ``n_min`` defaults to ``-n_max``
    and is clipped at the spectrum edge.
    """
    if n_min is None:
        n_min = -n_max
    nu = alg.profile.nu
    if math.isfinite(nu):
        n_min = max(n_min, int(round(nu)))
    if n_max < n_min:
        raise ValueError(f"empty basis [{n_min}, {n_max}]")
    e = np.arange(n_min, n_max + 1)
    if alg.mode is Mode.ANNIHILATION:
        labels = e
    else:
        labels = -e[::-1]
        e = e[::-1]
    log_norms = np.array([_log_norm(alg, int(n)) for n in labels])
    return TruncatedBasis(labels, e, log_norms, alg.mode)


def _log_norm(alg: DeformedAlgebra, n: int) -> float:
    lf = alg.log_psi_factorial(n)
    sign = 1.0 if n >= 0 else -1.0
    if alg.mode is Mode.ANNIHILATION:
        return -0.5 * sign * lf
    return 0.5 * sign * lf


# -- operators ---------------------------------------------------------------

@dataclass
class OperatorMatrix:
    label: str
    entries: np.ndarray
    labels: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _sqrt_psi_labels(alg: DeformedAlgebra, labels) -> np.ndarray:
    return np.sqrt(alg.psi_label(np.asarray(labels, dtype=float)))


def operator_matrices(alg: DeformedAlgebra, basis: TruncatedBasis):
    """Ladder matrices ``(a, a+, N)`` on the basis.

    ``a|n> = psi(n)^(1/2)|n-1>``, ``a+|n> = psi(n+1)^(1/2)|n+1>``,
    ``N|n> = (n + mu)|n>``. Components leaving the window are dropped.
    """
    n = basis.labels
    m = basis.size
    a = np.zeros((m, m))
    ad = np.zeros((m, m))
    if m > 1:
        a[np.arange(m - 1), np.arange(1, m)] = _sqrt_psi_labels(alg, n[1:])
        ad[np.arange(1, m), np.arange(m - 1)] = _sqrt_psi_labels(alg, n[1:])
    num = np.diag(n.astype(float) + alg.mu)
    return (OperatorMatrix("a", a, n), OperatorMatrix("a+", ad, n), OperatorMatrix("N", num, n))


def differential_form(alg: DeformedAlgebra, basis: TruncatedBasis) -> OperatorMatrix:
    """``z^-1 R(z d/dz)`` on monomials, rewritten in the number basis.

    On ``z**e`` it gives ``R(e) z**(e-1)``; conjugating by the diagonal of
    basis norms turns this into a matrix in the ``|n>`` basis. This is
    ``a`` in annihilation mode and ``a+`` in creation mode.
    """
    e = basis.exponents
    ln = basis.log_norms
    m = basis.size
    T = np.zeros((m, m))
    pos = {int(x): i for i, x in enumerate(e)}
    for j, ej in enumerate(e):
        i = pos.get(int(ej) - 1)
        if i is None:
            continue
        lr = _log_R(alg, float(ej))
        T[i, j] = 0.0 if math.isinf(lr) else math.exp(lr + ln[j] - ln[i])
    name = "a" if alg.mode is Mode.ANNIHILATION else "a+"
    return OperatorMatrix(name, T, basis.labels)


def multiplication_form(alg: DeformedAlgebra, basis: TruncatedBasis) -> OperatorMatrix:
    """Multiplication by ``z`` in the number basis (``a+`` or ``a`` by mode)."""
    e = basis.exponents
    ln = basis.log_norms
    m = basis.size
    M = np.zeros((m, m))
    pos = {int(x): i for i, x in enumerate(e)}
    for j, ej in enumerate(e):
        i = pos.get(int(ej) + 1)
        if i is not None:
            M[i, j] = math.exp(ln[j] - ln[i])
    name = "a+" if alg.mode is Mode.ANNIHILATION else "a"
    return OperatorMatrix(name, M, basis.labels)


# -- coherent vectors --------------------------------------------------------

@dataclass
class CoherentVector:
    """Truncated coherent state ``sum_n c_n z**e_n |n>``.

    ``tail_bound`` bounds ``sum |c_n|^2`` over the labels outside the
    window (``inf`` when no geometric bound applies).
    """

    z: complex
    labels: np.ndarray
    coefficients: np.ndarray
    norm_sq: float
    tail_bound: float = 0.0

    @property
    def relative_tail(self) -> float:
        return self.tail_bound / self.norm_sq if self.norm_sq > 0 else math.inf


def _coherent_coefficients(basis: TruncatedBasis, zs) -> np.ndarray:
    """Coefficients for many points at once: shape ``(len(zs), size)``."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    r = np.abs(zs)
    e = basis.exponents.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = np.log(r)[:, None] * e[None, :] + basis.log_norms[None, :]
        logmag = np.where((r[:, None] == 0) & (e[None, :] == 0), basis.log_norms[None, :], logmag)
    phase = np.exp(1j * np.angle(zs)[:, None] * e[None, :])
    return np.exp(logmag) * phase


def _geometric_tail(last_sq: float, q: float) -> float:
    if last_sq == 0.0:
        return 0.0
    if not q < 1.0:
        return math.inf
    return last_sq * q / (1.0 - q)


def _tail_bounds(alg: DeformedAlgebra, basis: TruncatedBasis, r2: float, coeffs) -> float:
    e = basis.exponents
    hi_i, lo_i = int(np.argmax(e)), int(np.argmin(e))
    e_hi, e_lo = int(e[hi_i]), int(e[lo_i])
    # ratios |c_{e+1}/c_e|^2 = r2 / R(e+1) shrink above the window because R is nondecreasing
    q_up = r2 / math.exp(_log_R(alg, e_hi + 1.0)) if r2 > 0 else 0.0
    tail = _geometric_tail(abs(coeffs[hi_i]) ** 2, q_up)
    nu = alg.profile.nu
    if not (math.isfinite(nu) and e_lo <= round(nu)):
        lr = _log_R(alg, float(e_lo))
        q_dn = math.exp(lr) / r2 if r2 > 0 else math.inf
        tail += _geometric_tail(abs(coeffs[lo_i]) ** 2, q_dn)
    return tail


def coherent_vector(alg: DeformedAlgebra, z: complex, basis: TruncatedBasis,
                    check_domain: bool = True) -> CoherentVector:
    """Coherent state for eigenvalue ``z``, truncated to ``basis``.

    Raises
    ------
    DomainError
        If ``|z|^2`` lies outside the coherent domain (the series does
        not converge in norm). ``z = 0`` is accepted when no negative
        exponents are present.
    """
    z = complex(z)
    r2 = abs(z) ** 2
    if check_domain and not alg.domain.contains(z):
        if not (z == 0 and int(np.min(basis.exponents)) >= 0 and alg.domain.inner_sq == 0):
            raise DomainError(f"|z|^2 = {r2:g} outside the coherent domain "
                              f"({alg.domain.inner_sq:g}, {alg.domain.outer_sq:g})")
    c = _coherent_coefficients(basis, [z])[0]
    norm_sq = float(np.sum(np.abs(c) ** 2))
    tail = _tail_bounds(alg, basis, r2, c)
    return CoherentVector(z, basis.labels, c, norm_sq, tail)


def eigen_residual(alg: DeformedAlgebra, z: complex, basis: TruncatedBasis,
                   check_domain: bool = True):
    """``||(A - z)|z>||`` with ``A`` applied exactly, not truncated.

    ``A`` is the operator the coherent states diagonalize (``a`` or
    ``a+``). Its image of the window is kept on one extra label, so the
    residual measures only the truncation of the state.

    Returns
    -------
    absolute : float
    relative : float
        ``absolute / ||z>||``.
    """
    v = coherent_vector(alg, z, basis, check_domain=check_domain)
    e = basis.exponents
    order = np.argsort(e)
    c = v.coefficients[order]
    labels = basis.labels[order]
    if alg.mode is Mode.ANNIHILATION:
        s = _sqrt_psi_labels(alg, labels)
    else:
        s = _sqrt_psi_labels(alg, labels + 1)
    # output slots: exponents e_min - 1 ... e_max
    out = np.zeros(len(c) + 1, dtype=complex)
    out[:-1] += s * c
    out[1:] -= z * c
    absolute = float(np.linalg.norm(out))
    return absolute, absolute / math.sqrt(v.norm_sq)


# -- reproducing kernel ------------------------------------------------------

def kernel_with_bound(alg: DeformedAlgebra, x: complex, rtol: float = 1e-15,
                      max_terms: int = 20000):
    """``G(x) = F^(1) sum_n x**n / F^(n+1)`` and a bound on the omitted tail.

    Terms are generated from the spectrum edge (or both ways from 0) until
    the geometric bound on the remainder is below ``rtol * |G|``.

    Raises
    ------
    DomainError
        If ``|x|`` is outside the domain of the series.
    NumericalFailure
        If the tail bound is still above tolerance after ``max_terms``.
    """
    p = alg.profile
    x = complex(x)
    ax = abs(x)
    dom = alg.domain
    nu = p.nu
    bounded = math.isfinite(nu)
    lam = int(round(nu)) if bounded else None
    if not ax < dom.outer_sq or (not bounded and not ax > dom.inner_sq):
        raise DomainError(f"|x| = {ax:g} outside the kernel domain ({dom.inner_sq:g}, {dom.outer_sq:g})")
    lf1 = p.log_value(1.0)
    if ax == 0.0:
        if lam is not None and lam < 0:
            raise DomainError("G has a pole at 0 when the spectrum extends below 0")
        return complex(1.0), 0.0
    logx = complex(math.log(ax), math.atan2(x.imag, x.real))

    def term(n):
        return np.exp(n * logx + lf1 - p.log_value(n + 1.0))

    def sweep(start, step):
        total, n = 0j, start
        for _ in range(max_terms):
            t = term(n)
            total += t
            nxt = n + step
            if step > 0:
                q = ax / math.exp(_log_R(alg, nxt))
            else:
                q = math.exp(_log_R(alg, float(n))) / ax
            if q < 1.0:
                bound = abs(t) * q / (1.0 - q)
                if bound <= rtol * max(abs(total), 1e-300):
                    return total, bound
            n = nxt
        raise NumericalFailure(f"kernel series at x={x} did not converge in {max_terms} terms",
                               estimate=total)

    if bounded:
        val, bound = sweep(lam, 1)
    else:
        up, b1 = sweep(0, 1)
        dn, b2 = sweep(-1, -1)
        val, bound = up + dn, b1 + b2
    return complex(val), float(bound)


def kernel(alg: DeformedAlgebra, x: complex) -> complex:
    return kernel_with_bound(alg, x)[0]


# -- scalar products ---------------------------------------------------------

def normalization_constant(alg: DeformedAlgebra) -> float:
    """``K`` in front of the measure ``r dr dtheta`` so that ``<0|0> = 1``."""
    return 1.0 / (math.pi * alg.profile.value(1.0))


def _gram_moments(alg: DeformedAlgebra, basis: TruncatedBasis) -> np.ndarray:
    p = alg.profile
    lf1 = p.log_value(1.0)
    d = np.array([math.exp(2 * ln + p.log_value(float(e) + 1.0) - lf1)
                  for e, ln in zip(basis.exponents, basis.log_norms)])
    return np.diag(d).astype(complex)


def _polar_nodes(alg: DeformedAlgebra, level: int, theta_points: int):
    w = alg.profile.weight
    a, b = w.interval.alpha, w.interval.beta
    x, wx = de_rule(a, b, level)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        lf = w.log_f(x)
    good = np.isfinite(lf)
    x, wx, lf = x[good], wx[good], lf[good]
    theta = 2.0 * math.pi * np.arange(theta_points) / theta_points
    # r dr = dx / 2 ; trapezoid in theta has weight 2 pi / M
    logw = math.log(normalization_constant(alg)) + np.log(wx / 2.0 * 2.0 * math.pi / theta_points) + lf
    return x, theta, logw


def _gram_quadrature(alg: DeformedAlgebra, basis: TruncatedBasis, conj_points: bool,
                     rtol: float, min_level: int, max_level: int, theta_points: int | None):
    """Gram matrix of the basis functions by 2D quadrature.

    Radial factor by a double-exponential rule in ``x = r^2`` with the
    level doubled until the matrix stops changing; angular factor by the
    trapezoid rule, exact for the frequencies involved.
    """
    M = theta_points or max(4 * basis.size, 16)
    if M <= int(np.ptp(basis.exponents)):
        raise ValueError("too few angular points for the basis window")
    prev = None
    err = math.inf
    for level in range(min_level, max_level + 1):
        x, theta, logw = _polar_nodes(alg, level, M)
        r = np.sqrt(x)
        zs = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
        if conj_points:
            zs = np.conj(zs)
        ln = basis.log_norms[None, :]
        e = basis.exponents.astype(float)[None, :]
        half = 0.5 * np.repeat(logw, M)[:, None]
        V = np.exp(half + ln + e * np.log(np.abs(zs))[:, None]) * np.exp(1j * e * np.angle(zs)[:, None])
        G = V.T @ V.conj()
        if prev is not None:
            err = float(np.max(np.abs(G - prev)))
            if err <= rtol:
                return G, err, level
        prev = G
    return G, err, max_level


def gram_matrix(alg: DeformedAlgebra, basis: TruncatedBasis, method: str = "moments",
                rtol: float = 1e-10, min_level: int = 3, max_level: int = 9,
                theta_points: int | None = None) -> np.ndarray:
    """``G[m, n] = <phi_m, phi_n>`` for the basis functions ``phi``.

    ``method="moments"`` collapses the angular integral so only Mellin
    moments remain (diagonal by construction); ``"quadrature"`` runs the
    full 2D integral and serves as an independent check.
    """
    if method == "moments":
        return _gram_moments(alg, basis)
    if method == "quadrature":
        return _gram_quadrature(alg, basis, False, rtol, min_level, max_level, theta_points)[0]
    raise ValueError(f"unknown method {method!r}")


def scalar_product(alg: DeformedAlgebra, f, g, basis: TruncatedBasis, method: str = "moments") -> complex:
    """``<f, g>`` for coefficient vectors on ``basis`` (linear in ``f``)."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (basis.size,) or g.shape != (basis.size,):
        raise ValueError("coefficient vectors must match the basis size")
    G = gram_matrix(alg, basis, method)
    return complex(f @ G @ g.conj())


def resolution_of_identity(alg: DeformedAlgebra, basis: TruncatedBasis, rtol: float = 1e-10,
                           min_level: int = 3, max_level: int = 9):
    """``<m| K int F(|z|^2) |conj z><conj z| r dr dtheta |n>`` on ``basis``.

    Should be the identity. Returns the matrix, the last level-to-level
    change and the level reached.
    """
    return _gram_quadrature(alg, basis, True, rtol, min_level, max_level, None)


# -- verification ------------------------------------------------------------

@dataclass
class Tolerances:
    adjoint: float = 1e-8
    relations: float = 1e-10
    differential: float = 1e-12
    moments: float = 1e-8
    gram_finite: float = 1e-6
    gram_infinite: float = 1e-5
    eigen_inside: float = 1e-6
    visible_outside: float = 1e-3
    kernel_pairs: int = 20

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if v <= 0:
                raise ValueError(f"tolerance {k} must be positive")


def sample_points(alg: DeformedAlgebra, count: int = 2) -> list:
    """Moduli squared well inside the domain, spread between its edges."""
    lo, hi = alg.domain.inner_sq, alg.domain.outer_sq
    if math.isinf(hi):
        base = [0.5, 2.0, 1.0, 1.5] if lo == 0 else [max(lo, 1) * 2, max(lo, 1) * 3]
    elif lo > 0:
        mid = math.sqrt(lo * hi)
        base = [mid * 0.9, mid * 1.1, mid, mid * 0.95]
    else:
        base = [0.25 * hi, 0.4 * hi, 0.1 * hi, 0.3 * hi]
    return base[:count]


def _kernel_pair_radii(alg: DeformedAlgebra, rng: np.random.Generator, n: int) -> np.ndarray:
    lo, hi = alg.domain.inner_sq, alg.domain.outer_sq
    if math.isinf(hi):
        a, b = (0.05, 3.0) if lo == 0 else (lo * 1.5, lo * 4)
        return rng.uniform(a, b, n)
    if lo > 0:
        g = math.log(hi / lo)
        return lo * np.exp(rng.uniform(0.3 * g, 0.7 * g, n))
    return rng.uniform(0.05 * hi, 0.5 * hi, n)


def _interior(mat: np.ndarray) -> np.ndarray:
    return mat[1:-1, 1:-1]


def verify_representation(alg: DeformedAlgebra, basis: TruncatedBasis | None = None,
                          tolerances: Tolerances | None = None, seed: int = 0,
                          block: int = 8, samples=None) -> DiagnosticsReport:
    """Run the consistency checks of the representation.

    Records adjointness, the algebra relations on the window interior,
    agreement with the differential form, the moment identity, Gram
    matrices by both scalar-product paths, the resolution of identity,
    coherent-state eigen-residuals inside and outside the domain, and the
    kernel/overlap identity on random pairs.
    """
    tol = tolerances or Tolerances()
    basis = basis or truncated_basis(alg)
    rep = DiagnosticsReport()
    p = alg.profile
    K = normalization_constant(alg)
    rep.data["normalization_constant"] = K

    a, ad, num = operator_matrices(alg, basis)
    A, AD, NN = a.entries, ad.entries, num.entries
    labels = basis.labels.astype(float)

    # adjointness: ladder pair, and the Bargmann pair in the moment metric
    d_ladder = float(np.max(np.abs(A - AD.T)))
    G = _gram_moments(alg, basis)
    T = differential_form(alg, basis).entries
    Mz = multiplication_form(alg, basis).entries
    lowering, raising = (T, Mz) if alg.mode is Mode.ANNIHILATION else (Mz, T)
    d_barg = float(np.max(np.abs(lowering - np.linalg.solve(G, raising.T.conj() @ G))))
    d = max(d_ladder, d_barg)
    rep.add("adjointness", "pass" if d < tol.adjoint else "fail", residual=d,
            statement=f"a vs (a+)^H: ladder {d_ladder:.2e}, Bargmann operators {d_barg:.2e}")

    scale = max(1.0, float(np.max(np.abs(A))))
    dd = float(np.max(np.abs(T - (A if alg.mode is Mode.ANNIHILATION else AD)))) / scale
    rep.add("differential-form", "pass" if dd <= tol.differential else "fail", residual=dd,
            statement="z^-1 R(z d/dz) equals the ladder matrix entrywise")

    psiN = np.diag(alg.psi_label(labels))
    psiN1 = np.diag(alg.psi_label(labels + 1))
    # entrywise, relative to the size of the terms compared (psi grows without bound for some weights)
    scale_psi = np.maximum(1.0, np.abs(psiN))
    scale_psi1 = np.maximum(1.0, np.abs(psiN1))
    scale_comm = np.maximum(1.0, np.abs(A) * (np.abs(labels)[None, :] + np.abs(labels)[:, None] + 1.0))
    r1 = float(np.max(_interior(np.abs(AD @ A - psiN) / scale_psi), initial=0.0))
    r2 = float(np.max(_interior(np.abs(A @ AD - psiN1) / scale_psi1), initial=0.0))
    r3 = float(np.max(_interior(np.abs(A @ NN - NN @ A - A) / scale_comm), initial=0.0))
    for name, r, what in (("relation-adag-a", r1, "a+ a = psi(N)"),
                          ("relation-a-adag", r2, "a a+ = psi(N+1)"),
                          ("commutator", r3, "[a, N] = a")):
        rep.add(name, "pass" if r < tol.relations else "fail", residual=r,
                statement=f"{what} on the window interior")

    # moment identity F^(e+1)/F^(1) against psi(n)! (or its inverse)
    lf1 = p.log_value(1.0)
    errs = []
    for n, e in zip(basis.labels, basis.exponents):
        if not (-12 <= e <= 20):
            continue
        lf = alg.log_psi_factorial(int(n))
        sgn = 1.0 if n >= 0 else -1.0
        expect = sgn * lf if alg.mode is Mode.ANNIHILATION else -sgn * lf
        got = p.log_value(float(e) + 1.0) - lf1
        errs.append(abs(math.expm1(got - expect)))
    me = max(errs)
    rep.add("moment-identity", "pass" if me < tol.moments else "fail", residual=me,
            statement=f"F^(n+1)/F^(1) matches psi(n)! on {len(errs)} labels")

    gm = float(np.max(np.abs(G - np.eye(basis.size))))
    rep.add("gram-moments", "pass" if gm < tol.moments else "fail", residual=gm,
            statement="Gram matrix from Mellin moments is the identity")

    sub = basis.restrict(-block, block)
    finite = math.isfinite(p.weight.interval.beta)
    gtol = tol.gram_finite if finite else tol.gram_infinite
    Gq, qerr, lvl = _gram_quadrature(alg, sub, False, 1e-10, 3, 9, None)
    gq = float(np.max(np.abs(Gq - np.eye(sub.size))))
    rep.add("gram-quadrature", "pass" if gq < gtol else "fail", residual=gq,
            statement=f"2D quadrature Gram matrix of {sub.size} states is the identity (level {lvl})")
    R, rerr, lvl = resolution_of_identity(alg, sub)
    ri = float(np.max(np.abs(R - np.eye(sub.size))))
    rep.add("resolution-of-identity", "pass" if ri < gtol else "fail", residual=ri,
            statement=f"int F |z><z| reproduces the identity on {sub.size} states (level {lvl})")

    # eigen-residuals inside the domain
    pts = samples if samples is not None else sample_points(alg)
    inside = []
    worst = 0.0
    for k, r2v in enumerate(pts):
        z = complex(math.sqrt(r2v) * np.exp(1j * (0.3 + 1.1 * k)))
        rows = []
        for nm in (32, 64, 128):
            b = truncated_basis(alg, nm, -nm)
            rows.append(eigen_residual(alg, z, b)[1])
        b = basis
        res = eigen_residual(alg, z, b)[1]
        worst = max(worst, res)
        inside.append({"z_re": z.real, "z_im": z.imag, "abs_sq": r2v, "n_max": int(np.max(b.exponents)),
                       "residual": res, "residual_32_64_128": rows})
    rep.data["eigen_inside"] = inside
    rep.add("eigen-residual-inside", "pass" if worst < tol.eigen_inside else "fail", residual=worst,
            statement=f"||(A - z)|z>|| / |||z>|| at {len(pts)} points inside the domain")

    # outside the domain the truncated residual must not shrink
    dom = alg.domain
    if math.isfinite(dom.outer_sq):
        z = complex(math.sqrt(1.25 * dom.outer_sq))
        rows = []
        for nm in (32, 64, 128):
            b = truncated_basis(alg, nm, -nm)
            rows.append(eigen_residual(alg, z, b, check_domain=False))
        absr = [r[0] for r in rows]
        rel = [r[1] for r in rows]
        nondecr = all(y >= x for x, y in zip(absr, absr[1:]))
        visible = min(rel) > tol.visible_outside
        rate = math.log(absr[-1] / absr[0]) / (128 - 32) if absr[0] > 0 else math.inf
        rep.data["eigen_outside"] = {"abs_sq": abs(z) ** 2, "n_max": [32, 64, 128], "residual": absr,
                                     "relative_residual": rel, "growth_rate_per_index": rate}
        rep.add("eigen-residual-outside", "pass" if nondecr and visible else "fail",
                residual=min(rel),
                statement=f"|z|^2 = {abs(z) ** 2:g} outside: residual {absr[0]:.3g} -> {absr[-1]:.3g}"
                          " as n_max doubles")
    else:
        rep.add("eigen-residual-outside", "not-applicable",
                statement="domain unbounded: no outer region to probe")

    # kernel against coherent overlaps
    rng = np.random.default_rng(seed)
    n = tol.kernel_pairs
    rz = _kernel_pair_radii(alg, rng, n)
    rs = _kernel_pair_radii(alg, rng, n)
    tz = rng.uniform(0, 2 * math.pi, n)
    ts = rng.uniform(0, 2 * math.pi, n)
    worst_ratio = 0.0
    rows = []
    for i in range(n):
        z = math.sqrt(rz[i]) * complex(math.cos(tz[i]), math.sin(tz[i]))
        zeta = math.sqrt(rs[i]) * complex(math.cos(ts[i]), math.sin(ts[i]))
        vz = coherent_vector(alg, z, basis)
        vs = coherent_vector(alg, zeta, basis)
        overlap = complex(np.sum(np.conj(vs.coefficients) * vz.coefficients))
        g, gb = kernel_with_bound(alg, z * zeta.conjugate())
        bound = gb + math.sqrt(vz.tail_bound * vs.tail_bound) \
            + 1e-12 * (abs(g) + math.sqrt(vz.norm_sq * vs.norm_sq))
        diff = abs(g - overlap)
        worst_ratio = max(worst_ratio, diff / bound if bound > 0 else math.inf)
        rows.append({"z": [z.real, z.imag], "zeta": [zeta.real, zeta.imag],
                     "kernel": [g.real, g.imag], "overlap": [overlap.real, overlap.imag],
                     "difference": diff, "bound": bound})
    rep.data["kernel_pairs"] = rows
    rep.add("kernel-overlap", "pass" if worst_ratio <= 1.0 else "fail", residual=worst_ratio,
            statement=f"|G(z conj(zeta)) - <zeta|z>| within combined tail bounds on {n} pairs")
    return rep
