"""Fixed battery of worked examples with closed-form oracles.

Five groups: log-Gaussian weights, stretched exponentials, powers on a
ring and on a disk, the beta-function weight, and a weight whose
derivatives all vanish at the outer edge. Each group compares numerical
characteristic functions against formulas written out here (independent
of the closed forms used inside :mod:`dhoa.mellin`) and then runs the
full analysis pipeline.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .algebra import build_algebra
from .errors import ConstructionRejected, NumericalFailure
from .mellin import MellinProfile, ratio_limits
from .reports import RunConfig, run_analyze
from .weightfn import EssentialEdge, LogGaussian, Power, PowerBeta, StretchedExp

__all__ = ["EXAMPLES", "run_reproduce_paper", "thread_cap",
           "psi_power_ring", "psi_power_disk", "psi_power_beta", "psi_gamma_ratio", "psi_log_gaussian"]

THREADS_ENV = "DHOA_THREADS"


def thread_cap(default: int = 1) -> int:
    """Worker count from ``DHOA_THREADS`` (at least 1)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


# -- oracles -----------------------------------------------------------------

def psi_power_ring(rho, sigma, alpha, beta):
    """``x**sigma`` on ``(alpha, beta)``, ``alpha > 0``.

    With ``s = rho + sigma`` and ``L = ln(beta/alpha)``:
    ``psi = alpha * g(s+1) / g(s)`` where ``g(s) = expm1(s L) / s``.
    """
    L = math.log(beta / alpha)

    def g(s):
        return L if s == 0 else math.expm1(s * L) / s

    s = rho + sigma
    return alpha * g(s + 1) / g(s)


def psi_power_disk(rho, sigma, beta):
    s = rho + sigma
    return s / (s + 1) * beta


def psi_power_beta(rho, sigma, eta, beta):
    s = rho + sigma
    return s / (s + eta + 1) * beta


def psi_gamma_ratio(rho, k, m):
    c = m / k
    return math.exp(math.lgamma(c * (rho + 1)) - math.lgamma(c * rho))


def psi_log_gaussian(rho, sigma):
    return math.exp((2 * rho + 1) / (4 * sigma))


# -- helpers -----------------------------------------------------------------

def _check(name, ok, residual=None, statement=""):
    return {"name": name, "status": "pass" if ok else "fail",
            "residual": None if residual is None else float(residual), "statement": statement}


def _max_rel(alg, rhos, oracle):
    worst = 0.0
    for r in rhos:
        got, want = alg.psi(float(r)), oracle(float(r))
        worst = max(worst, abs(got - want) / abs(want))
    return worst


def _analysis(weight_params, **kw):
    rep = run_analyze(RunConfig(weight=weight_params, **kw))
    ok = rep["status"] == "ok"
    check = _check(f"analysis/{weight_params['family']}:{_tag(weight_params)}", ok,
                   statement=f"full pipeline status {rep['status']}, verdict {rep.get('verdict')}")
    return check, rep


def _tag(params):
    return ",".join(f"{k}={v}" for k, v in sorted(params.items()) if k != "family")


# -- the five groups ---------------------------------------------------------

def example_log_gaussian():
    checks, analyses = [], []
    alg = build_algebra(MellinProfile(LogGaussian(1.0, 1), method="quadrature"))
    rhos = np.linspace(-8, 8, 33)
    err = _max_rel(alg, rhos, lambda r: psi_log_gaussian(r, 1.0))
    checks.append(_check("closed-form-n1", err < 1e-7, err,
                         "quadrature psi vs exp((2 rho + 1)/4), sigma = 1"))
    for n in (1, 2):
        a = build_algebra(MellinProfile(LogGaussian(1.0, n), method="quadrature"))
        sym = max(abs(a.psi(-r) * a.psi(r - 1) - 1) for r in (0.5, 1.0, 3.0, 7.0))
        checks.append(_check(f"symmetry-n{n}", sym < 1e-7, sym, "psi(-rho) psi(rho - 1) = 1"))
    lim = alg.limits
    checks.append(_check("limits", lim.at_minus_infinity == 0.0 and lim.at_plus_infinity == math.inf,
                         statement=f"ratio limits ({lim.at_minus_infinity}, {lim.at_plus_infinity})"))
    for n in (1, 2):
        c, rep = _analysis({"family": "log_gaussian", "sigma": 1.0, "n": n})
        checks.append(c)
        analyses.append(rep)
    return checks, analyses


def example_stretched_exp():
    checks, analyses = [], []
    for k, m in ((1, 2), (1, 1), (2, 1)):
        alg = build_algebra(MellinProfile(StretchedExp(k, m), method="quadrature"))
        rhos = np.geomspace(0.1, 40, 40)
        err = _max_rel(alg, rhos, lambda r: psi_gamma_ratio(r, k, m))
        tol = 1e-8 if k == m else 1e-6
        checks.append(_check(f"gamma-ratio-k{k}-m{m}", err < tol, err,
                             f"quadrature psi vs Gamma ratio, k/m = {k}/{m}"))
        # exponent of the power-law growth, fitted on a large-rho window
        p = MellinProfile(StretchedExp(k, m))
        a2 = build_algebra(p)
        r1, r2 = 1e4, 2e4
        slope = math.log(a2.psi(r2) / a2.psi(r1)) / math.log(r2 / r1)
        prefactor = a2.psi(r2) / r2 ** slope
        checks.append(_check(f"asymptote-k{k}-m{m}", abs(slope - m / k) < 1e-3, abs(slope - m / k),
                             f"fitted exponent {slope:.6f} vs m/k = {m / k:g}; fitted prefactor {prefactor:.6f}"))
        c, rep = _analysis({"family": "stretched_exp", "k": k, "m": m})
        checks.append(c)
        analyses.append(rep)
    return checks, analyses


def example_power():
    checks, analyses = [], []
    for sigma in (0.0, 2.0, -1.0):
        w = Power(sigma, 1.0, 4.0)
        p = MellinProfile(w, method="quadrature")
        alg = build_algebra(p)
        rhos = np.linspace(-20, 20, 41)
        err = _max_rel(alg, rhos, lambda r: psi_power_ring(r, sigma, 1.0, 4.0))
        checks.append(_check(f"ring-closed-form-s{sigma:g}", err < 1e-8, err,
                             "quadrature psi vs the ring formula on (1, 4)"))
        lim = ratio_limits(MellinProfile(w), force_extrapolation=True)
        dev = max(abs(lim.at_minus_infinity - 1.0), abs(lim.at_plus_infinity - 4.0))
        checks.append(_check(f"ring-limits-s{sigma:g}", dev < 1e-4, dev,
                             f"extrapolated limits ({lim.at_minus_infinity:.8f}, {lim.at_plus_infinity:.8f})"))
        c, rep = _analysis({"family": "power", "sigma": sigma, "alpha": 1.0, "beta": 4.0})
        checks.append(c)
        analyses.append(rep)

    alg = build_algebra(MellinProfile(Power(0.0, 0.0, 1.0), method="quadrature"))
    err = _max_rel(alg, np.geomspace(0.1, 40, 40), lambda r: psi_power_disk(r, 0.0, 1.0))
    checks.append(_check("disk-closed-form", err < 1e-8, err, "quadrature psi vs rho/(rho + 1)"))
    edge = alg.psi(0.0)
    checks.append(_check("disk-edge", alg.spectrum.shape == "lower-bounded" and alg.spectrum.bound == 0
                         and edge <= 1e-6, edge, f"spectrum {alg.spectrum.shape} from 0, psi(0) = {edge}"))
    try:
        build_algebra(MellinProfile(Power(1.5, 0.0, 1.0)))
        checks.append(_check("disk-rejects-fractional", False, statement="sigma = 1.5 was accepted"))
    except ConstructionRejected as exc:
        named = "abscissa-nonpositive-integer" in exc.report and \
            exc.report["abscissa-nonpositive-integer"].status == "fail"
        checks.append(_check("disk-rejects-fractional", named, statement=exc.reason))
    c, rep = _analysis({"family": "power", "sigma": 0.0, "alpha": 0.0, "beta": 1.0})
    checks.append(c)
    analyses.append(rep)
    return checks, analyses


def example_power_beta():
    checks, analyses = [], []
    for eta in (1.0, 2.5):
        alg = build_algebra(MellinProfile(PowerBeta(0.0, eta, 1.0), method="quadrature"))
        err = _max_rel(alg, np.geomspace(0.1, 40, 40), lambda r: psi_power_beta(r, 0.0, eta, 1.0))
        checks.append(_check(f"beta-closed-form-eta{eta:g}", err < 1e-6, err,
                             "quadrature psi vs rho/(rho + eta + 1)"))
        c, rep = _analysis({"family": "power_beta", "sigma": 0.0, "eta": eta, "beta": 1.0})
        checks.append(c)
        analyses.append(rep)
    return checks, analyses


def example_essential_edge():
    checks, analyses = [], []
    alg = build_algebra(MellinProfile(EssentialEdge(1.0)))
    edge, near = alg.psi(0.0), alg.psi(1e-6)
    checks.append(_check("edge-zero", edge < 1e-4 and near < 1e-4, max(edge, near),
                         f"psi(0) = {edge}, psi(1e-6) = {near:.3g}"))
    lim = alg.limits
    raw = lim.samples.get("plus", {}).get("estimate", lim.at_plus_infinity)
    dev = abs(raw - 1.0)
    checks.append(_check("upper-limit", dev < 1e-3, dev,
                         f"extrapolated limit {raw:.9f} (confidence {lim.confidence})"))
    c, rep = _analysis({"family": "essential_edge", "beta": 1.0})
    checks.append(c)
    analyses.append(rep)
    return checks, analyses


EXAMPLES = [
    ("log-gaussian", "log-Gaussian weights, spectrum Z on the whole plane", example_log_gaussian),
    ("stretched-exp", "stretched exponentials, Gamma-ratio characteristic functions", example_stretched_exp),
    ("power", "powers of x on a ring and on a disk", example_power),
    ("power-beta", "beta-function weight with integer and fractional eta", example_power_beta),
    ("essential-edge", "weight flat to all orders at the outer edge", example_essential_edge),
]


def _run_one(entry):
    ident, title, fn = entry
    t = time.perf_counter()
    try:
        checks, analyses = fn()
        status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
        error = None
    except NumericalFailure as exc:
        checks, analyses, status = [], [], "numerical-failure"
        error = str(exc)
    return {"id": ident, "title": title, "status": status, "checks": checks, "analyses": analyses,
            "error": error, "timing": {"total_s": time.perf_counter() - t}}


def run_reproduce_paper(threads: int | None = None) -> dict:
    """Run every example; independent groups may run concurrently.

    The suite result lists groups in a fixed order regardless of
    completion order.
    """
    threads = thread_cap() if threads is None else max(1, threads)
    t = time.perf_counter()
    if threads == 1:
        results = [_run_one(e) for e in EXAMPLES]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_one, EXAMPLES))
    if any(r["status"] == "numerical-failure" for r in results):
        status = "numerical-failure"
    elif all(r["status"] == "pass" for r in results):
        status = "pass"
    else:
        status = "fail"
    return {"status": status, "examples": results, "timing": {"total_s": time.perf_counter() - t}}
