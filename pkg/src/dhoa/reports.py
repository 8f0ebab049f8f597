"""Run configuration, the analysis pipeline and report serialization.

A run goes weight -> Mellin profile -> algebra -> sufficient-condition
checks -> representation checks, and produces one JSON-ready dict. The
``timing`` block is the only part that varies between identical runs.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .algebra import DiagnosticsReport, Mode, build_algebra, check_sufficient, psi_grid
from .bargmann import Tolerances, truncated_basis, verify_representation
from .errors import ConstructionRejected, DomainError, NumericalFailure
from .mellin import MellinProfile
from .weightfn import TabulatedPositive, from_params

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "build_weight",
    "run_analyze",
    "exit_code",
    "to_jsonable",
    "dumps",
    "write_report",
    "write_csv_tables",
    "EXIT_OK",
    "EXIT_VERIFICATION",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
]

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_WEIGHT_KEYS = {"family", "sigma", "eta", "k", "m", "n", "alpha", "beta", "path", "x", "y"}


class ConfigError(ValueError):
    """The run configuration is malformed."""


@dataclass
class RunConfig:
    """Everything a single analysis run needs.

    ``weight`` holds ``family`` plus that family's parameters; a tabulated
    weight gives either ``x``/``y`` lists or ``path`` to a two-column CSV.
    Tolerance keys override the defaults of
    :class:`~dhoa.bargmann.Tolerances`.
    """

    weight: dict
    mode: str = "annihilation"
    mu: float = 0.0
    method: str = "auto"
    rho_grid: dict = field(default_factory=lambda: {"points": 201, "span": 1e3, "min_step": 1e-2})
    n_max: int = 64
    n_min: int | None = None
    samples: list | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    csv_dir: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.weight, dict) or "family" not in self.weight:
            raise ConfigError("weight must be an object with a 'family' key")
        unknown = set(self.weight) - _WEIGHT_KEYS
        if unknown:
            raise ConfigError(f"unknown weight keys {sorted(unknown)}")
        try:
            Mode.parse(self.mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.method not in ("auto", "closed-form", "quadrature"):
            raise ConfigError(f"method must be auto, closed-form or quadrature, not {self.method!r}")
        if not isinstance(self.n_max, int) or self.n_max < 8:
            raise ConfigError("truncation n_max must be an integer >= 8")
        if self.n_min is not None and (not isinstance(self.n_min, int) or self.n_min > 0):
            raise ConfigError("n_min must be a nonpositive integer")
        known = {f.name for f in fields(Tolerances)}
        for k, v in self.tolerances.items():
            if k not in known:
                raise ConfigError(f"unknown tolerance {k!r}")
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        g = self.rho_grid
        if set(g) - {"points", "span", "min_step"}:
            raise ConfigError("rho_grid accepts points, span and min_step")
        if int(g.get("points", 201)) < 3 or not float(g.get("span", 1e3)) > float(g.get("min_step", 1e-2)) > 0:
            raise ConfigError("rho_grid needs points >= 3 and span > min_step > 0")
        if self.samples is not None and not all(isinstance(s, (int, float)) and s >= 0 for s in self.samples):
            raise ConfigError("samples are values of |z|^2 and must be nonnegative numbers")

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config and apply flag overrides.

    Overrides use the flat flag names: weight keys (``family``,
    ``sigma``, ...) go into ``weight``; the rest are top-level fields.
    Changing ``family`` drops parameters from the file's weight.
    """
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    weight = dict(data.get("weight", {}))
    top = {k: v for k, v in data.items() if k != "weight"}
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k in _WEIGHT_KEYS:
            if k == "family" and weight.get("family") not in (None, v):
                weight = {}
            weight[k] = v
        else:
            top[k] = v
    known = {f.name for f in fields(RunConfig)}
    extra = set(top) - known
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    if not weight:
        raise ConfigError("no weight given: use a config file or --family")
    try:
        return RunConfig(weight=weight, **top)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def build_weight(params: dict):
    """Weight function from the ``weight`` block of a config."""
    params = dict(params)
    family = params.pop("family")
    try:
        if family == "tabulated" and "path" in params:
            table = np.loadtxt(params.pop("path"), delimiter=",", ndmin=2)
            if table.shape[1] != 2:
                raise ConfigError("tabulated weight file needs two columns x,y")
            return TabulatedPositive(table[:, 0], table[:, 1])
        return from_params(family, **params)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad parameters for {family}: {exc}") from None
    except (ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad weight {family}: {exc}") from None


# -- pipeline ----------------------------------------------------------------

def _prefixed(report: dict, rep: DiagnosticsReport, stage: str) -> None:
    for c in rep.checks:
        d = c.to_dict()
        d["name"] = f"{stage}/{c.name}"
        d["stage"] = stage
        report["checks"].append(d)


def _finish(report: dict) -> dict:
    failed = [c for c in report["checks"] if c["status"] == "fail"]
    necessary = [c for c in failed if c["necessary"]]
    if report.get("verdict") != "rejected":
        report["verdict"] = "rejected" if necessary else "constructible"
        report["reason"] = necessary[0]["statement"] if necessary else None
    report["all_checks_pass"] = not failed
    return report


def run_analyze(config: RunConfig) -> dict:
    """Execute the full pipeline for one weight.

    Returns the report dict. Rejection and verification failures are
    recorded in it. :class:`NumericalFailure` is caught and the partial
    report returned with ``status = "numerical-failure"``.
    """
    t0 = time.perf_counter()
    timing: dict = {}
    report: dict = {"config": config.to_dict(), "checks": [], "tables": {}, "status": "running"}
    w = build_weight(config.weight)
    report["weight"] = w.describe()
    try:
        p = MellinProfile(w, method=config.method)
        report["mellin"] = {"method": p.method, "nu": p.nu, "nu_upper": p.nu_upper}
        try:
            alg = build_algebra(p, config.mode, config.mu)
        except ConstructionRejected as exc:
            _prefixed(report, exc.report, "build")
            report["verdict"] = "rejected"
            report["reason"] = exc.reason
            report["status"] = "rejected"
            return _finish(report)
        finally:
            timing["build_s"] = time.perf_counter() - t0
        _prefixed(report, alg.report, "build")
        report["mellin"]["normalization"] = p.normalization
        report.update(alg.summary())

        g = config.rho_grid
        t1 = time.perf_counter()
        grid = psi_grid(alg, int(g.get("points", 201)), float(g.get("span", 1e3)), float(g.get("min_step", 1e-2)))
        vals = alg.psi(grid)
        report["tables"]["psi_samples"] = [{"rho": float(r), "psi": float(v)} for r, v in zip(grid, vals)]
        _prefixed(report, check_sufficient(alg, grid), "sufficient")
        timing["sufficient_s"] = time.perf_counter() - t1

        t2 = time.perf_counter()
        tol = Tolerances(**config.tolerances)
        basis = truncated_basis(alg, config.n_max, config.n_min)
        rep = verify_representation(alg, basis, tol, seed=config.seed, samples=config.samples)
        _prefixed(report, rep, "representation")
        report["normalization_constant"] = rep.data.pop("normalization_constant")
        report["tables"].update(rep.data)
        timing["representation_s"] = time.perf_counter() - t2
        _finish(report)
        report["status"] = "ok" if report["all_checks_pass"] else "verification-failed"
    except (NumericalFailure, DomainError) as exc:
        report["status"] = "numerical-failure"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NumericalFailure):
            report["error"].update({"estimate": exc.estimate, "error": exc.error})
        _finish(report)
    finally:
        timing["total_s"] = time.perf_counter() - t0
        report["timing"] = timing
    return report


def exit_code(report: dict) -> int:
    status = report.get("status")
    if status == "numerical-failure":
        return EXIT_NUMERICAL
    if status == "ok" and report.get("verdict") == "constructible":
        return EXIT_OK
    return EXIT_VERIFICATION


# -- serialization -----------------------------------------------------------

def to_jsonable(obj):
    """Plain JSON types; non-finite floats become ``"inf"``, ``"-inf"``, ``"nan"``.

    Finite floats keep ``repr`` precision, which round-trips exactly.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, Mode):
        return obj.value
    return obj


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False)


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report) + "\n")
    return path


def write_csv_tables(report: dict, directory) -> list:
    """``psi_samples.csv`` and ``checks.csv`` for plotting elsewhere."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    rows = report.get("tables", {}).get("psi_samples")
    if rows:
        path = d / "psi_samples.csv"
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["rho", "psi"])
            for r in rows:
                wr.writerow([repr(r["rho"]), repr(r["psi"])])
        written.append(path)
    path = d / "checks.csv"
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["name", "status", "residual", "necessary"])
        for c in report["checks"]:
            wr.writerow([c["name"], c["status"], "" if c["residual"] is None else repr(c["residual"]),
                         c["necessary"]])
    written.append(path)
    return written
