import math

import pytest
from hypothesis import HealthCheck, settings

from dhoa.algebra import build_algebra
from dhoa.mellin import MellinProfile
from dhoa.weightfn import EssentialEdge, LogGaussian, Power, PowerBeta, StretchedExp

settings.register_profile(
    "dhoa",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("dhoa")

# One representative per built-in family plus the extra shapes the
# representation checks care about (ring, disk, infinite edge).
FAMILY_WEIGHTS = {
    "stretched_exp_1_1": StretchedExp(1, 1),
    "stretched_exp_1_2": StretchedExp(1, 2),
    "stretched_exp_2_1": StretchedExp(2, 1),
    "power_ring_0": Power(0.0, 1.0, 4.0),
    "power_ring_2": Power(2.0, 1.0, 4.0),
    "power_ring_m1": Power(-1.0, 1.0, 4.0),
    "power_disk_0": Power(0.0, 0.0, 1.0),
    "power_beta_1": PowerBeta(0.0, 1.0, 1.0),
    "power_beta_2_5": PowerBeta(0.0, 2.5, 1.0),
    "log_gaussian_1": LogGaussian(1.0, 1),
    "log_gaussian_2": LogGaussian(1.0, 2),
    "essential_edge": EssentialEdge(1.0),
}

_cache = {}


def algebra_for(name, mode="annihilation", mu=0.0):
    key = (name, mode, mu)
    if key not in _cache:
        _cache[key] = build_algebra(MellinProfile(FAMILY_WEIGHTS[name]), mode, mu)
    return _cache[key]


@pytest.fixture(params=sorted(FAMILY_WEIGHTS))
def family_name(request):
    return request.param


def rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def isclose_inf(a, b):
    return (math.isinf(a) and a == b) or math.isclose(a, b, rel_tol=1e-12)


# Lines recorded by the acceptance suite, echoed once at the end of the run.
ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
