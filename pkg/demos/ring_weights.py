"""
Powers of x on a ring
=====================

``x**sigma`` on ``(1, 4)`` gives a spectrum covering all integers and coherent
states on the ring ``1 < |z|^2 < 4``. The ratio ``psi`` climbs from 1 to 4,
and the limits can be recovered by extrapolation alone.
"""
import math

import numpy as np

from dhoa import MellinProfile, Power, build_algebra, ratio_limits, truncated_basis
from dhoa.algebra import check_sufficient
from dhoa.bargmann import eigen_residual

w = Power(0.0, 1.0, 4.0)
alg = build_algebra(MellinProfile(w))
print(alg.spectrum, alg.domain)

rho = np.linspace(-10, 10, 9)
print(np.round(alg.psi(rho), 6))

# Extrapolate psi at R, 2R, 4R, ... with the epsilon algorithm instead of
# reading the interval edges off the weight.
lim = ratio_limits(MellinProfile(w), force_extrapolation=True)
print("extrapolated:", lim.samples["minus"]["estimate"], lim.samples["plus"]["estimate"])

# Edge conditions, the band 1 <= psi <= 4 and agreement of the domain with the ring.
for c in check_sufficient(alg).checks:
    print(f"{c.status:>15}  {c.name}")

# Inside the ring the truncated coherent state converges; outside it
# the residual grows as the window widens.
z_in = 1.5 * np.exp(0.3j)
z_out = math.sqrt(5.0)
for n in (16, 32, 64, 128):
    b = truncated_basis(alg, n)
    r_in = eigen_residual(alg, z_in, b)[1]
    r_out = eigen_residual(alg, z_out, b, check_domain=False)[0]
    print(f"n_max={n:>3}  inside {r_in:.2e}  outside {r_out:.2e}")
