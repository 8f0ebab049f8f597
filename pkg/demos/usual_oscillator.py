"""
The usual oscillator from the Gaussian weight
=============================================

The weight ``exp(-x)`` on the half line has Mellin transform ``Gamma(rho)``,
so the characteristic function ``psi(rho) = Gamma(rho+1)/Gamma(rho)`` is just
``rho``. Everything else follows: factorials, the kernel ``e^x`` and
coherent states on the whole plane.
"""
import math

import numpy as np

from dhoa import MellinProfile, StretchedExp, build_algebra, kernel, truncated_basis
from dhoa.bargmann import eigen_residual

# Build from a numerically integrated Mellin transform, not the closed form,
# to see how close the quadrature path lands.
alg = build_algebra(MellinProfile(StretchedExp(1, 1), method="quadrature"))
print(alg.spectrum, alg.domain)

for rho in (0.5, 3.0, 17.25):
    print(f"psi({rho}) = {alg.psi(rho):.15g}")

# psi(n)! reproduces n!
print([round(alg.psi_factorial(n)) for n in range(8)])

# The reproducing kernel G(x) = F^(1) sum x^n / F^(n+1) is the exponential.
for x in (0.5, 1.0, 2.0):
    print(f"G({x}) = {kernel(alg, x).real:.15g}   e^x = {math.exp(x):.15g}")

# A coherent state truncated to n <= 64 is an eigenvector of a up to the
# first dropped coefficient.
basis = truncated_basis(alg, 64)
for z in (0.5, 1.5 * np.exp(0.7j), 4.0):
    absolute, relative = eigen_residual(alg, z, basis)
    print(f"|z|={abs(z):.2f}: relative residual {relative:.2e}")
