"""
Creation-coherent states and the dual algebra
=============================================

The same weight supports a second construction in which coherent states
diagonalize ``a+`` instead of ``a``. It coincides with the dual algebra
``psi_dual(rho) = psi(1 - rho)``, whose spectrum is bounded above when the
original is bounded below.
"""
import numpy as np

from dhoa import MellinProfile, PowerBeta, build_algebra, dual_algebra, operator_matrices, truncated_basis

p = MellinProfile(PowerBeta(0.0, 1.0, 1.0))          # (1 - x) on the unit disk
ann = build_algebra(p)
cre = build_algebra(p, "creation")
dual = dual_algebra(ann)

print("annihilation:", ann.spectrum)
print("creation:    ", cre.spectrum)
print("dual:        ", dual.spectrum)

for rho in (-3.0, -0.5, 0.5):
    print(f"rho={rho:>5}: creation {cre.psi(rho):.12f}  dual {dual.psi(rho):.12f}  "
          f"psi(1-rho) {ann.psi(1 - rho):.12f}")

# The ladder matrices agree too.
a1, ad1, _ = operator_matrices(cre, truncated_basis(cre, 6))
a2, ad2, _ = operator_matrices(dual, truncated_basis(dual, 6))
print("max |a_creation - a_dual| =", np.max(np.abs(a1.entries - a2.entries)))

# psi and its dual meet at rho = 1/2.
print(ann.psi(0.5), dual.psi(0.5))
