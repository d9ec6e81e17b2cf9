"""Theta functions, the dynamical R-matrix and the transfer matrix on a small chain."""
import numpy as np

from sov6v import ModelParams, Representation
from sov6v.elliptic import quasi_periodicity_residuals, theta1
from sov6v.repspace import dybe_residual, quantum_det_check, r_matrix

p = ModelParams.seeded(2, x=1, y=1, seed=7)
print("theta1(0.3+0.2i | i) =", theta1(0.3 + 0.2j))
z = np.linspace(-2, 2, 9) + 0.3j
for name, res in quasi_periodicity_residuals(z).items():
    print(f"  {name:<16} {res:.1e}")

print("\nR(0 | t) is theta(eta) times the permutation:")
print(np.round(r_matrix(0.0, 0.7 + 0.1j, p) / p.theta(p.eta), 12).real)
print("DYBE residual:", dybe_residual(0.3, 1.1 - 0.2j, 2.0 + 0.1j, 0.9, p))

rep = Representation(p)
T1, T2 = rep.transfer(0.4).block(0), rep.transfer(1.7 + 0.1j).block(0)
print("commutator of two transfer matrices:", np.abs(T1 @ T2 - T2 @ T1).max())
print("quantum determinant residuals (AD, DA, inversion):", quantum_det_check(0.5 + 0.1j, p, rep))
