"""Transfer-matrix spectrum from the discrete quadratic system and separate-state eigenvectors."""
import numpy as np

from sov6v import ModelParams, brute_spectrum, eigenstate_from_values, scalar_product_det
from sov6v.sovbasis import SovFrame
from sov6v.spectrum import collinearity, solve_discrete_system, verify_discrete_system

p = ModelParams.seeded(3, x=0, y=0, seed=7)
frame = SovFrame(p)
spec = brute_spectrum(p, frame.rep)
newton = solve_discrete_system(p, seed=1)
print(f"N={p.N}: {len(spec)} eigenvalues by diagonalisation, {len(newton)} by Newton")
for i, m in enumerate(spec):
    right = eigenstate_from_values(m.t, "right", p, frame)
    left = eigenstate_from_values(m.t, "left", p, frame)
    norm = frame.c_tilde * scalar_product_det(m.t, m.t, p)
    print(f"  #{i}  t(xi_1)={m.t.vals[0]:.5f}  system {verify_discrete_system(m.t, p):.1e}"
          f"  eigvec {collinearity(right, m.right):.1e}  <t|t> det/direct {abs(norm / (left @ right)):.12f}")
