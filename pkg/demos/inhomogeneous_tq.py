"""Continuation of the inhomogeneous T-Q solution from beta = 0 to beta = 0.3."""
from sov6v import ModelParams, brute_spectrum
from sov6v import tqinhom as ti
from sov6v.sovbasis import SovFrame
from sov6v.spectrum import collinearity

p = ModelParams.seeded(2, 1, 0, seed=7)
frame = SovFrame(p)
g = ti.default_gauge(p, beta=0.3)
for m in brute_spectrum(p, frame.rep):
    Q, report = ti.q_inhom_solve(m.t, 0.3, g, p)
    state = ti.eigenstate_via_inhom(Q.roots, g, None, p, frame, frame.rep)
    print(f"alpha_Q={report['alpha']:.5f}  |det C|/scale {report['branch_max']:.1e}"
          f"  residual {report['residual']:.1e}  state {collinearity(state, m.right):.1e}")
