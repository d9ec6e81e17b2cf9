"""Q-functions and Bethe roots of the homogeneous T-Q equation for N = 2."""
from sov6v import ModelParams, brute_spectrum, tq
from sov6v.sovbasis import SovFrame
from sov6v.spectrum import collinearity

for x, y in ((0, 1), (1, 0), (1, 1)):
    p = ModelParams.seeded(2, x, y, seed=7)
    frame = SovFrame(p)
    print(f"(x, y) = ({x}, {y})")
    for m in brute_spectrum(p, frame.rep):
        Q = tq.q_solve_homogeneous(m.t, p)
        beta = tq.admissible_betas(Q, p)[0]
        state = tq.eigenstate_via_dbeta(Q.roots, beta, None, p, frame, alpha=Q.alpha)
        roots = ", ".join(f"{r:.4f}" for r in Q.roots)
        print(f"  case {Q.case} k={Q.k}  roots [{roots}]  Bethe {tq.bethe_residuals(Q, p).max():.1e}"
              f"  state {collinearity(state, m.right):.1e}")
