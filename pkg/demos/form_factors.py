"""Determinant form factors of local spin and height operators against direct matrix elements."""
from collections import defaultdict

from sov6v import ModelParams
from sov6v.formfactors import ff_crosscheck_suite, inverse_problem_check

p = ModelParams.seeded(2, 0, 1, seed=7)
print("inverse problem, worst entry:",
      max(inverse_problem_check(n, i, j, p) for n in (1, 2) for i in (0, 1) for j in (0, 1)))
reports, sums = ff_crosscheck_suite(p)
worst = defaultdict(float)
for r in reports:
    worst[r.formula] = max(worst[r.formula], r.residual)
for name, res in sorted(worst.items()):
    print(f"  {name:<12} max relative residual {res:.1e}")
print("completeness (spin, height):",
      max(s["spin_sum"] for s in sums), max(s["height_sum"] for s in sums))
