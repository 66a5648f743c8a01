"""Numerical checks of the smoothing inequalities on random polynomials."""
from collections import Counter

from linfjunta.inequalities import (RandomPolySpec, random_trigpoly, run_suite,
                                    verify_hypercontractivity, verify_smoothed_junta)

f = random_trigpoly(RandomPolySpec(dim=3, degree=2, scale=1.0, seed=1))
for t in (0.1, 0.5, 1.0):
    r = verify_hypercontractivity(f, t)
    print(f"hypercontractivity t={t}: {r.lhs:.5f} <= {r.rhs:.5f}  passed={r.passed}")
r = verify_smoothed_junta(f, 0.1, 0.1)
print("smoothed junta:", round(r.lhs, 5), "<=", round(r.rhs, 5), "S =", r.extras["S"])

suite = {"instances": 10, "dims": [1, 3], "degrees": [1, 2]}
tally = Counter((rep.name, rep.passed) for rep in run_suite(suite, seed=0))
for (name, ok), n in sorted(tally.items()):
    print(f"{name:20} passed={ok}  x{n}")
