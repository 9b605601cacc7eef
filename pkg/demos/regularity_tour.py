# Recession analysis on the bundled problems.
#
# For each problem we compute the cone S_inf that the chosen set S sees at
# infinity, classify the leading forms on it, and print the three verdicts.

import numpy as np

from pvop.catalog import NAMES, catalog_spec
from pvop.regularity import relative_regularity_report
from pvop.sets import make_s_choice

np.set_printoptions(precision=4, suppress=True)

for name in NAMES:
    spec = catalog_spec(name)
    f, K = spec.problem.f, spec.problem.K
    print(f"== {name}: {len(f.components)} objective(s) in R^{spec.n}")
    for choice in ("whole", "sublevel", "leading-slice"):
        rep = relative_regularity_report(f, K, make_s_choice(choice, spec.basepoint))
        v = rep.verdicts()
        print(f"  {choice:14s} samples {rep.s_inf_samples:4d}  weak {rep.weak_class.tag:9s} "
              f"strict {rep.strict_class.tag:9s}  zero/weak/strong "
              f"{v['relatively_zero_regular']!s:5s} {v['relatively_weakly_regular']!s:5s} "
              f"{v['relatively_strongly_regular']!s:5s}")

# The cubic on the wedge is the clearest contrast: on the whole wedge the
# leading form x1*x2^2 vanishes along the x2 axis, so the recession problem
# is unbounded; restricting to the sublevel set at (1/2, 1/2) removes that ray.
spec = catalog_spec("cubic_wedge_scalar")
whole = relative_regularity_report(spec.problem.f, spec.problem.K, make_s_choice("whole"))
t = whole.component_trichotomy[0]
print("\ncubic wedge, whole cone:", t.tag, "witness", t.witness)
sub = relative_regularity_report(spec.problem.f, spec.problem.K, make_s_choice("sublevel", (0.5, 0.5)))
print("cubic wedge, sublevel cone: samples", sub.s_inf_samples, "regular", sub.any_regular)
