# From a regularity certificate to a verified Pareto point.
#
# The pipeline first checks relative regularity and section boundedness.
# If both hold it solves the weighted-sum problem on growing balls, then
# scans a grid for any point that dominates the answer.

import numpy as np

from pvop.catalog import catalog_spec
from pvop.solver import existence_pipeline, verify_pareto

np.set_printoptions(precision=6, suppress=True)

for name in ("mixed_cubic_exp_quadrant", "cubic_wedge_scalar", "escaping_quartic_pair"):
    spec = catalog_spec(name)
    p = spec.problem
    report, res = existence_pipeline(p, spec.s_choice_obj, solve_lambda=spec.weights())
    print(f"== {name}")
    print("  any verdict regular:", report.any_regular)
    print("  route:", res.notes.get("route"), "| status:", res.status)
    if res.notes.get("certificate"):
        print("  ", res.notes["certificate"])
    for it in res.iterates:
        print(f"    ball {it.k:7.1f}  |x| {it.norm:10.4f}  interior {it.interior}")
    if res.x_star is not None:
        print("  x* =", res.x_star, " f(x*) =", res.value)
        v = verify_pareto(res.x_star, p.K, p.f, ((0.0, 0.0), (5.0, 5.0)), grid_density=201)
        print("  grid check on [0,5]^2:", v.kind)
    else:
        print("  reason:", res.reason)
