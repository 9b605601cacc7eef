# A problem whose Pareto set is empty.
#
# Both objectives keep decreasing along a path that runs off to infinity,
# so every candidate near the origin is beaten by some point further out.
# The solver notices its iterates hugging the ball boundary and gives up.

import numpy as np

from pvop.catalog import catalog_spec
from pvop.experiments import nonexistence_demo
from pvop.solver import solve_scalarized

np.set_printoptions(precision=4, suppress=True)

p = catalog_spec("escaping_quartic_pair").problem
d = nonexistence_demo(p, ((0.0, 0.0), (2.0, 2.0)), ((0.0, 0.0), (20.0, 20.0)))
print("nondominated candidates in [0,2]^2:", d["nondominated_candidates"])
print("fraction strictly dominated from [0,20]^2:", d["dominated_fraction"])
for w in d["witnesses"][:5]:
    print("  ", np.array(w["candidate"]), "beaten by", np.array(w["dominator"]))

print("\ndescent chain:")
for step in d["evidence"]["descent_curve"]:
    print("  ", np.array(step["point"]), "->", np.array(step["value"]))

res = solve_scalarized(p, [0.5, 0.5])
print("\nsolver:", res.status, "-", res.reason)
for it in res.iterates[:6]:
    print(f"  ball {it.k:7.1f}  |x| {it.norm:8.3f}  interior {it.interior}")
