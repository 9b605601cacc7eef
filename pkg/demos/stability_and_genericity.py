# How robust are the regularity verdicts?
#
# 1. Small same-degree perturbations of a regular problem keep its class.
# 2. Adding lower-degree terms never changes the leading forms.
# 3. Weak regularity can be lost under an arbitrarily small tilt.
# 4. Random quadratics on the negative quadrant are almost always regular.

import numpy as np

from pvop.catalog import catalog_spec
from pvop.experiments import (genericity_sample, lower_order_invariance_check, stability_probe,
                              weak_nonopen_demo)
from pvop.sets import PolyhedralCone

for name in ("mixed_cubic_exp_quadrant", "coordinate_projection_plane"):
    s = catalog_spec(name)
    rec = stability_probe(s.problem, s.s_choice_obj, s.weights(), (1e-3, 1e-1, 10.0), 50, seed=0)
    print(f"{name}: base {rec.base_tag}, flips per eps {rec.flips}, "
          f"largest stable eps {rec.largest_stable_eps}")
    print("  lower-order terms harmless:",
          lower_order_invariance_check(s.problem, s.s_choice_obj, trials=50, seed=1))

d = weak_nonopen_demo()
print("\nbase pair weakly regular:", d["base_weakly_regular"])
for n, ok in zip((10, 100, 1000), d["perturbed_weakly_regular_on_K"]):
    print(f"  tilt 1/{n}: weakly regular {ok}")

rep = genericity_sample(2, [2], PolyhedralCone(np.eye(2)), 200, seed=0)
print(f"\nrandom quadratics on x <= 0: {rep.regular}/{rep.total} regular ({rep.to_dict()['interpretation']})")
