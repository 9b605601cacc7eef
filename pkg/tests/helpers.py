"""Instance generators shared by the property and acceptance suites."""

import numpy as np

from pvop.poly import Polynomial, VectorObjective, random_polynomial
from pvop.sets import PolyhedralCone


def linear(u) -> Polynomial:
    return Polynomial(2, {(1, 0): float(u[0]), (0, 1): float(u[1])})


def random_cone(rng) -> tuple[PolyhedralCone, str]:
    """A pointed cone in R^2: the origin, a single ray, or an arc narrower than pi."""
    kind = rng.choice(["zero", "ray", "arc", "arc"])
    a = rng.uniform(0, 2 * np.pi)
    r = np.array([np.cos(a), np.sin(a)])
    perp = np.array([-r[1], r[0]])
    if kind == "zero":
        # three outward normals that positively span the plane
        angles = a + np.array([0.0, 2.1, 4.2]) + rng.uniform(-0.3, 0.3, size=3)
        A = np.column_stack([np.cos(angles), np.sin(angles)])
    elif kind == "ray":
        A = np.vstack([perp, -perp, -r])
    else:
        w = rng.uniform(0.2, 2.8)
        b = a + w
        e1, e2 = r, np.array([np.cos(b), np.sin(b)])
        # arc from angle a to a + w: x . n1 <= 0 and x . n2 <= 0
        n1 = np.array([e1[1], -e1[0]])
        n2 = np.array([-e2[1], e2[0]])
        A = np.vstack([n1, n2])
    return PolyhedralCone(A), str(kind)


def nonpositive_forms(C: PolyhedralCone, rng, q: int = 2, max_degree: int = 3) -> VectorObjective:
    """Homogeneous forms with F <= 0 on C, built from factors nonnegative on C.

    A factor is u.x with u = -A^T w, w >= 0, so u.x = -w.(Ax) >= 0 on C, or
    a square (v.x)^2.  A sparse w makes the factor vanish on an edge of C.
    """
    comps = []
    for _ in range(q):
        d = int(rng.integers(1, max_degree + 1))
        p = Polynomial(2, {(0, 0): -float(rng.uniform(0.5, 2.0))})
        k = 0
        while k < d:
            if d - k >= 2 and rng.random() < 0.3:
                v = rng.normal(size=2)
                p = p * linear(v) ** 2
                k += 2
            else:
                u = np.zeros(2)
                while np.linalg.norm(u) < 1e-3:
                    w = rng.uniform(0, 1, size=len(C.A))
                    w[rng.random(len(w)) < 0.4] = 0.0
                    u = -C.A.T @ w
                p = p * linear(u)
                k += 1
        comps.append(p)
    return VectorObjective(comps)


def random_forms(rng, q: int = 2, max_degree: int = 3) -> VectorObjective:
    comps = []
    for _ in range(q):
        d = int(rng.integers(1, max_degree + 1))
        comps.append(random_polynomial(2, d, seed=int(rng.integers(2 ** 31)), homogeneous=True))
    return VectorObjective(comps)


def equivalence_instance(seed: int):
    """Random (F, C) with C pointed and F <= 0 verified on the cone's samples."""
    rng = np.random.default_rng(seed)
    C, kind = random_cone(rng)
    F = random_forms(rng) if kind == "zero" else nonpositive_forms(C, rng)
    return F, C, kind
