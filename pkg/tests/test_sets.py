import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from pvop.catalog import catalog_spec
from pvop.config import UnsupportedDimensionError
from pvop.expr import parse_polynomial
from pvop.poly import VectorObjective
from pvop.search import sphere_grid
from pvop.sets import (EmptySetError, FeasibleSet, InfeasiblePointError, LeadingSlice, PolyhedralCone,
                       Sublevel, WholeSet, bounded_probe, cone_sphere_samples, contains,
                       find_feasible_point, polyhedral_asymptotic_cone, ray_in_cone, s_infinity,
                       sublevel_set)

EXP_QUADRANT = FeasibleSet.from_strings(["x1 >= 0", "x2 >= 0", "exp(x1) - x2 >= 0"], 2)
WEDGE = FeasibleSet.from_strings(["x2 >= x1", "x1 >= 0"], 2)


def F(*texts, n=2):
    return VectorObjective([parse_polynomial(t, n) for t in texts])


# -- membership ---------------------------------------------------------------

def test_contains_examples():
    assert contains(WEDGE, [1, 2], 0.0)
    assert not contains(EXP_QUADRANT, [0, 2], 0.0)
    assert contains(EXP_QUADRANT, [0, 1], 0.0)


def test_contains_dimension_mismatch():
    with pytest.raises(ValueError):
        contains(WEDGE, [1, 2, 3])


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_contains_monotone_in_tol(x1, x2, t1, t2):
    lo, hi = sorted((t1, t2))
    for K in (WEDGE, EXP_QUADRANT):
        if contains(K, [x1, x2], lo):
            assert contains(K, [x1, x2], hi)


def test_constraint_parsing_normalizes_to_leq():
    K = FeasibleSet.from_strings(["x1 + x2 <= 1", "x1 >= -1", "x2 = 0"], 2)
    assert K.contains([0.5, 0.0]) and not K.contains([0.5, 0.1]) and not K.contains([-2, 0])


# -- sublevel sets ----------------------------------------------------------------

def test_sublevel_cubic_wedge():
    f = F("x1*x2^2 - x1*x2")
    S = sublevel_set(WEDGE, f, [0.5, 0.5])
    assert S.contains([0.5, 0.5], 1e-12)
    # the added constraint is x1 x2 (x2 - 1) <= -1/8
    for x in ([0.6, 0.7], [0.3, 0.9], [0.2, 0.3], [1.0, 1.0], [0.5, 0.6]):
        expected = x[0] * x[1] * (x[1] - 1) <= -1 / 8 and x[1] >= x[0] >= 0
        assert S.contains(x) == expected


def test_sublevel_mixed_cubic_is_origin():
    spec = catalog_spec("mixed_cubic_exp_quadrant")
    S = sublevel_set(spec.problem.K, spec.problem.f, [0, 0])
    assert S.contains([0, 0])
    for x in ([1e-3, 0], [0, 1e-3], [1e-3, 1e-3], [0.5, 0.2]):
        assert not S.contains(x)
    assert bounded_probe(S).status == "bounded"


def test_sublevel_rejects_infeasible_basepoint():
    with pytest.raises(InfeasiblePointError):
        sublevel_set(WEDGE, F("x1"), [1, 0])


def test_empty_set_is_load_error():
    K = FeasibleSet.from_strings(["x1 >= 1", "x1 <= -1"], 2)
    with pytest.raises(EmptySetError):
        find_feasible_point(K)


# -- polyhedral cones ----------------------------------------------------------------

def test_polyhedral_asymptotic_cone_examples():
    C = polyhedral_asymptotic_cone(WEDGE)
    assert C == PolyhedralCone(WEDGE.A)
    slab = FeasibleSet.polyhedron([[1, 0], [-1, 0]], [5, 5])
    C = polyhedral_asymptotic_cone(slab)
    assert C.contains(np.array([[0, 1], [0, -1]])).all()
    assert not C.contains(np.array([[1, 0], [0.1, 1]])).any()
    whole = polyhedral_asymptotic_cone(FeasibleSet.whole_space(2))
    assert whole.contains(sphere_grid(2, 10.0)).all()


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_polyhedral_asymptotic_cone_idempotent(seed):
    rng = np.random.default_rng(seed)
    K = FeasibleSet.polyhedron(rng.normal(size=(3, 2)), rng.uniform(0, 1, size=3))
    C = polyhedral_asymptotic_cone(K)
    assert polyhedral_asymptotic_cone(C) == C


def test_cone_sphere_sample_counts():
    assert len(cone_sphere_samples(PolyhedralCone.zero(2), 1.0)) == 0
    assert len(cone_sphere_samples(PolyhedralCone.whole(2), 1.0)) == 360
    S = cone_sphere_samples(PolyhedralCone(WEDGE.A), 1.0)
    # oracle: integer angles theta with cos <= sin and cos >= 0
    th = np.radians(np.arange(360))
    expected = np.sum((np.cos(th) <= np.sin(th) + 1e-12) & (np.cos(th) >= -1e-12))
    assert expected == 46 and len(S) == 46


def test_dense_sampling_dimension_limit():
    with pytest.raises(UnsupportedDimensionError):
        cone_sphere_samples(PolyhedralCone.whole(5))


# -- ray test --------------------------------------------------------------------------

def test_ray_exp_quadrant_vertical_is_recession():
    # oracle: x_t = (log t, t) is feasible and x_t / t -> (0, 1)
    for t in (1e1, 1e3, 1e6):
        x = np.array([math.log(t), t])
        assert EXP_QUADRANT.contains(x, 1e-9)
        assert np.linalg.norm(x / t - [0, 1]) <= max(1e-2, math.log(t) / t)
    assert ray_in_cone(EXP_QUADRANT, [0.0, 1.0])


def test_ray_wedge_horizontal_is_not_recession():
    assert not ray_in_cone(WEDGE, [1.0, 0.0])


def test_ray_exact_containment():
    assert ray_in_cone(WEDGE, np.array([1.0, 2.0]) / math.sqrt(5))
    assert ray_in_cone(EXP_QUADRANT, [1.0, 0.0])


@pytest.mark.parametrize("name", ["cubic_wedge_scalar", "diagonal_ray_antagonist", "halfplane_linear_pair"])
def test_ray_membership_scale_invariant(name):
    spec = catalog_spec(name)
    C = s_infinity(spec.problem.K, spec.problem.f, WholeSet())
    V = sphere_grid(2, 5.0)
    rng = np.random.default_rng(0)
    W = V + 1e-12 * rng.normal(size=V.shape)
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    inside = C.contains(V)
    assert inside.any()
    np.testing.assert_array_equal(C.contains(W[inside]), True)


# -- set choices -----------------------------------------------------------------------

def test_leading_slice_mixed_cubic_is_zero():
    spec = catalog_spec("mixed_cubic_exp_quadrant")
    C = s_infinity(spec.problem.K, spec.problem.f, LeadingSlice())
    assert len(cone_sphere_samples(C)) == 0


def test_sublevel_cone_of_coordinate_pair_is_negative_quadrant():
    f = F("x1", "x2")
    C = s_infinity(FeasibleSet.whole_space(2), f, Sublevel((0.0, 0.0)))
    V = sphere_grid(2, 1.0)
    expected = np.all(V <= 1e-12, axis=1)
    np.testing.assert_array_equal(C.contains(V), expected)


def test_whole_choice_on_polyhedral_cone_is_itself():
    C = s_infinity(WEDGE, F("x1"), WholeSet())
    assert isinstance(C, PolyhedralCone) and C == PolyhedralCone(WEDGE.A)


@pytest.mark.parametrize("name", ["mixed_cubic_exp_quadrant", "cubic_wedge_scalar",
                                  "coordinate_projection_plane", "cubic_linear_exp_halfplane",
                                  "halfplane_linear_pair", "diagonal_ray_antagonist"])
def test_inclusion_chain(name):
    spec = catalog_spec(name)
    f, K = spec.problem.f, spec.problem.K
    xbar = spec.basepoint
    sub = s_infinity(K, f, Sublevel(xbar))
    lead = s_infinity(K, f, LeadingSlice())
    whole = s_infinity(K, f, WholeSet())
    V = sphere_grid(2, 2.0)
    a, b, c = sub.contains(V), lead.contains(V), whole.contains(V)
    assert not np.any(a & ~b)
    assert not np.any(b & ~c)


# -- boundedness ------------------------------------------------------------------------

def test_bounded_probe_examples():
    spec = catalog_spec("cubic_wedge_scalar")
    assert bounded_probe(sublevel_set(WEDGE, spec.problem.f, [0.5, 0.5])).status == "bounded"
    diag = catalog_spec("diagonal_ray_antagonist").problem.K
    res = bounded_probe(diag)
    assert res.status == "unbounded"
    np.testing.assert_allclose(res.direction, np.array([1, 1]) / math.sqrt(2), atol=1e-6)
    box = FeasibleSet.polyhedron(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    assert bounded_probe(box).status == "bounded"


def lp_cone_is_trivial(A):
    # oracle: {Ax <= 0} = {0} iff no coordinate can be pushed off zero inside the unit box
    n = A.shape[1]
    for j in range(n):
        for s in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -s
            res = linprog(c, A_ub=A, b_ub=np.zeros(len(A)), bounds=[(-1, 1)] * n, method="highs")
            if -res.fun > 1e-9:
                return False
    return True


@pytest.mark.parametrize("seed", range(50))
def test_bounded_probe_agrees_with_lp(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 5))
    A = rng.normal(size=(m, 2))
    b = rng.uniform(0.1, 2.0, size=m)
    res = bounded_probe(FeasibleSet.polyhedron(A, b))
    assert res.status == ("bounded" if lp_cone_is_trivial(A) else "unbounded")
