import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import minimize

from pvop.catalog import catalog_spec
from pvop.cli import dumps_report
from pvop.config import DEFAULT
from pvop.expr import parse_polynomial
from pvop.poly import VectorObjective, weighted_sum
from pvop.problem import Problem
from pvop.sets import FeasibleSet, InfeasiblePointError, WholeSet, sublevel_set
from pvop.solver import (DOMINATED, INCONCLUSIVE, PARETO_FOUND, STRICT_PARETO, UNKNOWN,
                         WEAK_PARETO_ONLY, NoFeasibleSampleError, descent_direction_check,
                         existence_pipeline, minimize_on_compact, solve_scalarized, verify_pareto)

WEDGE = FeasibleSet.from_strings(["x2 >= x1", "x1 >= 0"], 2)
R2 = FeasibleSet.whole_space(2)


def P(text):
    return parse_polynomial(text, 2)


def F(*texts):
    return VectorObjective([P(t) for t in texts])


def wedge_oracle():
    """600 x 600 grid over [0, 3]^2 followed by constrained local refinement."""
    t = np.linspace(0, 3, 600)
    X1, X2 = np.meshgrid(t, t, indexing="ij")
    G = X1 * X2 ** 2 - X1 * X2
    G[X2 < X1] = np.inf
    i, j = np.unravel_index(np.argmin(G), G.shape)
    cons = [{"type": "ineq", "fun": lambda x: x[1] - x[0]}, {"type": "ineq", "fun": lambda x: x[0]}]
    res = minimize(lambda x: x[0] * x[1] ** 2 - x[0] * x[1], [X1[i, j], X2[i, j]],
                   constraints=cons, method="SLSQP", options={"ftol": 1e-14})
    return res.x, res.fun


# -- compact minimization ------------------------------------------------------------

def test_minimize_on_compact_sum_of_squares():
    x, v = minimize_on_compact(P("x1^2 + x2^2"), R2, 2.0)
    np.testing.assert_allclose(x, [0, 0], atol=1e-9)
    assert v == pytest.approx(0.0, abs=1e-12)


def test_minimize_on_compact_cubic_wedge_matches_oracle():
    xo, vo = wedge_oracle()
    assert vo == pytest.approx(-4 / 27, abs=1e-6)
    np.testing.assert_allclose(xo, [2 / 3, 2 / 3], atol=1e-4)
    x, v = minimize_on_compact(P("x1*x2^2 - x1*x2"), WEDGE, 3.0)
    assert v == pytest.approx(vo, abs=1e-3)
    np.testing.assert_allclose(x, xo, atol=1e-2)
    # stationarity on the active face x2 = x1: 3 x1^2 - 2 x1 = 0
    assert abs(3 * x[0] ** 2 - 2 * x[0]) < 1e-2


def test_minimize_on_compact_singleton_sublevel():
    spec = catalog_spec("mixed_cubic_exp_quadrant")
    S = sublevel_set(spec.problem.K, spec.problem.f, [0, 0])
    x, _ = minimize_on_compact(weighted_sum(spec.problem.f, [1, 1]), S, 2.0)
    np.testing.assert_allclose(x, [0, 0], atol=1e-2)


def test_minimize_on_compact_no_feasible_sample():
    K = FeasibleSet.from_strings(["x1 >= 10"], 2)
    with pytest.raises(NoFeasibleSampleError):
        minimize_on_compact(P("x1"), K, 1.0)


# -- scalarized solve ------------------------------------------------------------------

def test_solve_mixed_cubic_finds_origin():
    p = catalog_spec("mixed_cubic_exp_quadrant").problem
    res = solve_scalarized(p, [1, 1], [0, 0])
    assert res.status == PARETO_FOUND
    # the sublevel constraint x1^2 <= 0 is only enforced to the feasibility tolerance
    np.testing.assert_allclose(res.x_star, [0, 0], atol=5e-3)
    assert res.verification.kind == STRICT_PARETO


def test_solve_cubic_wedge():
    p = catalog_spec("cubic_wedge_scalar").problem
    res = solve_scalarized(p, [1.0], [0.5, 0.5])
    assert res.status == PARETO_FOUND
    np.testing.assert_allclose(res.x_star, [2 / 3, 2 / 3], atol=1e-2)
    assert res.value[0] == pytest.approx(-4 / 27, abs=1e-3)


def test_solve_coordinate_pair_escapes():
    p = Problem(F("x1", "x2"), R2, np.array([0.0, 0.0]))
    res = solve_scalarized(p, [1, 1])
    assert res.status == INCONCLUSIVE and "boundary" in res.reason
    for it in res.iterates:
        assert not it.interior and it.norm > it.k - DEFAULT.interior_margin


def test_solve_rejects_bad_inputs():
    p = Problem(F("x1", "x2"), WEDGE, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        solve_scalarized(p, [1, 0])
    with pytest.raises(InfeasiblePointError):
        solve_scalarized(p, [1, 1], [1.0, 0.0])


@pytest.mark.parametrize("name,lam", [("mixed_cubic_exp_quadrant", [1, 1]), ("cubic_wedge_scalar", [1]),
                                      ("cubic_linear_exp_halfplane", [0.5, 0.5]),
                                      ("coordinate_projection_plane", [1, 1])])
def test_iterate_invariants(name, lam):
    p = catalog_spec(name).problem
    res = solve_scalarized(p, lam)
    ks = [it.k for it in res.iterates]
    assert all(b > a for a, b in zip(ks, ks[1:]))
    vals = [it.value for it in res.iterates]
    assert all(b <= a + 1e-12 * (1 + abs(a)) for a, b in zip(vals, vals[1:]))
    for it in res.iterates:
        assert it.norm <= it.k * (1 + 1e-12)
    interior = [i for i in range(1, len(res.iterates))
                if res.iterates[i].interior and res.iterates[i - 1].interior]
    if interior:
        # monotone up to the stopping rule's own resolution
        norms = [it.norm for it in res.iterates[interior[0] - 1:]]
        assert all(b <= a + DEFAULT.stabilization_dist for a, b in zip(norms, norms[1:]))


@pytest.mark.parametrize("name", ["mixed_cubic_exp_quadrant", "cubic_wedge_scalar",
                                  "cubic_linear_exp_halfplane"])
def test_solve_is_deterministic(name):
    p = catalog_spec(name).problem
    a, b = (dumps_report(solve_scalarized(p, np.full(p.q, 1 / p.q)).to_dict()) for _ in range(2))
    assert a == b


@pytest.mark.parametrize("name", ["mixed_cubic_exp_quadrant", "cubic_wedge_scalar",
                                  "cubic_linear_exp_halfplane", "coordinate_projection_plane",
                                  "halfplane_linear_pair"])
def test_found_points_are_never_dominated(name):
    spec = catalog_spec(name)
    res = solve_scalarized(spec.problem, spec.weights())
    if res.status == PARETO_FOUND:
        v = verify_pareto(res.x_star, spec.problem.K, spec.problem.f)
        assert v.kind != DOMINATED
        assert spec.problem.K.contains(res.x_star, 1e-6)


def test_escape_never_reported_found():
    p0 = Problem(F("x1", "x2"), R2, np.array([0.0, 0.0]))
    schedule = tuple(float(2 ** j) for j in range(6))
    for seed in range(100):
        rng = np.random.default_rng(seed)
        p = replace(p0, basepoint=rng.uniform(-3, 3, size=2))
        cfg = replace(DEFAULT, seed=seed, box_grid=15, sphere_resolution_deg=3.0)
        _, res = existence_pipeline(p, WholeSet(), cfg=cfg)
        assert res.status != PARETO_FOUND
        res = solve_scalarized(p, rng.uniform(0.1, 1, size=2), ball_schedule=schedule, cfg=cfg)
        assert res.status != PARETO_FOUND


# -- verification ---------------------------------------------------------------------

def test_verify_diagonal_point_strict():
    spec = catalog_spec("diagonal_ray_antagonist")
    assert verify_pareto([1, 1], spec.problem.K, spec.problem.f).kind == STRICT_PARETO


def test_verify_dominated_witness():
    v = verify_pareto([0, 0], R2, F("x1", "x2"), ((-1, -1), (1, 1)))
    assert v.kind == DOMINATED
    np.testing.assert_allclose(v.witness, [-1, -1])


def test_verify_weak_only():
    K = FeasibleSet.from_strings(["x1 >= 0"], 2)
    v = verify_pareto([0, 5], K, F("x1", "x2"), ((0, 0), (1, 10)))
    assert v.kind == WEAK_PARETO_ONLY
    w = v.witness
    assert K.contains(w) and w[0] == 0.0 and w[1] < 5 - v.tau_dom


def test_verify_candidate_outside_box_is_unknown():
    v = verify_pareto([9, 9], WEDGE, F("x1*x2^2 - x1*x2"), ((0, 0), (1, 1)))
    assert v.kind == UNKNOWN


def test_verify_rejects_infeasible_candidate():
    with pytest.raises(InfeasiblePointError):
        verify_pareto([1, 0], WEDGE, F("x1", "x2"))


# -- descent directions ------------------------------------------------------------------

def test_descent_final_example_vertical():
    p = catalog_spec("cubic_linear_exp_halfplane").problem
    S = sublevel_set(p.K, p.f, [1, 0])
    for v in ([0, 1], [0, -1]):
        assert descent_direction_check(p.K, S, p.f, v)


def test_descent_linear_translation_signs():
    f = F("x1", "x2")
    S = sublevel_set(R2, f, [0, 0])
    up = np.array([1.0, 1.0]) / math.sqrt(2)
    assert descent_direction_check(R2, S, f, up)
    res = descent_direction_check(R2, S, f, -up)
    assert not res and res.to_dict()["label"] == "sampled evidence"


def test_descent_constant_along_diagonal():
    p = catalog_spec("diagonal_ray_antagonist").problem
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    far = FeasibleSet(2, np.vstack([p.K.A, [[-1.0, 0.0]]]), np.append(p.K.b, -2.0))
    assert descent_direction_check(p.K, far, p.f, v, extra_samples=[[3.0, 3.0]])
    # from the origin every step -t v leaves K
    assert not descent_direction_check(p.K, p.K, p.f, v)


def test_descent_requires_unit_vector():
    with pytest.raises(ValueError):
        descent_direction_check(R2, R2, F("x1", "x2"), [1, 1])


# -- pipeline --------------------------------------------------------------------------------

def test_pipeline_mixed_cubic_certified():
    spec = catalog_spec("mixed_cubic_exp_quadrant")
    report, res = existence_pipeline(spec.problem, spec.s_choice_obj, solve_lambda=spec.weights())
    assert report.any_regular
    assert res.status == PARETO_FOUND and res.notes["route"] == "certified"
    assert res.notes["certificate"].startswith("existence certified")


def test_pipeline_exp_halfplane_descent_route():
    spec = catalog_spec("cubic_linear_exp_halfplane")
    report, res = existence_pipeline(spec.problem, spec.s_choice_obj)
    assert not report.any_regular
    assert res.status == PARETO_FOUND and res.notes["route"] == "descent-direction"
    assert res.x_star[0] == pytest.approx(0.0, abs=1e-6)


def test_pipeline_quartic_inconclusive():
    spec = catalog_spec("escaping_quartic_pair")
    _, res = existence_pipeline(spec.problem, spec.s_choice_obj)
    assert res.status == INCONCLUSIVE
