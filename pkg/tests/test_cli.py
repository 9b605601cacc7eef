import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from pvop.catalog import NAMES, catalog_spec
from pvop.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, dumps_report, main, run
from pvop.poly import DegreeError
from pvop.problem import ProblemFormatError, dump_problem, load_problem, spec_from_dict
from pvop.sets import EmptySetError, InfeasiblePointError

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def write(tmp_path, d, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


# -- problem files ---------------------------------------------------------------------

def test_fixture_mixed_cubic():
    spec = load_problem(PROBLEMS / "mixed_cubic_exp_quadrant.json")
    assert (spec.problem.q, spec.n) == (2, 2)
    assert len(spec.problem.K.nonlinear) == 1
    assert spec.s_choice == "leading-slice"


@pytest.mark.parametrize("name", NAMES)
def test_fixture_files_match_catalog(name):
    assert load_problem(PROBLEMS / f"{name}.json") == catalog_spec(name)


def test_constant_objective_rejected(tmp_path):
    with pytest.raises(DegreeError):
        load_problem(write(tmp_path, {"n": 2, "objectives": ["7"]}))


def test_duplicate_exponents_rejected(tmp_path):
    terms = [{"exponents": [1, 0], "coeff": 1}, {"exponents": [1, 0], "coeff": 2}]
    with pytest.raises(ValueError, match="duplicate"):
        load_problem(write(tmp_path, {"n": 2, "objectives": [terms]}))


def test_json_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2,\n "objectives": [x1]}')
    with pytest.raises(ProblemFormatError, match="line 2"):
        load_problem(path)


def test_infeasible_basepoint(tmp_path):
    d = {"n": 2, "objectives": ["x1"], "constraints": ["x1 >= 1"], "basepoint": [0, 0]}
    with pytest.raises(InfeasiblePointError):
        load_problem(write(tmp_path, d))


def test_empty_feasible_set(tmp_path):
    d = {"n": 2, "objectives": ["x1"], "constraints": ["x1 >= 1", "x1 <= 0"]}
    with pytest.raises(EmptySetError):
        load_problem(write(tmp_path, d))


@pytest.mark.parametrize("bad", [{"n": 2}, {"n": 2, "objectives": ["x1"], "colour": 1},
                                 {"n": 2, "objectives": ["x1"], "lambda": [1, 1]},
                                 {"n": 2, "objectives": ["x1"], "s_choice": "sublevel"},
                                 {"n": 2, "objectives": ["x1"], "constraints": [{"A": [[1]], "b": [0]}]}])
def test_schema_violations(bad):
    with pytest.raises(ProblemFormatError):
        spec_from_dict(bad)


def test_polyhedron_record_and_term_list(tmp_path):
    d = {"n": 2, "objectives": [[{"exponents": [2, 0], "coeff": 1.0}], "x2"],
         "constraints": [{"A": [[-1, 0], [0, -1]], "b": [0, 0]}], "basepoint": [1, 1]}
    spec = load_problem(write(tmp_path, d))
    assert spec.problem.K.contains([0.5, 0.5]) and not spec.problem.K.contains([-0.5, 0.5])


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_catalog(tmp_path, name):
    spec = catalog_spec(name)
    dump_problem(spec, tmp_path / "a.json")
    again = load_problem(tmp_path / "a.json")
    assert again == spec
    dump_problem(again, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


@given(st.lists(st.integers(-5, 5), min_size=6, max_size=6), st.integers(0, 2 ** 31 - 1),
       st.sampled_from(["whole", "sublevel", "leading-slice"]))
@settings(max_examples=25, deadline=None)
def test_round_trip_random(coeffs, seed, choice):
    a, b, c, d, e, g = coeffs
    terms = [{"exponents": [2, 0], "coeff": a or 1}, {"exponents": [0, 1], "coeff": b}]
    terms = [t for t in terms if t["coeff"] != 0]
    spec = spec_from_dict({"n": 2, "objectives": [terms, f"{c}*x1 + {d or 1}*x2^3"],
                           "constraints": [f"x1 >= {min(e, 0)}", f"x2 <= {abs(g)} + x1^2"],
                           "basepoint": [0, 0], "s_choice": choice, "lambda": [1, 2],
                           "numerics": {"seed": seed}})
    again = spec_from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec


# -- reports ------------------------------------------------------------------------------

def test_dumps_report_seventeen_digits():
    text = dumps_report({"x": 0.1, "y": [1.0 / 3.0, 2.0], "z": None, "w": True, "n": 3})
    d = json.loads(text)
    assert "0.10000000000000001" in text and "0.33333333333333331" in text
    assert d["x"] == 0.1 and d["y"][0] == 1.0 / 3.0 and d["n"] == 3 and d["w"] is True


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_dumps_report_floats_round_trip(x):
    assert json.loads(dumps_report([x]))[0] == x


def test_dumps_report_nonfinite():
    assert json.loads(dumps_report([math.inf, -math.inf, math.nan])) == ["inf", "-inf", "nan"]


def report(tmp_path, *argv):
    out = tmp_path / "r.json"
    code = main([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_analyze_mixed_cubic(tmp_path):
    code, d = report(tmp_path, "analyze", str(PROBLEMS / "mixed_cubic_exp_quadrant.json"))
    assert code == EXIT_OK
    assert set(d) == {"schema_version", "problem_echo", "command", "effective_config", "result"}
    v = d["result"]["verdicts"]
    assert v["relatively_zero_regular"] and v["relatively_weakly_regular"] and v["relatively_strongly_regular"]
    assert d["result"]["s_infinity"]["trivial"]
    assert not list(tmp_path.glob("*.tmp"))


def test_solve_nonexistence_exits_two(tmp_path):
    code, d = report(tmp_path, "solve", str(PROBLEMS / "escaping_quartic_pair.json"))
    assert code == EXIT_INCONCLUSIVE and d["result"]["solve"]["status"] == "inconclusive"


def test_verify_diagonal_strict(tmp_path):
    code, d = report(tmp_path, "verify", str(PROBLEMS / "diagonal_ray_antagonist.json"), "--candidate", "1,1")
    assert code == EXIT_OK and d["result"]["kind"] == "strict_pareto"


def test_verify_outside_box_exits_two(tmp_path):
    code, _ = report(tmp_path, "verify", str(PROBLEMS / "cubic_wedge_scalar.json"), "--candidate", "9,9",
                     "--box", "0,0,1,1")
    assert code == EXIT_INCONCLUSIVE


def test_errors_exit_one(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "missing.json")]) == EXIT_ERROR
    bad = write(tmp_path, {"n": 2, "objectives": ["7"]})
    assert main(["analyze", str(bad)]) == EXIT_ERROR
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_run_rejects_unknown_command():
    with pytest.raises(ValueError):
        run("frobnicate", None)


def test_overrides_are_echoed(tmp_path):
    code, d = report(tmp_path, "analyze", str(PROBLEMS / "cubic_wedge_scalar.json"), "--s-choice", "whole",
                     "--tol", "1e-5", "--seed", "4", "--grid", "50")
    assert code == EXIT_OK
    assert d["problem_echo"]["s_choice"] == "whole"
    num = d["effective_config"]["numerics"]
    assert (num["tau_rel"], num["seed"], num["box_grid"], num["oracle_grid"]) == (1e-5, 4, 50, 50)


def test_report_reproducible_from_echo(tmp_path):
    code, d = report(tmp_path, "solve", str(PROBLEMS / "cubic_wedge_scalar.json"), "--grid", "80")
    assert code == EXIT_OK
    echo = write(tmp_path, d["problem_echo"], "echo.json")
    out2 = tmp_path / "r2.json"
    assert main(["solve", str(echo), "--out", str(out2)]) == EXIT_OK
    first = (tmp_path / "r.json").read_text()
    assert out2.read_text() == first


def test_generic_and_demos(tmp_path):
    code, d = report(tmp_path, "generic", "--samples", "10", "--seed", "2")
    assert code == EXIT_OK and d["result"]["experiment"] == "genericity"
    assert d["effective_config"]["numerics"]["seed"] == 2
    code, d = report(tmp_path, "demo", "weak_nonopen")
    assert code == EXIT_OK and d["result"]["base_weakly_regular"]
    code, d = report(tmp_path, "demo", "nonexistence", "--density", "101")
    assert code == EXIT_OK and d["result"]["dominated_fraction"] == 1.0


def test_perturb_command(tmp_path):
    code, d = report(tmp_path, "perturb", str(PROBLEMS / "coordinate_projection_plane.json"),
                     "--eps", "0.001,0.01", "--trials", "3")
    assert code == EXIT_OK and d["result"]["experiment"] == "stability"
    code, _ = report(tmp_path, "perturb", str(PROBLEMS / "diagonal_ray_antagonist.json"), "--trials", "2")
    assert code == EXIT_ERROR
