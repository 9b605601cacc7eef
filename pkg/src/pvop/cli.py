"""Command line front end: ``pvop {analyze,solve,verify,perturb,generic,demo}``.

Every command writes one JSON report ``{schema_version, problem_echo,
command, effective_config, result}`` (to ``--out`` or stdout) and a short
human-readable summary to stderr.  Exit codes: 0 success, 2 inconclusive,
1 error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import catalog_spec
from .config import DEFAULT, Numerics
from .experiments import genericity_sample, nonexistence_demo, stability_probe, weak_nonopen_demo
from .problem import ProblemSpec, load_problem
from .regularity import relative_regularity_report
from .sets import PolyhedralCone, S_CHOICE_NAMES
from .solver import PARETO_FOUND, UNKNOWN, existence_pipeline, verify_pareto

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
COMMANDS = ("analyze", "solve", "verify", "perturb", "generic", "demo")


# -- report serialization ---------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def dumps_report(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{_json_str(str(k))}: {dumps_report(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps_report(v, indent, _level + 1) for v in obj) + "]"
        items = [inner + dumps_report(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, np.ndarray):
        return dumps_report(obj.tolist(), indent, _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return _json_str(str(obj))


def _json_str(s: str) -> str:
    return json.dumps(s)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_report(command: str, spec: ProblemSpec | None, options: dict, result: dict,
                 numerics: Numerics = DEFAULT) -> dict:
    cfg = (spec.numerics if spec is not None else numerics).to_dict()
    return {"schema_version": SCHEMA_VERSION,
            "problem_echo": None if spec is None else spec.to_dict(),
            "command": command,
            "effective_config": {"numerics": cfg, "options": options, "version": __version__},
            "result": result}


# -- commands ------------------------------------------------------------------------

def _csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _numeric_overrides(args) -> dict:
    num = {}
    if args.seed is not None:
        num["seed"] = args.seed
    if args.grid is not None:
        num["box_grid"] = args.grid
        num["oracle_grid"] = args.grid
    if args.tol is not None:
        num["tau_rel"] = args.tol
    return num


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _apply_overrides(spec: ProblemSpec, args) -> ProblemSpec:
    num = _numeric_overrides(args)
    changes = {}
    if num:
        changes["numerics"] = dict(spec.numerics.to_dict(), **num)
    if args.s_choice is not None:
        changes["s_choice"] = args.s_choice
    if args.lam is not None:
        changes["lambda"] = args.lam
    return spec.with_changes(**changes) if changes else spec


def run(command: str, spec: ProblemSpec | None, out_path=None, numerics: Numerics | None = None,
        **opts) -> int:
    """Execute one command and write its report; returns the exit code.

    ``numerics`` configures commands that take no problem file (``generic``
    and the demos); otherwise the problem's own settings are used.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    cfg = spec.numerics if spec is not None else (numerics or DEFAULT)
    result, code, summary = _dispatch(command, spec, cfg, opts)
    options = {k: v for k, v in opts.items() if v is not None}
    report = build_report(command, spec, options, result, cfg)
    text = dumps_report(report) + "\n"
    if out_path:
        write_atomic(out_path, text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(summary + "\n")
    return code


def _need(spec, command):
    if spec is None:
        raise ValueError(f"command {command!r} needs a problem file")
    return spec


def _dispatch(command: str, spec: ProblemSpec | None, cfg: Numerics, opts: dict):
    if command == "analyze":
        spec = _need(spec, command)
        p = spec.problem
        lams = [spec.weights()] if opts.get("lambda_only") else None
        rep = relative_regularity_report(p.f, p.K, spec.s_choice_obj, lams, spec.numerics)
        v = rep.verdicts()
        summary = (f"analyze [{spec.s_choice}]: zero-regular={v['relatively_zero_regular']} "
                   f"weakly={v['relatively_weakly_regular']} strongly={v['relatively_strongly_regular']}")
        return rep.to_dict(), EXIT_OK, summary
    if command == "solve":
        spec = _need(spec, command)
        rep, res = existence_pipeline(spec.problem, spec.s_choice_obj, None, spec.numerics,
                                      solve_lambda=spec.weights())
        code = EXIT_OK if res.status == PARETO_FOUND else EXIT_INCONCLUSIVE
        tail = f" x* = {np.round(res.x_star, 6).tolist()}" if res.x_star is not None else f" ({res.reason})"
        return {"regularity": rep.to_dict(), "solve": res.to_dict()}, code, f"solve: {res.status}{tail}"
    if command == "verify":
        spec = _need(spec, command)
        cand = opts.get("candidate")
        if cand is None:
            raise ValueError("verify needs --candidate")
        box = opts.get("box")
        if box is not None:
            n = spec.n
            if len(box) != 2 * n:
                raise ValueError(f"--box needs {2 * n} numbers (lower corner then upper corner)")
            box = (box[:n], box[n:])
        v = verify_pareto(np.array(cand), spec.problem.K, spec.problem.f, box, opts.get("density"),
                          spec.numerics)
        code = EXIT_INCONCLUSIVE if v.kind == UNKNOWN else EXIT_OK
        return v.to_dict(), code, f"verify: {v.kind}"
    if command == "perturb":
        spec = _need(spec, command)
        eps = opts.get("eps") or [1e-3]
        rec = stability_probe(spec.problem, spec.s_choice_obj, spec.weights(), eps,
                              opts.get("trials") or 100, spec.numerics.seed, spec.numerics)
        return rec.to_dict(), EXIT_OK, f"perturb: base {rec.base_tag}, flips {rec.flips}"
    if command == "generic":
        n = opts.get("n") or 2
        degrees = opts.get("degrees") or [2]
        cone = _named_cone(opts.get("cone") or "nonpositive", n, cfg)
        rep = genericity_sample(n, degrees, cone, opts.get("samples") or 200,
                                cfg.seed, cfg)
        out = rep.to_dict()
        out["cone"] = cone.describe()
        return out, EXIT_OK, f"generic: fraction regular {rep.fraction:.3f} ({out['interpretation']})"
    if command == "demo":
        name = opts.get("name")
        if name == "weak_nonopen":
            d = weak_nonopen_demo(cfg.seed, cfg=cfg)
            ok = d["base_weakly_regular"] and not any(d["perturbed_weakly_regular_on_K"])
            return d, EXIT_OK, f"demo weak_nonopen: base weakly regular, perturbations not: {ok}"
        if name == "nonexistence":
            problem = (spec or catalog_spec("escaping_quartic_pair")).problem
            d = nonexistence_demo(problem, grid=opts.get("density") or 401, cfg=cfg)
            return d, EXIT_OK, f"demo nonexistence: dominated fraction {d['dominated_fraction']:.3f}"
        raise ValueError("demo name must be 'weak_nonopen' or 'nonexistence'")
    raise ValueError(f"unknown command {command!r}")


def _named_cone(name: str, n: int, cfg: Numerics = DEFAULT) -> PolyhedralCone:
    if name == "nonpositive":
        return PolyhedralCone(np.eye(n), cfg)
    if name == "nonnegative":
        return PolyhedralCone(-np.eye(n), cfg)
    if name == "zero":
        return PolyhedralCone.zero(n, cfg)
    if name == "whole":
        return PolyhedralCone.whole(n, cfg)
    raise ValueError("cone must be one of nonpositive, nonnegative, zero, whole")


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed (sampling and experiments)")
    common.add_argument("--grid", type=int, help="grid points per axis for box searches and oracles")
    common.add_argument("--tol", type=float, help="relative trichotomy threshold tau_rel")
    common.add_argument("--s-choice", dest="s_choice", choices=S_CHOICE_NAMES, help="set S")
    common.add_argument("--lambda", dest="lam", type=_csv_floats, help="weights a,b,...")
    common.add_argument("--out", help="report path (default: stdout)")

    ap = argparse.ArgumentParser(prog="pvop", description="Regularity and existence analysis for "
                                 "polynomial vector optimization problems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="regularity report")
    a.add_argument("problem")
    a.add_argument("--lambda-only", action="store_true", help="classify only the given weights")
    s = sub.add_parser("solve", parents=[common], help="existence pipeline")
    s.add_argument("problem")
    v = sub.add_parser("verify", parents=[common], help="brute-force Pareto check")
    v.add_argument("problem")
    v.add_argument("--candidate", type=_csv_floats, required=True)
    v.add_argument("--box", type=_csv_floats, help="lower corner then upper corner")
    v.add_argument("--density", type=int, help="oracle grid points per axis")
    p = sub.add_parser("perturb", parents=[common], help="perturbation stability probe")
    p.add_argument("problem")
    p.add_argument("--eps", type=_csv_floats, help="perturbation sizes (increasing)")
    p.add_argument("--trials", type=int, help="trials per size")
    g = sub.add_parser("generic", parents=[common], help="genericity sample")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--degrees", type=_csv_ints, default=[2])
    g.add_argument("--cone", default="nonpositive", help="nonpositive | nonnegative | zero | whole")
    g.add_argument("--samples", type=int, default=200)
    d = sub.add_parser("demo", parents=[common], help="named demonstrations")
    d.add_argument("name", choices=("weak_nonopen", "nonexistence"))
    d.add_argument("problem", nargs="?")
    d.add_argument("--density", type=int, help="escape grid points per axis")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = None
        if getattr(args, "problem", None):
            spec = _apply_overrides(load_problem(args.problem), args)
        opts = {}
        for key in ("candidate", "box", "density", "eps", "trials", "n", "degrees", "cone",
                    "samples", "name", "lambda_only"):
            if hasattr(args, key):
                opts[key] = getattr(args, key)
        numerics = None if spec is not None else Numerics.from_dict(_numeric_overrides(args))
        return run(args.command, spec, args.out, numerics, **opts)
    except (ValueError, OSError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
