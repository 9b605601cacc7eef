"""Problem files: a vector objective, a feasible set and the analysis settings.

A problem file is a JSON object::

    {
      "name": "quadrant",                       # optional
      "n": 2,
      "objectives": ["x1", [{"exponents": [0, 1], "coeff": 1.0}]],
      "constraints": ["x1 >= 0", {"A": [[0, -1]], "b": [0]}],
      "basepoint": [0, 0],                      # optional
      "s_choice": "sublevel",                   # whole | sublevel | leading-slice
      "lambda": [0.5, 0.5],                     # optional
      "numerics": {"seed": 0}                   # optional overrides
    }

Objectives may be expression strings over ``x1..xn`` or term-record lists.
Constraints may be relation strings or polyhedron records ``A x <= b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .config import DEFAULT, Numerics
from .expr import parse_polynomial
from .poly import DegreeError, Polynomial, VectorObjective
from .sets import (FeasibleSet, InfeasiblePointError, S_CHOICE_NAMES, find_feasible_point,
                   make_s_choice)


class ProblemFormatError(ValueError):
    """Structurally invalid problem file."""


@dataclass(frozen=True)
class Problem:
    f: VectorObjective
    K: FeasibleSet
    basepoint: np.ndarray | None = None
    name: str = ""

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def q(self) -> int:
        return self.f.q


@dataclass(frozen=True)
class ProblemSpec:
    """Validated problem file with every default resolved."""

    n: int
    objectives: tuple
    constraints: tuple = ()
    basepoint: tuple[float, ...] | None = None
    s_choice: str = "whole"
    lam: tuple[float, ...] | None = None
    numerics: Numerics = DEFAULT
    name: str = ""
    problem: Problem = field(default=None, compare=False, repr=False)

    @property
    def s_choice_obj(self):
        return make_s_choice(self.s_choice, self.basepoint)

    def weights(self) -> np.ndarray:
        if self.lam is not None:
            return np.array(self.lam, dtype=float)
        q = len(self.objectives)
        return np.full(q, 1.0 / q)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "n": self.n,
                             "objectives": [_jsonable(o) for o in self.objectives],
                             "constraints": [_jsonable(c) for c in self.constraints],
                             "s_choice": self.s_choice}
        if self.basepoint is not None:
            d["basepoint"] = list(self.basepoint)
        if self.lam is not None:
            d["lambda"] = list(self.lam)
        d["numerics"] = self.numerics.to_dict()
        return d

    def with_changes(self, **kw) -> "ProblemSpec":
        d = self.to_dict()
        for k, v in kw.items():
            if v is not None:
                d["lambda" if k == "lam" else k] = v
        return spec_from_dict(d)


def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(o) for o in obj]
    return obj


def _freeze(obj):
    if isinstance(obj, list):
        return tuple(_freeze(o) for o in obj)
    if isinstance(obj, dict):
        return {k: _freeze(v) for k, v in obj.items()}
    return obj


def _objective(item, n: int, i: int) -> Polynomial:
    if isinstance(item, str):
        return parse_polynomial(item, n)
    if isinstance(item, (list, tuple)):
        return Polynomial.from_records([dict(r) for r in item], n)
    raise ProblemFormatError(f"objective {i + 1} must be a string or a list of term records")


def build_feasible_set(constraints, n: int) -> FeasibleSet:
    strings, rows, rhs = [], [], []
    for c in constraints:
        if isinstance(c, str):
            strings.append(c)
        elif isinstance(c, dict) and set(c) == {"A", "b"}:
            A = np.atleast_2d(np.asarray(c["A"], dtype=float))
            b = np.asarray(c["b"], dtype=float).reshape(-1)
            if A.shape != (len(b), n):
                raise ProblemFormatError(f"polyhedron record has A{A.shape}, b{b.shape} for n = {n}")
            rows.extend(A)
            rhs.extend(b)
        else:
            raise ProblemFormatError(f"constraint {c!r} is neither a string nor an {{A, b}} record")
    K = FeasibleSet.from_strings(strings, n)
    if rows:
        A = np.vstack([K.A, np.array(rows)])
        b = np.concatenate([K.b, np.array(rhs)])
        K = FeasibleSet(n, A, b, K.nonlinear, K.sources)
    return K


def spec_from_dict(d: dict) -> ProblemSpec:
    known = {"name", "n", "objectives", "constraints", "basepoint", "s_choice", "lambda", "numerics"}
    unknown = set(d) - known
    if unknown:
        raise ProblemFormatError(f"unknown problem keys: {sorted(unknown)}")
    if "n" not in d or "objectives" not in d:
        raise ProblemFormatError("problem needs 'n' and 'objectives'")
    n = int(d["n"])
    if n < 1:
        raise ProblemFormatError("dimension must be positive")
    objs = d["objectives"]
    if not isinstance(objs, list) or not objs:
        raise ProblemFormatError("objectives must be a nonempty list")
    polys = [_objective(o, n, i) for i, o in enumerate(objs)]
    for i, p in enumerate(polys):
        if p.degree < 1:
            raise DegreeError(f"objective {i + 1} ({p}) has degree < 1")
    f = VectorObjective(polys)
    constraints = d.get("constraints", [])
    if not isinstance(constraints, list):
        raise ProblemFormatError("constraints must be a list")
    K = build_feasible_set(constraints, n)
    basepoint = d.get("basepoint")
    if basepoint is not None:
        basepoint = tuple(float(v) for v in basepoint)
        if len(basepoint) != n:
            raise ProblemFormatError(f"basepoint has {len(basepoint)} entries, expected {n}")
    s_choice = d.get("s_choice", "sublevel" if basepoint is not None else "whole")
    if s_choice not in S_CHOICE_NAMES:
        raise ProblemFormatError(f"unknown s_choice {s_choice!r}")
    if s_choice == "sublevel" and basepoint is None:
        raise ProblemFormatError("s_choice 'sublevel' needs a basepoint")
    lam = d.get("lambda")
    if lam is not None:
        lam = tuple(float(v) for v in lam)
        if len(lam) != f.q:
            raise ProblemFormatError(f"lambda has {len(lam)} entries, expected {f.q}")
        if any(v < 0 for v in lam) or not any(v > 0 for v in lam):
            raise ProblemFormatError("lambda must be nonnegative and not all zero")
    numerics = Numerics.from_dict(d.get("numerics") or {})
    if basepoint is not None:
        if not K.contains(np.array(basepoint), numerics.feas_tol):
            raise InfeasiblePointError(f"basepoint {list(basepoint)} is not feasible")
    else:
        find_feasible_point(K, numerics)
    problem = Problem(f, K, None if basepoint is None else np.array(basepoint), d.get("name", ""))
    return ProblemSpec(n, _freeze(objs), _freeze(constraints), basepoint, s_choice, lam, numerics,
                       str(d.get("name", "")), problem)


def load_problem(path) -> ProblemSpec:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(d, dict):
        raise ProblemFormatError(f"{path}: top level must be an object")
    return spec_from_dict(d)


def dump_problem(spec: ProblemSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
