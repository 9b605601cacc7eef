"""Feasible sets, asymptotic cones and boundedness probes.

A :class:`FeasibleSet` is a polyhedral part ``A x <= b`` plus any number of
nonlinear constraints ``g(x) <= 0`` (polynomials or expression trees that
may contain ``exp``).  Linear constraints given as strings are folded into
the polyhedral part at load time, so a set described only by linear
inequalities is recognized as a polyhedron and gets an exact asymptotic
cone.

Cones come in three flavours:

* :class:`PolyhedralCone` -- ``{v : A v <= 0}``, exact membership.
* :class:`SampledCone` -- the asymptotic cone of a non-polyhedral set,
  decided direction by direction with :func:`ray_membership`.
* :class:`SliceCone` -- a base cone intersected with ``{F(v) <= 0}`` for a
  vector of leading forms ``F``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .config import DEFAULT, Numerics
from .expr import Expr, parse_relation, try_polynomial
from .poly import DimensionError, Polynomial, VectorObjective, coeff_norm, leading_form_vector
from .search import batch_compass, box_grid, normalize_rows, poll_directions, sphere_grid, _dedupe


class EmptySetError(ValueError):
    """No feasible point could be found."""


class InfeasiblePointError(ValueError):
    """A point that must lie in the set does not."""


Constraint = Callable[[np.ndarray], np.ndarray]


class FeasibleSet:
    """Closed set ``{x : A x <= b, g_j(x) <= 0}`` in ``R^n``.

    Parameters
    ----------
    n : int
        Ambient dimension.
    A, b : array_like, optional
        Polyhedral part; ``A`` has shape ``(m, n)``.
    nonlinear : sequence
        Callables mapping ``(N, n)`` arrays to ``(N,)`` constraint values
        (``Polynomial`` and ``Expr`` objects both qualify).
    sources : sequence of str, optional
        Human-readable description of the original constraints, echoed in
        reports.
    """

    def __init__(self, n: int, A=None, b=None, nonlinear: Sequence[Constraint] = (),
                 sources: Sequence[str] | None = None):
        self.n = int(n)
        A = np.zeros((0, self.n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
        if A.size == 0:
            A = np.zeros((0, self.n))
        b = np.zeros(0) if b is None else np.asarray(b, dtype=float).reshape(-1)
        if A.shape[1] != self.n or A.shape[0] != b.shape[0]:
            raise DimensionError(f"polyhedron data has shapes A{A.shape}, b{b.shape} for n = {self.n}")
        self.A = A
        self.b = b
        self.nonlinear = tuple(nonlinear)
        self.sources = tuple(sources) if sources is not None else None

    # -- construction -------------------------------------------------------
    @classmethod
    def polyhedron(cls, A, b) -> "FeasibleSet":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls(A.shape[1], A, b)

    @classmethod
    def whole_space(cls, n: int) -> "FeasibleSet":
        return cls(n)

    @classmethod
    def from_strings(cls, constraints: Sequence[str], n: int) -> "FeasibleSet":
        rows, rhs, nonlinear = [], [], []
        for text in constraints:
            for expr in parse_relation(text):
                if expr.max_index() >= n:
                    raise DimensionError(f"constraint {text!r} uses a variable beyond x{n}")
                _route(expr, n, rows, rhs, nonlinear, text)
        A = np.array(rows) if rows else None
        b = np.array(rhs) if rows else None
        return cls(n, A, b, nonlinear, sources=list(constraints))

    def with_constraints(self, polys: Sequence[Polynomial], labels: Sequence[str] = ()) -> "FeasibleSet":
        """Add polynomial constraints ``p(x) <= 0``; degree <= 1 ones become rows."""
        rows, rhs, nonlinear = list(self.A), list(self.b), list(self.nonlinear)
        for p in polys:
            _route_poly(p, rows, rhs, nonlinear, str(p))
        sources = None
        if self.sources is not None or labels:
            sources = list(self.sources or []) + list(labels)
        A = np.array(rows) if rows else None
        b = np.array(rhs) if rows else None
        return FeasibleSet(self.n, A, b, nonlinear, sources)

    # -- queries ------------------------------------------------------------
    @property
    def is_polyhedral(self) -> bool:
        return not self.nonlinear

    def violation(self, X) -> np.ndarray:
        """Largest constraint value at each row of ``X`` (``-inf`` if unconstrained)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n:
            raise DimensionError(f"expected points of dimension {self.n}, got {X.shape[1]}")
        out = np.full(X.shape[0], -np.inf)
        if len(self.b):
            out = np.maximum(out, (X @ self.A.T - self.b).max(axis=1))
        with np.errstate(over="ignore", invalid="ignore"):
            for g in self.nonlinear:
                v = np.asarray(g(X), dtype=float)
                v = np.where(np.isnan(v), np.inf, v)
                out = np.maximum(out, v)
        return out

    def contains(self, x, tol: float = 0.0):
        if tol < 0:
            raise ValueError("tolerance must be nonnegative")
        x = np.asarray(x, dtype=float)
        ok = self.violation(x) <= tol
        return bool(ok[0]) if x.ndim == 1 else ok

    def describe(self) -> dict:
        d = {"dimension": self.n, "A": self.A.tolist(), "b": self.b.tolist(),
             "nonlinear": [str(g) for g in self.nonlinear]}
        if self.sources is not None:
            d["sources"] = list(self.sources)
        return d

    def __repr__(self):
        return f"FeasibleSet(n={self.n}, rows={len(self.b)}, nonlinear={len(self.nonlinear)})"


def _route(expr: Expr, n: int, rows, rhs, nonlinear, label):
    poly = try_polynomial(expr, n)
    if poly is None:
        nonlinear.append(expr)
    else:
        _route_poly(poly, rows, rhs, nonlinear, label)


def _route_poly(p: Polynomial, rows, rhs, nonlinear, label):
    if p.degree <= 1:
        a = np.array([p.coefficient(tuple(int(i == j) for i in range(p.n))) for j in range(p.n)])
        c = p.coefficient((0,) * p.n)
        if not np.any(a):
            if c > 0:
                raise EmptySetError(f"constraint {label!r} reduces to {c} <= 0")
            return
        rows.append(a)
        rhs.append(-c)
    else:
        nonlinear.append(p)


def contains(K: FeasibleSet, x, tol: float = 0.0):
    return K.contains(x, tol)


def sublevel_set(K: FeasibleSet, f: VectorObjective, xbar) -> FeasibleSet:
    """``{x in K : f_i(x) <= f_i(xbar) for all i}``."""
    xbar = np.asarray(xbar, dtype=float)
    if xbar.shape != (K.n,) or f.n != K.n:
        raise DimensionError("basepoint, objective and set dimensions differ")
    if not K.contains(xbar, DEFAULT.feas_tol):
        raise InfeasiblePointError(f"basepoint {xbar.tolist()} is not in the feasible set")
    fx = f(xbar)
    polys = [p - float(c) for p, c in zip(f, fx)]
    labels = [f"f{i + 1}(x) <= {float(c)!r}" for i, c in enumerate(fx)]
    return K.with_constraints(polys, labels)


def find_feasible_point(K: FeasibleSet, cfg: Numerics = DEFAULT, hints=()) -> np.ndarray:
    """Return some point of ``K`` or raise :class:`EmptySetError`."""
    n = K.n
    if K.is_polyhedral:
        if len(K.b) == 0:
            return np.zeros(n)
        res = linprog(np.zeros(n), A_ub=K.A, b_ub=K.b, bounds=[(None, None)] * n, method="highs")
        if res.status == 0 and K.contains(res.x, 1e-7):
            return np.asarray(res.x, dtype=float)
        raise EmptySetError("the polyhedron has no feasible point")
    cands = [np.zeros((1, n))]
    for h in hints:
        cands.append(np.atleast_2d(np.asarray(h, dtype=float)))
    if len(K.b):
        res = linprog(np.zeros(n), A_ub=K.A, b_ub=K.b, bounds=[(None, None)] * n, method="highs")
        if res.status != 0:
            raise EmptySetError("the linear part of the constraints is infeasible")
        cands.append(res.x[None, :])
    per_axis = {1: 201, 2: 41, 3: 15, 4: 9}.get(n, 5)
    for r in (1.0, 10.0, 100.0):
        cands.append(box_grid(np.full(n, -r), np.full(n, r), per_axis))
    P = np.vstack(cands)
    viol = K.violation(P)
    hit = np.flatnonzero(viol <= cfg.feas_tol)
    if hit.size:
        return P[hit[0]].copy()
    order = np.argsort(viol, kind="stable")[:16]
    X, F = batch_compass(lambda Q, o: K.violation(Q), P[order], 0.5, max_evals=4000,
                         min_step=1e-12, target=cfg.feas_tol)
    ok = np.flatnonzero(F <= cfg.feas_tol)
    if ok.size:
        return X[ok[0]].copy()
    raise EmptySetError("no feasible point found by sampling and local search")


# -- numerical asymptotic directions -------------------------------------------

def _ray_cloud(n: int, seed: int = 0, random_points: int = 32) -> np.ndarray:
    """Offsets in the closed unit ball: center, pattern rings, random fill."""
    D = poll_directions(n)
    rings = [r * D for r in (0.125, 0.25, 0.5, 1.0)]
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((random_points, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= rng.uniform(0.0, 1.0, size=(random_points, 1)) ** (1.0 / n)
    return np.vstack([np.zeros((1, n))] + rings + [g])


def _found_at_scale(K: FeasibleSet, V: np.ndarray, t: float, tol: float, budget: int,
                    cloud: np.ndarray, feas_tol: float) -> np.ndarray:
    """For each row v of V: is there x in K with ||x/t - v|| <= tol?"""
    N, n = V.shape
    # absolute threshold: a scaled one would let slightly infeasible linear
    # rows unlock nonlinear constraints far out
    thr = feas_tol
    U = V[:, None, :] + tol * cloud[None, :, :]
    viol = K.violation((t * U).reshape(-1, n)).reshape(N, len(cloud))
    found = (viol <= thr).any(axis=1)
    rest = np.flatnonzero(~found)
    if rest.size and budget > 1:
        start = U[rest, np.argmin(viol[rest], axis=1)]
        centers = V[rest]

        def fun(P, owner):
            out = K.violation(t * P)
            far = np.linalg.norm(P - centers[owner], axis=1) > tol
            out[far] = np.inf
            return out

        _, F = batch_compass(fun, start, tol / 4, max_evals=budget, min_step=tol * 1e-6, target=thr)
        found[rest] = F <= thr
    return found


def ray_membership(K: FeasibleSet, V, *, scales=None, tol: float | None = None,
                   tail: int | None = None, budget: int | None = None,
                   cfg: Numerics = DEFAULT) -> np.ndarray:
    """Numerical test of ``v in K_inf`` for every row of ``V``.

    A direction passes when, at each of the ``tail`` largest scales ``t``,
    some ``x in K`` with ``||x/t - v|| <= tol`` is found: first among a fixed
    cloud of offsets around ``t v`` (this includes ``t v`` itself, so exact
    containment short-circuits), then by a compass search minimizing the
    largest constraint violation inside the tolerance ball.
    """
    V = normalize_rows(V)
    scales = tuple(cfg.ray_scales if scales is None else scales)
    tol = cfg.ray_tolerance(K.n) if tol is None else tol
    tail = cfg.ray_tail if tail is None else tail
    budget = cfg.ray_budget if budget is None else budget
    cloud = _ray_cloud(K.n, cfg.seed)
    ok = np.ones(len(V), dtype=bool)
    for t in scales[-tail:]:
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            break
        ok[idx] = _found_at_scale(K, V[idx], float(t), tol, budget, cloud, cfg.feas_tol)
    return ok


def ray_profile(K: FeasibleSet, v, *, scales=None, tol: float = 1e-2, budget: int = 500,
                cfg: Numerics = DEFAULT) -> list[tuple[float, bool]]:
    """Per-scale search outcome for a single direction (for reports and tests)."""
    v = normalize_rows(v)
    scales = tuple(cfg.ray_scales if scales is None else scales)
    cloud = _ray_cloud(K.n, cfg.seed)
    return [(float(t), bool(_found_at_scale(K, v, float(t), tol, budget, cloud, cfg.feas_tol)[0]))
            for t in scales]


def ray_in_cone(K: FeasibleSet, v, scales=None, tol: float = 1e-2, *, tail: int | None = None,
                budget: int = 500, cfg: Numerics = DEFAULT) -> bool:
    v = np.asarray(v, dtype=float)
    if not math.isclose(float(np.linalg.norm(v)), 1.0, rel_tol=1e-9):
        raise ValueError("direction must be a unit vector")
    return bool(ray_membership(K, v[None, :], scales=scales, tol=tol, tail=tail,
                               budget=budget, cfg=cfg)[0])


# -- cones ----------------------------------------------------------------------

def _face_directions(A: np.ndarray, n: int, resolution_deg: float) -> np.ndarray:
    """Sphere points on the subspaces ``{A_S v = 0}`` of every row subset ``S``.

    A dense angular grid almost never lands exactly on a lower-dimensional
    face of a cone, so these points are added as sampling candidates.
    """
    m = A.shape[0]
    out = []
    seen = set()
    for k in range(1, min(m, n - 1) + 1):
        for S in itertools.combinations(range(m), k):
            N = null_space(A[list(S)])
            dim = N.shape[1]
            if dim == 0 or dim == n:
                continue
            key = tuple(np.round(N @ N.T, 9).ravel())
            if key in seen:
                continue
            seen.add(key)
            if dim == 1:
                out.append(np.vstack([N[:, 0], -N[:, 0]]))
            else:
                out.append(sphere_grid(dim, resolution_deg) @ N.T)
    return np.vstack(out) if out else np.zeros((0, n))


class Cone:
    """Closed cone in ``R^n`` queried through unit directions."""

    n: int
    exact: bool = False

    def __init__(self):
        self._samples: dict[float, np.ndarray] = {}

    def contains(self, V, slack: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def candidates(self, resolution_deg: float) -> np.ndarray:
        raise NotImplementedError

    def sphere_samples(self, resolution_deg: float | None = None) -> np.ndarray:
        res = float(resolution_deg or self.cfg.sphere_resolution(self.n))
        if res not in self._samples:
            C = _dedupe(normalize_rows(self.candidates(res))) if self.n > 0 else np.zeros((0, self.n))
            keep = self.contains(C) if len(C) else np.zeros(0, dtype=bool)
            self._samples[res] = C[keep]
        return self._samples[res]

    def contains_direction(self, v, slack: float = 0.0) -> bool:
        return bool(self.contains(np.asarray(v, dtype=float)[None, :], slack)[0])


class PolyhedralCone(Cone):
    """``{v : A v <= 0}``."""

    exact = True

    def __init__(self, A, cfg: Numerics = DEFAULT, n: int | None = None):
        super().__init__()
        A = np.asarray(A, dtype=float)
        if A.size == 0:
            if n is None:
                n = A.shape[1] if A.ndim == 2 else None
            if n is None:
                raise ValueError("dimension needed for a cone without rows")
            A = np.zeros((0, n))
        self.A = np.atleast_2d(A)
        self.n = self.A.shape[1]
        self.cfg = cfg
        self._row_norm = np.linalg.norm(self.A, axis=1)

    @classmethod
    def zero(cls, n: int, cfg: Numerics = DEFAULT) -> "PolyhedralCone":
        eye = np.eye(n)
        return cls(np.vstack([eye, -eye]), cfg)

    @classmethod
    def whole(cls, n: int, cfg: Numerics = DEFAULT) -> "PolyhedralCone":
        return cls(np.zeros((0, n)), cfg, n=n)

    def contains(self, V, slack: float = 0.0) -> np.ndarray:
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if len(self.A) == 0:
            return np.ones(len(V), dtype=bool)
        lim = self.cfg.cone_tol + slack * self._row_norm
        return np.all(V @ self.A.T <= lim, axis=1)

    def candidates(self, resolution_deg: float) -> np.ndarray:
        return np.vstack([sphere_grid(self.n, resolution_deg),
                          _face_directions(self.A, self.n, resolution_deg)])

    def is_trivial(self) -> bool:
        """Exact test (linear programming) for ``{A v <= 0} = {0}``."""
        return polyhedral_cone_is_trivial(self.A)

    def __eq__(self, other):
        return isinstance(other, PolyhedralCone) and self.A.shape == other.A.shape \
            and bool(np.array_equal(self.A, other.A))

    __hash__ = None

    def describe(self) -> dict:
        return {"kind": "polyhedral", "A": self.A.tolist()}


def polyhedral_cone_is_trivial(A) -> bool:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0:
        return False
    for j in range(n):
        for s in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -s
            res = linprog(c, A_ub=A, b_ub=np.zeros(len(A)), bounds=[(-1, 1)] * n, method="highs")
            if res.status == 0 and -res.fun > 1e-9:
                return False
    return True


class SampledCone(Cone):
    """Asymptotic cone of a non-polyhedral set, tested ray by ray."""

    exact = False

    def __init__(self, base: FeasibleSet, cfg: Numerics = DEFAULT):
        super().__init__()
        self.base = base
        self.n = base.n
        self.cfg = cfg
        self._lin = PolyhedralCone(base.A, cfg, n=base.n)

    def contains(self, V, slack: float = 0.0) -> np.ndarray:
        # K inside {A x <= b} forces K_inf inside {A v <= 0}; that part is
        # exact, the ray test decides the rest at its own tolerance
        V = np.atleast_2d(np.asarray(V, dtype=float))
        out = np.zeros(len(V), dtype=bool)
        if len(V) == 0:
            return out
        lin = self._lin.contains(V, slack)
        idx = np.flatnonzero(lin)
        if idx.size:
            out[idx] = ray_membership(self.base, V[idx], cfg=self.cfg)
        return out

    def candidates(self, resolution_deg: float) -> np.ndarray:
        return np.vstack([sphere_grid(self.n, resolution_deg),
                          _face_directions(self.base.A, self.n, resolution_deg)])

    def describe(self) -> dict:
        return {"kind": "sampled", "set": self.base.describe(), "numerical": True}


class SliceCone(Cone):
    """``base ∩ {v : F_i(v) <= 0 for all i}`` for homogeneous ``F``."""

    def __init__(self, base: Cone, forms: VectorObjective, cfg: Numerics = DEFAULT):
        super().__init__()
        self.base = base
        self.forms = forms
        self.n = base.n
        self.cfg = cfg
        self.exact = base.exact
        # |grad F_i| <= deg_i * sum|coeff| on the unit ball; used to turn an
        # angular slack into a value slack
        self._lip = np.array([p.degree * float(np.abs(p.coefficients).sum()) for p in forms])
        self._ftol = np.array([cfg.cone_tol * (1.0 + coeff_norm(p)) for p in forms])

    def contains(self, V, slack: float = 0.0) -> np.ndarray:
        V = np.atleast_2d(np.asarray(V, dtype=float))
        out = np.zeros(len(V), dtype=bool)
        if len(V) == 0:
            return out
        vals = np.atleast_2d(self.forms(V))
        ok = np.all(vals <= self._ftol + slack * self._lip, axis=1)
        idx = np.flatnonzero(ok)
        if idx.size:
            out[idx] = self.base.contains(V[idx], slack)
        return out

    def candidates(self, resolution_deg: float) -> np.ndarray:
        return self.base.candidates(resolution_deg)

    def sphere_samples(self, resolution_deg: float | None = None) -> np.ndarray:
        # the base samples are already cone members; only the forms are new
        res = float(resolution_deg or self.cfg.sphere_resolution(self.n))
        if res not in self._samples:
            B = self.base.sphere_samples(res)
            keep = np.zeros(0, dtype=bool)
            if len(B):
                vals = np.atleast_2d(self.forms(B))
                keep = np.all(vals <= self._ftol, axis=1)
            self._samples[res] = B[keep]
        return self._samples[res]

    def describe(self) -> dict:
        return {"kind": "slice", "base": self.base.describe(), "forms": [str(p) for p in self.forms]}


# -- set choices ------------------------------------------------------------------

@dataclass(frozen=True)
class WholeSet:
    name: str = field(default="whole", init=False)


@dataclass(frozen=True)
class Sublevel:
    basepoint: tuple[float, ...]
    name: str = field(default="sublevel", init=False)

    def __init__(self, basepoint):
        object.__setattr__(self, "basepoint", tuple(float(v) for v in basepoint))


@dataclass(frozen=True)
class LeadingSlice:
    name: str = field(default="leading-slice", init=False)


SChoice = WholeSet | Sublevel | LeadingSlice
S_CHOICE_NAMES = ("whole", "sublevel", "leading-slice")


def make_s_choice(name: str, basepoint=None) -> SChoice:
    if name == "whole":
        return WholeSet()
    if name == "leading-slice":
        return LeadingSlice()
    if name == "sublevel":
        if basepoint is None:
            raise ValueError("the sublevel choice needs a basepoint")
        return Sublevel(basepoint)
    raise ValueError(f"unknown set choice {name!r}; expected one of {S_CHOICE_NAMES}")


def polyhedral_asymptotic_cone(P: FeasibleSet | PolyhedralCone, cfg: Numerics = DEFAULT) -> PolyhedralCone:
    if isinstance(P, PolyhedralCone):
        return PolyhedralCone(P.A.copy(), cfg, n=P.n)
    if not P.is_polyhedral:
        raise ValueError("set has nonlinear constraints; use asymptotic_cone")
    return PolyhedralCone(P.A.copy(), cfg, n=P.n)


def asymptotic_cone(K: FeasibleSet, cfg: Numerics = DEFAULT) -> Cone:
    return polyhedral_asymptotic_cone(K, cfg) if K.is_polyhedral else SampledCone(K, cfg)


def s_infinity(K: FeasibleSet, f: VectorObjective, choice: SChoice, cfg: Numerics = DEFAULT) -> Cone:
    """Asymptotic cone ``S_inf`` for the chosen ``S``."""
    if f.n != K.n:
        raise DimensionError("objective and set dimensions differ")
    if isinstance(choice, WholeSet):
        return asymptotic_cone(K, cfg)
    if isinstance(choice, Sublevel):
        return asymptotic_cone(sublevel_set(K, f, choice.basepoint), cfg)
    if isinstance(choice, LeadingSlice):
        return SliceCone(asymptotic_cone(K, cfg), leading_form_vector(f), cfg)
    raise TypeError(f"unknown set choice {choice!r}")


def cone_sphere_samples(C: Cone, density: float | None = None) -> np.ndarray:
    return C.sphere_samples(density)


# -- boundedness ------------------------------------------------------------------

@dataclass
class BoundedProbe:
    status: str  # "bounded" | "unbounded" | "unknown"
    direction: np.ndarray | None
    shell_hits: list[int]

    def to_dict(self) -> dict:
        return {"status": self.status,
                "direction": None if self.direction is None else self.direction.tolist(),
                "shell_hits": list(self.shell_hits)}


_SHELL_RES = {1: 180.0, 2: 1.0, 3: 6.0, 4: 15.0}


def _shell_points(K: FeasibleSet, r: float, cfg: Numerics) -> np.ndarray:
    """Feasible points with ``r <= |x| <= 2r`` found by shell sampling + local search."""
    n = K.n
    res = _SHELL_RES[n] if n in _SHELL_RES else cfg.sphere_resolution(n)
    U = _dedupe(normalize_rows(np.vstack([sphere_grid(n, res), _face_directions(K.A, n, res)])))
    P = r * U
    thr = cfg.feas_tol
    viol = K.violation(P)
    hits = [P[viol <= thr]]
    rest = np.flatnonzero(viol > thr)
    if rest.size:
        def fun(Q, owner):
            out = K.violation(Q)
            nrm = np.linalg.norm(Q, axis=1)
            out[(nrm < r) | (nrm > 2 * r)] = np.inf
            return out

        X, F = batch_compass(fun, P[rest], r * math.radians(res), max_evals=200,
                             min_step=r * 1e-9, target=thr)
        hits.append(X[F <= thr])
    return np.vstack(hits)


def bounded_probe(K: FeasibleSet, box_schedule=None, cfg: Numerics = DEFAULT) -> BoundedProbe:
    """Numerical boundedness test of ``K`` over growing radius shells."""
    radii = tuple(cfg.bounded_radii if box_schedule is None else box_schedule)
    if not radii:
        raise ValueError("radius schedule must be nonempty")
    found = [normalize_rows(_shell_points(K, float(r), cfg)) for r in radii]
    hits = [len(F) for F in found]
    if len(radii) >= 2 and hits[-1] == 0 and hits[-2] == 0:
        return BoundedProbe("bounded", None, hits)
    if len(radii) >= 2 and all(h > 0 for h in hits[1:]):
        prev, last = found[-2], found[-1]
        cos = last @ prev.T
        i, j = np.unravel_index(np.argmax(cos), cos.shape)
        if cos[i, j] >= math.cos(0.1):
            # report the direction at the last shell closest to the previous one
            return BoundedProbe("unbounded", last[i], hits)
    return BoundedProbe("unknown", None, hits)
