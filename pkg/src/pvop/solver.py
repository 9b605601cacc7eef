"""Existence certificates and scalarized construction of Pareto points.

The constructive route minimizes a positively weighted sum over the
sublevel set ``K_xbar`` truncated to balls ``k B`` of growing radius.  When
the minimizers stay strictly inside the balls for two consecutive radii and
agree to ``stabilization_dist``, the common point minimizes the weighted sum
on all of ``K_xbar`` and is therefore a strict Pareto point of ``f`` on
``K``.  Every candidate is cross-checked against a brute-force domination
scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .poly import Polynomial, VectorObjective, leading_form_vector, weighted_sum
from .problem import Problem
from .regularity import (RegularityReport, ray_pareto_mask, relative_regularity_report,
                         section_bounded_probe)
from .search import box_grid, grid_minimize, lexicographic_argmin
from .sets import FeasibleSet, InfeasiblePointError, SChoice, sublevel_set

PARETO_FOUND = "pareto_found"
INCONCLUSIVE = "inconclusive"
NONEXISTENCE_EVIDENCE = "nonexistence_evidence"

STRICT_PARETO = "strict_pareto"
WEAK_PARETO_ONLY = "weak_pareto_only"
DOMINATED = "dominated"
UNKNOWN = "unknown"


class NoFeasibleSampleError(RuntimeError):
    """No feasible point was found in the search box."""


def _vec(x):
    return None if x is None else [float(v) for v in np.asarray(x, dtype=float)]


@dataclass
class VerifyVerdict:
    kind: str
    witness: np.ndarray | None = None
    tau_dom: float = 0.0
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "witness": _vec(self.witness), "tau_dom": self.tau_dom,
                "evidence": self.evidence}


@dataclass
class Iterate:
    k: float
    point: np.ndarray | None
    value: float
    norm: float
    interior: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "point": _vec(self.point),
                "value": None if not math.isfinite(self.value) else self.value,
                "norm": None if not math.isfinite(self.norm) else self.norm,
                "interior": self.interior}


@dataclass
class SolveResult:
    status: str
    x_star: np.ndarray | None = None
    value: np.ndarray | None = None
    lambda_used: np.ndarray | None = None
    verification: VerifyVerdict | None = None
    reason: str = ""
    descent_curve: list = field(default_factory=list)
    iterates: list[Iterate] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"status": self.status, "reason": self.reason,
             "x_star": _vec(self.x_star), "value": _vec(self.value),
             "lambda_used": _vec(self.lambda_used),
             "verification": None if self.verification is None else self.verification.to_dict(),
             "iterates": [it.to_dict() for it in self.iterates],
             "notes": self.notes}
        if self.descent_curve:
            d["descent_curve"] = [{"point": _vec(p), "value": _vec(v)} for p, v in self.descent_curve]
        return d


# -- compact minimization -------------------------------------------------------

def minimize_on_compact(g: Polynomial, K: FeasibleSet, radius: float, cfg: Numerics = DEFAULT,
                        seeds=None, min_norm: bool = False) -> tuple[np.ndarray, float]:
    """Minimize ``g`` over ``K`` intersected with the closed ball of ``radius``.

    Dense grid plus compass refinement under an extreme barrier, so the
    returned point is feasible to ``feas_tol``.
    """
    out = grid_minimize(g, K.violation, K.n, float(radius), cfg.box_grid_points(K.n),
                        feas_tol=cfg.feas_tol, seeds=seeds, min_norm=min_norm,
                        near_opt_rel=cfg.near_opt_rel)
    if out is None:
        raise NoFeasibleSampleError(f"no feasible sample in the ball of radius {radius}")
    return out["point"], out["value"]


# -- verification ----------------------------------------------------------------

def tau_dom(f: VectorObjective, x, cfg: Numerics = DEFAULT) -> float:
    return cfg.tau_dom_rel * (1.0 + float(np.max(np.abs(f(np.asarray(x, dtype=float))))))


def default_oracle_box(candidate, cfg: Numerics = DEFAULT):
    c = np.asarray(candidate, dtype=float)
    return c - cfg.oracle_halfwidth, c + cfg.oracle_halfwidth


def verify_pareto(candidate, K: FeasibleSet, f: VectorObjective, oracle_box=None,
                  grid_density: int | None = None, cfg: Numerics = DEFAULT) -> VerifyVerdict:
    """Brute-force domination scan of the feasible grid in ``oracle_box``.

    ``dominated``: some feasible grid point is better by more than
    ``tau_dom`` in every component (so the candidate is not even weakly
    Pareto in the box).  ``weak_pareto_only``: no such point, but one that
    is no worse (within ``tau_dom``) everywhere and better by more than
    ``tau_dom`` somewhere.  ``strict_pareto``: neither.  ``unknown``: the
    candidate lies outside the box.  The reported witness is the improver
    with the smallest sum of value changes (ties broken lexicographically).
    """
    x = np.asarray(candidate, dtype=float)
    if x.shape != (K.n,):
        raise ValueError(f"candidate must have {K.n} coordinates")
    if not K.contains(x, cfg.feas_tol):
        raise InfeasiblePointError(f"candidate {x.tolist()} is not feasible")
    lo, hi = default_oracle_box(x, cfg) if oracle_box is None else oracle_box
    lo, hi = np.broadcast_to(np.asarray(lo, float), (K.n,)), np.broadcast_to(np.asarray(hi, float), (K.n,))
    density = grid_density or cfg.oracle_grid_points(K.n)
    tau = tau_dom(f, x, cfg)
    ev = {"box": [lo.tolist(), hi.tolist()], "grid_density": int(density)}
    if np.any(x < lo) or np.any(x > hi):
        return VerifyVerdict(UNKNOWN, None, tau, dict(ev, reason="candidate outside the oracle box"))
    G = box_grid(lo, hi, density)
    G = G[K.violation(G) <= cfg.feas_tol]
    ev["feasible_points"] = int(len(G))
    if len(G) == 0:
        return VerifyVerdict(STRICT_PARETO, None, tau, ev)
    a = f(x)
    diff = np.atleast_2d(f(G)) - a
    strict_all = np.all(diff < -tau, axis=1)
    if strict_all.any():
        return VerifyVerdict(DOMINATED, _best_improver(G, diff, strict_all), tau, ev)
    weak = np.all(diff <= tau, axis=1) & np.any(diff < -tau, axis=1)
    if weak.any():
        return VerifyVerdict(WEAK_PARETO_ONLY, _best_improver(G, diff, weak), tau, ev)
    return VerifyVerdict(STRICT_PARETO, None, tau, ev)


def _best_improver(G, diff, mask):
    idx = np.flatnonzero(mask)
    k = lexicographic_argmin(diff[idx].sum(axis=1), G[idx])
    return G[idx[k]].copy()


# -- truncated-ball scalarization --------------------------------------------------

def _positive_weights(lam, q: int) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (q,):
        raise ValueError(f"weight vector must have length {q}")
    if not np.all(lam > 0):
        raise ValueError("scalarization weights must be strictly positive")
    return lam


def solve_scalarized(problem: Problem, lam, xbar=None, ball_schedule: Sequence[float] | None = None,
                     cfg: Numerics = DEFAULT, verify: bool = True) -> SolveResult:
    """Minimize ``sum lam_i f_i`` over ``K_xbar ∩ kB`` for growing ``k``.

    Each ball is searched from a dense grid seeded with ``xbar`` and the
    previous minimizer; among near-optimal candidates the one of minimal
    norm is kept.  Stops with ``pareto_found`` after two consecutive
    interior minimizers (norm ``<= k - interior_margin``) that agree to
    ``stabilization_dist``.
    """
    f, K = problem.f, problem.K
    lam = _positive_weights(lam, f.q)
    xbar = problem.basepoint if xbar is None else np.asarray(xbar, dtype=float)
    if xbar is None:
        raise ValueError("a basepoint is needed to form the sublevel set")
    xbar = np.asarray(xbar, dtype=float)
    S = sublevel_set(K, f, xbar)
    g = weighted_sum(f, lam)
    schedule = tuple(cfg.ball_schedule if ball_schedule is None else ball_schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("ball schedule must be strictly increasing")
    iterates: list[Iterate] = []
    prev = None
    notes = {"stopping_rule": {"interior_margin": cfg.interior_margin,
                               "stabilization_dist": cfg.stabilization_dist,
                               "consecutive_interior": 2},
             "sublevel_basepoint": xbar.tolist()}
    for k in schedule:
        seeds = [xbar] + ([prev.point] if prev is not None and prev.point is not None else [])
        out = grid_minimize(g, S.violation, f.n, float(k), cfg.box_grid_points(f.n),
                            feas_tol=cfg.feas_tol, seeds=np.array(seeds),
                            near_opt_rel=cfg.near_opt_rel)
        if out is None:
            it = Iterate(float(k), None, math.inf, math.inf, False)
        else:
            nrm = float(np.linalg.norm(out["point"]))
            it = Iterate(float(k), out["point"], float(out["value"]), nrm,
                         nrm <= k - cfg.interior_margin)
        iterates.append(it)
        if prev is not None and prev.interior and it.interior and \
                np.linalg.norm(it.point - prev.point) <= cfg.stabilization_dist:
            return _found(problem, it.point, lam, iterates, notes, cfg, verify)
        prev = it
    interior_tail = [it.interior for it in iterates[-2:]]
    reason = "minimizers escape to the boundary" if not any(interior_tail) \
        else "interior minimizers did not stabilize"
    return SolveResult(INCONCLUSIVE, lambda_used=lam, reason=reason, iterates=iterates,
                       notes=notes)


def _found(problem, x, lam, iterates, notes, cfg, verify) -> SolveResult:
    f, K = problem.f, problem.K
    verdict = verify_pareto(x, K, f, cfg=cfg) if verify else None
    if verdict is not None and verdict.kind == DOMINATED:
        return SolveResult(INCONCLUSIVE, lambda_used=lam, verification=verdict,
                           reason="stabilized minimizer is dominated on the oracle grid",
                           iterates=iterates, notes=notes)
    return SolveResult(PARETO_FOUND, x.copy(), f(x), lam, verdict, iterates=iterates, notes=notes)


# -- descent directions ------------------------------------------------------------

@dataclass
class DescentCheck:
    passed: bool
    direction: np.ndarray
    step: float | None
    samples: int
    failures: dict

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"passed": self.passed, "direction": _vec(self.direction), "step": self.step,
                "samples": self.samples, "failures": {str(k): v for k, v in self.failures.items()},
                "label": "sampled evidence"}


def _sample_set(S: FeasibleSet, budget: int, radius: float, cfg: Numerics, extra=()) -> np.ndarray:
    per_axis = max(3, int(round(budget ** (1.0 / S.n))) * 2 + 1)
    G = box_grid(np.full(S.n, -radius), np.full(S.n, radius), per_axis)
    G = G[S.violation(G) <= cfg.feas_tol]
    if len(G) > budget:
        G = G[np.linspace(0, len(G) - 1, budget).round().astype(int)]
    pts = [G] + [np.atleast_2d(np.asarray(e, dtype=float)) for e in extra]
    P = np.vstack(pts)
    return P[S.violation(P) <= cfg.feas_tol]


def descent_direction_check(K: FeasibleSet, S: FeasibleSet, f: VectorObjective, v,
                            t_schedule: Sequence[float] | None = None,
                            sample_budget: int | None = None, cfg: Numerics = DEFAULT,
                            extra_samples=()) -> DescentCheck:
    """Sampled test that ``x - t v`` stays in ``K`` and does not increase ``f`` on ``S``.

    Passes when a single step ``t`` from the schedule works for every
    sample of ``S`` (grid points in a box of radius ``descent_radius``).
    This is evidence from samples, not a proof.
    """
    v = np.asarray(v, dtype=float)
    if not math.isclose(float(np.linalg.norm(v)), 1.0, rel_tol=1e-9):
        raise ValueError("direction must be a unit vector")
    ts = tuple(cfg.descent_steps if t_schedule is None else t_schedule)
    budget = cfg.descent_budget if sample_budget is None else sample_budget
    X = _sample_set(S, budget, cfg.descent_radius, cfg, extra_samples)
    failures = {}
    if len(X) == 0:
        return DescentCheck(False, v, None, 0, {"reason": "no feasible samples"})
    FX = np.atleast_2d(f(X))
    tau = cfg.tau_dom_rel * (1.0 + np.max(np.abs(FX), axis=1))
    for t in ts:
        Y = X - t * v
        inK = K.violation(Y) <= cfg.feas_tol
        ok = inK & np.all(np.atleast_2d(f(Y)) <= FX + tau[:, None], axis=1)
        if ok.all():
            return DescentCheck(True, v, float(t), int(len(X)), failures)
        failures[float(t)] = int((~ok).sum())
    return DescentCheck(False, v, None, int(len(X)), failures)


# -- pipeline ----------------------------------------------------------------------

def _index_sets(report: RegularityReport, q: int) -> list[tuple[str, list[int]]]:
    """Candidate index sets (zero-based) for the section-boundedness hypothesis."""
    out = []
    everything = list(range(q))
    if report.relatively_strongly_regular:
        out.append(("strongly regular", everything))
        out += [("strongly regular", [i]) for i in range(q) if q > 1]
    if report.relatively_weakly_regular:
        out.append(("weakly regular", everything))
    for lam, t in report.lambda_results:
        if t.is_regular:
            out.append(("zero-regular", [int(i) for i in np.flatnonzero(lam > 0)]))
    seen, uniq = set(), []
    for name, I in out:
        if (name, tuple(I)) not in seen:
            seen.add((name, tuple(I)))
            uniq.append((name, I))
    return uniq


def existence_pipeline(problem: Problem, s_choice: SChoice, lambdas=None, cfg: Numerics = DEFAULT,
                       solve_lambda=None) -> tuple[RegularityReport, SolveResult]:
    """Regularity report, then either the certified or the descent-direction route."""
    f, K = problem.f, problem.K
    if problem.basepoint is None:
        raise ValueError("the existence pipeline needs a basepoint")
    xbar = np.asarray(problem.basepoint, dtype=float)
    lam = np.full(f.q, 1.0 / f.q) if solve_lambda is None else np.asarray(solve_lambda, dtype=float)
    if not np.all(lam > 0):
        lam = np.full(f.q, 1.0 / f.q)
    report = relative_regularity_report(f, K, s_choice, lambdas, cfg)
    notes: dict = {"route": None}
    if report.any_regular:
        probes = []
        for name, I in _index_sets(report, f.q):
            probe = section_bounded_probe(f, K, xbar, I, cfg)
            probes.append({"verdict": name, "index_set": [i + 1 for i in I], **probe.to_dict()})
            if probe.bounded:
                res = solve_scalarized(problem, lam, xbar, cfg=cfg)
                res.notes.update({"route": "certified", "section_probes": probes,
                                  "certificate": f"existence certified: relatively {name} and "
                                                 f"section-bounded on I = {[i + 1 for i in I]}"})
                return report, res
        notes["section_probes"] = probes
    # non-regular route: every recession direction must be a feasible descent direction
    S = sublevel_set(K, f, xbar)
    cone = report.cone
    samples = cone.sphere_samples(cfg.sphere_resolution(f.n))
    F = leading_form_vector(f)
    directions = np.zeros((0, f.n))
    if len(samples):
        mask, _ = ray_pareto_mask(F, samples, cfg, "strict")
        directions = samples[mask]
    notes["route"] = "descent-direction"
    notes["directions_checked"] = int(len(directions))
    if len(directions) == 0:
        return report, SolveResult(INCONCLUSIVE, lambda_used=lam, notes=notes,
                                   reason="no regularity verdict held with a bounded section, and "
                                          "no recession direction is available for the descent test")
    checks = []
    for v in directions:
        chk = descent_direction_check(K, S, f, v, cfg=cfg, extra_samples=[xbar])
        checks.append(chk)
        if not chk.passed:
            notes["descent_checks"] = [c.to_dict() for c in checks]
            return report, SolveResult(
                INCONCLUSIVE, lambda_used=lam, notes=notes,
                reason=f"descent-direction hypothesis fails for v = {np.round(v, 6).tolist()} "
                       "(and no regularity verdict held with a bounded section)")
    notes["descent_checks"] = [c.to_dict() for c in checks[:8]]
    res = solve_scalarized(problem, lam, xbar, cfg=cfg)
    res.notes.update(notes)
    return report, res
