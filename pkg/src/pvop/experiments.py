"""Perturbation, genericity and nonexistence experiments.

Random draws come from ``numpy.random.SeedSequence(seed).spawn``: trial
``j`` always receives the ``j``-th child sequence, so serial and parallel
runs (and partial reruns) see identical perturbations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .expr import parse_polynomial
from .poly import (Polynomial, VectorObjective, leading_form_vector, monomial_exponents,
                   vector_coeff_norm)
from .problem import Problem
from .regularity import (UNBOUNDED, REGULAR_TAGS, default_lambdas, lambda_recession_classify,
                         strict_recession_classify, weak_recession_classify)
from .search import box_grid, lexicographic_argmin
from .sets import (Cone, FeasibleSet, LeadingSlice, PolyhedralCone, SChoice, SliceCone, Sublevel,
                   WholeSet, asymptotic_cone, s_infinity)
from .solver import NONEXISTENCE_EVIDENCE, SolveResult


class UnstableBaseError(ValueError):
    """Stability probes are only defined for {0} and empty base classifications."""


def _children(seed, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def dense_polynomial(n: int, degree: int, rng: np.random.Generator, max_degree_only: bool = False) -> Polynomial:
    """All monomials of degree <= ``degree`` with standard normal coefficients."""
    exps = monomial_exponents(n, degree)
    if max_degree_only:
        exps = [e for e in exps if sum(e) == degree]
    coeffs = rng.standard_normal(len(exps))
    return Polynomial(n, zip(exps, coeffs))


def random_perturbation(f: VectorObjective, eps: float, rng: np.random.Generator) -> list[Polynomial]:
    """Dense perturbation with the degree vector of ``f`` and total coefficient norm ``eps``."""
    g = [dense_polynomial(f.n, d, rng) for d in f.degrees]
    nrm = vector_coeff_norm(g)
    return [p.scale(eps / nrm) for p in g]


def random_lower_order(f: VectorObjective, rng: np.random.Generator) -> list[Polynomial]:
    """Dense ``g_i`` with ``deg g_i < d_i`` (a constant when ``d_i = 1``)."""
    return [dense_polynomial(f.n, d - 1, rng) for d in f.degrees]


def _add(f: VectorObjective, g: Sequence[Polynomial]) -> VectorObjective:
    return VectorObjective([p + h for p, h in zip(f, g)])


class _ConeFactory:
    """Recomputes ``S_inf`` for perturbed objectives, reusing the asymptotic cone of ``K``."""

    def __init__(self, K: FeasibleSet, choice: SChoice, cfg: Numerics):
        self.K, self.choice, self.cfg = K, choice, cfg
        self._base = asymptotic_cone(K, cfg) if not isinstance(choice, Sublevel) else None

    def __call__(self, f: VectorObjective) -> Cone:
        if isinstance(self.choice, WholeSet):
            return self._base
        if isinstance(self.choice, LeadingSlice):
            return SliceCone(self._base, leading_form_vector(f), self.cfg)
        return s_infinity(self.K, f, self.choice, self.cfg)


# -- stability -------------------------------------------------------------------------

@dataclass
class StabilityRecord:
    base_tag: str
    base_min: float
    lam: list
    eps_tested: list[float]
    trials_per_eps: int
    flips: dict
    largest_stable_eps: float | None
    flip_found: dict | None = None
    recompute_cone: bool = True

    def to_dict(self) -> dict:
        return {"experiment": "stability", "base_classification": self.base_tag,
                "base_min_value": self.base_min, "lambda": self.lam,
                "eps_tested": self.eps_tested, "trials_per_eps": self.trials_per_eps,
                "flips": {repr(k): v for k, v in self.flips.items()},
                "largest_stable_eps": self.largest_stable_eps, "flip_found": self.flip_found,
                "recompute_cone": self.recompute_cone}


def stability_probe(problem: Problem, s_choice: SChoice, lam=None, eps_schedule: Sequence[float] = (1e-3,),
                    trials_per_eps: int = 100, seed: int = 0, cfg: Numerics = DEFAULT,
                    recompute_cone: bool = True) -> StabilityRecord:
    """Re-classify ``sum lam_i f_i`` on ``S_inf`` after random same-degree perturbations.

    With ``recompute_cone`` the set choice is re-applied to every perturbed
    objective (the sublevel set and leading slice move with ``f``);
    otherwise ``S_inf`` stays that of the unperturbed problem.
    """
    eps = [float(e) for e in eps_schedule]
    if not eps or any(e <= 0 for e in eps) or any(b <= a for a, b in zip(eps, eps[1:])):
        raise ValueError("perturbation sizes must be positive and increasing")
    f, K = problem.f, problem.K
    lam = np.full(f.q, 1.0 / f.q) if lam is None else np.asarray(lam, dtype=float)
    cones = _ConeFactory(K, s_choice, cfg)
    base_cone = cones(f)
    base = lambda_recession_classify(f, lam, base_cone, cfg)
    if base.tag == UNBOUNDED:
        raise UnstableBaseError("base classification is unbounded; stability is not defined there")
    flips: dict = {}
    first_flip = None
    children = _children(seed, len(eps) * trials_per_eps)
    for i, e in enumerate(eps):
        flips[e] = 0
        for j in range(trials_per_eps):
            rng = np.random.default_rng(children[i * trials_per_eps + j])
            g = random_perturbation(f, e, rng)
            fp = _add(f, g)
            cone = cones(fp) if recompute_cone else base_cone
            t = lambda_recession_classify(fp, lam, cone, cfg)
            if t.tag != base.tag:
                flips[e] += 1
                if first_flip is None:
                    first_flip = {"eps": e, "trial": j, "perturbation_norm": vector_coeff_norm(g),
                                  "perturbation": [p.to_records() for p in g],
                                  "new_classification": t.tag, "new_min_value": t.min_value}
    largest = None
    for e in eps:
        if flips[e]:
            break
        largest = e
    return StabilityRecord(base.tag, base.min_value, lam.tolist(), eps, trials_per_eps, flips,
                           largest, first_flip, recompute_cone)


def lower_order_invariance_check(problem: Problem, s_choice: SChoice, lam=None, trials: int = 100,
                                 seed: int = 0, cfg: Numerics = DEFAULT) -> bool:
    """Adding ``g`` with ``deg g_i < d_i`` leaves leading forms and the classification unchanged.

    ``S_inf`` is computed once from the unperturbed problem; the check
    compares leading forms coefficient by coefficient and the trichotomy
    (tag and sphere-slice minimum) exactly.
    """
    f, K = problem.f, problem.K
    lam = np.full(f.q, 1.0 / f.q) if lam is None else np.asarray(lam, dtype=float)
    cone = s_infinity(K, f, s_choice, cfg)
    base = lambda_recession_classify(f, lam, cone, cfg)
    F = leading_form_vector(f)
    for child in _children(seed, trials):
        rng = np.random.default_rng(child)
        fp = _add(f, random_lower_order(f, rng))
        if leading_form_vector(fp) != F:
            return False
        t = lambda_recession_classify(fp, lam, cone, cfg)
        if t.tag != base.tag or t.min_value != base.min_value:
            return False
    return True


# -- genericity --------------------------------------------------------------------------

@dataclass
class GenericityReport:
    fraction: float
    regular: int
    total: int
    log: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"experiment": "genericity", "fraction_regular": self.fraction,
                "regular": self.regular, "total": self.total,
                "interpretation": "consistent with genericity" if self.fraction >= 0.9
                else "below the 0.9 proxy threshold",
                "instances": self.log}


def genericity_sample(n: int, degrees: Sequence[int], cone: PolyhedralCone, N: int, seed: int = 0,
                      cfg: Numerics = DEFAULT) -> GenericityReport:
    """Fraction of random objectives that are relatively zero-regular on ``cone``.

    Objectives have i.i.d. uniform ``[-1, 1]`` coefficients in every
    monomial up to the given degrees; an instance counts as regular when
    some default weight vector gives a ``{0}`` or empty trichotomy.
    """
    if N < 1:
        raise ValueError("sample size must be positive")
    degrees = [int(d) for d in degrees]
    if not degrees or min(degrees) < 1:
        raise ValueError("degrees must be positive")
    A = np.atleast_2d(cone.A)
    if A.shape[1] != n:
        raise ValueError("cone dimension differs from n")
    if len(A) and np.linalg.matrix_rank(A) < min(A.shape):
        raise ValueError("cone matrix is rank deficient")
    lams = default_lambdas(len(degrees))
    log, regular = [], 0
    for j, child in enumerate(_children(seed, N)):
        rng = np.random.default_rng(child)
        comps = []
        for d in degrees:
            exps = monomial_exponents(n, d)
            top = np.array([sum(e) == d for e in exps])
            c = rng.uniform(-1.0, 1.0, len(exps))
            while not np.any(c[top] != 0):
                c[top] = rng.uniform(-1.0, 1.0, int(top.sum()))
            comps.append(Polynomial(n, zip(exps, c)))
        f = VectorObjective(comps)
        results = [lambda_recession_classify(f, lam, cone, cfg) for lam in lams]
        ok = any(t.tag in REGULAR_TAGS for t in results)
        regular += ok
        log.append({"instance": j, "regular": ok, "tags": [t.tag for t in results],
                    "min_values": [t.min_value for t in results]})
    return GenericityReport(regular / N, regular, N, log)


# -- weak regularity is not open ------------------------------------------------------------

def weak_nonopen_demo(seed: int = 0, ns: Sequence[int] = (10, 100, 1000), cfg: Numerics = DEFAULT) -> dict:
    """Contrast table: ``(x1, x2)`` versus ``(x2, x1 - x2/n)`` on ``{x1 >= 0}``.

    The base objective is weakly regular relative to its sublevel set at
    the origin (strict recession problem empty).  Each perturbed objective,
    whose coefficient distance to a permutation of the base tends to zero,
    has an unbounded strict recession problem on ``S = K``.  The sublevel
    verdict of the perturbed objectives is listed as well.
    """
    K = FeasibleSet.from_strings(["x1 >= 0"], 2)
    origin = (0.0, 0.0)

    def row(label, f, choice):
        cone = s_infinity(K, f, choice, cfg)
        F = leading_form_vector(f)
        strict = strict_recession_classify(F, cone, cfg)
        weak = weak_recession_classify(F, cone, cfg)
        return {"objective": label, "s_choice": choice.name,
                "strict_class": strict.tag,
                "strict_witness": None if strict.witness is None else strict.witness.tolist(),
                "precondition_verified": strict.precondition,
                "weak_class": weak.tag, "weakly_regular": strict.is_regular}

    f0 = VectorObjective([parse_polynomial("x1", 2), parse_polynomial("x2", 2)])
    base = row("(x1, x2)", f0, Sublevel(origin))
    rows = []
    for n in ns:
        fn = VectorObjective([parse_polynomial("x2", 2), parse_polynomial(f"x1 - x2 * {1.0 / n!r}", 2)])
        label = f"(x2, x1 - x2/{n})"
        rows.append({"n": n, "whole": row(label, fn, WholeSet()), "sublevel": row(label, fn, Sublevel(origin))})
    return {"experiment": "weak_nonopen", "seed": seed, "feasible_set": "x1 >= 0",
            "base": base, "perturbed": rows,
            "base_weakly_regular": base["weakly_regular"],
            "perturbed_weakly_regular_on_K": [r["whole"]["weakly_regular"] for r in rows],
            "identical_across_n": len({(r["whole"]["strict_class"], r["whole"]["weak_class"])
                                       for r in rows}) == 1}


# -- nonexistence evidence -------------------------------------------------------------------

def nondominated_mask(Y: np.ndarray, tau: float = 0.0, chunk: int = 512) -> np.ndarray:
    """Rows of ``Y`` not beaten by more than ``tau`` in every component by another row."""
    Y = np.atleast_2d(Y)
    order = np.lexsort(Y.T[::-1])
    keep = np.zeros(len(Y), dtype=bool)
    front = np.zeros((0, Y.shape[1]))
    # a strict all-component dominator precedes its victim lexicographically
    for s in range(0, len(order), chunk):
        idx = order[s:s + chunk]
        block = Y[idx]
        dom = np.zeros(len(idx), dtype=bool)
        if len(front):
            dom |= np.any(np.all(front[None, :, :] < block[:, None, :] - tau, axis=2), axis=1)
        dom |= np.any(np.all(block[None, :, :] < block[:, None, :] - tau, axis=2), axis=1)
        keep[idx] = ~dom
        front = np.vstack([front, block[~dom]])
    return keep


def nonexistence_demo(problem: Problem, candidate_box=((0.0, 0.0), (2.0, 2.0)),
                      escape_box=((0.0, 0.0), (20.0, 20.0)), grid: int = 401,
                      candidate_grid: int | None = None, cfg: Numerics = DEFAULT) -> dict:
    """Search ``escape_box`` for a strict dominator of every nondominated candidate.

    Candidates are the feasible grid points of ``candidate_box`` that no other
    candidate beats in every component.  A dominator must be better by
    more than ``tau_dom`` in every component.  Also returns a chain of
    successively dominating grid points as a descent curve.
    """
    f, K = problem.f, problem.K
    cg = candidate_grid or grid
    C = box_grid(*candidate_box, cg)
    C = C[K.violation(C) <= cfg.feas_tol]
    E = box_grid(*escape_box, grid)
    E = E[K.violation(E) <= cfg.feas_tol]
    FC, FE = np.atleast_2d(f(C)), np.atleast_2d(f(E))
    nd = nondominated_mask(FC)
    cand, fcand = C[nd], FC[nd]
    taus = cfg.tau_dom_rel * (1.0 + np.max(np.abs(fcand), axis=1))
    dominated = np.zeros(len(cand), dtype=bool)
    witnesses = []
    for i in range(len(cand)):
        better = np.all(FE < fcand[i] - taus[i], axis=1)
        dominated[i] = better.any()
        if better.any():
            k = np.flatnonzero(better)
            j = k[lexicographic_argmin(FE[k].sum(axis=1), E[k])]
            witnesses.append({"candidate": cand[i].tolist(), "dominator": E[j].tolist()})
    frac = float(dominated.mean()) if len(cand) else 0.0
    curve = _descent_chain(cand, fcand, E, FE, cfg)
    result = SolveResult(NONEXISTENCE_EVIDENCE, reason="every nondominated candidate is strictly "
                         "dominated" if frac == 1.0 else "some candidates have no dominator",
                         descent_curve=curve)
    return {"experiment": "nonexistence", "candidate_box": [list(b) for b in candidate_box],
            "escape_box": [list(b) for b in escape_box], "grid": grid, "candidate_grid": cg,
            "candidates": int(len(C)), "nondominated_candidates": int(len(cand)),
            "dominated_fraction": frac, "witnesses": witnesses[:20],
            "evidence": result.to_dict()}


def _descent_chain(cand, fcand, E, FE, cfg: Numerics, length: int = 12):
    """Greedy chain: from the first candidate, repeatedly jump to the nearest strict dominator."""
    if len(cand) == 0:
        return []
    x, fx = cand[0], fcand[0]
    chain = [(x, fx)]
    for _ in range(length):
        tau = cfg.tau_dom_rel * (1.0 + float(np.max(np.abs(fx))))
        better = np.flatnonzero(np.all(FE < fx - tau, axis=1))
        if better.size == 0:
            break
        d = np.linalg.norm(E[better] - x, axis=1)
        j = better[lexicographic_argmin(d, E[better])]
        x, fx = E[j], FE[j]
        chain.append((x, fx))
    return chain
