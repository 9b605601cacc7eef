"""Trichotomy classification of recession problems on cone sphere slices.

For a homogeneous form ``h`` of degree ``d >= 1`` and a closed cone ``C``,
let ``m`` be the minimum of ``h`` on the unit sphere intersected with
``C``.  Homogeneity makes the solution set of ``min h over C``

* ``{0}`` when ``m > 0``,
* an unbounded cone (containing every ray where ``h = 0``) when ``m = 0``,
* empty when ``m < 0`` (``h`` is unbounded below along a ray).

Numerically ``m`` is compared with ``tau = tau_rel * (1 + coeff_norm(h))``.
Vector forms ``F = (F_1, ..., F_q)`` are classified with respect to the
weak and strict Pareto orders; see :func:`weak_recession_classify` and
:func:`strict_recession_classify`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Numerics
from .poly import (LeadingCancellationError, Polynomial, VectorObjective, coeff_norm,
                   leading_form, leading_form_vector, weighted_leading_form, weighted_sum)
from .search import batch_compass, grid_minimize, lexicographic_argmin, normalize_rows, poll_directions
from .sets import (Cone, FeasibleSet, PolyhedralCone, SChoice, polyhedral_cone_is_trivial,
                   s_infinity, sublevel_set)

ZERO_ONLY = "zero_only"
UNBOUNDED = "unbounded"
EMPTY = "empty"
REGULAR_TAGS = (ZERO_ONLY, EMPTY)


class SamplingError(RuntimeError):
    """A nontrivial cone produced no sphere samples."""


@dataclass
class Trichotomy:
    tag: str
    min_value: float
    witness: np.ndarray | None
    tau: float
    borderline: bool = False
    evidence: dict = field(default_factory=dict)

    @property
    def is_regular(self) -> bool:
        return self.tag in REGULAR_TAGS

    def to_dict(self) -> dict:
        return {"tag": self.tag, "min_value": _num(self.min_value),
                "witness": None if self.witness is None else self.witness.tolist(),
                "tau": self.tau, "borderline": self.borderline, "evidence": self.evidence}


@dataclass
class VectorVerdict:
    """Classification of a weak or strict Pareto recession problem."""

    tag: str
    witness: np.ndarray | None
    tau: float
    precondition: bool | None = None
    borderline: bool = False
    components: list[Trichotomy] = field(default_factory=list)
    evidence: dict = field(default_factory=dict)

    @property
    def is_regular(self) -> bool:
        return self.tag in REGULAR_TAGS

    def to_dict(self) -> dict:
        d = {"tag": self.tag, "witness": None if self.witness is None else self.witness.tolist(),
             "tau": self.tau, "borderline": self.borderline, "evidence": self.evidence}
        if self.precondition is not None:
            d["precondition_verified"] = self.precondition
        return d


def _num(x: float):
    return None if x is None else (float(x) if math.isfinite(x) else ("inf" if x > 0 else "-inf"))


def trichotomy_tau(h: Polynomial, cfg: Numerics = DEFAULT) -> float:
    return cfg.tau_rel * (1.0 + coeff_norm(h))


def _samples(C: Cone, cfg: Numerics) -> np.ndarray:
    return C.sphere_samples(cfg.sphere_resolution(C.n))


def _check_nonempty_samples(C: Cone, samples: np.ndarray):
    if len(samples) == 0 and isinstance(C, PolyhedralCone) and len(C.A) and \
            not polyhedral_cone_is_trivial(C.A):
        raise SamplingError("nontrivial polyhedral cone produced no sphere samples")


def _refine_on_sphere(h: Polynomial, C: Cone, starts: np.ndarray, cfg: Numerics, res_deg: float):
    """Compass search on the sphere from ``starts``; polls must stay in the cone."""

    def fun(P, owner=None):
        out = np.full(len(P), np.inf)
        inside = C.contains(P)
        if inside.any():
            out[inside] = h(P[inside])
        return out

    budget = 1 + cfg.refine_iterations * len(poll_directions(C.n))
    return batch_compass(fun, starts, math.radians(res_deg), max_evals=budget,
                         min_step=1e-12, project=normalize_rows)


def scalar_recession_classify(h: Polynomial, C: Cone, cfg: Numerics = DEFAULT) -> Trichotomy:
    """Classify ``SOL(C, h)`` as ``{0}``, unbounded or empty.

    The sphere-slice minimum is taken over the cone's grid samples and then
    refined by a compass search from the best few samples.  Refinement is
    only run on cones with exact membership: for numerically sampled cones
    the ray test admits directions within its tolerance of the cone, and a
    local search would drift into that band.
    """
    if h.n != C.n:
        raise ValueError("form and cone dimensions differ")
    if not h.is_homogeneous():
        raise ValueError(f"form {h} is not homogeneous")
    if h.degree == 0:
        raise ValueError("form must have degree >= 1 (or be identically zero)")
    tau = trichotomy_tau(h, cfg)
    res = cfg.sphere_resolution(C.n)
    S = _samples(C, cfg)
    _check_nonempty_samples(C, S)
    if len(S) == 0:
        return Trichotomy(ZERO_ONLY, math.inf, None, tau, evidence={"samples": 0})
    vals = h(S)
    pts, allv = S, vals
    refined = False
    if C.exact and not h.is_zero():
        order = np.lexsort(tuple(S.T[::-1]) + (vals,))[: cfg.refine_starts]
        X, F = _refine_on_sphere(h, C, S[order], cfg, res)
        pts, allv = np.vstack([S, X]), np.concatenate([vals, F])
        refined = True
    k = lexicographic_argmin(allv, pts)
    m, w = float(allv[k]), pts[k].copy()
    if m > tau:
        tag = ZERO_ONLY
    elif m < -tau:
        tag = EMPTY
    else:
        tag = UNBOUNDED
    borderline = tau < abs(m) <= 2 * tau
    return Trichotomy(tag, m, None if tag == ZERO_ONLY else w, tau, borderline,
                      {"samples": int(len(S)), "refined": refined, "resolution_deg": res})


# -- vector problems ------------------------------------------------------------

def _vector_tau(F: VectorObjective, cfg: Numerics) -> float:
    return cfg.tau_rel * (1.0 + max(coeff_norm(p) for p in F))


def _chunks(N: int, size: int = 256):
    for s in range(0, N, size):
        yield slice(s, min(N, s + size))


def sphere_pareto_oracle(F: VectorObjective, C: Cone, cfg: Numerics = DEFAULT,
                         mode: str = "weak", samples: np.ndarray | None = None) -> np.ndarray:
    """Nondominated unit directions among the cone's sphere samples.

    Plain pairwise filter on the sampled unit vectors, ignoring rescaling:
    in ``weak`` mode ``u`` is dropped when some sample is better by more
    than ``tau`` in every component; in ``strict`` mode when some sample is
    no worse (within ``tau``) in every component and better by more than
    ``tau`` in one.
    """
    if mode not in ("weak", "strict"):
        raise ValueError("mode must be 'weak' or 'strict'")
    S = _samples(C, cfg) if samples is None else samples
    if samples is None:
        _check_nonempty_samples(C, S)
    if len(S) == 0:
        return np.zeros((0, C.n))
    tau = _vector_tau(F, cfg)
    vals = np.atleast_2d(F(S))
    keep = np.ones(len(S), dtype=bool)
    for sl in _chunks(len(S)):
        a = vals[sl][:, None, :]
        b = vals[None, :, :]
        if mode == "weak":
            dom = np.all(b < a - tau, axis=2)
        else:
            dom = np.all(b <= a + tau, axis=2) & np.any(b < a - tau, axis=2)
        keep[sl] = ~dom.any(axis=1)
    return S[keep]


def _scaled_dominated(a: np.ndarray, b: np.ndarray, d: np.ndarray, tau: float, mode: str) -> np.ndarray:
    """Does some ``s > 0`` make ``s^d * b`` dominate ``a``?  Broadcasts over leading axes.

    Weak mode asks for every component below ``a - tau``; strict mode for
    every component at most ``a`` and one below ``a - tau``.  ``a``, ``b``
    have the component axis last.  Each component gives an
    interval of admissible ``log s``; domination holds when the
    intersection is nonempty.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        def bounds(c, strict):
            # admissible log s for s^d b < c (strict) or s^d b <= c
            lo = np.full(np.broadcast(b, c).shape, -np.inf)
            hi = np.full_like(lo, np.inf)
            ok = np.ones_like(lo, dtype=bool)
            bpos, bneg, bzero = b > 0, b < 0, b == 0
            cpos = c > 0 if strict else c >= 0
            ratio = np.log(np.abs(c)) - np.log(np.abs(b))
            # b > 0: need c > 0, then s < (c/b)^(1/d)
            ok &= ~(bpos & ~(c > 0))
            hi = np.where(bpos & (c > 0), ratio / d, hi)
            # b < 0: if c < 0 (or <= 0 when strict) need s > (c/b)^(1/d)
            need_lo = bneg & ~cpos
            lo = np.where(need_lo, ratio / d, lo)
            # b == 0: need 0 < c (strict) or 0 <= c
            ok &= ~(bzero & ~cpos)
            return lo, hi, ok

        if mode == "weak":
            lo, hi, ok = bounds(a - tau, True)
            L, U = lo.max(axis=-1), hi.min(axis=-1)
            return ok.all(axis=-1) & (L < U)
        # no slack on the "no worse" side: with one, a ray whose values have
        # mixed signs is dominated by a slight rescaling of itself
        lo_le, hi_le, ok_le = bounds(a, False)
        L0, U0, base_ok = lo_le.max(axis=-1), hi_le.min(axis=-1), ok_le.all(axis=-1)
        lo_s, hi_s, ok_s = bounds(a - tau, True)
        out = np.zeros(L0.shape, dtype=bool)
        for j in range(a.shape[-1]):
            L = np.maximum(L0, lo_s[..., j])
            U = np.minimum(U0, hi_s[..., j])
            out |= base_ok & ok_s[..., j] & (L < U)
        return out


def ray_pareto_mask(F: VectorObjective, S: np.ndarray, cfg: Numerics = DEFAULT,
                    mode: str = "weak") -> tuple[np.ndarray, bool]:
    """Which sampled rays are Pareto for ``F`` over the cone generated by ``S``?

    Unlike :func:`sphere_pareto_oracle` this accounts for rescaling: ``u``
    is dominated if some ``s * w`` (``w`` a sample or the origin, ``s > 0``)
    dominates it.  Returns ``(mask over S, origin_is_pareto)``.
    """
    tau = _vector_tau(F, cfg)
    d = np.array([max(1, p.degree) for p in F], dtype=float)
    vals = np.atleast_2d(F(S)) if len(S) else np.zeros((0, F.q))
    # rescaling amplifies round-off without bound, so snap it to zero first
    snap = cfg.cone_tol * (1.0 + max(coeff_norm(p) for p in F))
    vals = np.where(np.abs(vals) <= snap, 0.0, vals)
    zero = np.zeros(F.q)
    origin_dominated = bool(_scaled_dominated(zero[None, :], vals, d, tau, mode).any()) if len(S) else False
    mask = np.ones(len(S), dtype=bool)
    for sl in _chunks(len(S)):
        a = vals[sl][:, None, :]
        dom = _scaled_dominated(a, vals[None, :, :], d, tau, mode).any(axis=1)
        dom |= _scaled_dominated(vals[sl], zero[None, :], d, tau, mode)
        mask[sl] = ~dom
    return mask, not origin_dominated


def _pick_witness(F: VectorObjective, S: np.ndarray, cfg: Numerics, mode: str):
    """Witness direction for an unbounded vector problem, taken from the oracle set."""
    O = sphere_pareto_oracle(F, None, cfg, mode, samples=S) if len(S) else S
    if len(O) == 0:
        return None, 0
    mask, _ = ray_pareto_mask(F, S, cfg, mode)
    good = S[mask]
    if len(good):
        # oracle members that are also Pareto once rescaling is allowed
        key = {tuple(np.round(v, 12)) for v in good}
        both = np.array([v for v in O if tuple(np.round(v, 12)) in key])
        if len(both):
            O = both
    score = np.atleast_2d(F(O)).max(axis=1)
    k = lexicographic_argmin(score, O)
    return O[k].copy(), int(len(O))


def weak_recession_classify(F: VectorObjective, C: Cone, cfg: Numerics = DEFAULT) -> VectorVerdict:
    """Classify ``SOL^w(C, F)``.

    Empty when a sampled direction has every component below ``-tau`` (then
    the origin, and with it every point, is strictly improvable along that
    ray).  Otherwise ``{0}`` exactly when every component alone is
    ``{0}``; otherwise unbounded with a weak-Pareto witness direction.
    """
    tau = _vector_tau(F, cfg)
    S = _samples(C, cfg)
    _check_nonempty_samples(C, S)
    if len(S) == 0:
        return VectorVerdict(ZERO_ONLY, None, tau, evidence={"samples": 0})
    vals = np.atleast_2d(F(S))
    worst = vals.max(axis=1)
    neg = np.flatnonzero(np.all(vals < -tau, axis=1))
    evidence = {"samples": int(len(S)), "min_of_max": float(worst.min())}
    if neg.size:
        k = neg[lexicographic_argmin(worst[neg], S[neg])]
        borderline = bool(-2 * tau <= worst[k] < -tau)
        return VectorVerdict(EMPTY, S[k].copy(), tau, borderline=borderline, evidence=evidence)
    comps = [scalar_recession_classify(p, C, cfg) for p in F]
    borderline = any(c.borderline for c in comps)
    if all(c.tag == ZERO_ONLY for c in comps):
        return VectorVerdict(ZERO_ONLY, None, tau, borderline=borderline, components=comps,
                             evidence=evidence)
    w, size = _pick_witness(F, S, cfg, "weak")
    evidence["oracle_size"] = size
    return VectorVerdict(UNBOUNDED, w, tau, borderline=borderline, components=comps, evidence=evidence)


def strict_recession_classify(F: VectorObjective, C: Cone, cfg: Numerics = DEFAULT) -> VectorVerdict:
    """Classify ``SOL^s(C, F)`` and report whether ``C ⊆ {F <= 0}`` held on samples.

    With that inclusion verified, the classification follows the
    equivalence with the component problems and the strict emptiness test
    (some component below ``-tau``, all at most ``tau``).  Without it, the
    verdict comes from the rescaling-aware Pareto filter over the samples:
    unbounded if some ray survives, ``{0}`` if only the origin does, empty
    otherwise.
    """
    tau = _vector_tau(F, cfg)
    S = _samples(C, cfg)
    _check_nonempty_samples(C, S)
    if len(S) == 0:
        return VectorVerdict(ZERO_ONLY, None, tau, precondition=True, evidence={"samples": 0})
    vals = np.atleast_2d(F(S))
    evidence = {"samples": int(len(S))}
    precondition = bool(np.all(vals <= tau))
    improving = np.flatnonzero(np.any(vals < -tau, axis=1) & np.all(vals <= tau, axis=1))
    if precondition:
        comps = [scalar_recession_classify(p, C, cfg) for p in F]
        borderline = any(c.borderline for c in comps)
        if all(c.tag == ZERO_ONLY for c in comps):
            return VectorVerdict(ZERO_ONLY, None, tau, True, borderline, comps, evidence)
        if improving.size:
            worst = vals[improving].max(axis=1)
            k = improving[lexicographic_argmin(worst, S[improving])]
            borderline |= bool(vals[k].min() >= -2 * tau)
            return VectorVerdict(EMPTY, S[k].copy(), tau, True, borderline, comps, evidence)
        w, size = _pick_witness(F, S, cfg, "strict")
        evidence["oracle_size"] = size
        return VectorVerdict(UNBOUNDED, w, tau, True, borderline, comps, evidence)
    mask, origin_ok = ray_pareto_mask(F, S, cfg, "strict")
    evidence.update({"pareto_rays": int(mask.sum()), "origin_pareto": origin_ok})
    if mask.any():
        w, _ = _pick_witness(F, S, cfg, "strict")
        return VectorVerdict(UNBOUNDED, w, tau, False, evidence=evidence)
    if origin_ok:
        return VectorVerdict(ZERO_ONLY, None, tau, False, evidence=evidence)
    w = S[improving[0]].copy() if improving.size else None
    return VectorVerdict(EMPTY, w, tau, False, evidence=evidence)


def lambda_form(f: VectorObjective, lam) -> tuple[Polynomial, bool]:
    """Leading form of ``sum lam_i f_i``; the flag records a leading cancellation."""
    try:
        return weighted_leading_form(f, lam), False
    except LeadingCancellationError:
        s = weighted_sum(f, lam)
        if s.degree >= 1:
            return leading_form(s), True
        # the weighted sum is constant: its recession form is identically zero
        return Polynomial.zero(f.n), True


def lambda_recession_classify(f: VectorObjective, lam, C: Cone, cfg: Numerics = DEFAULT) -> Trichotomy:
    h, cancelled = lambda_form(f, lam)
    t = scalar_recession_classify(h, C, cfg)
    t.evidence["form"] = str(h)
    t.evidence["leading_cancellation"] = cancelled
    return t


# -- section boundedness ------------------------------------------------------------

@dataclass
class SectionProbe:
    bounded: bool
    infima: dict
    witnesses: dict

    def to_dict(self) -> dict:
        return {"bounded": self.bounded,
                "infima": {str(k): [_num(v) for v in vs] for k, vs in self.infima.items()},
                "witnesses": {str(k): [w.tolist() for w in ws] for k, ws in self.witnesses.items()}}


def section_bounded_probe(f: VectorObjective, K: FeasibleSet, xbar, I: Sequence[int],
                          cfg: Numerics = DEFAULT) -> SectionProbe:
    """Numerical test that every ``f_i``, ``i in I`` (zero-based), is bounded below on ``K_xbar``.

    Minimizes each ``f_i`` over ``K_xbar`` intersected with balls of growing
    radius.  A component is declared unbounded when its minimum drops by
    more than ``divergence_rel * (1 + |previous|)`` at each of the last two
    radius steps.
    """
    I = sorted(set(int(i) for i in I))
    if not I or I[0] < 0 or I[-1] >= f.q:
        raise ValueError("index set must be a nonempty subset of the objective indices")
    Kx = sublevel_set(K, f, xbar)
    xbar = np.asarray(xbar, dtype=float)
    infima, witnesses = {}, {}
    bounded = True
    for i in I:
        vals, pts = [], []
        seeds = xbar[None, :]
        for r in cfg.section_radii:
            r_eff = max(float(r), float(np.linalg.norm(xbar)))
            out = grid_minimize(f[i], Kx.violation, f.n, r_eff, cfg.box_grid_points(f.n),
                                feas_tol=cfg.feas_tol, seeds=seeds, min_norm=False)
            vals.append(out["best_value"])
            pts.append(out["best_point"])
            seeds = np.vstack([xbar[None, :], out["best_point"][None, :]])
        drops = [vals[j] < vals[j - 1] - cfg.divergence_rel * (1 + abs(vals[j - 1]))
                 for j in range(1, len(vals))]
        diverging = len(drops) >= 2 and drops[-1] and drops[-2]
        infima[i + 1] = vals
        witnesses[i + 1] = pts
        bounded &= not diverging
    return SectionProbe(bool(bounded), infima, witnesses)


# -- reports ---------------------------------------------------------------------------

@dataclass
class RegularityReport:
    s_choice: SChoice
    cone: Cone
    component_trichotomy: list[Trichotomy]
    lambda_results: list[tuple[np.ndarray, Trichotomy]]
    weak_class: VectorVerdict
    strict_class: VectorVerdict
    s_inf_samples: int

    @property
    def relatively_zero_regular(self) -> bool:
        return any(t.is_regular for _, t in self.lambda_results)

    @property
    def zero_regular_index_sets(self) -> list[list[int]]:
        return [sorted(int(i) + 1 for i in np.flatnonzero(lam > 0))
                for lam, t in self.lambda_results if t.is_regular]

    @property
    def relatively_weakly_regular(self) -> bool:
        return self.strict_class.is_regular

    @property
    def relatively_strongly_regular(self) -> bool:
        return self.weak_class.is_regular

    @property
    def any_regular(self) -> bool:
        return self.relatively_zero_regular or self.relatively_weakly_regular or \
            self.relatively_strongly_regular

    def verdicts(self) -> dict:
        return {"relatively_zero_regular": self.relatively_zero_regular,
                "zero_regular_index_sets": self.zero_regular_index_sets,
                "relatively_weakly_regular": self.relatively_weakly_regular,
                "relatively_strongly_regular": self.relatively_strongly_regular}

    def to_dict(self) -> dict:
        return {"s_choice": _choice_dict(self.s_choice),
                "s_infinity": {"samples": self.s_inf_samples, "trivial": self.s_inf_samples == 0,
                               "cone": self.cone.describe()},
                "component_trichotomy": [t.to_dict() for t in self.component_trichotomy],
                "lambda_results": [{"lambda": lam.tolist(), "trichotomy": t.to_dict()}
                                   for lam, t in self.lambda_results],
                "weak_class": self.weak_class.to_dict(),
                "strict_class": self.strict_class.to_dict(),
                "verdicts": self.verdicts()}


def _choice_dict(choice) -> dict:
    d = {"name": choice.name}
    if hasattr(choice, "basepoint"):
        d["basepoint"] = list(choice.basepoint)
    return d


def default_lambdas(q: int) -> list[np.ndarray]:
    """Uniform weights plus the unit vectors (the latter only when q > 1)."""
    lams = [np.full(q, 1.0 / q)]
    if q > 1:
        lams += [np.eye(q)[i] for i in range(q)]
    return lams


def relative_regularity_report(f: VectorObjective, K: FeasibleSet, s_choice: SChoice,
                               lambdas: Sequence | None = None, cfg: Numerics = DEFAULT) -> RegularityReport:
    cone = s_infinity(K, f, s_choice, cfg)
    F = leading_form_vector(f)
    lams = [np.asarray(l, dtype=float) for l in (lambdas if lambdas else default_lambdas(f.q))]
    comps = [scalar_recession_classify(p, cone, cfg) for p in F]
    lam_results = [(lam, lambda_recession_classify(f, lam, cone, cfg)) for lam in lams]
    weak = weak_recession_classify(F, cone, cfg)
    strict = strict_recession_classify(F, cone, cfg)
    samples = len(_samples(cone, cfg))
    return RegularityReport(s_choice, cone, comps, lam_results, weak, strict, samples)
