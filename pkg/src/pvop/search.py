"""Grids and batched derivative-free search used throughout the package.

The compass search here works on a whole batch of starting points at once:
each iteration polls every active point along a fixed pattern and moves it
to the best improving poll point, halving its step otherwise.  Objective
functions receive the polled points together with the index of the batch
member that owns each row, so per-member data (a scale, a target ball) can
be looked up without Python loops.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .config import MAX_SAMPLED_DIMENSION, UnsupportedDimensionError


def sphere_grid(n: int, resolution_deg: float) -> np.ndarray:
    """Unit vectors on an angular grid of the given resolution.

    n = 2 gives ``round(360 / res)`` equally spaced angles starting at 0.
    Higher n nests polar angles ``0..180`` (inclusive) around circles whose
    point count shrinks with their radius, so spacing stays roughly uniform.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if n > MAX_SAMPLED_DIMENSION:
        raise UnsupportedDimensionError(f"dense sphere sampling supports n <= 4, got n = {n}")
    if resolution_deg <= 0:
        raise ValueError("resolution must be positive")
    if n == 1:
        return np.array([[-1.0], [1.0]])
    pts = _nested_sphere(n, math.radians(resolution_deg), 1.0)
    pts[np.abs(pts) < 1e-15] = 0.0  # cos(pi/2) and friends
    return _dedupe(pts)


def _nested_sphere(n: int, res: float, radius: float) -> np.ndarray:
    if n == 2:
        count = 1 if radius < 1e-12 else max(1, int(round(2 * math.pi * radius / res)))
        ang = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    steps = max(1, int(round(math.pi / res)))
    blocks = []
    for theta in np.linspace(0.0, math.pi, steps + 1):
        s = math.sin(theta)
        sub = _nested_sphere(n - 1, res, radius * s)
        blocks.append(np.column_stack([np.full(len(sub), math.cos(theta)), s * sub]))
    return np.vstack(blocks)


def _dedupe(P: np.ndarray, decimals: int = 10) -> np.ndarray:
    """Drop near-duplicate rows, keeping the first occurrence in order."""
    if len(P) == 0:
        return P
    key = np.round(P, decimals) + 0.0  # +0.0 folds -0.0 into 0.0
    _, first = np.unique(key, axis=0, return_index=True)
    return P[np.sort(first)]


def normalize_rows(V: np.ndarray) -> np.ndarray:
    V = np.atleast_2d(np.asarray(V, dtype=float))
    nrm = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(nrm > 0, nrm, 1.0)


def box_grid(lo, hi, per_axis: int) -> np.ndarray:
    """Tensor grid with ``per_axis`` points per coordinate over ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def poll_directions(n: int) -> np.ndarray:
    """Coordinate directions plus the unit diagonals of every coordinate plane.

    The diagonals let the search slide along faces such as ``x1 = x2``
    that a pure coordinate pattern cannot follow under an extreme barrier.
    """
    eye = np.eye(n)
    dirs = [s * eye[i] for i in range(n) for s in (1.0, -1.0)]
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            dirs.append((si * eye[i] + sj * eye[j]) / math.sqrt(2.0))
    return np.array(dirs)


def batch_compass(fun: Callable[[np.ndarray, np.ndarray], np.ndarray], X0: np.ndarray,
                  step0, *, max_evals: int = 500, min_step: float = 1e-9,
                  target=None, project: Callable[[np.ndarray], np.ndarray] | None = None):
    """Minimize ``fun`` independently from every row of ``X0``.

    Parameters
    ----------
    fun : callable
        ``fun(points, owner) -> values``; ``owner[r]`` is the batch index
        that produced ``points[r]``.  Return ``inf`` to reject a point.
    step0 : float or array
        Initial step per batch member.
    max_evals : int
        Evaluation budget per batch member.
    target : float or array, optional
        Members stop once their value is ``<= target``.
    project : callable, optional
        Applied to every polled point before evaluation (e.g. sphere
        normalization).

    Returns
    -------
    X, F : arrays with the final points and values.
    """
    X = np.array(X0, dtype=float, copy=True)
    m, n = X.shape
    F = np.asarray(fun(X, np.arange(m)), dtype=float).copy()
    F[np.isnan(F)] = np.inf
    steps = np.broadcast_to(np.asarray(step0, dtype=float), (m,)).copy()
    tgt = None if target is None else np.broadcast_to(np.asarray(target, dtype=float), (m,))
    D = poll_directions(n)
    P = len(D)
    used = 1
    while used + P <= max_evals:
        active = steps >= min_step
        if tgt is not None:
            active &= F > tgt
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        trial = X[idx, None, :] + steps[idx, None, None] * D[None, :, :]
        flat = trial.reshape(-1, n)
        if project is not None:
            flat = project(flat)
            trial = flat.reshape(idx.size, P, n)
        vals = np.asarray(fun(flat, np.repeat(idx, P)), dtype=float).reshape(idx.size, P)
        vals[np.isnan(vals)] = np.inf
        j = np.argmin(vals, axis=1)
        best = vals[np.arange(idx.size), j]
        better = best < F[idx]
        win = idx[better]
        X[win] = trial[better, j[better]]
        F[win] = best[better]
        steps[idx[~better]] *= 0.5
        used += P
    return X, F


def lexicographic_argmin(values: np.ndarray, points: np.ndarray) -> int:
    """Index of the smallest value; ties broken by the point tuple."""
    values = np.asarray(values, dtype=float)
    best = np.min(values)
    tied = np.flatnonzero(values == best)
    if tied.size == 1:
        return int(tied[0])
    sub = points[tied]
    order = np.lexsort(sub.T[::-1])
    return int(tied[order[0]])


def grid_minimize(g: Callable[[np.ndarray], np.ndarray],
                  violation: Callable[[np.ndarray], np.ndarray],
                  n: int, radius: float, per_axis: int, *, feas_tol: float = 1e-9,
                  seeds: np.ndarray | None = None, starts: int = 8,
                  budget: int = 2000, near_opt_rel: float = 1e-8,
                  min_norm: bool = True):
    """Minimize ``g`` over ``{violation <= feas_tol}`` intersected with the ball of ``radius``.

    Dense grid on the enclosing box plus compass refinement from the best
    feasible candidates.  Infeasible polls and polls outside the ball are
    rejected (extreme barrier), so every returned point is feasible.  With
    ``min_norm`` a second compass pass pulls the winner toward the origin
    while staying inside the near-optimal band ``best + near_opt_rel * (1 +
    |best|)``, and the band member of smallest norm is selected (ties broken
    lexicographically).

    Returns a dict with ``point``/``value`` (selected), ``best_point`` /
    ``best_value`` (raw argmin) and ``evaluations``, or ``None`` when no
    feasible candidate exists.
    """
    grid = box_grid(np.full(n, -radius), np.full(n, radius), per_axis)
    extra = [np.zeros((1, n))]
    if seeds is not None and len(seeds):
        extra.append(np.atleast_2d(np.asarray(seeds, dtype=float)))
    cand = np.vstack([grid] + extra)
    cand = cand[np.linalg.norm(cand, axis=1) <= radius * (1 + 1e-12)]
    ok = violation(cand) <= feas_tol
    cand = cand[ok]
    if len(cand) == 0:
        return None
    vals = np.asarray(g(cand), dtype=float)
    finite = np.isfinite(vals)
    cand, vals = cand[finite], vals[finite]
    if len(cand) == 0:
        return None
    evals = len(grid) + len(extra)

    def barrier(P, owner=None):
        out = np.full(len(P), np.inf)
        inside = np.linalg.norm(P, axis=1) <= radius
        if inside.any():
            Q = P[inside]
            feas = violation(Q) <= feas_tol
            v = np.full(len(Q), np.inf)
            if feas.any():
                v[feas] = g(Q[feas])
            out[inside] = v
        return out

    order = np.argsort(vals, kind="stable")
    start_idx = _distinct(cand, order, starts)
    step0 = max(radius / per_axis, 1e-3)
    Xr, Fr = batch_compass(barrier, cand[start_idx], step0, max_evals=budget, min_step=1e-10)
    evals += budget * len(start_idx)
    allp = np.vstack([cand, Xr])
    allv = np.concatenate([vals, Fr])
    b = lexicographic_argmin(allv, allp)
    best_point, best_value = allp[b].copy(), float(allv[b])
    point, value = best_point, best_value
    if min_norm:
        band = best_value + near_opt_rel * (1.0 + abs(best_value))

        def norm_obj(P, owner=None):
            out = np.full(len(P), np.inf)
            inside = np.linalg.norm(P, axis=1) <= radius
            if inside.any():
                Q = P[inside]
                feas = violation(Q) <= feas_tol
                v = np.full(len(Q), np.inf)
                if feas.any():
                    gv = g(Q[feas])
                    nv = np.linalg.norm(Q[feas], axis=1)
                    v[feas] = np.where(gv <= band, nv, np.inf)
                out[inside] = v
            return out

        in_band = allv <= band
        bp, bv = allp[in_band], allv[in_band]
        nrm = np.linalg.norm(bp, axis=1)
        s = lexicographic_argmin(nrm, bp)
        Xn, _ = batch_compass(norm_obj, bp[s:s + 1], step0, max_evals=budget, min_step=1e-10)
        evals += budget
        pool = np.vstack([bp, Xn])
        pool_v = np.concatenate([bv, g(Xn)])
        pool_n = np.linalg.norm(pool, axis=1)
        keep = pool_v <= band
        pool, pool_v, pool_n = pool[keep], pool_v[keep], pool_n[keep]
        s = lexicographic_argmin(np.round(pool_n, 12), pool)
        point, value = pool[s].copy(), float(pool_v[s])
    return {"point": point, "value": value, "best_point": best_point,
            "best_value": best_value, "evaluations": evals}


def _distinct(points: np.ndarray, order: np.ndarray, k: int, sep: float = 1e-9) -> np.ndarray:
    """First ``k`` indices in ``order`` whose points are pairwise distinct."""
    chosen: list[int] = []
    for i in order:
        if all(np.max(np.abs(points[i] - points[j])) > sep for j in chosen):
            chosen.append(int(i))
            if len(chosen) == k:
                break
    return np.array(chosen, dtype=int)
