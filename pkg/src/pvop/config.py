"""Numerical settings shared by the sampling, classification and solver code.

Every report echoes the effective :class:`Numerics` so a run can be
reproduced exactly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

_SPHERE_RES = {1: 180.0, 2: 0.25, 3: 2.0, 4: 8.0}
_BOX_GRID = {1: 2001, 2: 120, 3: 41, 4: 15}
_ORACLE_GRID = {1: 2001, 2: 201, 3: 41, 4: 13}

MAX_SAMPLED_DIMENSION = 4


class UnsupportedDimensionError(ValueError):
    """Dense angular sampling is only offered for n <= 4."""


@dataclass(frozen=True)
class Numerics:
    seed: int = 0
    # sphere slices
    sphere_resolution_deg: float | None = None  # None: 0.25 (n=2), 2 (n=3), 8 (n=4)
    refine_starts: int = 5
    refine_iterations: int = 50
    tau_rel: float = 1e-6
    cone_tol: float = 1e-9
    # numerical asymptotic cones
    ray_scales: tuple[float, ...] = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
    ray_tol: float = 1e-2
    ray_tail: int = 2
    ray_budget: int = 500
    # feasibility and grids
    feas_tol: float = 1e-9
    box_grid: int | None = None      # None: 120 (n=2), 41 (n=3)
    oracle_grid: int | None = None   # None: 201 (n=2), 41 (n=3)
    # truncated-ball scalarization
    ball_schedule: tuple[float, ...] = tuple(float(2 ** j) for j in range(13))
    interior_margin: float = 0.5
    stabilization_dist: float = 1e-4
    near_opt_rel: float = 1e-8
    tau_dom_rel: float = 1e-6
    # probes
    bounded_radii: tuple[float, ...] = (1.0, 1e1, 1e2, 1e3, 1e4)
    section_radii: tuple[float, ...] = (1.0, 1e1, 1e2, 1e3)
    divergence_rel: float = 1e-3
    descent_steps: tuple[float, ...] = (1e-3, 1e-2, 1e-1, 1.0)
    descent_budget: int = 2000
    descent_radius: float = 5.0
    oracle_halfwidth: float = 5.0

    def sphere_resolution(self, n: int) -> float:
        if n > MAX_SAMPLED_DIMENSION:
            raise UnsupportedDimensionError(f"dense sphere sampling supports n <= 4, got n = {n}")
        return self.sphere_resolution_deg if self.sphere_resolution_deg else _SPHERE_RES[n]

    def ray_tolerance(self, n: int) -> float:
        """Normalized-distance tolerance for ray tests on sampled cones.

        Capped at a quarter of the angular grid spacing so that grid
        directions lying strictly outside a cone are not admitted by
        their proximity to a boundary ray.
        """
        return min(self.ray_tol, 0.25 * math.radians(self.sphere_resolution(n)))

    def box_grid_points(self, n: int) -> int:
        if self.box_grid:
            return self.box_grid
        if n > MAX_SAMPLED_DIMENSION:
            raise UnsupportedDimensionError(f"grid search supports n <= 4, got n = {n}")
        return _BOX_GRID[n]

    def oracle_grid_points(self, n: int) -> int:
        if self.oracle_grid:
            return self.oracle_grid
        if n > MAX_SAMPLED_DIMENSION:
            raise UnsupportedDimensionError(f"grid search supports n <= 4, got n = {n}")
        return _ORACLE_GRID[n]

    def with_overrides(self, **kw) -> "Numerics":
        kw = {k: v for k, v in kw.items() if v is not None}
        for key in ("ray_scales", "ball_schedule", "bounded_radii", "section_radii", "descent_steps"):
            if key in kw:
                kw[key] = tuple(float(v) for v in kw[key])
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "Numerics":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown numerics keys: {sorted(unknown)}")
        return cls().with_overrides(**d)


DEFAULT = Numerics()
