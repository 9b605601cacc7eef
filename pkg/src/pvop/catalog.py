"""Small worked problems used by the tests, demos and fixture files."""

from __future__ import annotations

from .problem import ProblemSpec, spec_from_dict

_CATALOG = {
    "mixed_cubic_exp_quadrant": {
        "n": 2,
        "objectives": ["x2^3 - x1^2 - x1*x2 + 1", "x1^2 - 1"],
        "constraints": ["x1 >= 0", "x2 >= 0", "exp(x1) - x2 >= 0"],
        "basepoint": [0.0, 0.0],
        "s_choice": "leading-slice",
        "lambda": [1.0, 1.0],
    },
    "coordinate_projection_plane": {
        "n": 2,
        "objectives": ["x1", "x2"],
        "constraints": [],
        "basepoint": [0.0, 0.0],
        "s_choice": "sublevel",
    },
    "cubic_wedge_scalar": {
        "n": 2,
        "objectives": ["x1*x2^2 - x1*x2"],
        "constraints": ["x2 >= x1", "x1 >= 0"],
        "basepoint": [0.5, 0.5],
        "s_choice": "sublevel",
    },
    "diagonal_ray_antagonist": {
        "n": 2,
        "objectives": ["x1 - x2", "x2 - x1"],
        "constraints": ["x1 >= 0", "x2 >= 0", "x1 = x2"],
        "basepoint": [1.0, 1.0],
        "s_choice": "whole",
    },
    "escaping_quartic_pair": {
        "n": 2,
        "objectives": ["(x1^4*x2^4 - 1)^2 + 2*x1^4", "(x1^2*x2^2 - 1)^2 + 4*x1^2"],
        "constraints": [],
        "basepoint": [1.0, 1.0],
        "s_choice": "whole",
    },
    "cubic_linear_exp_halfplane": {
        "n": 2,
        "objectives": ["x1^3", "x1"],
        "constraints": ["x1 >= 0", "exp(x1) - x1 >= 0"],
        "basepoint": [1.0, 0.0],
        "s_choice": "whole",
    },
    "halfplane_linear_pair": {
        "n": 2,
        "objectives": ["x1", "x2"],
        "constraints": ["x1 >= 0"],
        "basepoint": [0.0, 0.0],
        "s_choice": "sublevel",
    },
}

NAMES = tuple(_CATALOG)


def catalog_dict(name: str) -> dict:
    if name not in _CATALOG:
        raise KeyError(f"unknown catalog problem {name!r}; known: {', '.join(NAMES)}")
    d = {"name": name}
    d.update(_CATALOG[name])
    return d


def catalog_spec(name: str, **changes) -> ProblemSpec:
    d = catalog_dict(name)
    for k, v in changes.items():
        d["lambda" if k == "lam" else k] = v
    return spec_from_dict(d)
