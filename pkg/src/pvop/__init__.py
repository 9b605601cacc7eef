"""Recession-based regularity analysis and Pareto existence checks for
polynomial vector optimization problems."""

__version__ = "0.1.0"

from .config import DEFAULT, Numerics
from .poly import Polynomial, VectorObjective, coeff_norm, evaluate, grad, leading_form, perturb
from .problem import Problem, ProblemSpec, load_problem, spec_from_dict
from .regularity import (lambda_recession_classify, relative_regularity_report,
                         scalar_recession_classify, section_bounded_probe,
                         strict_recession_classify, weak_recession_classify)
from .sets import FeasibleSet, PolyhedralCone, asymptotic_cone, bounded_probe, s_infinity
from .solver import descent_direction_check, existence_pipeline, solve_scalarized, verify_pareto

__all__ = [
    "DEFAULT", "Numerics", "Polynomial", "VectorObjective", "coeff_norm", "evaluate", "grad",
    "leading_form", "perturb", "Problem", "ProblemSpec", "load_problem", "spec_from_dict",
    "lambda_recession_classify", "relative_regularity_report", "scalar_recession_classify",
    "section_bounded_probe", "strict_recession_classify", "weak_recession_classify",
    "FeasibleSet", "PolyhedralCone", "asymptotic_cone", "bounded_probe", "s_infinity",
    "descent_direction_check", "existence_pipeline", "solve_scalarized", "verify_pareto",
]
