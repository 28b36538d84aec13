"""Lie symmetries and invariant solutions of the radial nonlinear heat equation.

    C(u) u_t = (K(u) u_z)_z + (nu / z) K(u) u_z
"""

import json

from ._core import (
    CatalogError,
    ConvergenceError,
    DomainError,
    DomainExitError,
    Error,
    Model,
    ModelError,
    Solution,
    ValidityError,
    build_solution,
    catalog,
    check_determining,
    classify,
    commutators,
    convergence_study,
    flow_closed,
    flow_labels,
    flow_numeric,
    perturbed,
)
from ._core import residual_report as _residual_report


def residual(solution, model, nz=20, nt=20):
    """PDE residual report of a solution on its default grid, as a dict."""
    return json.loads(_residual_report(solution, model, nz, nt))


__all__ = [
    "CatalogError",
    "ConvergenceError",
    "DomainError",
    "DomainExitError",
    "Error",
    "Model",
    "ModelError",
    "Solution",
    "ValidityError",
    "build_solution",
    "catalog",
    "check_determining",
    "classify",
    "commutators",
    "convergence_study",
    "flow_closed",
    "flow_labels",
    "flow_numeric",
    "perturbed",
    "residual",
]
