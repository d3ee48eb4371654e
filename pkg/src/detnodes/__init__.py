"""Determining-node experiments for semilinear heat flows on rectangles.

The package solves the evolution problem and its stationary problem on a
uniform grid, measures node-set geometry (covering radius, node observation
maximum), estimates the constants of the interpolation inequalities that
couple them, and verifies the resulting energy decay inequalities and
density thresholds along discrete trajectories.
"""

from .grid import (
    Domain,
    Grid,
    ScalarField,
    eigen_laplacian,
    eval_field,
    field_from_function,
    laplacian,
    make_grid,
    zero_field,
)
from .heat import BlowUpError, ForcingSpec, SolverConfig, Trajectory, apply_b, solve, step
from .nodes import NodeSet, density, eta, farthest_point_fill, nodes_for_density
from .norms import (
    CoefficientField,
    ConstantLedger,
    a_norm,
    da_norm,
    equivalence_constants,
    h1_norm,
    h1_seminorm,
    holder_quotient,
    l2_norm,
    poincare_constant,
    sup_norm,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "CoefficientField",
    "ConstantLedger",
    "Domain",
    "ForcingSpec",
    "Grid",
    "NodeSet",
    "ScalarField",
    "SolverConfig",
    "Trajectory",
    "a_norm",
    "apply_b",
    "da_norm",
    "density",
    "eigen_laplacian",
    "equivalence_constants",
    "eta",
    "eval_field",
    "farthest_point_fill",
    "field_from_function",
    "h1_norm",
    "h1_seminorm",
    "holder_quotient",
    "l2_norm",
    "laplacian",
    "make_grid",
    "nodes_for_density",
    "poincare_constant",
    "solve",
    "step",
    "sup_norm",
    "zero_field",
    "__version__",
]
