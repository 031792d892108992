"""Finite-volume solver for 1D transport driven by two-sided fractional material derivatives."""

from .core import (
    CoefficientTable,
    GridSpec,
    SolutionHistory,
    SolverParams,
    gamma_fn,
    make_coefficients,
    stability_mesh_bound,
)
from .operators import OperatorSign, combined_operator, discrete_material_derivative
from .sources import DeltaSpec, SourceKind, SourceTerm, discretize_delta, source_values
from .analytic import (
    ProfileKind,
    SimilarityProfile,
    monomial_solution,
    pdf_at,
    phi,
    profile_cell_averages,
    profile_mass,
)
from .scheme import (
    NumericalBlowupError,
    SchemeVariant,
    SolveConfig,
    mass_series,
    solve,
    solve_reference,
    write_solution_csv,
)
from .diagnostics import NormKind, discrete_norm, error_against_oracle, estimate_order
from .kernel import ContourSpec, KernelQuery, eval_G, eval_G1, eval_P, kernel_mass

__version__ = "0.1.0"
