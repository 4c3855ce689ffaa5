"""Exact ground-state series for the 2D oscillator with an x^2 y^2 coupling.

The potential g^2 (x^2 + b^2 y^2) / 2 + g^2 mu x^2 y^2 admits a semiclassical
expansion of the ground state built from a single classical trajectory.  This
package computes that expansion exactly, in several equivalent formulations,
and verifies the results against an independent oscillator-basis recursion
and a sparse finite-difference eigensolver.
"""

from .algebra import (
    ExpSum,
    GradedPoly,
    coupling_grade_shift,
    grad_dot,
    laplacian,
)
from .errors import (
    ConvergenceFailure,
    OddParity,
    QuadoscError,
    ResidualTimeDependence,
    ResonantDenominator,
    SingularIntegral,
    SingularInverse,
    TruncationOverflow,
)
from .greens import (
    OperatorSolution,
    apply_flow_inverse,
    collapse_constant,
    collapse_constant_pure_x,
    collapse_constant_pure_y,
    diffusion_step,
    gamma_coefficient,
    resolvent_sum,
    solve_green,
)
from .hierarchy import (
    SeriesSolution,
    assemble_wavefunction,
    pde_residual,
    solve_hierarchy,
    solve_levels,
)
from .oracle import (
    ComparisonReport,
    GridSpec,
    OscBasisIndex,
    RSCorrections,
    SpectralEstimate,
    compare_methods,
    extrapolated_ground_energy,
    fd_ground_state,
    oscillator_matrix_element,
    rs_corrections,
    rs_series,
)
from .perturbation import (
    DEFAULT_WINDOW,
    NormalForm,
    canonical_window,
    default_depth,
    exp_to_poly,
    normal_form_diff,
    normalize_grading,
    solve_exponential,
    solve_polynomial,
)
from .trajectory import (
    PotentialSpec,
    Trajectory,
    action_integral,
    energy_conservation_residual,
    flow_equation_residual,
    invert_endpoint_constants,
    solve_classical_trajectory,
    standard_spec,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ConvergenceFailure",
    "DEFAULT_WINDOW",
    "ExpSum",
    "GradedPoly",
    "GridSpec",
    "NormalForm",
    "OddParity",
    "OperatorSolution",
    "OscBasisIndex",
    "PotentialSpec",
    "QuadoscError",
    "RSCorrections",
    "ResidualTimeDependence",
    "ResonantDenominator",
    "SeriesSolution",
    "SingularIntegral",
    "SingularInverse",
    "SpectralEstimate",
    "Trajectory",
    "TruncationOverflow",
    "action_integral",
    "apply_flow_inverse",
    "assemble_wavefunction",
    "canonical_window",
    "collapse_constant",
    "collapse_constant_pure_x",
    "collapse_constant_pure_y",
    "compare_methods",
    "coupling_grade_shift",
    "default_depth",
    "diffusion_step",
    "energy_conservation_residual",
    "exp_to_poly",
    "extrapolated_ground_energy",
    "fd_ground_state",
    "flow_equation_residual",
    "gamma_coefficient",
    "grad_dot",
    "invert_endpoint_constants",
    "laplacian",
    "normal_form_diff",
    "normalize_grading",
    "oscillator_matrix_element",
    "pde_residual",
    "resolvent_sum",
    "rs_corrections",
    "rs_series",
    "solve_classical_trajectory",
    "solve_exponential",
    "solve_green",
    "solve_hierarchy",
    "solve_levels",
    "solve_polynomial",
    "standard_spec",
]
