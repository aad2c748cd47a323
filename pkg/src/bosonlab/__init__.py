"""Numerical laboratory for the mass-critical Hartree ground state.

The package solves

    sqrt(-Laplacian) u - (|x|^-1 * |u|^2) u = -u

for its positive radial ground state Q on a truncated radial grid,
verifies the qualitative portrait of Q (positivity, monotonicity, decay,
Fourier positivity), checks the kernel structure of the linearized
operator sector by sector, and exercises the halfspace-extension
quadratic form that underlies the uniqueness argument.
"""

from .artifacts import ProfileRecord, load_profile, save_profile
from .config import RunConfig, config_hash, parse_config, serialize
from .errors import (
    BosonlabError,
    CollapsedToZero,
    EigensolverFailure,
    FormatError,
    GridMismatch,
    HashMismatchWarning,
    InsufficientSectors,
    NoCrossing,
    NotConverged,
    NotConvergedInput,
    NotRescaled,
    ParseError,
    ProfilesCoincide,
    QuadratureUnstable,
    RescaleImpossible,
    ValidationError,
    ZeroProfile,
)
from .extension import (
    FormReport,
    HalfspaceField,
    TGrid,
    contradiction_functional,
    first_crossing,
    form_minimize,
    poisson_extend,
    quadratic_form,
)
from .ground_state import (
    GroundStateSolution,
    QualityReport,
    SolverConfig,
    cross_validate,
    mass_constant,
    residual,
    scaled_family_mass,
    solve_ground_state,
    verify_qualitative,
)
from .linearization import (
    NondegeneracyReport,
    SpectrumReport,
    assemble_L_plus,
    nondegeneracy_check,
    spectral_derivative,
    spectrum,
    zero_mode_residual,
)
from .pipeline import STAGES, run_pipeline
from .potentials import (
    PotentialPair,
    canonical_rescale,
    newton_potential,
    newton_potential_direct,
    resample_scaled,
)
from .radial import (
    RadialGrid,
    RadialProfile,
    SectorOperator,
    SpectralProfile,
    apply_half_laplacian,
    forward_transform,
    inner_product,
    inverse_transform,
    mass,
    norm,
    sector_operator_matrix,
)

__version__ = "0.1.0"
