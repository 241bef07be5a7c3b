"""Gapped free-fermion doubling paths, invariants, Gaussian states, and transport."""

from .exceptions import (
    CapacityError,
    ConfigurationError,
    FitUndefinedError,
    GaplessInputError,
    ImpureStateError,
    InvalidInputError,
    InvalidParameterError,
    InvalidSizeError,
    ToolkitError,
    UnsupportedModelError,
)
from .lattice import (
    DOWN,
    UP,
    DoubledLattice,
    DoubledSite,
    Lattice,
    build_chain,
    build_square,
    doubled_index,
    doubled_metric,
)
from .hamiltonians import (
    LocalityProfile,
    QuadraticHamiltonian,
    assemble_bdg,
    chern_insulator_model,
    conjugate_hamiltonian,
    kitaev_chain,
    locality_norm,
    locality_profile,
    pplusip_model,
    staggered_chain,
    trivial_model,
)
from .spectral import (
    BdGMatrix,
    MajoranaCovariance,
    OccupiedProjector,
    dirac_to_majorana,
    ground_covariance,
    hermitian_spectrum,
    matrix_sign,
    occupied_projector,
    spectral_gap,
)
from .invariants import (
    SectorPartition,
    majorana_number,
    pfaffian,
    real_space_chern,
    sector_partition,
    state_even,
    state_odd,
)
from .doubling import (
    DoubledSystem,
    InterpolationPath,
    doubled_hamiltonian,
    doubled_system,
    interpolation_path,
    invariant_scan,
    path_eigenvalue_map,
    path_matrix,
    product_ground_state_covariance,
    verify_gap_along_path,
    verify_locality_along_path,
)
from .gaussian import (
    BoundaryExperiment,
    boundary_sensitivity,
    rdm_from_covariance,
    restrict_covariance,
    trace_norm_distance,
    williamson_values,
)
from .flow import (
    FlowGenerator,
    TransportResult,
    exact_flow_generator,
    filtered_flow_generator,
    generator_locality_profile,
    negative_projector,
    transport_projector,
)
from .wannier import (
    PositionOperator,
    WannierBasis,
    almost_commuting_report,
    gxg_wannier_1d,
    localization_length,
    position_operator,
)

__version__ = "0.1.0"
