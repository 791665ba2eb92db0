"""Heisenberg-picture matrix product operators for the boundary-driven XY chain."""

from .errors import (
    CanonicalFormError,
    ConfigError,
    DegenerateInputError,
    DimensionError,
    NormalizationError,
    NumericalAbort,
    ObservableParseError,
    SizeGuardError,
    StabilityError,
    StructureError,
)
from .linalg import SVDResult, kron, matrix_exp, solve_lyapunov, svd_truncated
from .model import (
    CoherentCoefficients,
    adjoint_bond_gate,
    bond_hamiltonian,
    boundary_dissipator_gate,
    c_operator_mpo,
    closed_solution_coefficients,
    parity_mpo,
)
from .mpo import (
    MPO,
    SchmidtSpectrum,
    TriangularSiteMatrix,
    apply_one_site_gate,
    apply_two_site_gate,
    canonicalize,
    effective_chi,
    expectation,
    load_mpo,
    mpo_from_product,
    mpo_from_triangular,
    mpo_identity,
    partial_trace_last_site,
    save_mpo,
    schmidt_spectrum,
    to_dense,
)
from .params import ParameterSchedule, XYParameters
from .tebd import EvolutionConfig, TrajectoryRecord, evolve, strang_step

__version__ = "0.1.0"
