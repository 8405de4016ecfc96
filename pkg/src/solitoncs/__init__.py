"""Free-particle coherent states mapped by a Darboux transformation onto the sech^2 well."""

from .config import RunConfig
from .darboux import (
    DarbouxOperator,
    TransformationFunction,
    apply_L,
    darboux_from_u,
    eta_n,
    eta_z,
    phi_minus1,
    phi_n,
    phi_p,
    phi_z,
    soliton_seed,
    transformed_potential,
    validate_u,
)
from .errors import (
    BoundaryTruncationWarning,
    ConfigurationError,
    GridMismatchError,
    InvalidTransformationFunction,
    TruncationError,
)
from .freeparticle import CoherentParams, apply_ladder, coherent_psi_z, psi_n
from .numerics import ComplexPlaneQuadrature, Grid1D, MomentumNodes, SampledState, make_grid
from .verify import CHECKS, VerificationReport, run_suite

__version__ = "0.1.0"
