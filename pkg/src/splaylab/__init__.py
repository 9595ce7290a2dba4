"""splaylab: generalized splay states of finite phase-oscillator networks.

Constructs points on the m-splay manifold (configurations whose m-th
order-parameter moment vanishes), evaluates closed-form linear-stability
spectra for plain, inertial, and adaptively coupled oscillator models, and
verifies every formula against dense-eigensolver and direct-simulation
oracles.
"""

from .construct import (
    SplayState,
    TangentBasis,
    antipodal_pairs_family,
    is_m_splay,
    random_splay,
    splay_tangent_basis,
    transverse_directions,
    twisted_state,
)
from .models import (
    Adaptive,
    DynamicState,
    Inertia,
    JacobianBlocks,
    KuramotoSakaguchi,
    ModelParams,
    OrderParameterMoment,
    PhaseConfiguration,
    ShapeMismatchError,
    SplayConditionError,
    TraceSet,
    collective_frequency,
    model_jacobian,
    model_rhs,
    natural_moment,
    order_parameter,
    stationary_kappa,
    steady_state,
    variational_matrix,
)
from .stability import (
    Classification,
    HopfBoundaryPoint,
    StabilityReport,
    adaptive_quartic,
    classify_planar,
    classify_roots,
    hopf_boundary,
    inertia_eigenvalues,
    ks_eigenvalues,
    ks_stability,
    quartic_roots,
    reduced_char_coeffs,
    reduction_applicable,
    sigma_rescale,
    transverse_eigenvalues,
)

__version__ = "0.1.0"
