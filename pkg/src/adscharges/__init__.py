"""Energy-momentum global charges of asymptotically hyperbolic initial data.

Computes the charge functional H(f, alpha) of an initial data set that is
asymptotic to a hyperbolic slice of Anti-de Sitter, extracts the
energy-momentum pair (M, Xi) in the n = 3 Hermitian-matrix picture,
assembles the 4x4 Hermitian form Q, and verifies the positivity statements
(principal minors, orbit normalization, reduced inequality) numerically.
"""

from .charges import (
    ChargeConvergenceError,
    EnergyMomentum,
    KillingCouple,
    MassCouple,
    SpinorCouple,
    charge_integrand,
    charge_limit,
    charge_limits,
    charge_on_sphere,
    charges_on_sphere,
    energy_momentum,
    q_assemble_from_charges,
    q_from_components,
)
from .families import (
    BoundaryData,
    ConstraintDeficit,
    DecayViolationError,
    InitialData,
    UnknownFamilyError,
    boundary_k_vector,
    builtin_family,
    constraint_deficit,
    dec_check,
    integrability_probe,
    load_grid_file,
    save_grid_file,
    validate_decay,
)
from .geometry import (
    ChartPoint,
    CoordinateSingularityError,
    FrameData,
    InvalidGeneratorError,
    MassFunction,
    SoN1Generator,
    chart_to_hermitian,
    embed,
    embed_jacobian,
    frame_at,
    killing_dual_form,
    killing_field,
    mass_function_eval,
    metric_second_derivatives,
    minkowski_eta,
    random_chart_point,
)
from .positivity import (
    NormalForm,
    NotTimelikeError,
    component_inequalities,
    group_action,
    minors_check,
    normalize,
    psd_oracle,
    reduced_inequality,
)
from .quadrature import SphereQuadrature, sphere_area
from .spin import (
    SpinorData,
    adjugate,
    alpha_field,
    alpha_pairing_matrix,
    clifford_theta,
    hermitian_sqrt,
    iks_eval,
    k_map,
    lambda_inv,
    lambda_iso,
    mu_cover,
    mu_lie_algebra,
    pauli_basis,
    sl2_basis,
    v_field,
)

__version__ = "0.1.0"
