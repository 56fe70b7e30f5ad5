"""Gradient-flow convergence certificates at desk scale.

Simulates gradient flows for five model families, measures the
Kurdyka-Lojasiewicz quantities that drive their convergence, and checks
closed-form loss bounds against the measured trajectories.  All randomness
flows through a SplitMix-style generator so every artifact is reproducible
bit for bit.
"""

from .bounds import (
    BoundCurve,
    SineCertificate,
    SineConfig,
    bassin_probability,
    bassin_radius,
    in_bassin,
    initial_loss_bound_check,
    lemniscate_bound,
    linear_exp_bound,
    logistic_bound,
    logistic_tail_scan,
    radius_loss_check,
    sine_admissible_draw,
    sine_constants,
    sine_gershgorin_check,
    sine_gram_check,
    sine_kappa_rho,
    sine_mu0,
    sine_rayleigh_verify,
    sine_shattering_basis,
    two_layer_bound,
    two_layer_kl_verify,
)
from .domain import (
    Finite,
    UniformInterval,
    eval_on,
    finite_from_csv,
    finite_to_csv,
    gauss_legendre_nodes,
    inner_d,
    seminorm_d,
)
from .flow import FlowConfig, Trajectory, integrate, limit_param
from .linalg import (
    EigenResult,
    SymMat,
    gershgorin_max,
    gershgorin_min,
    lambda_min_plus,
    sym_eigen,
    vec,
)
from .loss import (
    CrossEntropyLoss,
    Desingularizer,
    FunctionalLoss,
    HalfQuadraticLoss,
    QuadraticLoss,
    gradient_state,
    kl_residual,
    log_desingularizer,
    logistic_desingularizer,
    parametric_gradient,
    power_desingularizer,
)
from .model import (
    LemniscateMap,
    LinearModel,
    NetworkMap,
    SineGram,
    SoftargmaxLinear,
    SumOfSines,
    TwoLayerNet,
    lambda_sv,
    lemniscate_eval,
    lemniscate_grad,
    mu_s,
    separation_margin,
    sine_gram,
    softargmax,
    two_layer_nu0,
)
from .ntk import (
    NtkMatrix,
    VariationalReport,
    cosine_singular_bound,
    ntk_form,
    ntk_matrix,
    ntk_quotient,
    rayleigh,
    shattering_bound,
    tangent_apply,
    tangent_contraction,
    variational_check,
)
from .rng import SplitMix64
from .specfun import (
    SincTriple,
    first_zero_of_phi,
    harmonic,
    lambert_w0,
    lambert_w0_of_exp,
    sinc_triple,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
