"""Double smoothing of the Fenchel dual for ``min f(x) + g(Ax)``."""
from ._kernels import BACKEND
from .blur import BlurOperator, GaussianKernel, estimate_norm_sq, make_kernel
from .core import (
    Certificate,
    DegenerateDomainError,
    IdentityOperator,
    LinearOperator,
    MatrixOperator,
    ProblemSpec,
    ProxOracle,
    SmoothingParams,
    UnsupportedConjugateError,
    dual_iteration_bound,
    gradient_iteration_bound,
    params_for,
    select_params_double,
    select_params_single,
)
from .functions import BoxIndicator, SquaredDistance
from .l1box import L1BoxF, L1BoxG, l1box_problem, random_instance
from .smoothing import (
    SmoothedEval,
    eval_theta_exact,
    eval_theta_rho_mu,
    eval_theta_rho_mu_kappa,
    lipschitz_constant,
)
from .solvers import (
    DualState,
    GradNormRule,
    SolverError,
    SolverTrace,
    TraceRow,
    epsilon_sequence_run,
    recover_primal,
    solve_double_smoothing,
    solve_single_smoothing,
    stopping_rule_grad_norm,
)

__version__ = "0.1.0"
