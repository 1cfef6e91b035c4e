"""Problem abstraction, smoothing-parameter selection and iteration bounds.

The problem class is ``min_x f(x) + g(Ax)`` with ``f``, ``g`` proper convex
lsc functions with bounded domains, each exposed as a :class:`ProxOracle`.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np


class DegenerateDomainError(ValueError):
    """A domain radius of zero was supplied to a parameter selector."""


class UnsupportedConjugateError(NotImplementedError):
    """The oracle cannot evaluate its Fenchel conjugate."""


class ProxOracle(ABC):
    """A convex function given through value, proximal map and (optionally) conjugate.

    Subclasses set ``dimension`` and ``domain_radius`` (``sup ||x||^2/2`` over
    the domain). A subclass that is strongly convex sets ``strong_convexity``
    and implements :meth:`conjugate_argmax`; parameter selection then skips
    smoothing for it.
    """

    dimension: int
    domain_radius: float
    strong_convexity: float | None = None

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        """Function value, ``inf`` outside the domain."""

    @abstractmethod
    def prox(self, c: np.ndarray, t: float) -> np.ndarray:
        """Minimizer of ``f(y) + ||c - y||^2 / (2t)``."""

    def conjugate(self, q: np.ndarray) -> float:
        raise UnsupportedConjugateError(f"{type(self).__name__} has no conjugate")

    def conjugate_argmax(self, q: np.ndarray) -> np.ndarray:
        """Maximizer of ``<q, x> - f(x)``; only needed by strongly convex oracles."""
        raise NotImplementedError(f"{type(self).__name__} has no conjugate maximizer")

    @property
    def has_conjugate(self) -> bool:
        return type(self).conjugate is not ProxOracle.conjugate


class LinearOperator(ABC):
    """Linear map ``R^n -> R^m`` with adjoint and a bound on ``||A||^2``."""

    shape: tuple[int, int]  # (m, n)
    norm_sq_bound: float

    @abstractmethod
    def apply(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def adjoint(self, y: np.ndarray) -> np.ndarray: ...


class MatrixOperator(LinearOperator):
    """Dense matrix operator. ``norm_sq_bound`` defaults to the exact squared spectral norm."""

    def __init__(self, matrix, norm_sq_bound: float | None = None):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        self.shape = self.matrix.shape
        if norm_sq_bound is None:
            norm_sq_bound = float(np.linalg.norm(self.matrix, 2) ** 2)
        self.norm_sq_bound = float(norm_sq_bound)

    def apply(self, x):
        return self.matrix @ x

    def adjoint(self, y):
        return self.matrix.T @ y


class IdentityOperator(LinearOperator):
    def __init__(self, n: int):
        self.shape = (n, n)
        self.norm_sq_bound = 1.0

    def apply(self, x):
        return np.array(x, dtype=float, copy=True)

    def adjoint(self, y):
        return np.array(y, dtype=float, copy=True)


@dataclass(frozen=True)
class ProblemSpec:
    f: ProxOracle
    g: ProxOracle
    A: LinearOperator

    def __post_init__(self):
        m, n = self.A.shape
        if self.f.dimension != n or self.g.dimension != m:
            raise ValueError(
                f"dimension mismatch: f is {self.f.dimension}-dim, g is {self.g.dimension}-dim, "
                f"A maps {n} -> {m}"
            )


@dataclass(frozen=True)
class SmoothingParams:
    """Full regularization configuration.

    ``smooth_f``/``smooth_g`` are False when the corresponding function is
    strongly convex; ``rho``/``mu`` then hold its modulus and only enter the
    Lipschitz constant.
    """

    epsilon: float
    rho: float
    mu: float
    kappa: float
    R: float
    L: float
    norm_sq: float = 1.0
    smooth_f: bool = True
    smooth_g: bool = True

    @property
    def momentum(self) -> float:
        sl, sk = math.sqrt(self.L), math.sqrt(self.kappa)
        return (sl - sk) / (sl + sk)


@dataclass
class Certificate:
    primal_value: float
    dual_value: float
    feasibility_gap: float
    grad_norm_smoothed: float
    iterations: int
    epsilon: float = math.nan
    threshold: float = math.nan
    converged: bool = False
    message: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "primal_value", "dual_value", "feasibility_gap", "grad_norm_smoothed",
            "iterations", "epsilon", "threshold", "converged", "message")}
        d.update(self.extra)
        return d


def _check_common(epsilon, norm_sq_bound):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not norm_sq_bound > 0:
        raise ValueError(f"norm_sq_bound must be positive, got {norm_sq_bound}")


def _smoothing_parameter(epsilon, D, share, sigma, name):
    if sigma is not None:
        if not sigma > 0:
            raise ValueError(f"strong convexity modulus for {name} must be positive")
        return float(sigma), False
    if D == 0:
        raise DegenerateDomainError(
            f"D_{name} = 0: the domain of {name} is a single point. Such a function is "
            f"strongly convex; pass its modulus (sigma_{name}) to skip smoothing it."
        )
    if not D > 0 or not math.isfinite(D):
        raise ValueError(f"D_{name} must be finite and positive, got {D}")
    return epsilon / (share * D), True


def select_params_double(epsilon, D_f, D_g, R, norm_sq_bound, *, sigma_f=None, sigma_g=None):
    """Parameters for the doubly smoothed dual: each of the four error terms gets ``epsilon/4``."""
    _check_common(epsilon, norm_sq_bound)
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    rho, sf = _smoothing_parameter(epsilon, D_f, 4.0, sigma_f, "f")
    mu, sg = _smoothing_parameter(epsilon, D_g, 4.0, sigma_g, "g")
    kappa = epsilon / (2.0 * R * R)
    L = norm_sq_bound / rho + 1.0 / mu + kappa
    return SmoothingParams(epsilon, rho, mu, kappa, float(R), L, float(norm_sq_bound), sf, sg)


def select_params_single(epsilon, D_f, D_g, norm_sq_bound, *, R=math.inf, sigma_f=None, sigma_g=None):
    """Parameters for the singly smoothed dual (three ``epsilon/3`` terms, no ``kappa``)."""
    _check_common(epsilon, norm_sq_bound)
    rho, sf = _smoothing_parameter(epsilon, D_f, 3.0, sigma_f, "f")
    mu, sg = _smoothing_parameter(epsilon, D_g, 3.0, sigma_g, "g")
    L = norm_sq_bound / rho + 1.0 / mu
    return SmoothingParams(epsilon, rho, mu, 0.0, float(R), L, float(norm_sq_bound), sf, sg)


def params_for(problem: ProblemSpec, epsilon, R=math.inf, scheme="double"):
    """Select parameters from the oracles' own domain radii and strong-convexity flags."""
    kw = dict(sigma_f=problem.f.strong_convexity, sigma_g=problem.g.strong_convexity)
    D_f, D_g = problem.f.domain_radius, problem.g.domain_radius
    if scheme == "double":
        return select_params_double(epsilon, D_f, D_g, R, problem.A.norm_sq_bound, **kw)
    if scheme == "single":
        return select_params_single(epsilon, D_f, D_g, problem.A.norm_sq_bound, R=R, **kw)
    raise ValueError(f"unknown scheme {scheme!r}")


def _require_kappa(params):
    if not params.kappa > 0:
        raise ValueError("iteration bounds need kappa > 0 (doubly smoothed scheme)")


def _ceil_log_bound(prefactor, arg):
    if arg <= 1.0:
        return 0
    return max(0, math.ceil(prefactor * math.log(arg)))


def dual_iteration_bound(epsilon, params: SmoothingParams, delta0) -> int:
    """Iterations after which ``theta(p_k) + v(D) <= epsilon`` is guaranteed.

    ``delta0`` is an upper bound on ``theta(0) - theta(p*)``.
    """
    _require_kappa(params)
    arg = 25.0 * (delta0 + epsilon / 2.0) / (2.0 * epsilon)
    return _ceil_log_bound(2.0 * math.sqrt(params.L / params.kappa), arg)


def gradient_iteration_bound(epsilon, params: SmoothingParams, delta0, R) -> int:
    """Iterations after which ``||grad theta_rho_mu(p_k)|| <= 2 epsilon / R`` is guaranteed."""
    _require_kappa(params)
    rad = params.L * (delta0 + epsilon / 2.0)
    if rad <= 0:
        return 0
    arg = 2.0 * R * math.sqrt(rad) / ((2.0 - math.sqrt(3.0)) * epsilon)
    return _ceil_log_bound(2.0 * math.sqrt(params.L / params.kappa), arg)
