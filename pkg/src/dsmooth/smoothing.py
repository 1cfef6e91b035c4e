"""Smoothed Fenchel dual objectives and their gradients.

For ``theta(p) = f*(A* p) + g*(-p)`` the first smoothing subtracts
``rho/2 ||x||^2`` (resp. ``mu/2 ||y||^2``) inside each conjugate supremum.
The maximizers are proximal points, and the gradient is
``A x_rho - x_mu``. We take the gradient of ``p -> g*_mu(-p)`` to be
``-x_mu``, with the chain-rule sign folded in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProblemSpec, SmoothingParams


@dataclass(frozen=True)
class SmoothedEval:
    value: float
    gradient: np.ndarray
    x_rho: np.ndarray
    x_mu: np.ndarray
    Ax_rho: np.ndarray
    Atp: np.ndarray

    @property
    def feasibility_gap(self) -> float:
        return float(np.linalg.norm(self.Ax_rho - self.x_mu))


def _f_part(problem, params, Atp):
    f = problem.f
    if params.smooth_f:
        x = f.prox(Atp / params.rho, 1.0 / params.rho)
        return x, float(Atp @ x) - f.value(x) - 0.5 * params.rho * float(x @ x)
    x = f.conjugate_argmax(Atp)
    return x, float(Atp @ x) - f.value(x)


def _g_part(problem, params, p):
    g = problem.g
    if params.smooth_g:
        y = g.prox(-p / params.mu, 1.0 / params.mu)
        return y, -float(p @ y) - g.value(y) - 0.5 * params.mu * float(y @ y)
    y = g.conjugate_argmax(-p)
    return y, -float(p @ y) - g.value(y)


def eval_theta_rho_mu(problem: ProblemSpec, params: SmoothingParams, p) -> SmoothedEval:
    p = np.asarray(p, dtype=float)
    Atp = problem.A.adjoint(p)
    x_rho, vf = _f_part(problem, params, Atp)
    x_mu, vg = _g_part(problem, params, p)
    Ax = problem.A.apply(x_rho)
    return SmoothedEval(vf + vg, Ax - x_mu, x_rho, x_mu, Ax, Atp)


def eval_theta_rho_mu_kappa(problem: ProblemSpec, params: SmoothingParams, p) -> SmoothedEval:
    p = np.asarray(p, dtype=float)
    ev = eval_theta_rho_mu(problem, params, p)
    if params.kappa == 0.0:
        return ev
    return SmoothedEval(
        ev.value + 0.5 * params.kappa * float(p @ p),
        ev.gradient + params.kappa * p,
        ev.x_rho, ev.x_mu, ev.Ax_rho, ev.Atp,
    )


def eval_theta_exact(problem: ProblemSpec, p, Atp=None) -> float:
    """``f*(A* p) + g*(-p)``; raises :class:`UnsupportedConjugateError` if unavailable."""
    p = np.asarray(p, dtype=float)
    if Atp is None:
        Atp = problem.A.adjoint(p)
    return problem.f.conjugate(Atp) + problem.g.conjugate(-p)


def lipschitz_constant(params: SmoothingParams, which: str = "double") -> float:
    L = params.norm_sq / params.rho + 1.0 / params.mu
    if which == "double":
        return L + params.kappa
    if which == "single":
        return L
    raise ValueError(f"which must be 'single' or 'double', got {which!r}")
