"""Brute-force references for tests: grid search, finite differences, reference dual optimum."""
from __future__ import annotations

import math

import numpy as np

from .core import ProblemSpec, SmoothingParams
from .smoothing import eval_theta_rho_mu_kappa

MAX_GRID_DIM = 3


def _grid_axis(problem, resolution, bounds):
    if bounds is None:
        bounds = getattr(problem.f, "bounds", None)
        if bounds is None:
            raise ValueError("f exposes no box bounds; pass bounds=(lo, hi)")
    lo, hi = bounds
    k = int(round((hi - lo) / resolution))
    return np.linspace(lo, hi, k + 1)


def l1box_objective(A, b, lam, hi, tol=1e-12):
    """Vectorized ``lam ||x||_1 + ||Ax - b||_1`` with both box constraints, written out directly."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)

    def obj(X):
        Y = X @ A.T
        v = lam * np.abs(X).sum(axis=1) + np.abs(Y - b).sum(axis=1)
        bad = (X < -tol).any(1) | (X > hi + tol).any(1) | (Y < -tol).any(1) | (Y > hi + tol).any(1)
        return np.where(bad, np.inf, v)

    return obj


def grid_primal_opt(problem: ProblemSpec, resolution: float = 2e-4, bounds=None, objective=None,
                    chunk: int = 200_000):
    """Exhaustive grid minimization of ``f(x) + g(Ax)`` over the box of ``f``.

    Returns ``(x_best, v_best)``. ``objective`` maps an ``(N, n)`` block of
    points to values; by default each point goes through the oracles'
    ``value`` and the operator. Ties resolve to the first point in C order.
    """
    n = problem.f.dimension
    if n > MAX_GRID_DIM:
        raise ValueError(f"grid search supports n <= {MAX_GRID_DIM}, got n={n}")
    axis = _grid_axis(problem, resolution, bounds)
    if objective is None:
        def objective(block):
            return np.array([problem.f.value(x) + problem.g.value(problem.A.apply(x)) for x in block])
    best_v, best_x = math.inf, None
    step = max(1, chunk // max(1, axis.size ** (n - 1)))
    for start in range(0, axis.size, step):
        head = axis[start:start + step]
        mesh = np.meshgrid(head, *([axis] * (n - 1)), indexing="ij")
        block = np.stack([g.ravel() for g in mesh], axis=1)
        vals = objective(block)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_v, best_x = float(vals[i]), block[i].copy()
    return best_x, best_v


def finite_diff_gradient(fun, p, step=None) -> np.ndarray:
    """Central differences per coordinate; default step ``1e-6 (1 + ||p||)``."""
    p = np.asarray(p, dtype=float)
    h = 1e-6 * (1.0 + np.linalg.norm(p)) if step is None else float(step)
    g = np.empty_like(p)
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        g[i] = (fun(p + e) - fun(p - e)) / (2.0 * h)
    return g


class ReferenceNotConverged(RuntimeError):
    pass


def reference_dual_opt(problem: ProblemSpec, params: SmoothingParams, tol: float = 1e-12,
                       max_iters: int = 1_000_000, start=None):
    """Minimize ``theta_rho_mu_kappa`` to gradient norm ``tol``.

    Runs the constant-momentum accelerated scheme from ``start`` (default 0).
    Returns ``(p_ref, theta_ref)``.
    """
    if not params.kappa > 0:
        raise ValueError("reference optimum needs kappa > 0")
    m = problem.A.shape[0]
    p = np.zeros(m) if start is None else np.array(start, dtype=float)
    w = p.copy()
    L, beta = params.L, params.momentum
    best_p, best_val, best_gn = p, math.inf, math.inf
    for _ in range(max_iters + 1):
        ev = eval_theta_rho_mu_kappa(problem, params, w)
        ev_p = eval_theta_rho_mu_kappa(problem, params, p)
        gn = float(np.linalg.norm(ev_p.gradient))
        if ev_p.value < best_val:
            best_p, best_val, best_gn = p, ev_p.value, gn
        if gn <= tol:
            return p, ev_p.value
        p_new = w - ev.gradient / L
        w = p_new + beta * (p_new - p)
        p = p_new
    raise ReferenceNotConverged(
        f"gradient norm {best_gn:.3e} > {tol:.1e} after {max_iters} iterations (best value {best_val!r})"
    )


def reference_single_opt(problem: ProblemSpec, params: SmoothingParams, gtol: float = 1e-14):
    """Minimize ``theta_rho_mu`` (no ``kappa``) with L-BFGS; returns ``(p_ref, theta_ref)``.

    ``theta_rho_mu`` need not be strongly convex, so ``p_ref`` is one
    minimizer among possibly many.
    """
    from scipy.optimize import minimize

    from .smoothing import eval_theta_rho_mu

    def fun(p):
        ev = eval_theta_rho_mu(problem, params, p)
        return ev.value, ev.gradient

    m = problem.A.shape[0]
    res = minimize(fun, np.zeros(m), jac=True, method="L-BFGS-B",
                   options=dict(gtol=gtol, ftol=1e-16, maxiter=100_000, maxcor=30))
    return res.x, float(res.fun)


def double_decay_violations(trace, params: SmoothingParams, theta_ref: float, slack: float = 1e-10):
    """Count rows breaking the geometric decay bounds on objective gap and gradient norm."""
    k = trace.column("k")
    th = trace.column("theta_smoothed")
    gn = trace.column("grad_norm_smoothed")
    decay = np.exp(-k * math.sqrt(params.kappa / params.L))
    gap0 = th[0] - theta_ref
    obj = int(np.sum(th - theta_ref > 2.0 * gap0 * decay + slack))
    grad = int(np.sum(gn ** 2 > 4.0 * params.L * gap0 * decay + slack))
    return obj, grad


def single_decay_violations(trace, params: SmoothingParams, p0, p_ref, theta_ref: float,
                            slack: float = 1e-10):
    """Count rows breaking ``theta(p_k) - theta* <= 4 L ||p_0 - p*||^2 / ((k+1)(k+2))``."""
    k = trace.column("k")
    th = trace.column("theta_smoothed")
    d2 = float(np.sum((np.asarray(p0) - np.asarray(p_ref)) ** 2))
    bound = 4.0 * params.L * d2 / ((k + 1.0) * (k + 2.0))
    return int(np.sum(th - theta_ref > bound + slack))
