"""Fast gradient methods on the smoothed duals, stopping logic and primal recovery."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .core import Certificate, ProblemSpec, SmoothingParams, gradient_iteration_bound, params_for
from .smoothing import SmoothedEval, eval_theta_exact, eval_theta_rho_mu, eval_theta_rho_mu_kappa

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Raised when an objective or gradient evaluation turns non-finite."""


@dataclass
class DualState:
    k: int
    p: np.ndarray
    w: np.ndarray
    accum_grad: np.ndarray | None = None
    x_rho: np.ndarray | None = None
    x_mu: np.ndarray | None = None


@dataclass(frozen=True)
class TraceRow:
    k: int
    F_k: float
    dual_value: float
    theta_smoothed: float
    grad_norm_smoothed: float
    grad_norm_unaugmented: float
    feasibility_gap: float
    pair_value: float  # f(x_rho) + g(x_mu); kept in memory only


TRACE_COLUMNS = tuple(f.name for f in fields(TraceRow) if f.name != "pair_value")


@dataclass
class SolverTrace:
    rows: list[TraceRow] = field(default_factory=list)
    stopped_at: int | None = None

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


class GradNormRule:
    """Fires once ``||grad theta_rho_mu(p_k)|| <= threshold``."""

    def __init__(self, threshold: float):
        self.threshold = float(threshold)

    def __call__(self, row: TraceRow) -> bool:
        return row.grad_norm_unaugmented <= self.threshold

    def __repr__(self):
        return f"GradNormRule(threshold={self.threshold!r})"


def stopping_rule_grad_norm(params: SmoothingParams) -> GradNormRule:
    if not (params.R > 0 and params.epsilon > 0):
        raise ValueError("need R > 0 and epsilon > 0")
    return GradNormRule(2.0 * params.epsilon / params.R)


def _check_finite(ev: SmoothedEval, k: int, where: str):
    if not math.isfinite(ev.value) or not np.all(np.isfinite(ev.gradient)):
        raise SolverError(
            f"non-finite smoothed objective at {where} (k={k}, value={ev.value}); "
            "an oracle returned a point outside its domain or overflowed"
        )


def _exact_dual(problem, p, Atp):
    if problem.f.has_conjugate and problem.g.has_conjugate:
        return -eval_theta_exact(problem, p, Atp)
    return math.nan


def _row(problem, params, k, p, ev_aug: SmoothedEval, grad_un, record_dual) -> TraceRow:
    f, g = problem.f, problem.g
    fx = f.value(ev_aug.x_rho)
    gap = float(np.linalg.norm(grad_un))
    return TraceRow(
        k=k,
        F_k=fx + g.value(ev_aug.Ax_rho),
        dual_value=_exact_dual(problem, p, ev_aug.Atp) if record_dual else math.nan,
        theta_smoothed=ev_aug.value,
        grad_norm_smoothed=float(np.linalg.norm(ev_aug.gradient)),
        grad_norm_unaugmented=gap,
        feasibility_gap=gap,
        pair_value=fx + g.value(ev_aug.x_mu),
    )


def _resolve_max_iters(max_iters, delta0, params):
    if max_iters is not None:
        if max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        return int(max_iters)
    if delta0 is None:
        raise ValueError("give max_iters, or delta0 to derive it from the iteration bound")
    return max(1, 4 * gradient_iteration_bound(params.epsilon, params, delta0, params.R))


def solve_single_smoothing(problem: ProblemSpec, params: SmoothingParams, max_iters: int,
                           stop=None, *, callback=None, record_dual=True):
    """Accelerated scheme on ``theta_rho_mu`` with a weighted gradient-sum model.

    Both argmin subproblems are unconstrained quadratics and are taken in closed form.
    Trace row ``k`` describes the gradient-step point ``p_k``.
    """
    L = params.L
    m = problem.A.shape[0]
    w0 = np.zeros(m)
    w = w0.copy()
    acc = np.zeros(m)
    trace = SolverTrace()
    state = DualState(0, w0.copy(), w0.copy(), acc)
    for k in range(_resolve_max_iters(max_iters, None, params)):
        ev_w = eval_theta_rho_mu(problem, params, w)
        _check_finite(ev_w, k, "w_k")
        p = w - ev_w.gradient / L
        acc = acc + 0.5 * (k + 1) * ev_w.gradient
        z = w0 - acc / (2.0 * L)
        ev_p = eval_theta_rho_mu(problem, params, p)
        _check_finite(ev_p, k, "p_k")
        row = _row(problem, params, k, p, ev_p, ev_p.gradient, record_dual)
        trace.rows.append(row)
        state = DualState(k, p, w, acc, ev_p.x_rho, ev_p.x_mu)
        if callback is not None:
            callback(state, row)
        if stop is not None and stop(row):
            trace.stopped_at = k
            break
        w = (2.0 / (k + 3)) * z + ((k + 1) / (k + 3)) * p
    return state, trace


def solve_double_smoothing(problem: ProblemSpec, params: SmoothingParams, max_iters: int | None = None,
                           stop=None, *, delta0=None, callback=None, record_dual=True):
    """Constant-momentum fast gradient method on the strongly convex ``theta_rho_mu_kappa``.

    Starts from ``w_0 = p_0 = 0``. Row ``k`` of the trace describes ``p_k``;
    ``max_iters`` counts gradient steps, so the trace has up to
    ``max_iters + 1`` rows.
    """
    if not params.kappa > 0:
        raise ValueError("double smoothing needs kappa > 0")
    n_iter = _resolve_max_iters(max_iters, delta0, params)
    L, beta, kappa = params.L, params.momentum, params.kappa
    m = problem.A.shape[0]
    p = np.zeros(m)
    w = p.copy()
    trace = SolverTrace()

    def observe(k, p):
        ev = eval_theta_rho_mu_kappa(problem, params, p)
        _check_finite(ev, k, "p_k")
        row = _row(problem, params, k, p, ev, ev.gradient - kappa * p, record_dual)
        trace.rows.append(row)
        return ev, row

    ev_w, row = observe(0, p)
    state = DualState(0, p, w, None, ev_w.x_rho, ev_w.x_mu)
    if callback is not None:
        callback(state, row)
    if stop is not None and stop(row):
        trace.stopped_at = 0
    else:
        for k in range(n_iter):
            p_new = w - ev_w.gradient / L
            w = p_new + beta * (p_new - p)
            p = p_new
            ev_p, row = observe(k + 1, p)
            state = DualState(k + 1, p, w, None, ev_p.x_rho, ev_p.x_mu)
            if callback is not None:
                callback(state, row)
            if stop is not None and stop(row):
                trace.stopped_at = k + 1
                break
            ev_w = eval_theta_rho_mu_kappa(problem, params, w)
            _check_finite(ev_w, k + 1, "w_k")
    cert = recover_primal(state, problem, params)[2]
    cert.converged = trace.stopped_at is not None
    if stop is not None:
        cert.threshold = getattr(stop, "threshold", math.nan)
    return state, trace, cert


def recover_primal(state: DualState, problem: ProblemSpec, params: SmoothingParams):
    """Primal pair ``(x_rho, x_mu)`` at ``state.p`` with its certificate."""
    ev = eval_theta_rho_mu_kappa(problem, params, state.p)
    x_rho, x_mu = ev.x_rho, ev.x_mu
    gap = float(np.linalg.norm(problem.A.apply(x_rho) - x_mu))
    cert = Certificate(
        primal_value=problem.f.value(x_rho) + problem.g.value(x_mu),
        dual_value=_exact_dual(problem, state.p, ev.Atp),
        feasibility_gap=gap,
        grad_norm_smoothed=float(np.linalg.norm(ev.gradient)),
        iterations=state.k,
        epsilon=params.epsilon,
    )
    return x_rho, x_mu, cert


def epsilon_sequence_run(problem: ProblemSpec, epsilons, R, delta0=None, *, max_iters=None):
    """Solve once per accuracy in a strictly decreasing sequence.

    Each run stops on the gradient-norm rule. A failing run yields a
    certificate with ``converged=False`` and the error in ``message``
    instead of aborting the sequence.
    """
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be positive and strictly decreasing")
    out = []
    for e in eps:
        try:
            params = params_for(problem, e, R, "double")
            stop = stopping_rule_grad_norm(params)
            _, trace, cert = solve_double_smoothing(problem, params, max_iters, stop, delta0=delta0)
            if not cert.converged:
                cert.message = f"stopping rule did not fire within {len(trace) - 1} iterations"
        except Exception as exc:  # recorded, not fatal
            log.warning("epsilon=%g failed: %s", e, exc)
            cert = Certificate(math.nan, math.nan, math.nan, math.nan, 0, epsilon=e,
                               threshold=2.0 * e / R, message=f"{type(exc).__name__}: {exc}")
        out.append(cert)
    return out
