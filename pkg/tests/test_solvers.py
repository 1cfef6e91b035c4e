import math

import numpy as np
import pytest

from dsmooth import (
    IdentityOperator,
    L1BoxF,
    L1BoxG,
    MatrixOperator,
    ProblemSpec,
    SolverError,
    epsilon_sequence_run,
    eval_theta_exact,
    eval_theta_rho_mu,
    l1box_problem,
    params_for,
    random_instance,
    recover_primal,
    solve_double_smoothing,
    solve_single_smoothing,
    stopping_rule_grad_norm,
)
from dsmooth.core import SmoothingParams
from dsmooth.functions import BoxIndicator, SquaredDistance
from dsmooth.oracle import (
    double_decay_violations,
    grid_primal_opt,
    l1box_objective,
    reference_dual_opt,
)

OBJ_FACTOR = 2 * (1 + 2 * math.sqrt(3))


def test_single_first_step():
    problem, _ = random_instance(3, 3, seed=2, lam=0.05, box_hi=1.0)
    params = params_for(problem, 0.1, 1.0, "single")
    state, trace = solve_single_smoothing(problem, params, 1)
    g0 = eval_theta_rho_mu(problem, params, np.zeros(3)).gradient
    assert np.allclose(state.p, -g0 / params.L, atol=1e-15)
    assert len(trace) == 1


def test_single_zero_gradient_start_stays():
    problem = l1box_problem(MatrixOperator(np.eye(2)), np.zeros(2), 0.0)
    params = params_for(problem, 0.1, 1.0, "single")
    state, trace = solve_single_smoothing(problem, params, 10)
    assert np.array_equal(state.p, np.zeros(2))
    assert np.all(trace.column("grad_norm_smoothed") == 0.0)


def test_single_rate_on_quadratic():
    # theta_rho_mu of the quadratic g equals the kappa-smoothed dual of the doubled-modulus
    # quadratic with kappa = 1/(2 sigma); the double scheme gives the reference optimum
    sigma, c = 1.0, np.array([0.3, -0.4, 0.5])
    f = BoxIndicator(3, -1.0, 1.0)
    problem = ProblemSpec(f, SquaredDistance(c, sigma), IdentityOperator(3))
    params = params_for(problem, 0.05, math.inf, "single")
    twin = ProblemSpec(f, SquaredDistance(c, 2 * sigma), IdentityOperator(3))
    kappa = 1 / (2 * sigma)
    tp = SmoothingParams(params.epsilon, params.rho, 2 * sigma, kappa, 1.0,
                         1 / params.rho + 1 / (2 * sigma) + kappa, 1.0, smooth_g=False)
    p = np.array([0.2, 0.1, -0.3])
    assert eval_theta_rho_mu(problem, params, p).value == pytest.approx(
        eval_theta_rho_mu(twin, tp, p).value + kappa / 2 * p @ p, rel=1e-12)
    state, _, _ = solve_double_smoothing(twin, tp, 100000, lambda r: r.grad_norm_smoothed <= 1e-12)
    p_ref = state.p
    theta_ref = eval_theta_rho_mu(problem, params, p_ref).value
    first = []
    _, trace = solve_single_smoothing(problem, params, 300,
                                      callback=lambda s, r: first.append(s.p.copy()) if not first else None)
    k = trace.column("k")
    gap = trace.column("theta_smoothed") - theta_ref
    bound = 4 * params.L * np.sum((first[0] - p_ref) ** 2) / ((k + 1) * (k + 2))
    assert np.all(gap <= bound + 1e-12)


def test_double_decay_on_random_instances():
    for seed in range(4):
        problem, _ = random_instance(8, 8, seed=seed, lam=0.05, box_hi=1.0)
        params = params_for(problem, 0.05, 1.0, "double")
        _, trace, _ = solve_double_smoothing(problem, params, 600)
        _, theta_ref = reference_dual_opt(problem, params)
        assert double_decay_violations(trace, params, theta_ref) == (0, 0)


def test_momentum_is_used():
    problem, _ = random_instance(2, 2, seed=0, lam=0.05, box_hi=1.0)
    params = params_for(problem, 0.01, 1.0)
    states = []
    solve_double_smoothing(problem, params, 3, callback=lambda s, r: states.append((s.p.copy(), s.w.copy())))
    (p1, _), (p2, w2) = states[1], states[2]
    assert np.allclose(w2, p2 + params.momentum * (p2 - p1), rtol=0, atol=1e-15)


def test_deterministic():
    problem, _ = random_instance(6, 5, seed=3, lam=0.05, box_hi=1.0)
    params = params_for(problem, 0.02, 1.0)
    a = solve_double_smoothing(problem, params, 200)
    b = solve_double_smoothing(problem, params, 200)
    assert np.array_equal(a[0].p, b[0].p)
    assert a[1].rows == b[1].rows


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_certificate_bounds(seed, eps):
    problem, _ = random_instance(2, 2, seed=seed, lam=0.05, box_hi=1.0)
    params = params_for(problem, eps, 1.0)
    stop = stopping_rule_grad_norm(params)
    state, trace, cert = solve_double_smoothing(problem, params, 20000, stop)
    assert cert.converged and trace.stopped_at > 0
    assert cert.feasibility_gap <= 2 * eps / 1.0
    _, vP = grid_primal_opt(problem, 2e-3, objective=l1box_objective(problem.A.matrix, problem.g.b, 0.05, 1.0))
    slack = (0.05 * 2 + np.abs(problem.A.matrix).sum()) * 1e-3
    assert abs(cert.primal_value - vP) <= OBJ_FACTOR * eps + slack
    assert cert.dual_value <= vP + slack
    x_rho, x_mu, again = recover_primal(state, problem, params)
    assert again.feasibility_gap == cert.feasibility_gap
    assert cert.iterations == trace.stopped_at == state.k


def test_trace_is_consistent():
    problem, _ = random_instance(4, 4, seed=1, lam=0.05, box_hi=1.0)
    params = params_for(problem, 0.05, 1.0)
    _, trace, cert = solve_double_smoothing(problem, params, 50)
    r = trace.rows[-1]
    assert r.feasibility_gap == r.grad_norm_unaugmented == pytest.approx(cert.feasibility_gap, rel=1e-12)
    assert r.dual_value == pytest.approx(cert.dual_value)
    assert np.all(trace.column("dual_value") <= trace.column("F_k") + 1e-12)
    assert len(trace) == 51 and not cert.converged


def test_max_iters_from_delta0():
    problem, _ = random_instance(2, 2, seed=0, lam=0.05, box_hi=1.0)
    params = params_for(problem, 0.1, 1.0)
    with pytest.raises(ValueError):
        solve_double_smoothing(problem, params)
    _, trace, cert = solve_double_smoothing(problem, params, stop=stopping_rule_grad_norm(params), delta0=1.0)
    assert cert.converged


def test_epsilon_sequence():
    problem, _ = random_instance(2, 2, seed=2, lam=0.05, box_hi=1.0)
    certs = epsilon_sequence_run(problem, [0.1, 0.05, 0.01], 1.0, max_iters=20000)
    assert [c.epsilon for c in certs] == [0.1, 0.05, 0.01]
    for c in certs:
        assert c.converged and c.feasibility_gap <= c.threshold
    with pytest.raises(ValueError):
        epsilon_sequence_run(problem, [0.1, 0.1], 1.0, max_iters=10)


def test_epsilon_sequence_records_failures():
    problem, _ = random_instance(2, 2, seed=2, lam=0.05, box_hi=1.0)
    certs = epsilon_sequence_run(problem, [0.1, 0.001], 1.0, max_iters=3)
    assert not certs[1].converged and "did not fire" in certs[1].message
    bad = ProblemSpec(L1BoxF(2, 0.1, box_hi=1e-300), L1BoxG(np.zeros(2), box_hi=1e-300), IdentityOperator(2))
    certs = epsilon_sequence_run(bad, [0.1], 1.0, max_iters=3)
    assert math.isnan(certs[0].primal_value) and certs[0].message


def test_nonfinite_raises():
    class Blowup(L1BoxF):
        def prox(self, c, t):
            return np.full_like(c, np.nan)

    problem = ProblemSpec(Blowup(2, 0.1), L1BoxG(np.zeros(2)), IdentityOperator(2))
    params = params_for(problem, 0.01, 0.05)
    with pytest.raises(SolverError, match="non-finite"):
        solve_double_smoothing(problem, params, 5)


def test_single_needs_no_conjugate_and_double_rejects_kappa0():
    problem, _ = random_instance(2, 2, seed=0, lam=0.05, box_hi=1.0)
    with pytest.raises(ValueError):
        solve_double_smoothing(problem, params_for(problem, 0.1, 1.0, "single"), 5)
