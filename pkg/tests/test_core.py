import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from dsmooth import (
    DegenerateDomainError,
    IdentityOperator,
    L1BoxF,
    L1BoxG,
    MatrixOperator,
    ProblemSpec,
    dual_iteration_bound,
    gradient_iteration_bound,
    params_for,
    select_params_double,
    select_params_single,
)
from dsmooth.functions import SquaredDistance

DEBLUR = dict(epsilon=0.01, D_f=327.68, D_g=327.68, R=0.05, norm_sq_bound=1.0)


def mp_bounds(eps, L, kappa, delta0, R):
    mp.dps = 50
    eps, L, kappa, delta0, R = map(mpf, (eps, L, kappa, delta0, R))
    pre = 2 * mp.sqrt(L / kappa)
    dual = pre * mp.log(25 * (delta0 + eps / 2) / (2 * eps))
    grad = pre * mp.log(2 * R * mp.sqrt(L * (delta0 + eps / 2)) / ((2 - mp.sqrt(3)) * eps))
    return int(mp.ceil(dual)), int(mp.ceil(grad))


def test_select_params_double_deblur_scale_values():
    p = select_params_double(**DEBLUR)
    assert p.rho == 7.62939453125e-6 and p.mu == 7.62939453125e-6
    assert p.kappa == pytest.approx(2.0, rel=1e-14)
    assert p.L == pytest.approx(262146.0, rel=1e-14)
    assert p.L / p.kappa == pytest.approx(131073.0, rel=1e-12)
    # closed form 1 + 8R^2/eps^2 (||A||^2 D_f + D_g)
    assert p.L / p.kappa == pytest.approx(1 + 8 * 0.05**2 / 0.01**2 * (327.68 + 327.68), rel=1e-12)


def test_select_params_double_unit():
    p = select_params_double(1.0, 0.5, 0.5, 1.0, 1.0)
    assert (p.rho, p.mu, p.kappa, p.L) == (0.5, 0.5, 0.5, 4.5)


def test_four_term_budget():
    p = select_params_double(0.37, 2.5, 11.0, 0.3, 4.0)
    assert p.rho * 2.5 == pytest.approx(0.37 / 4, rel=1e-15)
    assert p.mu * 11.0 == pytest.approx(0.37 / 4, rel=1e-15)
    assert p.kappa * 0.3**2 / 2 == pytest.approx(0.37 / 4, rel=1e-15)


def test_select_params_single():
    p = select_params_single(0.3, 1.0, 1.0, 1.0)
    assert p.rho == pytest.approx(0.1) and p.mu == pytest.approx(0.1)
    assert p.L == pytest.approx(20.0)
    assert p.kappa == 0.0
    q = select_params_single(0.01, 327.68, 327.68, 1.0)
    assert q.rho == pytest.approx(1.0172526e-5, rel=1e-7)
    assert q.kappa == 0.0


@pytest.mark.parametrize("fn", [
    lambda Df, Dg: select_params_double(0.01, Df, Dg, 1.0, 1.0),
    lambda Df, Dg: select_params_single(0.01, Df, Dg, 1.0),
])
def test_degenerate_domain_rejected(fn):
    with pytest.raises(DegenerateDomainError, match="strongly convex"):
        fn(0.0, 1.0)
    with pytest.raises(DegenerateDomainError):
        fn(1.0, 0.0)


def test_bad_inputs():
    with pytest.raises(ValueError):
        select_params_double(0.0, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        select_params_double(0.1, 1, 1, 0.0, 1)
    with pytest.raises(ValueError):
        select_params_single(0.1, 1, 1, -1.0)


def test_strongly_convex_bypass():
    p = select_params_double(0.1, 1.0, math.inf, 1.0, 2.0, sigma_g=3.0)
    assert p.mu == 3.0 and not p.smooth_g and p.smooth_f
    assert p.L == pytest.approx(2.0 / p.rho + 1 / 3.0 + p.kappa)
    prob = ProblemSpec(L1BoxF(2, 0.1), SquaredDistance(np.zeros(2), 5.0), IdentityOperator(2))
    q = params_for(prob, 0.1, 1.0, "single")
    assert q.mu == 5.0 and not q.smooth_g


def test_dual_iteration_bound_deblur_scale():
    p = select_params_double(**DEBLUR)
    expected, _ = mp_bounds(0.01, p.L, p.kappa, 1.0, 0.05)
    assert expected == 5167
    assert dual_iteration_bound(0.01, p, 1.0) == 5167


def test_gradient_iteration_bound_deblur_scale():
    p = select_params_double(**DEBLUR)
    _, expected = mp_bounds(0.01, p.L, p.kappa, 1.0, 0.05)
    assert expected == 7140
    assert gradient_iteration_bound(0.01, p, 1.0, 0.05) == 7140
    assert gradient_iteration_bound(0.01, p, 1.0, 0.05) >= dual_iteration_bound(0.01, p, 1.0)


def test_bounds_clamp_at_zero():
    p = select_params_double(**DEBLUR)
    # log argument below 1 once delta0 < -0.0042
    assert dual_iteration_bound(0.01, p, -0.0045) == 0
    assert gradient_iteration_bound(0.01, p, -0.005, 0.05) == 0


def test_bounds_reject_kappa_zero():
    p = select_params_single(0.01, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        dual_iteration_bound(0.01, p, 1.0)
    with pytest.raises(ValueError):
        gradient_iteration_bound(0.01, p, 1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(e1=st.floats(1e-4, 1.0), e2=st.floats(1e-4, 1.0), d1=st.floats(0, 10), d2=st.floats(0, 10))
def test_bounds_monotone(e1, e2, d1, d2):
    (e_lo, e_hi), (d_lo, d_hi) = sorted((e1, e2)), sorted((d1, d2))

    def both(eps, d0):
        p = select_params_double(eps, 3.0, 2.0, 0.5, 1.5)
        return dual_iteration_bound(eps, p, d0), gradient_iteration_bound(eps, p, d0, 0.5)

    a, b = both(e_lo, d_lo), both(e_hi, d_lo)
    assert a[0] >= b[0] and a[1] >= b[1]
    c = both(e_lo, d_hi)
    assert c[0] >= a[0] and c[1] >= a[1]


def test_problem_dimension_check():
    with pytest.raises(ValueError, match="dimension"):
        ProblemSpec(L1BoxF(3, 0.1), L1BoxG(np.zeros(2)), MatrixOperator(np.ones((3, 3))))


def test_matrix_operator_norm_and_adjoint(rng):
    M = rng.normal(size=(4, 6))
    op = MatrixOperator(M)
    assert op.norm_sq_bound == pytest.approx(np.linalg.svd(M, compute_uv=False)[0] ** 2)
    for _ in range(100):
        x, y = rng.normal(size=6), rng.normal(size=4)
        assert abs(op.apply(x) @ y - x @ op.adjoint(y)) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)
        assert np.sum(op.apply(x) ** 2) <= op.norm_sq_bound * np.sum(x**2) * (1 + 1e-12)
