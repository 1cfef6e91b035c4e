"""Closed-form oracles for the box-constrained l1 deblurring problem.

``f(x) = lam * ||x||_1 + indicator(x in [0, hi]^n)`` and
``g(y) = ||y - b||_1 + indicator(y in [0, hi]^m)``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import _kernels
from .core import ProxOracle

DEFAULT_BOX_HI = 0.1


def box_radius(dim, hi):
    """``dim * hi^2 / 2`` evaluated on the decimal value of ``hi`` and rounded once."""
    return float(Fraction(repr(float(hi))) ** 2 * int(dim) / 2)


def _in_box(x, lo, hi, tol):
    return bool(np.all(x >= lo - tol) and np.all(x <= hi + tol))


class L1BoxF(ProxOracle):
    """Weighted l1 norm restricted to the box ``[0, box_hi]^n``.

    ``tol`` widens the membership test in :meth:`value` so that points pushed
    a few ulps outside by a linear operator still evaluate finitely.
    """

    def __init__(self, n: int, lam: float, box_hi: float = DEFAULT_BOX_HI, tol: float = 1e-9):
        if lam < 0:
            raise ValueError("lam must be nonnegative")
        if box_hi <= 0:
            raise ValueError("box_hi must be positive")
        self.dimension = int(n)
        self.lam = float(lam)
        self.box_hi = float(box_hi)
        self.tol = tol
        self.domain_radius = box_radius(self.dimension, self.box_hi)

    @property
    def bounds(self):
        return 0.0, self.box_hi

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if not _in_box(x, 0.0, self.box_hi, self.tol):
            return np.inf
        return self.lam * float(np.abs(x).sum())

    def prox(self, c, t):
        # on [0, hi] the l1 term is linear, so the prox is a shifted projection
        return _kernels.prox_l1_box(np.asarray(c, dtype=float), t, self.lam, 0.0, self.box_hi)

    def conjugate(self, q):
        return _kernels.conj_l1_box(np.asarray(q, dtype=float), self.lam, self.box_hi)


class L1BoxG(ProxOracle):
    """Absolute deviation from ``b`` restricted to the box ``[0, box_hi]^m``."""

    def __init__(self, b, box_hi: float = DEFAULT_BOX_HI, tol: float = 1e-9):
        b = np.asarray(b, dtype=float).ravel()
        if box_hi <= 0:
            raise ValueError("box_hi must be positive")
        if np.any(b < 0) or np.any(b > box_hi):
            raise ValueError("b must lie in the box [0, box_hi]")
        self.b = b
        self.dimension = b.size
        self.box_hi = float(box_hi)
        self.tol = tol
        self.domain_radius = box_radius(self.dimension, self.box_hi)

    @property
    def bounds(self):
        return 0.0, self.box_hi

    def value(self, y):
        y = np.asarray(y, dtype=float)
        if not _in_box(y, 0.0, self.box_hi, self.tol):
            return np.inf
        return float(np.abs(y - self.b).sum())

    def prox(self, c, t):
        return _kernels.prox_absdev_box(np.asarray(c, dtype=float), t, self.b, 0.0, self.box_hi)

    def conjugate(self, q):
        # piecewise linear concave in each coordinate: the sup sits at 0, b_i or hi
        return _kernels.conj_absdev_box(np.asarray(q, dtype=float), self.b, 0.0, self.box_hi)


def l1box_problem(A, b, lam, box_hi=DEFAULT_BOX_HI):
    """Assemble the deblurring problem for operator ``A`` and observation ``b``."""
    from .core import ProblemSpec

    m, n = A.shape
    return ProblemSpec(L1BoxF(n, lam, box_hi), L1BoxG(np.asarray(b).ravel(), box_hi), A)


def random_instance(n, m, seed=0, lam=1e-3, box_hi=DEFAULT_BOX_HI, noise=0.0):
    """Random small deblurring-type problem with a well-conditioned nonnegative operator.

    Rows of ``A`` are convex combinations (so ``A`` maps the box into itself)
    with weight 0.6 on a "diagonal" entry, which keeps the square case
    invertible. ``b = A x_true`` for ``x_true`` inside the box, plus optional
    noise clipped back into the box. Returns ``(problem, x_true)``.
    """
    from .core import MatrixOperator

    rng = np.random.default_rng(seed)
    P = rng.random((m, n))
    P /= P.sum(axis=1, keepdims=True)
    A = 0.4 * P
    A[np.arange(m), np.arange(m) % n] += 0.6
    x_true = rng.uniform(0.2 * box_hi, 0.8 * box_hi, n)
    b = A @ x_true
    if noise:
        b = b + rng.normal(0.0, noise, m)
    b = np.clip(b, 0.0, box_hi)
    return l1box_problem(MatrixOperator(A), b, lam, box_hi), x_true
