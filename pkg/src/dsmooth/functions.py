"""Small generic oracles: box indicator and scaled squared distance."""
from __future__ import annotations

import math

import numpy as np

from .core import ProxOracle


class BoxIndicator(ProxOracle):
    """Indicator of ``[lo, hi]^n``; its prox is the clamp."""

    def __init__(self, n, lo=-1.0, hi=1.0):
        if not lo <= hi:
            raise ValueError("need lo <= hi")
        self.dimension = int(n)
        self.lo, self.hi = float(lo), float(hi)
        self.domain_radius = self.dimension * max(lo * lo, hi * hi) / 2.0

    @property
    def bounds(self):
        return self.lo, self.hi

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if np.all(x >= self.lo) and np.all(x <= self.hi) else math.inf

    def prox(self, c, t):
        return np.clip(np.asarray(c, dtype=float), self.lo, self.hi)

    def conjugate(self, q):
        q = np.asarray(q, dtype=float)
        return float(np.maximum(q * self.lo, q * self.hi).sum())


class SquaredDistance(ProxOracle):
    """``(sigma/2) ||x - center||^2``, strongly convex with modulus ``sigma``.

    The domain is unbounded, so ``domain_radius`` is ``inf``; parameter
    selection uses ``strong_convexity`` instead.
    """

    def __init__(self, center, sigma=1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.dimension = self.center.size
        self.sigma = float(sigma)
        self.strong_convexity = self.sigma
        self.domain_radius = math.inf

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return 0.5 * self.sigma * float(d @ d)

    def prox(self, c, t):
        return (np.asarray(c, dtype=float) + t * self.sigma * self.center) / (1.0 + t * self.sigma)

    def conjugate(self, q):
        q = np.asarray(q, dtype=float)
        return float(q @ self.center + (q @ q) / (2.0 * self.sigma))

    def conjugate_argmax(self, q):
        return self.center + np.asarray(q, dtype=float) / self.sigma
