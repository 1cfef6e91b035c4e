"""Gaussian blur with half-sample symmetric boundary extension."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import LinearOperator


@dataclass(frozen=True)
class GaussianKernel:
    size: int
    sigma: float
    weights: np.ndarray


def make_kernel(size: int = 9, sigma: float = 4.0) -> GaussianKernel:
    """Normalized, rotationally symmetric sampled Gaussian of odd ``size``."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be a positive odd integer, got {size}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = size // 2
    i = np.arange(-r, r + 1, dtype=float)
    w = np.exp(-(i[:, None] ** 2 + i[None, :] ** 2) / (2.0 * sigma * sigma))
    w /= w.sum()
    w.setflags(write=False)
    return GaussianKernel(size, float(sigma), w)


class BlurOperator(LinearOperator):
    """Convolution with a symmetric kernel on an ``height x width`` image.

    With a kernel symmetric under flips and half-sample reflection at the
    borders the resulting matrix is symmetric, so :meth:`adjoint` applies the
    same convolution. Inputs may be flat (row-major) or 2-D; outputs keep the
    input's layout.
    """

    def __init__(self, kernel: GaussianKernel | np.ndarray, height: int, width: int,
                 norm_sq_bound: float = 1.0):
        weights = kernel.weights if isinstance(kernel, GaussianKernel) else np.asarray(kernel, float)
        if weights.ndim != 2 or weights.shape[0] % 2 == 0 or weights.shape[1] % 2 == 0:
            raise ValueError("kernel must be 2-D with odd side lengths")
        if not (np.array_equal(weights, weights[::-1, :]) and np.array_equal(weights, weights[:, ::-1])):
            raise ValueError("kernel must be symmetric under row and column flips")
        self.kernel = kernel
        self.weights = np.ascontiguousarray(weights)
        self.height, self.width = int(height), int(width)
        n = self.height * self.width
        self.shape = (n, n)
        self.norm_sq_bound = float(norm_sq_bound)

    def _as_image(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape == (self.height, self.width):
            return x, False
        if x.shape == (self.height * self.width,):
            return x.reshape(self.height, self.width), True
        raise ValueError(f"expected an image of shape {(self.height, self.width)} or its flattening, "
                         f"got shape {x.shape}")

    def apply(self, x):
        img, flat = self._as_image(x)
        out = _kernels.convolve_symmetric(img, self.weights)
        return out.ravel() if flat else out

    def adjoint(self, y):
        return self.apply(y)


def estimate_norm_sq(op: LinearOperator, iterations: int = 50, seed=0) -> float:
    """Power iteration on ``A A*``; returns the final Rayleigh quotient."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = np.random.default_rng(seed)
    m = op.shape[0]
    x = rng.standard_normal(m)
    while not np.any(x):
        x = rng.standard_normal(m)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = op.apply(op.adjoint(x))
        est = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
    return est
