"""Numba-compiled versions of the hot kernels. Signatures mirror ``_numpy``."""
import os

import numpy as np
from numba import config, njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

from ._numpy import reflect_index


@njit(parallel=True, cache=True)
def _conv_core(img, kflip, ri, ci):
    h, w = img.shape
    kh, kw = kflip.shape
    out = np.empty((h, w))
    for i in prange(h):
        for j in range(w):
            acc = 0.0
            for a in range(kh):
                row = ri[i + a]
                for b in range(kw):
                    acc += kflip[a, b] * img[row, ci[j + b]]
            out[i, j] = acc
    return out


def convolve_symmetric(img, kernel):
    kh, kw = kernel.shape
    h, w = img.shape
    ri = reflect_index(h, kh // 2)
    ci = reflect_index(w, kw // 2)
    kflip = np.ascontiguousarray(kernel[::-1, ::-1])
    return _conv_core(np.ascontiguousarray(img, dtype=np.float64), kflip, ri, ci)


@njit(cache=True)
def _clip(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@njit(cache=True)
def _prox_l1_box(c, t, lam, lo, hi):
    out = np.empty_like(c)
    s = t * lam
    for i in range(c.size):
        out[i] = _clip(c[i] - s, lo, hi)
    return out


@njit(cache=True)
def _prox_absdev_box(c, t, b, lo, hi):
    out = np.empty_like(c)
    for i in range(c.size):
        if c[i] - t > b[i]:
            z = c[i] - t
        elif c[i] + t < b[i]:
            z = c[i] + t
        else:
            z = b[i]
        out[i] = _clip(z, lo, hi)
    return out


@njit(cache=True)
def _conj_l1_box(q, lam, hi):
    s = 0.0
    for i in range(q.size):
        if q[i] > lam:
            s += q[i] - lam
    return hi * s


@njit(cache=True)
def _conj_absdev_box(q, b, lo, hi):
    s = 0.0
    for i in range(q.size):
        best = q[i] * b[i]
        v = q[i] * lo - abs(lo - b[i])
        if v > best:
            best = v
        v = q[i] * hi - abs(hi - b[i])
        if v > best:
            best = v
        s += best
    return s


def prox_l1_box(c, t, lam, lo, hi):
    return _prox_l1_box(np.ascontiguousarray(c, dtype=np.float64), float(t), float(lam), float(lo), float(hi))


def prox_absdev_box(c, t, b, lo, hi):
    return _prox_absdev_box(np.ascontiguousarray(c, dtype=np.float64), float(t),
                            np.ascontiguousarray(b, dtype=np.float64), float(lo), float(hi))


def conj_l1_box(q, lam, hi):
    return float(_conj_l1_box(np.ascontiguousarray(q, dtype=np.float64), float(lam), float(hi)))


def conj_absdev_box(q, b, lo, hi):
    return float(_conj_absdev_box(np.ascontiguousarray(q, dtype=np.float64),
                                  np.ascontiguousarray(b, dtype=np.float64), float(lo), float(hi)))
