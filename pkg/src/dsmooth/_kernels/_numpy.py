"""Pure-numpy versions of the hot kernels."""
import numpy as np


def reflect_index(n, pad):
    """Half-sample symmetric extension indices for a length-``n`` axis padded by ``pad``."""
    i = np.arange(-pad, n + pad)
    j = np.mod(i, 2 * n)
    return np.where(j >= n, 2 * n - 1 - j, j)


def convolve_symmetric(img, kernel):
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    h, w = img.shape
    padded = img[np.ix_(reflect_index(h, rh), reflect_index(w, rw))]
    flipped = kernel[::-1, ::-1]
    out = np.zeros((h, w))
    for a in range(kh):
        for b in range(kw):
            out += flipped[a, b] * padded[a:a + h, b:b + w]
    return out


def prox_l1_box(c, t, lam, lo, hi):
    return np.clip(c - t * lam, lo, hi)


def prox_absdev_box(c, t, b, lo, hi):
    z = np.where(c - t > b, c - t, np.where(c + t < b, c + t, b))
    return np.clip(z, lo, hi)


def conj_l1_box(q, lam, hi):
    return float(hi * np.sum(np.maximum(q - lam, 0.0)))


def conj_absdev_box(q, b, lo, hi):
    cands = np.stack([q * lo - np.abs(lo - b), q * b, q * hi - np.abs(hi - b)])
    return float(np.sum(cands.max(axis=0)))
