"""PGM input/output, intensity scaling and noise.

Pixels are held as floats in the working range ``[0, WORKING_MAX]``. Noise
draws use numpy's ``default_rng`` (PCG64) seeded explicitly.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

WORKING_MAX = 0.1


class PGMError(ValueError):
    pass


@dataclass(frozen=True)
class Image:
    height: int
    width: int
    pixels: np.ndarray  # flat, row-major

    def __post_init__(self):
        if self.pixels.shape != (self.height * self.width,):
            raise ValueError("pixel count does not match height*width")
        if not np.all(np.isfinite(self.pixels)):
            raise ValueError("pixels must be finite")

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr.shape[0], arr.shape[1], arr.ravel().copy())

    def as_array(self):
        return self.pixels.reshape(self.height, self.width)

    def crop(self, height, width, top=None, left=None):
        """Crop to ``height x width``; centered unless ``top``/``left`` are given."""
        if height > self.height or width > self.width:
            raise ValueError("crop larger than image")
        top = (self.height - height) // 2 if top is None else top
        left = (self.width - width) // 2 if left is None else left
        return Image.from_array(self.as_array()[top:top + height, left:left + width])


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data, count):
    pos, out = 0, []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("malformed PGM header")
        out.append(m.group(1))
        pos = m.end()
    return out, pos


def load_pgm(path) -> Image:
    """Read a P2 (ASCII) or P5 (binary) PGM and scale it into the working range."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic number {magic!r}")
    try:
        toks, pos = _header_tokens(data[2:], 3)
        width, height, maxval = (int(t) for t in toks)
    except ValueError as exc:
        raise PGMError(f"malformed PGM header: {exc}") from None
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise PGMError(f"invalid PGM dimensions or maxval ({width}x{height}, {maxval})")
    n = width * height
    body = data[2 + pos:]
    if magic == b"P5":
        body = body[1:]  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(body) < n * dtype.itemsize:
            raise PGMError(f"truncated payload: need {n * dtype.itemsize} bytes, got {len(body)}")
        raw = np.frombuffer(body, dtype=dtype, count=n).astype(float)
    else:
        parts = re.sub(rb"#[^\n]*", b"", body).split()
        if len(parts) < n:
            raise PGMError(f"truncated payload: need {n} samples, got {len(parts)}")
        raw = np.array([int(t) for t in parts[:n]], dtype=float)
    if raw.max(initial=0) > maxval:
        raise PGMError("sample exceeds maxval")
    return Image(height, width, raw * (WORKING_MAX / maxval))


def quantize(pixels, maxval=255):
    """Map working-range values to integer levels, rounding half up."""
    levels = np.floor(np.asarray(pixels, dtype=float) * maxval / WORKING_MAX + 0.5)
    return np.clip(levels, 0, maxval).astype(np.int64)


def save_pgm(image: Image, path, maxval: int = 255) -> None:
    """Write a binary P5 PGM."""
    if not 0 < maxval <= 65535:
        raise ValueError("maxval must be in 1..65535")
    q = quantize(image.pixels, maxval)
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(q.astype(dtype).tobytes())
    os.replace(tmp, path)


def add_gaussian_noise(image: Image, stddev: float, seed=0) -> Image:
    """Add i.i.d. ``N(0, stddev^2)`` noise, then clamp back into the working range."""
    if stddev < 0:
        raise ValueError("stddev must be nonnegative")
    if stddev == 0:
        return Image(image.height, image.width, image.pixels.copy())
    rng = np.random.default_rng(seed)
    noisy = image.pixels + rng.normal(0.0, stddev, image.pixels.shape)
    return Image(image.height, image.width, np.clip(noisy, 0.0, WORKING_MAX))


def phantom(height=64, width=64) -> Image:
    """Deterministic piecewise-constant test scene in the working range."""
    yy, xx = np.mgrid[0:height, 0:width]
    u, v = (yy + 0.5) / height, (xx + 0.5) / width
    img = np.full((height, width), 0.2)
    img[((u - 0.45) / 0.35) ** 2 + ((v - 0.5) / 0.25) ** 2 <= 1] = 0.75
    img[((u - 0.35) / 0.08) ** 2 + ((v - 0.4) / 0.06) ** 2 <= 1] = 0.05
    img[((u - 0.35) / 0.08) ** 2 + ((v - 0.6) / 0.06) ** 2 <= 1] = 0.05
    img[(u > 0.8) & (u < 0.9) & (v > 0.15) & (v < 0.85)] = 1.0
    img[(np.abs(v - 0.12) < 0.03) & (u > 0.1) & (u < 0.7)] = 0.95
    return Image.from_array(img * WORKING_MAX)
