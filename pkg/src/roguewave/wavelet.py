"""Orthonormal Haar transforms and the integer-scale Haar scaleogram.

The discrete transform is the sparsity basis for compressive recovery; the
scaleogram is the diagnostic whose V-shape flags an emerging rogue wave.

Coefficient layout of :func:`haar_dwt` for a length ``N = 2**L`` signal::

    [a, d_0, d_1[0:2], d_2[0:4], ..., d_{L-1}[0:N/2]]

i.e. the single approximation coefficient first, then detail levels from
coarsest (one coefficient) to finest (``N/2`` coefficients).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import LengthNotPowerOfTwo, ScaleOutOfRange

_SQRT2 = np.sqrt(2.0)

DEFAULT_SCALES = tuple(range(1, 33))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_length(n: int) -> None:
    if n < 2 or not is_power_of_two(n):
        raise LengthNotPowerOfTwo(f"length must be a power of two >= 2, got {n}")


def haar_dwt(signal) -> np.ndarray:
    """Full-depth orthonormal Haar analysis along the last axis.

    Batched input (shape ``(..., N)``) is transformed row by row.
    """
    a = np.asarray(signal, dtype=float)
    n = a.shape[-1]
    _check_length(n)
    details = []
    while a.shape[-1] > 1:
        even, odd = a[..., 0::2], a[..., 1::2]
        details.append((even - odd) / _SQRT2)
        a = (even + odd) / _SQRT2
    return np.concatenate([a] + details[::-1], axis=-1)


def haar_idwt(coeffs) -> np.ndarray:
    """Inverse of :func:`haar_dwt` (also batched along the last axis)."""
    c = np.asarray(coeffs, dtype=float)
    n = c.shape[-1]
    _check_length(n)
    a = c[..., :1]
    width = 1
    while width < n:
        d = c[..., width:2 * width]
        nxt = np.empty(c.shape[:-1] + (2 * width,))
        nxt[..., 0::2] = (a + d) / _SQRT2
        nxt[..., 1::2] = (a - d) / _SQRT2
        a = nxt
        width *= 2
    return a


def coefficient_levels(n: int) -> np.ndarray:
    """Detail level of each coefficient slot; -1 marks the approximation."""
    _check_length(n)
    levels = np.empty(n, dtype=int)
    levels[0] = -1
    k = np.arange(1, n)
    levels[1:] = np.floor(np.log2(k)).astype(int)
    return levels


@dataclass(frozen=True)
class Scaleogram:
    """|Haar CWT| over integer scales (rows) and grid positions (columns)."""

    scales: tuple[int, ...]
    magnitudes: np.ndarray
    x: np.ndarray | None = None

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=float)
        if mags.ndim != 2 or mags.shape[0] != len(self.scales):
            raise ValueError("magnitudes must have one row per scale")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise ValueError("magnitudes must be finite and non-negative")
        mags.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "scales", tuple(int(a) for a in self.scales))
        if self.x is not None:
            x = np.asarray(self.x, dtype=float)
            if x.shape != (mags.shape[1],):
                raise ValueError("x must have one coordinate per column")
            x.setflags(write=False)
            object.__setattr__(self, "x", x)

    @property
    def n_positions(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def dx(self) -> float:
        if self.x is None or len(self.x) < 2:
            return 1.0
        return float(self.x[1] - self.x[0])

    def positions(self) -> np.ndarray:
        return self.x if self.x is not None else np.arange(self.n_positions, dtype=float)


def haar_cwt(signal, scales: Sequence[int] = DEFAULT_SCALES, x=None) -> Scaleogram:
    """Correlate ``signal`` with integer-dilated Haar wavelets.

    At scale ``a`` and position ``p`` the coefficient is

        (sum(s[p-a:p]) - sum(s[p:p+a])) / sqrt(2a)

    so the wavelet's jump sits on sample ``p``. The signal is extended
    symmetrically (edge sample repeated) past both ends.
    """
    s = np.asarray(signal, dtype=float)
    if s.ndim != 1:
        raise ValueError("signal must be one-dimensional")
    n = s.size
    scales = tuple(int(a) for a in scales)
    if not scales:
        raise ScaleOutOfRange("at least one scale is required")
    for a in scales:
        if a < 1 or a > n // 2:
            raise ScaleOutOfRange(f"scale {a} outside [1, {n // 2}]")
    pad = max(scales)
    ext = np.pad(s, pad, mode="symmetric")
    rows = np.empty((len(scales), n))
    for i, a in enumerate(scales):
        # window sums in a fixed order so constant input cancels exactly
        sums = sliding_window_view(ext, a).sum(axis=1)
        left = sums[pad - a:pad - a + n]
        right = sums[pad:pad + n]
        rows[i] = np.abs(left - right) / np.sqrt(2.0 * a)
    return Scaleogram(scales=scales, magnitudes=rows, x=x)
