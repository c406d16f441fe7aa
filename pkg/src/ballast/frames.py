"""Parseval Haar frames: analysis/synthesis pairs with W W^H = I.

Two constructions are provided.  ``OrthogonalHaar`` is the standard decimated
separable Haar wavelet basis (square, orthonormal).  ``UndecimatedHaar`` is
the shift-invariant version: no decimation, filters upsampled with holes at
each level, normalized so that the overall frame is 1-tight in exact
floating-point arithmetic (each branch splits energy by halves).

Both transforms use periodic boundary handling, so every analysis branch is
a circulant operator and the synthesis side is its exact adjoint.
"""

import numpy as np

__all__ = ["OrthogonalHaar", "UndecimatedHaar"]

_SQRT2 = np.sqrt(2.0)


class OrthogonalHaar:
    """Decimated separable 2D Haar transform over ``levels`` scales.

    Coefficients use the in-place corner layout: after each stage the
    top-left block holds the approximation, the other three quadrants the
    details; the final array is flattened row-major.  Square and orthonormal,
    so synthesis is the inverse as well as the adjoint.
    """

    def __init__(self, image_shape, levels=4):
        h, w = image_shape
        if levels < 1:
            raise ValueError("levels must be >= 1")
        div = 1 << levels
        if h % div or w % div:
            raise ValueError(
                f"image shape {image_shape} not divisible by 2^{levels}"
            )
        self.image_shape = (h, w)
        self.levels = levels
        self.coefficient_length = h * w

    def analysis(self, x):
        x = np.asarray(x)
        if x.shape != self.image_shape:
            raise ValueError(f"image has shape {x.shape}, expected {self.image_shape}")
        work = x.astype(np.promote_types(x.dtype, np.float64), copy=True)
        h, w = self.image_shape
        for _ in range(self.levels):
            a = work[:h, :w]
            lo = (a[:, 0::2] + a[:, 1::2]) / _SQRT2
            hi = (a[:, 0::2] - a[:, 1::2]) / _SQRT2
            ll = (lo[0::2, :] + lo[1::2, :]) / _SQRT2
            lh = (lo[0::2, :] - lo[1::2, :]) / _SQRT2
            hl = (hi[0::2, :] + hi[1::2, :]) / _SQRT2
            hh = (hi[0::2, :] - hi[1::2, :]) / _SQRT2
            h2, w2 = h // 2, w // 2
            work[:h2, :w2] = ll
            work[:h2, w2:w] = hl
            work[h2:h, :w2] = lh
            work[h2:h, w2:w] = hh
            h, w = h2, w2
        return work.ravel()

    def synthesis(self, coefficients):
        coefficients = np.asarray(coefficients)
        if coefficients.shape != (self.coefficient_length,):
            raise ValueError(
                f"coefficient vector has shape {coefficients.shape}, "
                f"expected ({self.coefficient_length},)"
            )
        H, W = self.image_shape
        work = coefficients.astype(
            np.promote_types(coefficients.dtype, np.float64), copy=True
        ).reshape(H, W)
        sizes = [(H >> s, W >> s) for s in range(self.levels, 0, -1)]
        for h2, w2 in sizes:
            h, w = 2 * h2, 2 * w2
            ll = work[:h2, :w2]
            hl = work[:h2, w2:w]
            lh = work[h2:h, :w2]
            hh = work[h2:h, w2:w]
            lo = np.empty((h, w2), dtype=work.dtype)
            hi = np.empty((h, w2), dtype=work.dtype)
            lo[0::2, :] = (ll + lh) / _SQRT2
            lo[1::2, :] = (ll - lh) / _SQRT2
            hi[0::2, :] = (hl + hh) / _SQRT2
            hi[1::2, :] = (hl - hh) / _SQRT2
            block = np.empty((h, w), dtype=work.dtype)
            block[:, 0::2] = (lo + hi) / _SQRT2
            block[:, 1::2] = (lo - hi) / _SQRT2
            work[:h, :w] = block
        return work


class UndecimatedHaar:
    """Shift-invariant 2D Haar frame over ``levels`` scales (periodic).

    Redundancy is ``3*levels + 1``: one approximation band plus three detail
    bands per level, all at full image size.  Filters are the two-tap pairs
    ``[1/2, 1/2]`` / ``[1/2, -1/2]`` with the gap between taps doubling at
    each level, which makes the frame exactly 1-tight: each 1D stage splits
    into two branches whose squared gains sum to ``4 * (1/2)^2 = 1``.

    Coefficient layout (flattened row-major per band):
    ``[approximation, then per level from finest to coarsest: LH, HL, HH]``.
    """

    def __init__(self, image_shape, levels=4):
        h, w = image_shape
        if levels < 1:
            raise ValueError("levels must be >= 1")
        self.image_shape = (h, w)
        self.levels = levels
        self.coefficient_length = h * w * (3 * levels + 1)

    def analysis(self, x):
        x = np.asarray(x)
        if x.shape != self.image_shape:
            raise ValueError(f"image has shape {x.shape}, expected {self.image_shape}")
        a = x.astype(np.promote_types(x.dtype, np.float64), copy=False)
        details = []
        for level in range(self.levels):
            gap = 1 << level
            lo0 = (a + np.roll(a, -gap, axis=0)) / 2.0
            hi0 = (a - np.roll(a, -gap, axis=0)) / 2.0
            ll = (lo0 + np.roll(lo0, -gap, axis=1)) / 2.0
            lh = (lo0 - np.roll(lo0, -gap, axis=1)) / 2.0
            hl = (hi0 + np.roll(hi0, -gap, axis=1)) / 2.0
            hh = (hi0 - np.roll(hi0, -gap, axis=1)) / 2.0
            details.append((lh, hl, hh))
            a = ll
        parts = [a.ravel()]
        for lh, hl, hh in details:
            parts.extend((lh.ravel(), hl.ravel(), hh.ravel()))
        return np.concatenate(parts)

    def synthesis(self, coefficients):
        coefficients = np.asarray(coefficients)
        if coefficients.shape != (self.coefficient_length,):
            raise ValueError(
                f"coefficient vector has shape {coefficients.shape}, "
                f"expected ({self.coefficient_length},)"
            )
        h, w = self.image_shape
        n = h * w
        dtype = np.promote_types(coefficients.dtype, np.float64)
        bands = coefficients.astype(dtype, copy=False).reshape(3 * self.levels + 1, h, w)
        a = bands[0]
        # adjoint of each analysis branch, accumulated from the coarsest level in
        for level in range(self.levels - 1, -1, -1):
            gap = 1 << level
            lh = bands[1 + 3 * level]
            hl = bands[2 + 3 * level]
            hh = bands[3 + 3 * level]
            lo0 = (a + np.roll(a, gap, axis=1)) / 2.0 + (lh - np.roll(lh, gap, axis=1)) / 2.0
            hi0 = (hl + np.roll(hl, gap, axis=1)) / 2.0 + (hh - np.roll(hh, gap, axis=1)) / 2.0
            a = (lo0 + np.roll(lo0, gap, axis=0)) / 2.0 + (hi0 - np.roll(hi0, gap, axis=0)) / 2.0
        return a
