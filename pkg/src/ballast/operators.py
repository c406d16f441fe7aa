"""Linear observation operators with fast adjoints and shifted-normal inverses.

Each operator knows three things: how to apply itself (``forward``), how to
apply its conjugate transpose (``adjoint``), and how to apply the closed-form
inverse ``(I + A^H A)^{-1}`` (``shifted_normal_inverse``) that the constrained
ADMM solver needs once per iteration.  All closed forms run in O(n log n) or
better; there is deliberately no dense fallback.
"""

import numpy as np

__all__ = [
    "CapabilityError",
    "LinearOperator",
    "CircularConvolution",
    "PixelMask",
    "PartialFourier",
    "SynthesisOperator",
    "CountingOperator",
    "add_noise",
]


class CapabilityError(NotImplementedError):
    """No closed-form inverse is available for this operator/frame combination."""


def _check_shape(x, shape, what):
    if np.shape(x) != tuple(shape):
        raise ValueError(f"{what} has shape {np.shape(x)}, expected {tuple(shape)}")


class LinearOperator:
    """Base class; concrete operators fill in the three applications.

    Attributes:
        in_shape: shape of the domain (image shape, or ``(d,)`` for
            coefficient-domain operators).
        out_shape: shape of an observation produced by ``forward``.
        out_dtype: dtype of ``forward`` applied to real input.
    """

    in_shape = None
    out_shape = None
    out_dtype = np.float64

    def forward(self, x):
        raise NotImplementedError

    def adjoint(self, r):
        raise NotImplementedError

    def gram_shrink(self, r):
        """Apply ``A^H (I + A A^H)^{-1} A`` in closed form.

        This is the Woodbury kernel shared by every shifted-normal inverse:
        ``(I + A^H A)^{-1} = I - A^H (I + A A^H)^{-1} A``.
        """
        raise CapabilityError(
            f"{type(self).__name__} has no closed-form shifted-normal inverse"
        )

    def shifted_normal_inverse(self, r):
        """Apply ``(I + A^H A)^{-1}`` to an element of the domain."""
        _check_shape(r, self.in_shape, "input")
        return r - self.gram_shrink(r)


class CircularConvolution(LinearOperator):
    """Periodic 2D convolution, diagonalized by the unitary DFT.

    The small kernel is normalized to unit sum, zero-padded to the image
    shape and circularly shifted so its center sits at the origin; under
    that registration the operator factors exactly as a frequency-domain
    multiplication.
    """

    def __init__(self, kernel, shape):
        kernel = np.asarray(kernel, dtype=np.float64)
        if kernel.ndim != 2:
            raise ValueError("kernel must be 2D")
        h, w = shape
        if kernel.shape[0] > h or kernel.shape[1] > w:
            raise ValueError(f"kernel {kernel.shape} larger than image {shape}")
        if not np.all(np.isfinite(kernel)):
            raise ValueError("kernel contains non-finite values")
        total = kernel.sum()
        if abs(total) < 1e-15:
            raise ValueError("kernel sum is ~0; cannot normalize to unit sum")
        kernel = kernel / total

        padded = np.zeros((h, w))
        kh, kw = kernel.shape
        padded[:kh, :kw] = kernel
        # center tap to index (0, 0): periodic registration makes the
        # frequency factorization exact rather than approximate
        padded = np.roll(padded, (-(kh // 2), -(kw // 2)), axis=(0, 1))

        self.in_shape = (h, w)
        self.out_shape = (h, w)
        self.kernel = kernel
        self.padded_kernel = padded
        self.freq_response = np.fft.fft2(padded)
        self._unitary_scale = 1.0  # fault-injection hook for the validate suite

    def _filter(self, x, response):
        out = np.fft.ifft2(np.fft.fft2(x) * response)
        if np.isrealobj(x):
            return out.real
        return out

    def forward(self, x):
        _check_shape(x, self.in_shape, "image")
        return self._filter(x, self.freq_response * self._unitary_scale)

    def adjoint(self, r):
        _check_shape(r, self.out_shape, "observation")
        return self._filter(r, np.conj(self.freq_response) * self._unitary_scale)

    def gram_shrink(self, r):
        mag2 = np.abs(self.freq_response) ** 2
        return self._filter(r, mag2 / (mag2 + 1.0))

    def shifted_normal_inverse(self, r):
        _check_shape(r, self.in_shape, "input")
        mag2 = np.abs(self.freq_response) ** 2
        return self._filter(r, 1.0 / (mag2 + 1.0))


class PixelMask(LinearOperator):
    """Row selection: keep the pixels where ``mask`` is True.

    Observations are flat vectors in row-major mask-scan order, so the
    operator satisfies ``B B^H = I`` exactly.
    """

    def __init__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be 2D")
        self.mask = mask
        self.m = int(mask.sum())
        if self.m < 1:
            raise ValueError("mask selects no pixels")
        self.in_shape = mask.shape
        self.out_shape = (self.m,)

    def forward(self, x):
        _check_shape(x, self.in_shape, "image")
        return x[self.mask]

    def adjoint(self, r):
        _check_shape(r, self.out_shape, "observation")
        out = np.zeros(self.in_shape, dtype=np.result_type(r.dtype, np.float64))
        out[self.mask] = r
        return out

    def gram_shrink(self, r):
        return np.where(self.mask, 0.5 * r, np.zeros((), dtype=np.asarray(r).dtype))


class PartialFourier(LinearOperator):
    """Subsampled unitary 2D DFT: keep the frequencies where ``mask`` is True.

    The mask indexes the standard (unshifted) FFT frequency plane.  Observed
    samples come out as a flat complex vector in row-major mask-scan order;
    ``M M^H = I`` holds since rows are distinct.
    """

    out_dtype = np.complex128

    def __init__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be 2D")
        self.mask = mask
        self.m = int(mask.sum())
        if self.m < 1:
            raise ValueError("mask selects no frequencies")
        self.in_shape = mask.shape
        self.out_shape = (self.m,)
        self._unitary_scale = 1.0  # fault-injection hook for the validate suite

    def forward(self, x):
        _check_shape(x, self.in_shape, "image")
        spectrum = np.fft.fft2(x, norm="ortho") * self._unitary_scale
        return spectrum[self.mask]

    def adjoint(self, r):
        _check_shape(r, self.out_shape, "observation")
        grid = np.zeros(self.in_shape, dtype=np.complex128)
        grid[self.mask] = r
        return np.fft.ifft2(grid, norm="ortho") * self._unitary_scale

    def gram_shrink(self, r):
        spectrum = np.fft.fft2(r, norm="ortho")
        spectrum[~self.mask] = 0.0
        return 0.5 * np.fft.ifft2(spectrum, norm="ortho")


class SynthesisOperator(LinearOperator):
    """Composition ``A = B W`` of an image-domain operator with frame synthesis.

    Used by the synthesis formulation, where the unknown is the coefficient
    vector.  The shifted-normal inverse reuses the base operator's Woodbury
    kernel: ``(I + W^H B^H B W)^{-1} r = r - W^H [B^H (I + B B^H)^{-1} B] W r``,
    valid because the frame is Parseval (``W W^H = I``).
    """

    def __init__(self, base, frame):
        if isinstance(base, (SynthesisOperator, CountingOperator)):
            raise CapabilityError("frame composition requires a plain image-domain operator")
        self.base = base
        self.frame = frame
        if tuple(base.in_shape) != tuple(frame.image_shape):
            raise ValueError(
                f"operator domain {base.in_shape} != frame image shape {frame.image_shape}"
            )
        self.in_shape = (frame.coefficient_length,)
        self.out_shape = base.out_shape
        self.out_dtype = base.out_dtype

    def forward(self, beta):
        _check_shape(beta, self.in_shape, "coefficient vector")
        return self.base.forward(self.frame.synthesis(beta))

    def adjoint(self, r):
        return self.frame.analysis(self.base.adjoint(r))

    def gram_shrink(self, beta):
        return self.frame.analysis(self.base.gram_shrink(self.frame.synthesis(beta)))


class CountingOperator(LinearOperator):
    """Transparent wrapper that counts forward/adjoint applications.

    The shifted-normal inverse is delegated untouched: its internal FFT/frame
    work is not a call to B or B^H and is not billed as one.
    """

    def __init__(self, inner):
        self.inner = inner
        self.in_shape = inner.in_shape
        self.out_shape = inner.out_shape
        self.out_dtype = inner.out_dtype
        self.forward_calls = 0
        self.adjoint_calls = 0

    def forward(self, x):
        self.forward_calls += 1
        return self.inner.forward(x)

    def adjoint(self, r):
        self.adjoint_calls += 1
        return self.inner.adjoint(r)

    def gram_shrink(self, r):
        return self.inner.gram_shrink(r)

    def shifted_normal_inverse(self, r):
        return self.inner.shifted_normal_inverse(r)

    @property
    def total_calls(self):
        return self.forward_calls + self.adjoint_calls


def add_noise(y, sigma, seed, complex_noise=False):
    """Add i.i.d. Gaussian noise of standard deviation ``sigma`` to ``y``.

    In complex mode the variance splits equally between real and imaginary
    parts, so the total per-sample variance is still ``sigma**2``.
    Deterministic given ``seed``.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    y = np.asarray(y)
    if sigma == 0:
        return y.copy()
    rng = np.random.default_rng(seed)
    if complex_noise:
        noise = (
            rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        ) * (sigma / np.sqrt(2.0))
    else:
        noise = rng.standard_normal(y.shape) * sigma
    return y + noise
