"""Benchmark harness: synthetic imaging problems and a catalog of named runs.

Everything here is deterministic given the experiment name, size, and seed:
test images are procedural, sampling masks are rasterized (not drawn at
random), and noise comes from a seeded generator.  The catalog covers three
problem families — deconvolution of a piecewise-constant scene, partial
Fourier reconstruction of a head phantom and of a high-dynamic-range squares
target, and inpainting with a random pixel mask.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import UndecimatedHaar
from .operators import (
    CircularConvolution,
    CountingOperator,
    PartialFourier,
    PixelMask,
    SynthesisOperator,
    add_noise,
)
from .prox import IsotropicTV, L1Norm
from .solver import SolverConfig, solve_analysis, solve_penalized

__all__ = [
    "epsilon_rule",
    "make_blur_kernel",
    "shepp_logan",
    "radial_mask",
    "random_squares",
    "cartoon",
    "mse",
    "relative_error",
    "isnr",
    "ProblemInstance",
    "deblur_instance",
    "fourier_phantom_instance",
    "fourier_squares_instance",
    "inpainting_instance",
    "RunSetup",
    "ExperimentReport",
    "canonical_experiment_name",
    "build_experiment",
    "run_experiment",
    "experiment_names",
    "EXPERIMENTS",
]


def epsilon_rule(m, sigma):
    """Ball radius from the noise level: ``sigma * sqrt(m + 8*sqrt(m))``.

    Slightly above the expected noise norm ``sigma*sqrt(m)``, so the true
    signal is feasible with overwhelming probability.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    return float(sigma * math.sqrt(m + 8.0 * math.sqrt(m)))


def make_blur_kernel(kind, support=None, variance=1.0):
    """Build a unit-sum blur kernel.

    Kinds: ``uniform`` (default 9x9 box), ``gaussian`` (default 9x9,
    ``variance`` in pixels^2), ``inverse_quadratic`` (``1/(1+i^2+j^2)``,
    default 15x15).  ``support`` must be odd so the kernel has a center tap.
    """
    defaults = {"uniform": 9, "gaussian": 9, "inverse_quadratic": 15}
    if kind not in defaults:
        raise ValueError(f"unknown kernel kind {kind!r}")
    size = defaults[kind] if support is None else int(support)
    if size < 1 or size % 2 == 0:
        raise ValueError(f"support must be odd and positive, got {size}")
    half = size // 2
    ii, jj = np.mgrid[-half : half + 1, -half : half + 1]
    if kind == "uniform":
        kernel = np.ones((size, size))
    elif kind == "gaussian":
        if variance <= 0:
            raise ValueError(f"variance must be positive, got {variance}")
        kernel = np.exp(-(ii**2 + jj**2) / (2.0 * variance))
    else:
        kernel = 1.0 / (1.0 + ii**2 + jj**2)
    return kernel / kernel.sum()


# Standard head-phantom ellipse table (intensity, semi-axes, center, angle).
_PHANTOM_ELLIPSES = [
    (1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    (-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    (-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    (-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    (0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    (0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    (0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    (0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
]


def shepp_logan(n):
    """Piecewise-constant head phantom on an n-by-n grid, values in [0, 1]."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    axis = np.linspace(-1.0, 1.0, n)
    xx = axis[None, :]
    yy = -axis[:, None]  # top row is y = +1
    img = np.zeros((n, n))
    for amp, a, b, x0, y0, phi_deg in _PHANTOM_ELLIPSES:
        phi = math.radians(phi_deg)
        c, s = math.cos(phi), math.sin(phi)
        xr = (xx - x0) * c + (yy - y0) * s
        yr = -(xx - x0) * s + (yy - y0) * c
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += amp
    # the overlapping amplitudes sum to exactly 0 in the darkest regions on
    # paper; clamp the float residue so the range contract holds
    return np.maximum(img, 0.0)


def radial_mask(n, lines):
    """Boolean frequency mask of ``lines`` diametral lines through DC.

    Lines at angles ``pi * t / lines`` are rasterized by stepping the
    dominant axis one pixel at a time in the centered plane, then the mask is
    symmetrized under point reflection about DC (so real images keep real
    shifted-normal products) and returned in standard FFT index order.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if lines < 1:
        raise ValueError(f"lines must be >= 1, got {lines}")
    center = n // 2
    mask = np.zeros((n, n), dtype=bool)
    offsets = np.arange(n) - center
    for t in range(lines):
        theta = math.pi * t / lines
        if abs(math.cos(theta)) >= abs(math.sin(theta)):
            slope = math.tan(theta)
            rows = (center + np.round(offsets * slope).astype(int)) % n
            mask[rows, (center + offsets) % n] = True
        else:
            slope = math.cos(theta) / math.sin(theta)
            cols = (center + np.round(offsets * slope).astype(int)) % n
            mask[(center + offsets) % n, cols] = True
    mask = np.fft.ifftshift(mask)
    mirrored = np.roll(mask[::-1, ::-1], (1, 1), axis=(0, 1))
    mask |= mirrored
    mask[0, 0] = True
    return mask


def random_squares(n, count=15, dynamic_range_db=40.0, seed=0):
    """Axis-aligned squares with log-spaced amplitudes on a zero background.

    Amplitudes span the requested dynamic range (``max/min =
    10**(dB/20)``); squares are painted dimmest first so the brightest are
    never fully occluded.  Sides are uniform on [4, n//4].
    """
    if n < 16:
        raise ValueError(f"n must be >= 16, got {n}")
    rng = np.random.default_rng(seed)
    ratio = 10.0 ** (dynamic_range_db / 20.0)
    amplitudes = np.geomspace(1.0, ratio, count)
    img = np.zeros((n, n))
    for amp in amplitudes:
        side = int(rng.integers(4, n // 4 + 1))
        top = int(rng.integers(0, n - side + 1))
        left = int(rng.integers(0, n - side + 1))
        img[top : top + side, left : left + side] = amp
    return img


def cartoon(n):
    """Procedural piecewise-constant scene in [0, 255].

    A stand-in for a natural grayscale photo: flat regions, curved and
    straight edges, small and large features, and the full intensity range.
    """
    if n < 16:
        raise ValueError(f"n must be >= 16, got {n}")
    axis = np.linspace(-1.0, 1.0, n)
    xx = axis[None, :]
    yy = axis[:, None]
    img = np.full((n, n), 0.15)
    img[(xx + 0.40) ** 2 + (yy + 0.30) ** 2 < 0.38**2] = 0.70
    img[(np.abs(xx - 0.45) < 0.30) & (np.abs(yy + 0.42) < 0.25)] = 0.95
    img[(xx - 0.05) ** 2 + (yy - 0.45) ** 2 < 0.33**2] = 0.45
    img[np.abs(0.8 * xx + 0.6 * yy - 0.15) < 0.055] = 0.30
    img[(xx + 0.42) ** 2 + (yy + 0.33) ** 2 < 0.11**2] = 0.05
    img[(np.abs(xx - 0.55) < 0.10) & (np.abs(yy - 0.60) < 0.08)] = 1.00
    img[(xx - 0.62) ** 2 + (yy + 0.55) ** 2 < 0.045**2] = 0.25
    return img * 255.0


def _as_display_range(image):
    """Bring a user-supplied grayscale image into the [0, 255] convention.

    [0,1]-ranged images are scaled by 255; images already inside [0,255] pass
    through; anything else is affinely mapped.  Keeps error magnitudes
    comparable across sources.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2D grayscale image")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    lo = float(np.min(img))
    hi = float(np.max(img))
    if hi <= lo:
        raise ValueError("image is constant")
    if lo >= 0.0 and hi <= 1.0:
        return img * 255.0
    if lo >= 0.0 and hi <= 255.0:
        return img.copy()
    return (img - lo) / (hi - lo) * 255.0


def mse(a, b):
    """Mean squared error; complex differences use squared magnitude."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b) ** 2))


def relative_error(estimate, truth):
    denom = float(np.linalg.norm(np.ravel(truth)))
    if denom == 0:
        raise ValueError("truth has zero norm")
    return float(np.linalg.norm(np.ravel(estimate - truth))) / denom


def isnr(degraded, estimate, truth):
    """Improvement in SNR (dB) of the estimate over the degraded image.

    Returns +inf when the estimate matches the truth exactly (saturation).
    """
    if np.shape(degraded) != np.shape(truth):
        raise ValueError("isnr needs degraded and truth of the same shape")
    err_deg = mse(degraded, truth)
    err_est = mse(estimate, truth)
    if err_est == 0.0:
        return math.inf
    return 10.0 * math.log10(err_deg / err_est)


@dataclass
class ProblemInstance:
    """A ready-to-solve degradation: truth, operator, noisy observation."""

    name: str
    truth: np.ndarray
    operator: object
    observation: np.ndarray
    sigma: float
    epsilon: float
    seed: int
    degraded: np.ndarray = None  # image-domain baseline for comparison
    extras: dict = field(default_factory=dict)


def deblur_instance(kind, noise_sigma, size=128, seed=0, image=None, variance=1.0):
    """Blur the cartoon scene (or ``image``) and add white Gaussian noise."""
    truth = cartoon(size) if image is None else _as_display_range(image)
    kernel = make_blur_kernel(kind, variance=variance)
    op = CircularConvolution(kernel, truth.shape)
    clean = op.forward(truth)
    y = add_noise(clean, noise_sigma, seed)
    eps = epsilon_rule(y.size, noise_sigma)
    return ProblemInstance(
        name=f"deblur-{kind}",
        truth=truth,
        operator=op,
        observation=y,
        sigma=noise_sigma,
        epsilon=eps,
        seed=seed,
        degraded=y,
        extras={"kernel": kernel},
    )


def fourier_phantom_instance(size=128, lines=22, sigma=math.sqrt(0.5e-6), seed=0):
    """Head phantom sampled on radial Fourier lines with complex noise."""
    truth = shepp_logan(size)
    mask = radial_mask(size, lines)
    op = PartialFourier(mask)
    clean = op.forward(truth)
    y = add_noise(clean, sigma, seed, complex_noise=True)
    eps = epsilon_rule(op.m, sigma)
    return ProblemInstance(
        name="fourier-phantom",
        truth=truth,
        operator=op,
        observation=y,
        sigma=sigma,
        epsilon=eps,
        seed=seed,
        degraded=op.adjoint(y),
        extras={"mask": mask, "lines": lines},
    )


def fourier_squares_instance(size=128, lines=27, sigma=0.1, seed=0, count=15,
                             dynamic_range_db=40.0):
    """High-dynamic-range squares sampled on radial Fourier lines."""
    truth = random_squares(size, count=count, dynamic_range_db=dynamic_range_db, seed=seed)
    mask = radial_mask(size, lines)
    op = PartialFourier(mask)
    clean = op.forward(truth)
    y = add_noise(clean, sigma, seed + 1, complex_noise=True)
    eps = epsilon_rule(op.m, sigma)
    return ProblemInstance(
        name="fourier-squares",
        truth=truth,
        operator=op,
        observation=y,
        sigma=sigma,
        epsilon=eps,
        seed=seed,
        degraded=op.adjoint(y),
        extras={"mask": mask, "lines": lines},
    )


def inpainting_instance(size=128, missing_fraction=0.4, snr_db=40.0, seed=0, image=None):
    """Drop a random fraction of pixels; noise sigma set from the requested
    SNR relative to the observed pixels' power."""
    if not (0.0 < missing_fraction < 1.0):
        raise ValueError(f"missing_fraction must be in (0, 1), got {missing_fraction}")
    truth = cartoon(size) if image is None else _as_display_range(image)
    rng = np.random.default_rng(seed)
    observed = rng.random(truth.shape) >= missing_fraction
    op = PixelMask(observed)
    clean = op.forward(truth)
    sigma = math.sqrt(float(np.mean(clean**2)) * 10.0 ** (-snr_db / 10.0))
    y = add_noise(clean, sigma, seed + 1)
    eps = epsilon_rule(op.m, sigma)
    return ProblemInstance(
        name="inpaint",
        truth=truth,
        operator=op,
        observation=y,
        sigma=sigma,
        epsilon=eps,
        seed=seed,
        degraded=op.adjoint(y),
        extras={"mask": observed, "missing_fraction": missing_fraction},
    )


@dataclass
class RunSetup:
    """Everything needed to launch one solve."""

    name: str
    instance: ProblemInstance
    penalty: object
    formulation: str  # "direct" | "synthesis" | "analysis"
    frame: object
    config: SolverConfig


@dataclass
class ExperimentReport:
    """Outcome of one run: final metrics, call counts, and the full history."""

    name: str
    formulation: str
    penalty_kind: str
    status: str
    iterations: int
    epsilon: float
    sigma: float
    final_objective: float
    final_constraint_norm: float
    final_mse: float
    degraded_mse: float
    isnr_db: float
    relative_error: float
    forward_calls: int
    adjoint_calls: int
    history: list
    estimate: np.ndarray
    config: SolverConfig
    instance: ProblemInstance


# blur class -> (kernel kind, kernel variance, noise sigma)
BLUR_CLASSES = {
    "uniform": ("uniform", 1.0, 0.56),
    "gauss-lo": ("gaussian", 1.0, math.sqrt(2.0)),
    "gauss-hi": ("gaussian", 1.0, math.sqrt(8.0)),
    "iq-lo": ("inverse_quadratic", 1.0, math.sqrt(2.0)),
    "iq-hi": ("inverse_quadratic", 1.0, math.sqrt(8.0)),
}

# common shorthand for the five benchmark classes
_CLASS_ALIASES = {"1": "uniform", "2a": "gauss-lo", "2b": "gauss-hi",
                  "3a": "iq-lo", "3b": "iq-hi"}

_FORMULATION_TAG = {"direct": "tv", "synthesis": "syn", "analysis": "ana"}
_TAG_FORMULATION = {v: k for k, v in _FORMULATION_TAG.items()}

# per-family solver settings: (penalty weight mu, iteration budget,
# objective flatness tolerance), hand-tuned for fastest convergence at the
# default 128x128 size (tools/tune_mu.py reproduces the sweep)
_DEBLUR_SETTINGS = {
    ("uniform", "synthesis"): (2.0, 402, 2e-3),
    ("gauss-lo", "synthesis"): (1.0, 408, 2e-3),
    ("gauss-hi", "synthesis"): (1.0, 327, 2e-3),
    ("iq-lo", "synthesis"): (1.0, 174, 2e-3),
    ("iq-hi", "synthesis"): (1.0, 123, 5e-3),
    ("uniform", "analysis"): (2.0, 414, 1e-4),
    ("gauss-lo", "analysis"): (1.0, 327, 1e-4),
    ("gauss-hi", "analysis"): (1.0, 261, 1e-4),
    ("iq-lo", "analysis"): (1.5, 126, 2e-4),
    ("iq-hi", "analysis"): (1.0, 117, 2e-4),
    ("uniform", "direct"): (0.5, 696, 1e-4),
    ("gauss-lo", "direct"): (0.5, 450, 1e-4),
    ("gauss-hi", "direct"): (0.3, 300, 1e-4),
    ("iq-lo", "direct"): (1.0, 177, 5e-4),
    ("iq-hi", "direct"): (0.5, 111, 2e-3),
}

_FRAME_LEVELS = 4
_MU_PHANTOM = 150.0
_MU_SQUARES = 5.0
_MU_INPAINT = 0.05


def _deblur_setup(blur_class, formulation, size, seed, mu=None, iterations=None,
                  epsilon=None, sigma=None, kernel=None):
    kind, variance, noise_sigma = BLUR_CLASSES[blur_class]
    if kernel is not None:
        kind = kernel
    if sigma is not None:
        noise_sigma = sigma
    inst = deblur_instance(kind, noise_sigma, size=size, seed=seed, variance=variance)
    if epsilon is not None:
        inst.epsilon = float(epsilon)
    if formulation == "direct":
        penalty = IsotropicTV(iterations=10)
        frame = None
    else:
        penalty = L1Norm()
        frame = UndecimatedHaar(inst.truth.shape, levels=_FRAME_LEVELS)
    default_mu, budget, tol = _DEBLUR_SETTINGS[(blur_class, formulation)]
    config = SolverConfig(
        mu=default_mu if mu is None else mu,
        epsilon=inst.epsilon,
        max_iterations=budget if iterations is None else iterations,
        objective_rel_tol=tol,
        warm_start="observation",
    )
    name = f"deblur-{blur_class}-{_FORMULATION_TAG[formulation]}"
    return RunSetup(name=name, instance=inst, penalty=penalty,
                    formulation=formulation, frame=frame, config=config)


def _phantom_setup(size, seed, lines=None, mu=None, iterations=None, epsilon=None,
                   sigma=None):
    inst = fourier_phantom_instance(
        size=size,
        lines=22 if lines is None else lines,
        sigma=math.sqrt(0.5e-6) if sigma is None else sigma,
        seed=seed,
    )
    if epsilon is not None:
        inst.epsilon = float(epsilon)
    config = SolverConfig(
        mu=_MU_PHANTOM if mu is None else mu,
        epsilon=inst.epsilon,
        max_iterations=300 if iterations is None else iterations,
        warm_start="adjoint",
    )
    return RunSetup(name="mri", instance=inst,
                    penalty=IsotropicTV(iterations=10, warm_start=True),
                    formulation="direct", frame=None, config=config)


def _squares_setup(size, seed, lines=None, mu=None, iterations=None, epsilon=None,
                   sigma=None):
    inst = fourier_squares_instance(
        size=size,
        lines=27 if lines is None else lines,
        sigma=0.1 if sigma is None else sigma,
        seed=seed,
    )
    if epsilon is not None:
        inst.epsilon = float(epsilon)
    config = SolverConfig(
        mu=_MU_SQUARES if mu is None else mu,
        epsilon=inst.epsilon,
        max_iterations=150 if iterations is None else iterations,
        warm_start="adjoint",
    )
    return RunSetup(name="squares", instance=inst, penalty=IsotropicTV(iterations=10),
                    formulation="direct", frame=None, config=config)


def _inpaint_setup(size, seed, lines=None, mu=None, iterations=None, epsilon=None,
                   sigma=None):
    inst = inpainting_instance(size=size, seed=seed)
    if sigma is not None:
        inst.sigma = float(sigma)
        clean = inst.operator.forward(inst.truth)
        inst.observation = add_noise(clean, inst.sigma, seed + 1)
        inst.epsilon = epsilon_rule(inst.operator.m, inst.sigma)
        inst.degraded = inst.operator.adjoint(inst.observation)
    if epsilon is not None:
        inst.epsilon = float(epsilon)
    config = SolverConfig(
        mu=_MU_INPAINT if mu is None else mu,
        epsilon=inst.epsilon,
        max_iterations=200 if iterations is None else iterations,
        warm_start="adjoint",
    )
    return RunSetup(name="inpaint", instance=inst, penalty=IsotropicTV(iterations=10),
                    formulation="direct", frame=None, config=config)


def _register_experiments():
    catalog = {}
    for blur_class in BLUR_CLASSES:
        for formulation in ("synthesis", "analysis", "direct"):
            tag = _FORMULATION_TAG[formulation]
            catalog[f"deblur-{blur_class}-{tag}"] = (
                lambda size, seed, bc=blur_class, fm=formulation, **kw: _deblur_setup(
                    bc, fm, size or 128, seed, **kw
                )
            )
    catalog["mri"] = lambda size, seed, **kw: _phantom_setup(size or 128, seed, **kw)
    catalog["squares"] = lambda size, seed, **kw: _squares_setup(size or 128, seed, **kw)
    catalog["inpaint"] = lambda size, seed, **kw: _inpaint_setup(size or 128, seed, **kw)
    return catalog


EXPERIMENTS = _register_experiments()


def experiment_names():
    return sorted(EXPERIMENTS)


def canonical_experiment_name(name):
    """Resolve shorthand experiment names to their catalog entry.

    ``deblur-<class>`` (no formulation tag) defaults to the total-variation
    run, and the numeric class shorthands ``1``, ``2a``, ``2b``, ``3a``,
    ``3b`` map to the named blur classes, so e.g. ``deblur-1`` means
    ``deblur-uniform-tv``.
    """
    if name in EXPERIMENTS:
        return name
    if not name.startswith("deblur-"):
        return name
    rest = name[len("deblur-"):]
    tag = "tv"
    for candidate in _TAG_FORMULATION:
        if rest.endswith("-" + candidate):
            rest = rest[: -(len(candidate) + 1)]
            tag = candidate
            break
    blur_class = _CLASS_ALIASES.get(rest, rest)
    return f"deblur-{blur_class}-{tag}"


def build_experiment(name, size=None, seed=0, lines=None, mu=None, iterations=None,
                     epsilon=None, sigma=None, kernel=None):
    """Instantiate a catalog experiment, optionally overriding its knobs."""
    name = canonical_experiment_name(name)
    if name not in EXPERIMENTS:
        raise KeyError(
            f"unknown experiment {name!r}; available: {', '.join(experiment_names())}"
        )
    kwargs = {}
    if lines is not None:
        kwargs["lines"] = lines
    if mu is not None:
        kwargs["mu"] = mu
    if iterations is not None:
        kwargs["iterations"] = iterations
    if epsilon is not None:
        kwargs["epsilon"] = epsilon
    if sigma is not None:
        kwargs["sigma"] = sigma
    if kernel is not None:
        kwargs["kernel"] = kernel
    if lines is not None and name.startswith("deblur"):
        raise ValueError("--lines only applies to Fourier-sampled experiments")
    if kernel is not None and not name.startswith("deblur"):
        raise ValueError("--kernel only applies to deblurring experiments")
    return EXPERIMENTS[name](size, seed, **kwargs)


def run_experiment(setup, truth_metrics=True, counting=True):
    """Solve one RunSetup and assemble the report."""
    inst = setup.instance
    base_op = inst.operator
    if setup.formulation == "synthesis":
        op = SynthesisOperator(base_op, setup.frame)
    else:
        op = base_op
    counted = CountingOperator(op) if counting else op
    truth = inst.truth if truth_metrics else None
    if setup.formulation == "analysis":
        result = solve_analysis(counted, setup.frame, inst.observation, setup.penalty,
                                setup.config, truth=truth)
    else:
        result = solve_penalized(counted, inst.observation, setup.penalty,
                                 setup.config, truth=truth)
    estimate = result.estimate
    final_mse = mse(estimate, inst.truth)
    degraded_mse = mse(inst.degraded, inst.truth) if inst.degraded is not None else float("nan")
    if inst.degraded is not None and np.shape(inst.degraded) == np.shape(inst.truth):
        isnr_db = isnr(inst.degraded, estimate, inst.truth)
    else:
        isnr_db = float("nan")
    last = result.history[-1]
    return ExperimentReport(
        name=setup.name,
        formulation=setup.formulation,
        penalty_kind=setup.penalty.kind,
        status=result.status,
        iterations=result.iterations,
        epsilon=inst.epsilon,
        sigma=inst.sigma,
        final_objective=last.objective,
        final_constraint_norm=last.constraint_norm,
        final_mse=final_mse,
        degraded_mse=degraded_mse,
        isnr_db=isnr_db,
        relative_error=relative_error(estimate, inst.truth),
        forward_calls=counted.forward_calls if counting else -1,
        adjoint_calls=counted.adjoint_calls if counting else -1,
        history=result.history,
        estimate=estimate,
        config=setup.config,
        instance=inst,
    )
