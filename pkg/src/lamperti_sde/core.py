"""Domain, grid and Brownian-path primitives plus the SDE model abstraction.

Every integrator in the package consumes an :class:`SdeModel`, which bundles a
scalar SDE on a bounded open interval with its Lamperti transform pair, the
transformed drift, the splitting constant and (optionally) the exact flow of
the transformed-drift ODE.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.special import ndtri

__all__ = [
    "Domain",
    "SdeModel",
    "TimeGrid",
    "BrownianPath",
    "AuditCheck",
    "AuditReport",
    "make_uniform_grid",
    "sample_brownian_path",
    "coarsen_increments",
    "audit_model",
]

# Brownian increments are quantized to multiples of 2**-30 so that block sums
# of any grouping are exact in double precision (all partial sums stay far
# below 2**53 quanta).  Coarsening by any factor is then bit-associative.
_INCREMENT_QUANTUM = 2.0 ** -30


@dataclass(frozen=True)
class Domain:
    """Bounded open state space (lower, upper)."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("domain requires lower < upper")

    def contains(self, x) -> bool:
        """Strict interior membership test."""
        x = np.asarray(x, dtype=float)
        return bool(np.all((x > self.lower) & (x < self.upper)))


@dataclass(frozen=True)
class SdeModel:
    """A scalar SDE dX = f(X) dt + g(X) dB on a bounded domain.

    ``diffusion`` includes the noise scale (g = noise_scale * g_base); the
    transform pair is built from the unscaled g_base, so the transformed
    process satisfies dY = (H(Y) + mu) dt + noise_scale dB.

    All callables accept floats or numpy arrays.  ``exact_flow(y, dt)``
    solves dy/dt = H(y) exactly over [0, dt] when available.
    """

    name: str
    domain: Domain
    noise_scale: float
    drift: Callable
    diffusion: Callable
    transform: Callable
    inverse_transform: Callable
    transformed_drift: Callable
    split_constant: float
    drift_bound: float
    exact_flow: Optional[Callable] = None

    def __post_init__(self):
        if not self.noise_scale > 0.0:
            raise ValueError("noise_scale must be positive")
        if not self.drift_bound >= 0.0:
            raise ValueError("drift_bound must be nonnegative")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < ... < t_M = horizon with dt = horizon / steps."""

    horizon: float
    steps: int

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.steps > 0 and not self.horizon > 0.0:
            raise ValueError("horizon must be positive")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps if self.steps else 0.0

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt


@dataclass(frozen=True)
class BrownianPath:
    """Fine-grid Gaussian increments with deterministic per-sample seeding.

    ``increments[i]`` is distributed N(0, horizon / fine_steps).  The array is
    a pure function of (seed, sample_index, fine_steps, horizon).
    """

    seed: int
    sample_index: int
    fine_steps: int
    horizon: float
    increments: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.increments) != self.fine_steps:
            raise ValueError("increments length must equal fine_steps")
        self.increments.setflags(write=False)


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    detail: str


AuditReport = List[AuditCheck]


def make_uniform_grid(horizon: float, steps: int) -> TimeGrid:
    """Uniform partition of [0, horizon] into ``steps`` intervals."""
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    return TimeGrid(horizon=float(horizon), steps=int(steps))


def _path_rng(seed: int, sample_index: int, stream: int) -> np.random.Generator:
    # Counter-based generator keyed by (seed, sample_index, stream): samples
    # are reproducible and independent regardless of execution order.
    ss = np.random.SeedSequence(entropy=(int(seed), int(sample_index), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def sample_brownian_path(
    seed: int, sample_index: int, fine_steps: int, horizon: float
) -> BrownianPath:
    """Deterministic Brownian increments for one Monte Carlo sample.

    Normals are drawn by inverse CDF applied to uniforms of the form
    (k + 1/2) / 2**53 so the sampler never touches 0 or 1, then scaled to
    variance horizon / fine_steps and quantized to multiples of 2**-30
    (see module note on exact coarsening).
    """
    if fine_steps < 1:
        raise ValueError("fine_steps must be at least 1")
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    rng = _path_rng(seed, sample_index, stream=0)
    u = (rng.integers(0, 2 ** 53, size=fine_steps, dtype=np.uint64) + 0.5) * 2.0 ** -53
    z = ndtri(u)
    inc = z * math.sqrt(horizon / fine_steps)
    inc = np.rint(inc / _INCREMENT_QUANTUM) * _INCREMENT_QUANTUM
    return BrownianPath(
        seed=int(seed),
        sample_index=int(sample_index),
        fine_steps=int(fine_steps),
        horizon=float(horizon),
        increments=inc,
    )


def sample_uniform_initial(seed: int, sample_index: int, domain: Domain) -> float:
    """Uniform draw on the open interior, from a stream independent of the
    path stream but keyed by the same (seed, sample_index)."""
    rng = _path_rng(seed, sample_index, stream=1)
    u = (int(rng.integers(0, 2 ** 53, dtype=np.uint64)) + 0.5) * 2.0 ** -53
    return domain.lower + (domain.upper - domain.lower) * u


def coarsen_increments(path: BrownianPath, factor: int) -> np.ndarray:
    """Sum consecutive blocks of ``factor`` fine increments.

    The quantized representation makes the block sums exact, so coarsening
    commutes with itself and conserves the terminal Brownian value bit for
    bit.
    """
    factor = int(factor)
    if factor < 1 or path.fine_steps % factor != 0:
        raise ValueError("factor must divide fine_steps")
    return path.increments.reshape(-1, factor).sum(axis=1)


def audit_model(model: SdeModel, probes: int = 101) -> AuditReport:
    """Numerical validity audit of a model against the standing assumptions.

    Checks, at probe points: the diffusion is nonvanishing with constant sign
    on the interior; |f/g| stays bounded along a geometric approach to each
    boundary; the inverse transform maps a wide range of reals strictly into
    the interior; the transform pair round-trips; and |H + mu| respects the
    declared drift bound.  Failures are reported, never raised.
    """
    if probes < 3:
        raise ValueError("probes must be at least 3")
    checks: List[AuditCheck] = []
    lo, hi = model.domain.lower, model.domain.upper
    width = hi - lo

    # Interior probe points, kept away from the exact boundary.
    xs = lo + width * np.linspace(0.01, 0.99, probes)
    with np.errstate(all="ignore"):
        g = np.asarray(model.diffusion(xs), dtype=float)
    sign_definite = bool(np.all(g > 0.0) or np.all(g < 0.0))
    checks.append(
        AuditCheck(
            "diffusion-nonvanishing-sign-definite",
            sign_definite,
            f"min |g| = {np.min(np.abs(g)):.3e}",
        )
    )

    # Geometric approach to either boundary: l + w*10^-k and r - w*10^-k.
    ks = np.arange(2, 9)
    approach = np.concatenate([lo + width * 10.0 ** -ks, hi - width * 10.0 ** -ks])
    with np.errstate(all="ignore"):
        ratio = np.abs(
            np.asarray(model.drift(approach), dtype=float)
            / np.asarray(model.diffusion(approach), dtype=float)
        )
    ratio_ok = bool(np.all(np.isfinite(ratio)) and np.max(ratio) < 1e3)
    checks.append(
        AuditCheck(
            "drift-diffusion-ratio-bounded-near-boundary",
            ratio_ok,
            f"max |f/g| = {np.max(ratio):.3e}",
        )
    )

    ys_wide = np.linspace(-700.0, 700.0, probes)
    with np.errstate(all="ignore"):
        x_img = np.asarray(model.inverse_transform(ys_wide), dtype=float)
    range_ok = bool(np.all((x_img > lo) & (x_img < hi)))
    checks.append(
        AuditCheck(
            "inverse-transform-range-interior",
            range_ok,
            f"image in [{np.min(x_img):.17g}, {np.max(x_img):.17g}]",
        )
    )

    # Tolerance is limited by conditioning: at |y| ~ 12 the image sits within
    # a few hundred ulps of a boundary, so round-off in x alone can move the
    # recovered y by ~1e-7 for domains reaching machine-representable edges.
    ys = np.linspace(-12.0, 12.0, probes)
    with np.errstate(all="ignore"):
        rt = np.asarray(model.transform(model.inverse_transform(ys)), dtype=float)
    rt_err = np.max(np.abs(rt - ys) / (1.0 + np.abs(ys)))
    checks.append(
        AuditCheck(
            "transform-round-trip",
            bool(rt_err <= 1e-6),
            f"max relative round-trip error = {rt_err:.3e}",
        )
    )

    ys_h = np.linspace(-50.0, 50.0, probes)
    h_shift = np.abs(
        np.asarray(model.transformed_drift(ys_h), dtype=float) + model.split_constant
    )
    bound_ok = bool(np.max(h_shift) <= model.drift_bound * (1.0 + 1e-12))
    checks.append(
        AuditCheck(
            "shifted-drift-within-bound",
            bound_ok,
            f"max |H+mu| = {np.max(h_shift):.6g} vs bound {model.drift_bound:.6g}",
        )
    )
    return checks
