"""Monte Carlo harness: boundary-preservation tables and strong-error curves.

Samples are keyed by (seed, sample_index) so results are a pure function of
the configuration and seed; schemes compared within one sample share the same
Brownian path and initial condition (coupled comparison).  Strong errors are
measured against a reference Lamperti-splitting run on a refinement of the
same path.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    BrownianPath,
    SdeModel,
    TimeGrid,
    make_uniform_grid,
    sample_brownian_path,
    sample_uniform_initial,
)
from .integrators import SchemeKind, Trajectory, simulate_trajectory
from .models import make_model

__all__ = [
    "InitialCondition",
    "BoundaryStats",
    "ErrorReport",
    "boundary_experiment",
    "reference_trajectory",
    "strong_error_experiment",
    "fit_convergence_rate",
    "path_comparison",
]

_ERROR_BATCHES = 10


@dataclass(frozen=True)
class InitialCondition:
    """Fixed interior value or uniform draw on the open interior.

    The uniform stream is keyed by the same (seed, sample_index) as the
    sample's Brownian path but is independent of it.
    """

    kind: str
    value: Optional[float] = None

    @staticmethod
    def fixed(x0: float) -> "InitialCondition":
        return InitialCondition(kind="fixed", value=float(x0))

    @staticmethod
    def uniform() -> "InitialCondition":
        return InitialCondition(kind="uniform")

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform"):
            raise ValueError("init kind must be 'fixed' or 'uniform'")
        if self.kind == "fixed" and self.value is None:
            raise ValueError("fixed init requires a value")


@dataclass(frozen=True)
class BoundaryStats:
    """Count of sample paths that stayed strictly inside the domain."""

    model: str
    scheme: str
    noise_scale: float
    samples: int
    preserved: int

    def __post_init__(self):
        if not 0 <= self.preserved <= self.samples:
            raise ValueError("preserved must lie in [0, samples]")


@dataclass(frozen=True)
class ErrorReport:
    """Strong sup-norm errors per step size, with a fitted log-log slope."""

    model: str
    scheme: str
    noise_scale: float
    p: float
    dt_list: Tuple[float, ...]
    errors: Tuple[float, ...]
    stderrs: Tuple[float, ...]
    samples: int
    reference_dt: float
    fitted_slope: float


def _draw_initial(init: InitialCondition, model: SdeModel, seed: int, index: int) -> float:
    if init.kind == "fixed":
        if not model.domain.contains(init.value):
            raise ValueError("fixed initial value must be strictly interior")
        return init.value
    return sample_uniform_initial(seed, index, model.domain)


def _ensemble_inputs(
    model: SdeModel, steps: int, horizon: float, n_samples: int, seed: int, init: InitialCondition
) -> Tuple[np.ndarray, np.ndarray]:
    """Increment matrix of shape (steps, n_samples) and x0 vector."""
    cols = [
        sample_brownian_path(seed, i, steps, horizon).increments for i in range(n_samples)
    ]
    increments = np.stack(cols, axis=1)
    x0 = np.array([_draw_initial(init, model, seed, i) for i in range(n_samples)])
    return increments, x0


def _preserved_count(traj: Trajectory, model: SdeModel) -> int:
    v = traj.values
    inside = (v > model.domain.lower) & (v < model.domain.upper)
    # NaN/inf compare false, so exploded paths count as violations.
    return int(np.sum(np.all(inside, axis=0)))


def boundary_experiment(
    model_id: str,
    schemes: Sequence[str],
    noise_scales: Sequence[float],
    horizon: float,
    dt: float,
    n_samples: int,
    seed: int,
    init: InitialCondition,
    anchor: float = 0.5,
) -> List[BoundaryStats]:
    """Count boundary-preserving sample paths per (noise scale, scheme).

    All schemes and noise scales reuse the same per-sample Brownian path and
    initial condition, so rows are directly comparable.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    steps = _steps_from_dt(horizon, dt)
    grid = make_uniform_grid(horizon, steps)
    stats: List[BoundaryStats] = []
    for lam in noise_scales:
        model = make_model(model_id, lam, anchor)
        increments, x0 = _ensemble_inputs(model, steps, horizon, n_samples, seed, init)
        for scheme in schemes:
            traj = simulate_trajectory(model, SchemeKind(scheme), x0, grid, increments)
            stats.append(
                BoundaryStats(
                    model=model_id,
                    scheme=SchemeKind(scheme).value,
                    noise_scale=float(lam),
                    samples=n_samples,
                    preserved=_preserved_count(traj, model),
                )
            )
    return stats


def reference_trajectory(
    model: SdeModel, x0, fine_path: BrownianPath, coarse_grid: TimeGrid
) -> Trajectory:
    """Coupled reference solution restricted to the coarse grid points.

    Runs the LS scheme (exact-flow variant when the model provides one) on
    the fine grid of ``fine_path`` and subsamples at coarse grid indices.
    """
    if fine_path.fine_steps % coarse_grid.steps != 0:
        raise ValueError("fine grid must nest the coarse grid")
    if not np.isclose(fine_path.horizon, coarse_grid.horizon):
        raise ValueError("fine path and coarse grid must share the horizon")
    k = fine_path.fine_steps // coarse_grid.steps
    fine_grid = make_uniform_grid(fine_path.horizon, fine_path.fine_steps)
    scheme = SchemeKind.LS_EXACT if model.exact_flow is not None else SchemeKind.LS_EULER
    fine_traj = simulate_trajectory(model, scheme, x0, fine_grid, fine_path.increments)
    return Trajectory(
        grid=coarse_grid,
        values=fine_traj.values[::k],
        scheme=scheme,
        y_values=fine_traj.y_values[::k],
    )


def _steps_from_dt(horizon: float, dt: float) -> int:
    steps = round(horizon / dt)
    if steps < 1 or not np.isclose(steps * dt, horizon, rtol=1e-9, atol=0.0):
        raise ValueError(f"dt = {dt} must divide the horizon {horizon}")
    return steps


def strong_error_experiment(
    model_id: str,
    scheme: str,
    noise_scale: float,
    horizon: float,
    dt_list: Sequence[float],
    ref_refinement: int = 64,
    n_samples: int = 300,
    p: float = 2.0,
    seed: int = 0,
    init: Optional[InitialCondition] = None,
    anchor: float = 0.5,
) -> ErrorReport:
    """Coupled strong sup-error estimate over a ladder of step sizes.

    For each sample one fine Brownian path drives both the reference LS run
    (at every dt in the ladder divided by nothing -- the fine grid refines
    the smallest dt by ``ref_refinement``) and the scheme under test at each
    coarse dt, via exact block sums of the fine increments.  Errors are
    p-th moment roots of the per-sample sup over coarse grid points; the
    Monte Carlo standard error is estimated from 10 batches.
    """
    if init is None:
        init = InitialCondition.uniform()
    if ref_refinement < 16:
        raise ValueError("ref_refinement must be at least 16")
    if p < 1.0:
        raise ValueError("p must be at least 1")
    dts = [float(d) for d in dt_list]
    if sorted(dts, reverse=True) != dts or len(set(dts)) != len(dts):
        raise ValueError("dt_list must be strictly decreasing")
    coarse_steps = [_steps_from_dt(horizon, d) for d in dts]
    fine_steps = coarse_steps[-1] * ref_refinement
    if any(fine_steps % m for m in coarse_steps):
        raise ValueError("the reference grid must nest every dt in dt_list")
    model = make_model(model_id, noise_scale, anchor)
    scheme = SchemeKind(scheme)
    increments, x0 = _ensemble_inputs(model, fine_steps, horizon, n_samples, seed, init)
    fine_grid = make_uniform_grid(horizon, fine_steps)
    ref_scheme = SchemeKind.LS_EXACT if model.exact_flow is not None else SchemeKind.LS_EULER
    ref = simulate_trajectory(model, ref_scheme, x0, fine_grid, increments)
    errors, stderrs = [], []
    for steps in coarse_steps:
        k = fine_steps // steps
        coarse_inc = increments.reshape(steps, k, n_samples).sum(axis=1)
        grid = make_uniform_grid(horizon, steps)
        traj = simulate_trajectory(model, scheme, x0, grid, coarse_inc)
        sup_err = np.max(np.abs(traj.values - ref.values[::k]), axis=0)
        errors.append(float(np.mean(sup_err ** p) ** (1.0 / p)))
        batches = np.array_split(sup_err, _ERROR_BATCHES)
        batch_est = np.array([np.mean(b ** p) ** (1.0 / p) for b in batches])
        stderrs.append(float(np.std(batch_est, ddof=1) / np.sqrt(len(batch_est))))
    slope = fit_convergence_rate(dts, errors)
    return ErrorReport(
        model=model_id,
        scheme=scheme.value,
        noise_scale=float(noise_scale),
        p=float(p),
        dt_list=tuple(dts),
        errors=tuple(errors),
        stderrs=tuple(stderrs),
        samples=n_samples,
        reference_dt=fine_grid.dt,
        fitted_slope=slope,
    )


def fit_convergence_rate(dt_list: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    dts = np.asarray(dt_list, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if len(dts) < 3 or len(errs) != len(dts):
        raise ValueError("need at least 3 (dt, error) points")
    if np.any(errs <= 0.0):
        raise ValueError("errors must be positive to fit a log-log slope")
    slope, _ = np.polyfit(np.log(dts), np.log(errs), 1)
    return float(slope)


def path_comparison(
    model_id: str,
    noise_scale: float,
    x0: float,
    horizon: float,
    steps: int,
    seed: int,
    anchor: float = 0.5,
) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """One Brownian path pushed through LS and every baseline scheme.

    Returns the grid points and a column per scheme id ("ls" is the
    Euler-substep LS variant).
    """
    model = make_model(model_id, noise_scale, anchor)
    grid = make_uniform_grid(horizon, steps)
    path = sample_brownian_path(seed, 0, steps, horizon)
    columns: Dict[str, np.ndarray] = {}
    pairs = [
        ("ls", SchemeKind.LS_EULER),
        ("em", SchemeKind.EM),
        ("sem", SchemeKind.SEM),
        ("te", SchemeKind.TE),
    ]
    for name, scheme in pairs:
        traj = simulate_trajectory(model, scheme, x0, grid, path.increments)
        columns[name] = traj.values
    return grid.points, columns
