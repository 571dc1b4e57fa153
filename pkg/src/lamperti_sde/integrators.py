"""One-step maps and trajectory drivers.

Schemes: the Lamperti-splitting integrator with exact ODE flow (``ls-exact``)
or Euler substep (``ls-euler``), and the baselines Euler-Maruyama (``em``),
semi-implicit Euler-Maruyama (``sem``) and tamed Euler (``te``).

All steppers are pure and accept scalar or vector states, so independent
Monte Carlo samples can be advanced as one array.  LS state is kept in
transformed coordinates across steps; original-coordinate values are produced
by mapping through the inverse transform.
"""

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import SdeModel, TimeGrid

__all__ = [
    "SchemeKind",
    "SCHEME_IDS",
    "Trajectory",
    "SubstepReport",
    "SolverFailure",
    "euler_ode_substep",
    "ls_step",
    "em_step",
    "sem_step",
    "te_step",
    "simulate_trajectory",
    "reconstruct_via_representation",
    "estimate_substep_constant",
]


class SchemeKind(str, Enum):
    LS_EXACT = "ls-exact"
    LS_EULER = "ls-euler"
    EM = "em"
    SEM = "sem"
    TE = "te"


SCHEME_IDS = tuple(s.value for s in SchemeKind)


class SolverFailure(RuntimeError):
    """Implicit solve did not reach the residual target."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Trajectory:
    """Scheme output on a uniform grid, in original coordinates."""

    grid: TimeGrid
    values: np.ndarray
    scheme: SchemeKind
    y_values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.values) != self.grid.steps + 1:
            raise ValueError("values length must be steps + 1")


@dataclass(frozen=True)
class SubstepReport:
    """Empirical local-error constant of the Euler ODE substep.

    ``constant`` is the max over probe points y of
    |euler(y, dt) - exact_flow(y, dt)| / (sqrt(1 + y^2) dt^2).
    """

    constant: float
    dt: float


def euler_ode_substep(H, y, dt):
    """One explicit Euler step y + dt * H(y) for the ODE dy/dt = H(y)."""
    if np.any(np.asarray(dt) < 0.0):
        raise ValueError("dt must be nonnegative")
    return y + dt * H(y)


def _ode_advance(model: SdeModel, variant: str, y, dt, substeps: int):
    if variant == "exact":
        if model.exact_flow is None:
            raise ValueError(f"model {model.name!r} has no exact flow")
        return model.exact_flow(y, dt)
    if variant == "euler":
        h = dt / substeps
        for _ in range(substeps):
            y = euler_ode_substep(model.transformed_drift, y, h)
        return y
    raise ValueError(f"unknown LS variant {variant!r}")


def ls_step(model: SdeModel, variant: str, y_m, dt, dB, substeps: int = 1):
    """One Lamperti-splitting step in transformed coordinates.

    Advances the ODE dy/dt = H(y) over [0, dt] (exactly or by ``substeps``
    Euler steps), then applies the Brownian-with-drift shift
    ``+ mu * dt + dB``.  ``dB`` is the displacement of the transformed
    process, i.e. noise_scale times the raw Brownian increment; trajectory
    drivers apply that scaling.
    """
    y = _ode_advance(model, variant, y_m, dt, substeps)
    return y + model.split_constant * dt + dB

def em_step(model: SdeModel, x_m, dt, dB):
    """Explicit Euler-Maruyama step; may leave the domain."""
    return x_m + model.drift(x_m) * dt + model.diffusion(x_m) * dB


def sem_step(model: SdeModel, x_m, dt, dB, max_iter: int = 50):
    """Semi-implicit Euler-Maruyama step: drift implicit, diffusion explicit.

    Solves xi = x_m + f(xi) dt + g(x_m) dB by damped Newton iteration from
    the explicit predictor, with a bisection fallback on a bracket around the
    predictor.  Residual target 1e-12 * (1 + |xi|).

    Raises
    ------
    SolverFailure
        If neither Newton nor the bisection fallback converges.
    """
    x_arr = np.asarray(x_m, dtype=float)
    c = x_arr + model.diffusion(x_arr) * dB
    if np.all(np.asarray(dt) == 0.0):
        return c if np.ndim(x_m) else float(c)

    def residual(xi):
        return xi - model.drift(xi) * dt - c

    xi = c + model.drift(x_arr) * dt  # explicit predictor
    res = residual(xi)
    fd_h = 1e-7
    converged = np.zeros_like(np.asarray(xi), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            converged = np.abs(res) <= 1e-12 * (1.0 + np.abs(xi))
            if np.all(converged):
                break
            deriv = (residual(xi + fd_h) - residual(xi - fd_h)) / (2.0 * fd_h)
            deriv = np.where(np.abs(deriv) < 1e-14, 1.0, deriv)
            step = res / deriv
            # Damping: halve the step until the residual does not grow.
            new_xi = xi - step
            new_res = residual(new_xi)
            for _ in range(30):
                worse = (np.abs(new_res) > np.abs(res)) & ~converged
                if not np.any(worse):
                    break
                step = np.where(worse, 0.5 * step, step)
                new_xi = xi - step
                new_res = residual(new_xi)
            xi = np.where(converged, xi, new_xi)
            res = residual(xi)
        converged = np.abs(res) <= 1e-12 * (1.0 + np.abs(xi))
    if not np.all(converged):
        xi = np.asarray(xi, dtype=float).reshape(-1)
        res = np.asarray(res, dtype=float).reshape(-1)
        bad = np.flatnonzero(~np.asarray(converged).reshape(-1))
        pred = np.asarray(c + model.drift(x_arr) * dt).reshape(-1)
        f_pred = np.abs(np.asarray(model.drift(x_arr) * dt)).reshape(-1)
        for i in bad:
            xi[i] = _sem_bisect(residual, pred[i], 4.0 * (f_pred[i] + 1.0) * dt, res[i])
        xi = xi.reshape(np.shape(c)) if np.ndim(c) else xi[0]
    if np.ndim(x_m) == 0:
        return float(xi)
    return xi


def _sem_bisect(residual, center, width, res_at_fail):
    lo, hi = center - width, center + width
    rlo, rhi = residual(lo), residual(hi)
    for _ in range(10):  # widen until the bracket straddles a root
        if rlo * rhi <= 0.0:
            break
        width *= 2.0
        lo, hi = center - width, center + width
        rlo, rhi = residual(lo), residual(hi)
    else:
        raise SolverFailure("implicit step: no sign change in bracket", abs(res_at_fail))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        rmid = residual(mid)
        if abs(rmid) <= 1e-12 * (1.0 + abs(mid)):
            return mid
        if rlo * rmid <= 0.0:
            hi, rhi = mid, rmid
        else:
            lo, rlo = mid, rmid
    raise SolverFailure("implicit step: bisection stalled", abs(residual(0.5 * (lo + hi))))


def te_step(model: SdeModel, x_m, dt, dB, total_steps: int):
    """Tamed Euler step: drift and diffusion share one taming denominator."""
    if total_steps < 1:
        raise ValueError("total_steps must be at least 1")
    f = model.drift(x_m)
    g = model.diffusion(x_m)
    denom = 1.0 + (np.abs(f) + np.abs(g) ** 2) / np.sqrt(total_steps)
    return x_m + (f / denom) * dt + (g / denom) * dB


def simulate_trajectory(
    model: SdeModel,
    scheme: SchemeKind,
    x0,
    grid: TimeGrid,
    increments: np.ndarray,
    substeps: int = 1,
) -> Trajectory:
    """Run one scheme over the full grid driven by the given increments.

    ``increments`` are raw Brownian increments, one per grid interval.  For
    the LS variants the initial condition must be strictly interior and every
    produced value is strictly interior.
    """
    scheme = SchemeKind(scheme)
    increments = np.asarray(increments, dtype=float)
    if len(increments) != grid.steps:
        raise ValueError("increments length must equal grid.steps")
    dt = grid.dt
    x0_arr = np.asarray(x0, dtype=float)
    shape = (grid.steps + 1,) + np.shape(x0_arr)
    values = np.empty(shape)
    values[0] = x0_arr
    if scheme in (SchemeKind.LS_EXACT, SchemeKind.LS_EULER):
        if not np.all((x0_arr > model.domain.lower) & (x0_arr < model.domain.upper)):
            raise ValueError("LS schemes require a strictly interior x0")
        variant = "exact" if scheme is SchemeKind.LS_EXACT else "euler"
        y_values = np.empty(shape)
        y = model.transform(x0_arr)
        y_values[0] = y
        lam = model.noise_scale
        for m in range(grid.steps):
            y = ls_step(model, variant, y, dt, lam * increments[m], substeps=substeps)
            y_values[m + 1] = y
            values[m + 1] = model.inverse_transform(y)
        return Trajectory(grid=grid, values=values, scheme=scheme, y_values=y_values)
    x = x0_arr
    with np.errstate(all="ignore"):
        for m in range(grid.steps):
            if scheme is SchemeKind.EM:
                x = em_step(model, x, dt, increments[m])
            elif scheme is SchemeKind.SEM:
                x = sem_step(model, x, dt, increments[m])
            else:
                x = te_step(model, x, dt, increments[m], total_steps=grid.steps)
            values[m + 1] = x
    return Trajectory(grid=grid, values=values, scheme=scheme)


def reconstruct_via_representation(
    model: SdeModel, x0, grid: TimeGrid, increments: np.ndarray, substeps: int = 1
):
    """Terminal transformed value via the telescoped accumulation.

    Accumulates Y(0) + sum of per-step ODE-substep advances + sum of
    Brownian-with-drift shifts, which telescopes the LS-Euler recursion; the
    result matches the recursive terminal value up to round-off.
    """
    increments = np.asarray(increments, dtype=float)
    if len(increments) != grid.steps:
        raise ValueError("increments length must equal grid.steps")
    if not np.all((np.asarray(x0) > model.domain.lower) & (np.asarray(x0) < model.domain.upper)):
        raise ValueError("requires a strictly interior x0")
    dt = grid.dt
    lam = model.noise_scale
    y0 = model.transform(np.asarray(x0, dtype=float))
    y = y0
    drift_advances = 0.0
    shifts = 0.0
    for m in range(grid.steps):
        advanced = _ode_advance(model, "euler", y, dt, substeps)
        drift_advances = drift_advances + (advanced - y)
        shifts = shifts + (model.split_constant * dt + lam * increments[m])
        y = advanced + model.split_constant * dt + lam * increments[m]
    return y0 + drift_advances + shifts


def estimate_substep_constant(
    model: SdeModel, dt: float = 1e-3, probes: Optional[np.ndarray] = None
) -> SubstepReport:
    """Empirical local-error constant of the one-step Euler substep.

    Compares the Euler substep with the exact ODE flow over one interval at
    probe points; the constant normalizes by sqrt(1 + y^2) dt^2.
    """
    if model.exact_flow is None:
        raise ValueError("substep constant estimation needs an exact flow")
    if probes is None:
        probes = np.linspace(-5.0, 5.0, 41)
    probes = np.asarray(probes, dtype=float)
    exact = np.asarray(model.exact_flow(probes, dt), dtype=float)
    euler = euler_ode_substep(model.transformed_drift, probes, dt)
    err = np.abs(euler - exact) / (np.sqrt(1.0 + probes ** 2) * dt ** 2)
    constant = float(np.max(err))
    return SubstepReport(constant=constant, dt=float(dt))


def warn_if_step_restriction_violated(report: SubstepReport, horizon: float, dt: float):
    """Advisory check of the fully-discrete analysis step-size restriction."""
    if report.constant * horizon * dt > 1.0:
        warnings.warn(
            "substep constant * T * dt exceeds 1; the fully-discrete "
            "convergence analysis assumes a smaller step",
            RuntimeWarning,
            stacklevel=2,
        )
