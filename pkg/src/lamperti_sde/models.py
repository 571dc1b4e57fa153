"""The three built-in SDEs on bounded domains, with closed-form machinery.

Each factory returns an :class:`~lamperti_sde.core.SdeModel` whose transform
pair, transformed drift, splitting constant and exact ODE flow are given in
closed form.  The convention throughout:

* the model's ``diffusion`` already includes the noise scale lambda
  (g = lambda * g_base),
* the transform is built from the unscaled g_base, so the transformed
  process satisfies dY = (H(Y) + mu) dt + lambda dB.

The exact flows of dy/dt = H(y) involve the principal-branch Lambert W
function for the SIS and Nagumo models; their arguments are evaluated in log
space so initial values near a boundary do not overflow.
"""

from dataclasses import dataclass

import numpy as np

from .core import Domain, SdeModel
from .lambertw import lambert_w0_from_log

__all__ = [
    "SisParams",
    "NagumoParams",
    "AllenCahnParams",
    "sis_model",
    "nagumo_model",
    "allen_cahn_model",
    "sis_exact_flow",
    "nagumo_exact_flow",
    "allen_cahn_exact_flow",
    "ls_one_step_closed_form",
    "make_model",
    "MODEL_IDS",
]

MODEL_IDS = ("sis", "nagumo", "allen-cahn")


@dataclass(frozen=True)
class SisParams:
    """Logistic drift/diffusion pair f = x(1-x), g = lambda x(1-x) on (0,1)."""

    noise_scale: float
    anchor: float = 0.5

    def __post_init__(self):
        if not self.noise_scale > 0.0:
            raise ValueError("noise_scale must be positive")
        if not 0.0 < self.anchor < 1.0:
            raise ValueError("anchor must lie in (0, 1)")


@dataclass(frozen=True)
class NagumoParams:
    """Cubic drift f = -x(1-x)^2 with g = -lambda x(1-x) on (0,1)."""

    noise_scale: float
    anchor: float = 0.5

    def __post_init__(self):
        if not self.noise_scale > 0.0:
            raise ValueError("noise_scale must be positive")
        if not 0.0 < self.anchor < 1.0:
            raise ValueError("anchor must lie in (0, 1)")


@dataclass(frozen=True)
class AllenCahnParams:
    """Double-well drift f = x - x^3 with g = lambda (1-x^2) on (-1,1).

    The transform anchor is fixed at 0, which makes the transform pair the
    inverse/forward hyperbolic tangent.
    """

    noise_scale: float

    def __post_init__(self):
        if not self.noise_scale > 0.0:
            raise ValueError("noise_scale must be positive")


def _interior_clip(x, domain: Domain):
    # Keep values strictly inside the open interval: a value that rounds
    # exactly onto a boundary is nudged to the adjacent representable double.
    lo = np.nextafter(domain.lower, domain.upper)
    hi = np.nextafter(domain.upper, domain.lower)
    return np.clip(x, lo, hi)


def _require_interior(x, domain: Domain):
    x = np.asarray(x, dtype=float)
    if not np.all((x > domain.lower) & (x < domain.upper)):
        raise ValueError("state must be strictly inside the domain")


# ---------------------------------------------------------------------------
# SIS
# ---------------------------------------------------------------------------

def sis_exact_flow(p: SisParams, y_m, dt):
    """Exact solution at time dt of dy/dt = lambda^2 * inv_transform(y).

    Evaluates W(u * exp(u - lambda^2 dt)) with u = r * exp(-y_m) in log
    space, where r = (1 - anchor) / anchor.
    """
    if np.any(np.asarray(dt) < 0.0):
        raise ValueError("dt must be nonnegative")
    if np.all(np.asarray(dt) == 0.0):
        return y_m
    lam2 = p.noise_scale ** 2
    log_r = np.log1p(-p.anchor) - np.log(p.anchor)
    y_arr = np.asarray(y_m, dtype=float)
    log_u = log_r - y_arr
    # deep below the anchor H(y) ~ lam^2 exp(-log_u) is beyond double
    # resolution relative to y, so the flow is the identity there; this also
    # keeps exp(log_u) from overflowing
    frozen = log_u > 700.0
    safe_log_u = np.where(frozen, 0.0, log_u)
    u = np.exp(safe_log_u)
    ln_arg = safe_log_u + u - lam2 * dt
    w = lambert_w0_from_log(ln_arg)
    return np.where(frozen, y_arr, w + lam2 * dt + y_arr - u)


def sis_model(p: SisParams) -> SdeModel:
    """SIS epidemic SDE dX = X(1-X) dt + lambda X(1-X) dB on (0,1)."""
    dom = Domain(0.0, 1.0)
    lam = p.noise_scale
    lam2 = lam ** 2
    r = (1.0 - p.anchor) / p.anchor
    log_r = np.log1p(-p.anchor) - np.log(p.anchor)

    def transform(x):
        return np.log(x) - np.log1p(-x) + log_r

    def inverse_transform(y):
        y = np.asarray(y, dtype=float)
        t = np.exp(-np.abs(y))
        x = np.where(y >= 0.0, 1.0 / (1.0 + r * t), t / (t + r))
        return _interior_clip(x, dom)

    def transformed_drift(y):
        return lam2 * inverse_transform(y)

    return SdeModel(
        name="sis",
        domain=dom,
        noise_scale=lam,
        drift=lambda x: x * (1.0 - x),
        diffusion=lambda x: lam * x * (1.0 - x),
        transform=transform,
        inverse_transform=inverse_transform,
        transformed_drift=transformed_drift,
        split_constant=1.0 - lam2 / 2.0,
        # sup |H + mu| = 1 + lam^2/2; lam^2 is the conventional bound for
        # lam >= sqrt(2), keep the max so the bound is valid for all lam.
        drift_bound=max(lam2, 1.0 + lam2 / 2.0),
        exact_flow=lambda y, dt: sis_exact_flow(p, y, dt),
    )


# ---------------------------------------------------------------------------
# Nagumo
# ---------------------------------------------------------------------------

def nagumo_exact_flow(p: NagumoParams, y_m, dt):
    """Exact solution at time dt of dy/dt = -(1 + lambda^2) inv_transform(y)."""
    if np.any(np.asarray(dt) < 0.0):
        raise ValueError("dt must be nonnegative")
    if np.all(np.asarray(dt) == 0.0):
        return y_m
    c = 1.0 + p.noise_scale ** 2
    log_r = np.log1p(-p.anchor) - np.log(p.anchor)
    y_arr = np.asarray(y_m, dtype=float)
    log_u = log_r + y_arr
    # far above the anchor |H(y)| ~ c exp(-log_u) vanishes at double
    # precision, so the flow is the identity; also avoids exp overflow
    frozen = log_u > 700.0
    safe_log_u = np.where(frozen, 0.0, log_u)
    u = np.exp(safe_log_u)
    ln_arg = safe_log_u + u - c * dt
    w = lambert_w0_from_log(ln_arg)
    return np.where(frozen, y_arr, -w - c * dt + y_arr + u)


def nagumo_model(p: NagumoParams) -> SdeModel:
    """Nagumo SDE dX = -X(1-X)^2 dt - lambda X(1-X) dB on (0,1).

    The diffusion is negative on the interior, so the transform is
    decreasing and its inverse is order-reversing.
    """
    dom = Domain(0.0, 1.0)
    lam = p.noise_scale
    c = 1.0 + lam ** 2
    r = (1.0 - p.anchor) / p.anchor
    log_r = np.log1p(-p.anchor) - np.log(p.anchor)

    def transform(x):
        return np.log1p(-x) - np.log(x) - log_r

    def inverse_transform(y):
        y = np.asarray(y, dtype=float)
        t = np.exp(-np.abs(y))
        x = np.where(y <= 0.0, 1.0 / (1.0 + r * t), t / (t + r))
        return _interior_clip(x, dom)

    def transformed_drift(y):
        return -c * inverse_transform(y)

    return SdeModel(
        name="nagumo",
        domain=dom,
        noise_scale=lam,
        drift=lambda x: -x * (1.0 - x) ** 2,
        diffusion=lambda x: -lam * x * (1.0 - x),
        transform=transform,
        inverse_transform=inverse_transform,
        transformed_drift=transformed_drift,
        split_constant=1.0 + lam ** 2 / 2.0,
        drift_bound=c,
        exact_flow=lambda y, dt: nagumo_exact_flow(p, y, dt),
    )


# ---------------------------------------------------------------------------
# Allen-Cahn
# ---------------------------------------------------------------------------

def allen_cahn_exact_flow(p: AllenCahnParams, y_m, dt):
    """Exact solution at time dt of dy/dt = (1 + lambda^2) tanh(y).

    The flow is odd in y_m, so the formula is evaluated for |y_m| and the
    sign restored, keeping all exponentials nonnegative.
    """
    if np.any(np.asarray(dt) < 0.0):
        raise ValueError("dt must be nonnegative")
    if np.all(np.asarray(dt) == 0.0):
        return y_m
    theta = (1.0 + p.noise_scale ** 2) * np.asarray(dt, dtype=float)
    y_arr = np.asarray(y_m, dtype=float)
    a = np.abs(y_arr)
    with np.errstate(divide="ignore"):
        # log(e^theta * 2 sinh a), written to survive large a.
        big_log = theta + a + np.log1p(-np.exp(-2.0 * a))
    safe = np.where(big_log > 700.0, 0.0, big_log)
    q = np.exp(safe)
    with np.errstate(divide="ignore"):
        direct = np.log(0.5 * (np.hypot(q, 2.0) + q))
    out = np.where(big_log > 700.0, big_log, direct)
    out = np.where(a == 0.0, 0.0, out)
    result = np.sign(y_arr) * out
    if np.ndim(y_m) == 0 and np.ndim(dt) == 0:
        return float(result)
    return result


def allen_cahn_model(p: AllenCahnParams) -> SdeModel:
    """Allen-Cahn SDE dX = (X - X^3) dt + lambda (1-X^2) dB on (-1,1)."""
    dom = Domain(-1.0, 1.0)
    lam = p.noise_scale
    c = 1.0 + lam ** 2

    def inverse_transform(y):
        return _interior_clip(np.tanh(y), dom)

    return SdeModel(
        name="allen-cahn",
        domain=dom,
        noise_scale=lam,
        drift=lambda x: x - x ** 3,
        diffusion=lambda x: lam * (1.0 - x ** 2),
        transform=np.arctanh,
        inverse_transform=inverse_transform,
        transformed_drift=lambda y: c * np.tanh(y),
        split_constant=0.0,
        drift_bound=c,
        exact_flow=lambda y, dt: allen_cahn_exact_flow(p, y, dt),
    )


# ---------------------------------------------------------------------------
# One-step maps in original coordinates
# ---------------------------------------------------------------------------

def ls_one_step_closed_form(model_kind: str, params, x_m, dt, dB):
    """One Lamperti-splitting step in original coordinates.

    Uses the per-model composed closed forms (transform, exact ODE flow,
    Brownian shift with drift, inverse transform collapsed into a single
    expression).  ``dB`` is the raw Brownian increment; the noise scale is
    applied internally.  Agrees with the generic
    transform -> exact_flow -> shift -> inverse pipeline to round-off.
    """
    x = np.asarray(x_m, dtype=float)
    scalar = np.ndim(x_m) == 0
    lam = params.noise_scale
    if model_kind == "sis":
        dom = Domain(0.0, 1.0)
        _require_interior(x, dom)
        lam2 = lam ** 2
        u = (1.0 - x) / x
        ln_arg = np.log1p(-x) - np.log(x) + u - lam2 * dt
        w = np.asarray(lambert_w0_from_log(ln_arg))
        ln_shift = (1.0 - lam2 / 2.0) * dt + lam * np.asarray(dB)
        with np.errstate(divide="ignore"):
            out = 1.0 / (1.0 + np.exp(np.log(w) - ln_shift))
    elif model_kind == "nagumo":
        dom = Domain(0.0, 1.0)
        _require_interior(x, dom)
        c = 1.0 + lam ** 2
        u = (1.0 - x) / x
        ln_arg = np.log1p(-x) - np.log(x) + u - c * dt
        w = np.asarray(lambert_w0_from_log(ln_arg))
        ln_shift = (1.0 + lam ** 2 / 2.0) * dt + lam * np.asarray(dB)
        with np.errstate(divide="ignore"):
            out = 1.0 / (1.0 + np.exp(np.log(w) + ln_shift))
    elif model_kind == "allen-cahn":
        dom = Domain(-1.0, 1.0)
        _require_interior(x, dom)
        theta = (1.0 + lam ** 2) * np.asarray(dt, dtype=float)
        q_w = (1.0 - x) * (1.0 + x)
        s = x * np.exp(theta)
        root = np.hypot(s, np.sqrt(q_w))
        with np.errstate(divide="ignore"):
            ln_v = np.where(
                x >= 0.0,
                2.0 * np.log(root + s),
                2.0 * (np.log(q_w) - np.log(root + np.abs(s))),
            )
            out = np.tanh(0.5 * (ln_v + 2.0 * lam * np.asarray(dB) - np.log(q_w)))
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    out = _interior_clip(out, dom)
    return float(out) if scalar else out


_FACTORIES = {
    "sis": (SisParams, sis_model),
    "nagumo": (NagumoParams, nagumo_model),
    "allen-cahn": (AllenCahnParams, allen_cahn_model),
}


def make_model(model_id: str, noise_scale: float, anchor: float = 0.5) -> SdeModel:
    """Build a model by string id: "sis" | "nagumo" | "allen-cahn"."""
    if model_id not in _FACTORIES:
        raise ValueError(
            f"unknown model id {model_id!r}; valid ids: {', '.join(MODEL_IDS)}"
        )
    params_cls, factory = _FACTORIES[model_id]
    if model_id == "allen-cahn":
        return factory(params_cls(noise_scale=noise_scale))
    return factory(params_cls(noise_scale=noise_scale, anchor=anchor))
