"""Principal-branch Lambert W for nonnegative arguments.

``lambert_w0`` solves w * exp(w) = x by Halley iteration; the companion
``lambert_w0_from_log`` accepts log(x) so the exact ODE flow maps can be
evaluated when the raw argument would overflow a double.  Both functions
accept scalars or numpy arrays.
"""

import numpy as np

__all__ = ["lambert_w0", "lambert_w0_from_log"]

# Halley iteration limits.  Cubic convergence: a handful of iterations
# suffices for any double input once the initial guess is in the basin.
_MAX_ITER = 50
_STEP_TOL = 1e-15

# exp() overflows just above 709.78; beyond this we solve w + log(w) = log(x)
# directly instead of forming x.
_LOG_DIRECT_MAX = 700.0


def _halley(w, x):
    """Halley steps on f(w) = w*exp(w) - x, vectorized, all inputs arrays."""
    for _ in range(_MAX_ITER):
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        # Halley update for f with f' = (w+1)e^w, f'' = (w+2)e^w.
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w = w - step
        if np.all(np.abs(step) <= _STEP_TOL * (1.0 + np.abs(w))):
            break
    return w


def lambert_w0(x):
    """Principal branch W(x) for x >= 0, so that W * exp(W) = x.

    Parameters
    ----------
    x : float or ndarray
        Nonnegative argument(s).

    Returns
    -------
    float or ndarray
        W(x) >= 0 with residual |W*exp(W) - x| <= 1e-12 * (1 + x).

    Raises
    ------
    ValueError
        If any entry of x is negative (the branch region in (-1/e, 0)
        is not implemented) or NaN.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0.0):
        raise ValueError("lambert_w0 requires x >= 0")
    w = np.where(x_arr < np.e, x_arr, 1.0)
    big = x_arr >= np.e
    if np.any(big):
        lx = np.log(np.where(big, x_arr, np.e))
        w = np.where(big, lx - np.log(lx), w)
    w = _halley(w, x_arr)
    # W(0) = 0 exactly; the iteration already fixes it but keep it clean.
    w = np.where(x_arr == 0.0, 0.0, w)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(w)
    return w


def lambert_w0_from_log(ln_x):
    """W(exp(ln_x)) without forming exp(ln_x).

    For moderate ``ln_x`` this simply evaluates ``lambert_w0(exp(ln_x))``;
    for large ``ln_x`` it solves w + log(w) = ln_x by Newton iteration,
    which is the defining identity of W in log form.

    Parameters
    ----------
    ln_x : float or ndarray
        Natural log of the (positive) argument.  May be any finite value;
        -inf is accepted and maps to 0.

    Returns
    -------
    float or ndarray
        W(exp(ln_x)).
    """
    l_arr = np.asarray(ln_x, dtype=float)
    if np.any(np.isnan(l_arr)):
        raise ValueError("lambert_w0_from_log requires non-NaN input")
    out = np.empty_like(l_arr)
    small = l_arr <= _LOG_DIRECT_MAX
    if np.any(small):
        out[small] = np.asarray(lambert_w0(np.exp(l_arr[small])))
    big = ~small
    if np.any(big):
        lb = l_arr[big]
        # Newton on F(w) = w + log(w) - ln_x, F'(w) = 1 + 1/w.
        w = lb - np.log(lb)
        for _ in range(_MAX_ITER):
            step = (w + np.log(w) - lb) / (1.0 + 1.0 / w)
            w = w - step
            if np.all(np.abs(step) <= _STEP_TOL * (1.0 + np.abs(w))):
                break
        out[big] = w
    if np.isscalar(ln_x) or np.ndim(ln_x) == 0:
        return float(out)
    return out
