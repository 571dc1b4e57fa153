"""Tests for the principal-branch Lambert W evaluation."""

import numpy as np
import pytest

from lamperti_sde import lambert_w0, lambert_w0_from_log

# Root of w * e^w = 1, frozen from a bisection oracle (recomputed below).
OMEGA = 0.5671432904097838

# Root of w + log(w) = 800, frozen from a Newton oracle on the log form.
W_LOG_800 = 793.3237685784889


def _bisect_w(target: float, lo: float, hi: float, iters: int = 200) -> float:
    f = lambda w: w * np.exp(w) - target
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_w_of_zero_is_zero():
    assert lambert_w0(0.0) == 0.0


def test_w_of_e_is_one():
    assert abs(lambert_w0(np.e) - 1.0) <= 1e-14


def test_w_of_one_matches_bisection_oracle():
    oracle = _bisect_w(1.0, 0.0, 1.0)
    assert abs(oracle - OMEGA) <= 1e-14
    assert abs(lambert_w0(1.0) - oracle) <= 1e-13


def test_defining_identity_on_log_spaced_grid():
    x = np.logspace(-300.0, 300.0, 100_000)
    w = lambert_w0(x)
    residual = np.abs(w * np.exp(w) - x)
    assert np.all(residual <= 1e-12 * (1.0 + x))


def test_strictly_increasing():
    x = np.logspace(-12.0, 12.0, 20_001)
    w = lambert_w0(x)
    assert np.all(np.diff(w) > 0.0)


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        lambert_w0(-0.5)
    with pytest.raises(ValueError):
        lambert_w0(np.array([1.0, -1e-12]))


def test_nan_rejected():
    with pytest.raises(ValueError):
        lambert_w0(float("nan"))


def test_from_log_at_one():
    assert abs(lambert_w0_from_log(1.0) - 1.0) <= 1e-10


def test_from_log_at_zero_matches_direct():
    direct = lambert_w0(1.0)
    assert abs(lambert_w0_from_log(0.0) - direct) <= 1e-10 * (1.0 + direct)


def test_from_log_huge_argument():
    w = lambert_w0_from_log(800.0)
    # defining identity in log form, plus the frozen Newton oracle value
    assert abs(w + np.log(w) - 800.0) <= 1e-10 * 800.0
    assert abs(w - W_LOG_800) <= 1e-9


def test_from_log_agrees_with_direct_evaluation():
    x = np.logspace(-6.0, 6.0, 5_000)
    direct = lambert_w0(x)
    via_log = lambert_w0_from_log(np.log(x))
    assert np.all(np.abs(via_log - direct) <= 1e-10 * (1.0 + np.abs(direct)))


def test_from_log_minus_infinity_is_zero():
    assert lambert_w0_from_log(-np.inf) == 0.0
