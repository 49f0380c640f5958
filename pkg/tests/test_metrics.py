import math

import numpy as np
import pytest

from boundarylab.metrics import brier, calib_error, log_loss


def test_log_loss_perfect_prediction_up_to_clip():
    assert log_loss([0], [1e-12]) == pytest.approx(1e-12, rel=1e-4)


def test_log_loss_and_brier_closed_form():
    assert log_loss([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), rel=1e-12)
    assert brier([1, 0], [0.5, 0.5]) == 0.25


def test_log_loss_clips_zero_probability():
    assert log_loss([1], [0.0]) == pytest.approx(-math.log(1e-12), rel=1e-12)


def test_length_mismatch():
    for metric in (log_loss, brier, calib_error):
        with pytest.raises(ValueError):
            metric([0, 1], [0.5])


def test_calib_error_well_calibrated():
    rng = np.random.default_rng(3)
    p = rng.random(20_000)
    y = (rng.random(20_000) < p).astype(float)
    assert calib_error(y, p) < 0.02


def test_calib_error_miscalibrated():
    rng = np.random.default_rng(4)
    p = np.full(1000, 0.9)
    y = (rng.random(1000) < 0.1).astype(float)
    assert calib_error(y, p) == pytest.approx(abs(0.9 - y.mean()), rel=1e-12)


def test_brier_bounds():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 2, 100).astype(float)
    p = rng.random(100)
    assert 0.0 <= brier(y, p) <= 1.0
