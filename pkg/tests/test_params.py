"""Parameter scaling, validation, and dB conversion."""

import dataclasses
import math

import numpy as np
import pytest

from squeezekit.params import (
    ALPHA_MAX,
    C_VACUUM,
    PhysicalCavity,
    ScaledOpoParams,
    db_to_linear,
    demod_to_scaled,
    detection_efficiency,
    linear_to_db,
    scale_params,
)


def test_k_tot_is_pi_times_linewidth(cavity):
    assert cavity.k_tot == pytest.approx(math.pi * 8e6, rel=1e-15)


def test_escape_efficiency(cavity):
    # T/(T+L) for T=0.078, L=0.0055
    assert cavity.escape_efficiency == pytest.approx(0.078 / 0.0835, rel=1e-15)


def test_lossless_cavity_escape_is_unity():
    c = PhysicalCavity(8e6, 0.078, 0.0)
    assert c.escape_efficiency == 1.0


def test_demod_scaling_matches_linewidth_convention():
    # 2 MHz demod on an 8 MHz cavity sits at half the amplitude decay rate
    assert demod_to_scaled(2e6, math.pi * 8e6) == pytest.approx(0.5, rel=1e-15)


def test_demod_scaling_rejects_bad_inputs():
    with pytest.raises(ValueError):
        demod_to_scaled(-1.0, 1.0)
    with pytest.raises(ValueError):
        demod_to_scaled(1e6, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(linewidth_fwhm_hz=0.0, output_coupler_transmission=0.1, round_trip_loss=0.0),
        dict(linewidth_fwhm_hz=8e6, output_coupler_transmission=0.0, round_trip_loss=0.01),
        dict(linewidth_fwhm_hz=8e6, output_coupler_transmission=1.0, round_trip_loss=0.0),
        dict(linewidth_fwhm_hz=8e6, output_coupler_transmission=0.5, round_trip_loss=0.5),
        dict(linewidth_fwhm_hz=8e6, output_coupler_transmission=0.1, round_trip_loss=-0.1),
    ],
)
def test_cavity_rejects_nonphysical_inputs(kwargs):
    with pytest.raises(ValueError):
        PhysicalCavity(**kwargs)


def test_scale_params_wiring(cavity):
    p = scale_params(cavity, alpha_mag=0.3, pump_phase=0.4, eta_det=0.9)
    assert p.eta == pytest.approx(cavity.escape_efficiency)
    assert p.alpha_mag == 0.3
    assert p.pump_phase == 0.4
    assert p.eta_det == 0.9
    assert p.k_tot == cavity.k_tot
    assert p.alpha == pytest.approx(0.3 * np.exp(0.4j))


def test_scaled_params_frozen(quiet_params):
    with pytest.raises(dataclasses.FrozenInstanceError):
        quiet_params.alpha_mag = 0.1


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(eta=0.0, alpha_mag=0.1),
        dict(eta=1.1, alpha_mag=0.1),
        dict(eta=0.9, alpha_mag=-0.1),
        dict(eta=0.9, alpha_mag=ALPHA_MAX + 1e-6),
        dict(eta=0.9, alpha_mag=1.5),
        dict(eta=0.9, alpha_mag=0.1, eta_det=0.0),
        dict(eta=0.9, alpha_mag=0.1, eta_det=1.2),
        dict(eta=0.9, alpha_mag=0.1, k_tot=0.0),
    ],
)
def test_scaled_params_validation(kwargs):
    with pytest.raises(ValueError):
        ScaledOpoParams(**kwargs)


def test_detection_efficiency_product():
    assert detection_efficiency(0.98, 0.95) == pytest.approx(0.98**2 * 0.95, rel=1e-15)
    with pytest.raises(ValueError):
        detection_efficiency(1.2, 0.95)
    with pytest.raises(ValueError):
        detection_efficiency(0.98, 0.0)


def test_db_conversion_reference_points():
    assert linear_to_db(1.0) == 0.0
    assert linear_to_db(1.0 / 9.0) == pytest.approx(-9.5424250943932487, rel=1e-12)
    # -2.50 dB corresponds to 0.5623 in linear power
    assert db_to_linear(-2.5) == pytest.approx(0.5623413251903491, rel=1e-12)


def test_db_conversion_round_trip():
    x = np.geomspace(1e-6, 1e3, 37)
    assert np.allclose(db_to_linear(linear_to_db(x)), x, rtol=1e-12)


def test_db_conversion_rejects_nonpositive():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(np.array([1.0, -2.0]))


def test_vacuum_speed_of_light_exact():
    assert C_VACUUM == 299792458.0
