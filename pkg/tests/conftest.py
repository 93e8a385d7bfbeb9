"""Shared fixtures: the reference cavity and the shipped default config."""

import pytest

from squeezekit.config import default_config_path, load_config
from squeezekit.params import PhysicalCavity, scale_params


@pytest.fixture(scope="session")
def cavity():
    """8 MHz linewidth OPO with T=7.8%, L=0.55%."""
    return PhysicalCavity(
        linewidth_fwhm_hz=8e6,
        output_coupler_transmission=0.078,
        round_trip_loss=0.0055,
        free_spectral_range_hz=504e6,
    )


@pytest.fixture(scope="session")
def default_cfg():
    return load_config(default_config_path())


@pytest.fixture(scope="session")
def default_params(default_cfg):
    return default_cfg.scaled_params()


@pytest.fixture(scope="session")
def quiet_params(cavity):
    """Reference cavity driven at |alpha|=0.5, ideal detection."""
    return scale_params(cavity, alpha_mag=0.5)
