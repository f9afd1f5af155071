"""Shared fixtures: the two reference parameter sets used across the suite."""

import math

import pytest

from kerrdimer import CircuitParams, PumpTone

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def device():
    """Asymmetric single-port device used for the characterization targets."""
    return CircuitParams(
        omega_L=TWO_PI * 8.299e9,
        omega_R=TWO_PI * 8.368e9,
        J=TWO_PI * 95e6,
        kappa=TWO_PI * 44e6,
        gamma=TWO_PI * 0.1e6,
        K_L=-TWO_PI * 2.9e3,
        K_R=-TWO_PI * 3.2e3,
        kappa_R=0.0,
    )


@pytest.fixture(scope="session")
def symmetric():
    """Lossless symmetric two-port model.

    J = 0.4 kappa keeps the mean-field power ramp fold-free for negative
    Kerr, so the pump-tuning search follows a single smooth branch.
    """
    k = TWO_PI * 44e6
    return CircuitParams(
        omega_L=TWO_PI * 8.3e9,
        omega_R=TWO_PI * 8.3e9,
        J=0.4 * k,
        kappa=k,
        gamma=0.0,
        K_L=-TWO_PI * 3.0e3,
        K_R=-TWO_PI * 3.0e3,
        kappa_R=k,
    )


@pytest.fixture(scope="session")
def gain_tone_symmetric():
    return PumpTone(TWO_PI * 8.3e9, 1e-11)
