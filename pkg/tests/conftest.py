import numpy as np
import pytest

from bwlab import (
    IntegrationSettings,
    ModelConfig,
    build_basis,
    build_interaction,
    build_spectrum,
)


@pytest.fixture
def dim4_config():
    """Canonical dim-4 fixture: spectrum {+1.0, -1.2}, ones presets."""
    return ModelConfig(
        positive_energies=(1.0,),
        negative_energies=(-1.2,),
        coulomb_scale=0.1,
        delta_scale=0.05,
    )


@pytest.fixture
def dim4(dim4_config):
    spectrum = build_spectrum(dim4_config)
    basis = build_basis(spectrum)
    I_c = build_interaction(dim4_config, "coulomb")
    g = build_interaction(dim4_config, "delta")
    return spectrum, basis, I_c, g


@pytest.fixture
def settings():
    return IntegrationSettings()


def random_spectrum(rng, max_each=3):
    """Well-separated random spectrum with n <= 2 * max_each states."""
    n_pos = int(rng.integers(1, max_each + 1))
    n_neg = int(rng.integers(1, max_each + 1))
    pos = np.sort(rng.uniform(0.5, 3.0, size=n_pos))
    neg = -np.sort(rng.uniform(0.5, 3.0, size=n_neg))
    pos = pos + 0.01 * np.arange(n_pos)  # enforce distinctness
    neg = neg - 0.01 * np.arange(n_neg)
    return tuple(pos), tuple(neg)


def energy_away_from_poles(rng, spectrum, lo=-4.0, hi=6.0, min_gap=0.3):
    sums = {a + b for a in spectrum.energies for b in spectrum.energies}
    while True:
        E = float(rng.uniform(lo, hi))
        if all(abs(E - s) > min_gap for s in sums):
            return E
