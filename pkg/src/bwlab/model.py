"""Model spaces: single-particle spectra, the two-particle tensor basis,
and model interaction matrices.

The single-particle spectrum is a finite stand-in for a Dirac-like spectrum:
every state carries a sign label (+ for positive-energy, - for
negative-energy states) and energies are pairwise distinct.  Two-particle
states are ordered pairs (i, j) flattened row-major with j varying fastest,
so pair (i, j) sits at flat index i * n + j.

Interaction matrices are dense, symmetric, and independent of the relative
energy; they are scaled by their coupling on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

#: sign patterns in basis order for a pair (i, j)
PATTERNS = ("pp", "pm", "mp", "mm")

#: named interaction presets
PRESETS = ("ones", "random-symmetric")

SYMMETRY_TOL = 1e-14


@dataclass(frozen=True)
class SingleParticleSpectrum:
    """Model eigenvalues with positive/negative classification.

    energies: state energies, positives first, then negatives (input order).
    signs:    +1 or -1 per state, consistent with the sign of the energy.
    """

    energies: tuple
    signs: tuple

    def __post_init__(self):
        if len(self.energies) != len(self.signs):
            raise ConfigError("energies and signs must have equal length")
        if not self.energies:
            raise ConfigError("spectrum must contain at least one state")
        for e, s in zip(self.energies, self.signs):
            if e == 0.0:
                raise ConfigError("zero energy is not allowed")
            if s not in (+1, -1):
                raise ConfigError("sign labels must be +1 or -1")
            if np.sign(e) != s:
                raise ConfigError(f"energy {e} does not match sign label {s}")
        if len(set(self.energies)) != len(self.energies):
            raise ConfigError("duplicate energy in spectrum")

    @property
    def n(self):
        return len(self.energies)

    @classmethod
    def from_lists(cls, positives, negatives):
        energies = tuple(float(e) for e in positives) + tuple(float(e) for e in negatives)
        signs = (+1,) * len(positives) + (-1,) * len(negatives)
        for e in positives:
            if e <= 0:
                raise ConfigError(f"positive list contains non-positive energy {e}")
        for e in negatives:
            if e >= 0:
                raise ConfigError(f"negative list contains non-negative energy {e}")
        return cls(energies, signs)


@dataclass(frozen=True)
class TwoParticleBasis:
    """Tensor-product pair basis over a spectrum.

    pairs[k] = (i, j) with k = i * n + j (row-major, j fastest).
    patterns[k] in {"pp", "pm", "mp", "mm"} according to the sign labels.
    """

    spectrum: SingleParticleSpectrum
    pairs: tuple = field(init=False)
    patterns: tuple = field(init=False)

    def __post_init__(self):
        n = self.spectrum.n
        pairs = tuple((i, j) for i in range(n) for j in range(n))
        tags = {+1: "p", -1: "m"}
        pats = tuple(
            tags[self.spectrum.signs[i]] + tags[self.spectrum.signs[j]] for i, j in pairs
        )
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "patterns", pats)

    @property
    def dim(self):
        return self.spectrum.n ** 2

    def flat_index(self, i, j):
        return i * self.spectrum.n + j

    def pair_energies(self):
        """(dim,) array of e_i + e_j in basis order."""
        e = np.asarray(self.spectrum.energies)
        return np.array([e[i] + e[j] for i, j in self.pairs])

    def pattern_indices(self, pattern):
        return tuple(k for k, p in enumerate(self.patterns) if p == pattern)


@dataclass(frozen=True)
class ModelConfig:
    """Couplings and matrix specs for the model interactions.

    coulomb_matrix / delta_matrix are either a preset name ("ones",
    "random-symmetric") or an explicit symmetric matrix of shape
    (n^2, n^2).  Random presets are seeded deterministically; the coulomb
    and delta channels derive distinct streams from the same seed.
    """

    positive_energies: tuple
    negative_energies: tuple
    coulomb_scale: float = 0.1
    delta_scale: float = 0.05
    coulomb_matrix: object = "ones"
    delta_matrix: object = "ones"
    seed: int = 1

    def __post_init__(self):
        if self.coulomb_scale < 0:
            raise ConfigError("coulomb_scale must be >= 0")
        if self.delta_scale < 0:
            raise ConfigError("delta_scale must be >= 0")
        for name, spec in (("coulomb", self.coulomb_matrix), ("delta", self.delta_matrix)):
            if isinstance(spec, str):
                if spec not in PRESETS:
                    raise ConfigError(f"unknown {name} preset '{spec}'")

    def scaled(self, factor):
        """Copy with both couplings multiplied by factor (coupling scans)."""
        return ModelConfig(
            positive_energies=self.positive_energies,
            negative_energies=self.negative_energies,
            coulomb_scale=factor * self.coulomb_scale,
            delta_scale=factor * self.delta_scale,
            coulomb_matrix=self.coulomb_matrix,
            delta_matrix=self.delta_matrix,
            seed=self.seed,
        )


def build_spectrum(config: ModelConfig) -> SingleParticleSpectrum:
    """Spectrum from a model config.  Both sign classes must be populated."""
    if not config.positive_energies:
        raise ConfigError("spectrum needs at least one positive energy")
    if not config.negative_energies:
        raise ConfigError("spectrum needs at least one negative energy")
    return SingleParticleSpectrum.from_lists(config.positive_energies, config.negative_energies)


def build_basis(spectrum: SingleParticleSpectrum) -> TwoParticleBasis:
    return TwoParticleBasis(spectrum)


def dirac_like_energies(n_each=2, mass=1.0, step=0.5):
    """Default spectrum preset: positives {m + k d}, negatives {-m - k d}.

    The +-2m gap keeps unmixed-pair denominators away from zero for the
    default couplings.
    """
    pos = tuple(mass + k * step for k in range(n_each))
    neg = tuple(-mass - k * step for k in range(n_each))
    return pos, neg


def _base_matrix(spec, dim, seed, channel):
    if isinstance(spec, str):
        if spec == "ones":
            return np.ones((dim, dim))
        if spec == "random-symmetric":
            rng = np.random.default_rng([seed, channel])
            m = rng.uniform(-1.0, 1.0, size=(dim, dim))
            return 0.5 * (m + m.T)
        raise ConfigError(f"unknown preset '{spec}'")
    m = np.asarray(spec, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError("explicit interaction matrix must be square")
    if m.shape[0] != dim:
        raise ConfigError(f"interaction matrix is {m.shape[0]}x{m.shape[0]}, basis needs {dim}x{dim}")
    if not np.allclose(m, m.T, rtol=0.0, atol=SYMMETRY_TOL * max(1.0, np.abs(m).max())):
        raise ConfigError("explicit interaction matrix is not symmetric")
    return 0.5 * (m + m.T)


def build_interaction(config: ModelConfig, kind: str) -> np.ndarray:
    """Scaled interaction matrix lambda * M for kind in {"coulomb", "delta"}.

    M is symmetric by construction; the output scales linearly (and exactly)
    in the coupling.
    """
    if kind not in ("coulomb", "delta"):
        raise ConfigError(f"unknown interaction kind '{kind}'")
    spectrum = build_spectrum(config)
    dim = spectrum.n ** 2
    if kind == "coulomb":
        lam, spec, channel = config.coulomb_scale, config.coulomb_matrix, 0
    else:
        lam, spec, channel = config.delta_scale, config.delta_matrix, 1
    return lam * _base_matrix(spec, dim, config.seed, channel)
