"""Relative-energy propagator algebra.

For a pair (i, j) at total energy E the inverse free propagator is

    F(eps) = (E/2 + eps - e_i) (E/2 - eps - e_j)

so F^-1 = S1 S2 with the electron propagators

    S1(eps) = 1 / (E/2 + eps - e_i + i eta sign(e_i))
    S2(eps) = 1 / (E/2 - eps - e_j + i eta sign(e_j))

The Feynman shifts put S1 poles of positive-energy states below the real
axis (at eps = e - E/2) and S2 poles of positive-energy states above it
(at eps = E/2 - e); negative-energy states mirror.  S1^-1 + S2^-1 =
E - e_i - e_j independently of eps, which is the identity behind
F^-1 = D^-1 (S1 + S2).

Everything integrated here is a product of such factors with constant
matrices in between, so the integrals reduce to residue sums over simple
or confluent poles (residues module).  The closed forms are validated
against the independent numerical quadrature oracle (quadrature module).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iproduct

import numpy as np

from .errors import ConfigError
from .model import SingleParticleSpectrum, TwoParticleBasis
from .residues import LOWER, UPPER, pole_product_integral

DEFAULT_ETA_SEQUENCE = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


@dataclass(frozen=True)
class IntegrationSettings:
    """Quadrature and series-truncation controls.

    eta_sequence drives the eta -> 0 extrapolation of the oracle; eta is
    the base regulator (largest member).  The quadrature range is
    [-L, L] with L = cutoff_factor * max|e|.  j_order is the truncation
    K of the interaction-kernel geometric series.
    """

    eta_sequence: tuple = DEFAULT_ETA_SEQUENCE
    quadrature_points: int = 16
    cutoff_factor: float = 1e4
    j_order: int = 2
    eta: float = field(init=False)

    def __post_init__(self):
        if not self.eta_sequence:
            raise ConfigError("eta_sequence must be nonempty")
        seq = tuple(float(x) for x in self.eta_sequence)
        if any(x <= 0 for x in seq):
            raise ConfigError("eta values must be > 0")
        if list(seq) != sorted(seq, reverse=True):
            raise ConfigError("eta_sequence must be strictly decreasing")
        if self.quadrature_points < 4:
            raise ConfigError("quadrature_points must be >= 4")
        if self.cutoff_factor < 100:
            raise ConfigError("cutoff_factor must be >= 100 (cutoff >= 100 max|e|)")
        if self.j_order < 1:
            raise ConfigError("j_order must be >= 1")
        object.__setattr__(self, "eta_sequence", seq)
        object.__setattr__(self, "eta", seq[0])

    def refined(self, extra_levels=1):
        """Settings with extra halved eta levels (high-precision checks)."""
        seq = list(self.eta_sequence)
        for _ in range(extra_levels):
            seq.append(seq[-1] / 2.0)
        return IntegrationSettings(
            eta_sequence=tuple(seq),
            quadrature_points=max(self.quadrature_points, 24),
            cutoff_factor=self.cutoff_factor,
            j_order=self.j_order,
        )

    def cutoff(self, spectrum: SingleParticleSpectrum) -> float:
        return self.cutoff_factor * max(abs(e) for e in spectrum.energies)


def propagator_S(spectrum, basis, E, eps, particle, eta):
    """Diagonal of the chosen electron propagator on the two-particle basis.

    particle 1 depends on the row state i, particle 2 on the column state
    j of the pair (i, j); eta = 0 is allowed away from poles.
    """
    if particle not in (1, 2):
        raise ValueError("particle must be 1 or 2")
    e = np.asarray(spectrum.energies)
    out = np.empty(basis.dim, dtype=complex)
    for k, (i, j) in enumerate(basis.pairs):
        if particle == 1:
            out[k] = 1.0 / (E / 2 + eps - e[i] + 1j * eta * np.sign(e[i]))
        else:
            out[k] = 1.0 / (E / 2 - eps - e[j] + 1j * eta * np.sign(e[j]))
    return out


def finv_diag(spectrum, basis, E, eps, eta=0.0):
    """Entrywise F^-1 = S1 S2 on the pair basis."""
    return propagator_S(spectrum, basis, E, eps, 1, eta) * propagator_S(
        spectrum, basis, E, eps, 2, eta
    )


def _pair_pole_factors(e_i, e_j, E):
    """Pole factors of F^-1 for one pair: [(pos, side), (pos, side)] and the
    S2 sign is accounted for by the caller (one -1 per pair)."""
    s1 = (e_i - E / 2, LOWER if e_i > 0 else UPPER)
    s2 = (E / 2 - e_j, UPPER if e_j > 0 else LOWER)
    return s1, s2


class ChainIntegrator:
    """Residue evaluation of i int deps/2pi over products of F^-1 factors
    (and of S1 + S2 factors) for a fixed spectrum and total energy E.

    Values depend only on the multiset of participating pairs, so they are
    cached per structure; this makes the higher series terms cheap.
    """

    def __init__(self, spectrum: SingleParticleSpectrum, basis: TwoParticleBasis, E: float):
        self.spectrum = spectrum
        self.basis = basis
        self.E = float(E)
        e = spectrum.energies
        self._pair_poles = [
            _pair_pole_factors(e[i], e[j], self.E) for i, j in basis.pairs
        ]
        self._finv_cache = {}
        self._ssum_cache = {}

    # -- joint products of full F^-1 factors --------------------------------

    def finv_product(self, pair_chain):
        """i int deps/2pi of prod_k F^-1(pair_k)(eps); single shared eps."""
        key = tuple(sorted(pair_chain))
        val = self._finv_cache.get(key)
        if val is None:
            poles = []
            for p in pair_chain:
                s1, s2 = self._pair_poles[p]
                poles.append(s1)
                poles.append(s2)
            val = pole_product_integral(poles, (-1.0) ** len(pair_chain))
            self._finv_cache[key] = val
        return val

    # -- joint products of (S1 + S2) factors --------------------------------

    def ssum_product(self, pair_chain):
        """i int deps/2pi of prod_k (S1 + S2)(pair_k)(eps), expanded into
        2^len single-pole products."""
        key = tuple(sorted(pair_chain))
        val = self._ssum_cache.get(key)
        if val is None:
            val = 0.0
            per_pair = [self._pair_poles[p] for p in pair_chain]
            for choice in _iproduct((0, 1), repeat=len(pair_chain)):
                poles = [per_pair[k][c] for k, c in enumerate(choice)]
                val += pole_product_integral(poles, (-1.0) ** sum(choice))
            self._ssum_cache[key] = val
        return val


def contour_integral_Finv(spectrum, basis, E):
    """i int deps/2pi F^-1: +1/(E-e_i-e_j) on ++ pairs, -1/(E-e_i-e_j) on
    -- pairs, 0 on mixed pairs (closed form; the quadrature oracle and the
    residue engine reproduce it)."""
    from .operators import DEGENERACY_TOL

    out = np.zeros(basis.dim)
    for k, pat in enumerate(basis.patterns):
        if pat in ("pm", "mp"):
            continue
        denom = E - basis.pair_energies()[k]
        if abs(denom) < DEGENERACY_TOL:
            from .errors import DegenerateDenominatorError

            raise DegenerateDenominatorError(
                f"degenerate denominator {denom:.3e} at pair index {k}"
            )
        out[k] = (1.0 if pat == "pp" else -1.0) / denom
    return np.diag(out)


def sandwich_integral(spectrum, basis, E, A):
    """i int deps/2pi F^-1 A F^-1 for an eps-independent matrix A.

    Elementwise X[p, q] = A[p, q] * I(pair_p, pair_q; E) with I the joint
    four-propagator residue value; linear in A by construction.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (basis.dim, basis.dim):
        raise ValueError(f"A has shape {A.shape}, basis needs {(basis.dim, basis.dim)}")
    if not np.any(A):
        return np.zeros_like(A)
    chain = ChainIntegrator(spectrum, basis, E)
    table = np.empty_like(A)
    for p in range(basis.dim):
        for q in range(basis.dim):
            table[p, q] = chain.finv_product((p, q))
    return A * table


def j_series(spectrum, basis, E, g_delta, order):
    """Terms T_k = i int deps/2pi F^-1 (g F^-1)^k g F^-1 for k = 0..order-1.

    T_0 is sandwich_integral(E, g); each higher term inserts one more
    g F^-1 factor (joint residues over chains of pairs).  The truncated
    kernel integral is sum(T_k).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    g = np.asarray(g_delta, dtype=float)
    if g.shape != (basis.dim, basis.dim):
        raise ValueError(f"g has shape {g.shape}, basis needs {(basis.dim, basis.dim)}")
    dim = basis.dim
    if not np.any(g):
        return [np.zeros((dim, dim)) for _ in range(order)]
    chain = ChainIntegrator(spectrum, basis, E)
    terms = []
    for k in range(order):
        T = np.zeros((dim, dim))
        for links in _iproduct(range(dim), repeat=k + 2):
            w = 1.0
            for a, b in zip(links[:-1], links[1:]):
                w *= g[a, b]
                if w == 0.0:
                    break
            if w == 0.0:
                continue
            T[links[0], links[-1]] += w * chain.finv_product(links)
        terms.append(T)
    return terms


def xj_matrix(spectrum, basis, E, g_delta, order):
    """Truncated kernel integral sum_k T_k (the X_J of the direct route)."""
    return sum(j_series(spectrum, basis, E, g_delta, order))


def xj_matrix_ssum_route(spectrum, basis, E, g_delta, order):
    """Same object evaluated through F^-1 = D^-1 (S1 + S2):

        T_k = D^-1 [ i int (S1+S2) (g D^-1 (S1+S2))^k g (S1+S2) ] D^-1

    so each joint integral runs over products of (S1 + S2) factors and the
    inner pairs carry explicit 1/(E - e_i - e_j) weights.  Algebraically
    identical to xj_matrix; numerically an independent evaluation path.
    """
    g = np.asarray(g_delta, dtype=float)
    dim = basis.dim
    if order < 1:
        raise ValueError("order must be >= 1")
    if not np.any(g):
        return np.zeros((dim, dim))
    from .operators import DEGENERACY_TOL

    denom = E - basis.pair_energies()
    if np.min(np.abs(denom)) < DEGENERACY_TOL:
        from .errors import DegenerateDenominatorError

        raise DegenerateDenominatorError("degenerate pair denominator in S-sum route")
    dinv = 1.0 / denom
    chain = ChainIntegrator(spectrum, basis, E)
    total = np.zeros((dim, dim))
    for k in range(order):
        W = np.zeros((dim, dim))
        for links in _iproduct(range(dim), repeat=k + 2):
            w = 1.0
            for a, b in zip(links[:-1], links[1:]):
                w *= g[a, b]
                if w == 0.0:
                    break
            if w == 0.0:
                continue
            for inner in links[1:-1]:
                w *= dinv[inner]
            W[links[0], links[-1]] += w * chain.ssum_product(links)
        total += dinv[:, None] * W * dinv[None, :]
    return total
