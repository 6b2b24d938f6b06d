"""Identity suite: every algebraic anchor of the formalism as a named
residual, evaluated on a configured model.

Each check returns a residual that should sit at rounding level (or at
quadrature level for the oracle comparisons); cmd_verify renders the
table and fails if any residual exceeds its tolerance.
"""

from __future__ import annotations

import numpy as np

from .bw import Resolvent, solve_no_pair
from .controversy import combined_variant, predicted_discrepancy
from .model import build_basis, build_interaction, build_spectrum
from .operators import build_D, build_Dc, build_HDelta1, build_Hc, build_G0, projectors
from .propagators import (
    contour_integral_Finv,
    finv_diag,
    propagator_S,
    sandwich_integral,
    xj_matrix,
    xj_matrix_ssum_route,
)
from .quadrature import quadrature_finv, quadrature_oracle

#: (name, tolerance); quadrature comparisons carry looser, honest bounds
TOLERANCES = {
    "g0mod_pointwise": 1e-12,
    "dm1_diagonal": 1e-13,
    "resolvent_mm_identity": 1e-12,
    "contour_vs_closed_form": 1e-12,
    "contour_vs_quadrature": 1e-8,
    "sandwich_vs_quadrature": 1e-8,
    "sandwich_linearity": 1e-13,
    "sandwich_exchange_symmetry": 1e-12,
    "E2b_vs_E2b2": 1e-10,
    "chain_sum": 1e-10,
    "central_claim": 1e-12,
    "Dm1_route": 1e-12,
    "g0mod_route": 1e-8,
}


def _sample_away_from_poles(rng, spectrum, lo, hi, min_gap=0.05):
    pair_sums = {e1 + e2 for e1 in spectrum.energies for e2 in spectrum.energies}
    for _ in range(1000):
        x = rng.uniform(lo, hi)
        if all(abs(x - s) > min_gap for s in pair_sums):
            return x
    raise RuntimeError("could not sample away from poles")


def identity_suite(model_config, settings, seed=0):
    """Run every identity check; returns {name: residual}."""
    rng = np.random.default_rng([seed, 421])
    spectrum = build_spectrum(model_config)
    basis = build_basis(spectrum)
    I_c = build_interaction(model_config, "coulomb")
    g = build_interaction(model_config, "delta")
    projs = projectors(basis)
    H_c = build_Hc(spectrum, basis, I_c)
    E_c, psi_c = solve_no_pair(H_c, basis.pattern_indices("pp"))
    resolvent = Resolvent(H_c, psi_c)
    emax = max(abs(e) for e in spectrum.energies)
    res = {}

    # F^-1 = S1 S2 = D^-1 (S1 + S2), eta = 0, away from poles
    worst = 0.0
    for _ in range(100):
        E = _sample_away_from_poles(rng, spectrum, -3 * emax, 3 * emax)
        eps = rng.uniform(-3 * emax, 3 * emax)
        s1 = propagator_S(spectrum, basis, E, eps, 1, 0.0)
        s2 = propagator_S(spectrum, basis, E, eps, 2, 0.0)
        if np.min(np.abs(1.0 / s1)) < 0.05 or np.min(np.abs(1.0 / s2)) < 0.05:
            continue
        d = E - basis.pair_energies()
        if np.min(np.abs(d)) < 0.05:
            continue
        worst = max(worst, float(np.max(np.abs(s1 * s2 - (s1 + s2) / d))))
    res["g0mod_pointwise"] = worst

    # D^-1 = Dc^-1 - dE/(Dc D) on scalars and diagonals
    worst = 0.0
    for _ in range(100):
        E = _sample_away_from_poles(rng, spectrum, -3 * emax, 3 * emax)
        Ec = _sample_away_from_poles(rng, spectrum, -3 * emax, 3 * emax)
        d = E - basis.pair_energies()
        dc = Ec - basis.pair_energies()
        dE = E - Ec
        worst = max(worst, float(np.max(np.abs(1.0 / d - (1.0 / dc - dE / (dc * d))))))
    res["dm1_diagonal"] = worst

    # P_mm G(E) D(E) = P_mm
    E = E_c + 0.25 * max(1.0, abs(E_c))
    G = resolvent.matrix(E)
    D = build_D(spectrum, basis, E)
    res["resolvent_mm_identity"] = float(np.max(np.abs(projs.mm @ G @ D - projs.mm)))

    # basic integral: engine closed form vs (P_pp - P_mm) D^-1 and quadrature;
    # anchored at the no-pair energy (degenerate configs abort here), except
    # that a fully non-interacting model has no distinguished energy and any
    # nondegenerate anchor serves
    if np.any(I_c) or np.any(g):
        E = E_c
    else:
        E = _sample_away_from_poles(rng, spectrum, E_c + 0.1, E_c + 2.0)
    closed = contour_integral_Finv(spectrum, basis, E)
    res["contour_vs_closed_form"] = float(
        np.max(np.abs(closed - build_G0(spectrum, basis, E, projs)))
    )
    fine = settings.refined()
    quad = quadrature_finv(spectrum, basis, E, fine)
    scale = max(1.0, float(np.max(np.abs(closed))))
    res["contour_vs_quadrature"] = float(np.max(np.abs(quad - closed))) / scale

    # sandwich: quadrature, linearity, exchange symmetry
    X = sandwich_integral(spectrum, basis, E, g)
    if np.any(g):
        Xq = quadrature_oracle(spectrum, basis, E, g, fine)
        res["sandwich_vs_quadrature"] = float(np.max(np.abs(X - Xq))) / max(
            1.0, float(np.max(np.abs(X)))
        )
    else:
        res["sandwich_vs_quadrature"] = 0.0
    A = rng.uniform(-1, 1, size=(basis.dim, basis.dim))
    B = rng.uniform(-1, 1, size=(basis.dim, basis.dim))
    lin = sandwich_integral(spectrum, basis, E, 0.3 * A + 1.7 * B) - (
        0.3 * sandwich_integral(spectrum, basis, E, A)
        + 1.7 * sandwich_integral(spectrum, basis, E, B)
    )
    res["sandwich_linearity"] = float(np.max(np.abs(lin))) / max(
        1.0, float(np.max(np.abs(sandwich_integral(spectrum, basis, E, A))))
    )
    S = 0.5 * (A + A.T)
    Xs = sandwich_integral(spectrum, basis, E, S)
    res["sandwich_exchange_symmetry"] = float(np.max(np.abs(Xs - Xs.T))) / max(
        1.0, float(np.max(np.abs(Xs)))
    )

    # controversy-chain identities at a nondegenerate working energy
    from .controversy import deltaE1_direct, deltaE2b_direct

    E = E_c + 0.1 * max(1.0, abs(E_c))
    dE1 = deltaE1_direct(spectrum, basis, E, psi_c, I_c, g, settings)
    dE2b, e2b_res = deltaE2b_direct(
        spectrum, basis, E, E_c, psi_c, I_c, g, resolvent, settings
    )
    lind = combined_variant(spectrum, basis, E, E_c, psi_c, I_c, g, settings, "lindgren")
    dkz = combined_variant(spectrum, basis, E, E_c, psi_c, I_c, g, settings, "dkz")
    res["E2b_vs_E2b2"] = e2b_res / max(1.0, abs(dE2b))
    res["chain_sum"] = abs(dE1 + dE2b - lind) / max(1.0, abs(lind))
    predicted, dm1_res, _ = predicted_discrepancy(
        spectrum, basis, E, E_c, psi_c, I_c, g, settings
    )
    res["central_claim"] = abs((lind - dkz) - predicted) / max(1.0, abs(lind))
    res["Dm1_route"] = dm1_res["Dm1_route"]

    # transformed route reproduces the direct kernel integral
    if np.any(g):
        X_direct = xj_matrix(spectrum, basis, E, g, settings.j_order)
        X_alt = xj_matrix_ssum_route(spectrum, basis, E, g, settings.j_order)
        res["g0mod_route"] = float(np.max(np.abs(X_direct - X_alt))) / max(
            1.0, float(np.max(np.abs(X_direct)))
        )
    else:
        res["g0mod_route"] = 0.0

    return res


def suite_passes(residuals):
    return all(residuals[name] <= tol for name, tol in TOLERANCES.items())
