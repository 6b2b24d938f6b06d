"""Both evaluations of the disputed combined expression and the predicted
discrepancy between them.

The common factor of both sign conventions is the kernel integral

    X_J = i int deps/2pi F^-1 J F^-1,   J = g (1 - F^-1 g)^-1

truncated at the configured series order, and Y = X_J I_c.  The two
combinations are

    lindgren:  <psi_c| (I_c + dE) Y |psi_c>
    dkz:       <psi_c| (I_c - dE) Y |psi_c>

with dE = E - E_c from the self-consistent BW solve, so their difference
is exactly 2 dE <psi_c| Y |psi_c>.  The first-order term and the reduced
second-order term recombine into the lindgren form through
D + I_c - D_c = I_c + dE, which is checked numerically, as is the
transformed route through F^-1 = D^-1 (S1 + S2) and the partial-fraction
identity D^-1 = Dc^-1 - dE/(Dc D).

The model oracle diagonalizes the instantaneous-interaction analog
h1 + h2 + (P_pp - P_mm)(I_c + g); the effective interaction whose BW
expansion reproduces that spectrum is the ladder-resummed one (each
propagator segment between instantaneous vertices carries its own
relative-energy integral), provided here as h_delta2_ladder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bw import Resolvent
from .errors import DegenerateDenominatorError
from .model import SingleParticleSpectrum, TwoParticleBasis
from .operators import (
    DEGENERACY_TOL,
    build_D,
    build_Dc,
    build_HDelta1,
    projectors,
)
from .propagators import IntegrationSettings, xj_matrix, xj_matrix_ssum_route


@dataclass
class ControversyReport:
    dE1_direct: float = 0.0
    dE2b_direct: float = 0.0
    combined_lindgren: float = 0.0
    combined_dkz: float = 0.0
    combined_dkz_dc_approx: float = 0.0
    difference: float = 0.0
    predicted_difference: float = 0.0
    dm1_error_term: float = 0.0
    identity_residuals: dict = field(default_factory=dict)
    scan_rows: list = field(default_factory=list)
    fitted_exponent: float = float("nan")
    r_squared: float = float("nan")


# -- direct-route evaluators -------------------------------------------------


def deltaE1_direct(spectrum, basis, E, psi_c, I_c, g_delta, settings):
    """First-order term <psi_c| D X_J I_c |psi_c> at energy E."""
    if not np.any(I_c) or not np.any(g_delta):
        return 0.0
    D = build_D(spectrum, basis, E)
    X = xj_matrix(spectrum, basis, E, g_delta, settings.j_order)
    return float(psi_c @ D @ X @ I_c @ psi_c)


def h_delta2_direct(spectrum, basis, E, I_c, g_delta, settings):
    """Relative-energy route operator D X_J I_c (the literal integrand form)."""
    dim = basis.dim
    if not np.any(I_c) or not np.any(g_delta):
        return np.zeros((dim, dim))
    D = build_D(spectrum, basis, E)
    X = xj_matrix(spectrum, basis, E, g_delta, settings.j_order)
    return D @ X @ I_c


def deltaE2b_direct(spectrum, basis, E, E_c, psi_c, I_c, g_delta, resolvent,
                    settings):
    """Reduced second-order cross term <psi_c|(I_c - D_c) X_J I_c|psi_c>.

    Also evaluates the resolvent form <psi_c| H_D1 G(E) H_D2(E) |psi_c>
    and returns (value, |resolvent_form - reduced_form|): the two agree
    because G(E) D(E) acts as the identity on the complement of the
    doubly-positive sector.
    """
    if not np.any(I_c) or not np.any(g_delta):
        return 0.0, 0.0
    Dc = build_Dc(spectrum, basis, E_c)
    X = xj_matrix(spectrum, basis, E, g_delta, settings.j_order)
    reduced = float(psi_c @ (I_c - Dc) @ X @ I_c @ psi_c)

    projs = projectors(basis)
    hd1 = build_HDelta1(projs, I_c)
    hd2_psi = build_D(spectrum, basis, E) @ X @ I_c @ psi_c
    gamma_form = float((hd1.T @ psi_c) @ resolvent.apply(E, hd2_psi))
    return reduced, abs(gamma_form - reduced)


def combined_variant(spectrum, basis, E, E_c, psi_c, I_c, g_delta, settings,
                     convention):
    """<psi_c| (I_c +/- dE) Y |psi_c> with Y = X_J I_c and dE = E - E_c.

    convention "lindgren" carries +dE, "dkz" carries -dE; "dkz-dc-approx"
    evaluates the dkz combination through the transformed route with every
    D replaced by D_c (the approximation said to produce the same
    cancellation), reported for comparison only.
    """
    if convention not in ("lindgren", "dkz", "dkz-dc-approx"):
        raise ValueError(f"unknown convention '{convention}'")
    dE = E - E_c
    dim = basis.dim
    if not np.any(I_c) or not np.any(g_delta):
        return 0.0
    if convention == "dkz-dc-approx":
        X_c = xj_matrix(spectrum, basis, E_c, g_delta, settings.j_order)
        return float(psi_c @ (I_c - dE * np.eye(dim)) @ X_c @ I_c @ psi_c)
    X = xj_matrix(spectrum, basis, E, g_delta, settings.j_order)
    sign = 1.0 if convention == "lindgren" else -1.0
    return float(psi_c @ (I_c + sign * dE * np.eye(dim)) @ X @ I_c @ psi_c)


def predicted_discrepancy(spectrum, basis, E, E_c, psi_c, I_c, g_delta, settings):
    """2 dE <psi_c| Y |psi_c> evaluated through the transformed route
    (S1 + S2 factorization), plus partial-fraction cross checks.

    Returns (predicted, residuals, dm1_error_term) where residuals holds
    "Dm1_route" (the partial-fraction identity applied inside the reduced
    second-order form) and dm1_error_term is the would-be error
    2 dE <psi_c|(I_c - D_c) (Dc D)^-1 W-route |psi_c> that the transformed
    derivation drops when it flips the sign.
    """
    dE = E - E_c
    if not np.any(I_c) or not np.any(g_delta):
        return 0.0, {"Dm1_route": 0.0}, 0.0
    X_alt = xj_matrix_ssum_route(spectrum, basis, E, g_delta, settings.j_order)
    predicted = 2.0 * dE * float(psi_c @ X_alt @ I_c @ psi_c)

    denom = E - basis.pair_energies()
    denom_c = E_c - basis.pair_energies()
    if np.min(np.abs(denom)) < DEGENERACY_TOL or np.min(np.abs(denom_c)) < DEGENERACY_TOL:
        raise DegenerateDenominatorError("degenerate denominator in Dm1 route")
    dinv = 1.0 / denom
    dcinv = 1.0 / denom_c

    # reduced second-order form with the left D^-1 of X split by
    # D^-1 = Dc^-1 - dE (Dc D)^-1; X_alt = D^-1 W D^-1 so W D^-1 is the
    # remainder of the transform
    Dc = build_Dc(spectrum, basis, E_c)
    w_tail = (np.diag(denom) @ X_alt)  # = W D^-1
    left = psi_c @ (I_c - Dc)
    direct = float(left @ (dinv[:, None] * w_tail) @ I_c @ psi_c)
    split = float(left @ ((dcinv - dE * dcinv * dinv)[:, None] * w_tail) @ I_c @ psi_c)
    residuals = {"Dm1_route": abs(direct - split) / max(1.0, abs(direct))}

    dm1_error_term = 2.0 * dE * float(
        left @ ((dcinv * dinv)[:, None] * w_tail) @ I_c @ psi_c
    )
    return predicted, residuals, dm1_error_term


# -- ladder (equal-time) route ------------------------------------------------


def ladder_kernel(spectrum, basis, E, g_delta):
    """Equal-time resummation G~ J~ G~ with J~ = g (1 - G~ g)^-1 and
    G~ = (P_pp - P_mm) D^-1 the integrated free propagator.

    This is the geometric series summed in closed form; it is the kernel
    whose BW expansion reproduces the instantaneous model oracle.
    """
    projs = projectors(basis)
    denom = E - basis.pair_energies()
    sel = np.diag(projs.pp) + np.diag(projs.mm)
    bad = (np.abs(denom) < DEGENERACY_TOL) & (sel > 0)
    if np.any(bad):
        raise DegenerateDenominatorError("degenerate denominator in ladder kernel")
    gt = np.zeros_like(denom)
    mask = sel > 0
    sign = np.diag(projs.pp) - np.diag(projs.mm)
    gt[mask] = sign[mask] / denom[mask]
    Gt = np.diag(gt)
    g = np.asarray(g_delta, dtype=float)
    resolv = np.linalg.solve(np.eye(basis.dim) - Gt @ g, Gt)
    return Gt @ g @ resolv


def h_delta2_ladder(spectrum, basis, E, I_c, g_delta):
    """Effective remainder interaction D (G~ J~ G~) I_c of the equal-time
    ladder; vanishes identically when either coupling is zero."""
    dim = basis.dim
    if not np.any(I_c) or not np.any(g_delta):
        return np.zeros((dim, dim))
    D = build_D(spectrum, basis, E)
    return D @ ladder_kernel(spectrum, basis, E, g_delta) @ I_c


# -- model oracle --------------------------------------------------------------


def model_oracle(spectrum, basis, I_c, g_delta, psi_c, return_vector=False):
    """Exact reference energy: eigenvalue of
    h1 + h2 + (P_pp - P_mm)(I_c + g) continuously connected to psi_c.

    The operator is real but not symmetric; the state is tracked by
    overlap with psi_c and the tracked eigenvalue must stay real.
    """
    projs = projectors(basis)
    H = np.diag(basis.pair_energies()) + (projs.pp - projs.mm) @ (
        np.asarray(I_c) + np.asarray(g_delta)
    )
    vals, vecs = np.linalg.eig(H)
    overlaps = np.abs(vecs.conj().T @ psi_c) / np.linalg.norm(vecs, axis=0)
    k = int(np.argmax(overlaps))
    if overlaps[k] ** 2 < 0.5:
        raise ValueError(
            f"overlap tracking ambiguous: best |<psi_c|psi>|^2 = {overlaps[k]**2:.3f}"
        )
    val = vals[k]
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"tracked eigenvalue not real: {val}")
    if return_vector:
        v = np.real(vecs[:, k])
        return float(val.real), v / np.linalg.norm(v)
    return float(val.real)


# -- coupling scan -------------------------------------------------------------


def fit_power_law(lams, values):
    """Least-squares slope of log|value| vs log(lambda) and its R^2."""
    x = np.log(np.asarray(lams))
    y = np.log(np.abs(np.asarray(values)))
    coef = np.polyfit(x, y, 1)
    pred = np.polyval(coef, x)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def coupling_scan(model_config, lam_schedule, settings, bw_order=3,
                  bw_max_iter=200, bw_tol=1e-12, state_index=0):
    """Scale both couplings by each lambda, run the full pipeline, record
    the measured and predicted convention differences, and fit the power
    law of |difference| against lambda.

    Returns (rows, fitted_exponent, r_squared, failures); rows are
    (lambda, difference, predicted, ratio) and failures lists
    (lambda, error message) for points whose pipeline aborted.
    """
    from .pipeline import run_pipeline

    lams = [float(x) for x in lam_schedule]
    if len(lams) < 4:
        raise ValueError("scan requires >= 4 points")
    ratios = [b / a for a, b in zip(lams[:-1], lams[1:])]
    if any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
        raise ValueError("scan schedule must be geometrically spaced")

    rows, failures = [], []
    for lam in lams:
        try:
            res = run_pipeline(
                model_config.scaled(lam), settings, bw_order=bw_order,
                bw_max_iter=bw_max_iter, bw_tol=bw_tol, state_index=state_index,
            )
            rep = res.controversy
            ratio = (
                rep.difference / rep.predicted_difference
                if rep.predicted_difference != 0.0
                else float("nan")
            )
            rows.append((lam, rep.difference, rep.predicted_difference, ratio))
        except Exception as exc:  # noqa: BLE001 - per-point failures are data
            failures.append((lam, f"{type(exc).__name__}: {exc}"))
    good = [(l, d) for l, d, _, _ in rows if d != 0.0]
    if len(good) >= 2:
        slope, r2 = fit_power_law([l for l, _ in good], [d for _, d in good])
    else:
        slope, r2 = float("nan"), float("nan")
    return rows, slope, r2, failures
