"""No-pair solve and the Brillouin-Wigner expansion.

The expansion keeps the exact energy E in every denominator:

    Delta E = <psi_c| V + V G V + V G V G V + ... |psi_c>,
    G = G_Q(E) = Q / (E - H_c),  Q = 1 - |psi_c><psi_c|

with V allowed to depend on E itself, so the total energy is found by
fixed-point iteration E <- E_c + Delta E(E).  Orders above three are
rejected rather than extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateDenominatorError

MAX_ORDER = 3


@dataclass
class EnergyLedger:
    """Result of a self-consistent BW solve."""

    E_c: float
    dE: list
    E: float
    deltaE: float
    iterations: int
    residual: float


def solve_no_pair(H_c, pp_indices, state_index=0):
    """Diagonalize the doubly-positive block of H_c and embed the selected
    eigenvector (ascending order; default the lowest) in the full space."""
    pp = list(pp_indices)
    if not pp:
        raise ValueError("empty doubly-positive subspace")
    if not 0 <= state_index < len(pp):
        raise ValueError(f"state_index {state_index} outside the {len(pp)}-dim block")
    block = np.asarray(H_c)[np.ix_(pp, pp)]
    vals, vecs = np.linalg.eigh(block)
    E_c = float(vals[state_index])
    psi = np.zeros(H_c.shape[0])
    psi[pp] = vecs[:, state_index]
    psi /= np.linalg.norm(psi)
    return E_c, psi


class Resolvent:
    """G_Q(E) = Q (E - H_c)^-1 Q for a fixed reference state.

    apply() runs a deflated linear solve; the reference direction is
    shifted out of the operator so the system stays well-posed near
    E = E_c.  A cached eigenvalue list guards against E hitting the
    complementary spectrum.
    """

    def __init__(self, H_c, psi_c, guard_tol=1e-10):
        self.H_c = np.asarray(H_c, dtype=float)
        self.psi = np.asarray(psi_c, dtype=float)
        self.guard_tol = guard_tol
        vals, vecs = np.linalg.eigh(self.H_c)
        overlaps = np.abs(vecs.T @ self.psi)
        self._ref = int(np.argmax(overlaps))
        self._q_evals = np.delete(vals, self._ref)

    def _check(self, E):
        if self._q_evals.size:
            gap = np.min(np.abs(E - self._q_evals))
            if gap < self.guard_tol * max(1.0, abs(E)):
                raise DegenerateDenominatorError(
                    f"E = {E:.12g} hits the complementary spectrum (gap {gap:.3e})"
                )

    def apply(self, E, v):
        self._check(E)
        Q = np.eye(self.H_c.shape[0]) - np.outer(self.psi, self.psi)
        rhs = Q @ np.asarray(v, dtype=float)
        shifted = E * np.eye(self.H_c.shape[0]) - self.H_c + np.outer(self.psi, self.psi)
        x = np.linalg.solve(shifted, rhs)
        return Q @ x

    def matrix(self, E):
        self._check(E)
        n = self.H_c.shape[0]
        Q = np.eye(n) - np.outer(self.psi, self.psi)
        shifted = E * np.eye(n) - self.H_c + np.outer(self.psi, self.psi)
        return Q @ np.linalg.solve(shifted, Q)


def bw_terms(resolvent: Resolvent, h_delta_of_E, E, psi_c, order):
    """[Delta E^(1) .. Delta E^(order)] with the perturbation evaluated at E.

    h_delta_of_E(E) returns the (generally nonsymmetric) perturbation
    matrix; Delta E^(n) = <psi| V (G V)^(n-1) |psi>.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}")
    V = np.asarray(h_delta_of_E(E), dtype=float)
    psi = np.asarray(psi_c, dtype=float)
    terms = []
    r = V @ psi
    terms.append(float(psi @ r))
    for _ in range(order - 1):
        r = V @ resolvent.apply(E, r)
        terms.append(float(psi @ r))
    return terms


def bw_selfconsistent(resolvent: Resolvent, h_delta_of_E, psi_c, E_c, order=3,
                      max_iter=200, tol=1e-12):
    """Fixed-point iteration E <- E_c + sum_n Delta E^(n)(E) from E = E_c.

    Undamped steps by default; on oscillation (sign-flipping steps that do
    not shrink) the damping halves, starting at 1/2, floor 1/64.  The
    tolerance is scaled by max(1, |E_c|).
    """
    scale_tol = tol * max(1.0, abs(E_c))
    E = float(E_c)
    damping = 1.0
    last_step = None
    terms = bw_terms(resolvent, h_delta_of_E, E, psi_c, order)
    for it in range(1, max_iter + 1):
        target = E_c + sum(terms)
        step = target - E
        if abs(step) < scale_tol:
            E = target
            terms = bw_terms(resolvent, h_delta_of_E, E, psi_c, order)
            residual = abs(E - (E_c + sum(terms)))
            return EnergyLedger(
                E_c=E_c, dE=terms, E=E, deltaE=E - E_c,
                iterations=it, residual=residual,
            )
        if last_step is not None and step * last_step < 0 and abs(step) >= abs(last_step):
            damping = max(damping / 2.0, 1.0 / 64.0)
        E = E + damping * step
        last_step = step
        terms = bw_terms(resolvent, h_delta_of_E, E, psi_c, order)
    ledger = EnergyLedger(
        E_c=E_c, dE=terms, E=E, deltaE=E - E_c, iterations=max_iter,
        residual=abs(E - (E_c + sum(terms))),
    )
    raise ConvergenceError(
        f"BW self-consistency did not converge in {max_iter} iterations "
        f"(last residual {ledger.residual:.3e})",
        last=ledger,
    )
