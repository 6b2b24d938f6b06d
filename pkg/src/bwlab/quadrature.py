"""Independent numerical oracle for the relative-energy integrals.

Integrates along the real axis with a finite Feynman regulator eta, on
composite Gauss-Legendre panels graded toward the pole positions, then
extrapolates eta -> 0.  The real part of every integral handled here is
an even function of eta (each captured residue is a rational function of
i*eta with real coefficients), so the real part extrapolates in eta^2;
the imaginary part is odd and extrapolates in eta.  The extrapolated
imaginary part is a diagnostic and should be consistent with zero.

This module deliberately shares no code with the residue engine.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureConvergenceError
from .propagators import IntegrationSettings, propagator_S

#: relative disagreement of the last two extrapolation levels that counts
#: as nonconvergence
EXTRAPOLATION_TOL = 1e-4


def _pole_positions(spectrum, E):
    pos = []
    for e in spectrum.energies:
        pos.append(e - E / 2)
        pos.append(E / 2 - e)
    return sorted(set(pos))


def _panel_breaks(poles, eta_min, L):
    """Graded breakpoints: nested refinement around each pole down to the
    finest eta scale, geometric fill to the cutoff."""
    pts = {-L, L}
    for p in poles:
        pts.add(p)
        s = eta_min / 2
        while s < 4.0:
            pts.add(p - s)
            pts.add(p + s)
            s *= 4
    edge = max(abs(p) for p in poles) + 4.0
    s = edge
    while s < L:
        pts.add(s)
        pts.add(-s)
        s *= 4
    return np.array(sorted(x for x in pts if -L <= x <= L))


def _nodes_weights(spectrum, E, settings: IntegrationSettings):
    poles = _pole_positions(spectrum, E)
    breaks = _panel_breaks(poles, min(settings.eta_sequence), settings.cutoff(spectrum))
    x, w = np.polynomial.legendre.leggauss(settings.quadrature_points)
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    halfs = 0.5 * (breaks[1:] - breaks[:-1])
    nodes = (mids[:, None] + halfs[:, None] * x[None, :]).ravel()
    weights = (halfs[:, None] * w[None, :]).ravel()
    return nodes, weights


def _neville(xs, ys):
    t = list(ys)
    n = len(t)
    for k in range(1, n):
        for i in range(n - k):
            t[i] = t[i + 1] + (t[i] - t[i + 1]) * xs[i + k] / (xs[i + k] - xs[i])
    return t[0], (t[1] if n > 1 else t[0])


def _extrapolate(etas, values):
    """eta -> 0 limit: real part against eta^2, imaginary against eta.

    Returns (real, imag_diagnostic); raises if the last refinement moved
    either part by more than EXTRAPOLATION_TOL relatively.  A pinched
    configuration shows up in the imaginary part (the real part of a
    symmetric pinch is exactly zero), so both parts are watched.
    """
    values = np.asarray(values)
    etas = np.asarray(etas)
    re, re_prev = _neville(etas ** 2, values.real)
    im, im_prev = _neville(etas, values.imag)
    scale = max(1.0, abs(re))
    if abs(re - re_prev) > EXTRAPOLATION_TOL * scale:
        raise QuadratureConvergenceError(
            f"eta extrapolation did not settle: last two estimates "
            f"{re_prev:.6e} vs {re:.6e}"
        )
    if abs(im - im_prev) > EXTRAPOLATION_TOL * max(1.0, abs(im), scale):
        raise QuadratureConvergenceError(
            f"imaginary part diverges under eta refinement: "
            f"{im_prev:.6e} vs {im:.6e} (pinched poles?)"
        )
    return re, im


def _finv_nodes(spectrum, basis, E, nodes, eta):
    """(dim, n_nodes) array of F^-1 per pair at the nodes."""
    s1 = np.empty((basis.dim, nodes.size), dtype=complex)
    s2 = np.empty_like(s1)
    e = np.asarray(spectrum.energies)
    shift = 1j * eta * np.sign(e)
    for k, (i, j) in enumerate(basis.pairs):
        s1[k] = 1.0 / (E / 2 + nodes - e[i] + shift[i])
        s2[k] = 1.0 / (E / 2 - nodes - e[j] + shift[j])
    return s1 * s2


def quadrature_finv(spectrum, basis, E, settings, return_imag=False):
    """Oracle for the basic integral i int deps/2pi F^-1 (diagonal)."""
    nodes, weights = _nodes_weights(spectrum, E, settings)
    per_eta = []
    for eta in settings.eta_sequence:
        f = _finv_nodes(spectrum, basis, E, nodes, eta)
        per_eta.append(1j * (f @ weights) / (2 * np.pi))
    re = np.empty(basis.dim)
    im = np.empty(basis.dim)
    for k in range(basis.dim):
        re[k], im[k] = _extrapolate(settings.eta_sequence, [v[k] for v in per_eta])
    if return_imag:
        return np.diag(re), np.diag(im)
    return np.diag(re)


def quadrature_oracle(spectrum, basis, E, A, settings, return_imag=False):
    """Oracle for the sandwich i int deps/2pi F^-1 A F^-1.

    The integrand factorizes per element, so one pairwise node sum covers
    the whole matrix: X[p, q] = A[p, q] * i int f_p f_q deps / 2pi.
    """
    A = np.asarray(A, dtype=float)
    nodes, weights = _nodes_weights(spectrum, E, settings)
    per_eta = []
    for eta in settings.eta_sequence:
        f = _finv_nodes(spectrum, basis, E, nodes, eta)
        pairwise = 1j * ((f * weights) @ f.T) / (2 * np.pi)
        per_eta.append(pairwise)
    re = np.empty_like(A)
    im = np.empty_like(A)
    for p in range(basis.dim):
        for q in range(basis.dim):
            re[p, q], im[p, q] = _extrapolate(
                settings.eta_sequence, [m[p, q] for m in per_eta]
            )
    if return_imag:
        return A * re, A * im
    return A * re


def quadrature_chain(spectrum, basis, E, mats, settings):
    """Oracle for i int deps/2pi F^-1 M_1 F^-1 M_2 ... M_k F^-1 with
    constant matrices M_i (validates the higher series terms)."""
    nodes, weights = _nodes_weights(spectrum, E, settings)
    dim = basis.dim
    per_eta = []
    for eta in settings.eta_sequence:
        f = _finv_nodes(spectrum, basis, E, nodes, eta)
        acc = np.zeros((dim, dim), dtype=complex)
        for t in range(nodes.size):
            m = np.diag(f[:, t])
            for M in mats:
                m = m @ M @ np.diag(f[:, t])
            acc += weights[t] * m
        per_eta.append(1j * acc / (2 * np.pi))
    out = np.empty((dim, dim))
    for p in range(dim):
        for q in range(dim):
            out[p, q], _ = _extrapolate(settings.eta_sequence, [m[p, q] for m in per_eta])
    return out
