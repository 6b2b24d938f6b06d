import numpy as np
import pytest

from bwlab import (
    DegenerateDenominatorError,
    build_basis,
    build_D,
    build_Dc,
    build_G0,
    build_HDelta1,
    build_Hc,
    build_spectrum,
    contour_integral_Finv,
    projectors,
)
from conftest import random_spectrum

from bwlab.model import SingleParticleSpectrum


def test_projectors_dim4(dim4):
    spectrum, basis, _, _ = dim4
    p = projectors(basis)
    assert np.array_equal(np.diag(p.pp), [1, 0, 0, 0])
    assert np.array_equal(np.diag(p.mm), [0, 0, 0, 1])
    total = p.pp + p.pm + p.mp + p.mm
    assert np.array_equal(total, np.eye(4))
    assert np.max(np.abs(p.pp @ p.mm)) == 0.0


def test_projector_algebra_random():
    rng = np.random.default_rng(11)
    for _ in range(10):
        pos, neg = random_spectrum(rng)
        basis = build_basis(SingleParticleSpectrum.from_lists(pos, neg))
        p = projectors(basis)
        mats = [p.pp, p.pm, p.mp, p.mm]
        for m in mats:
            assert np.max(np.abs(m @ m - m)) < 1e-14
        for i, a in enumerate(mats):
            for b in mats[i + 1:]:
                assert np.max(np.abs(a @ b)) == 0.0
        assert np.array_equal(sum(mats), np.eye(basis.dim))


def test_build_D_values(dim4):
    spectrum, basis, _, _ = dim4
    assert np.allclose(np.diag(build_D(spectrum, basis, 2.1)), [0.1, 2.3, 2.3, 4.5])
    assert np.allclose(np.diag(build_D(spectrum, basis, 0.0)), [-2.0, 0.2, 0.2, 2.4])


def test_build_Dc_and_shift(dim4):
    spectrum, basis, _, _ = dim4
    assert np.allclose(np.diag(build_Dc(spectrum, basis, 2.1)), [0.1, 2.3, 2.3, 4.5])
    D = build_D(spectrum, basis, 2.7)
    Dc = build_Dc(spectrum, basis, 2.1)
    assert np.allclose(D - Dc, 0.6 * np.eye(4))
    # a degenerate entry is constructed fine; inversion is what rejects
    assert build_Dc(spectrum, basis, 2.0)[0, 0] == 0.0


def test_build_Hc(dim4):
    spectrum, basis, I_c, _ = dim4
    H = build_Hc(spectrum, basis, I_c)
    assert H[0, 0] == pytest.approx(2.1)
    off = H - np.diag(np.diag(H))
    assert np.max(np.abs(off)) == 0.0  # 1-dim ++ block: no off-diagonal survives
    p = projectors(basis)
    assert np.max(np.abs(H @ p.pp - p.pp @ H)) < 1e-14
    assert np.max(np.abs(H @ p.mm - p.mm @ H)) < 1e-14


def test_build_Hc_zero_coupling(dim4):
    spectrum, basis, _, _ = dim4
    H = build_Hc(spectrum, basis, np.zeros((4, 4)))
    assert np.allclose(H, np.diag([2.0, -0.2, -0.2, -2.4]))


def test_build_HDelta1_rows(dim4):
    spectrum, basis, I_c, _ = dim4
    hd1 = build_HDelta1(projectors(basis), I_c)
    assert np.allclose(hd1[0], [0.0, 0.1, 0.1, 0.1])
    assert np.allclose(hd1[3], [-0.1, -0.1, -0.1, -0.1])
    assert np.max(np.abs(hd1[1])) == 0.0
    assert np.max(np.abs(hd1[2])) == 0.0


def test_HDelta1_pp_block_vanishes():
    rng = np.random.default_rng(5)
    for _ in range(5):
        pos, neg = random_spectrum(rng)
        basis = build_basis(SingleParticleSpectrum.from_lists(pos, neg))
        p = projectors(basis)
        I_c = rng.uniform(-1, 1, size=(basis.dim, basis.dim))
        I_c = 0.5 * (I_c + I_c.T)
        hd1 = build_HDelta1(p, I_c)
        assert np.max(np.abs(p.pp @ hd1 @ p.pp)) < 1e-15


def test_HDelta1_zero_coupling(dim4):
    spectrum, basis, _, _ = dim4
    assert not np.any(build_HDelta1(projectors(basis), np.zeros((4, 4))))


def test_build_G0_values(dim4):
    spectrum, basis, _, _ = dim4
    G0 = build_G0(spectrum, basis, 2.1, projectors(basis))
    assert np.allclose(np.diag(G0), [10.0, 0.0, 0.0, -1.0 / 4.5])


def test_build_G0_large_E_limit(dim4):
    spectrum, basis, _, _ = dim4
    G0 = build_G0(spectrum, basis, 1e9, projectors(basis))
    assert np.max(np.abs(np.diag(G0))) < 1e-8


def test_build_G0_degenerate(dim4):
    spectrum, basis, _, _ = dim4
    with pytest.raises(DegenerateDenominatorError):
        build_G0(spectrum, basis, 2.0, projectors(basis))


def test_G0_matches_contour_integral():
    rng = np.random.default_rng(23)
    for _ in range(10):
        pos, neg = random_spectrum(rng)
        spectrum = SingleParticleSpectrum.from_lists(pos, neg)
        basis = build_basis(spectrum)
        sums = {a + b for a in spectrum.energies for b in spectrum.energies}
        E = 5.0
        while any(abs(E - s) < 0.2 for s in sums):
            E = float(rng.uniform(-4, 7))
        G0 = build_G0(spectrum, basis, E, projectors(basis))
        assert np.max(np.abs(G0 - contour_integral_Finv(spectrum, basis, E))) < 1e-12
