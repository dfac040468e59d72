import numpy as np
import pytest

from wfnets.mps import MPS
from wfnets.models import ModelSpec, build_mpo
from wfnets.errors import ShapeError


def random_mps(L, chi, seed=0, complex_=False):
    rng = np.random.Generator(np.random.Philox(key=seed))
    dims = [1] + [min(chi, 2 ** min(i + 1, L - i - 1)) for i in range(L - 1)] + [1]
    tensors = []
    for i in range(L):
        shape = (dims[i], 2, dims[i + 1])
        t = rng.normal(size=shape)
        if complex_:
            t = t + 1j * rng.normal(size=shape)
        tensors.append(t)
    psi = MPS(tensors)
    psi.normalize()
    return psi


@pytest.mark.parametrize("center", [0, 3, 7])
def test_canonicalize_isometries(center):
    psi = random_mps(8, 6, seed=1)
    dense_before = psi.to_dense()
    psi.canonicalize(center)
    assert psi.check_canonical(tol=1e-10)
    assert np.allclose(psi.to_dense(), dense_before, atol=1e-12)
    assert abs(psi.norm() - 1.0) < 1e-10


def test_canonicalize_complex():
    psi = random_mps(6, 4, seed=2, complex_=True)
    psi.canonicalize(2)
    assert psi.check_canonical(tol=1e-10)


def test_truncate_product_state_unchanged():
    psi = MPS.random_product_state(6, seed=3)
    before = [t.copy() for t in psi.tensors]
    psi.truncate(max_bond=16, svd_cutoff=1e-12)
    assert psi.max_bond == 1
    overlap = abs(MPS(before).overlap(psi))
    assert abs(overlap - 1.0) < 1e-10


def test_truncate_singlet_exact_at_chi2():
    # (|ud> - |du>)/sqrt(2)
    t0 = np.zeros((1, 2, 2))
    t0[0, 0, 0] = 1.0
    t0[0, 1, 1] = 1.0
    t1 = np.zeros((2, 2, 1))
    t1[0, 1, 0] = 1 / np.sqrt(2)
    t1[1, 0, 0] = -1 / np.sqrt(2)
    psi = MPS([t0, t1])
    ref = psi.to_dense()
    psi.truncate(max_bond=2, svd_cutoff=1e-14)
    fid = abs(np.vdot(ref, psi.to_dense())) ** 2
    assert abs(fid - 1.0) < 1e-12


def test_truncate_fidelity_single_bond_matches_dense_svd():
    # truncating one bond of a two-site state: fidelity = kept weight, exactly
    rng = np.random.Generator(np.random.Philox(key=7))
    theta = rng.normal(size=(4, 4))
    theta /= np.linalg.norm(theta)
    U, S, Vh = np.linalg.svd(theta)
    # L=4 MPS whose middle bond carries exactly the singular values of theta
    A0 = np.zeros((1, 2, 2))
    A0[0, 0, 0] = A0[0, 1, 1] = 1.0
    A1 = U.reshape(2, 2, 4)
    A2 = (S[:, None] * Vh).reshape(4, 2, 2)
    A3 = np.zeros((2, 2, 1))
    A3[0, 0, 0] = A3[1, 1, 0] = 1.0
    psi = MPS([A0, A1, A2, A3])
    ref = psi.to_dense()
    kept = psi.truncate(max_bond=2, svd_cutoff=0.0)
    fid = abs(np.vdot(ref, psi.to_dense())) ** 2 / np.vdot(ref, ref).real
    expected = np.sum(S[:2] ** 2) / np.sum(S ** 2)
    assert abs(fid - expected) < 1e-10
    assert psi.max_bond <= 2


def test_truncate_fidelity_tracks_kept_weights():
    psi = random_mps(8, 16, seed=11)
    ref = psi.to_dense()
    kept = psi.truncate(max_bond=4, svd_cutoff=0.0)
    fid = abs(np.vdot(ref, psi.to_dense())) ** 2
    # sequential truncation: fidelity ~ product of kept weights, first order in
    # the discarded weight per bond
    assert abs(fid - np.prod(kept)) < 5e-3
    assert all(b <= 4 for b in psi.bond_dims)


def test_expectation_matches_dense():
    spec = ModelSpec("xxz", 8, {"J": 1.0, "J_z": 0.7})
    mpo = build_mpo(spec)
    psi = random_mps(8, 8, seed=4)
    dense_H = mpo.to_dense()
    vec = psi.to_dense()
    expected = float(np.real(vec.conj() @ dense_H @ vec))
    assert abs(psi.expectation(mpo) - expected) < 1e-10


def test_expectation_product_state_classical_ising():
    L = 10
    up = [np.array([1.0, 0.0])] * L
    psi = MPS.product_state(up)
    mpo = build_mpo(ModelSpec("ising", L, {"h": 0.0}))
    assert abs(psi.expectation(mpo) - (-(L - 1))) < 1e-12


def test_expectation_identity_mpo_is_one():
    from wfnets.models import MPO, ID2
    L = 6
    W = ID2.reshape(1, 1, 2, 2)
    mpo = MPO(site_tensors=tuple([W] * L), L=L)
    psi = random_mps(L, 4, seed=5)
    assert abs(psi.expectation(mpo) - 1.0) < 1e-10


def test_expectation_length_mismatch():
    psi = random_mps(6, 4)
    mpo = build_mpo(ModelSpec("ising", 8, {"h": 1.0}))
    with pytest.raises(ShapeError):
        psi.expectation(mpo)


def test_site_expectation_polarized():
    from wfnets.models import SZ
    psi = MPS.product_state([np.array([1.0, 0.0])] * 5)
    assert np.allclose(psi.site_expectation(SZ), 1.0)


def test_site_expectation_matches_dense():
    from wfnets.models import SX
    from oracles import op_at, SX as OSX
    psi = random_mps(6, 6, seed=9)
    vec = psi.to_dense()
    vals = psi.site_expectation(SX)
    for i in range(6):
        expected = float(np.real(vec.conj() @ op_at([OSX], [i], 6) @ vec))
        assert abs(vals[i] - expected) < 1e-10
