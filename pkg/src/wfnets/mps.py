"""Matrix product states: canonical forms, truncation, expectation values.

Site tensors carry indices (left bond, physical, right bond).  Physical
index 0 is spin up (+1), index 1 is spin down (-1), in whatever basis the
state is currently expressed.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ShapeError


class MPS:
    """Open-boundary MPS of L spin-1/2 sites."""

    def __init__(self, tensors, center=None, metadata=None):
        self.tensors = [np.asarray(t) for t in tensors]
        self.L = len(self.tensors)
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ShapeError("boundary bonds must have dimension 1")
        for a, b in zip(self.tensors[:-1], self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ShapeError("mismatched internal bond dimensions")
        self.center = center
        self.metadata = dict(metadata or {})

    # -- constructors ------------------------------------------------------

    @classmethod
    def random_product_state(cls, L, seed=0):
        """Product state with i.i.d. random single-site directions (real amplitudes)."""
        rng = np.random.Generator(np.random.Philox(key=seed))
        tensors = []
        for _ in range(L):
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            tensors.append(v.reshape(1, 2, 1))
        return cls(tensors, center=None, metadata={"seed": seed})

    @classmethod
    def product_state(cls, local_states):
        tensors = []
        for v in local_states:
            v = np.asarray(v, dtype=float)
            v = v / np.linalg.norm(v)
            tensors.append(v.reshape(1, 2, 1))
        return cls(tensors)

    def copy(self):
        return MPS([t.copy() for t in self.tensors], center=self.center,
                   metadata=dict(self.metadata))

    @property
    def bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self):
        return max(self.bond_dims) if self.L > 1 else 1

    # -- norms and canonical form -----------------------------------------

    def norm(self):
        env = np.ones((1, 1))
        for A in self.tensors:
            env = np.einsum("ab,aic,bid->cd", env, A.conj(), A)
        return float(np.sqrt(abs(env[0, 0])))

    def normalize(self):
        n = self.norm()
        if n == 0:
            raise NumericalError("cannot normalize a zero state")
        self.tensors[-1] = self.tensors[-1] / n
        return self

    def canonicalize(self, center=0):
        """Bring the state into mixed canonical form with the given center.

        Left of the center all tensors are left isometries, right of it right
        isometries.  The center tensor absorbs norm and phase.
        """
        L = self.L
        if not 0 <= center < L:
            raise ShapeError(f"center {center} outside chain of length {L}")
        # left-to-right QR up to center
        for i in range(center):
            A = self.tensors[i]
            dl, d, dr = A.shape
            Q, R = np.linalg.qr(A.reshape(dl * d, dr))
            self.tensors[i] = Q.reshape(dl, d, Q.shape[1])
            self.tensors[i + 1] = np.einsum("ab,bic->aic", R, self.tensors[i + 1])
        # right-to-left LQ down to center
        for i in range(L - 1, center, -1):
            A = self.tensors[i]
            dl, d, dr = A.shape
            Qh, Rh = np.linalg.qr(A.reshape(dl, d * dr).conj().T)
            Q = Qh.conj().T  # (k, d*dr) right isometry
            R = Rh.conj().T  # (dl, k)
            self.tensors[i] = Q.reshape(Q.shape[0], d, dr)
            self.tensors[i - 1] = np.einsum("aib,bc->aic", self.tensors[i - 1], R)
        self.center = center
        return self

    # -- truncation --------------------------------------------------------

    def truncate(self, max_bond, svd_cutoff=0.0):
        """SVD-truncate every bond to at most ``max_bond`` states, discarding
        at most ``svd_cutoff`` relative weight per bond, then restore norm 1.

        Returns the list of kept-weight fractions per bond.
        """
        self.canonicalize(0)
        self.normalize()
        kept = []
        for i in range(self.L - 1):
            theta = np.einsum("aib,bjc->aijc", self.tensors[i], self.tensors[i + 1])
            dl, d1, d2, dr = theta.shape
            U, S, Vh = np.linalg.svd(theta.reshape(dl * d1, d2 * dr),
                                     full_matrices=False)
            keep = _kept_states(S, max_bond, svd_cutoff)
            w = S[:keep] ** 2
            total = float(np.sum(S ** 2))
            kept.append(float(np.sum(w) / total))
            S = S[:keep] / np.sqrt(np.sum(w))
            self.tensors[i] = U[:, :keep].reshape(dl, d1, keep)
            self.tensors[i + 1] = (S[:, None] * Vh[:keep]).reshape(keep, d2, dr)
        self.center = self.L - 1
        return kept

    # -- contractions ------------------------------------------------------

    def overlap(self, other):
        """<self|other>."""
        if other.L != self.L:
            raise ShapeError("length mismatch")
        env = np.ones((1, 1))
        for A, B in zip(self.tensors, other.tensors):
            env = np.einsum("ab,aic,bid->cd", env, A.conj(), B)
        return complex(env[0, 0])

    def expectation(self, mpo):
        """<psi|H|psi> for an MPO of matching length."""
        if mpo.L != self.L:
            raise ShapeError("MPO/MPS length mismatch")
        env = np.ones((1, 1, 1))  # (bra, op, ket)
        for A, W in zip(self.tensors, mpo.site_tensors):
            env = np.einsum("awb,aic->wbic", env, A.conj())
            env = np.einsum("wbic,wvij->vbjc", env, W)
            env = np.einsum("vbjc,bjd->cvd", env, A)
        val = env[0, 0, 0]
        return float(val.real) if np.iscomplexobj(env) else float(val)

    def site_expectation(self, op):
        """<psi|op_i|psi> for every site i; assumes the state is normalized."""
        psi = self.copy().canonicalize(0)
        out = np.empty(self.L)
        # right environments, indexed [bra bond, ket bond]
        renvs = [None] * (self.L + 1)
        renvs[self.L] = np.ones((1, 1))
        for i in range(self.L - 1, -1, -1):
            A = psi.tensors[i]
            renvs[i] = np.einsum("aib,cid,bd->ac", A.conj(), A, renvs[i + 1])
        env = np.ones((1, 1))
        op = np.asarray(op)
        for i in range(self.L):
            A = psi.tensors[i]
            M = np.einsum("ab,aic,bjd,cd->ij", env, A.conj(), A, renvs[i + 1])
            out[i] = float(np.einsum("ij,ij->", op, M).real)
            env = np.einsum("ab,aic,bid->cd", env, A.conj(), A)
        return out

    def to_dense(self):
        """Full 2^L amplitude vector; refuses large L."""
        if self.L > 22:
            raise ShapeError(f"dense conversion refused for L={self.L}")
        vec = self.tensors[0][0]  # (2, D)
        for A in self.tensors[1:]:
            vec = np.tensordot(vec, A, axes=([vec.ndim - 1], [0]))
        return vec.reshape(-1)

    # -- local operations --------------------------------------------------

    def apply_local_unitary(self, U):
        """Apply the same single-site operator on every site (new MPS)."""
        U = np.asarray(U)
        tensors = [np.einsum("ij,ajb->aib", U, A) for A in self.tensors]
        return MPS(tensors, center=self.center, metadata=dict(self.metadata))

    def check_canonical(self, tol=1e-10):
        """Verify isometry conditions around the current center."""
        if self.center is None:
            return False
        for i in range(self.center):
            A = self.tensors[i]
            dl, d, dr = A.shape
            M = A.reshape(dl * d, dr)
            if np.max(np.abs(M.conj().T @ M - np.eye(dr))) > tol:
                return False
        for i in range(self.center + 1, self.L):
            A = self.tensors[i]
            dl, d, dr = A.shape
            M = A.reshape(dl, d * dr)
            if np.max(np.abs(M @ M.conj().T - np.eye(dl))) > tol:
                return False
        return True


def _kept_states(S, max_bond, svd_cutoff):
    total = np.sum(S ** 2)
    if total == 0:
        return 1
    keep = min(len(S), max_bond)
    # discard trailing weight up to svd_cutoff
    w = S ** 2 / total
    tail = np.cumsum(w[::-1])[::-1]
    while keep > 1 and tail[keep - 1] <= svd_cutoff:
        keep -= 1
    return max(keep, 1)
