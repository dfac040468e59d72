"""Two-site DMRG ground-state search with a Lanczos local solver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, NumericalError, ParameterError
from .mps import MPS, _kept_states


@dataclass
class DmrgConfig:
    max_bond: int = 64
    svd_cutoff: float = 1e-10
    max_sweeps: int = 30
    energy_tol: float = 1e-10
    lanczos_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.max_bond < 2:
            raise ParameterError("max_bond must be >= 2")
        for name in ("svd_cutoff", "energy_tol"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0")

    def to_dict(self):
        return {
            "max_bond": self.max_bond, "svd_cutoff": self.svd_cutoff,
            "max_sweeps": self.max_sweeps, "energy_tol": self.energy_tol,
            "lanczos_iters": self.lanczos_iters, "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _contract_left(env, A, W):
    # env and result indexed (bra bond, mpo bond, ket bond)
    tmp = np.einsum("awb,aic->wbic", env, A.conj())
    tmp = np.einsum("wbic,wvij->vbjc", tmp, W)
    return np.einsum("vbjc,bjd->cvd", tmp, A)


def _contract_right(env, A, W):
    tmp = np.einsum("cwd,aic->awid", env, A.conj())
    tmp = np.einsum("awid,vwij->avjd", tmp, W)
    return np.einsum("avjd,bjd->avb", tmp, A)


class _EffectiveH:
    """Two-site effective Hamiltonian as a matrix-free operator."""

    def __init__(self, lenv, W1, W2, renv):
        self.lenv = lenv    # (bra, op, ket)
        self.renv = renv
        self.W = np.einsum("uvij,vwkl->uwikjl", W1, W2)  # (wl, wr, i, k, j, l)
        self.dims = (lenv.shape[2], 2, 2, renv.shape[2])
        self.size = int(np.prod(self.dims))

    def matvec(self, x):
        theta = x.reshape(self.dims)
        t = np.einsum("awb,bjlc->awjlc", self.lenv, theta)
        t = np.einsum("awjlc,wvikjl->avikc", t, self.W)
        t = np.einsum("avikc,dvc->aikd", t, self.renv)
        return t.reshape(-1)

    def dense(self):
        H = np.einsum("awb,wvikjl,dvc->aikdbjlc", self.lenv, self.W, self.renv)
        n = self.size
        return H.reshape(n, n)


def _solve_local(heff, theta0, lanczos_iters):
    v0 = theta0.reshape(-1)
    n = heff.size
    if n <= 64:
        H = heff.dense()
        H = 0.5 * (H + H.conj().T)
        evals, evecs = np.linalg.eigh(H)
        return float(evals[0]), evecs[:, 0]
    op = spla.LinearOperator((n, n), matvec=heff.matvec, dtype=v0.dtype)
    try:
        evals, evecs = spla.eigsh(op, k=1, which="SA", v0=v0,
                                  maxiter=lanczos_iters * 10, ncv=min(n, 24))
    except spla.ArpackNoConvergence as exc:  # pragma: no cover - rare
        raise NumericalError(f"Lanczos breakdown in local solver: {exc}") from exc
    return float(evals[0]), evecs[:, 0]


def dmrg_ground_state(mpo, cfg: DmrgConfig, psi0=None):
    """Variational ground-state search.

    Returns ``(mps, energy)`` with the state normalized and canonicalized
    with center at site 0.  Raises :class:`ConvergenceError` when the
    per-sweep energy change after ``max_sweeps`` sweeps still exceeds
    ``energy_tol`` relative to the energy scale ``max(1, |E|)``.
    """
    L = mpo.L
    if psi0 is None:
        psi = MPS.random_product_state(L, seed=cfg.seed)
    else:
        psi = psi0.copy()
    psi.canonicalize(0)
    psi.normalize()

    Ws = mpo.site_tensors
    # environment caches: lenvs[i] covers sites < i, renvs[i] covers sites > i
    lenvs = [None] * (L + 1)
    renvs = [None] * (L + 1)
    lenvs[0] = np.ones((1, 1, 1))
    renvs[L - 1] = np.ones((1, 1, 1))
    for i in range(L - 1, 1, -1):
        renvs[i - 1] = _contract_right(renvs[i], psi.tensors[i], Ws[i])

    energy = psi.expectation(mpo)
    sweep_energies = [energy]
    delta = np.inf
    for _ in range(cfg.max_sweeps):
        # left-to-right
        for i in range(L - 1):
            energy = _update_bond(psi, Ws, lenvs, renvs, i, cfg, sweep_right=True)
        # right-to-left
        for i in range(L - 2, -1, -1):
            energy = _update_bond(psi, Ws, lenvs, renvs, i, cfg, sweep_right=False)
        delta = abs(sweep_energies[-1] - energy)
        sweep_energies.append(energy)
        if delta < cfg.energy_tol * max(1.0, abs(energy)):
            break
    else:
        raise ConvergenceError(
            f"DMRG did not converge in {cfg.max_sweeps} sweeps "
            f"(last energy delta {delta:.3e})",
            last_delta=delta, energy=energy)

    psi.canonicalize(0)
    psi.normalize()
    psi.metadata["dmrg"] = {
        "energy": energy,
        "sweep_energies": sweep_energies,
        "config": cfg.to_dict(),
        "max_bond_reached": psi.max_bond,
    }
    return psi, energy


def _update_bond(psi, Ws, lenvs, renvs, i, cfg, sweep_right):
    heff = _EffectiveH(lenvs[i], Ws[i], Ws[i + 1], renvs[i + 1])
    theta0 = np.einsum("aib,bjc->aijc", psi.tensors[i], psi.tensors[i + 1])
    energy, theta = _solve_local(heff, theta0, cfg.lanczos_iters)
    dl, _, _, dr = heff.dims
    U, S, Vh = np.linalg.svd(theta.reshape(dl * 2, 2 * dr), full_matrices=False)
    keep = _kept_states(S, cfg.max_bond, cfg.svd_cutoff)
    S = S[:keep]
    S = S / np.linalg.norm(S)
    U = U[:, :keep]
    Vh = Vh[:keep]
    if sweep_right:
        psi.tensors[i] = U.reshape(dl, 2, keep)
        psi.tensors[i + 1] = (S[:, None] * Vh).reshape(keep, 2, dr)
        lenvs[i + 1] = _contract_left(lenvs[i], psi.tensors[i], Ws[i])
        psi.center = i + 1
    else:
        psi.tensors[i] = (U * S[None, :]).reshape(dl, 2, keep)
        psi.tensors[i + 1] = Vh.reshape(keep, 2, dr)
        renvs[i] = _contract_right(renvs[i + 1], psi.tensors[i + 1], Ws[i + 1])
        psi.center = i
    return energy
