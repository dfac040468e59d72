"""Snapshot generation: basis rotation, perfect sampling, decimation, file IO.

Snapshots are rows of +-1 values; +1 corresponds to physical index 0 (spin up
along the measurement axis).  Randomness comes from the Philox counter-based
generator, so datasets are reproducible across platforms for a given seed.

Basis rotations map the alpha-eigenbasis onto the computational z-basis:

* x: U = [[1, 1], [1, -1]] / sqrt(2)        (Hadamard)
* y: U = [[1, -i], [1, i]] / sqrt(2)        (rows are conjugated sigma_y eigenvectors)
* z: identity

so that z-sampling of the rotated state reproduces alpha-sampling of the
original state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError, ShapeError

BASES = ("x", "y", "z")

_SQ2 = 1.0 / np.sqrt(2.0)
ROTATIONS = {
    "x": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]]),
    "y": np.array([[_SQ2, -1j * _SQ2], [_SQ2, 1j * _SQ2]]),
    "z": np.eye(2),
}


@dataclass
class SnapshotDataset:
    """N_s x L matrix of +-1 snapshots with provenance metadata."""

    data: np.ndarray
    basis: str
    decimation_level: int = 0
    seed: int | None = None
    model: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.int8)
        if self.data.ndim != 2:
            raise ShapeError("snapshot data must be a 2D matrix")
        if not np.all(np.abs(self.data) == 1):
            raise InputError("snapshot entries must be +-1")
        if self.basis not in BASES:
            raise InputError(f"unknown basis {self.basis!r}")
        if self.decimation_level < 0:
            raise InputError("decimation level must be >= 0")

    @property
    def n_samples(self):
        return self.data.shape[0]

    @property
    def L(self):
        return self.data.shape[1]

    def sidecar(self):
        return {
            "format": "wfnets-snapshots-v1",
            "basis": self.basis,
            "decimation_level": self.decimation_level,
            "n_samples": int(self.n_samples),
            "L": int(self.L),
            "seed": self.seed,
            "model": self.model,
        }

    # -- persistence -------------------------------------------------------

    def save(self, path):
        """Write ``path`` (bit-packed rows) and ``path + '.json'`` (sidecar)."""
        path = str(path)
        bits = np.packbits(self.data == 1, axis=1)
        with open(path, "wb") as fh:
            fh.write(bits.tobytes())
        with open(path + ".json", "w", encoding="utf-8") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        path = str(path)
        with open(path + ".json", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("format") != "wfnets-snapshots-v1":
            raise InputError(f"unrecognized snapshot file format in {path}.json")
        n, L = meta["n_samples"], meta["L"]
        row_bytes = (L + 7) // 8
        raw = np.fromfile(path, dtype=np.uint8)
        if raw.size != n * row_bytes:
            raise InputError(f"payload size mismatch in {path}")
        bits = np.unpackbits(raw.reshape(n, row_bytes), axis=1)[:, :L]
        data = np.where(bits == 1, 1, -1).astype(np.int8)
        return cls(data=data, basis=meta["basis"],
                   decimation_level=meta["decimation_level"],
                   seed=meta["seed"], model=meta.get("model", {}))

    def to_csv(self, path):
        np.savetxt(path, self.data, fmt="%d", delimiter=",")


def rotate_basis(mps, basis):
    """Rotate so that z-sampling of the result equals ``basis``-sampling of the input."""
    if basis not in BASES:
        raise InputError(f"unknown basis {basis!r}")
    if basis == "z":
        return mps.copy()
    return mps.apply_local_unitary(ROTATIONS[basis])


def perfect_sample(mps, n_samples, seed, prob_tol=1e-8):
    """Draw i.i.d. snapshots from an MPS via the conditional-probability chain.

    The state is canonicalized with center at site 0 so that at every site the
    conditional outcome probabilities follow from the partial contraction of
    the previous outcomes alone; all samples advance through the chain
    together, one batched matrix product per site.
    """
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    psi = mps.copy().canonicalize(0)
    n = psi.norm()
    if abs(n - 1.0) > 1e-8:
        raise NumericalError(f"state norm {n} is not 1; normalize before sampling")
    L = psi.L
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((n_samples, L))

    complex_state = any(np.iscomplexobj(t) for t in psi.tensors)
    V = np.ones((n_samples, 1), dtype=complex if complex_state else float)
    out = np.empty((n_samples, L), dtype=np.int8)
    for k in range(L):
        A = psi.tensors[k]
        W0 = V @ A[:, 0, :]
        W1 = V @ A[:, 1, :]
        p0 = np.einsum("ij,ij->i", W0.conj(), W0).real
        p1 = np.einsum("ij,ij->i", W1.conj(), W1).real
        total = p0 + p1
        if np.max(np.abs(total - 1.0)) > prob_tol:
            raise NumericalError(
                "conditional probabilities do not sum to 1 "
                f"(max deviation {np.max(np.abs(total - 1.0)):.3e})")
        pick_up = u[:, k] < p0 / total
        out[:, k] = np.where(pick_up, 1, -1)
        V = np.where(pick_up[:, None], W0, W1)
        V = V / np.sqrt(np.where(pick_up, p0, p1))[:, None]
    return SnapshotDataset(data=out, basis="z", seed=seed)


def sample_in_basis(mps, basis, n_samples, seed, model=None):
    """Rotate then perfect-sample; labels the dataset with the requested basis."""
    ds = perfect_sample(rotate_basis(mps, basis), n_samples, seed)
    ds.basis = basis
    ds.model = dict(model or {})
    return ds


def decimate(ds: SnapshotDataset, steps=1):
    """Parity blocking: each output entry is the product over a block of
    2**steps consecutive input entries."""
    if steps < 0:
        raise InputError("steps must be >= 0")
    if steps == 0:
        return ds
    block = 2 ** steps
    if ds.L % block != 0:
        raise ShapeError(f"L={ds.L} not divisible by 2^{steps}")
    data = ds.data.reshape(ds.n_samples, ds.L // block, block)
    data = np.prod(data.astype(np.int64), axis=2).astype(np.int8)
    return SnapshotDataset(data=data, basis=ds.basis,
                           decimation_level=ds.decimation_level + steps,
                           seed=ds.seed, model=dict(ds.model))
