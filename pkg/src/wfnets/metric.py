"""Parisi-overlap / Hamming metric, exact k-nearest neighbors, repetition handling.

Rows are packed into 64-bit words so that pairwise Hamming distances reduce
to XOR + popcount; all-pairs evaluation is blocked over rows to bound memory.
Nearest-neighbor searches are exact; ties are broken by row index (stable).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ShapeError

# noise support = NOISE_SCALE * (fraction of repeated rows); kept < 1 so the
# augmentation can never reorder genuinely distinct rows (Hamming gaps >= 1)
NOISE_SCALE = 0.5

_BLOCK_ROWS = 512


def overlap(a, b):
    """Two-replica overlap q = sum_i a_i b_i."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError("rows must have equal length")
    return int(np.dot(a.astype(np.int64), b.astype(np.int64)))


def hamming(a, b):
    """Hamming distance d = (L - q) / 2."""
    a = np.asarray(a)
    q = overlap(a, b)
    return (a.shape[0] - q) // 2


def pack_rows(data):
    """Pack a +-1 matrix into rows of uint64 words (bit = 1 where +1)."""
    bits = np.packbits(data == 1, axis=1)
    n, nb = bits.shape
    pad = (-nb) % 8
    if pad:
        bits = np.hstack([bits, np.zeros((n, pad), dtype=np.uint8)])
    return np.ascontiguousarray(bits).view(np.uint64).reshape(n, -1)


def hamming_block(packed_a, packed_b):
    """Integer Hamming distances between every row of a and of b."""
    x = packed_a[:, None, :] ^ packed_b[None, :, :]
    return np.bitwise_count(x).sum(axis=2, dtype=np.int32)


def pairwise_hamming(data):
    """Full N x N distance matrix (small datasets only)."""
    packed = pack_rows(np.asarray(data))
    return hamming_block(packed, packed)


@dataclass
class RepetitionStats:
    n_samples: int
    n_unique: int
    n_repeated: int          # rows that duplicate an earlier row
    max_multiplicity: int

    @property
    def repeated_fraction(self):
        return self.n_repeated / self.n_samples


def repetition_stats(data):
    data = np.asarray(data)
    _, counts = np.unique(data, axis=0, return_counts=True)
    return RepetitionStats(
        n_samples=data.shape[0],
        n_unique=len(counts),
        n_repeated=int(data.shape[0] - len(counts)),
        max_multiplicity=int(counts.max()),
    )


@dataclass
class AugmentedDataset:
    """Snapshot matrix plus one continuous degeneracy-breaking feature.

    The combined metric is d^2 = hamming^2 + (noise_r - noise_s)^2.  The
    noise support ``w`` is NOISE_SCALE times the repeated-row fraction, hence
    exactly 0 for duplicate-free data and always < 1.
    """

    data: np.ndarray
    noise: np.ndarray
    noise_support: float
    stats: RepetitionStats


def augment_repetitions(ds, seed=0):
    """Append the uniform noise column of width proportional to repetitions."""
    data = np.asarray(ds) if isinstance(ds, np.ndarray) else np.asarray(ds.data if hasattr(ds, "data") else ds)
    stats = repetition_stats(data)
    w = NOISE_SCALE * stats.repeated_fraction
    assert w < 1.0
    if stats.n_repeated == 0:
        noise = np.zeros(stats.n_samples)
    else:
        rng = np.random.Generator(np.random.Philox(key=seed))
        noise = rng.uniform(0.0, w, size=stats.n_samples)
    return AugmentedDataset(data=np.asarray(data), noise=noise,
                            noise_support=w, stats=stats)


@dataclass
class NeighborTable:
    """Per-row ordered nearest neighbors (self excluded)."""

    indices: np.ndarray      # (N, n_max) int
    distances: np.ndarray    # (N, n_max) float or int
    n_max: int
    tie_policy: str = "row-index"
    stats: RepetitionStats | None = None

    def to_csv(self, path):
        n = self.indices.shape[0]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("row," + ",".join(
                f"nn{j + 1},d{j + 1}" for j in range(self.n_max)) + "\n")
            for i in range(n):
                cells = []
                for j in range(self.n_max):
                    cells.append(str(int(self.indices[i, j])))
                    d = self.distances[i, j]
                    cells.append(str(int(d)) if float(d).is_integer() else repr(float(d)))
                fh.write(f"{i}," + ",".join(cells) + "\n")


def knn(ds, n_max):
    """Exact n_max nearest neighbors per row.

    Accepts a SnapshotDataset / raw +-1 matrix (integer Hamming metric) or an
    AugmentedDataset (Hamming combined with the noise feature).
    """
    if isinstance(ds, AugmentedDataset):
        data, noise = ds.data, ds.noise
        stats = ds.stats
    else:
        data = np.asarray(ds) if isinstance(ds, np.ndarray) else np.asarray(ds.data if hasattr(ds, "data") else ds)
        noise = None
        stats = None
    n = data.shape[0]
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    if n_max >= n:
        raise InputError(f"n_max={n_max} requires at least {n_max + 1} rows, got {n}")

    packed = pack_rows(data)
    idx_out = np.empty((n, n_max), dtype=np.int64)
    dist_out = np.empty((n, n_max), dtype=float if noise is not None else np.int32)
    col_idx = np.arange(n)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        d = hamming_block(packed[start:stop], packed)
        if noise is not None:
            dn = noise[start:stop, None] - noise[None, :]
            d = np.sqrt(d.astype(float) ** 2 + dn ** 2)
        else:
            d = d.copy()
        big = np.iinfo(np.int32).max if noise is None else np.inf
        d[col_idx[start:stop] - start, col_idx[start:stop]] = big  # exclude self
        order = np.lexsort((np.broadcast_to(col_idx, d.shape), d), axis=1)
        take = order[:, :n_max]
        idx_out[start:stop] = take
        dist_out[start:stop] = np.take_along_axis(d, take, axis=1)
    if stats is None:
        stats = repetition_stats(data)
    return NeighborTable(indices=idx_out, distances=dist_out, n_max=n_max,
                         stats=stats)
