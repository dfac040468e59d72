"""TWO-NN intrinsic-dimension estimation and minimal-complexity basis choice.

The estimator uses the maximum-likelihood form: with mu_s = r2/r1 the ratio
of second- to first-neighbor distances, log mu is exponentially distributed
with rate I_d on a locally uniform manifold, so

    I_d = n_used / sum_s log mu_s

after discarding the largest ``discard_fraction`` of the mu values, which
suppresses density-inhomogeneity tails.  The 95% confidence half-width
follows from the asymptotic normality of the rate estimate,
ci = 1.96 * I_d / sqrt(n_used).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EstimatorError, InputError
from .metric import augment_repetitions, knn

DEFAULT_DISCARD = 0.1
MIN_SAMPLES = 100
_Z975 = 1.959963984540054


@dataclass
class IdEstimate:
    value: float
    ci: float                 # 95% confidence half-width
    n_used: int
    discard_fraction: float
    method: str = "twonn-mle"

    def to_dict(self):
        return {"value": self.value, "ci": self.ci, "n_used": self.n_used,
                "discard_fraction": self.discard_fraction, "method": self.method}


@dataclass
class BasisScan:
    estimates: dict
    minimal_basis: str
    ties: list = field(default_factory=list)

    def to_dict(self):
        return {"estimates": {b: e.to_dict() for b, e in self.estimates.items()},
                "minimal_basis": self.minimal_basis, "ties": list(self.ties)}


def _estimate_from_ratios(mu, discard_fraction):
    # log mu ~ Exp(I_d); dropping the top discard_fraction is type-II
    # censoring, so the rate MLE uses the total time on test
    x = np.sort(np.log(np.asarray(mu, dtype=float)))
    n = len(x)
    n_used = n - int(np.floor(discard_fraction * n))
    if n_used < 2:
        raise InputError("too few ratios retained")
    total = float(np.sum(x[:n_used]) + (n - n_used) * x[n_used - 1])
    if total <= 0.0:
        raise EstimatorError("all neighbor ratios are 1; intrinsic dimension undefined")
    value = n_used / total
    ci = _Z975 * value / np.sqrt(n_used)
    return IdEstimate(value=value, ci=ci, n_used=n_used,
                      discard_fraction=discard_fraction)


def two_nn(ds, seed=0, discard_fraction=DEFAULT_DISCARD):
    """TWO-NN estimate for a snapshot dataset (+-1 rows, Hamming metric).

    Repeated rows are first split apart by the noise-column augmentation, so
    first-neighbor distances are strictly positive.  A row whose nearest
    neighbor is one of its own copies (r1 < 1, a pure noise-feature distance)
    yields a ratio that measures the synthetic column rather than the data
    manifold; such rows are excluded as long as they are a minority.  When
    they make up half the dataset or more, the sampling is genuinely
    repetition-dominated and the noise line itself is the relevant
    one-dimensional manifold, so all rows are kept.
    """
    aug = augment_repetitions(ds, seed=seed)
    n = aug.data.shape[0]
    if n < MIN_SAMPLES:
        raise InputError(f"need at least {MIN_SAMPLES} samples, got {n}")
    table = knn(aug, 2)
    r1 = np.asarray(table.distances[:, 0], dtype=float)
    r2 = np.asarray(table.distances[:, 1], dtype=float)
    if np.any(r1 == 0.0):
        raise EstimatorError("zero first-neighbor distance after augmentation")
    duplicate_first = r1 < 1.0
    if 0.0 < duplicate_first.mean() < 0.5:
        r1, r2 = r1[~duplicate_first], r2[~duplicate_first]
    return _estimate_from_ratios(r2 / r1, discard_fraction)


def two_nn_points(points, discard_fraction=DEFAULT_DISCARD, boxsize=None):
    """TWO-NN estimate for real-valued points under the Euclidean metric.

    ``boxsize`` enables periodic (torus) distances, which removes the
    boundary bias of bounded supports.
    """
    from scipy.spatial import cKDTree

    points = np.asarray(points, dtype=float)
    if points.shape[0] < MIN_SAMPLES:
        raise InputError(f"need at least {MIN_SAMPLES} samples, got {points.shape[0]}")
    dist, _ = cKDTree(points, boxsize=boxsize).query(points, k=3)
    r1, r2 = dist[:, 1], dist[:, 2]
    if np.any(r1 == 0.0):
        raise EstimatorError("duplicate points; cannot form neighbor ratios")
    return _estimate_from_ratios(r2 / r1, discard_fraction)


def select_minimal_basis(scans):
    """Pick the basis with the lowest estimate; flag within-ci ties."""
    if not scans:
        raise InputError("empty basis scan")
    if len(scans) < 2:
        raise InputError("need at least two bases to compare")
    items = sorted(scans.items(), key=lambda kv: kv[1].value)
    best_basis, best = items[0]
    ties = [b for b, e in items[1:]
            if abs(e.value - best.value) < e.ci + best.ci]
    return BasisScan(estimates=dict(scans), minimal_basis=best_basis, ties=ties)
