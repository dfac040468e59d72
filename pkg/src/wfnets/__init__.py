"""Phase classification of 1D spin chains from wave-function snapshots."""

from .classify import ClassifyConfig, ClassificationReport, classify_point, classify_state
from .dmrg import DmrgConfig, dmrg_ground_state
from .models import ModelSpec, build_mpo
from .mps import MPS
from .network import build_loop_network, build_network, classify_network, cutoff_radius
from .sampling import SnapshotDataset, decimate, perfect_sample, rotate_basis, sample_in_basis
from .twonn import select_minimal_basis, two_nn, two_nn_points

__version__ = "0.1.0"

__all__ = [
    "MPS", "ModelSpec", "DmrgConfig", "ClassifyConfig",
    "ClassificationReport", "SnapshotDataset",
    "build_mpo", "dmrg_ground_state", "rotate_basis", "perfect_sample",
    "sample_in_basis", "decimate", "two_nn", "two_nn_points",
    "select_minimal_basis", "cutoff_radius", "build_network",
    "build_loop_network", "classify_network", "classify_state",
    "classify_point", "__version__",
]
