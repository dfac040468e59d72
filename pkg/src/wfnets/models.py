"""MPO construction for the four supported 1D spin-1/2 Hamiltonians.

Supported families (open boundary conditions throughout):

* ``ising``:          H = -sum_i sz_i sz_{i+1} - h sum_i sx_i
* ``cluster_ising``:  H = -sum_i sx_i sz_{i+1} sx_{i+2} + h sum_i sy_i sy_{i+1}
* ``xxz``:            H = J sum_i (sx sx + sy sy) + J_z sum_i sz sz
* ``ssh``:            spinless-fermion SSH chain after an exact Jordan-Wigner
  mapping; nearest-neighbor hopping becomes staggered (XX+YY)/2 couplings
  with strengths J_A (odd bonds) and J_B (even bonds).

All tensors are real: the sy sy coupling is written as -(i sy) (i sy), and
``i*sy`` is a real matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
ID2 = np.eye(2)
# real stand-in for sy: IY = i*sy, so sy(x)sy = -IY(x)IY
IY = np.array([[0.0, 1.0], [-1.0, 0.0]])

FAMILIES = ("ising", "cluster_ising", "xxz", "ssh")

_REQUIRED_PARAMS = {
    "ising": ("h",),
    "cluster_ising": ("h",),
    "xxz": ("J", "J_z"),
    "ssh": ("J_A", "J_B"),
}


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one Hamiltonian instance."""

    family: str
    L: int
    params: dict = field(default_factory=dict)
    boundary: str = "open"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown model family {self.family!r}")
        if self.boundary != "open":
            raise ParameterError("only open boundary conditions are supported")
        if self.L < 4 or self.L % 2 != 0:
            raise ShapeError(f"L must be even and >= 4, got {self.L}")
        for name in _REQUIRED_PARAMS[self.family]:
            if name not in self.params:
                raise ParameterError(f"{self.family} requires parameter {name!r}")
            value = self.params[name]
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"parameter {name!r} must be finite, got {value!r}")

    def to_dict(self):
        return {
            "family": self.family,
            "L": self.L,
            "params": dict(self.params),
            "boundary": self.boundary,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(family=d["family"], L=int(d["L"]),
                   params=dict(d["params"]), boundary=d.get("boundary", "open"))


@dataclass(frozen=True)
class MPO:
    """Tensor-train operator; site tensors have shape (Dl, Dr, s_out, s_in)."""

    site_tensors: tuple
    L: int

    @property
    def max_bond(self):
        return max(t.shape[1] for t in self.site_tensors[:-1]) if self.L > 1 else 1

    def to_dense(self):
        """Contract into the full 2^L x 2^L matrix.  Only sensible for small L."""
        if self.L > 14:
            raise ShapeError(f"dense contraction refused for L={self.L}")
        # running tensor: (Dr, 2^k, 2^k)
        out = self.site_tensors[0][0]  # (Dr, 2, 2)
        for W in self.site_tensors[1:]:
            out = np.einsum("aij,abkl->bikjl", out, W)
            d = out.shape[1] * out.shape[2]
            out = out.reshape(out.shape[0], d, d)
        return out[0]


def _term_list(spec: ModelSpec):
    """Return [(ops, coeff_fn)] where coeff_fn(start_site) gives the prefactor
    of the string of single-site operators ``ops`` starting at ``start_site``,
    or None when the term is absent there."""
    p = spec.params
    if spec.family == "ising":
        return [
            ((SZ, SZ), lambda i: -1.0),
            ((SX,), lambda i: -p["h"]),
        ]
    if spec.family == "cluster_ising":
        return [
            ((SX, SZ, SX), lambda i: -1.0),
            ((IY, IY), lambda i: -p["h"]),  # +h sy sy
        ]
    if spec.family == "xxz":
        return [
            ((SX, SX), lambda i: p["J"]),
            ((IY, IY), lambda i: -p["J"]),  # +J sy sy
            ((SZ, SZ), lambda i: p["J_z"]),
        ]
    if spec.family == "ssh":
        def hop(i):
            # bond (i, i+1): 0-indexed even i is an intra-cell (J_A) bond
            return p["J_A"] if i % 2 == 0 else p["J_B"]
        return [
            ((SX, SX), lambda i: 0.5 * hop(i)),
            ((IY, IY), lambda i: -0.5 * hop(i)),  # +(J/2) sy sy
        ]
    raise ParameterError(f"unknown family {spec.family!r}")


def build_mpo(spec: ModelSpec) -> MPO:
    """Build the MPO of ``spec`` via a finite-state-machine construction.

    Channel layout on every bond: 0 = finished, 1..m = in-progress term
    stages, m+1 = not yet started.  Tensors are bit-reproducible for equal
    specs (pure arithmetic, no randomness).
    """
    terms = _term_list(spec)
    L = spec.L
    stages = []  # (term_index, stage_index) -> channel id
    channel = {}
    next_ch = 1
    for t, (ops, _) in enumerate(terms):
        for j in range(len(ops) - 1):
            channel[(t, j)] = next_ch
            next_ch += 1
    m = next_ch - 1
    D = m + 2
    ready = D - 1

    Ws = []
    for i in range(L):
        W = np.zeros((D, D, 2, 2))
        W[0, 0] = ID2
        W[ready, ready] = ID2
        for t, (ops, coeff_fn) in enumerate(terms):
            k = len(ops)
            # term starting at this site
            if i + k - 1 < L:
                c = coeff_fn(i)
                if c is not None and c != 0.0:
                    if k == 1:
                        W[ready, 0] += c * ops[0]
                    else:
                        W[ready, channel[(t, 0)]] += c * ops[0]
            # pass-through stages for terms started earlier
            for j in range(1, k):
                start = i - j
                if start < 0 or start + k - 1 >= L:
                    continue
                if coeff_fn(start) in (None, 0.0):
                    continue
                src = channel[(t, j - 1)]
                dst = 0 if j == k - 1 else channel[(t, j)]
                W[src, dst] = ops[j]
        Ws.append(W)

    Ws[0] = Ws[0][ready:ready + 1, :, :, :]
    Ws[-1] = Ws[-1][:, 0:1, :, :]
    for W in Ws:
        W.flags.writeable = False
    return MPO(site_tensors=tuple(Ws), L=L)


def ssh_single_particle_energies(spec: ModelSpec):
    """Eigenmodes of the free-fermion SSH hopping matrix (open chain)."""
    if spec.family != "ssh":
        raise ParameterError("spec is not an SSH model")
    L = spec.L
    h = np.zeros((L, L))
    for i in range(L - 1):
        J = spec.params["J_A"] if i % 2 == 0 else spec.params["J_B"]
        h[i, i + 1] = h[i + 1, i] = J
    return np.linalg.eigvalsh(h)
