"""Intrinsic dimension across the Ising transition.

Scans the transverse field through the critical point and estimates the
TWO-NN intrinsic dimension of the snapshot datasets in all three bases.
Deep in the ferromagnet the z-basis data is low-dimensional, deep in the
paramagnet the x-basis data is, and the minimal-complexity basis flips at
the transition.
"""

from wfnets.dmrg import DmrgConfig, dmrg_ground_state
from wfnets.models import ModelSpec, build_mpo
from wfnets.sampling import sample_in_basis
from wfnets.twonn import select_minimal_basis, two_nn

L, n_samples = 32, 800
fields = (0.25, 0.5, 1.0, 1.5, 2.0)

print(f"Ising chain, L={L}, {n_samples} snapshots per basis")
print(f"{'h':>5} {'I_d(x)':>12} {'I_d(y)':>12} {'I_d(z)':>12}   minimal")
for h in fields:
    spec = ModelSpec(family="ising", L=L, params={"h": h})
    psi, _ = dmrg_ground_state(build_mpo(spec), DmrgConfig(seed=1))
    scans = {}
    for basis in "xyz":
        ds = sample_in_basis(psi, basis, n_samples, seed=2)
        scans[basis] = two_nn(ds, seed=0)
    pick = select_minimal_basis(scans)
    cells = " ".join(f"{scans[b].value:7.2f}+-{scans[b].ci:4.2f}" for b in "xyz")
    tie = f" (tie with {', '.join(pick.ties)})" if pick.ties else ""
    print(f"{h:5.2f} {cells}   {pick.minimal_basis}{tie}")

print("\nLow I_d in exactly one basis signals an ordered or polarized state;"
      "\nhigh I_d in every basis signals critical or topological data.")
