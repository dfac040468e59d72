"""Phase classification: minimal basis -> network type -> decimation trace.

The decision tree labels a state as Paramagnet, SSB, SPT, or Critical:

1. estimate the intrinsic dimension in every basis and pick the minimal one;
2. build the geometric network of snapshots in that basis;
3. a probability network (cutoff below 1) with one dominant cluster is a
   paramagnet; with two or more macroscopic clusters it is a symmetry-broken
   state with a single-site order parameter;
4. a scale-free network marks a critical state;
5. an Erdos-Renyi network defers to the decimation trace I_d(l): an abrupt
   decrease at some level l* marks symmetry breaking with an order-parameter
   support of 2^l* sites; a trace that never decreases marks an SPT state.

Degenerate ground states can collapse onto one symmetry sector in a single
DMRG run.  Sampling therefore merges two half-size datasets: one from the
state itself and one from the state with the model's global symmetry flip
applied, so both sectors appear whenever the state is ordered while
symmetric states are unaffected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dmrg import DmrgConfig, dmrg_ground_state
from .errors import ConvergenceError, InputError
from .metric import repetition_stats
from .models import SX, SZ, ModelSpec, build_mpo
from .network import build_network, classify_network, cluster_count, cutoff_radius
from .sampling import BASES, SnapshotDataset, decimate, sample_in_basis
from .twonn import select_minimal_basis, two_nn

# operationalized trace thresholds: an "abrupt" decrease must beat both the
# statistical noise and a fixed fraction of the current value
ABRUPT_CI_FACTOR = 3.0
ABRUPT_REL_FACTOR = 0.25
FLAT_CI_FACTOR = 2.0

# global single-site symmetry flip per family, used to merge both symmetry
# sectors of a possibly collapsed degenerate ground state (identity for the
# particle-number-conserving SSH chain)
SECTOR_FLIP = {"ising": SX, "cluster_ising": SZ, "xxz": SX, "ssh": None}

LABELS = ("Paramagnet", "SSB", "SPT", "Critical", "Indeterminate")


@dataclass
class ClassifyConfig:
    L: int = 40
    L_base: int = 20
    l_max: int = 2
    n_samples: int = 4000        # basis datasets at l = 0
    n_trace: int = 200           # decimation-trace datasets
    neighbor_rank: int = 3
    discard_fraction: float = 0.1
    trace_basis: str = "z"
    macroscopic_fraction: float = 0.1
    abrupt_ci: float = ABRUPT_CI_FACTOR
    abrupt_rel: float = ABRUPT_REL_FACTOR
    flat_ci: float = FLAT_CI_FACTOR
    seed: int = 0
    dmrg: DmrgConfig = field(default_factory=DmrgConfig)

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "L", "L_base", "l_max", "n_samples", "n_trace", "neighbor_rank",
            "discard_fraction", "trace_basis", "macroscopic_fraction",
            "abrupt_ci", "abrupt_rel", "flat_ci", "seed")}
        d["dmrg"] = self.dmrg.to_dict()
        return d


@dataclass
class ClassificationReport:
    label: str
    minimal_basis: str | None = None
    basis_ties: list = field(default_factory=list)
    id_estimates: dict = field(default_factory=dict)    # basis -> IdEstimate dict
    network_label: str | None = None
    network_diagnostics: dict = field(default_factory=dict)
    clusters: dict = field(default_factory=dict)
    trace: list | None = None                            # per-level dicts
    ell_star: int | None = None
    decision_path: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    model: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "label": self.label,
            "minimal_basis": self.minimal_basis,
            "basis_ties": list(self.basis_ties),
            "id_estimates": dict(self.id_estimates),
            "network_label": self.network_label,
            "network_diagnostics": dict(self.network_diagnostics),
            "clusters": dict(self.clusters),
            "trace": self.trace,
            "ell_star": self.ell_star,
            "decision_path": list(self.decision_path),
            "config": dict(self.config),
            "model": dict(self.model),
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def one_line(self):
        extra = f" (ell_star={self.ell_star})" if self.ell_star is not None else ""
        return f"{self.label}{extra} [basis {self.minimal_basis}, " \
               f"network {self.network_label}]"


def _trace_step_kind(prev, cur, cfg):
    """Classify one trace step as 'abrupt-decrease', 'unchanged', 'increase',
    or 'decrease' (significant but not abrupt)."""
    combined = float(np.hypot(prev.ci, cur.ci))
    delta = cur.value - prev.value
    if delta < -max(cfg.abrupt_ci * combined, cfg.abrupt_rel * prev.value):
        return "abrupt-decrease", delta, combined
    if abs(delta) <= cfg.flat_ci * combined:
        return "unchanged", delta, combined
    return ("increase" if delta > 0 else "decrease"), delta, combined


def classify_state(inputs, cfg=None, trace_inputs=None):
    """Run the decision tree on a map (basis, level) -> SnapshotDataset.

    All three bases must be present at level 0.  ``trace_inputs`` maps
    decimation level -> dataset at the fixed embedding dimension L_base
    (level l sampled from a chain of length L_base * 2^l and decimated l
    times); it is only consulted on the Erdos-Renyi branch.  When that
    branch needs levels that are missing, an InputError is raised naming the
    datasets to generate (attribute ``missing``).
    """
    cfg = cfg or ClassifyConfig()
    trace_inputs = trace_inputs or {}
    missing = [(b, 0) for b in BASES if (b, 0) not in inputs]
    if missing:
        err = InputError(f"missing level-0 datasets for bases "
                         f"{[b for b, _ in missing]}")
        err.missing = missing
        raise err

    report = ClassificationReport(label="Indeterminate", config=cfg.to_dict())
    base_ds = {b: inputs[(b, 0)] for b in BASES}
    report.model = dict(next(iter(base_ds.values())).model or {})

    scans = {b: two_nn(ds, seed=cfg.seed,
                       discard_fraction=cfg.discard_fraction)
             for b, ds in base_ds.items()}
    report.id_estimates = {b: e.to_dict() for b, e in scans.items()}
    scan = select_minimal_basis(scans)
    report.minimal_basis = scan.minimal_basis
    report.basis_ties = scan.ties
    report.decision_path.append(
        f"minimal basis {scan.minimal_basis} "
        f"(I_d={scans[scan.minimal_basis].value:.2f}, ties={scan.ties})")

    ds_min = base_ds[scan.minimal_basis]
    R = cutoff_radius(ds_min, n=cfg.neighbor_rank)
    net = build_network(ds_min, R, neighbor_rank=cfg.neighbor_rank)
    net_label = classify_network(net, rep_stats=repetition_stats(ds_min.data))
    report.network_label = net_label.label
    report.network_diagnostics = net_label.diagnostics
    report.decision_path.append(
        f"network in basis {scan.minimal_basis}: {net_label.label} (R={R:.2f})")

    if net_label.label == "probability":
        n_comp, masses, n_macro = cluster_count(
            net, macroscopic_fraction=cfg.macroscopic_fraction)
        report.clusters = {"n_components": n_comp, "n_macroscopic": n_macro,
                           "largest_masses": masses[:5].tolist()}
        if n_macro >= 2:
            report.label = "SSB"
            report.decision_path.append(
                f"{n_macro} macroscopic clusters -> SSB (single-site order)")
        else:
            report.label = "Paramagnet"
            report.decision_path.append(
                "single dominant cluster -> Paramagnet")
        return report

    if net_label.label == "scale_free":
        report.label = "Critical"
        note = "finite-size scaling not evaluated" \
            if "fss_checked" not in net_label.diagnostics else ""
        report.decision_path.append(f"scale-free network -> Critical {note}".strip())
        return report

    if net_label.label == "indeterminate":
        report.decision_path.append("network evidence inconclusive -> Indeterminate")
        return report

    # Erdos-Renyi: consult the decimation trace
    levels = list(range(cfg.l_max + 1))
    missing = [(cfg.trace_basis, l) for l in levels if l not in trace_inputs]
    if missing:
        err = InputError(
            "Erdos-Renyi branch needs decimation datasets: generate basis "
            f"{cfg.trace_basis!r} at levels {[l for _, l in missing]} "
            f"(chain lengths {[cfg.L_base * 2 ** l for _, l in missing]}, "
            "decimated to the base length)")
        err.missing = missing
        raise err

    estimates = []
    trace = []
    for l in levels:
        est = two_nn(trace_inputs[l], seed=cfg.seed,
                     discard_fraction=cfg.discard_fraction)
        estimates.append(est)
        trace.append({"level": l, "value": est.value, "ci": est.ci})
    report.trace = trace

    steps = [_trace_step_kind(a, b, cfg) for a, b in zip(estimates, estimates[1:])]
    for l, (kind, delta, combined) in enumerate(steps, start=1):
        report.decision_path.append(
            f"trace step {l - 1}->{l}: {kind} (delta={delta:.2f}, ci={combined:.2f})")
        if kind == "abrupt-decrease":
            report.label = "SSB"
            report.ell_star = l
            report.decision_path.append(
                f"abrupt decrease -> SSB with order-parameter support 2^{l}")
            return report
    if all(kind in ("unchanged", "increase") for kind, _, _ in steps):
        report.label = "SPT"
        report.decision_path.append("trace never decreases -> SPT")
    else:
        report.decision_path.append(
            "trace decreases without abrupt drop -> Indeterminate")
    return report


# -- pipeline helpers -------------------------------------------------------

def sector_merged_samples(psi, family, basis, n, seed, model=None):
    """Dataset of n snapshots, half from psi and half from the globally
    symmetry-flipped psi, so both sectors of an ordered state appear."""
    flip = SECTOR_FLIP[family]
    n_a = n // 2 if flip is not None else n
    ds = sample_in_basis(psi, basis, n_a, seed=seed, model=model)
    if flip is None:
        return ds
    ds_b = sample_in_basis(psi.apply_local_unitary(flip), basis, n - n_a,
                           seed=seed + 1, model=model)
    return SnapshotDataset(data=np.vstack([ds.data, ds_b.data]), basis=basis,
                           decimation_level=0, seed=seed, model=ds.model)


def _ground_state(spec, dmrg_cfg, cache=None):
    key = (spec.family, spec.L, tuple(sorted(spec.params.items())))
    if cache is not None and key in cache:
        return cache[key]
    psi, _ = dmrg_ground_state(build_mpo(spec), dmrg_cfg)
    if cache is not None:
        cache[key] = psi
    return psi


def decimation_trace(family, params, L_base, l_max, cfg=None, seed=0,
                     basis="z", n_samples=200, dmrg_cfg=None, cache=None):
    """I_d(l) series at fixed embedding dimension L_base.

    Level l samples a chain of length L_base * 2^l and decimates l times.  A
    DMRG failure at some size leaves a partial trace with an error marker.
    """
    cfg = cfg or ClassifyConfig()
    dmrg_cfg = dmrg_cfg or cfg.dmrg
    out = []
    for l in range(l_max + 1):
        L = L_base * 2 ** l
        spec = ModelSpec(family=family, L=L, params=params)
        try:
            psi = _ground_state(spec, dmrg_cfg, cache)
        except ConvergenceError as exc:
            out.append({"level": l, "error": str(exc)})
            continue
        ds = sector_merged_samples(psi, family, basis, n_samples,
                                   seed=seed + 10 * l, model=spec.to_dict())
        est = two_nn(decimate(ds, l), seed=seed,
                     discard_fraction=cfg.discard_fraction)
        out.append({"level": l, "value": est.value, "ci": est.ci})
    return out


def classify_point(family, params, cfg=None, cache=None):
    """Full pipeline for one model point: DMRG, sampling, classification.

    Ground states are cached per (family, L, params) so that seed scans only
    redo the stochastic sampling stages.
    """
    cfg = cfg or ClassifyConfig()
    if cache is None:
        cache = {}
    spec = ModelSpec(family=family, L=cfg.L, params=params)
    psi = _ground_state(spec, cfg.dmrg, cache)
    inputs = {
        (b, 0): sector_merged_samples(psi, family, b, cfg.n_samples,
                                      seed=cfg.seed + 100 * k,
                                      model=spec.to_dict())
        for k, b in enumerate(BASES)}
    try:
        return classify_state(inputs, cfg)
    except InputError as err:
        if not getattr(err, "missing", None):
            raise
    trace_inputs = {}
    for l in range(cfg.l_max + 1):
        L = cfg.L_base * 2 ** l
        tspec = ModelSpec(family=family, L=L, params=params)
        tpsi = _ground_state(tspec, cfg.dmrg, cache)
        ds = sector_merged_samples(tpsi, family, cfg.trace_basis, cfg.n_trace,
                                   seed=cfg.seed + 10 * l,
                                   model=tspec.to_dict())
        trace_inputs[l] = decimate(ds, l)
    return classify_state(inputs, cfg, trace_inputs=trace_inputs)
