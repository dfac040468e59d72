import numpy as np
import pytest

from wfnets.classify import (ClassifyConfig, SECTOR_FLIP, _trace_step_kind,
                             classify_state, decimation_trace,
                             sector_merged_samples)
from wfnets.dmrg import DmrgConfig
from wfnets.errors import InputError
from wfnets.mps import MPS
from wfnets.sampling import SnapshotDataset
from wfnets.twonn import IdEstimate


def rand_ds(basis, n=600, L=24, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    data = rng.choice([-1, 1], size=(n, L)).astype(np.int8)
    return SnapshotDataset(data=data, basis=basis, model={"family": "test"})


def const_ds(basis, value=1, n=600, L=24):
    return SnapshotDataset(data=np.full((n, L), value, dtype=np.int8),
                           basis=basis)


def two_sector_ds(basis, n=600, L=24):
    data = np.vstack([np.ones((n // 2, L)), -np.ones((n - n // 2, L))])
    return SnapshotDataset(data=data.astype(np.int8), basis=basis)


def test_paramagnet_path():
    inputs = {("x", 0): const_ds("x"), ("y", 0): rand_ds("y", seed=1),
              ("z", 0): rand_ds("z", seed=2)}
    rep = classify_state(inputs)
    assert rep.label == "Paramagnet"
    assert rep.minimal_basis == "x"
    assert rep.network_label == "probability"
    assert rep.clusters["n_macroscopic"] == 1


def test_ssb_two_cluster_path():
    inputs = {("x", 0): rand_ds("x", seed=3), ("y", 0): rand_ds("y", seed=4),
              ("z", 0): two_sector_ds("z")}
    rep = classify_state(inputs)
    assert rep.label == "SSB"
    assert rep.minimal_basis == "z"
    assert rep.clusters["n_macroscopic"] == 2
    assert rep.ell_star is None


def test_spt_path_flat_trace():
    inputs = {(b, 0): rand_ds(b, seed=5 + k) for k, b in enumerate("xyz")}
    trace = {l: rand_ds("z", n=300, L=20, seed=20 + l) for l in range(3)}
    rep = classify_state(inputs, trace_inputs=trace)
    assert rep.network_label == "erdos_renyi"
    assert rep.label == "SPT"
    assert len(rep.trace) == 3


def test_ssb_trace_drop_path():
    inputs = {(b, 0): rand_ds(b, seed=8 + k) for k, b in enumerate("xyz")}
    trace = {0: rand_ds("z", n=300, L=20, seed=30),
             1: const_ds("z", n=300, L=20),
             2: const_ds("z", n=300, L=20)}
    rep = classify_state(inputs, trace_inputs=trace)
    assert rep.label == "SSB"
    assert rep.ell_star == 1


def test_missing_basis_error():
    inputs = {("x", 0): rand_ds("x"), ("z", 0): rand_ds("z", seed=1)}
    with pytest.raises(InputError) as exc:
        classify_state(inputs)
    assert ("y", 0) in exc.value.missing


def test_missing_trace_error_names_levels():
    inputs = {(b, 0): rand_ds(b, seed=11 + k) for k, b in enumerate("xyz")}
    with pytest.raises(InputError) as exc:
        classify_state(inputs, trace_inputs={0: rand_ds("z", n=300, L=20)})
    missing = exc.value.missing
    assert missing == [("z", 1), ("z", 2)]


def test_report_serialization(tmp_path):
    inputs = {("x", 0): const_ds("x"), ("y", 0): rand_ds("y", seed=1),
              ("z", 0): rand_ds("z", seed=2)}
    rep = classify_state(inputs)
    p = tmp_path / "report.json"
    rep.save(p)
    import json
    blob = json.loads(p.read_text())
    assert blob["label"] == "Paramagnet"
    assert blob["decision_path"]
    assert "Paramagnet" in rep.one_line()


def test_determinism():
    inputs = {(b, 0): rand_ds(b, seed=40 + k) for k, b in enumerate("xyz")}
    trace = {l: rand_ds("z", n=300, L=20, seed=50 + l) for l in range(3)}
    a = classify_state(inputs, trace_inputs=trace)
    b = classify_state(inputs, trace_inputs=trace)
    assert a.to_dict() == b.to_dict()


def est(v, ci):
    return IdEstimate(value=v, ci=ci, n_used=500, discard_fraction=0.1)


def test_trace_step_thresholds():
    cfg = ClassifyConfig()
    # large statistically significant drop
    kind, _, _ = _trace_step_kind(est(8.0, 0.3), est(2.0, 0.3), cfg)
    assert kind == "abrupt-decrease"
    # small drop within noise
    kind, _, _ = _trace_step_kind(est(8.0, 0.5), est(7.5, 0.5), cfg)
    assert kind == "unchanged"
    # significant but shallow drop (< 25% of the value) is not abrupt
    kind, _, _ = _trace_step_kind(est(10.0, 0.2), est(8.5, 0.2), cfg)
    assert kind == "decrease"
    kind, _, _ = _trace_step_kind(est(3.0, 0.3), est(6.0, 0.3), cfg)
    assert kind == "increase"


def test_sector_merge_polarized_state():
    # |up...up> merged with its spin-flip gives both fully polarized sectors
    psi = MPS.product_state([[1.0, 0.0]] * 12)
    ds = sector_merged_samples(psi, "ising", "z", 200, seed=0)
    sums = ds.data.sum(axis=1)
    assert sorted(set(sums.tolist())) == [-12, 12]
    assert (sums == 12).sum() == 100


def test_sector_merge_identity_for_ssh():
    assert SECTOR_FLIP["ssh"] is None
    psi = MPS.product_state([[1.0, 0.0]] * 8)
    ds = sector_merged_samples(psi, "ssh", "z", 50, seed=0)
    assert np.all(ds.data == 1)


def test_decimation_trace_failure_markers():
    # a DMRG budget too small to converge leaves error markers, not a crash
    cfg = DmrgConfig(max_sweeps=1, energy_tol=1e-14, seed=0)
    out = decimation_trace("ising", {"h": 1.0}, L_base=8, l_max=1,
                           n_samples=120, dmrg_cfg=cfg)
    assert len(out) == 2
    assert all("error" in step for step in out)
