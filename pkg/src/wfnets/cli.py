"""Command-line front end: configuration, persistence, and pipeline commands.

Subcommands
-----------
* ``ground-state``  DMRG ground state -> binary MPS checkpoint + energy log
* ``sample``        checkpoint -> snapshot datasets (optionally decimated)
* ``analyze``       snapshot files -> intrinsic-dimension report, network
                    label, degree-distribution CSVs, edge list
* ``fss``           snapshot pool -> finite-size-scaling run JSON + curves CSV
* ``classify``      model point -> phase-classification report

Configuration is a JSON file validated against a published schema; command
line flags override config keys.  Every artifact embeds the seeds and a hash
of the effective configuration, and contains no timestamps, so reruns are
byte-identical.  Exit codes: 0 success, 2 input/configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .classify import ClassifyConfig, classify_point
from .dmrg import DmrgConfig, dmrg_ground_state
from .errors import (ConvergenceError, EstimatorError, InputError,
                     NumericalError, ParameterError, ShapeError, WfnetsError)
from .fss import moment_ratio_scaling, run_fss
from .metric import repetition_stats
from .models import ModelSpec, build_mpo
from .mps import MPS
from .network import (build_network, classify_network, cutoff_radius,
                      degree_distribution)
from .sampling import BASES, SnapshotDataset, decimate, sample_in_basis
from .twonn import two_nn

OUTDIR_ENV = "WFNETS_OUTDIR"

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "model": {
            "type": "object",
            "properties": {
                "family": {"enum": ["ising", "cluster_ising", "xxz", "ssh"]},
                "L": {"type": "integer", "minimum": 4},
                "params": {"type": "object",
                           "additionalProperties": {"type": "number"}},
                "boundary": {"enum": ["open"]},
            },
            "required": ["family", "L", "params"],
            "additionalProperties": False,
        },
        "dmrg": {
            "type": "object",
            "properties": {
                "max_bond": {"type": "integer", "minimum": 1},
                "svd_cutoff": {"type": "number"},
                "max_sweeps": {"type": "integer", "minimum": 1},
                "energy_tol": {"type": "number"},
                "lanczos_iters": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "sampling": {
            "type": "object",
            "properties": {
                "bases": {"type": "array", "items": {"enum": list(BASES)}},
                "n_samples": {"type": "integer", "minimum": 1},
                "levels": {"type": "array",
                           "items": {"type": "integer", "minimum": 0}},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "network": {
            "type": "object",
            "properties": {
                "neighbor_rank": {"type": "integer", "minimum": 1},
                "binning": {"enum": ["linear", "log", "both"]},
            },
            "additionalProperties": False,
        },
        "fss": {
            "type": "object",
            "properties": {
                "scales": {"type": "array",
                           "items": {"type": "integer", "minimum": 1}},
                "batch": {"type": "integer", "minimum": 1},
                "orders": {"type": "array",
                           "items": {"type": "integer", "minimum": 1}},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "classify": {
            "type": "object",
            "properties": {
                "L": {"type": "integer", "minimum": 4},
                "L_base": {"type": "integer", "minimum": 4},
                "l_max": {"type": "integer", "minimum": 0},
                "n_samples": {"type": "integer", "minimum": 100},
                "n_trace": {"type": "integer", "minimum": 100},
                "trace_basis": {"enum": list(BASES)},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "output_dir": {"type": "string"},
        "desk_preset": {"type": "boolean"},
    },
    "additionalProperties": False,
}

# desk-scale preset: laptop-sized defaults for every pipeline stage
DESK_PRESET = {
    "classify": {"L": 40, "L_base": 20, "l_max": 2,
                 "n_samples": 4000, "n_trace": 200},
    "sampling": {"n_samples": 1000},
    "fss": {"scales": [200, 400, 800, 1400, 2000], "batch": 50},
}


@dataclass
class RunConfig:
    """Validated configuration with all effective defaults recorded."""

    model: dict | None = None
    dmrg: dict = field(default_factory=dict)
    sampling: dict = field(default_factory=dict)
    network: dict = field(default_factory=dict)
    fss: dict = field(default_factory=dict)
    classify: dict = field(default_factory=dict)
    output_dir: str | None = None
    desk_preset: bool = False

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}")
        try:
            jsonschema.validate(raw, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise InputError(f"config schema violation: {exc.message}")
        cfg = cls(**raw)
        if cfg.desk_preset:
            for section, values in DESK_PRESET.items():
                merged = dict(values)
                merged.update(getattr(cfg, section))
                setattr(cfg, section, merged)
        return cfg

    def to_dict(self):
        return {"model": self.model, "dmrg": self.dmrg,
                "sampling": self.sampling, "network": self.network,
                "fss": self.fss, "classify": self.classify,
                "output_dir": self.output_dir, "desk_preset": self.desk_preset}

    def hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# -- MPS checkpoints --------------------------------------------------------

MPS_FORMAT = "wfnets-mps-v1"


def save_mps(psi, path):
    """Versioned checkpoint: one JSON header line, then raw little-endian
    tensor data in site order."""
    complex_state = any(np.iscomplexobj(t) for t in psi.tensors)
    dtype = "<c16" if complex_state else "<f8"
    header = {
        "format": MPS_FORMAT,
        "L": psi.L,
        "dtype": dtype,
        "shapes": [list(t.shape) for t in psi.tensors],
        "center": psi.center,
        "metadata": psi.metadata,
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for t in psi.tensors:
            fh.write(np.ascontiguousarray(t, dtype=np.dtype(dtype)).tobytes())


def load_mps(path):
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError:
            raise InputError(f"{path} is not an MPS checkpoint")
        if header.get("format") != MPS_FORMAT:
            raise InputError(f"unrecognized checkpoint format in {path}")
        dtype = np.dtype(header["dtype"])
        tensors = []
        for shape in header["shapes"]:
            count = int(np.prod(shape))
            buf = fh.read(count * dtype.itemsize)
            if len(buf) != count * dtype.itemsize:
                raise InputError(f"truncated checkpoint {path}")
            tensors.append(np.frombuffer(buf, dtype=dtype).reshape(shape).copy())
    return MPS(tensors, center=header["center"], metadata=header["metadata"])


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(args, cfg=None):
    out = args.out or os.environ.get(OUTDIR_ENV) \
        or (cfg.output_dir if cfg else None) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- subcommands ------------------------------------------------------------

def cmd_ground_state(args):
    cfg = RunConfig.from_file(args.config)
    if cfg.model is None:
        raise InputError("config must contain a 'model' section")
    out = _outdir(args, cfg)
    spec = ModelSpec.from_dict(cfg.model)
    dmrg_cfg = DmrgConfig.from_dict(cfg.dmrg) if cfg.dmrg else DmrgConfig()
    psi, energy = dmrg_ground_state(build_mpo(spec), dmrg_cfg)
    psi.metadata["model"] = spec.to_dict()
    save_mps(psi, out / "state.mps")
    _write_json(out / "energy.json", {
        "energy": energy,
        "sweep_energies": psi.metadata["dmrg"]["sweep_energies"],
        "model": spec.to_dict(),
        "dmrg": dmrg_cfg.to_dict(),
        "config_hash": cfg.hash(),
    })
    print(f"ground state energy {energy:.12f} -> {out / 'state.mps'}")
    return 0


def cmd_sample(args):
    out = _outdir(args)
    psi = load_mps(args.checkpoint)
    model = psi.metadata.get("model", {})
    bases = args.bases.split(",")
    for basis in bases:
        if basis not in BASES:
            raise InputError(f"unknown basis {basis!r}")
        ds = sample_in_basis(psi, basis, args.n, seed=args.seed, model=model)
        if args.level:
            ds = decimate(ds, args.level)
        name = f"snapshots_{basis}_l{args.level}.bits"
        ds.save(out / name)
        print(f"wrote {out / name} ({ds.n_samples} x {ds.L}, basis {basis})")
    return 0


def cmd_analyze(args):
    out = _outdir(args)
    for snap in args.snapshots:
        ds = SnapshotDataset.load(snap)
        if ds.n_samples == 0:
            raise InputError(f"empty snapshot file {snap}")
        stem = Path(snap).stem
        est = two_nn(ds, seed=args.seed)
        _write_json(out / f"{stem}_id.json",
                    {"basis": ds.basis, "estimate": est.to_dict(),
                     "model": ds.model, "seed": args.seed})
        R = cutoff_radius(ds, n=args.neighbor_rank)
        net = build_network(ds, R, neighbor_rank=args.neighbor_rank,
                            provenance={"snapshots": str(snap)})
        label = classify_network(net, rep_stats=repetition_stats(ds.data))
        _write_json(out / f"{stem}_network.json",
                    {"label": label.label, "diagnostics": label.diagnostics})
        binnings = ("linear", "log") if args.binning == "both" else (args.binning,)
        for binning in binnings:
            dd = degree_distribution(net, binning=binning)
            dd.to_csv(out / f"{stem}_degrees_{binning}.csv")
        if args.edges:
            net.export_edgelist(out / f"{stem}_edges.txt",
                                out / f"{stem}_edges.json")
        print(f"{stem}: I_d={est.value:.2f}+-{est.ci:.2f}, "
              f"network {label.label} (R={R:.2f})")
    return 0


def cmd_fss(args):
    out = _outdir(args)
    pool = SnapshotDataset.load(args.pool)
    scales = [int(s) for s in args.scales.split(",")]
    orders = tuple(int(i) for i in args.orders.split(","))
    run = run_fss(pool, scales=scales, b=args.batch, orders=orders,
                  seed=args.seed)
    moment_ratio_scaling(run)
    run.save(out / "fss_run.json")
    run.export_curves_csv(out / "fss_curves.csv")
    print(f"verdict: {run.verdict}")
    for i, (e, se) in sorted(run.exponents.items()):
        print(f"  order {i}: fss_exponent = {e:.3f} +- {se:.3f}")
    return 0


def cmd_classify(args):
    cfg = RunConfig.from_file(args.config)
    if cfg.model is None:
        raise InputError("config must contain a 'model' section")
    out = _outdir(args, cfg)
    ccfg = ClassifyConfig(**cfg.classify)
    if cfg.dmrg:
        ccfg.dmrg = DmrgConfig.from_dict(cfg.dmrg)
    if args.seed is not None:
        ccfg.seed = args.seed
    report = classify_point(cfg.model["family"], cfg.model["params"], ccfg)
    payload = report.to_dict()
    payload["config_hash"] = cfg.hash()
    _write_json(out / "classification.json", payload)
    print(report.one_line())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wfnets",
        description="snapshot-based phase classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", help="run DMRG and save a checkpoint")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ground_state)

    p = sub.add_parser("sample", help="draw snapshots from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--bases", default="z",
                   help="comma-separated measurement bases")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--level", type=int, default=0,
                   help="decimation steps applied to the snapshots")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze",
                       help="intrinsic dimension + network analysis")
    p.add_argument("--snapshots", nargs="+", required=True)
    p.add_argument("--neighbor-rank", type=int, default=3)
    p.add_argument("--binning", choices=["linear", "log", "both"],
                   default="both")
    p.add_argument("--edges", action="store_true",
                   help="also export the edge list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fss", help="finite-size-scaling scale-freeness test")
    p.add_argument("--pool", required=True)
    p.add_argument("--scales", default="200,400,800,1400,2000")
    p.add_argument("--batch", type=int, default=50)
    p.add_argument("--orders", default="2,3,4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fss)

    p = sub.add_parser("classify", help="full pipeline phase classification")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParameterError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ConvergenceError, EstimatorError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except WfnetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
