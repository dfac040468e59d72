"""End-to-end phase classification from snapshots alone.

Runs the full decision tree on a few model points: minimal-complexity basis
selection, network typing, cluster analysis, and (when the network is
random) the decimation trace.  Sizes here are trimmed for a quick run; the
acceptance suite exercises the full desk-scale settings.
"""

from wfnets.classify import ClassifyConfig, classify_point

POINTS = (
    ("ising", {"h": 0.25}),
    ("ising", {"h": 2.0}),
    ("cluster_ising", {"h": 0.25}),
    ("ssh", {"J_A": 4.0, "J_B": 1.0}),
)

cfg = ClassifyConfig(n_samples=2000, n_trace=200, seed=0)

for family, params in POINTS:
    report = classify_point(family, params, cfg)
    print(f"{family} {params}")
    print(f"  -> {report.one_line()}")
    for step in report.decision_path:
        print(f"     {step}")
    print()
