import numpy as np
import pytest

from wfnets.errors import EstimatorError, InputError
from wfnets.fss import (FssRun, VERDICT_CONFIRMED, VERDICT_REJECTED, moment,
                        moment_ratio_scaling, run_fss, subsample_networks)
from wfnets.network import build_network, cutoff_radius


def rand_rows(n, L, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.choice([-1, 1], size=(n, L)).astype(np.int8)


# -- moments ----------------------------------------------------------------

def test_moment_complete_graph():
    data = np.ones((4, 6), dtype=np.int8)     # K_4 at R=0
    net = build_network(data, R=0.0)
    assert moment(net, 1) == pytest.approx(3.0)
    assert moment(net, 2) == pytest.approx(9.0)


def test_moment_erdos_renyi_matches_poisson():
    rng = np.random.Generator(np.random.Philox(key=1))
    n, p = 1000, 0.01
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.uniform(size=len(iu)) < p
    deg = np.bincount(iu[keep], minlength=n) + np.bincount(ju[keep], minlength=n)
    m = (n - 1) * p
    expected = m * m + m                      # Poisson second moment
    se = np.std(deg.astype(float) ** 2) / np.sqrt(n)
    assert abs(moment(deg, 2) - expected) < 3 * se


def test_moment_errors():
    with pytest.raises(InputError):
        moment(np.array([]), 2)
    with pytest.raises(InputError):
        moment(np.array([1, 2]), 0)


def test_moment_ratio_monotone_in_order():
    # power-mean inequality: <k^{i+1}>/<k^i> nondecreasing in i
    rng = np.random.Generator(np.random.Philox(key=2))
    deg = rng.integers(0, 40, size=500)
    ratios = [moment(deg, i + 1) / moment(deg, i) for i in (1, 2, 3, 4)]
    assert all(a <= b + 1e-12 for a, b in zip(ratios, ratios[1:]))


# -- subsampling ------------------------------------------------------------

def test_subsample_deterministic_and_distinct():
    pool = rand_rows(500, 14, seed=3)
    a = subsample_networks(pool, 100, 2, R=3.0, seed=7)
    b = subsample_networks(pool, 100, 2, R=3.0, seed=7)
    for na, nb in zip(a, b):
        assert np.array_equal(na.unique_rows, nb.unique_rows)
        assert np.array_equal(na.degrees, nb.degrees)
    assert all(net.n_nodes == 100 for net in a)


def test_subsample_full_pool_degenerate():
    pool = rand_rows(80, 12, seed=4)
    nets = subsample_networks(pool, 80, 3, R=2.0, seed=0)
    ref = build_network(pool, 2.0)
    for net in nets:
        assert net.edge_count == ref.edge_count
        assert sorted(net.degrees.tolist()) == sorted(ref.degrees.tolist())


def test_subsample_scale_exceeds_pool():
    with pytest.raises(InputError):
        subsample_networks(rand_rows(50, 10), 51, 1, R=2.0)


def test_geometric_thinning_mean_degree():
    # at fixed R the edge probability per pair is fixed, so <k> ~ N_s
    pool = rand_rows(4000, 16, seed=5)
    R = 4.0
    k_small = np.mean([np.mean(n.degrees) for n in
                       subsample_networks(pool, 500, 10, R, seed=1)])
    k_large = np.mean([np.mean(n.degrees) for n in
                       subsample_networks(pool, 2000, 10, R, seed=2)])
    assert k_large / k_small == pytest.approx(2000 / 500, rel=0.1)


def test_fixed_R_discipline():
    # recomputing the cutoff on a subsample would add edges
    pool = rand_rows(2000, 16, seed=6)
    R_fixed = cutoff_radius(pool)
    rng = np.random.Generator(np.random.Philox(key=7))
    rows = rng.choice(2000, size=300, replace=False)
    sub = pool[rows]
    R_local = cutoff_radius(sub)
    assert R_local > R_fixed
    assert build_network(sub, R_local).edge_count > build_network(sub, R_fixed).edge_count


# -- scaling fit ------------------------------------------------------------

def planted_run(fss_exponent, seed=0, b=40, gamma=2.2,
                scales=(250, 500, 1000, 2000, 4000)):
    """FssRun whose batch moments come from power-law degrees with a planted
    scale-dependent cutoff k_max ~ N_s^{-fss_exponent}."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    run = FssRun(pool_size=10 ** 5, scales=list(scales), batch_size=b,
                 R=5.0, orders=(2, 3, 4))
    for n_s in scales:
        k_max = max(int(5.0 * n_s ** (-fss_exponent)), 10)
        ks = np.arange(1, k_max + 1)
        pmf = ks.astype(float) ** (-gamma)
        pmf /= pmf.sum()
        rows = []
        for _ in range(b):
            sample = rng.choice(ks, size=n_s, p=pmf).astype(float)
            rows.append([np.mean(sample ** i) for i in run.moment_orders()])
        run.batch_moments[n_s] = np.array(rows)
    return run


def test_recovers_planted_fss_exponent():
    planted = -0.75
    run = planted_run(planted, seed=8)
    exps = moment_ratio_scaling(run)
    assert run.verdict == VERDICT_CONFIRMED
    for i, (e, se) in exps.items():
        assert abs(e - planted) < 2 * se + 0.05


def test_order_validity_check():
    run = planted_run(-0.75, seed=9)
    with pytest.raises(EstimatorError):
        moment_ratio_scaling(run, gamma_hat=6.0)
    exps = moment_ratio_scaling(run, gamma_hat=3.5)
    assert set(exps) == {3, 4}


def test_er_pool_rejected():
    # random bit strings give a geometric Poisson-like pool: ratio curves are
    # not a common power law in N_s, so the verdict must be negative
    pool = rand_rows(6000, 16, seed=10)
    run = run_fss(pool, scales=[300, 600, 1200, 2400], b=20, seed=11)
    moment_ratio_scaling(run)
    assert run.verdict == VERDICT_REJECTED


def test_run_fss_validation():
    pool = rand_rows(300, 12, seed=12)
    with pytest.raises(InputError):
        run_fss(pool, scales=[50, 100, 200], b=5)
    with pytest.raises(InputError):
        run_fss(pool, scales=[50, 100, 150, 400], b=5)


def test_jackknife_se_nonnegative_and_zero_at_full_scale():
    run = planted_run(-0.5, seed=13, scales=(250, 500, 1000, 2000))
    for s in run.scales:
        for i in run.moment_orders():
            _, se = run.moment_with_se(s, i)
            assert se >= 0.0
    # degenerate full-pool scale has no sampling freedom
    full = FssRun(pool_size=500, scales=[500], batch_size=3, R=2.0,
                  orders=(2,))
    full.batch_moments[500] = np.ones((3, 2))
    assert full.moment_with_se(500, 2)[1] == 0.0


def test_run_serialization(tmp_path):
    run = planted_run(-0.6, seed=14, b=10, scales=(250, 500, 1000, 2000))
    moment_ratio_scaling(run)
    p = tmp_path / "run.json"
    run.save(p)
    import json
    blob = json.loads(p.read_text())
    assert blob["verdict"] == run.verdict
    assert blob["scales"] == run.scales
    csv = tmp_path / "curves.csv"
    run.export_curves_csv(csv)
    lines = csv.read_text().splitlines()
    assert lines[0] == "scale,order,ratio,ratio_se"
    assert len(lines) == 1 + len(run.orders) * len(run.scales)
