"""Wave-function networks: construction, degree statistics, type classification.

Networks are geometric graphs on snapshots: nodes are rows, and an edge links
every pair at Hamming distance <= R.  Internally the graph is stored on the
set of *distinct* configurations with multiplicities; identical rows form
cliques (distance 0 <= R), so degrees and components can be recovered without
materializing those cliques.  This also yields the loop/weighted variant
directly.

Degree conventions: in the simple network a node among m copies of the same
configuration has degree m - 1 from its duplicates (self excluded); in the
loop network each distinct configuration is one node whose self-loop weight
is m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.csgraph import connected_components
from scipy.special import gammaln, zeta

from .errors import InputError
from .metric import hamming_block, knn, pack_rows

DEFAULT_NEIGHBOR_RANK = 3
MACROSCOPIC_FRACTION = 0.1

# scale-free decision thresholds (declared artifact choices; only the
# qualitative short- vs fat-tailed distinction is physically fixed)
LLR_MARGIN = 0.1          # mean log-likelihood advantage per tail node
TAIL_RATIO_MIN = 1.5      # <k^2>/<k>^2 must exceed this for a fat tail
TAIL_RATIO_ER_MAX = 3.0   # ... and stay below this for a short tail
MIN_TAIL_NODES = 50
GAMMA_MAX = 3.0           # exponent bound: gamma >= 3 means finite <k^2>,
                          # i.e. random-graph, not scale-free, behavior


def cutoff_radius(ds, n=DEFAULT_NEIGHBOR_RANK):
    """Average n-th nearest-neighbor Hamming distance (raw metric, no noise)."""
    data = ds.data if hasattr(ds, "data") and not isinstance(ds, np.ndarray) else np.asarray(ds)
    if data.shape[0] <= n:
        raise InputError(f"need more than {n} rows")
    table = knn(data, n)
    return float(np.mean(table.distances[:, n - 1]))


def _unique_adjacency(unique_rows, R, return_distances=False):
    """Pairs (u, v), u < v, of distinct configurations at distance <= R."""
    packed = pack_rows(unique_rows)
    n_u = len(unique_rows)
    us, vs, dist = [], [], []
    block = max(1, int(2 ** 22 // max(n_u, 1)))
    for start in range(0, n_u, block):
        stop = min(start + block, n_u)
        d = hamming_block(packed[start:stop], packed)
        rows, cols = np.nonzero(d <= R)
        rows = rows + start
        keep = rows < cols
        us.append(rows[keep])
        vs.append(cols[keep])
        if return_distances:
            dist.append(d[rows[keep] - start, cols[keep]])
    us = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    vs = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    if return_distances:
        dist = np.concatenate(dist) if len(dist) else np.empty(0, dtype=np.int32)
        return us, vs, dist
    return us, vs


@dataclass
class WaveFunctionNetwork:
    """Simple undirected geometric graph on snapshots."""

    n_nodes: int
    R: float
    neighbor_rank: int
    unique_rows: np.ndarray
    counts: np.ndarray        # multiplicity per distinct configuration
    inverse: np.ndarray       # row -> distinct-configuration id
    adj_u: np.ndarray         # unique-level edges, u < v
    adj_v: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def degrees(self):
        """Degree of every original node."""
        class_deg = self.counts.astype(np.int64) - 1
        np.add.at(class_deg, self.adj_u, self.counts[self.adj_v])
        np.add.at(class_deg, self.adj_v, self.counts[self.adj_u])
        return class_deg[self.inverse]

    @property
    def edge_count(self):
        c = self.counts.astype(np.int64)
        within = int(np.sum(c * (c - 1) // 2))
        across = int(np.sum(c[self.adj_u] * c[self.adj_v]))
        return within + across

    def components(self):
        """(labels per original node, component masses)."""
        n_u = len(self.counts)
        graph = sp.coo_matrix(
            (np.ones(len(self.adj_u)), (self.adj_u, self.adj_v)),
            shape=(n_u, n_u))
        _, labels_u = connected_components(graph, directed=False)
        masses = np.bincount(labels_u, weights=self.counts).astype(np.int64)
        return labels_u[self.inverse], masses

    def iter_edges(self):
        """Yield all simple-graph edges (i, j), i < j, in original node ids."""
        by_class = [[] for _ in range(len(self.counts))]
        for i, c in enumerate(self.inverse):
            by_class[c].append(i)
        for members in by_class:
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    yield members[a], members[b]
        for u, v in zip(self.adj_u, self.adj_v):
            for i in by_class[u]:
                for j in by_class[v]:
                    yield (i, j) if i < j else (j, i)

    def export_edgelist(self, path, meta_path=None):
        with open(path, "w", encoding="utf-8") as fh:
            for i, j in self.iter_edges():
                fh.write(f"{i} {j}\n")
        if meta_path:
            import json
            with open(meta_path, "w", encoding="utf-8") as fh:
                json.dump({"n_nodes": self.n_nodes, "R": self.R,
                           "neighbor_rank": self.neighbor_rank,
                           "edge_count": self.edge_count,
                           "provenance": self.provenance},
                          fh, indent=2, sort_keys=True)
                fh.write("\n")


def build_network(ds, R, neighbor_rank=DEFAULT_NEIGHBOR_RANK, provenance=None):
    """Geometric network with cutoff R over a snapshot dataset."""
    if R < 0:
        raise InputError("R must be >= 0")
    data = ds.data if hasattr(ds, "data") and not isinstance(ds, np.ndarray) else np.asarray(ds)
    unique_rows, inverse, counts = np.unique(
        data, axis=0, return_inverse=True, return_counts=True)
    adj_u, adj_v = _unique_adjacency(unique_rows, R)
    return WaveFunctionNetwork(
        n_nodes=data.shape[0], R=float(R), neighbor_rank=neighbor_rank,
        unique_rows=unique_rows, counts=counts, inverse=inverse,
        adj_u=adj_u, adj_v=adj_v, provenance=dict(provenance or {}))


# -- degree distributions ---------------------------------------------------

@dataclass
class DegreeDistribution:
    binning: str
    bin_edges: np.ndarray     # [e_i, e_{i+1}) bins
    freqs: np.ndarray         # probability mass per bin, sums to 1
    density: np.ndarray       # mass / bin width (for log-binned plots)
    mean_degree: float

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("bin_left,bin_right,frequency,density\n")
            for left, right, f, d in zip(self.bin_edges[:-1], self.bin_edges[1:],
                                         self.freqs, self.density):
                fh.write(f"{left},{right},{f},{d}\n")


def degree_distribution(net_or_degrees, binning="linear"):
    if isinstance(net_or_degrees, WaveFunctionNetwork):
        degrees = net_or_degrees.degrees
    else:
        degrees = np.asarray(net_or_degrees)
    if degrees.size == 0:
        raise InputError("empty network")
    if binning == "linear":
        edges = np.arange(degrees.max() + 2, dtype=float)
    elif binning == "log":
        # base-2 geometric bins over k >= 1; k = 0 kept in its own bin
        top = max(int(np.ceil(np.log2(max(degrees.max(), 1)))) + 1, 1)
        edges = np.concatenate([[0.0], 2.0 ** np.arange(0, top + 1)])
    else:
        raise InputError(f"unknown binning {binning!r}")
    counts, _ = np.histogram(degrees, bins=edges)
    freqs = counts / counts.sum()
    widths = np.diff(edges)
    return DegreeDistribution(binning=binning, bin_edges=edges, freqs=freqs,
                              density=freqs / widths,
                              mean_degree=float(np.mean(degrees)))


# -- power-law machinery ----------------------------------------------------

@dataclass
class PowerLawFit:
    gamma: float
    sigma: float
    k_min: int
    n_tail: int
    ks: float                 # Kolmogorov-Smirnov distance on the tail
    loglike: float


def _powerlaw_loglike(ks, gamma, k_min):
    norm = zeta(gamma, k_min)
    return float(-gamma * np.sum(np.log(ks)) - len(ks) * np.log(norm))


def fit_discrete_powerlaw(degrees, k_min=None, min_tail=10):
    """MLE of P(k) ~ k^-gamma on k >= k_min; k_min by KS minimization when
    not given (Clauset-style)."""
    degrees = np.asarray(degrees)
    degrees = degrees[degrees >= 1]
    if degrees.size < min_tail:
        raise InputError("not enough nonzero degrees for a power-law fit")

    def fit_at(km):
        tail = degrees[degrees >= km].astype(float)
        if tail.size < min_tail:
            return None
        res = minimize_scalar(lambda g: -_powerlaw_loglike(tail, g, km),
                              bounds=(1.01, 8.0), method="bounded")
        g = float(res.x)
        # KS distance between empirical and model CDF on the tail
        kvals = np.arange(km, tail.max() + 1)
        pmf = kvals ** (-g) / zeta(g, km)
        cdf = np.cumsum(pmf)
        ecdf = np.searchsorted(np.sort(tail), kvals, side="right") / tail.size
        ks = float(np.max(np.abs(ecdf - cdf)))
        # curvature of the log-likelihood -> asymptotic standard error
        h = 1e-4
        ll = _powerlaw_loglike(tail, g, km)
        d2 = (_powerlaw_loglike(tail, g + h, km) - 2 * ll
              + _powerlaw_loglike(tail, g - h, km)) / h ** 2
        sigma = float(1.0 / np.sqrt(max(-d2, 1e-12)))
        return PowerLawFit(gamma=g, sigma=sigma, k_min=int(km),
                           n_tail=int(tail.size), ks=ks, loglike=ll)

    if k_min is not None:
        fit = fit_at(k_min)
        if fit is None:
            raise InputError(f"fewer than {min_tail} degrees above k_min={k_min}")
        return fit
    candidates = np.unique(degrees)
    candidates = candidates[candidates <= np.quantile(degrees, 0.9)]
    fits = [f for f in (fit_at(int(km)) for km in candidates) if f is not None]
    if not fits:
        raise InputError("no admissible k_min")
    return min(fits, key=lambda f: f.ks)


def _truncated_poisson_loglike(ks, lam, k_min):
    # Poisson conditioned on k >= k_min
    from scipy.stats import poisson
    logpmf = ks * np.log(lam) - lam - gammaln(ks + 1)
    tail_mass = poisson.sf(k_min - 1, lam)
    if tail_mass <= 0:
        return -np.inf
    return float(np.sum(logpmf) - len(ks) * np.log(tail_mass))


def fit_truncated_poisson(degrees, k_min):
    tail = np.asarray(degrees, dtype=float)
    tail = tail[tail >= k_min]
    res = minimize_scalar(lambda lam: -_truncated_poisson_loglike(tail, lam, k_min),
                          bounds=(1e-6, max(2.0 * tail.mean(), 1.0)),
                          method="bounded")
    lam = float(res.x)
    return lam, _truncated_poisson_loglike(tail, lam, k_min)


def _truncated_nbinom_loglike(ks, n, p, k_min):
    from scipy.stats import nbinom
    tail_mass = nbinom.sf(k_min - 1, n, p)
    if not np.isfinite(tail_mass) or tail_mass <= 0:
        return -np.inf
    return float(np.sum(nbinom.logpmf(ks, n, p)) - len(ks) * np.log(tail_mass))


def fit_truncated_nbinom(degrees, k_min):
    """MLE of a negative binomial on k >= k_min (short-tail null).

    A geometric graph with inhomogeneous node density has a mixed-Poisson
    degree distribution; the negative binomial is that family's workhorse and
    contains the pure Poisson as the n -> inf limit, so it is the appropriate
    null against which a power-law tail must win.  Returns ``(n, p, loglike)``
    in the scipy ``nbinom`` convention (mean ``n (1 - p) / p``).

    The shape is restricted to n >= 1: for n << 1 the negative binomial
    degenerates into a power law with exponential cutoff, i.e. into the
    alternative hypothesis itself, and the test would lose all power.
    """
    from scipy.optimize import minimize
    tail = np.asarray(degrees, dtype=float)
    tail = tail[tail >= k_min]
    m = tail.mean()
    v = tail.var()
    if v > m * 1.001:                      # moment-matched start
        n0 = max(m * m / (v - m), 1.0)
    else:                                  # (near-)Poisson start
        n0 = 1e3
    p0 = n0 / (n0 + m)

    def nll(x):
        n = np.exp(np.clip(x[0], 0.0, 20.0))
        p = 1.0 / (1.0 + np.exp(-np.clip(x[1], -30.0, 30.0)))
        return -_truncated_nbinom_loglike(tail, n, p, k_min)

    res = minimize(nll, [np.log(n0), np.log(p0 / (1.0 - p0))],
                   method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-8, "maxiter": 2000})
    n = float(np.exp(np.clip(res.x[0], 0.0, 20.0)))
    p = float(1.0 / (1.0 + np.exp(-np.clip(res.x[1], -30.0, 30.0))))
    return n, p, _truncated_nbinom_loglike(tail, n, p, k_min)


# -- classification ---------------------------------------------------------

def tail_evidence(degrees):
    """Degree-tail statistics shared by network typing and the FSS veto.

    Two nulls with different roles: a fat tail (scale-free candidate) must
    beat the *pure Poisson* and show a diverging-second-moment exponent
    (gamma < GAMMA_MAX); a short tail (Erdős–Rényi candidate) must fail to
    beat the *negative binomial*, which already absorbs the benign
    overdispersion of an inhomogeneous geometric graph.
    """
    degrees = np.asarray(degrees)
    mean_k = float(np.mean(degrees)) if degrees.size else 0.0
    ev = {"mean_degree": mean_k, "fat_tailed": False, "short_tailed": False}
    if mean_k == 0.0:
        return ev
    ev["tail_ratio"] = float(np.mean(degrees.astype(float) ** 2) / mean_k ** 2)
    try:
        pl = fit_discrete_powerlaw(degrees)
    except InputError as exc:
        ev["reason"] = f"power-law fit impossible: {exc}"
        return ev
    lam, ll_pois = fit_truncated_poisson(degrees, pl.k_min)
    nb_n, nb_p, ll_nb = fit_truncated_nbinom(degrees, pl.k_min)
    ev.update(gamma=pl.gamma, gamma_sigma=pl.sigma, k_min=pl.k_min,
              n_tail=pl.n_tail, ks=pl.ks, poisson_lambda=lam,
              nbinom_n=nb_n, nbinom_p=nb_p,
              llr_per_node=float((pl.loglike - ll_pois) / pl.n_tail),
              llr_nbinom_per_node=float((pl.loglike - ll_nb) / pl.n_tail))
    ev["fat_tailed"] = bool(ev["llr_per_node"] > LLR_MARGIN
                            and ev["gamma"] < GAMMA_MAX
                            and ev["tail_ratio"] > TAIL_RATIO_MIN
                            and pl.n_tail >= MIN_TAIL_NODES)
    ev["short_tailed"] = bool(ev["llr_nbinom_per_node"] < LLR_MARGIN
                              and ev["tail_ratio"] < TAIL_RATIO_ER_MAX)
    return ev


@dataclass
class NetworkTypeLabel:
    label: str                # probability | erdos_renyi | scale_free | indeterminate
    diagnostics: dict = field(default_factory=dict)


def classify_network(net, dd=None, rep_stats=None, fss_verdict=None):
    """Assign the network taxonomy label from R and the degree statistics."""
    diagnostics = {"R": net.R, "neighbor_rank": net.neighbor_rank}
    if rep_stats is not None:
        diagnostics["repeated_fraction"] = rep_stats.repeated_fraction
    _, masses = net.components()
    diagnostics["n_components"] = int(len(masses))
    diagnostics["macroscopic_components"] = int(
        np.sum(masses >= MACROSCOPIC_FRACTION * net.n_nodes))

    if net.R < 1.0:
        diagnostics["reason"] = "cutoff below 1: repetition-dominated"
        return NetworkTypeLabel(label="probability", diagnostics=diagnostics)

    ev = tail_evidence(net.degrees)
    fat_tailed = ev.pop("fat_tailed")
    short_tailed = ev.pop("short_tailed")
    diagnostics.update(ev)
    if ev["mean_degree"] == 0.0:
        diagnostics["reason"] = "edgeless network"
        return NetworkTypeLabel(label="indeterminate", diagnostics=diagnostics)
    if "gamma" not in ev:
        return NetworkTypeLabel(label="indeterminate", diagnostics=diagnostics)

    if fat_tailed:
        if fss_verdict is False:
            diagnostics["reason"] = "fat-tailed but finite-size scaling rejected"
            return NetworkTypeLabel(label="indeterminate", diagnostics=diagnostics)
        diagnostics["fss_checked"] = fss_verdict is not None
        return NetworkTypeLabel(label="scale_free", diagnostics=diagnostics)
    if short_tailed:
        return NetworkTypeLabel(label="erdos_renyi", diagnostics=diagnostics)
    diagnostics["reason"] = "fit evidence inconclusive"
    return NetworkTypeLabel(label="indeterminate", diagnostics=diagnostics)


def cluster_count(net, macroscopic_fraction=MACROSCOPIC_FRACTION):
    """Connected components with masses; returns (count, masses, n_macroscopic)."""
    _, masses = net.components()
    order = np.argsort(masses)[::-1]
    masses = masses[order]
    n_macro = int(np.sum(masses >= macroscopic_fraction * net.n_nodes))
    return len(masses), masses, n_macro


# -- loop / weighted variant (self-loop construction) -----------------------

@dataclass
class LoopNetwork:
    configs: np.ndarray       # one row per distinct configuration
    counts: np.ndarray        # sampling multiplicities (self-loop weights)
    adj_u: np.ndarray         # geometric edges between distinct configs, u < v
    adj_v: np.ndarray
    R: float

    @property
    def loop_degrees(self):
        """Weighted degree: self-loop plus incoming weights of geometric links."""
        deg = self.counts.astype(np.int64).copy()
        np.add.at(deg, self.adj_u, self.counts[self.adj_v])
        np.add.at(deg, self.adj_v, self.counts[self.adj_u])
        return deg

    def projection_edges(self):
        """Undirected simple projection (distinct-configuration pairs)."""
        return set(zip(self.adj_u.tolist(), self.adj_v.tolist()))


def build_loop_network(ds, R):
    """Loop/weighted variant: one node per distinct configuration, directed
    weighted links and self-loops carrying multiplicities."""
    data = ds.data if hasattr(ds, "data") and not isinstance(ds, np.ndarray) else np.asarray(ds)
    unique_rows, counts = np.unique(data, axis=0, return_counts=True)
    adj_u, adj_v = _unique_adjacency(unique_rows, R)
    return LoopNetwork(configs=unique_rows, counts=counts,
                       adj_u=adj_u, adj_v=adj_v, R=float(R))
