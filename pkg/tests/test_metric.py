import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from wfnets.errors import InputError, ShapeError
from wfnets.metric import (AugmentedDataset, augment_repetitions, hamming,
                           knn, overlap, pack_rows, pairwise_hamming,
                           repetition_stats)


def rand_rows(n, L, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.choice([-1, 1], size=(n, L)).astype(np.int8)


rows_pair = st.integers(4, 40).flatmap(
    lambda L: st.tuples(
        st.lists(st.sampled_from([-1, 1]), min_size=L, max_size=L),
        st.lists(st.sampled_from([-1, 1]), min_size=L, max_size=L),
        st.lists(st.sampled_from([-1, 1]), min_size=L, max_size=L),
    ))


def test_overlap_examples():
    assert overlap([1] * 8, [1] * 8) == 8
    assert overlap([1] * 8, [-1] * 8) == -8
    assert overlap([1, 1, -1, 1], [1, -1, -1, -1]) == 0


def test_hamming_examples():
    assert hamming([1, -1, 1], [1, -1, 1]) == 0
    assert hamming([1] * 8, [-1] * 8) == 8
    assert hamming([1, 1, -1, 1], [1, -1, -1, -1]) == 2


def test_length_mismatch():
    with pytest.raises(ShapeError):
        overlap([1, 1], [1, 1, 1])
    with pytest.raises(ShapeError):
        hamming([1, 1], [1, 1, 1])


@settings(max_examples=200, deadline=None)
@given(rows_pair)
def test_hamming_metric_axioms(abc):
    a, b, c = (np.array(v) for v in abc)
    dab = hamming(a, b)
    assert dab == hamming(b, a)
    assert dab >= 0
    assert (dab == 0) == bool(np.array_equal(a, b))
    assert hamming(a, c) <= dab + hamming(b, c)
    # overlap identity: d = (L - q)/2 = half sum |a - b|
    assert dab == 0.5 * np.sum(np.abs(a - b))


def test_packed_matches_naive():
    data = rand_rows(64, 21, seed=1)
    D = pairwise_hamming(data)
    naive = (data[:, None, :] != data[None, :, :]).sum(axis=2)
    assert np.array_equal(D, naive)


def test_knn_matches_bruteforce_oracle():
    data = rand_rows(200, 16, seed=2)
    table = knn(data, 5)
    D = (data[:, None, :] != data[None, :, :]).sum(axis=2)
    for i in range(200):
        pairs = sorted((int(D[i, j]), j) for j in range(200) if j != i)[:5]
        assert [j for _, j in pairs] == table.indices[i].tolist()
        assert [d for d, _ in pairs] == table.distances[i].tolist()


def test_knn_sorting_contract():
    data = np.array([
        [1, 1, 1, 1, 1, 1],
        [-1, 1, 1, 1, 1, 1],      # d=1 from row 0
        [-1, -1, 1, 1, 1, 1],     # d=2 from row 0
        [-1, -1, -1, 1, 1, 1],    # d=3 from row 0
    ], dtype=np.int8)
    t = knn(data, 3)
    assert t.indices[0].tolist() == [1, 2, 3]
    assert t.distances[0].tolist() == [1, 2, 3]


def test_knn_tie_break_by_row_index():
    data = np.array([[1, 1], [1, -1], [-1, 1], [1, -1]], dtype=np.int8)
    t = knn(data, 3)
    # rows 1, 2, 3 are all at distance 1 from row 0; index order breaks ties
    assert t.indices[0].tolist() == [1, 2, 3]


def test_knn_input_errors():
    data = rand_rows(5, 4)
    with pytest.raises(InputError):
        knn(data, 5)
    with pytest.raises(InputError):
        knn(data, 0)


def test_knn_row_relabel_invariance():
    data = rand_rows(60, 12, seed=3)
    # make rows distinct so the permutation argument is exact
    data = np.unique(data, axis=0)
    n = len(data)
    t = knn(data, 3)
    rng = np.random.Generator(np.random.Philox(key=4))
    perm = rng.permutation(n)
    t2 = knn(data[perm], 3)
    inv = np.argsort(perm)
    for i in range(n):
        assert sorted(perm[t.indices[i]].tolist()) == sorted(
            t2.indices[inv[i]].tolist()) or np.array_equal(
            np.sort(t.distances[i]), np.sort(t2.distances[inv[i]]))


def test_augment_distinct_rows_zero_noise():
    data = np.unique(rand_rows(100, 16, seed=5), axis=0)
    aug = augment_repetitions(data, seed=0)
    assert aug.noise_support == 0.0
    assert np.all(aug.noise == 0.0)


def test_augment_identical_rows():
    data = np.ones((1000, 10), dtype=np.int8)
    aug = augment_repetitions(data, seed=1)
    w = 0.5 * (999 / 1000)
    assert abs(aug.noise_support - w) < 1e-12
    assert np.all((aug.noise >= 0) & (aug.noise <= w))
    # noise is uniform on [0, w]
    ks = sps.kstest(aug.noise / w, "uniform")
    assert ks.pvalue > 0.01
    # all pairwise distances strictly positive and <= w
    t = knn(aug, 1)
    assert np.all(t.distances > 0)
    assert np.all(t.distances <= w)


def test_augmentation_preserves_distinct_row_order():
    data = rand_rows(300, 20, seed=6)
    aug = augment_repetitions(data, seed=2)
    t_raw = knn(data, 4)
    t_aug = knn(aug, 4)
    # among distinct rows the ordering cannot change: augmented distance of a
    # Hamming-d pair lies in [d, sqrt(d^2 + w^2)) with w < 1
    d_floor = np.floor(t_aug.distances + 1e-12)
    keep = t_raw.distances > 0
    assert np.array_equal(d_floor[keep], t_raw.distances[keep].astype(float))


def test_repetition_stats():
    data = np.array([[1, 1], [1, 1], [1, -1], [1, 1]], dtype=np.int8)
    s = repetition_stats(data)
    assert s.n_samples == 4 and s.n_unique == 2
    assert s.n_repeated == 2 and s.max_multiplicity == 3


def test_neighbor_table_csv(tmp_path):
    data = rand_rows(10, 8, seed=7)
    t = knn(data, 2)
    p = tmp_path / "nn.csv"
    t.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "row,nn1,d1,nn2,d2"
    assert len(lines) == 11
