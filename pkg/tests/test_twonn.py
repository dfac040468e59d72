import numpy as np
import pytest

from wfnets.errors import InputError
from wfnets.twonn import (IdEstimate, select_minimal_basis, two_nn,
                          two_nn_points)


def uniform_cube(n, dim, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.uniform(size=(n, dim))


def flat_torus(n, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    theta, phi = rng.uniform(0, 2 * np.pi, size=(2, n))
    return np.column_stack([np.cos(theta), np.sin(theta),
                            np.cos(phi), np.sin(phi)])


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_planted_dimension_hypercube(dim):
    est = two_nn_points(uniform_cube(5000, dim, seed=dim))
    assert abs(est.value - dim) / dim < 0.1


@pytest.mark.parametrize("dim", [5, 9])
def test_planted_dimension_periodic_torus(dim):
    est = two_nn_points(uniform_cube(5000, dim, seed=10 + dim), boxsize=1.0)
    assert abs(est.value - dim) / dim < 0.1


def test_torus_dimension_two():
    est = two_nn_points(flat_torus(5000, seed=9))
    assert abs(est.value - 2.0) < 0.1


def test_identical_rows_give_dimension_one():
    data = np.ones((2000, 12), dtype=np.int8)
    est = two_nn(data, seed=1)
    assert abs(est.value - 1.0) < 0.25


def test_random_strings_high_dimension():
    rng = np.random.Generator(np.random.Philox(key=2))
    data = rng.choice([-1, 1], size=(1000, 80)).astype(np.int8)
    est = two_nn(data, seed=0)
    assert est.value >= 20
    # grows with L
    data_small = rng.choice([-1, 1], size=(1000, 20)).astype(np.int8)
    est_small = two_nn(data_small, seed=0)
    assert est.value > est_small.value


def test_scale_invariance():
    pts = uniform_cube(3000, 3, seed=4)
    a = two_nn_points(pts)
    b = two_nn_points(pts * 37.5)
    assert abs(a.value - b.value) < 1e-9


def test_permutation_invariance():
    rng = np.random.Generator(np.random.Philox(key=5))
    data = rng.choice([-1, 1], size=(400, 16)).astype(np.int8)
    est = two_nn(data, seed=3)
    perm = rng.permutation(400)
    est_p = two_nn(data[perm], seed=3)
    # same rows, same noise seed; duplicates may land elsewhere so allow ci slack
    assert abs(est.value - est_p.value) < 0.5 * (est.ci + est_p.ci) + 1e-6


def test_too_few_samples():
    with pytest.raises(InputError):
        two_nn(np.ones((50, 8), dtype=np.int8))


def test_select_minimal_basis_argmin():
    scans = {b: IdEstimate(value=v, ci=0.1, n_used=900, discard_fraction=0.1)
             for b, v in [("x", 30.0), ("y", 31.0), ("z", 2.0)]}
    scan = select_minimal_basis(scans)
    assert scan.minimal_basis == "z"
    assert scan.ties == []


def test_select_minimal_basis_tie():
    scans = {"x": IdEstimate(10.0, 0.5, 900, 0.1),
             "z": IdEstimate(10.2, 0.5, 900, 0.1)}
    scan = select_minimal_basis(scans)
    assert scan.minimal_basis == "x"
    assert scan.ties == ["z"]


def test_select_minimal_basis_errors():
    with pytest.raises(InputError):
        select_minimal_basis({})
    with pytest.raises(InputError):
        select_minimal_basis({"x": IdEstimate(1.0, 0.1, 100, 0.1)})
