import math

import numpy as np
import pytest
from scipy.linalg import hadamard as dense_hadamard

import robustpr as rp

SQ2 = math.sqrt(2.0)


def test_gaussian_ensemble_shape_and_determinism():
    e1 = rp.gaussian_ensemble(3, 5, seed=7)
    e2 = rp.gaussian_ensemble(3, 5, seed=7)
    assert e1.rows.shape == (5, 3)
    assert np.array_equal(e1.rows, e2.rows)
    assert not np.array_equal(e1.rows, rp.gaussian_ensemble(3, 5, seed=8).rows)


def test_gaussian_ensemble_column_means_concentrate():
    e = rp.gaussian_ensemble(1000, 3000, seed=0)
    bound = 4.0 / math.sqrt(3000)
    for col in range(0, 1000, 100):
        assert abs(e.rows[:, col].mean()) < bound


def test_gaussian_ensemble_preconditions():
    with pytest.raises(ValueError):
        rp.gaussian_ensemble(0, 5, seed=1)
    with pytest.raises(ValueError):
        rp.gaussian_ensemble(5, 0, seed=1)


def test_gaussian_ensemble_capacity_budget():
    with pytest.raises(rp.CapacityError):
        rp.gaussian_ensemble(1000, 1000, seed=0, max_bytes=10_000)


def test_hadamard_ensemble_shapes():
    e = rp.hadamard_ensemble(4, 2, seed=3)
    assert (e.m, e.d) == (8, 4)
    assert e.sign_diagonals.shape == (2, 4)
    assert set(np.unique(e.sign_diagonals)) <= {-1.0, 1.0}


def test_hadamard_ensemble_degenerate_size():
    e = rp.hadamard_ensemble(1, 1, seed=0)
    assert (e.m, e.d) == (1, 1)
    sign = e.sign_diagonals[0, 0]
    assert sign in (-1.0, 1.0)
    # H = [1], so applying the sketch is multiplication by the sign itself
    assert rp.apply(e, np.array([3.0]))[0] == pytest.approx(3.0 * sign)


def test_hadamard_ensemble_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        rp.hadamard_ensemble(6, 1, seed=0)
    with pytest.raises(ValueError):
        rp.hadamard_ensemble(4, 0, seed=0)


def test_fwht_basis_examples():
    np.testing.assert_allclose(rp.fwht([1.0, 0.0]), [1 / SQ2, 1 / SQ2], atol=1e-15)
    np.testing.assert_allclose(rp.fwht([1.0, 1.0]), [SQ2, 0.0], atol=1e-15)


def test_fwht_matches_dense_sylvester_matrix():
    for l in (1, 2, 4, 8, 32):
        h = dense_hadamard(l) / math.sqrt(l)
        rng = np.random.default_rng(l)
        v = rng.standard_normal(l)
        np.testing.assert_allclose(rp.fwht(v), h @ v, atol=1e-12)


def test_fwht_involution_and_isometry():
    for p in range(0, 15):
        l = 2**p
        v = np.random.default_rng(p).standard_normal(l)
        w = rp.fwht(v)
        assert np.max(np.abs(rp.fwht(w) - v)) <= 1e-12 * np.max(np.abs(v))
        assert np.linalg.norm(w) == pytest.approx(np.linalg.norm(v), rel=1e-12)


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        rp.fwht(np.ones(3))
    with pytest.raises(ValueError):
        rp.fwht(np.ones((4, 4)))


def test_apply_identity_rows():
    ens = rp.MeasurementEnsemble(kind=rp.DENSE_GAUSSIAN, d=2, m=2, seed=0,
                                 rows=np.eye(2))
    np.testing.assert_allclose(rp.apply(ens, np.array([3.0, -2.0])), [3.0, -2.0])
    np.testing.assert_allclose(rp.apply_adjoint(ens, np.array([3.0, -2.0])), [3.0, -2.0])


def test_apply_hadamard_hand_case():
    ens = rp.MeasurementEnsemble(kind=rp.HADAMARD_SKETCH, d=2, m=2, seed=0,
                                 sign_diagonals=np.array([[1.0, -1.0]]))
    # S x = (1, -1); H_2 (1,-1)/sqrt(2) = (0, sqrt(2))
    np.testing.assert_allclose(rp.apply(ens, np.array([1.0, 1.0])), [0.0, SQ2], atol=1e-15)


def test_apply_adjoint_hadamard_hand_case():
    ens = rp.MeasurementEnsemble(kind=rp.HADAMARD_SKETCH, d=2, m=2, seed=0,
                                 sign_diagonals=np.array([[1.0, 1.0]]))
    np.testing.assert_allclose(rp.apply_adjoint(ens, np.array([1.0, 0.0])),
                               [1 / SQ2, 1 / SQ2], atol=1e-15)


def test_apply_dimension_mismatch():
    ens = rp.gaussian_ensemble(3, 5, seed=0)
    with pytest.raises(ValueError):
        rp.apply(ens, np.ones(4))
    with pytest.raises(ValueError):
        rp.apply_adjoint(ens, np.ones(3))


@pytest.mark.parametrize("make", [
    lambda: rp.gaussian_ensemble(13, 29, seed=5),
    lambda: rp.hadamard_ensemble(16, 3, seed=5),
])
def test_adjoint_identity_many_triples(make):
    ens = make()
    rng = np.random.default_rng(42)
    for _ in range(100):
        x = rng.standard_normal(ens.d)
        y = rng.standard_normal(ens.m)
        lhs = rp.apply(ens, x) @ y
        rhs = x @ rp.apply_adjoint(ens, y)
        assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(lhs))


@pytest.mark.parametrize("l,k", [(2, 1), (8, 2), (64, 3)])
def test_hadamard_matrix_free_matches_densified(l, k):
    ens = rp.hadamard_ensemble(l, k, seed=11)
    rows = rp.densify(ens)
    assert rows.shape == (ens.m, ens.d)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(l)
        np.testing.assert_allclose(rp.apply(ens, x), rows @ x, atol=1e-12)
        y = rng.standard_normal(ens.m)
        np.testing.assert_allclose(rp.apply_adjoint(ens, y), rows.T @ y, atol=1e-12)


def test_measure_zero_signal_gives_zero_measurements():
    ens = rp.gaussian_ensemble(4, 9, seed=2)
    problem = rp.measure(ens, np.zeros(4))
    assert np.all(problem.b == 0.0)


def test_measure_noiseless_objective_vanishes_at_truth():
    ens = rp.hadamard_ensemble(8, 2, seed=2)
    xbar = np.random.default_rng(3).standard_normal(8)
    problem = rp.measure(ens, xbar)
    assert rp.value(problem, xbar) == 0.0


def test_measure_zero_fail_probability_matches_noiseless():
    ens = rp.gaussian_ensemble(6, 20, seed=4)
    xbar = np.random.default_rng(5).standard_normal(6)
    clean = rp.measure(ens, xbar)
    noisy = rp.measure(ens, xbar, rp.NoiseModel(p_fail=0.0, scale=3.0, seed=9))
    np.testing.assert_array_equal(clean.b, noisy.b)


def test_measure_noise_is_seeded_and_sparse():
    ens = rp.gaussian_ensemble(6, 400, seed=4)
    xbar = np.random.default_rng(5).standard_normal(6)
    noise = rp.NoiseModel(p_fail=0.25, scale=2.0, seed=9)
    p1 = rp.measure(ens, xbar, noise)
    p2 = rp.measure(ens, xbar, noise)
    np.testing.assert_array_equal(p1.b, p2.b)
    clean = rp.measure(ens, xbar)
    frac = np.mean(p1.b != clean.b)
    assert 0.1 < frac < 0.4


def test_measure_dimension_mismatch():
    ens = rp.gaussian_ensemble(4, 9, seed=2)
    with pytest.raises(ValueError):
        rp.measure(ens, np.zeros(5))


def test_noise_model_validation():
    with pytest.raises(ValueError):
        rp.NoiseModel(p_fail=1.0, scale=1.0, seed=0)
    with pytest.raises(ValueError):
        rp.NoiseModel(p_fail=0.5, scale=-1.0, seed=0)
    with pytest.raises(ValueError):
        rp.NoiseModel(p_fail=0.5, scale=1.0, seed=0, kind="levy")


def test_ensembles_are_immutable():
    ens = rp.gaussian_ensemble(3, 5, seed=7)
    with pytest.raises(ValueError):
        ens.rows[0, 0] = 0.0


def test_full_64_bit_seeds_are_accepted():
    big = 2**64 - 1
    e1 = rp.gaussian_ensemble(3, 5, seed=big)
    e2 = rp.gaussian_ensemble(3, 5, seed=big)
    assert np.array_equal(e1.rows, e2.rows)
    assert rp.hadamard_ensemble(4, 1, seed=big).sign_diagonals.shape == (1, 4)
