"""Log-majorization and the other eigenvalue orders."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matmean.majorization import (Outcome, Relation, compare, eigen_le, log_margin,
                                  log_majorize, schatten_norm, weak_log_majorize)
from matmean.means import mean_value
from matmean.spectral import haar_unitary, sample_psd


def test_simple_log_majorization():
    x, y = np.diag([2.0, 2.0]), np.diag([4.0, 1.0])
    v = log_majorize(x, y)
    assert v.outcome is Outcome.HOLDS
    assert v.margin == pytest.approx(np.log(2.0))
    np.testing.assert_allclose(v.partial_gaps, [np.log(2.0), 0.0], atol=1e-15)
    assert not log_majorize(y, x).holds


def test_determinant_mismatch_breaks_log_but_not_weak():
    x, y = np.diag([1.0, 1.0]), np.diag([2.0, 1.0])
    assert weak_log_majorize(x, y).outcome is Outcome.HOLDS
    v = log_majorize(x, y)
    assert v.outcome is Outcome.FAILS
    assert v.margin == pytest.approx(-np.log(2.0))


def test_boundary_band():
    x = np.diag([3.0, 1.0])
    assert log_majorize(x, x).outcome is Outcome.BOUNDARY
    assert log_majorize(x, x * (1 + 1e-12)).outcome is Outcome.BOUNDARY


def test_zero_eigenvalues():
    x, y = np.diag([1.0, 0.0]), np.diag([2.0, 0.0])
    assert weak_log_majorize(x, y).holds
    assert not weak_log_majorize(y, x).holds


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_unitary_invariance(seed):
    r = np.random.default_rng(seed)
    x, y = sample_psd(3, r), sample_psd(3, r)
    u = haar_unitary(3, r)
    m1 = log_majorize(x, y).margin
    m2 = log_majorize(u @ x @ u.conj().T, y).margin
    assert m1 == pytest.approx(m2, abs=1e-9)


def test_batched_margin_matches_single(rng):
    x = np.sort(rng.uniform(0.1, 1, (5, 3)), axis=-1)[..., ::-1]
    y = np.sort(rng.uniform(0.1, 1, (5, 3)), axis=-1)[..., ::-1]
    batch = log_margin(x, y)
    for i in range(5):
        assert batch[i] == pytest.approx(log_majorize(np.diag(x[i]), np.diag(y[i])).margin)


def test_eigen_le_and_compare():
    x, y = np.diag([1.0, 3.0]), np.diag([2.0, 2.0])
    assert eigen_le(np.diag([1.0, 0.5]), np.diag([2.0, 1.0]))
    assert not eigen_le(x, y)
    assert compare(Relation.LOEWNER, np.eye(2), 2 * np.eye(2))
    assert compare("eigen", np.eye(2), 2 * np.eye(2))
    assert compare("wlog", np.eye(2), 2 * np.eye(2)).holds


def test_schatten_norms():
    x = np.diag([3.0, 4.0])
    assert schatten_norm(x, 1) == pytest.approx(7.0)
    assert schatten_norm(x, 2) == pytest.approx(5.0)
    assert schatten_norm(x, np.inf) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        schatten_norm(x, 0.5)


def test_weak_and_log_examples():
    assert weak_log_majorize(np.diag([3.0, 1.0]), np.diag([4.0, 1.0])).holds
    v = weak_log_majorize(np.diag([3.0, 1.0]), np.diag([3.0, 1.0]))
    assert v.outcome is Outcome.BOUNDARY and v.margin == 0.0
    assert log_majorize(np.diag([2.0, 2.0]), np.diag([4.0, 1.0])).holds
    assert not log_majorize(np.diag([3.0, 1.0]), np.diag([4.0, 1.0])).holds
    assert eigen_le(np.diag([1.0, 2.0]), np.diag([2.0, 3.0]))


def _root(x):
    w, v = np.linalg.eigh(x)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def test_araki_instance(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    ah = _root(a)
    x = ah @ b @ ah
    y = _root(a @ b @ b @ a)
    assert log_majorize(x, y).holds


def test_geometric_exponent_order(rng):
    a = sample_psd(4, rng, condition_target=10.0)
    b = sample_psd(4, rng, condition_target=10.0)
    assert log_majorize(mean_value("G", 0.5, 2.0, a, b), mean_value("G", 0.5, 1.0, a, b)).holds


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_loewner_implies_eigen_implies_wlog(seed):
    r = np.random.default_rng(seed)
    x = sample_psd(3, r)
    y = x + sample_psd(3, r, rank=1)
    assert compare("loewner", x, y)
    assert eigen_le(x, y)
    assert weak_log_majorize(x, y).holds


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_log_majorization_implies_norm_inequalities(seed):
    r = np.random.default_rng(seed)
    a = sample_psd(3, r, condition_target=10.0)
    b = sample_psd(3, r, condition_target=10.0)
    x, y = mean_value("R", 0.4, 1.0, a, b), mean_value("R", 0.4, 2.0, a, b)
    assert log_majorize(x, y).holds
    for s in (1, 2, 3, np.inf):
        assert schatten_norm(x, s) <= schatten_norm(y, s) * (1 + 1e-9)


def test_tensor_compatibility(rng):
    pairs = []
    for _ in range(2):
        a = sample_psd(2, rng, condition_target=10.0)
        b = sample_psd(2, rng, condition_target=10.0)
        pairs.append((mean_value("R", 0.4, 1.0, a, b), mean_value("R", 0.4, 2.0, a, b)))
    (x1, y1), (x2, y2) = pairs
    assert log_majorize(np.kron(x1, x2), np.kron(y1, y2)).holds


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        log_majorize(np.eye(2), np.eye(3))


def test_equal_determinant_means_hold_strictly(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    x, y = mean_value("R", 0.4, 1.0, a, b), mean_value("R", 0.4, 2.0, a, b)
    assert log_majorize(x, y).outcome is Outcome.HOLDS
    assert log_majorize(x, x).outcome is Outcome.BOUNDARY
