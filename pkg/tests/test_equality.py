"""Fourth-order trace expansion and the norm equality probes."""
import numpy as np
import pytest

from matmean.equality import (EQUALITY_PAIRS, commutation_defect, equality_pair, factorial_scaled_traces,
                              fd_taylor, norm_equality_probe, taylor_coefficients,
                              taylor_order_check, trace_geometric, trace_monotone_in_p, z4_gap,
                              z4_gap_commutator_form)
from matmean.spectral import haar_unitary, sample_psd


def _herm(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (z + z.conj().T) / 2
    return h / np.linalg.norm(h, 2)


def test_fd_taylor_on_polynomial():
    coef = fd_taylor(lambda t: 1 + 2 * t - t ** 3 + 0.5 * t ** 4)
    np.testing.assert_allclose(coef, [1, 2, 0, -1, 0.5], atol=1e-9)


@pytest.mark.parametrize("alpha", [0.4, 1.25, 1.5, 2.0])
def test_coefficients_match_finite_differences(alpha, rng):
    h, k = _herm(3, rng), _herm(3, rng)
    fd, z = taylor_order_check(h, k, alpha)
    np.testing.assert_allclose(fd, z, atol=1e-6 * max(1, np.max(np.abs(z))))


@pytest.mark.parametrize("alpha", [0.4, 1.5])
def test_first_three_orders_match_exponential(alpha, rng):
    h, k = _herm(3, rng), _herm(3, rng)
    z = taylor_coefficients(h, k, alpha).z
    ref = factorial_scaled_traces(alpha * h + (1 - alpha) * k)
    np.testing.assert_allclose(z[:3], ref[:3], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.4, 1.25, 2.0])
def test_expanded_fourth_order_form(alpha, rng):
    h, k = _herm(3, rng), _herm(3, rng)
    tc = taylor_coefficients(h, k, alpha)
    assert tc.z[3] == pytest.approx(tc.z4_closed, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.4, 1.25, 1.5, 2.0])
def test_z4_gap_commutator_form(alpha, rng):
    h, k = _herm(3, rng), _herm(3, rng)
    assert z4_gap(h, k, alpha) == pytest.approx(z4_gap_commutator_form(h, k, alpha), rel=1e-8)


def test_z4_gap_vanishes_when_commuting(rng):
    u = haar_unitary(3, rng)
    h = u @ np.diag(rng.standard_normal(3)) @ u.conj().T
    k = u @ np.diag(rng.standard_normal(3)) @ u.conj().T
    assert abs(z4_gap(h, k, 1.5)) < 1e-12


def test_equality_probe_commuting_pair():
    a, b = np.diag([1.0, 2.0, 3.0]), np.diag([3.0, 1.0, 0.5])
    for e in EQUALITY_PAIRS:
        p, q = (1.0, 2.0) if e.region(0.4, 1.0, 2.0) else (2.0, 1.0)
        probe = norm_equality_probe(e.id, 0.4, p, q, a, b)
        assert abs(probe.gap) < 1e-12
        assert probe.commutator_norm == 0.0


def test_equality_probe_strict_for_non_commuting(rng):
    a, b = sample_psd(3, rng, condition_target=10.0), sample_psd(3, rng, condition_target=10.0)
    probe = norm_equality_probe("4.1", 0.5, 1.0, 2.0, a, b)
    assert probe.gap > 1e-6
    assert probe.commutator_norm > 1e-3


def test_equality_probe_rejects():
    a = np.eye(2)
    with pytest.raises(ValueError):
        norm_equality_probe("4.1", 0.5, 1.0, 1.0, a, a)
    with pytest.raises(ValueError):
        norm_equality_probe("4.1", 0.5, 1.0, 2.0, a, a, s=np.inf)
    with pytest.raises(KeyError):
        equality_pair("5.0")
    assert equality_pair("(4.9)").id == "4.9"


def test_trace_decreasing_in_p(rng):
    a, b = sample_psd(3, rng), sample_psd(3, rng)
    t = trace_monotone_in_p(0.4, a, b, [0.25, 0.5, 1.0, 2.0, 4.0])
    assert np.all(np.diff(t) <= 1e-12)


def test_equal_generators(rng):
    h = _herm(3, rng)
    tc = taylor_coefficients(h, h, 0.7)
    assert np.abs(tc.X[0]).max() < 1e-15 and np.abs(tc.X[1]).max() < 1e-15
    assert tc.z[3] == pytest.approx(np.trace(np.linalg.matrix_power(h, 4)).real / 24)


def test_zero_second_generator(rng):
    h, al = _herm(3, rng), 1.5
    z = taylor_coefficients(h, np.zeros((3, 3)), al).z
    ref = [al ** i * np.trace(np.linalg.matrix_power(h, i)).real / f
           for i, f in zip(range(1, 5), (1, 2, 6, 24))]
    np.testing.assert_allclose(z, ref, rtol=1e-12, atol=1e-14)


def test_pauli_pair():
    h = np.diag([1.0, -1.0])
    k = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert commutation_defect(h, k) == pytest.approx(2 * np.sqrt(2))
    assert abs(z4_gap(h, k, 1.5)) > 1e-3


@pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0])
def test_z4_gap_nonnegative_above_one(alpha, rng):
    for _ in range(5):
        assert z4_gap(_herm(3, rng), _herm(3, rng), alpha) >= -1e-12


def test_commuting_trace_identity(rng):
    u = haar_unitary(3, rng)
    h = u @ np.diag(rng.standard_normal(3)) @ u.conj().T
    k = u @ np.diag(rng.standard_normal(3)) @ u.conj().T
    al = 0.6
    for t in np.linspace(-0.5, 0.5, 7):
        w = np.linalg.eigvalsh(t * (al * h + (1 - al) * k))
        assert trace_geometric(h, k, al, t) == pytest.approx(np.exp(w).sum(), rel=1e-12)


def test_trace_order_matches_exponent_order(rng):
    a, b = sample_psd(3, rng), sample_psd(3, rng)
    tp, tq = trace_monotone_in_p(0.4, a, b, [0.5, 2.0])
    assert tq <= tp
    tp, tq = trace_monotone_in_p(0.4, a, b, [2.0, 0.5])
    assert not tq < tp


def test_gap_shrinks_towards_commuting(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    f = a @ a
    gaps = [norm_equality_probe("4.1", 0.5, 1.0, 2.0, a, (1 - t) * b + t * f).gap
            for t in (0.0, 0.5, 0.9, 0.99, 1.0)]
    assert gaps[-1] < 1e-10
    assert gaps[-2] < gaps[0]
