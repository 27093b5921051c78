"""Rényi divergences from means, measured lower bounds and orderings."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matmean.channels import random_cptp
from matmean.divergences import (Exactness, Reason, all_orderings, alpha_z,
                                 classical_renyi, le_variational_check, maximal_divergence,
                                 measured_divergence_lb, petz,
                                 regularized_measured_estimate, sandwich_check,
                                 sandwiched, tensor, umegaki_relative_entropy)
from matmean.means import MeanKind, MeanSpec
from matmean.spectral import haar_unitary, sample_psd


def _state(n, rng, cond=10.0):
    x = sample_psd(n, rng, condition_target=cond)
    return x / np.trace(x).real


def test_classical_examples():
    assert classical_renyi([1, 0], [0.5, 0.5], 0.5).value == pytest.approx(np.log(2))
    assert classical_renyi([0.3, 0.7], [0.3, 0.7], 1.7).value == pytest.approx(0.0, abs=1e-15)
    v = classical_renyi([0.5, 0.5], [1.0, 0.0], 2.0)
    assert v.value == np.inf and v.reason is Reason.SUPPORT_VIOLATION
    with pytest.raises(ValueError):
        classical_renyi([0, 0], [0.5, 0.5], 0.5)


def test_kl_limit():
    b, a = np.array([0.2, 0.8]), np.array([0.5, 0.5])
    kl = classical_renyi(b, a, 1.0).value
    assert kl == pytest.approx(np.sum(b * np.log(b / a)))
    assert classical_renyi(b, a, 1 + 1e-6).value == pytest.approx(kl, rel=1e-5)


@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.0])
def test_commuting_pairs_reduce_to_classical(alpha, rng):
    u = haar_unitary(3, rng)
    pa, pb = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
    a = u @ np.diag(pa) @ u.conj().T
    b = u @ np.diag(pb) @ u.conj().T
    ref = classical_renyi(pb, pa, alpha).value
    for f in (petz, sandwiched, maximal_divergence):
        assert f(a, b, alpha).value == pytest.approx(ref, rel=1e-9)
    assert alpha_z(a, b, alpha, 0.7).value == pytest.approx(ref, rel=1e-9)
    assert measured_divergence_lb(a, b, alpha).value == pytest.approx(ref, rel=1e-9)


def test_equal_arguments_give_zero(rng):
    a = _state(3, rng)
    for al in (0.5, 1.5):
        for d in (petz(a, a, al), sandwiched(a, a, al), maximal_divergence(a, a, al)):
            assert abs(d.value) < 1e-10
    assert abs(sandwiched(a, a, 1.0).value) < 1e-10


def test_support_violation():
    a, b = np.diag([1.0, 0.0]), np.eye(2) / 2
    d = sandwiched(a, b, 1.5)
    assert d.value == np.inf and d.reason is Reason.SUPPORT_VIOLATION
    assert umegaki_relative_entropy(b, a) == np.inf


def test_maximal_flag(rng):
    a, b = _state(2, rng), _state(2, rng)
    assert maximal_divergence(a, b, 1.5).exactness is Exactness.EXACT
    assert maximal_divergence(a, b, 2.5).exactness is Exactness.UPPER_BOUND_ONLY


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.6, 0.8, 1.5, 2.0]))
def test_ordering_chain(seed, alpha):
    r = np.random.default_rng(seed)
    a, b = _state(3, r), _state(3, r)
    d = all_orderings(alpha, a, b)
    tol = 1e-9
    assert d["measured"] <= d["sandwiched"] + tol
    assert d["sandwiched"] <= d["petz"] + tol
    assert d["petz"] <= d["maximal"] + tol


def test_measured_strategies(rng):
    a, b = _state(2, rng), _state(2, rng)
    pin = measured_divergence_lb(a, b, 1.5, "pinching").value
    grid = measured_divergence_lb(a, b, 1.5, "grid", count=400).value
    povm = measured_divergence_lb(a, b, 1.5, "povm", rng=rng, count=50).value
    sw = sandwiched(a, b, 1.5).value
    assert pin <= grid + 1e-12
    assert max(pin, grid, povm) <= sw + 1e-9
    assert measured_divergence_lb(a, b, 1.5).exactness is Exactness.LOWER_BOUND_ONLY
    with pytest.raises(ValueError):
        measured_divergence_lb(_state(3, rng), _state(3, rng), 1.5, "grid")
    with pytest.raises(ValueError):
        measured_divergence_lb(a, b, 1.5, "nope")


def test_regularized_estimate(rng):
    a, b = _state(2, rng), _state(2, rng)
    al = 1.5
    vals = [regularized_measured_estimate(a, b, al, m) for m in (1, 2, 3, 4)]
    sw = sandwiched(a, b, al).value
    assert all(v <= sw + 1e-9 for v in vals)
    # the pinching penalty is at most log(m+1)/m
    for m, v in zip((1, 2, 3, 4), vals):
        assert sw - v <= np.log(m + 1) / m + 1e-9
    assert sw - vals[-1] < sw - vals[0]
    d = np.diag([0.3, 0.7])
    e = np.diag([0.6, 0.4])
    assert regularized_measured_estimate(d, e, al, 1) == pytest.approx(
        classical_renyi([0.6, 0.4], [0.3, 0.7], al).value)
    with pytest.raises(ValueError):
        regularized_measured_estimate(a, b, al, 5)


def test_variational_formula(rng):
    a, b = sample_psd(3, rng, condition_target=10.0), sample_psd(3, rng, condition_target=10.0)
    r = le_variational_check(a, b, 0.4, count=50, rng=rng)
    assert r.attained and r.dominates


def test_sandwich_examples(rng):
    a, b = _state(3, rng), _state(3, rng)
    s = sandwich_check(MeanSpec(MeanKind.R, 0.5, 2.0), a, b)
    assert s.lower_holds and s.upper_holds
    d = np.diag([0.2, 0.3, 0.5])
    e = np.diag([0.6, 0.1, 0.3])
    s = sandwich_check(MeanSpec(MeanKind.SG, 1.5, 1.0), d, e)
    assert s.trace_g == pytest.approx(s.trace_m) == pytest.approx(s.trace_r)


def test_sandwich_upper_can_fail_for_sg():
    rng = np.random.default_rng(0)
    spec = MeanSpec(MeanKind.SG, 2.0, 1.0)
    fails = 0
    for _ in range(200):
        a, b = _state(2, rng, 100.0), _state(2, rng, 100.0)
        fails += not sandwich_check(spec, a, b).upper_holds
    assert fails > 0


@pytest.mark.parametrize("alpha", [0.7, 1.5])
def test_additivity(alpha, rng):
    a1, b1, a2, b2 = (_state(2, rng) for _ in range(4))
    for f in (petz, sandwiched, maximal_divergence):
        lhs = f(tensor(a1, a2), tensor(b1, b2), alpha).value
        assert lhs == pytest.approx(f(a1, b1, alpha).value + f(a2, b2, alpha).value, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.6, 1.5, 2.0])
def test_data_processing(alpha, rng):
    for _ in range(5):
        a, b = _state(3, rng), _state(3, rng)
        ch = random_cptp(3, 2, 3, rng)
        for f in (petz, sandwiched, maximal_divergence):
            assert f(ch(a), ch(b), alpha).value <= f(a, b, alpha).value + 1e-9
