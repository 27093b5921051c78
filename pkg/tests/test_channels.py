"""Channels, the Weyl-Heisenberg twirl and the concavity/convexity probes."""
import numpy as np
import pytest

from matmean.channels import (ChannelKind, Mode, QuantumChannel, conditional_convexity_check,
                              cq_channel, direct_sum_midpoint, midpoint_convexity_test,
                              monotonicity_check, partial_trace, pinching_channel,
                              pinching_example_defect, qc_channel, random_cptp,
                              region_csv, region_probe, semiclassical_monotonicity_check,
                              theory_status, trace_properties, transpose_map, twirl,
                              twirl_channel_check, twirl_identity_check, weyl_heisenberg)
from matmean.divergences import Povm
from matmean.means import MeanKind, MeanSpec
from matmean.spectral import DimensionError, sample_psd


def test_pinching_example():
    ch = pinching_channel(np.diag([1.0, 2.0]))
    assert ch.kind is ChannelKind.PINCHING
    np.testing.assert_allclose(ch(np.ones((2, 2))), np.eye(2))


def test_pinching_merges_degenerate_blocks():
    ch = pinching_channel(np.diag([1.0, 1.0, 2.0]))
    x = np.ones((3, 3))
    out = ch(x)
    np.testing.assert_allclose(out[:2, :2], np.ones((2, 2)))
    assert out[0, 2] == 0


def test_trivial_povm_qc_channel():
    ch = qc_channel(Povm((np.eye(2),)))
    x = sample_psd(2, np.random.default_rng(0))
    np.testing.assert_allclose(ch(x), [[np.trace(x).real]])


def test_trace_preservation(rng):
    ch = random_cptp(3, 2, 2, rng)
    xs = rng.standard_normal((100, 3, 3)) + 1j * rng.standard_normal((100, 3, 3))
    xs = xs + xs.conj().swapaxes(-1, -2)
    out = ch(xs)
    assert out.shape == (100, 2, 2)
    err = np.abs(np.trace(out, axis1=1, axis2=2) - np.trace(xs, axis1=1, axis2=2))
    assert err.max() <= 1e-12 * np.abs(xs).max() * 10


def test_rejects_non_tp_kraus():
    with pytest.raises(ValueError):
        QuantumChannel(np.stack([np.eye(2) * 0.5]))
    with pytest.raises(ValueError):
        cq_channel([np.eye(2)])


def test_transpose_and_partial_trace(rng):
    ch = random_cptp(2, 2, 2, rng)
    x = sample_psd(2, rng)
    np.testing.assert_allclose(transpose_map(ch)(x), ch(x).T)
    a, b = sample_psd(2, rng), sample_psd(3, rng)
    np.testing.assert_allclose(partial_trace(np.kron(a, b), (2, 3), keep=1),
                               np.trace(a) * b, atol=1e-12)


def test_cq_channel_on_diagonal():
    r1, r2 = np.diag([1.0, 0.0]), np.full((2, 2), 0.5)
    ch = cq_channel([r1, r2])
    np.testing.assert_allclose(ch(np.diag([0.3, 0.7])), 0.3 * r1 + 0.7 * r2, atol=1e-12)


def test_weyl_heisenberg_qubit():
    s, w = weyl_heisenberg(2)
    np.testing.assert_allclose(s, [[0, 1], [1, 0]])
    np.testing.assert_allclose(w, np.diag([1, -1]))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_weyl_heisenberg_commutation(d):
    s, w = weyl_heisenberg(d)
    omega = np.exp(2j * np.pi / d)
    np.testing.assert_allclose(s @ w, omega * w @ s, atol=1e-12)


@pytest.mark.parametrize("n,l,m", [(1, 2, 2), (2, 1, 3), (2, 2, 2), (2, 2, 4)])
def test_twirl_is_conditional_expectation(n, l, m, rng):
    assert twirl_identity_check(n, l, m, rng, samples=2) <= 1e-10
    assert twirl_channel_check(n, l, m, rng) <= 1e-10


def test_twirl_fixes_the_subalgebra(rng):
    b = sample_psd(2, rng)
    z = np.kron(np.eye(3), b)
    np.testing.assert_allclose(twirl(z, 3, 2), z, atol=1e-12)


def test_twirl_dimension_cap(rng):
    with pytest.raises(DimensionError):
        twirl_identity_check(3, 2, 3, rng)


def test_monotonicity_under_channels(rng):
    r = monotonicity_check(MeanSpec(MeanKind.R, 0.5, 2.0), "cptp", 100, rng)
    assert r.passes() and r.sign == 1
    r = monotonicity_check(MeanSpec(MeanKind.LE, 0.5), "transpose", 100, rng)
    assert r.passes()
    r = monotonicity_check(MeanSpec(MeanKind.R, 1.5, 1.0), "cptp", 100, rng)
    assert r.passes() and r.sign == -1
    with pytest.raises(ValueError):
        monotonicity_check(MeanSpec(MeanKind.R, 0.5, 1.0), "nope", 1, rng)


def test_log_euclidean_fails_under_pinching():
    """For alpha = 2 the log-Euclidean trace grows under some pinching."""
    g = np.exp(np.linspace(-3, 3, 13))
    assert max(pinching_example_defect(2.0, x, y) for x in g for y in g if x != y) > 0


def test_theory_status():
    s = lambda k, a, p: MeanSpec(MeanKind.parse(k), a, p)
    assert theory_status(s("R", 0.5, 2.0)) == "holds"
    assert theory_status(s("R", 0.5, 4.0)) == "fails"
    assert theory_status(s("G", 0.5, 0.8)) == "holds"
    assert theory_status(s("G", 0.5, 1.2)) == "fails"
    assert theory_status(s("Arith", 0.5, 1.5), "Convexity") == "holds"
    assert theory_status(s("Arith", 0.5, 2.5), "Convexity") == "fails"
    assert theory_status(s("R", 1.5, 1.0), "Concavity") == "Unknown"
    assert theory_status(s("LE", 1.5, 1.0)) == "fails"


def test_midpoint_no_violation_in_concave_region(rng):
    v = midpoint_convexity_test(MeanSpec(MeanKind.G, 0.5, 0.8), trials=3000, rng=rng)
    assert v.confirmed and v.mode is Mode.CONCAVITY
    v = midpoint_convexity_test(MeanSpec(MeanKind.ARITH, 0.5, 1.5), "Convexity", 3000, rng)
    assert v.confirmed


def test_midpoint_violation_outside_region(rng):
    v = midpoint_convexity_test(MeanSpec(MeanKind.R, 0.5, 4.0), trials=3000, rng=rng)
    assert not v.confirmed
    (a1, b1), (a2, b2), lam = v.witness
    assert v.worst_violation < -1e-9
    assert v.to_dict()["witness"]["lambda"] == lam


def test_arith_convexity_breaks_above_two():
    v = midpoint_convexity_test(MeanSpec(MeanKind.ARITH, 0.5, 2.5), "Convexity", 30_000,
                                np.random.default_rng(0))
    assert not v.confirmed


def test_region_probe(rng):
    cells = region_probe("R", None, [0.5], [1.0, 4.0], 2000, rng)
    assert [c.theory for c in cells] == ["holds", "fails"]
    assert all(c.consistent for c in cells)
    assert region_csv(cells).splitlines()[0] == "alpha,p,theory,empirical,worst_violation"


def test_conditional_convexity(rng):
    assert conditional_convexity_check(MeanSpec(MeanKind.G, 1.5, 0.8), 100, rng).holds


@pytest.mark.parametrize("direction", ["qc", "pinch"])
def test_semiclassical_implication(direction, rng):
    r = semiclassical_monotonicity_check(MeanSpec(MeanKind.R, 0.5, 2.0), direction, 50, rng)
    assert r.condition_holds and r.implication_ok


@pytest.mark.parametrize("kind", ["R", "G", "LE", "SG", "SGt"])
@pytest.mark.parametrize("alpha", [0.4, 1.6])
def test_trace_properties(kind, alpha, rng):
    props = trace_properties(MeanSpec(MeanKind.parse(kind), alpha, 0.7), rng)
    assert max(props.values()) <= 1e-8


def test_direct_sum_midpoint(rng):
    a1, b1, a2, b2 = (sample_psd(2, rng) for _ in range(4))
    lhs, rhs = direct_sum_midpoint(MeanSpec(MeanKind.R, 0.5, 1.0), a1, b1, a2, b2, 0.3)
    assert lhs >= rhs - 1e-12
    lhs, rhs = direct_sum_midpoint(MeanSpec(MeanKind.R, 1.5, 1.0), a1, b1, a2, b2, 0.3)
    assert lhs <= rhs + 1e-12
