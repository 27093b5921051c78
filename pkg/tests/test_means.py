"""Matrix means against closed forms and the high-precision oracle."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matmean.highprec import mean_mp
from matmean.means import (QUASI_GEOMETRIC, DomainError, MeanKind, MeanSpec,
                           ParameterError, compute_mean, epsilon_limit,
                           lie_trotter_probe, log_det_defect, mean_value, sharp,
                           weighted_geometric)
from matmean.spectral import sample_psd

ALL_KINDS = list(MeanKind)


def _mp_to_np(m):
    n = m.rows
    return np.array([[complex(m[i, j]) for j in range(n)] for i in range(n)])


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("alpha,p", [(0.3, 1.0), (0.7, 0.5), (1.5, 2.0)])
def test_matches_high_precision(kind, alpha, p, rng):
    if kind in (MeanKind.ARITH, MeanKind.HARM) and alpha > 1:
        pytest.skip("arithmetic-type means need alpha < 1")
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    ref = _mp_to_np(mean_mp(kind, alpha, p, a, b, dps=30))
    np.testing.assert_allclose(mean_value(kind, alpha, p, a, b), ref, atol=1e-11)


@pytest.mark.parametrize("kind", QUASI_GEOMETRIC)
def test_commuting_reduction(kind):
    """Commuting inputs give ``A^(1-alpha) B^alpha`` for every quasi-geometric mean."""
    a, b = np.diag([2.0, 0.5, 3.0]), np.diag([1.0, 4.0, 0.25])
    for alpha in (0.3, 1.7):
        expect = np.diag(np.diag(a) ** (1 - alpha) * np.diag(b) ** alpha)
        np.testing.assert_allclose(mean_value(kind, alpha, 1.3, a, b), expect, rtol=1e-12)


def test_arith_harm_commuting():
    a, b = np.diag([2.0, 0.5]), np.diag([1.0, 4.0])
    al, p = 0.25, 2.0
    da, db = np.diag(a), np.diag(b)
    np.testing.assert_allclose(mean_value("Arith", al, p, a, b),
                               np.diag(((1 - al) * da ** p + al * db ** p) ** (1 / p)))
    np.testing.assert_allclose(mean_value("Harm", al, p, a, b),
                               np.diag(((1 - al) * da ** -p + al * db ** -p) ** (-1 / p)))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_idempotent(kind, rng):
    a = sample_psd(3, rng, condition_target=10.0)
    np.testing.assert_allclose(mean_value(kind, 0.4, 1.5, a, a), a, atol=1e-12)


def test_geometric_mean_riccati(rng):
    """``A # B`` is the positive solution of ``X A^-1 X = B``."""
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    x = sharp(a, b, 0.5)
    np.testing.assert_allclose(x @ np.linalg.inv(a) @ x, b, atol=1e-12)
    assert np.linalg.eigvalsh(x)[0] > 0


def test_geometric_symmetry(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    np.testing.assert_allclose(sharp(a, b, 0.3), sharp(b, a, 0.7), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(QUASI_GEOMETRIC),
       st.sampled_from([0.3, 0.7, 1.5]), st.sampled_from([0.5, 1.0, 2.0]))
def test_log_det_identity(seed, kind, alpha, p):
    r = np.random.default_rng(seed)
    a = sample_psd(3, r, condition_target=10.0)
    b = sample_psd(3, r, condition_target=10.0)
    assert abs(float(log_det_defect(kind, alpha, p, a, b))) < 1e-9


def test_batched_parameters(rng):
    a = sample_psd(2, rng, condition_target=5.0, size=3)
    b = sample_psd(2, rng, condition_target=5.0, size=3)
    al, p = np.array([0.2, 0.5, 1.5]), np.array([0.5, 1.0, 2.0])
    out = mean_value("SG", al, p, a, b)
    for i in range(3):
        np.testing.assert_allclose(out[i], mean_value("SG", al[i], p[i], a[i], b[i]), atol=1e-13)


def test_parse_aliases():
    assert MeanKind.parse("sgtilde") is MeanKind.SGT
    assert MeanKind.parse("arithmetic") is MeanKind.ARITH
    assert MeanKind.parse("le") is MeanKind.LE
    with pytest.raises(ValueError):
        MeanKind.parse("bogus")


def test_parameter_validation():
    with pytest.raises(ParameterError):
        MeanSpec("R", 1.0)
    with pytest.raises(ParameterError):
        MeanSpec("R", -0.5)
    with pytest.raises(ParameterError):
        MeanSpec("G", 0.5, 0.0)
    with pytest.raises(ParameterError):
        MeanSpec("Arith", 1.5)
    assert MeanSpec("LE", 0.5).label() == "LE[a=0.5]"


def test_domain_error_for_large_alpha():
    a = np.diag([1.0, 0.0])
    b = np.eye(2)
    with pytest.raises(DomainError):
        compute_mean(MeanSpec("R", 1.5, 1.0), a, b)
    with pytest.raises(DomainError):
        compute_mean(MeanSpec("SG", 0.5, 1.0), a, b)


def test_singular_pair_uses_epsilon_limit():
    a = np.diag([1.0, 1.0])
    b = np.diag([1.0, 0.0])
    res = compute_mean(MeanSpec("G", 0.5, 1.0), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert res.regularization_used is not None
    np.testing.assert_allclose(np.asarray(res.value), np.zeros((2, 2)), atol=1e-3)
    # dominated pairs go through the direct formula
    res = compute_mean(MeanSpec("G", 0.5, 1.0), a, b)
    assert res.regularization_used is None
    np.testing.assert_allclose(np.asarray(res.value), b, atol=1e-12)


def test_epsilon_limit_converges():
    a, b = np.diag([1.0, 0.0]), np.diag([0.5, 0.0])
    res = epsilon_limit(MeanSpec("G", 0.5, 1.0), a, b)
    np.testing.assert_allclose(np.asarray(res.value), np.diag([np.sqrt(0.5), 0.0]), atol=1e-6)
    assert res.successive_differences[-1] < res.successive_differences[0]


def test_weighted_geometric(rng):
    a = sample_psd(2, rng, condition_target=4.0)
    b = sample_psd(2, rng, condition_target=4.0)
    np.testing.assert_allclose(np.asarray(weighted_geometric(a, b, 0.5)),
                               sharp(a, b, 0.5), atol=1e-12)


@pytest.mark.parametrize("kind", ["R", "G", "SG", "SGt"])
def test_lie_trotter_limit(kind, rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    r = lie_trotter_probe(kind, 0.7, a, b)
    assert r.final_distance < 1e-3
    assert r.decreasing_tail(5)


def test_geometric_commuting_example():
    out = compute_mean(MeanSpec("G", 0.5, 1.0), np.diag([1.0, 4.0]), np.diag([9.0, 1.0]))
    np.testing.assert_allclose(np.asarray(out.value), np.diag([3.0, 2.0]), atol=1e-12)


def test_log_euclidean_commuting_example():
    out = compute_mean(MeanSpec("LE", 1 / 3), np.diag([8.0, 1.0]), np.diag([1.0, 27.0]))
    np.testing.assert_allclose(np.asarray(out.value), np.diag([4.0, 3.0]), atol=1e-12)


def test_spectral_geometric_against_oracle():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([[1.0, 0.0], [0.0, 3.0]])
    got = np.asarray(compute_mean(MeanSpec("SG", 0.5, 1.0), a, b).value)
    ref = _mp_to_np(mean_mp("SG", 0.5, 1.0, a, b, dps=40)).real
    assert np.abs(got - ref).max() <= 1e-9 * np.abs(ref).max()


def test_weighted_geometric_examples(rng):
    b = sample_psd(3, rng)
    w, v = np.linalg.eigh(b)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    np.testing.assert_allclose(np.asarray(weighted_geometric(np.eye(3), b, 0.5)), root,
                               atol=1e-10)
    np.testing.assert_allclose(np.asarray(weighted_geometric(np.diag([4.0, 9.0]), np.eye(2), 0.5)),
                               np.diag([2.0, 3.0]), atol=1e-12)


def test_weight_two_geometric_spectrum(rng):
    """``A #_2 B`` has the spectrum of ``B A^-1 B``."""
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    w = np.linalg.eigvalsh(np.asarray(weighted_geometric(a, b, 2.0)))
    ref = np.sort(np.linalg.eigvals(b @ np.linalg.inv(a) @ b).real)
    np.testing.assert_allclose(w, ref, rtol=1e-9)


def test_epsilon_limit_examples(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    spec = MeanSpec("G", 0.4, 1.5)
    direct = mean_value("G", 0.4, 1.5, a, b)
    np.testing.assert_allclose(np.asarray(epsilon_limit(spec, a, b).value), direct, atol=1e-7)
    # commuting singular case: the second eigenvalue decays like sqrt(eps)
    res = epsilon_limit(MeanSpec("R", 0.5, 1.0), np.eye(2), np.diag([1.0, 0.0]))
    np.testing.assert_allclose(np.asarray(res.value), np.diag([1.0, 0.0]), atol=2e-4)
    assert list(res.successive_differences) == sorted(res.successive_differences, reverse=True)


def test_epsilon_limit_matches_generalized_inverse(rng):
    from matmean.spectral import sample_dominated_pair
    a, b = sample_dominated_pair(3, rng, rank_b=2)
    spec = MeanSpec("SGt", 1.5, 1.0)
    lim = np.asarray(epsilon_limit(spec, a, b).value)
    np.testing.assert_allclose(lim, mean_value("SGt", 1.5, 1.0, a, b), atol=1e-6)


def test_lie_trotter_commuting_is_exact():
    a, b = np.diag([2.0, 0.3]), np.diag([0.5, 4.0])
    for kind in ("R", "G", "SG", "SGt"):
        assert max(lie_trotter_probe(kind, 0.6, a, b).distances) < 1e-12


def test_lie_trotter_singular_dominated(rng):
    """Convergence to LE on ``P0 = s(B)``; the rate is linear in ``p``, so
    the limit is read off by one Richardson step."""
    from matmean.spectral import fsupport, sample_dominated_pair
    a, b = sample_dominated_pair(3, rng, rank_b=2)
    r = lie_trotter_probe("SGt", 2.0, a, b)
    assert r.decreasing_tail(10)
    le = mean_value("LE", 2.0, 1.0, a, b)
    np.testing.assert_allclose(fsupport(le), fsupport(b), atol=1e-10)
    m1 = mean_value("SGt", 2.0, 2.0 ** -10, a, b)
    m2 = mean_value("SGt", 2.0, 2.0 ** -11, a, b)
    assert np.linalg.norm(2 * m2 - m1 - le, 2) < 1e-4


@pytest.mark.parametrize("kind", QUASI_GEOMETRIC)
def test_inverse_identity(kind, rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    inv = np.linalg.inv(mean_value(kind, 0.3, 1.5, a, b))
    got = mean_value(kind, 0.3, 1.5, np.linalg.inv(a), np.linalg.inv(b))
    assert np.abs(got - inv).max() <= 1e-8 * np.abs(inv).max()


def test_arith_harm_are_dual_under_inversion(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    inv = np.linalg.inv(mean_value("Harm", 0.3, 1.5, a, b))
    got = mean_value("Arith", 0.3, 1.5, np.linalg.inv(a), np.linalg.inv(b))
    np.testing.assert_allclose(got, inv, atol=1e-9 * np.abs(inv).max())


def test_swap_symmetries(rng):
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    np.testing.assert_allclose(mean_value("SG", 0.3, 1.3, a, b),
                               mean_value("SG", 0.7, 1.3, b, a), atol=1e-12)
    tr = lambda m: np.trace(m).real
    assert tr(mean_value("R", 0.3, 1.3, a, b)) == pytest.approx(
        tr(mean_value("R", 0.7, 1.3, b, a)), rel=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_unitary_covariance(kind, rng):
    from matmean.spectral import haar_unitary
    a = sample_psd(3, rng, condition_target=10.0)
    b = sample_psd(3, rng, condition_target=10.0)
    u = haar_unitary(3, rng)
    lhs = mean_value(kind, 0.4, 0.8, u @ a @ u.conj().T, u @ b @ u.conj().T)
    rhs = u @ mean_value(kind, 0.4, 0.8, a, b) @ u.conj().T
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("kind", QUASI_GEOMETRIC)
def test_trace_multiplicative_on_tensors(kind, rng):
    a1, b1, a2, b2 = (sample_psd(2, rng, condition_target=5.0) for _ in range(4))
    tr = lambda m: np.trace(m).real
    lhs = tr(mean_value(kind, 1.4, 0.7, np.kron(a1, a2), np.kron(b1, b2)))
    rhs = tr(mean_value(kind, 1.4, 0.7, a1, b1)) * tr(mean_value(kind, 1.4, 0.7, a2, b2))
    assert lhs == pytest.approx(rhs, rel=1e-8)
