"""Rényi-type divergences generated by the matrix means.

Argument order follows the usual divergence convention ``D(B || A)``,
which is the reverse of the mean's ``M(A, B)``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .means import MeanKind, MeanSpec, mean_value, needs_domination
from .spectral import dominates, eigh, flog, fsupport, herm, sample_psd


class Reason(str, enum.Enum):
    IN_DOMAIN = "InDomain"
    SUPPORT_VIOLATION = "SupportViolation"


class Exactness(str, enum.Enum):
    EXACT = "Exact"
    UPPER_BOUND_ONLY = "UpperBoundOnly"
    LOWER_BOUND_ONLY = "LowerBoundOnly"


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    reason: Reason = Reason.IN_DOMAIN
    exactness: Exactness = Exactness.EXACT

    @property
    def finite(self) -> bool:
        return np.isfinite(self.value)

    def __float__(self) -> float:
        return float(self.value)


INFINITE = DivergenceValue(np.inf, Reason.SUPPORT_VIOLATION)


def classical_renyi(b, a, alpha: float) -> DivergenceValue:
    """``1/(alpha-1) log(sum b^alpha a^(1-alpha) / sum b)``; KL at ``alpha = 1``."""
    b = np.asarray(b, float)
    a = np.asarray(a, float)
    if not np.any(b > 0):
        raise ValueError("b must be nonzero")
    if np.any(b < 0) or np.any(a < 0):
        raise ValueError("inputs must be nonnegative")
    sb = b.sum()
    on_b = b > 0
    if alpha >= 1 and np.any(on_b & (a <= 0)):
        return INFINITE
    if alpha == 1:
        return DivergenceValue(float(np.sum(b[on_b] * np.log(b[on_b] / a[on_b])) / sb))
    both = on_b & (a > 0)
    s = np.sum(b[both] ** alpha * a[both] ** (1 - alpha))
    if s <= 0:
        return INFINITE
    return DivergenceValue(float(np.log(s / sb) / (alpha - 1)))


def _trace(x) -> float:
    return float(np.real(np.trace(x)))


def divergence_from_mean(spec: MeanSpec, a, b) -> DivergenceValue:
    """``D^M(B || A) = 1/(alpha-1) log(Tr M(A, B) / Tr B)``."""
    a, b = np.asarray(a), np.asarray(b)
    tb = _trace(b)
    if tb <= 0:
        raise ValueError("B must be nonzero")
    if needs_domination(spec) and not bool(dominates(a, b)):
        return INFINITE
    tm = _trace(mean_value(spec.kind, spec.alpha, spec.p, a, b))
    if tm <= 0:
        return INFINITE
    return DivergenceValue(float(np.log(tm / tb) / (spec.alpha - 1)))


def petz(a, b, alpha: float) -> DivergenceValue:
    return divergence_from_mean(MeanSpec(MeanKind.R, alpha, 1.0), a, b)


def sandwiched(a, b, alpha: float) -> DivergenceValue:
    """Sandwiched divergence; the Umegaki relative entropy at ``alpha = 1``."""
    if alpha == 1:
        return DivergenceValue(umegaki_relative_entropy(b, a) / _trace(b))
    return divergence_from_mean(MeanSpec(MeanKind.R, alpha, 1.0 / alpha), a, b)


def alpha_z(a, b, alpha: float, z: float) -> DivergenceValue:
    return divergence_from_mean(MeanSpec(MeanKind.R, alpha, 1.0 / z), a, b)


def maximal_divergence(a, b, alpha: float) -> DivergenceValue:
    """``D^{G_{alpha,1}}``: the maximal divergence for ``alpha <= 2``, an
    upper bound on it beyond."""
    d = divergence_from_mean(MeanSpec(MeanKind.G, alpha, 1.0), a, b)
    ex = Exactness.EXACT if alpha <= 2 else Exactness.UPPER_BOUND_ONLY
    return DivergenceValue(d.value, d.reason, ex)


# -- measured divergences ---------------------------------------------------

@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        total = sum(self.elements)
        n = total.shape[0]
        if np.max(np.abs(total - np.eye(n))) > 1e-10:
            raise ValueError("POVM elements must sum to the identity")

    def probabilities(self, x) -> np.ndarray:
        return np.array([_trace(m @ x) for m in self.elements]).clip(min=0.0)


def projective_povm(u: np.ndarray) -> Povm:
    """Rank-one projections onto the columns of a unitary."""
    return Povm(tuple(np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])))


def random_povm(n: int, k: int, rng: np.random.Generator) -> Povm:
    g = [sample_psd(n, rng) for _ in range(k)]
    s = sum(g)
    w, v = eigh(s)
    s_ih = (v * w ** -0.5) @ v.conj().T
    return Povm(tuple(herm(s_ih @ x @ s_ih) for x in g))


def bloch_grid(count: int) -> np.ndarray:
    """Nearly uniform unit vectors on the sphere (Fibonacci lattice)."""
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    th = np.pi * (1 + 5 ** 0.5) * i
    return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi),
                     np.cos(phi)], axis=1)


_PAULI = (np.array([[0, 1], [1, 0]], complex),
          np.array([[0, -1j], [1j, 0]], complex),
          np.array([[1, 0], [0, -1]], complex))


def measured_divergence_lb(a, b, alpha: float, strategy: str = "pinching",
                           rng: np.random.Generator | None = None,
                           count: int = 400, k: int = 4) -> DivergenceValue:
    """Best classical divergence over a family of measurements.

    Strategies: ``pinching`` (eigenbases of ``A`` and ``B``), ``grid``
    (projective measurements along ``count`` Bloch directions, qubits
    only) and ``povm`` (``count`` random ``k``-outcome POVMs).  The
    result is a lower bound on the measured divergence.
    """
    a, b = np.asarray(a), np.asarray(b)
    n = a.shape[0]
    povms: list[Povm] = []
    if strategy == "pinching":
        povms = [projective_povm(eigh(a)[1]), projective_povm(eigh(b)[1])]
    elif strategy == "grid":
        if n != 2:
            raise ValueError("the Bloch-grid strategy needs a qubit")
        for r in bloch_grid(count):
            s = sum(c * p for c, p in zip(r, _PAULI))
            povms.append(Povm(((np.eye(2) + s) / 2, (np.eye(2) - s) / 2)))
        povms.append(projective_povm(eigh(a)[1]))
    elif strategy == "povm":
        rng = np.random.default_rng() if rng is None else rng
        povms = [random_povm(n, k, rng) for _ in range(count)]
        povms.append(projective_povm(eigh(a)[1]))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    best = -np.inf
    for m in povms:
        d = classical_renyi(m.probabilities(b), m.probabilities(a), alpha).value
        best = max(best, d)
    return DivergenceValue(float(best), Reason.IN_DOMAIN if np.isfinite(best)
                           else Reason.SUPPORT_VIOLATION, Exactness.LOWER_BOUND_ONLY)


def _kron_power(x: np.ndarray, m: int) -> np.ndarray:
    return reduce(np.kron, [x] * m)


def eigen_blocks(w: np.ndarray, rel_gap: float = 1e-10) -> list[np.ndarray]:
    """Index groups of (ascending) eigenvalues that agree to ``rel_gap``."""
    scale = max(np.max(np.abs(w)), 1e-300)
    groups, cur = [], [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= rel_gap * scale:
            cur.append(i)
        else:
            groups.append(np.array(cur))
            cur = [i]
    groups.append(np.array(cur))
    return groups


def pinched_classical(a, b, alpha: float) -> float:
    """``D^cl(E_A(B) || A)`` in a joint eigenbasis of ``A`` and ``E_A(B)``."""
    w, v = eigh(np.asarray(a))
    bt = v.conj().T @ np.asarray(b) @ v
    pa, pb = [], []
    for g in eigen_blocks(w):
        blk = herm(bt[np.ix_(g, g)])
        pb.extend(np.clip(np.linalg.eigvalsh(blk), 0, None))
        pa.extend([w[g].mean()] * len(g))
    return classical_renyi(np.array(pb), np.clip(pa, 0, None), alpha).value


def regularized_measured_estimate(a, b, alpha: float, m: int) -> float:
    """``(1/m) D^cl(E_{A^m}(B^m) || A^m)`` with ``m``-fold tensor powers."""
    a, b = np.asarray(a), np.asarray(b)
    if m < 1 or a.shape[0] ** m > 16:
        raise ValueError(f"m={m} exceeds the tensor dimension cap of 16")
    return pinched_classical(_kron_power(a, m), _kron_power(b, m), alpha) / m


def umegaki_relative_entropy(x, a) -> float:
    """``Tr X (log X - log A)``; ``+inf`` when ``s(X)`` is not inside ``s(A)``."""
    x, a = np.asarray(x), np.asarray(a)
    if not bool(dominates(a, x)):
        return np.inf
    return _trace(x @ (flog(x) - flog(a)))


# -- checks -----------------------------------------------------------------

@dataclass(frozen=True)
class VariationalReport:
    trace_le: float
    objective_at_le: float
    worst_perturbation_gain: float
    perturbations: int

    @property
    def attained(self) -> bool:
        return abs(self.objective_at_le - self.trace_le) <= 1e-8 * max(1.0, self.trace_le)

    @property
    def dominates(self) -> bool:
        return self.worst_perturbation_gain <= 1e-8 * max(1.0, self.trace_le)


def le_objective(x, a, b, alpha: float) -> float:
    """``Tr X - (1-alpha) D(X||A) - alpha D(X||B)``."""
    return (_trace(x) - (1 - alpha) * umegaki_relative_entropy(x, a)
            - alpha * umegaki_relative_entropy(x, b))


def le_variational_check(a, b, alpha: float, count: int = 100,
                         eps: float = 1e-2,
                         rng: np.random.Generator | None = None) -> VariationalReport:
    """Evaluate the Gibbs-type variational formula for ``Tr LE_alpha``.

    The objective is maximised at ``X* = LE_alpha(A, B)``; random Hermitian
    directions ``Delta`` (scaled to keep ``X* + eps Delta`` positive) must
    not increase it.
    """
    rng = np.random.default_rng() if rng is None else rng
    a, b = np.asarray(a), np.asarray(b)
    x = mean_value(MeanKind.LE, alpha, 1.0, a, b)
    tle = _trace(x)
    f0 = le_objective(x, a, b, alpha)
    lo = np.linalg.eigvalsh(x)[0]
    n = x.shape[0]
    worst = -np.inf
    for _ in range(count):
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        d = herm(z)
        d *= min(1.0, 0.5 * lo / eps) / np.linalg.norm(d, 2)
        worst = max(worst, le_objective(x + eps * d, a, b, alpha) - f0)
    return VariationalReport(tle, f0, float(worst), count)


@dataclass(frozen=True)
class SandwichReport:
    trace_g: float
    trace_m: float
    trace_r: float
    lower_holds: bool
    upper_holds: bool


def sandwich_check(spec: MeanSpec, a, b, tol: float = 1e-9) -> SandwichReport:
    """Position of ``Tr M`` between ``Tr G_{alpha,1}`` and ``Tr R_{alpha,1/alpha}``.

    For ``alpha < 1`` the expected order is ``Tr G <= Tr M <= Tr R``; for
    ``alpha > 1`` it is reversed.
    """
    a, b = np.asarray(a), np.asarray(b)
    al = spec.alpha
    tg = _trace(mean_value(MeanKind.G, al, 1.0, a, b))
    tm = _trace(mean_value(spec.kind, al, spec.p, a, b))
    tr = _trace(mean_value(MeanKind.R, al, 1.0 / al, a, b))
    s = tol * max(1.0, abs(tm))
    if al < 1:
        return SandwichReport(tg, tm, tr, tg <= tm + s, tm <= tr + s)
    return SandwichReport(tg, tm, tr, tm <= tg + s, tr <= tm + s)


def tensor(*xs) -> np.ndarray:
    return reduce(np.kron, xs)


def all_orderings(alpha: float, a, b, zs=(0.7, 1.0), measured="pinching",
                  rng=None) -> dict[str, float]:
    """Every divergence of the ordering chain on one pair."""
    out = {"measured": measured_divergence_lb(a, b, alpha, measured, rng).value,
           "petz": petz(a, b, alpha).value,
           "sandwiched": sandwiched(a, b, alpha).value,
           "maximal": maximal_divergence(a, b, alpha).value}
    for z in itertools.chain(zs, [alpha]):
        out[f"alpha_z[{z:g}]"] = alpha_z(a, b, alpha, z).value
    return out
