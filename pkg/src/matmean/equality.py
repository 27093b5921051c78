"""Equality cases of the norm inequalities and the fourth-order trace expansion.

For Hermitian ``H, K`` the function ``t -> Tr(e^{tK} #_alpha e^{tH})``
agrees with ``Tr exp(t(alpha H + (1-alpha) K))`` up to third order; the
fourth-order gap is proportional to ``||[H, K]||_F^2``, which is how
equality in the trace forces commutation.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from .majorization import commutator_norm, schatten_norm
from .means import MeanKind, mean_value, sharp
from .spectral import fexp


@dataclass(frozen=True)
class TaylorCoefficients:
    """Matrices ``X1..X4``, ``Y1..Y4`` and the trace coefficients ``z1..z4``."""

    X: tuple[np.ndarray, ...]
    Y: tuple[np.ndarray, ...]
    z: tuple[float, float, float, float]
    z4_closed: float

    def to_dict(self) -> dict:
        return {"z": list(self.z), "z4_closed_form": self.z4_closed}


def _tr(m) -> float:
    return float(np.real(np.trace(m)))


def taylor_coefficients(h, k, alpha: float) -> TaylorCoefficients:
    """Coefficients of ``Tr(e^{tK} #_alpha e^{tH})`` up to ``t^4``.

    ``X_i`` are the coefficients of ``e^{-tK/2} e^{tH} e^{-tK/2}``, ``Y_i``
    those of its ``alpha``-th power, and ``z_i`` those of the trace after
    multiplying by ``e^{tK}``.
    """
    H, K = np.asarray(h), np.asarray(k)
    a = float(alpha)
    H2, K2 = H @ H, K @ K
    X1 = H - K
    X2 = X1 @ X1 / 2
    X3 = (H2 @ H / 6 - (H2 @ K + K @ H2) / 4
          + (H @ K2 + 2 * K @ H @ K + K2 @ H) / 8 - K2 @ K / 6)
    X4 = (H2 @ H2 / 24 - (H2 @ H @ K + K @ H2 @ H) / 12
          + (H2 @ K2 + 2 * K @ H2 @ K + K2 @ H2) / 16
          - (H @ K2 @ K + 3 * K @ H @ K2 + 3 * K2 @ H @ K + K2 @ K @ H) / 48
          + K2 @ K2 / 24)
    c2 = a * (a - 1) / 2
    c3 = a * (a - 1) * (a - 2) / 6
    c4 = a * (a - 1) * (a - 2) * (a - 3) / 24
    Y1 = a * X1
    Y2 = a * X2 + c2 * X1 @ X1
    Y3 = a * X3 + c2 * (X1 @ X2 + X2 @ X1) + c3 * X1 @ X1 @ X1
    Y4 = (a * X4 + c2 * (X1 @ X3 + X2 @ X2 + X3 @ X1)
          + c3 * (X1 @ X1 @ X2 + X1 @ X2 @ X1 + X2 @ X1 @ X1)
          + c4 * X1 @ X1 @ X1 @ X1)
    z1 = _tr(Y1 + K)
    z2 = _tr(Y2 + Y1 @ K + K2 / 2)
    z3 = _tr(Y3 + Y2 @ K + Y1 @ K2 / 2 + K2 @ K / 6)
    z4 = _tr(Y4 + Y3 @ K + Y2 @ K2 / 2 + Y1 @ K2 @ K / 6 + K2 @ K2 / 24)
    z4c = _tr(a ** 4 * H2 @ H2 + 4 * a ** 3 * (1 - a) * H2 @ H @ K
              + 4 * a * (a - 1) * (a * a - a + 1) * H2 @ K2
              + 2 * a * (a - 1) * (a * a - a - 2) * H @ K @ H @ K
              + 4 * a * (1 - a) ** 3 * H @ K2 @ K + (1 - a) ** 4 * K2 @ K2) / 24
    return TaylorCoefficients((X1, X2, X3, X4), (Y1, Y2, Y3, Y4),
                              (z1, z2, z3, z4), z4c)


def trace_geometric(h, k, alpha: float, t: float) -> float:
    """``Tr(e^{tK} #_alpha e^{tH})``, the function the ``z_i`` expand."""
    return _tr(sharp(fexp(t * np.asarray(k)), fexp(t * np.asarray(h)), alpha))


def fd_taylor(f: Callable[[float], float], order: int = 4, h: float = 2e-2,
              points: int = 9) -> np.ndarray:
    """Taylor coefficients ``f^(i)(0)/i!`` for ``i <= order`` by polynomial
    interpolation on a symmetric stencil of ``points`` nodes."""
    m = points // 2
    ts = h * np.arange(-m, m + 1)
    vals = np.array([f(t) for t in ts])
    coef = np.linalg.solve(np.vander(ts, points, increasing=True), vals)
    return coef[:order + 1]


def commutation_defect(h, k) -> float:
    """``||HK - KH||_F``."""
    return commutator_norm(h, k)


def z4_gap(h, k, alpha: float) -> float:
    """``z4 - Tr(alpha H + (1-alpha) K)^4 / 24`` from the expansion itself."""
    tc = taylor_coefficients(h, k, alpha)
    L = alpha * np.asarray(h) + (1 - alpha) * np.asarray(k)
    return tc.z[3] - _tr(np.linalg.matrix_power(L, 4)) / 24


def z4_gap_commutator_form(h, k, alpha: float) -> float:
    """Closed form ``alpha(alpha-1)/12 * ||[H, K]||_F^2`` of :func:`z4_gap`."""
    return alpha * (alpha - 1) / 12 * commutation_defect(h, k) ** 2


# -- equality probes --------------------------------------------------------

@dataclass(frozen=True)
class EqualityPair:
    """A pair ``(M_{alpha,p}, N_{alpha,q})`` with ``M ≺_log N`` on a region."""

    id: str
    lhs: MeanKind
    rhs: MeanKind
    region: Callable[[float, float, float], bool]
    text: str


def _r41(a, p, q):
    return p != q


def _r42(a, p, q):
    r = p / q
    return a < 1 or (a > 1 and (r < min(a / 2, a - 1) or r > max(a / 2, a - 1)))


def _r43(a, p, q):
    r = p / q
    if a < 1:
        return r > max(a, 1 - a) or r < min(a, 1 - a)
    return r < a


def _r44(a, p, q):
    r = p / q
    return (a < 1 and r < a) or (a <= 0.5 and q < p) or (a > 1 and r > a)


def _r46(a, p, q):
    return a <= 2 and p != q


def _r47(a, p, q):
    r = p / q
    return a < 1 or (1 < a <= 2 and r < max(2.0, a / (a - 1)))


def _r48(a, p, q):
    return a <= 0.5 or (1 < a <= 2 and q / p < min(0.5, (a - 1) / a))


EQUALITY_PAIRS = [
    EqualityPair("4.1", MeanKind.R, MeanKind.R, _r41, "p != q"),
    EqualityPair("4.2", MeanKind.G, MeanKind.R, _r42,
                 "a<1, or a>1 with p/q outside [min(a/2,a-1), max(a/2,a-1)]"),
    EqualityPair("4.3", MeanKind.SG, MeanKind.R, _r43,
                 "a<1 with p/q outside [min(a,1-a), max(a,1-a)], or a>1 with p/q<a"),
    EqualityPair("4.4", MeanKind.SGT, MeanKind.R, _r44,
                 "a<1 with p/q<a, a<=1/2 with q<p, or a>1 with p/q>a"),
    EqualityPair("4.5", MeanKind.LE, MeanKind.R, lambda a, p, q: True, "all"),
    EqualityPair("4.6", MeanKind.G, MeanKind.G, _r46, "a<=2, p != q"),
    EqualityPair("4.7", MeanKind.SG, MeanKind.G, _r47,
                 "a<1, or 1<a<=2 with p/q<max(2,a/(a-1))"),
    EqualityPair("4.8", MeanKind.SGT, MeanKind.G, _r48,
                 "a<=1/2, or 1<a<=2 with q/p<min(1/2,(a-1)/a)"),
    EqualityPair("4.9", MeanKind.LE, MeanKind.G,
                 lambda a, p, q: a <= 2, "a<=2"),
]


def equality_pair(pid: str) -> EqualityPair:
    key = pid.strip("()")
    for e in EQUALITY_PAIRS:
        if e.id == key:
            return e
    raise KeyError(f"unknown equality pair {pid!r}")


@dataclass(frozen=True)
class EqualityProbe:
    pair: str
    gap: float
    relative_gap: float
    commutator_norm: float


def norm_equality_probe(pid: str, alpha: float, p: float, q: float, a, b,
                        s: float = 1.0) -> EqualityProbe:
    """Difference of Schatten norms across a pair whose norm equality forces commutation.

    ``gap = |N_{alpha,q}|_s - |M_{alpha,p}|_s``.  Equality should force
    ``AB = BA``; for ``LE`` the exponent is ignored.

    Raises
    ------
    ValueError
        If the parameters lie outside the pair's region, or ``s`` is not a
        strictly increasing Schatten index.
    """
    e = equality_pair(pid)
    if not e.region(alpha, p, q):
        raise ValueError(f"(a={alpha}, p={p}, q={q}) is outside region "
                         f"({e.id}): {e.text}")
    if not (1 <= s < np.inf):
        raise ValueError("Schatten index must be finite and >= 1")
    m = mean_value(e.lhs, alpha, p, a, b)
    n = mean_value(e.rhs, alpha, q, a, b)
    nm, nn = schatten_norm(m, s), schatten_norm(n, s)
    gap = nn - nm
    return EqualityProbe(e.id, float(gap), float(abs(gap) / max(nn, nm)),
                         commutator_norm(a, b))


def trace_monotone_in_p(alpha: float, a, b, ps) -> np.ndarray:
    """``Tr G_{alpha,p}(A, B)`` along ``ps`` (decreasing in ``p`` for ``alpha<1``)."""
    ps = np.asarray(ps, float)
    vals = mean_value(MeanKind.G, alpha, ps, np.broadcast_to(a, ps.shape + np.shape(a)),
                      np.broadcast_to(b, ps.shape + np.shape(b)))
    return np.real(np.trace(vals, axis1=-2, axis2=-1))


def taylor_order_check(h, k, alpha: float, h_step: float = 2e-2):
    """Finite-difference coefficients next to the closed-form ``z_i``."""
    fd = fd_taylor(lambda t: trace_geometric(h, k, alpha, t), h=h_step)
    tc = taylor_coefficients(h, k, alpha)
    return fd[1:], np.asarray(tc.z)


def factorial_scaled_traces(l, order: int = 4):
    """``Tr L^i / i!`` for ``i = 1..order``."""
    return [_tr(np.linalg.matrix_power(l, i)) / factorial(i)
            for i in range(1, order + 1)]
