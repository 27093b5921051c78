"""Spectral orders: Loewner, eigenvalue-wise, weak log- and log-majorization."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spectral import eigvals_desc, herm, loewner_le

MAJ_TOL = 1e-9
ZERO_CUT = 1e-12


class Relation(str, enum.Enum):
    LOEWNER = "loewner"
    EIGEN = "eigen"
    WEAK_LOG = "wlog"
    LOG = "log"


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    BOUNDARY = "boundary"
    FAILS = "fails"


@dataclass(frozen=True)
class MajorizationVerdict:
    """Outcome of ``X ≺ Y`` for one relation.

    ``margin`` is the smallest slack in the log domain (negative when the
    relation fails); ``partial_gaps[k-1]`` is
    ``sum_{i<=k} log l_i(Y) - sum_{i<=k} log l_i(X)``.
    """

    relation: Relation
    outcome: Outcome
    margin: float
    partial_gaps: tuple[float, ...]

    @property
    def holds(self) -> bool:
        return self.outcome is not Outcome.FAILS


def log_eigs(w: np.ndarray, cut: float = ZERO_CUT) -> np.ndarray:
    """Logs of descending eigenvalues, with ``-inf`` below the relative cut."""
    top = np.maximum(w[..., :1], 0.0)
    zero = w <= cut * top
    return np.where(zero, -np.inf, np.log(np.where(zero, 1.0, w)))


def partial_log_gaps(lx: np.ndarray, ly: np.ndarray) -> np.ndarray:
    """Cumulative log-product gaps ``Y - X``, treating ``-inf`` ties as zero."""
    cx = np.cumsum(lx, axis=-1)
    cy = np.cumsum(ly, axis=-1)
    both = np.isneginf(cx) & np.isneginf(cy)
    with np.errstate(invalid="ignore"):
        g = cy - cx
    return np.where(both, 0.0, g)


def log_margin(wx: np.ndarray, wy: np.ndarray, weak: bool = False) -> np.ndarray:
    """Batched slack of ``X ≺_log Y`` (or ``≺_wlog``) from descending spectra.

    For the log order the determinant gap enters as ``-|gap|``.
    """
    g = partial_log_gaps(log_eigs(wx), log_eigs(wy))
    if weak:
        return np.min(g, axis=-1)
    head = np.min(g[..., :-1], axis=-1) if g.shape[-1] > 1 else np.inf
    return np.minimum(head, -np.abs(g[..., -1]))


def _outcome(margin: float, tol: float) -> Outcome:
    if margin > tol:
        return Outcome.HOLDS
    if margin >= -tol:
        return Outcome.BOUNDARY
    return Outcome.FAILS


def _verdict(rel, x, y, tol) -> MajorizationVerdict:
    wx, wy = eigvals_desc(np.asarray(x)), eigvals_desc(np.asarray(y))
    if wx.shape != wy.shape:
        raise ValueError("X and Y must have the same dimension")
    g = partial_log_gaps(log_eigs(wx), log_eigs(wy))
    if rel is Relation.WEAK_LOG:
        m = float(np.min(g))
    elif abs(g[-1]) > tol:
        m = -float(abs(g[-1]))
    else:
        # equal determinants: the slack lives in the leading partial products
        m = float(np.min(g[:-1])) if len(g) > 1 else 0.0
    return MajorizationVerdict(rel, _outcome(m, tol), m, tuple(map(float, g)))


def weak_log_majorize(x, y, tol: float = MAJ_TOL) -> MajorizationVerdict:
    """``X ≺_wlog Y``: partial products of eigenvalues of ``X`` are dominated."""
    return _verdict(Relation.WEAK_LOG, x, y, tol)


def log_majorize(x, y, tol: float = MAJ_TOL) -> MajorizationVerdict:
    """``X ≺_log Y``: weak log-majorization plus equal determinants."""
    return _verdict(Relation.LOG, x, y, tol)


def eigen_le(x, y, tol: float = 1e-10) -> bool:
    """``X ≤_λ Y``: every eigenvalue of ``X`` below its counterpart in ``Y``."""
    wx, wy = eigvals_desc(np.asarray(x)), eigvals_desc(np.asarray(y))
    scale = 1.0 + np.max(np.abs(wy))
    return bool(np.all(wx <= wy + tol * scale))


def compare(rel, x, y, tol: float = MAJ_TOL):
    rel = Relation(rel)
    if rel is Relation.LOEWNER:
        return loewner_le(x, y)
    if rel is Relation.EIGEN:
        return eigen_le(x, y)
    return _verdict(rel, x, y, tol)


def schatten_norm(x, s: float) -> float:
    """Schatten ``s``-norm for ``s >= 1`` or ``s = inf``."""
    if not (s == np.inf or s >= 1):
        raise ValueError(f"Schatten index must be >= 1 or inf, got {s}")
    sv = np.linalg.svd(np.asarray(x), compute_uv=False)
    if s == np.inf:
        return float(sv[0])
    return float(np.sum(sv ** s) ** (1.0 / s))


def commutator_norm(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a @ b - b @ a))
