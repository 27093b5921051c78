"""Arbitrary-precision evaluation of the means with mpmath.

Used to confirm counterexample witnesses whose double-precision margins
could be produced by cancellation, and as an independent oracle in tests.
"""
from __future__ import annotations

import mpmath as mp
import numpy as np

from .means import MeanKind


def _mat(a) -> mp.matrix:
    a = np.asarray(a)
    m = mp.matrix(a.shape[0], a.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            m[i, j] = mp.mpc(float(v.real), float(v.imag)) if np.iscomplexobj(a) \
                else mp.mpf(float(v))
    return m


def _herm(m):
    return (m + m.H) / 2


def _func(m, f, cut=None):
    m = _herm(m)
    w, v = mp.eighe(m)
    n = m.rows
    top = max(abs(x) for x in w)
    cut = top * mp.mpf(10) ** (-(mp.mp.dps // 2)) if cut is None else cut
    d = mp.matrix(n, n)
    for i in range(n):
        d[i, i] = f(w[i]) if w[i] > cut else mp.mpf(0)
    return _herm(v * d * v.H)


def mpow(m, r):
    r = mp.mpf(r)
    return _func(m, lambda x: x ** r)


def mlog(m):
    return _func(m, mp.log)


def mexp(m):
    m = _herm(m)
    w, v = mp.eighe(m)
    d = mp.diag([mp.exp(x) for x in w])
    return _herm(v * d * v.H)


def msharp(x, y, t):
    xh, xih = mpow(x, 0.5), mpow(x, -0.5)
    return _herm(xh * mpow(_herm(xih * y * xih), t) * xh)


def mean_mp(kind, alpha, p, a, b, dps: int = 50):
    """Mean value at ``dps`` digits for full-rank (or dominated) inputs."""
    kind = MeanKind.parse(kind)
    with mp.workdps(dps):
        A, B = _mat(a), _mat(b)
        al, p = mp.mpf(alpha), mp.mpf(p)
        if kind is MeanKind.R:
            ea = mpow(A, (1 - al) * p / 2)
            out = mpow(_herm(ea * mpow(B, al * p) * ea), 1 / p)
        elif kind is MeanKind.G:
            out = mpow(msharp(mpow(A, p), mpow(B, p), al), 1 / p)
        elif kind is MeanKind.SG:
            x, y = mpow(A, p), mpow(B, p)
            c = mpow(msharp(mpow(x, -1), y, 0.5), al)
            out = mpow(_herm(c * x * c), 1 / p)
        elif kind is MeanKind.SGT:
            x, y = mpow(A, p), mpow(B, p)
            c = mpow(msharp(mpow(x, -1), y, al), 0.5)
            out = mpow(_herm(c * mpow(x, 2 * (1 - al)) * c), 1 / p)
        elif kind is MeanKind.LE:
            out = mexp((1 - al) * mlog(A) + al * mlog(B))
        elif kind is MeanKind.ARITH:
            out = mpow((1 - al) * mpow(A, p) + al * mpow(B, p), 1 / p)
        else:
            out = mpow((1 - al) * mpow(A, -p) + al * mpow(B, -p), -1 / p)
        return out


def eigvals_mp(m) -> list:
    w, _ = mp.eighe(_herm(m))
    return sorted(w, reverse=True)


def log_margin_mp(kind_x, kind_y, alpha, px, py, a, b, dps: int = 50,
                  weak: bool = False) -> float:
    """Log-majorization slack of ``M_x ≺ M_y`` computed at high precision.

    Returns ``nan`` when the determinant identity fails at the working
    precision, which flags a breakdown rather than a genuine violation.
    """
    head, det_gap = log_gaps_mp(kind_x, kind_y, alpha, px, py, a, b, dps)
    if not abs(det_gap) <= 1e-12:
        return float("nan")
    return head if weak else min(head, -abs(det_gap))


def log_gaps_mp(kind_x, kind_y, alpha, px, py, a, b, dps: int = 50):
    """``(min_k<n partial gap, determinant gap)`` in the log domain."""
    with mp.workdps(dps):
        wx = eigvals_mp(mean_mp(kind_x, alpha, px, a, b, dps))
        wy = eigvals_mp(mean_mp(kind_y, alpha, py, a, b, dps))
        if min(wx) <= 0 or min(wy) <= 0:
            return float("nan"), float("nan")
        cx = cy = mp.mpf(0)
        gaps = []
        for u, v in zip(wx, wy):
            cx += mp.log(u)
            cy += mp.log(v)
            gaps.append(cy - cx)
        head = min(gaps[:-1]) if len(gaps) > 1 else mp.inf
        return float(head), float(gaps[-1])
