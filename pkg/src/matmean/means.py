"""Two-parameter matrix means of a pair of PSD matrices.

The batched workhorse is :func:`mean_value`, which evaluates one mean
kind over stacks of pairs with per-pair ``alpha`` and ``p``.  The typed
entry point :func:`compute_mean` adds domain checks and the
regularization fallback for singular inputs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .spectral import (PsdMatrix, dominates, fexp, flog, fpow, fsupport,
                       herm, support_intersection)

DEFAULT_EPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
DEFAULT_P_SEQUENCE = tuple(2.0 ** -k for k in range(11))


class MeanKind(str, enum.Enum):
    R = "R"
    G = "G"
    SG = "SG"
    SGT = "SGt"
    LE = "LE"
    ARITH = "Arith"
    HARM = "Harm"

    @classmethod
    def parse(cls, name) -> "MeanKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip()
        aliases = {"sgtilde": "SGt", "sg~": "SGt", "sgt": "SGt",
                   "arithmetic": "Arith", "harmonic": "Harm",
                   "a": "Arith", "h": "Harm"}
        key = aliases.get(key.lower(), key)
        for k in cls:
            if k.value.lower() == key.lower():
                return k
        raise ValueError(f"unknown mean kind {name!r}")


QUASI_GEOMETRIC = (MeanKind.R, MeanKind.G, MeanKind.SG, MeanKind.SGT,
                   MeanKind.LE)


class DomainError(ValueError):
    pass


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class MeanSpec:
    kind: MeanKind
    alpha: float
    p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MeanKind.parse(self.kind))
        a, p = float(self.alpha), float(self.p)
        if not np.isfinite(a) or a <= 0 or a == 1.0:
            raise ParameterError(f"alpha must lie in (0,1)∪(1,∞), got {a}")
        if not np.isfinite(p) or p <= 0:
            raise ParameterError(f"p must be positive, got {p}")
        if self.kind in (MeanKind.ARITH, MeanKind.HARM) and a > 1:
            raise ParameterError(
                f"{self.kind.value} is only defined for 0 < alpha < 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "p", p)

    def label(self) -> str:
        if self.kind is MeanKind.LE:
            return f"LE[a={self.alpha:g}]"
        return f"{self.kind.value}[a={self.alpha:g},p={self.p:g}]"


@dataclass(frozen=True)
class MeanResult:
    spec: MeanSpec
    value: PsdMatrix
    domain_ok: bool
    regularization_used: tuple[float, ...] | None = None
    successive_differences: tuple[float, ...] = field(default=())


def _col(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x.reshape(x.shape + (1, 1)) if x.ndim else x


def sharp(x: np.ndarray, y: np.ndarray, t) -> np.ndarray:
    """Weighted geometric mean ``x #_t y`` via generalized inverses."""
    t = np.asarray(t, dtype=float)
    xh = fpow(x, 0.5)
    xih = fpow(x, -0.5)
    return herm(xh @ fpow(herm(xih @ y @ xih), t) @ xh)


def _r(a, b, al, p):
    ea = fpow(a, (1 - al) * p / 2)
    return fpow(herm(ea @ fpow(b, al * p) @ ea), 1 / p)


def _g(a, b, al, p):
    return fpow(sharp(fpow(a, p), fpow(b, p), al), 1 / p)


def _sg(a, b, al, p):
    x, y = fpow(a, p), fpow(b, p)
    c = fpow(sharp(fpow(x, -1.0), y, 0.5), al)
    return fpow(herm(c @ x @ c), 1 / p)


def _sgt(a, b, al, p):
    x, y = fpow(a, p), fpow(b, p)
    c = fpow(sharp(fpow(x, -1.0), y, al), 0.5)
    return fpow(herm(c @ fpow(x, 2 * (1 - al)) @ c), 1 / p)


def _le(a, b, al, p=None):
    al = _col(al)
    p0 = support_intersection(fsupport(a), fsupport(b))
    z = herm(p0 @ ((1 - al) * flog(a) + al * flog(b)) @ p0)
    return herm(p0 @ fexp(z) @ p0)


def _arith(a, b, al, p):
    al_ = _col(al)
    return fpow(herm((1 - al_) * fpow(a, p) + al_ * fpow(b, p)), 1 / p)


def _harm(a, b, al, p):
    al_ = _col(al)
    s = herm((1 - al_) * fpow(a, -p) + al_ * fpow(b, -p))
    return fpow(s, -1 / p)


_IMPL = {MeanKind.R: _r, MeanKind.G: _g, MeanKind.SG: _sg,
         MeanKind.SGT: _sgt, MeanKind.LE: _le, MeanKind.ARITH: _arith,
         MeanKind.HARM: _harm}


def mean_value(kind, alpha, p, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Evaluate a mean over stacks of pairs without domain checks.

    ``alpha`` and ``p`` are scalars or arrays matching the batch shape.
    Inputs outside the domain give the generalized-inverse formula value.
    """
    kind = MeanKind.parse(kind)
    return _IMPL[kind](np.asarray(a), np.asarray(b), np.asarray(alpha, float),
                       np.asarray(p, float))


def needs_domination(spec: MeanSpec) -> bool:
    """Whether the mean requires ``s(A) >= s(B)``."""
    return spec.alpha > 1 or spec.kind in (MeanKind.SG, MeanKind.SGT)


def _regular_ok(spec: MeanSpec, a, b) -> bool:
    """Whether the direct generalized-inverse formula is valid."""
    if spec.kind in (MeanKind.R, MeanKind.LE):
        return True
    full = (np.linalg.eigvalsh(a)[0] > 1e-12 * np.linalg.eigvalsh(a)[-1]
            and np.linalg.eigvalsh(b)[0] > 1e-12 * np.linalg.eigvalsh(b)[-1])
    if spec.kind in (MeanKind.ARITH, MeanKind.HARM):
        return spec.kind is MeanKind.ARITH or full
    return full or bool(dominates(a, b))


def compute_mean(spec: MeanSpec, a, b) -> MeanResult:
    """Evaluate ``spec`` on a single pair with domain handling.

    Raises
    ------
    DomainError
        If the mean needs ``s(A) >= s(B)`` and the pair violates it.
    """
    a = np.asarray(PsdMatrix(np.asarray(a)).data)
    b = np.asarray(PsdMatrix(np.asarray(b)).data)
    if a.shape != b.shape:
        raise ValueError("A and B must have the same shape")
    if needs_domination(spec) and not bool(dominates(a, b)):
        raise DomainError(
            f"{spec.label()} requires the support of A to contain that of B")
    if not _regular_ok(spec, a, b):
        return epsilon_limit(spec, a, b)
    val = mean_value(spec.kind, spec.alpha, spec.p, a, b)
    return MeanResult(spec, PsdMatrix(val), True)


def epsilon_limit(spec: MeanSpec, a, b,
                  eps_sequence=DEFAULT_EPS) -> MeanResult:
    """Value of the mean at ``(A + eps I, B + eps I)`` as ``eps`` shrinks.

    The returned value is the last (smallest-eps) evaluation; the
    successive Frobenius differences are kept for diagnostics.
    """
    a, b = np.asarray(a), np.asarray(b)
    eye = np.eye(a.shape[-1])
    eps = np.asarray(eps_sequence, float)
    stack_a = a[None] + eps[:, None, None] * eye
    stack_b = b[None] + eps[:, None, None] * eye
    vals = mean_value(spec.kind, spec.alpha, spec.p, stack_a, stack_b)
    diffs = np.linalg.norm(np.diff(vals, axis=0), axis=(-2, -1))
    return MeanResult(spec, PsdMatrix(vals[-1]), True,
                      tuple(float(e) for e in eps),
                      tuple(float(d) for d in diffs))


def weighted_geometric(a, b, alpha: float) -> PsdMatrix:
    """``A #_alpha B``; the regularized limit when supports are not nested."""
    return compute_mean(MeanSpec(MeanKind.G, alpha, 1.0), a, b).value


@dataclass(frozen=True)
class LieTrotterReport:
    kind: MeanKind
    alpha: float
    p_values: tuple[float, ...]
    distances: tuple[float, ...]

    @property
    def final_distance(self) -> float:
        return self.distances[-1]

    def decreasing_tail(self, steps: int = 5) -> bool:
        tail = np.asarray(self.distances[-(steps + 1):])
        return bool(np.all(np.diff(tail) <= 0))


def lie_trotter_probe(kind, alpha: float, a, b,
                      p_sequence=DEFAULT_P_SEQUENCE) -> LieTrotterReport:
    """Operator-norm distance from ``M_{alpha,p}`` to ``LE_alpha`` along ``p``."""
    kind = MeanKind.parse(kind)
    a, b = np.asarray(a), np.asarray(b)
    le = mean_value(MeanKind.LE, alpha, 1.0, a, b)
    ps = np.asarray(p_sequence, float)
    vals = mean_value(kind, alpha, ps, np.broadcast_to(a, ps.shape + a.shape),
                      np.broadcast_to(b, ps.shape + b.shape))
    d = np.linalg.norm(vals - le, ord=2, axis=(-2, -1))
    return LieTrotterReport(kind, float(alpha), tuple(map(float, ps)),
                            tuple(map(float, d)))


def log_det_defect(kind, alpha, p, a, b) -> np.ndarray:
    """``log det M - ((1-alpha) log det A + alpha log det B)`` for full-rank pairs."""
    m = mean_value(kind, alpha, p, a, b)
    ld = lambda x: np.linalg.slogdet(x)[1]
    al = np.asarray(alpha, float)
    return ld(m) - ((1 - al) * ld(np.asarray(a)) + al * ld(np.asarray(b)))
