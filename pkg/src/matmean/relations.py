"""Catalog of log-majorization relations between the means, and its checkers.

Every claim compares ``M_{alpha,u} ≺_log N_{alpha,v}`` where ``u`` and
``v`` are each one of the two exponents ``p`` and ``q``; the admissible
parameter set is described by an alpha interval plus, for each alpha, a
union of intervals for the ratio ``p/q``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .highprec import log_margin_mp
from .majorization import MAJ_TOL, log_margin
from .means import QUASI_GEOMETRIC, MeanKind, mean_value
from .spectral import eigvals_desc, sample_psd

INF = math.inf
ALPHA_BOX = ((0.05, 0.95), (1.05, 3.0))
P_BOX = (0.1, 4.0)
WITNESS_MIN = 1e-8


class Assertion(str, enum.Enum):
    HOLDS = "HoldsForAllPairs"
    COUNTEREXAMPLE = "CounterexampleExists"


class Domain(str, enum.Enum):
    ALL_PSD = "AllPsd"
    DOMINATED = "DominatedPsd"
    PD2 = "PositiveDefinite2x2"


class Status(str, enum.Enum):
    CONFIRMED = "Confirmed"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


RatioSet = Callable[[float], list]


@dataclass(frozen=True)
class ClaimRecord:
    """One relation between two means.

    ``ratio(alpha)`` returns the admissible ``p/q`` intervals (empty list
    when the alpha value is outside the claim).
    """

    id: str
    lhs: MeanKind
    lhs_exp: str
    rhs: MeanKind
    rhs_exp: str
    alpha_range: tuple[float, float]
    ratio: RatioSet = field(compare=False, repr=False)
    predicate: str
    assertion: Assertion
    domain: Domain = Domain.ALL_PSD
    alpha_closed: tuple[bool, bool] = (False, False)

    def alpha_ok(self, a: float) -> bool:
        lo, hi = self.alpha_range
        lo_ok = a >= lo if self.alpha_closed[0] else a > lo
        hi_ok = a <= hi if self.alpha_closed[1] else a < hi
        return lo_ok and hi_ok and a != 1.0

    def applies(self, a: float, p: float, q: float, rel: float = 1e-12) -> bool:
        if not self.alpha_ok(a):
            return False
        r = p / q
        return any(lo * (1 - rel) <= r <= hi * (1 + rel)
                   for lo, hi in self.ratio(a))

    def exponents(self, p: float, q: float) -> tuple[float, float]:
        pick = {"p": p, "q": q}
        return pick[self.lhs_exp], pick[self.rhs_exp]

    def describe(self) -> str:
        l = self.lhs.value if self.lhs is MeanKind.LE else f"{self.lhs.value}_{self.lhs_exp}"
        r = self.rhs.value if self.rhs is MeanKind.LE else f"{self.rhs.value}_{self.rhs_exp}"
        sym = "≺" if self.assertion is Assertion.HOLDS else "⊀(some pair)"
        return f"{l} {sym} {r}  [{self.predicate}]"

    def to_dict(self) -> dict:
        return {"id": self.id, "relation": self.describe(),
                "alpha_range": list(self.alpha_range),
                "predicate": self.predicate,
                "assertion": self.assertion.value,
                "domain": self.domain.value}


# -- catalog ----------------------------------------------------------------

def _all(a):
    return [(0.0, INF)]


def _le(f):
    return lambda a: [(0.0, f(a))]


def _ge(f):
    return lambda a: [(f(a), INF)]


def _gt_or_lt(lo_f, hi_f):
    """Ratios strictly outside ``[lo_f(a), hi_f(a)]``: a union of two rays."""
    return lambda a: [(0.0, lo_f(a)), (hi_f(a), INF)]


H, C = Assertion.HOLDS, Assertion.COUNTEREXAMPLE
R_, G_, SG_, SGT_, LE_ = (MeanKind.R, MeanKind.G, MeanKind.SG, MeanKind.SGT,
                          MeanKind.LE)
LOW = (0.0, 1.0)
HIGH = (1.0, INF)
DOM = Domain.DOMINATED
PD2 = Domain.PD2


def _c(id, lhs, le, rhs, re, arange, ratio, pred, asr, dom=Domain.ALL_PSD,
       closed=(False, False)):
    return ClaimRecord(id, lhs, le, rhs, re, arange, ratio, pred, asr, dom,
                       closed)


def builtin_catalog() -> list[ClaimRecord]:
    """All relations, sufficient conditions and necessity counterexamples.

    ``:nec`` records encode the converse direction of an if-and-only-if
    statement, or a stand-alone necessary condition, as the existence of
    a counterexample whenever the condition is violated.
    """
    mn = min
    mx = max
    cat = [
        # Renyi-type and geometric families among themselves
        _c("Thm3.1a", R_, "p", R_, "q", (0, INF), _le(lambda a: 1.0), "p<=q", H),
        _c("Thm3.1b", G_, "q", G_, "p", LOW, _le(lambda a: 1.0), "p<=q", H),
        _c("Thm3.1c", G_, "p", G_, "q", (1, 2), _le(lambda a: 1.0), "p<=q", H,
           DOM, (False, True)),
        _c("Thm3.1d", G_, "p", G_, "q", (2, INF),
           _le(lambda a: a / (2 * (a - 1))), "p/q<=a/(2(a-1))", H, DOM,
           (True, False)),
        _c("Thm3.1e", G_, "p", R_, "q", (0, INF),
           lambda a: _all(a) if a < 1 else [(0.0, mn(a / 2, a - 1))],
           "a<1, or a>1 and p/q<=min(a/2,a-1)", H),
        _c("Thm3.1f", R_, "q", G_, "p", HIGH, _ge(lambda a: mx(a / 2, a - 1)),
           "p/q>=max(a/2,a-1)", H, DOM),
        _c("Thm3.1g", R_, "q", SG_, "p", LOW, _ge(lambda a: mx(a, 1 - a)),
           "p/q>=max(a,1-a)", H, DOM),
        _c("Thm3.2.1", G_, "p", R_, "q", (0, INF),
           lambda a: _all(a) if a < 1 else [(0.0, mn(a / 2, a - 1))],
           "iff: a<1, or a>1 and p/q<=min(a/2,a-1)", H),
        _c("Thm3.2.1:nec", G_, "p", R_, "q", HIGH,
           lambda a: [(mn(a / 2, a - 1), INF)], "a>1 and p/q>min(a/2,a-1)", C,
           DOM),
        _c("Thm3.2.2", R_, "q", G_, "p", HIGH, _ge(lambda a: mx(a / 2, a - 1)),
           "iff: a>1 and p/q>=max(a/2,a-1)", H, DOM),
        _c("Thm3.2.2:nec", R_, "q", G_, "p", (0, INF),
           lambda a: _all(a) if a < 1 else [(0.0, mx(a / 2, a - 1))],
           "a<1, or a>1 and p/q<max(a/2,a-1)", C),
        # sandwiched-type means versus the Renyi-type family
        _c("Thm3.3.1", SG_, "p", R_, "q", LOW, _le(lambda a: mn(a, 1 - a)),
           "iff: p/q<=min(a,1-a)", H, DOM),
        _c("Thm3.3.1:nec", SG_, "p", R_, "q", LOW, _ge(lambda a: mn(a, 1 - a)),
           "p/q>min(a,1-a)", C, DOM),
        _c("Thm3.3.2", R_, "q", SG_, "p", LOW, _ge(lambda a: mx(a, 1 - a)),
           "iff: p/q>=max(a,1-a)", H, DOM),
        _c("Thm3.3.2:nec", R_, "q", SG_, "p", LOW, _le(lambda a: mx(a, 1 - a)),
           "p/q<max(a,1-a)", C, DOM),
        _c("Thm3.4.1", SG_, "p", R_, "q", HIGH, _le(lambda a: a), "p/q<=a", H,
           DOM),
        _c("Thm3.4.2", R_, "q", SG_, "p", HIGH, _all, "all p,q", C, DOM),
        _c("Thm3.6.1", SGT_, "p", R_, "q", LOW, _le(lambda a: a),
           "iff: p/q<=a", H, DOM),
        _c("Thm3.6.1:nec", SGT_, "p", R_, "q", LOW, _ge(lambda a: a),
           "p/q>a", C, DOM),
        _c("Thm3.6.2", R_, "q", SGT_, "p", (0, 0.5), _ge(lambda a: 1.0),
           "a<=1/2 and q<=p", H, DOM, (False, True)),
        _c("Thm3.6.3", R_, "q", SGT_, "p", LOW,
           lambda a: [(0.0, 0.5)] if a <= 0.5 else _all(a),
           "a>1/2 or p/q<1/2", C, DOM),
        _c("Thm3.7.1", SGT_, "p", R_, "q", HIGH, _all, "all p,q", C, DOM),
        _c("Thm3.7.2", R_, "q", SGT_, "p", HIGH, _ge(lambda a: a), "p/q>=a", H,
           DOM),
        _c("Thm3.7.3", R_, "q", SGT_, "p", HIGH, _le(lambda a: 0.5), "p/q<1/2",
           C, DOM),
        # monotonicity in the exponent
        _c("Prop3.10.1", SG_, "p", SG_, "q", LOW,
           _le(lambda a: mn(a / (1 - a), (1 - a) / a)),
           "p/q<=min(a/(1-a),(1-a)/a)", H, DOM),
        _c("Prop3.10.2", SGT_, "p", SGT_, "q", (0, 0.5), _le(lambda a: a),
           "a<=1/2 and p/q<=a", H, DOM, (False, True)),
        _c("Prop3.11.1", G_, "p", G_, "q", (0, INF),
           lambda a: [(0.0, 1.0)] if a < 1 else [(1.0, INF)],
           "a<1 and p<q, or a>1 and p>q", C, DOM),
        _c("Prop3.11.2", SG_, "p", SG_, "q", (0, INF),
           lambda a: [(1.0, INF)] if a < 1 else [(0.0, 1.0)],
           "a<1 and p>q, or a>1 and p<q", C, DOM),
        _c("Prop3.11.3", SGT_, "p", SGT_, "q", LOW, _ge(lambda a: 1.0),
           "a<1 and p>q", C, DOM),
        # stated for a>1 with p<q; the second-order expansion points the
        # other way, so this record is expected to stay Inconclusive
        _c("Prop3.11.3:a>1", SGT_, "p", SGT_, "q", HIGH, _le(lambda a: 1.0),
           "a>1 and p<q", C, DOM),
        # sandwiched-type means versus the geometric family
        _c("Prop3.13.1", G_, "q", SG_, "p", LOW, _all, "all p,q", H, DOM),
        _c("Prop3.13.2", G_, "q", SG_, "p", HIGH, _all, "all p,q", C, DOM),
        _c("Prop3.13.3", SG_, "p", G_, "q", HIGH,
           _le(lambda a: mn(2.0, a / (a - 1))), "p/q<=min(2,a/(a-1))", H, DOM),
        _c("Prop3.14.1", SGT_, "p", G_, "q", (0, INF), _all, "all a,p,q", C,
           DOM),
        _c("Prop3.14.2", G_, "q", SGT_, "p", (0, 0.5), _all, "a<=1/2, all p,q",
           H, DOM, (False, True)),
        _c("Prop3.14.3", G_, "q", SGT_, "p", HIGH,
           _ge(lambda a: 1.0 / mn(0.5, (a - 1) / a)),
           "q/p<=min(1/2,(a-1)/a)", H, DOM),
        _c("Prop3.15.1", SG_, "p", SGT_, "q", LOW,
           lambda a: _all(a) if a > 0.5 else [(2 * (1 - a), INF)],
           "a>1/2 or p/q>2(1-a)", C, DOM),
        _c("Prop3.15.2", SGT_, "q", SG_, "p", LOW,
           _ge(lambda a: mx(1.0, (1 - a) / a)), "p/q>=max(1,(1-a)/a)", H, DOM),
        _c("Prop3.15.2:nec", SGT_, "q", SG_, "p", LOW,
           _le(lambda a: 2 * (1 - a)), "p/q<2(1-a)", C, DOM),
        _c("Prop3.15.3", SG_, "p", SGT_, "q", HIGH, _le(lambda a: 1.0),
           "p<=q", H, DOM),
        _c("Prop3.15.4", SGT_, "q", SG_, "p", HIGH, _all, "all p,q", C, DOM),
        # log-Euclidean mean as the p -> 0 limit
        _c("Prop3.17a", LE_, "p", R_, "p", (0, INF), _all, "all p", H),
        _c("Prop3.17b", G_, "p", LE_, "p", LOW, _all, "all p", H),
        _c("Prop3.17c", LE_, "p", G_, "p", (1, 2), _all, "all p", H, DOM,
           (False, True)),
        _c("Prop3.17d", LE_, "p", SG_, "p", LOW, _all, "all p", H, DOM),
        _c("Cor3.18.1", LE_, "p", G_, "p", HIGH, _all, "all p", H, DOM),
        _c("Cor3.18.2", LE_, "p", SG_, "p", HIGH, _all, "all p", C, DOM),
        _c("Cor3.18.3", SGT_, "p", LE_, "p", LOW, _all, "all p", C, DOM),
        _c("Cor3.18.4", LE_, "p", SGT_, "p", (0, 0.5), _all, "all p", H, DOM,
           (False, True)),
        _c("Cor3.18.5", LE_, "p", SGT_, "p", HIGH, _all, "all p", H, DOM),
        _c("Thm3.19", LE_, "p", SGT_, "p", (0.5, 1), _all, "all p", C, DOM),
        # table cells not covered by a numbered statement
        _c("Table3.4:R≺LE:a<1", R_, "p", LE_, "p", LOW, _all, "all p", C),
        _c("Table3.4:R≺LE:a>1", R_, "p", LE_, "p", HIGH, _all, "all p", C, DOM),
        _c("Table3.4:G≺LE:a>1", G_, "p", LE_, "p", HIGH, _all, "all p", C, DOM),
        _c("Table3.4:LE≺G:a<1", LE_, "p", G_, "p", LOW, _all, "all p", C),
        _c("Table3.4:SG≺LE:a<1", SG_, "p", LE_, "p", LOW, _all, "all p", C,
           DOM),
        _c("Table3.4:SGt≺LE:a>1", SGT_, "p", LE_, "p", HIGH, _all, "all p", C,
           DOM),
    ]
    return cat


def claim_by_id(cid: str, catalog: Sequence[ClaimRecord] | None = None) -> ClaimRecord:
    for c in catalog or builtin_catalog():
        if c.id == cid:
            return c
    raise KeyError(f"no claim with id {cid!r}")


# Cells of the comparison table with the log-Euclidean mean.  Each cell
# lists the claims that settle it; an empty list marks an open question.
TABLE_ROWS = [
    ("R ≺ LE", {"a<1": ["Table3.4:R≺LE:a<1"], "a>1": ["Table3.4:R≺LE:a>1"]}),
    ("LE ≺ R", {"a<1": ["Prop3.17a"], "a>1": ["Prop3.17a"]}),
    ("G ≺ LE", {"a<1": ["Prop3.17b"], "a>1": ["Table3.4:G≺LE:a>1"]}),
    ("LE ≺ G", {"a<1": ["Table3.4:LE≺G:a<1"], "a>1": ["Cor3.18.1"]}),
    ("SG ≺ LE", {"a<1": ["Table3.4:SG≺LE:a<1"], "a>1": []}),
    ("LE ≺ SG", {"a<1": ["Prop3.17d"], "a>1": ["Cor3.18.2"]}),
    ("SGt ≺ LE", {"a<1": ["Cor3.18.3"], "a>1": ["Table3.4:SGt≺LE:a>1"]}),
    ("LE ≺ SGt", {"a<1": ["Cor3.18.4", "Thm3.19"], "a>1": ["Cor3.18.5"]}),
]


# -- second order behaviour on 2x2 rotations --------------------------------

def a0(x: float) -> np.ndarray:
    return np.diag([1.0, x])


def b_theta(y, theta) -> np.ndarray:
    """``Rot(theta) diag(1, y) Rot(theta)^T``, broadcasting over inputs."""
    y, theta = np.broadcast_arrays(np.asarray(y, float), np.asarray(theta, float))
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(y.shape + (2, 2))
    out[..., 0, 0] = c * c + y * s * s
    out[..., 1, 1] = s * s + y * c * c
    out[..., 0, 1] = out[..., 1, 0] = c * s * (1 - y)
    return out


def a0_stack(x) -> np.ndarray:
    x = np.asarray(x, float)
    out = np.zeros(x.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = x
    return out


def second_order_coefficient(kind, alpha: float, p: float, x: float) -> float:
    """Closed-form ``c`` in ``l_1(M(A0, B_theta)) = 1 + c theta^2 + o(theta^2)``.

    ``A0 = diag(1, x)`` and ``B_theta`` is ``diag(1, x)`` rotated by
    ``theta``, with ``0 < x < 1``.
    """
    kind = MeanKind.parse(kind)
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    a = alpha
    xp = x ** p
    if kind is MeanKind.R:
        return (-1 - xp + x ** (a * p) + x ** ((1 - a) * p)) / (p * (1 - xp))
    if kind is MeanKind.G:
        return a * (1 - a) / (2 * p) * (xp - 1 / xp)
    if kind is MeanKind.SG:
        return -2 * a * (1 - a) / p * (1 - xp) / (1 + xp)
    if kind is MeanKind.SGT:
        t1 = a * (1 - xp) / (1 + xp)
        t2 = (xp + xp * xp - x ** ((2 * a + 1) * p) - x ** (2 * (1 - a) * p)) \
            / ((1 - xp) * (1 + xp) ** 2)
        return -(t1 + t2) / p
    if kind is MeanKind.LE:
        return a * (1 - a) * math.log(x)
    raise ValueError(f"no second order formula for {kind.value}")


def numeric_second_order(kind, alpha: float, p: float, x: float,
                         theta: float = 1e-3, max_halvings: int = 40) -> float:
    """Richardson estimate of the second order coefficient.

    Uses ``(l_1(theta) - 1)/theta^2`` at ``theta`` and ``theta/2``; theta is
    halved until ``|c| theta^2`` is small enough for the expansion to be
    in its asymptotic regime.
    """
    if theta == 0:
        raise ValueError("theta must be nonzero")
    kind = MeanKind.parse(kind)

    def ratio(t):
        m = mean_value(kind, alpha, p, a0(x), b_theta(x, t))
        return (np.linalg.eigvalsh(m)[-1] - 1.0) / t ** 2

    t = abs(theta)
    est = 0.0
    for _ in range(max_halvings):
        est = (4 * ratio(t / 2) - ratio(t)) / 3
        if abs(est) * t * t < 1e-4:
            break
        t /= 2
    return float(est)


# -- sampling ---------------------------------------------------------------

def _box_alpha(lo: float, hi: float) -> list[tuple[float, float]]:
    out = []
    for blo, bhi in ALPHA_BOX:
        l, h = max(lo, blo), min(hi, bhi)
        if l < h:
            out.append((l, h))
    return out


def sample_alpha(claim: ClaimRecord, rng: np.random.Generator,
                 inset: float = 0.0) -> float:
    """Draw alpha from the claim's range clipped to the sampling box.

    ``inset`` trims that fraction of each piece at ends that are genuine
    endpoints of the claim's alpha range.
    """
    parts = _box_alpha(*claim.alpha_range)
    if not parts:
        raise ValueError(f"{claim.id}: empty alpha range in the sampling box")
    if inset:
        lo, hi = claim.alpha_range
        parts = [(l + inset * (h - l) * (l == lo), h - inset * (h - l) * (h == hi))
                 for l, h in parts]
    w = np.array([h - l for l, h in parts])
    l, h = parts[rng.choice(len(parts), p=w / w.sum())]
    # include closed endpoints now and then
    if claim.alpha_closed[1] and rng.random() < 0.1 and h == claim.alpha_range[1]:
        return float(h)
    return float(rng.uniform(l, h))


def _shrink(intervals, factor: float):
    out = []
    for lo, hi in intervals:
        lo2 = lo * factor if lo > 0 else lo
        hi2 = hi / factor if hi < INF else hi
        if lo2 < hi2:
            out.append((lo2, hi2))
    return out


def sample_params(claim: ClaimRecord, rng: np.random.Generator,
                  margin: float = 1.0, boundary_rate: float = 0.0,
                  tries: int = 200, alpha_inset: float = 0.0) -> tuple[float, float, float]:
    """Draw ``(alpha, p, q)`` inside the claim, ``p, q`` log-uniform in the box.

    ``margin > 1`` keeps ratios that factor away from finite endpoints.
    ``boundary_rate`` is the chance of landing exactly on an endpoint.
    ``alpha_inset`` is passed to :func:`sample_alpha`.
    """
    lp, hp = np.log(P_BOX[0]), np.log(P_BOX[1])
    for _ in range(tries):
        a = sample_alpha(claim, rng, alpha_inset)
        q = float(np.exp(rng.uniform(lp, hp)))
        ivs = _shrink(claim.ratio(a), margin)
        feas = [(max(lo, P_BOX[0] / q), min(hi, P_BOX[1] / q)) for lo, hi in ivs]
        feas = [(l, h) for l, h in feas if l < h]
        if not feas:
            continue
        l, h = feas[rng.integers(len(feas))]
        if boundary_rate and rng.random() < boundary_rate:
            ends = [e for e in (l, h) if e in {lo for lo, _ in ivs} | {hi for _, hi in ivs}]
            if ends:
                return a, float(ends[rng.integers(len(ends))] * q), q
        r = float(np.exp(rng.uniform(np.log(l), np.log(h))))
        return a, r * q, q
    raise ValueError(f"{claim.id}: could not sample admissible parameters")


def _safe_condition(a: float, p: float, q: float) -> float:
    """Condition number keeping the worst intermediate power below ~1e4."""
    e = 2 * max(a, 1.0) * max(p, q, 1.0) + 1
    return float(min(30.0, 1e4 ** (1.0 / e)))


def sample_pairs(n: int, conds: np.ndarray, rng: np.random.Generator,
                 singular_b: np.ndarray | None = None):
    """Batched pairs with per-pair condition numbers; ``B`` optionally rank-deficient."""
    k = len(conds)
    a = np.stack([sample_psd(n, rng, condition_target=c) for c in conds]) if k else \
        np.zeros((0, n, n))
    bs = []
    for i, c in enumerate(conds):
        rank = n - 1 if singular_b is not None and singular_b[i] else None
        bs.append(sample_psd(n, rng, rank=rank, condition_target=c))
    b = np.stack(bs) if k else np.zeros((0, n, n))
    return a, b


# -- verification -----------------------------------------------------------

@dataclass
class Witness:
    alpha: float
    p: float
    q: float
    a: np.ndarray
    b: np.ndarray
    margin: float
    source: str
    exponent_scale: float = 1.0

    def to_dict(self) -> dict:
        from .spectral import matrix_to_json
        return {"alpha": self.alpha, "p": self.p, "q": self.q,
                "margin": self.margin, "source": self.source,
                "exponent_scale": self.exponent_scale,
                "A": matrix_to_json(self.a), "B": matrix_to_json(self.b)}


@dataclass
class VerificationReport:
    claim_id: str
    status: Status
    trials: int
    violations: int
    worst_margin: float
    witness: Witness | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {"claim": self.claim_id, "status": self.status.value,
                "trials": self.trials, "violations": self.violations,
                "worst_margin": self.worst_margin,
                "witness": None if self.witness is None else self.witness.to_dict(),
                "notes": self.notes}


def pair_margins(lhs, rhs, alpha, pl, pr, a, b) -> np.ndarray:
    """Batched log-majorization slack of ``lhs ≺_log rhs``."""
    x = mean_value(lhs, alpha, pl, a, b)
    y = mean_value(rhs, alpha, pr, a, b)
    return log_margin(eigvals_desc(x), eigvals_desc(y))


def _check_holds(claim: ClaimRecord, trials: int, rng: np.random.Generator,
                 n_max: int, tol: float) -> VerificationReport:
    params = [sample_params(claim, rng, boundary_rate=0.1) for _ in range(trials)]
    dims = rng.integers(2, n_max + 1, size=trials)
    singular = rng.random(trials) < 0.15
    worst, worst_w, bad = np.inf, None, 0
    for n in np.unique(dims):
        idx = np.flatnonzero(dims == n)
        al = np.array([params[i][0] for i in idx])
        p = np.array([params[i][1] for i in idx])
        q = np.array([params[i][2] for i in idx])
        conds = np.array([_safe_condition(*params[i]) for i in idx])
        a, b = sample_pairs(int(n), conds, rng, singular[idx])
        pl = p if claim.lhs_exp == "p" else q
        pr = p if claim.rhs_exp == "p" else q
        m = pair_margins(claim.lhs, claim.rhs, al, pl, pr, a, b)
        bad += int(np.sum(m < -tol))
        j = int(np.argmin(m))
        if m[j] < worst:
            worst = float(m[j])
            worst_w = Witness(float(al[j]), float(p[j]), float(q[j]), a[j], b[j],
                              worst, "random")
    status = Status.CONFIRMED if bad == 0 else Status.REFUTED
    return VerificationReport(claim.id, status, trials, bad, worst,
                              worst_w if bad else None)


def structured_pairs(extent: float = 4.0, points: int = 17,
                     thetas=(1e-3, 1e-2, 0.1, 0.3, 0.6, 0.785, 1.2)):
    """``(A0(x), B_theta(y))`` over log grids of ``x, y`` and a few angles.

    Up to simultaneous unitary conjugation and scaling of each input this
    family covers every pair of 2x2 positive definite matrices.
    """
    g = np.logspace(-extent, extent, points)
    x, y, t = np.meshgrid(g, g, np.asarray(thetas), indexing="ij")
    x, y, t = x.ravel(), y.ravel(), t.ravel()
    return a0_stack(x), b_theta(y, t)


def _det_consistent(kind, alpha, p, a, b, tol=1e-6) -> np.ndarray:
    m = mean_value(kind, alpha, p, a, b)
    ld = lambda z: np.linalg.slogdet(z)[1]
    with np.errstate(all="ignore"):
        d = ld(m) - ((1 - alpha) * ld(a) + alpha * ld(b))
    return np.abs(d) < tol


def _confirm(lhs, lp, rhs, rp, alpha, a, b, min_margin, source, scale,
             dps: int = 50) -> Witness | None:
    hm = log_margin_mp(lhs, rhs, alpha, lp, rp, a, b, dps=dps)
    if hm < -min_margin:  # nan (breakdown) compares False
        return Witness(float(alpha), float(lp), float(rp), np.array(a, float),
                       np.array(b, float), float(hm), source,
                       exponent_scale=float(scale))
    return None


def _float_candidates(lhs, lp, rhs, rp, alpha, a, b, min_margin, verify):
    """Indices of det-consistent float violations, moderate ones first."""
    with np.errstate(all="ignore"):
        m = pair_margins(lhs, rhs, alpha, lp, rp, a, b)
    ok = np.isfinite(m) & (m < -min_margin)
    if not ok.any():
        return []
    ok &= _det_consistent(lhs, alpha, lp, a, b) & \
        _det_consistent(rhs, alpha, rp, a, b)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return []
    # extreme margins at the edge of the grid are the likeliest rounding
    # artefacts, so sample from the middle of the ranking as well
    order = idx[np.argsort(m[idx])]
    step = max(1, len(order) // (2 * verify))
    picks = list(order[len(order) // 2::step])[:verify] + list(order[:verify])
    return list(dict.fromkeys(int(j) for j in picks))


def _second_order_pairs(lhs, lp, rhs, rp, alpha, top: int = 3):
    """Pairs ``(A0(x), B_theta(x))`` where the closed-form ``theta^2``
    coefficients already predict ``l_1(lhs) > l_1(rhs)``."""
    xs = np.logspace(-12, -1e-3, 400)
    with np.errstate(all="ignore"):
        d = np.array([second_order_coefficient(lhs, alpha, lp, x)
                      - second_order_coefficient(rhs, alpha, rp, x) for x in xs])
    good = np.flatnonzero(np.isfinite(d) & (d > 0))
    if good.size == 0:
        return
    # favour the largest relative gap
    for j in good[np.argsort(-d[good])][:top]:
        for th in (0.1, 0.03, 0.01, 3e-3, 1e-3):
            yield a0(xs[j]), b_theta(xs[j], th)


_TRANSFORM_GRID = (1e-3, 1e-2, 0.1, 0.5, 2.0, 10.0, 100.0, 1e3)


def _transformed_pairs(kind, alpha, dps: int = 60):
    """Pairs in which ``kind`` at exponent one takes a simple shape.

    With ``Y = A0(x)`` and ``X = B_theta(y)`` the pair is ``A = Y`` and
    ``B`` chosen so that the inner geometric-mean factor of ``kind`` is
    ``X``; these are the coordinates in which the necessity arguments
    for the sandwiched-type and geometric means are carried out.
    """
    import mpmath as mpm

    from .highprec import _mat, mpow, msharp
    for x in _TRANSFORM_GRID:
        for y in _TRANSFORM_GRID:
            for th in (1e-2, 0.1):
                with mpm.workdps(dps):
                    Y, X = _mat(a0(x)), _mat(b_theta(y, th))
                    if kind is MeanKind.SGT:
                        B = msharp(mpow(Y, -1), X, 1 / alpha)
                    elif kind is MeanKind.SG:
                        B = X * Y * X
                    else:
                        yh = mpow(Y, 0.5)
                        B = yh * X * yh
                    b = np.array([[float(B[i, j]) for j in range(2)]
                                  for i in range(2)])
                yield a0(x), 0.5 * (b + b.T)


def find_witness(lhs, lhs_p: float, rhs, rhs_p: float, alpha: float,
                 rng: np.random.Generator, random_trials: int = 400,
                 n_max: int = 4, verify: int = 3,
                 min_margin: float = WITNESS_MIN,
                 deep: bool = True) -> Witness | None:
    """Search for a pair violating ``lhs ≺_log rhs``; confirm it in high precision.

    Stages, cheapest first: a structured 2x2 grid plus random pairs
    screened in double precision; pairs predicted by the closed-form
    second-order coefficients; and (``deep``) a scan of the coordinates
    adapted to the sandwiched-type or geometric side, evaluated directly
    at high precision.
    """
    lhs, rhs = MeanKind.parse(lhs), MeanKind.parse(rhs)
    # the order only depends on the exponent ratio: M_p(A^(1/s), B^(1/s)) is
    # M_(p/s)(A, B)^(1/s), so search with the larger exponent scaled to one
    s = max(lhs_p, rhs_p)
    lp, rp = lhs_p / s, rhs_p / s
    batches = []
    for ext, pts in ((4.0, 17), (8.0, 17)):
        a, b = structured_pairs(ext, pts)
        batches.append(("structured", a, b))
    for n in range(2, n_max + 1):
        k = max(1, random_trials // (n_max - 1))
        conds = np.exp(rng.uniform(np.log(2.0), np.log(1e3), size=k))
        a, b = sample_pairs(n, conds, rng)
        batches.append(("random", a, b))
    for source, a, b in batches:
        for j in _float_candidates(lhs, lp, rhs, rp, alpha, a, b, min_margin,
                                   verify):
            w = _confirm(lhs, lp, rhs, rp, alpha, a[j], b[j], min_margin,
                         source, s)
            if w is not None:
                return w
    quasi = set(QUASI_GEOMETRIC)
    if lhs in quasi and rhs in quasi:
        for a, b in _second_order_pairs(lhs, lp, rhs, rp, alpha):
            w = _confirm(lhs, lp, rhs, rp, alpha, a, b, min_margin,
                         "second-order", s)
            if w is not None:
                return w
    if not deep:
        return None
    for kind, kp in ((lhs, lp), (rhs, rp)):
        if kind not in (MeanKind.SGT, MeanKind.SG, MeanKind.G):
            continue
        # rescale so that this side has exponent one
        l2, r2 = lp / kp, rp / kp
        dps = int(min(200, 50 + 8 * max(l2, r2)))
        for a, b in _transformed_pairs(kind, alpha):
            w = _confirm(lhs, l2, rhs, r2, alpha, a, b, min_margin,
                         f"transformed-{kind.value}", s * kp, dps=dps)
            if w is not None:
                return w
    return None


def verify_claim(claim: ClaimRecord, trials: int = 500,
                 rng: np.random.Generator | None = None, n_max: int = 5,
                 tol: float = MAJ_TOL, param_points: int = 3) -> VerificationReport:
    """Check a claim by random sampling or by searching for a witness.

    Sufficient conditions are Confirmed when no sampled pair violates the
    relation beyond ``tol`` and Refuted otherwise.  Counterexample claims
    are Confirmed when a high-precision witness is found at every sampled
    parameter point, and Inconclusive otherwise.
    """
    rng = np.random.default_rng() if rng is None else rng
    if claim.assertion is Assertion.HOLDS:
        return _check_holds(claim, trials, rng, n_max, tol)
    found, misses, best = [], [], None
    for _ in range(param_points):
        a, p, q = sample_params(claim, rng, margin=1.3, alpha_inset=0.1)
        lp, rp = claim.exponents(p, q)
        w = find_witness(claim.lhs, lp, claim.rhs, rp, a, rng,
                         random_trials=min(trials, 400))
        if w is None:
            misses.append((a, p, q))
        else:
            found.append(w)
            if best is None or w.margin < best.margin:
                best = w
    status = Status.CONFIRMED if not misses else Status.INCONCLUSIVE
    notes = "" if not misses else "no witness at " + ", ".join(
        f"(a={a:.3g},p={p:.3g},q={q:.3g})" for a, p, q in misses)
    return VerificationReport(claim.id, status, param_points, len(found),
                              best.margin if best else 0.0, best, notes)


def counterexample_search(lhs, rhs, alpha: float, p: float, q: float,
                          rng: np.random.Generator | None = None,
                          lhs_exp: str = "p", budget: int = 400) -> Witness | None:
    """Witness against ``lhs ≺_log rhs`` where ``lhs`` uses ``lhs_exp``."""
    rng = np.random.default_rng() if rng is None else rng
    lp, rp = (p, q) if lhs_exp == "p" else (q, p)
    return find_witness(lhs, lp, rhs, rp, alpha, rng, random_trials=budget)


# -- region scans -----------------------------------------------------------

@dataclass
class RegionCell:
    alpha: float
    ratio: float
    empirical: str
    theory: str
    margin: float


def theory_verdict(lhs, rhs, lhs_exp: str, alpha: float, p: float, q: float,
                   catalog: Sequence[ClaimRecord] | None = None) -> str:
    """``holds``, ``fails`` or ``unknown`` according to the catalog."""
    lhs, rhs = MeanKind.parse(lhs), MeanKind.parse(rhs)
    rhs_exp = "q" if lhs_exp == "p" else "p"
    verdicts, necessity_only = set(), True
    for c in catalog or builtin_catalog():
        if c.lhs is not lhs or c.rhs is not rhs:
            continue
        if (lhs is not MeanKind.LE and c.lhs_exp != lhs_exp) or \
                (rhs is not MeanKind.LE and c.rhs_exp != rhs_exp):
            continue
        if c.applies(alpha, p, q):
            verdicts.add("holds" if c.assertion is Assertion.HOLDS else "fails")
            if c.assertion is Assertion.COUNTEREXAMPLE and not c.id.endswith(":nec"):
                necessity_only = False
    if len(verdicts) == 1:
        return verdicts.pop()
    if verdicts and necessity_only:
        # a closed sufficient condition meets the strict converse on its boundary
        return "holds"
    return "unknown" if not verdicts else "conflict"


def region_scan(lhs, rhs, alpha_grid, ratio_grid, lhs_exp: str = "p",
                rng: np.random.Generator | None = None, q: float = 1.0,
                budget: int = 200) -> list[RegionCell]:
    """Empirical versus catalog verdicts on an ``alpha x (p/q)`` grid."""
    rng = np.random.default_rng() if rng is None else rng
    cells = []
    for a in alpha_grid:
        for r in ratio_grid:
            p = float(r) * q
            w = counterexample_search(lhs, rhs, float(a), p, q, rng, lhs_exp,
                                      budget)
            cells.append(RegionCell(float(a), float(r),
                                    "holds" if w is None else "fails",
                                    theory_verdict(lhs, rhs, lhs_exp, float(a), p, q),
                                    0.0 if w is None else w.margin))
    return cells


def cells_agree_within_one(cells: list[RegionCell], alpha_grid, ratio_grid) -> bool:
    """Every disagreement sits next to a cell whose theory verdict differs."""
    na, nr = len(alpha_grid), len(ratio_grid)
    th = np.array([c.theory for c in cells]).reshape(na, nr)
    em = np.array([c.empirical for c in cells]).reshape(na, nr)
    for i in range(na):
        for j in range(nr):
            if th[i, j] == "unknown" or th[i, j] == em[i, j]:
                continue
            nb = [th[i, k] for k in (j - 1, j + 1) if 0 <= k < nr]
            nb += [th[k, j] for k in (i - 1, i + 1) if 0 <= k < na]
            if all(v == th[i, j] for v in nb):
                return False
    return True
