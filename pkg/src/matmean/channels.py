"""Quantum channels and joint concavity/convexity probes for ``Tr M_{alpha,p}``."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .divergences import Povm, eigen_blocks, random_povm, sandwich_check
from .means import MeanKind, MeanSpec, mean_value
from .spectral import DimensionError, dagger, dominates, eigh, haar_unitary, herm, sample_psd

CVX_TOL = 1e-9
TP_TOL = 1e-10
REGULARIZE_EPS = 1e-10


class ChannelKind(str, enum.Enum):
    GENERAL = "General"
    PINCHING = "Pinching"
    QUANTUM_CLASSICAL = "QuantumClassical"
    CLASSICAL_QUANTUM = "ClassicalQuantum"
    UNITARY = "UnitaryConjugation"
    PARTIAL_TRACE = "PartialTrace"


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A CPTP map ``X -> sum_j K_j X K_j*`` given by Kraus operators (``m x n``)."""

    kraus: np.ndarray
    kind: ChannelKind = ChannelKind.GENERAL

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim != 3:
            raise ValueError("Kraus operators must be stacked as (r, m, n)")
        object.__setattr__(self, "kraus", k)
        gram = np.einsum("kji,kjl->il", k.conj(), k)
        if np.max(np.abs(gram - np.eye(k.shape[2]))) > TP_TOL:
            raise ValueError("Kraus operators are not trace preserving")

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    def apply(self, x) -> np.ndarray:
        """Apply to a matrix or a stack ``(..., n, n)``."""
        x = np.asarray(x)
        return herm(np.einsum("kij,...jl,kml->...im", self.kraus, x, self.kraus.conj()))

    __call__ = apply


@dataclass(frozen=True, eq=False)
class TransposedChannel:
    """``transpose o Phi``: positive and trace preserving, not completely positive."""

    inner: QuantumChannel
    kind: str = "Transpose"

    @property
    def in_dim(self) -> int:
        return self.inner.in_dim

    @property
    def out_dim(self) -> int:
        return self.inner.out_dim

    def apply(self, x) -> np.ndarray:
        return np.swapaxes(self.inner.apply(x), -1, -2)

    __call__ = apply


def random_cptp(n: int, m: int, env_dim: int, rng: np.random.Generator) -> QuantumChannel:
    """Stinespring construction: a Haar-like isometry ``C^n -> C^m (x) C^env``
    followed by the partial trace over the environment."""
    if env_dim < 1 or m * env_dim < n:
        raise ValueError("need env_dim >= 1 and m*env_dim >= n")
    z = rng.standard_normal((m * env_dim, n)) + 1j * rng.standard_normal((m * env_dim, n))
    v, r = np.linalg.qr(z)
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    if np.max(np.abs(dagger(v) @ v - np.eye(n))) > 1e-12:
        raise RuntimeError("Stinespring isometry construction failed")
    kraus = v.reshape(m, env_dim, n).transpose(1, 0, 2)
    return QuantumChannel(kraus, ChannelKind.GENERAL)


def projections_of(a) -> list[np.ndarray]:
    """Spectral projections of a Hermitian matrix (degenerate blocks merged)."""
    w, v = eigh(np.asarray(a))
    return [v[:, g] @ dagger(v[:, g]) for g in eigen_blocks(w)]


def pinching_channel(a) -> QuantumChannel:
    """``E_A``: zero the off-diagonal blocks between eigenspaces of ``A``."""
    return QuantumChannel(np.stack(projections_of(a)), ChannelKind.PINCHING)


def qc_channel(povm: Povm) -> QuantumChannel:
    """``X -> sum_i (Tr M_i X) E_ii``."""
    k = len(povm.elements)
    n = povm.elements[0].shape[0]
    ops = []
    for i, mi in enumerate(povm.elements):
        w, v = eigh(mi)
        root = (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)
        for j in range(n):
            op = np.zeros((k, n), complex)
            op[i] = root[j]
            ops.append(op)
    return QuantumChannel(np.stack(ops), ChannelKind.QUANTUM_CLASSICAL)


def cq_channel(states: Sequence[np.ndarray]) -> QuantumChannel:
    """``diag(a) -> sum_i a_i rho_i`` (off-diagonal input entries are discarded)."""
    k = len(states)
    ops = []
    for i, rho in enumerate(states):
        if abs(np.trace(rho).real - 1) > 1e-10:
            raise ValueError("classical-quantum states must have unit trace")
        w, v = eigh(np.asarray(rho))
        for lam, vec in zip(w, v.T):
            if lam > 0:
                op = np.zeros((len(vec), k), complex)
                op[:, i] = np.sqrt(lam) * vec
                ops.append(op)
    return QuantumChannel(np.stack(ops), ChannelKind.CLASSICAL_QUANTUM)


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel(np.asarray(u)[None], ChannelKind.UNITARY)


def partial_trace_channel(dims: tuple[int, int], traced: int) -> QuantumChannel:
    """Trace out factor ``traced`` (0 or 1) of ``C^d0 (x) C^d1``."""
    d0, d1 = dims
    ops = []
    for j in range(dims[traced]):
        e = np.zeros((1, dims[traced]))
        e[0, j] = 1
        ops.append(np.kron(e, np.eye(d1)) if traced == 0 else np.kron(np.eye(d0), e))
    return QuantumChannel(np.stack(ops), ChannelKind.PARTIAL_TRACE)


def partial_trace(x, dims: tuple[int, ...], keep: int) -> np.ndarray:
    """Partial trace of ``x`` on ``C^d0 (x) ... `` keeping factor ``keep``."""
    k = len(dims)
    t = np.asarray(x).reshape(dims + dims)
    letters = "abcdefgh"
    rows = list(letters[:k])
    cols = list(letters[:k])
    cols[keep] = "z"
    spec = "".join(rows) + "".join(cols) + "->" + rows[keep] + "z"
    return np.einsum(spec, t)


def transpose_map(channel: QuantumChannel) -> TransposedChannel:
    return TransposedChannel(channel)


# -- Weyl-Heisenberg twirl --------------------------------------------------

def weyl_heisenberg(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift ``S_{jk} = delta_{j+1,k}`` (mod d) and clock ``W = diag(omega^j)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    s = np.zeros((d, d), complex)
    s[np.arange(d), (np.arange(d) + 1) % d] = 1
    w = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return s, w


def _twirl_unitaries(d: int, m: int) -> np.ndarray:
    s, w = weyl_heisenberg(d)
    us = []
    for mu in range(d):
        for nu in range(d):
            u = np.linalg.matrix_power(s, mu) @ np.linalg.matrix_power(w, nu)
            us.append(np.kron(u, np.eye(m)))
    return np.stack(us)


def twirl(z, d: int, m: int) -> np.ndarray:
    """``d^-2 sum_{mu,nu} U_{mu nu} Z U_{mu nu}*`` with ``U = S^mu W^nu (x) I_m``."""
    us = _twirl_unitaries(d, m)
    return np.einsum("kij,jl,kml->im", us, z, us.conj()) / d ** 2


def conditional_expectation(z, d: int, m: int) -> np.ndarray:
    """``tau_0 (x) Tr_d``: ``I_d/d (x)`` the partial trace over the first factor."""
    return np.kron(np.eye(d) / d, partial_trace(z, (d, m), keep=1))


def _check_twirl_dims(n, l, m):
    if n * l * m > 16:
        raise DimensionError(f"n*l*m = {n * l * m} exceeds 16")


def twirl_identity_check(n: int, l: int, m: int, rng: np.random.Generator,
                         samples: int = 1) -> float:
    """Largest entrywise deviation between the Weyl-Heisenberg twirl and
    the conditional expectation onto ``I_{nl} (x) M_m``, on random ``Z``."""
    _check_twirl_dims(n, l, m)
    d = n * l
    worst = 0.0
    for _ in range(samples):
        z = (rng.standard_normal((d * m, d * m))
             + 1j * rng.standard_normal((d * m, d * m)))
        diff = twirl(z, d, m) - conditional_expectation(z, d, m)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def twirl_channel_check(n: int, l: int, m: int, rng: np.random.Generator) -> float:
    """Twirl of the Stinespring dilation ``V(X (x) eta)V*`` versus
    ``tau_0 (x) Phi(X)`` for a random channel ``Phi: M_n -> M_m``."""
    _check_twirl_dims(n, l, m)
    d = n * l
    v = haar_unitary(d * m, rng)
    psi = rng.standard_normal(l * m) + 1j * rng.standard_normal(l * m)
    psi /= np.linalg.norm(psi)
    eta = np.outer(psi, psi.conj())
    x = sample_psd(n, rng)
    big = v @ np.kron(x, eta) @ dagger(v)
    phi_x = partial_trace(big, (d, m), keep=1)
    return float(np.max(np.abs(twirl(big, d, m) - np.kron(np.eye(d) / d, phi_x))))


# -- theory -----------------------------------------------------------------

class Mode(str, enum.Enum):
    CONCAVITY = "Concavity"
    CONVEXITY = "Convexity"


def default_mode(spec: MeanSpec) -> Mode:
    return Mode.CONCAVITY if spec.alpha < 1 else Mode.CONVEXITY


def theory_status(spec: MeanSpec, mode: Mode | str | None = None) -> str:
    """``holds``, ``fails`` or ``Unknown`` for joint concavity/convexity of ``Tr M``."""
    mode = default_mode(spec) if mode is None else Mode(mode)
    k, a, p = spec.kind, spec.alpha, spec.p
    yes = lambda c: "holds" if c else "fails"
    if k in (MeanKind.ARITH, MeanKind.HARM):
        if mode is Mode.CONCAVITY:
            return yes(p <= 1)
        return yes(1 <= p <= 2) if k is MeanKind.ARITH else "fails"
    if mode is Mode.CONCAVITY:
        if a > 1:
            return "Unknown"
        if k is MeanKind.R:
            return yes(1 / p >= max(a, 1 - a))
        if k is MeanKind.G:
            return yes(p <= 1)
        if k is MeanKind.LE:
            return "holds"
        if a == 0.5:
            return yes(p <= 1)
        bound = min((1 - a) / a, a / (1 - a)) if k is MeanKind.SG else 1.0
        return "fails" if p > bound else "Unknown"
    if a < 1:
        return "Unknown"
    if k is MeanKind.R:
        return yes(max(a / 2, a - 1) <= 1 / p <= a)
    if k is MeanKind.G:
        if a == 2 or p == 1:
            return yes(0.5 <= p <= 1 and a <= 2)
        if not (max(0.5, (a - 1) / a) <= p <= 1):
            return "fails"
        return "Unknown"
    return "fails"


def expected_sign(spec: MeanSpec, mode: Mode | None = None) -> int:
    """+1 when ``Q`` should not decrease under channels (concave), -1 otherwise."""
    mode = default_mode(spec) if mode is None else mode
    return 1 if mode is Mode.CONCAVITY else -1


def trace_q(spec: MeanSpec, a, b) -> np.ndarray:
    m = mean_value(spec.kind, spec.alpha, spec.p, a, b)
    return np.real(np.trace(m, axis1=-2, axis2=-1))


def _regularize(x, b) -> tuple[np.ndarray, bool]:
    if bool(dominates(x, b)):
        return x, False
    return x + REGULARIZE_EPS * np.eye(x.shape[-1]), True


# -- monotonicity -----------------------------------------------------------

@dataclass
class MonotonicityReport:
    spec: MeanSpec
    family: str
    trials: int
    sign: int
    worst_defect: float
    defects: np.ndarray = field(repr=False)
    domain_violations: int = 0
    regularized: int = 0

    def passes(self, tol: float = 1e-8) -> bool:
        return self.worst_defect >= -tol


def sample_channel(family: str, n: int, rng: np.random.Generator, a=None):
    if family == "cptp":
        return random_cptp(n, n, int(rng.integers(1, 4)), rng)
    if family == "transpose":
        return transpose_map(random_cptp(n, n, int(rng.integers(1, 4)), rng))
    if family == "qc":
        return qc_channel(random_povm(n, n, rng))
    if family == "cq":
        states = [sample_psd(n, rng) for _ in range(n)]
        return cq_channel([s / np.trace(s).real for s in states])
    if family == "pinch":
        return pinching_channel(a if a is not None else sample_psd(n, rng))
    raise ValueError(f"unknown channel family {family!r}")


def monotonicity_check(spec: MeanSpec, family: str, trials: int,
                       rng: np.random.Generator, n: int = 2,
                       mode: Mode | None = None) -> MonotonicityReport:
    """Signed defects ``sign * (Q(Phi(A), Phi(B)) - Q(A, B))``.

    ``sign`` is +1 for concave specs (``Q`` must not decrease) and -1 for
    convex ones; a negative defect is a violation.  ``pinch`` uses the
    pinching by ``A`` itself; ``cq`` feeds commuting diagonal inputs.
    """
    sign = expected_sign(spec, mode)
    out = np.empty(trials)
    regs = dom = 0
    for t in range(trials):
        a, b = sample_psd(n, rng), sample_psd(n, rng)
        if family == "cq":
            a = np.diag(np.diag(a).real)
            b = np.diag(np.diag(b).real)
        ch = sample_channel(family, n, rng, a)
        pa, pb = ch.apply(a), ch.apply(b)
        if spec.alpha > 1 or spec.kind in (MeanKind.SG, MeanKind.SGT):
            if not bool(dominates(pa, pb)):
                dom += 1
            pa, r = _regularize(pa, pb)
            regs += r
        out[t] = sign * (trace_q(spec, pa, pb) - trace_q(spec, a, b))
    return MonotonicityReport(spec, family, trials, sign, float(out.min()), out, dom, regs)


def pinching_example_defect(alpha: float, a: float, b: float) -> float:
    """``Tr LE(A, E_A(B)) - Tr LE(A, B)`` for ``A = diag(a, b)``, ``B = ones/2``."""
    am = np.diag([a, b]).astype(float)
    bm = np.full((2, 2), 0.5)
    pb = pinching_channel(am).apply(bm)
    q = lambda x, y: float(np.real(np.trace(mean_value(MeanKind.LE, alpha, 1.0, x, y))))
    return q(am, pb) - q(am, bm)


# -- midpoint convexity -----------------------------------------------------

@dataclass
class ConvexityVerdict:
    spec: MeanSpec
    mode: Mode
    trials: int
    worst_violation: float
    witness: tuple | None = None

    @property
    def confirmed(self) -> bool:
        return self.witness is None

    def to_dict(self) -> dict:
        out = {"spec": self.spec.label(), "mode": self.mode.value, "trials": self.trials,
               "worst_violation": self.worst_violation, "confirmed": self.confirmed}
        if self.witness is not None:
            (a1, b1), (a2, b2), lam = self.witness
            out["witness"] = {"lambda": lam, "A1": _j(a1), "B1": _j(b1),
                              "A2": _j(a2), "B2": _j(b2)}
        return out


def _j(x):
    x = np.asarray(x)
    return {"re": np.real(x).tolist(), "im": np.imag(x).tolist()}


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _wishart(size, n, rng):
    return np.stack([sample_psd(n, rng) for _ in range(size)])


def _near_commuting(size, n, rng):
    u = haar_unitary(n, rng)
    d = np.exp(rng.uniform(-3, 1, (size, n)))
    base = np.einsum("ij,tj,kj->tik", u, d, u.conj())
    z = rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))
    return base + 1e-2 * herm(z) @ herm(z).conj().swapaxes(-1, -2)


def _structured(size, rng):
    x = np.exp(rng.uniform(np.log(1e-3), 0, size))
    y = np.exp(rng.uniform(np.log(1e-3), 0, size))
    th = rng.uniform(0, np.pi / 2, size)
    a = np.zeros((size, 2, 2))
    a[:, 0, 0] = 1
    a[:, 1, 1] = x
    d = np.zeros((size, 2, 2))
    d[:, 0, 0] = 1
    d[:, 1, 1] = y
    r = _rot(th)
    b = r @ d @ r.swapaxes(-1, -2)
    scale = np.exp(rng.uniform(-1, 1, size))
    return a.astype(complex), (scale[:, None, None] * b).astype(complex)


def _sample_quad(sampler: str, size: int, rng):
    """``(A1, B1, A2, B2, lambda)`` batches of 2x2 or 3x3 pairs."""
    if sampler == "structured":
        a1, b1 = _structured(size, rng)
        u = np.diag([1.0, -1.0]).astype(complex)
        half = rng.random(size) < 0.5
        a2s, b2s = _structured(size, rng)
        a2 = np.where(half[:, None, None], u @ a1 @ u, a2s)
        b2 = np.where(half[:, None, None], u @ b1 @ u, b2s)
        lam = np.where(half, 0.5, rng.uniform(0, 1, size))
        return a1, b1, a2, b2, lam
    n = int(rng.integers(2, 4))
    f = _wishart if sampler == "wishart" else _near_commuting
    a1, b1, a2, b2 = (f(size, n, rng) for _ in range(4))
    lam = np.where(rng.random(size) < 0.5, 0.5, rng.uniform(0, 1, size))
    return a1, b1, a2, b2, lam


SAMPLERS = ("wishart", "near-commuting", "structured")


def midpoint_defects(spec: MeanSpec, mode: Mode, a1, b1, a2, b2, lam) -> np.ndarray:
    """Signed midpoint defects normalised by ``Q`` of the mixture; negative
    values violate the requested concavity/convexity."""
    l = lam[:, None, None]
    am, bm = l * a1 + (1 - l) * a2, l * b1 + (1 - l) * b2
    qm = trace_q(spec, am, bm)
    comb = lam * trace_q(spec, a1, b1) + (1 - lam) * trace_q(spec, a2, b2)
    d = (qm - comb) if mode is Mode.CONCAVITY else (comb - qm)
    return d / np.maximum(qm, 1e-300)


def midpoint_convexity_test(spec: MeanSpec, mode: Mode | str | None = None,
                            trials: int = 10_000,
                            rng: np.random.Generator | None = None,
                            samplers: Sequence[str] = SAMPLERS,
                            cvx_tol: float = CVX_TOL, batch: int = 2_000,
                            stop_on_witness: bool = True) -> ConvexityVerdict:
    """Search for midpoint violations of joint concavity/convexity of ``Tr M``.

    Trials are split evenly across ``samplers`` and evaluated in batches.
    """
    rng = np.random.default_rng() if rng is None else rng
    mode = default_mode(spec) if mode is None else Mode(mode)
    worst, witness, done = np.inf, None, 0
    per = max(1, trials // len(samplers))
    for s in samplers:
        left = per
        while left > 0:
            size = min(batch, left)
            quad = _sample_quad(s, size, rng)
            d = midpoint_defects(spec, mode, *quad)
            i = int(np.argmin(d))
            done += size
            left -= size
            if d[i] < worst:
                worst = float(d[i])
                if worst < -cvx_tol:
                    a1, b1, a2, b2, lam = (q[i] for q in quad)
                    witness = ((a1, b1), (a2, b2), float(lam))
            if witness is not None and stop_on_witness:
                return ConvexityVerdict(spec, mode, done, worst, witness)
    return ConvexityVerdict(spec, mode, done, worst, witness)


@dataclass(frozen=True)
class RegionProbeCell:
    alpha: float
    p: float
    theory: str
    empirical: str
    worst_violation: float

    @property
    def consistent(self) -> bool:
        if self.theory == "Unknown":
            return True
        return (self.theory == "holds") == (self.empirical == "no-violation")


def region_probe(kind, mode, alpha_grid, p_grid, trials: int,
                 rng: np.random.Generator) -> list[RegionProbeCell]:
    kind = MeanKind.parse(kind)
    cells = []
    for a in alpha_grid:
        for p in p_grid:
            spec = MeanSpec(kind, float(a), float(p))
            m = default_mode(spec) if mode is None else Mode(mode)
            v = midpoint_convexity_test(spec, m, trials, rng)
            cells.append(RegionProbeCell(float(a), float(p), theory_status(spec, m),
                                         "no-violation" if v.confirmed else "violation-found",
                                         v.worst_violation))
    return cells


def region_csv(cells: Sequence[RegionProbeCell]) -> str:
    lines = ["alpha,p,theory,empirical,worst_violation"]
    lines += [f"{c.alpha:.6g},{c.p:.6g},{c.theory},{c.empirical},{c.worst_violation:.6e}"
              for c in cells]
    return "\n".join(lines) + "\n"


# -- semi-classical channels ------------------------------------------------

@dataclass(frozen=True)
class SemiclassicalReport:
    spec: MeanSpec
    direction: str
    condition_holds: bool
    sign: int
    worst_defect: float
    trials: int

    @property
    def implication_ok(self) -> bool:
        return (not self.condition_holds) or self.worst_defect >= -1e-8


def semiclassical_monotonicity_check(spec: MeanSpec, direction: str, trials: int,
                                     rng: np.random.Generator,
                                     n: int = 2) -> SemiclassicalReport:
    """Directional test of the semi-classical equivalences.

    ``qc`` and ``pinch`` are governed by the comparison with
    ``Tr R_{alpha,1/alpha}``; ``cq`` by the comparison with
    ``Tr G_{alpha,1}`` (and only for ``alpha <= 2`` when ``alpha > 1``).
    The comparison is evaluated on the same number of random pairs.
    """
    cond = True
    for _ in range(trials):
        r = sandwich_check(spec, sample_psd(n, rng), sample_psd(n, rng))
        ok = r.upper_holds if direction in ("qc", "pinch") else r.lower_holds
        cond &= bool(ok)
    if direction == "cq" and spec.alpha > 2:
        cond = False
    rep = monotonicity_check(spec, direction, trials, rng, n)
    return SemiclassicalReport(spec, direction, cond, rep.sign, rep.worst_defect, trials)


def commuting_combination(n: int, rng: np.random.Generator, lam: float):
    """``(A1, B1), (A2, B2)`` whose ``lam``-mixtures commute (common eigenbasis)."""
    u = haar_unitary(n, rng)
    am = u @ np.diag(np.exp(rng.uniform(-2, 0, n))) @ dagger(u)
    bm = u @ np.diag(np.exp(rng.uniform(-2, 0, n))) @ dagger(u)
    out = []
    for mid in (am, bm):
        d = herm(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        lo = np.linalg.eigvalsh(mid)[0]
        d *= 0.9 * lo / (max(lam, 1 - lam) * np.linalg.norm(d, 2))
        out.append((mid + (1 - lam) * d, mid - lam * d))
    (a1, a2), (b1, b2) = out
    return (a1, b1), (a2, b2)


@dataclass(frozen=True)
class ConditionalReport:
    spec: MeanSpec
    trials: int
    worst_defect: float

    @property
    def holds(self) -> bool:
        return self.worst_defect >= -CVX_TOL


def conditional_convexity_check(spec: MeanSpec, trials: int,
                                rng: np.random.Generator, n: int = 2) -> ConditionalReport:
    """Midpoint inequality restricted to pairs with commuting mixtures."""
    mode = default_mode(spec)
    worst = np.inf
    for _ in range(trials):
        lam = 0.5 if rng.random() < 0.5 else float(rng.uniform(0.05, 0.95))
        (a1, b1), (a2, b2) = commuting_combination(n, rng, lam)
        d = midpoint_defects(spec, mode, a1[None], b1[None], a2[None], b2[None],
                             np.array([lam]))
        worst = min(worst, float(d[0]))
    return ConditionalReport(spec, trials, worst)


# -- structural properties of Q = Tr M ---------------------------------------

def direct_sum(x, y) -> np.ndarray:
    n, m = x.shape[0], y.shape[0]
    out = np.zeros((n + m, n + m), complex)
    out[:n, :n] = x
    out[n:, n:] = y
    return out


def trace_properties(spec: MeanSpec, rng: np.random.Generator, n: int = 2) -> dict[str, float]:
    """Relative errors of normalisation, homogeneity, direct-sum additivity,
    tensor multiplicativity and unitary invariance of ``Q = Tr M``."""
    q = lambda x, y: float(trace_q(spec, x, y))
    a1, b1, a2, b2 = (sample_psd(n, rng) for _ in range(4))
    lam = float(rng.uniform(0.1, 10))
    u = haar_unitary(n, rng)
    rel = lambda x, y: abs(x - y) / max(abs(y), 1e-300)
    q1, q2 = q(a1, b1), q(a2, b2)
    return {
        "normalization": rel(q(a1, a1), float(np.trace(a1).real)),
        "homogeneity": rel(q(lam * a1, lam * b1), lam * q1),
        "direct_sum": rel(q(direct_sum(a1, a2), direct_sum(b1, b2)), q1 + q2),
        "tensor": rel(q(np.kron(a1, a2), np.kron(b1, b2)), q1 * q2),
        "unitary": rel(q(u @ a1 @ dagger(u), u @ b1 @ dagger(u)), q1),
    }


def direct_sum_midpoint(spec: MeanSpec, a1, b1, a2, b2, lam: float) -> tuple[float, float]:
    """Both sides of the direct-sum reduction: ``Q`` of the partial trace of
    ``lam A1 (+) (1-lam) A2`` and ``lam Q(A1,B1) + (1-lam) Q(A2,B2)``."""
    n = a1.shape[0]
    ch = partial_trace_channel((2, n), traced=0)
    big_a = direct_sum(lam * a1, (1 - lam) * a2)
    big_b = direct_sum(lam * b1, (1 - lam) * b2)
    lhs = float(trace_q(spec, ch.apply(big_a), ch.apply(big_b)))
    rhs = float(trace_q(spec, big_a, big_b))
    return lhs, rhs
