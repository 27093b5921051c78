"""Hermitian spectral calculus with support-aware generalized inverses.

Every function here accepts stacks of matrices with shape ``(..., n, n)``
and works on the trailing two axes, so that whole batches of small
matrices can be pushed through ``numpy.linalg.eigh`` in one call.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg as sla

MAX_DIM = 16
REL_CUT = 1e-12
PSD_CLAMP = 1e-10
HERM_TOL = 1e-10
INTERSECT_TOL = 1e-8


class SpectralError(ValueError):
    """Base class for invalid spectral inputs."""


class DimensionError(SpectralError):
    pass


class HermiticityError(SpectralError):
    pass


class NotPsdError(SpectralError):
    pass


class EigenSolverError(RuntimeError):
    """Raised when both eigen drivers fail to converge."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} driver attempts)")
        self.attempts = attempts


def check_dim(a: np.ndarray) -> int:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {a.shape}")
    n = a.shape[-1]
    if n > MAX_DIM:
        raise DimensionError(f"dimension {n} exceeds the cap of {MAX_DIM}")
    if n < 1:
        raise DimensionError("empty matrix")
    return n


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def herm(a: np.ndarray) -> np.ndarray:
    """Hermitian part ``(a + a^*)/2``."""
    return 0.5 * (a + dagger(a))


def eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenpairs of a Hermitian stack, with a driver fallback."""
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError:
        pass
    try:
        flat = a.reshape((-1,) + a.shape[-2:])
        ws, vs = zip(*(sla.eigh(m, driver="ev") for m in flat))
        return (np.stack(ws).reshape(a.shape[:-1]),
                np.stack(vs).reshape(a.shape))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"eigendecomposition did not converge: {exc}", 2)


def _rebuild(v: np.ndarray, f: np.ndarray) -> np.ndarray:
    return (v * f[..., None, :]) @ dagger(v)


def _support_mask(w: np.ndarray, rel_cut: float) -> np.ndarray:
    top = np.max(np.abs(w), axis=-1, keepdims=True)
    return w > rel_cut * top


def _bcast(r, w: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.ndim:
        r = r.reshape(r.shape + (1,))
    return r


def fpow(a: np.ndarray, r, rel_cut: float = REL_CUT) -> np.ndarray:
    """Power ``a**r`` on the support of ``a``; zero off the support.

    Negative ``r`` therefore gives the generalized inverse and ``r = 0``
    the support projection.  ``r`` may be an array broadcasting against
    the batch shape.
    """
    w, v = eigh(a)
    on = _support_mask(w, rel_cut)
    safe = np.where(on, w, 1.0)
    f = np.where(on, safe ** _bcast(r, w), 0.0)
    return herm(_rebuild(v, f))


def fsupport(a: np.ndarray, rel_cut: float = REL_CUT) -> np.ndarray:
    return fpow(a, 0.0, rel_cut)


def flog(a: np.ndarray, rel_cut: float = REL_CUT) -> np.ndarray:
    """Logarithm on the support, zero elsewhere."""
    w, v = eigh(a)
    on = _support_mask(w, rel_cut)
    f = np.where(on, np.log(np.where(on, w, 1.0)), 0.0)
    return herm(_rebuild(v, f))


def fexp(a: np.ndarray) -> np.ndarray:
    w, v = eigh(herm(a))
    return herm(_rebuild(v, np.exp(w)))


def eigvals_desc(a: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(herm(a))[..., ::-1]


def support_intersection(pa: np.ndarray, pb: np.ndarray,
                         tol: float = INTERSECT_TOL) -> np.ndarray:
    """Projection onto ``ran(pa) ∩ ran(pb)``.

    The intersection is the eigenvalue-one eigenspace of ``pa pb pa``.
    """
    w, v = eigh(herm(pa @ pb @ pa))
    return herm(_rebuild(v, (w > 1.0 - tol).astype(float)))


def dominates(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Whether ``s(a) >= s(b)`` for each matrix in the stack."""
    pa, pb = fsupport(a), fsupport(b)
    n = a.shape[-1]
    leak = (np.eye(n) - pa) @ pb
    return np.linalg.norm(leak, ord=2, axis=(-2, -1)) <= tol


def clamp_psd(a: np.ndarray, tol: float = PSD_CLAMP) -> np.ndarray:
    """Zero tiny negative eigenvalues; reject larger ones."""
    w, v = eigh(herm(a))
    top = np.max(np.abs(w), axis=-1, keepdims=True)
    if np.any(w < -tol * np.maximum(top, 1e-300)):
        raise NotPsdError(f"matrix has a negative eigenvalue {w.min():.3e}")
    return herm(_rebuild(v, np.clip(w, 0.0, None)))


# -- validated containers ---------------------------------------------------

@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order and matching unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return _rebuild(self.eigenvectors, self.eigenvalues)


@dataclass(frozen=True)
class SupportInfo:
    projection: np.ndarray
    rank: int
    rel_cut: float


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data)
        n = check_dim(a)
        if a.ndim != 2:
            raise DimensionError("a single matrix is required")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
        if np.max(np.abs(a - dagger(a))) > HERM_TOL * scale:
            raise HermiticityError("matrix is not Hermitian")
        a = herm(a)
        if np.allclose(a.imag, 0.0) if np.iscomplexobj(a) else False:
            a = a.real
        object.__setattr__(self, "data", a)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class PsdMatrix(HermitianMatrix):
    """Positive semidefinite matrix, clamped at construction."""

    decomposition: SpectralDecomposition = field(init=False, repr=False)

    def __post_init__(self):
        super().__post_init__()
        a = clamp_psd(self.data)
        if not np.iscomplexobj(self.data):
            a = a.real
        object.__setattr__(self, "data", a)
        object.__setattr__(self, "decomposition", eig_hermitian(a))

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.decomposition.eigenvalues

    @property
    def rank(self) -> int:
        return support_projection(self).rank


def _as_array(a) -> np.ndarray:
    arr = np.asarray(a)
    check_dim(arr)
    return arr


def _like(inp, out: np.ndarray):
    if isinstance(inp, PsdMatrix):
        return PsdMatrix(out)
    if isinstance(inp, HermitianMatrix):
        return HermitianMatrix(out)
    return out


def eig_hermitian(a) -> SpectralDecomposition:
    """Eigen-decomposition with eigenvalues sorted in descending order."""
    arr = _as_array(a)
    w, v = eigh(herm(arr))
    return SpectralDecomposition(w[..., ::-1].copy(), v[..., ::-1].copy())


def support_projection(a, rel_cut: float = REL_CUT) -> SupportInfo:
    arr = _as_array(a)
    w = np.linalg.eigvalsh(herm(arr))
    return SupportInfo(fsupport(arr, rel_cut),
                       int(np.sum(_support_mask(w, rel_cut))), rel_cut)


def mat_pow(a, r: float):
    """Matrix power with the generalized inverse convention for ``r <= 0``."""
    return _like(a, fpow(_as_array(a), r))


def mat_log_support(a) -> np.ndarray:
    arr = _as_array(a)
    if not np.any(np.abs(arr)):
        raise NotPsdError("the logarithm of the zero matrix is undefined")
    return flog(arr)


def mat_exp(h):
    return fexp(_as_array(h))


def loewner_le(a, b, tol: float = 1e-10) -> bool:
    """``a <= b`` in the Loewner order, with a norm-scaled tolerance."""
    d = herm(_as_array(b) - _as_array(a))
    lo = np.linalg.eigvalsh(d)[0]
    return bool(lo >= -tol * (1.0 + np.linalg.norm(d, 2)))


# -- sampling ---------------------------------------------------------------

def haar_unitary(n: int, rng: np.random.Generator, size=None,
                 real: bool = False) -> np.ndarray:
    shape = (() if size is None else tuple(np.atleast_1d(size))) + (n, n)
    z = rng.standard_normal(shape)
    if not real:
        z = z + 1j * rng.standard_normal(shape)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def sample_psd(n: int, rng: np.random.Generator, rank: int | None = None,
               condition_target: float | None = None, size=None,
               real: bool = False) -> np.ndarray:
    """Random PSD matrix (or stack) normalized to unit spectral norm.

    Without ``condition_target`` this is a Wishart matrix ``G G^*``.  With
    it, eigenvalues run geometrically from ``1/condition_target`` to one
    (interior ones jittered) under a Haar eigenbasis, so the condition
    number of the support block is exactly the target.
    """
    if n > MAX_DIM:
        raise DimensionError(f"dimension {n} exceeds the cap of {MAX_DIM}")
    k = n if rank is None else int(rank)
    if not 0 <= k <= n:
        raise DimensionError(f"rank {k} must lie in [0, {n}]")
    batch = () if size is None else tuple(np.atleast_1d(size))
    if condition_target is None:
        shape = batch + (n, k)
        g = rng.standard_normal(shape)
        if not real:
            g = g + 1j * rng.standard_normal(shape)
        a = g @ dagger(g)
    else:
        u = haar_unitary(n, rng, size=size, real=real)
        t = np.sort(rng.uniform(0.0, 1.0, batch + (k,)), axis=-1)
        if k > 1:
            t[..., 0], t[..., -1] = 0.0, 1.0
        else:
            t[..., 0] = 1.0
        w = np.zeros(batch + (n,))
        w[..., :k] = np.exp(-np.log(condition_target) * t)
        a = _rebuild(u, w)
    a = herm(a)
    top = np.linalg.eigvalsh(a)[..., -1]
    return a / top[..., None, None]


def sample_dominated_pair(n: int, rng: np.random.Generator,
                          rank_b: int | None = None,
                          condition_target: float | None = 10.0,
                          real: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Pair with ``s(A) >= s(B)``: full-rank ``A`` and possibly singular ``B``."""
    a = sample_psd(n, rng, condition_target=condition_target, real=real)
    b = sample_psd(n, rng, rank=rank_b, condition_target=condition_target,
                   real=real)
    return a, b


# -- exchange format --------------------------------------------------------

def matrix_to_json(a) -> dict[str, Any]:
    arr = np.asarray(a)
    return {"dim": int(arr.shape[0]),
            "re": np.real(arr).tolist(),
            "im": np.imag(arr).tolist()}


def matrix_from_json(obj, psd: bool = True):
    """Read ``{"dim", "re", "im"}``; Hermiticity is validated."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != (obj["dim"], obj["dim"]) or im.shape != re.shape:
        raise DimensionError("declared dim does not match the entries")
    a = re + 1j * im if np.any(im) else re
    return PsdMatrix(a) if psd else HermitianMatrix(a)
