"""Dense superoperator algebra on a d-dimensional Hilbert space.

Operators on the Hilbert space are plain ``(d, d)`` complex arrays.  Linear
maps on operators ("superoperators") are ``(d**2, d**2)`` complex arrays acting
on column-stacked vectors, so that

    vec(A @ X @ B) == kron(B.T, A) @ vec(X).

Every function here is pure; nothing caches or mutates its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

# vec(AXB) = (B^T kron A) vec(X); fixed for the whole package.
VEC_ORDER = "F"

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
TRACE_TOL = 1e-12
KRAUS_TOL = 1e-10
EXPM_MAX_NORM = 1e4


class DimensionError(ValueError):
    """Raised when operator or superoperator shapes do not line up."""


def as_operator(X, name: str = "operator") -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} has non-finite entries")
    return X


def superop_dim(T) -> int:
    """Hilbert-space dimension d of a (d^2, d^2) superoperator."""
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionError(f"superoperator must be square, got shape {T.shape}")
    d = int(round(np.sqrt(T.shape[0])))
    if d * d != T.shape[0]:
        raise DimensionError(f"superoperator side {T.shape[0]} is not a perfect square")
    return d


def as_superop(T, name: str = "superoperator") -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    superop_dim(T)
    if not np.all(np.isfinite(T)):
        raise ValueError(f"{name} has non-finite entries")
    return T


def identity_superop(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex)


def vectorize(X) -> np.ndarray:
    """Column-stack a square matrix into a length-d^2 vector."""
    X = as_operator(X)
    return X.reshape(-1, order=VEC_ORDER)


def devectorize(v, d: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionError(f"vector of length {v.size} is not vec of a {d}x{d} matrix")
    return v.reshape((d, d), order=VEC_ORDER)


def sandwich_superop(A, B) -> np.ndarray:
    """Superoperator of X -> A X B."""
    return np.kron(np.asarray(B, dtype=complex).T, np.asarray(A, dtype=complex))


def apply(T, X) -> np.ndarray:
    """Apply superoperator ``T`` to operator ``X``."""
    T = as_superop(T)
    X = as_operator(X)
    d = superop_dim(T)
    if X.shape[0] != d:
        raise DimensionError(f"superoperator acts on {d}x{d} operators, got {X.shape}")
    return devectorize(T @ vectorize(X), d)


def dual(T) -> np.ndarray:
    """Hilbert-Schmidt adjoint (Heisenberg picture) of ``T``."""
    return np.asarray(T).conj().T


@dataclass(frozen=True)
class DensityMatrix:
    op: np.ndarray

    def __post_init__(self):
        rho = as_operator(self.op, "density matrix")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix has trace {np.trace(rho).real:.3g}, expected 1")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -PSD_TOL:
            raise ValueError("density matrix has negative eigenvalues")
        object.__setattr__(self, "op", rho)

    @property
    def dim(self) -> int:
        return self.op.shape[0]


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of a quantum channel (``kind="channel"``) or operation."""

    kraus_ops: tuple
    kind: str = "channel"

    def __post_init__(self):
        if self.kind not in ("channel", "operation"):
            raise ValueError(f"kind must be 'channel' or 'operation', not {self.kind!r}")
        ops = tuple(as_operator(K, "Kraus operator") for K in self.kraus_ops)
        if not ops:
            raise ValueError("empty Kraus set")
        d = ops[0].shape[0]
        if any(K.shape != (d, d) for K in ops):
            raise DimensionError("Kraus operators have mismatched dimensions")
        gram = sum(K.conj().T @ K for K in ops)
        if self.kind == "channel":
            if np.max(np.abs(gram - np.eye(d))) > KRAUS_TOL:
                raise ValueError("Kraus operators do not sum to the identity")
        elif np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)).max() > 1 + KRAUS_TOL:
            raise ValueError("Kraus operators are trace-increasing")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]


def kraus_to_superop(kraus: KrausSet | Sequence) -> np.ndarray:
    """Sum of conj(K) kron K over the Kraus operators."""
    ops = kraus.kraus_ops if isinstance(kraus, KrausSet) else [as_operator(K) for K in kraus]
    d = ops[0].shape[0]
    if any(K.shape != (d, d) for K in ops):
        raise DimensionError("Kraus operators have mismatched dimensions")
    return sum(np.kron(K.conj(), K) for K in ops)


def choi_matrix(T) -> np.ndarray:
    r"""Choi matrix :math:`\sum_{ij} T(|i\rangle\langle j|) \otimes |i\rangle\langle j|`.

    The maximally entangled vector is left unnormalised, so the Choi matrix of
    the identity map has trace d.
    """
    T = as_superop(T)
    d = superop_dim(T)
    # row-major reshape of a column-stacked index gives (col, row) pairs:
    # T4[q, p, j, i] = <p| T(|i><j|) |q>
    T4 = T.reshape(d, d, d, d)
    return T4.transpose(1, 3, 0, 2).reshape(d * d, d * d)


@dataclass(frozen=True)
class MapReport:
    cp: bool
    trace_preserving: bool
    trace_nonincreasing: bool
    hermiticity_preserving: bool

    @property
    def is_channel(self) -> bool:
        return self.cp and self.trace_preserving

    @property
    def is_operation(self) -> bool:
        return self.cp and self.trace_nonincreasing


def classify_map(T, tol: float = 1e-9) -> MapReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    T = as_superop(T)
    d = superop_dim(T)
    J = choi_matrix(T)
    herm = np.max(np.abs(J - J.conj().T), initial=0.0) <= tol
    min_eig = np.linalg.eigvalsh(0.5 * (J + J.conj().T)).min()
    cp = bool(herm and min_eig >= -tol)

    vid = vectorize(np.eye(d))
    tp = np.max(np.abs(vid.conj() @ T - vid.conj()), initial=0.0) <= tol
    dual_id = devectorize(dual(T) @ vid, d)
    max_eig = np.linalg.eigvalsh(0.5 * (dual_id + dual_id.conj().T)).max()
    return MapReport(
        cp=cp,
        trace_preserving=bool(tp),
        trace_nonincreasing=bool(max_eig <= 1 + tol),
        hermiticity_preserving=bool(herm),
    )


def expm_superop(A, t: float = 1.0) -> np.ndarray:
    """e^{tA} by scaling and squaring with a Pade approximant.

    Also accepts a stack ``(..., n, n)`` of superoperators.
    """
    A = np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValueError("expm input has non-finite entries")
    tA = t * A
    if tA.ndim == 2:
        nrm = np.linalg.norm(tA, 1)
    else:
        nrm = np.abs(tA).sum(axis=-2).max(initial=0.0)
    if nrm > EXPM_MAX_NORM:
        raise OverflowError(f"|tA|_1 = {nrm:.3g} exceeds {EXPM_MAX_NORM:g}")
    return scipy.linalg.expm(tA)


def proxy_norm(T) -> float:
    """Largest singular value of the matrix representation."""
    T = np.asarray(T)
    if T.size == 0:
        return 0.0
    return float(np.linalg.norm(T, 2))


def trace_norm(X) -> float:
    return float(np.linalg.svd(np.asarray(X), compute_uv=False).sum())


@dataclass(frozen=True)
class NormEstimate:
    """Two-sided bracket on the 1->1 (trace-norm induced) operator norm."""

    lower: float
    upper: float
    lower_method: str = "rank1_alternating_ascent"
    upper_method: str = "sqrt_d_sigma_max"
    witness: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError("norm bounds must be non-negative")
        if self.lower > self.upper + 1e-12:
            raise ValueError(f"inconsistent bracket: lower {self.lower} > upper {self.upper}")


def _rank1_ascent(T, d, x, y, iters):
    """Alternating ascent on |T(x y^dag)|_1 over unit vectors x, y."""
    Tdag = dual(T)
    best = 0.0
    for _ in range(iters):
        Y = devectorize(T @ vectorize(np.outer(x, y.conj())), d)
        W, s, Vh = np.linalg.svd(Y)
        val = float(s.sum())
        if val <= best * (1 + 1e-13):
            best = max(best, val)
            break
        best = val
        # tr(U^dag T(x y^dag)) = y^dag B^dag x with B = T^dag(U)
        B = devectorize(Tdag @ vectorize(W @ Vh), d)
        Wc, _, Vch = np.linalg.svd(B.conj().T)
        x = Vch[0].conj()
        y = Wc[:, 0]
    return best, (x, y)


def upper_norm_estimate(T) -> float:
    """Cheap certified upper bound sqrt(d) * sigma_max(T) on the 1->1 norm."""
    return float(np.sqrt(superop_dim(T)) * proxy_norm(T))


def norm_1to1_estimate(T, restarts: int = 4, iters: int = 30, seed: int = 0) -> NormEstimate:
    """Bracket the 1->1 norm of ``T``.

    The lower bound is the best ``|T(|x><y|)|_1`` found by alternating ascent
    (rank-one operators are the extreme points of the trace-norm ball); the
    first restart starts from a pure state |x><x|.  The upper bound
    ``sqrt(d) * sigma_max(T)`` follows from ``|X|_2 <= |X|_1 <= sqrt(d) |X|_2``.
    """
    if restarts < 1 or iters < 1:
        raise ValueError("restarts and iters must be >= 1")
    T = as_superop(T)
    d = superop_dim(T)
    upper = upper_norm_estimate(T)
    rng = np.random.default_rng(seed)
    best, witness = 0.0, ()
    for k in range(restarts):
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        y = rng.normal(size=d) + 1j * rng.normal(size=d)
        x /= np.linalg.norm(x)
        y /= np.linalg.norm(y)
        if k == 0:
            # a pure state: already optimal for positive trace-preserving maps
            y = x.copy()
        val, wit = _rank1_ascent(T, d, x, y, iters)
        if val > best:
            best, witness = val, wit
    # roundoff can push the lower estimate a hair past the upper one
    best = min(best, upper)
    return NormEstimate(lower=best, upper=float(upper), witness=witness)


def positive_map_norm(T) -> float:
    """Exact 1->1 norm of a positive map: the largest eigenvalue of T^dag(1)."""
    T = as_superop(T)
    d = superop_dim(T)
    D = devectorize(dual(T) @ vectorize(np.eye(d)), d)
    return float(np.linalg.eigvalsh(0.5 * (D + D.conj().T)).max())
