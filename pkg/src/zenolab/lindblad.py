"""GKLS generators and piecewise-linear generator paths t -> L_t."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .superop import (
    DimensionError,
    HERMITIAN_TOL,
    as_operator,
    choi_matrix,
    expm_superop,
    superop_dim,
    upper_norm_estimate,
    vectorize,
)

# e^{sA} must be CP at these s for check_generator; a sampled, sufficient-in-practice test.
CP_SAMPLE_TIMES = (0.1, 0.5, 1.0)


def build_generator(H, jumps: Sequence = ()) -> np.ndarray:
    """Superoperator of rho -> -i[H, rho] + sum_k (V rho V^+ - {V^+ V, rho}/2)."""
    H = as_operator(H, "hamiltonian")
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL:
        raise ValueError("hamiltonian is not Hermitian")
    d = H.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for V in jumps:
        V = as_operator(V, "jump operator")
        if V.shape != (d, d):
            raise DimensionError(f"jump operator has shape {V.shape}, expected {(d, d)}")
        VdV = V.conj().T @ V
        L = L + np.kron(V.conj(), V) - 0.5 * (np.kron(eye, VdV) + np.kron(VdV.T, eye))
    return L


def check_generator(A, tol: float = 1e-8) -> bool:
    """True if ``A`` annihilates the trace and e^{sA} is CP at a few sample times."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=complex)
    d = superop_dim(A)
    vid = vectorize(np.eye(d))
    if np.max(np.abs(vid.conj() @ A), initial=0.0) > tol:
        return False
    for s in CP_SAMPLE_TIMES:
        J = choi_matrix(expm_superop(A, s))
        if np.max(np.abs(J - J.conj().T), initial=0.0) > tol:
            return False
        if np.linalg.eigvalsh(0.5 * (J + J.conj().T)).min() < -tol:
            return False
    return True


@dataclass(frozen=True)
class LindbladGenerator:
    hamiltonian: np.ndarray
    jumps: tuple = ()

    def __post_init__(self):
        H = as_operator(self.hamiltonian, "hamiltonian")
        if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL:
            raise ValueError("hamiltonian is not Hermitian")
        jumps = tuple(as_operator(V, "jump operator") for V in self.jumps)
        if any(V.shape != H.shape for V in jumps):
            raise DimensionError("jump operators must match the hamiltonian dimension")
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def superop(self) -> np.ndarray:
        return build_generator(self.hamiltonian, self.jumps)

    def mix(self, other: "LindbladGenerator", lam: float) -> "LindbladGenerator":
        """GKLS data whose superoperator is (1-lam)*self + lam*other."""
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"mixing weight {lam} outside [0, 1]")
        if lam == 0.0:
            return self
        if lam == 1.0:
            return other
        H = (1 - lam) * self.hamiltonian + lam * other.hamiltonian
        jumps = [np.sqrt(1 - lam) * V for V in self.jumps]
        jumps += [np.sqrt(lam) * V for V in other.jumps]
        return LindbladGenerator(H, tuple(jumps))


def _segment_slopes(times: np.ndarray, superops: np.ndarray) -> np.ndarray:
    dt = np.diff(times)
    return np.array([upper_norm_estimate(superops[j + 1] - superops[j]) / dt[j]
                     for j in range(len(dt))])


@dataclass(frozen=True)
class GeneratorPath:
    """Lipschitz path of generators, linear between keyframes.

    ``lipschitz_bound`` defaults to the certified value computed from the
    keyframes; a caller-supplied bound may only be larger.
    """

    times: tuple
    generators: tuple
    lipschitz_bound: float | None = field(default=None)

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        gens = tuple(self.generators)
        if len(times) != len(gens) or len(times) < 2:
            raise ValueError("a path needs at least two keyframes, one generator per time")
        if times[0] != 0.0:
            raise ValueError("first keyframe must be at t = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        d = gens[0].dim
        if any(g.dim != d for g in gens):
            raise DimensionError("keyframe generators have mismatched dimensions")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "generators", gens)
        certified = path_lipschitz(self)
        if self.lipschitz_bound is None:
            object.__setattr__(self, "lipschitz_bound", certified)
        elif self.lipschitz_bound < certified * (1 - 1e-9):
            raise ValueError(
                f"lipschitz_bound {self.lipschitz_bound} below certified value {certified}")

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    @property
    def horizon(self) -> float:
        return self.times[-1]

    @cached_property
    def keyframe_superops(self) -> np.ndarray:
        return np.stack([g.superop for g in self.generators])

    def _locate(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts < 0) or np.any(ts > self.horizon):
            raise ValueError(f"time outside [0, {self.horizon}]")
        times = np.asarray(self.times)
        j = np.clip(np.searchsorted(times, ts, side="right") - 1, 0, len(times) - 2)
        lam = (ts - times[j]) / (times[j + 1] - times[j])
        return j, lam

    def eval_many(self, ts) -> np.ndarray:
        """Stack of generator superoperators at the times ``ts``."""
        j, lam = self._locate(ts)
        K = self.keyframe_superops
        return (1 - lam)[:, None, None] * K[j] + lam[:, None, None] * K[j + 1]

    def generator_at(self, t: float) -> LindbladGenerator:
        j, lam = self._locate(t)
        return self.generators[j[0]].mix(self.generators[j[0] + 1], float(lam[0]))

    @classmethod
    def constant(cls, gen: LindbladGenerator, horizon: float = 1.0) -> "GeneratorPath":
        return cls((0.0, horizon), (gen, gen))

    @classmethod
    def linear(cls, start: LindbladGenerator, end: LindbladGenerator,
               horizon: float = 1.0) -> "GeneratorPath":
        return cls((0.0, horizon), (start, end))


def path_eval(path: GeneratorPath, t: float) -> np.ndarray:
    """L_t by linear interpolation; exact at keyframe times."""
    j, lam = path._locate(t)
    K = path.keyframe_superops
    if lam[0] == 0.0:
        return K[j[0]].copy()
    if lam[0] == 1.0:
        return K[j[0] + 1].copy()
    return (1 - lam[0]) * K[j[0]] + lam[0] * K[j[0] + 1]


def path_lipschitz(path: GeneratorPath) -> float:
    """Certified Lipschitz constant: max segment slope in the upper 1->1 estimate."""
    slopes = _segment_slopes(np.asarray(path.times), path.keyframe_superops)
    return float(slopes.max(initial=0.0))
