"""Seeded random channels, gapped operations and GKLS generators."""
from __future__ import annotations

import numpy as np

from .lindblad import LindbladGenerator
from .spectral import DEFAULT_GAP_MIN, spectrum_report
from .superop import KrausSet, kraus_to_superop


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def random_channel(d: int, rank: int, rng: np.random.Generator) -> KrausSet:
    """Channel from a Haar-like random isometry C^d -> C^d (x) C^rank."""
    Q, R = np.linalg.qr(_ginibre(rng, rank * d, d))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return KrausSet(tuple(Q[i * d:(i + 1) * d] for i in range(rank)))


def _embedded(ks: KrausSet, basis: list[int], d: int) -> list[np.ndarray]:
    E = np.eye(d)[:, basis]
    return [E @ K @ E.T for K in ks.kraus_ops]


def _block_channel(d: int, rng: np.random.Generator) -> KrausSet:
    """Channel acting independently inside diagonal blocks, killing coherences between them."""
    split = int(rng.integers(1, d))
    blocks = [list(range(split)), list(range(split, d))]
    ops = []
    for b in blocks:
        k = len(b)
        inner = KrausSet((np.eye(k),)) if k == 1 else random_channel(k, int(rng.integers(2, k * k + 1)), rng)
        ops += _embedded(inner, b, d)
    return KrausSet(tuple(ops))


def _lossy_operation(d: int, rng: np.random.Generator) -> KrausSet:
    """Random channel on a subspace; population outside it is discarded."""
    k = max(1, d - 1)
    basis = sorted(rng.choice(d, size=k, replace=False).tolist())
    inner = KrausSet((np.eye(1),)) if k == 1 else random_channel(k, int(rng.integers(2, k * k + 1)), rng)
    return KrausSet(tuple(_embedded(inner, basis, d)), kind="operation")


def random_gapped_operation(d: int, rng: np.random.Generator, max_delta: float = 0.5,
                            gap_min: float = DEFAULT_GAP_MIN, family: str | None = None,
                            max_tries: int = 1000) -> tuple[np.ndarray, KrausSet]:
    """Superoperator and Kraus data of a quantum operation with an isolated eigenvalue 1.

    ``family`` is one of ``"channel"``, ``"block"``, ``"lossy"`` or None for a
    random pick.  Draws are rejected until the gap condition holds with
    delta <= ``max_delta``.
    """
    families = ("channel", "block", "lossy")
    for _ in range(max_tries):
        fam = family or families[int(rng.integers(len(families)))]
        if fam == "channel":
            ks = random_channel(d, int(rng.integers(2, d * d + 1)), rng)
        elif fam == "block":
            ks = _block_channel(d, rng)
        elif fam == "lossy":
            ks = _lossy_operation(d, rng)
        else:
            raise ValueError(f"unknown family {fam!r}")
        M = kraus_to_superop(ks)
        rep = spectrum_report(M, gap_min)
        if rep.gap_ok and rep.delta <= max_delta:
            return M, ks
    raise RuntimeError(f"no gapped operation found in {max_tries} draws")


def random_gksl(d: int, rng: np.random.Generator, n_jumps: int = 2,
                scale: float = 1.0) -> LindbladGenerator:
    G = _ginibre(rng, d, d)
    H = scale * (G + G.conj().T) / (2 * np.sqrt(d))
    jumps = tuple(scale * _ginibre(rng, d, d) / np.sqrt(2 * d) for _ in range(n_jumps))
    return LindbladGenerator(H, jumps)


def random_superop(d: int, rng: np.random.Generator) -> np.ndarray:
    return _ginibre(rng, d * d, d * d)
