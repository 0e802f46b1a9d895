"""Zeno limit for a time-independent generator.

A fixed generator L runs for total time t while a gapped operation M
intercepts it n times.  As n grows, (M e^{tL/n})^n approaches e^{t PLP} P,
where P is the eigenvalue-1 projector of M.  This module evaluates both sides,
the projected products that split the argument into two steps, and the
Chernoff inequality those steps rely on.

Products are composed right-to-left: the first map applied sits rightmost.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import WindowError
from .lindblad import check_generator
from .spectral import (
    DEFAULT_GAP_MIN,
    RieszProjector,
    SpectralReport,
    epsilon_window,
    projector_at,
    require_gap,
    resolvent_sup,
    riesz_contour,
)
from .superop import (
    as_superop,
    classify_map,
    expm_superop,
    identity_superop,
    norm_1to1_estimate,
    positive_map_norm,
    proxy_norm,
    superop_dim,
    upper_norm_estimate,
)

NORM_KINDS = ("proxy", "rank1_lower")
BINARY_POWER_THRESHOLD = 2 ** 10
# grid for the admissible-step scan on the normalised interval [0, 1]
WINDOW_GRID = 64


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    error: float
    norm_kind: str

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not np.isfinite(self.error) or self.error < 0:
            raise ValueError(f"bad error value {self.error!r}")


def measure(D, norm_kind: str, seed: int = 0) -> float:
    """Size of a superoperator difference in the requested norm."""
    if norm_kind == "proxy":
        return proxy_norm(D)
    if norm_kind == "rank1_lower":
        return norm_1to1_estimate(D, restarts=4, iters=30, seed=seed).lower
    raise ValueError(f"unknown norm kind {norm_kind!r}; expected one of {NORM_KINDS}")


@dataclass(frozen=True)
class ZenoStaticScenario:
    M: np.ndarray
    L: np.ndarray
    t: float = 1.0
    gap_min: float = DEFAULT_GAP_MIN
    validate_generator: bool = field(default=True, compare=False)

    def __post_init__(self):
        M = as_superop(self.M, "M")
        L = as_superop(self.L, "L")
        if M.shape != L.shape:
            raise ValueError(f"M {M.shape} and L {L.shape} act on different spaces")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "L", L)
        require_gap(M, self.gap_min)
        if self.validate_generator and not check_generator(L):
            raise ValueError("L is not a GKLS generator")

    @property
    def dim(self) -> int:
        return superop_dim(self.M)

    @cached_property
    def report(self) -> SpectralReport:
        return require_gap(self.M, self.gap_min)

    @cached_property
    def projector(self) -> RieszProjector:
        return riesz_contour(self.M, self.report.outer_contour())

    @property
    def P(self) -> np.ndarray:
        return self.projector.proj

    @cached_property
    def window(self) -> float:
        """Admissible step fraction epsilon for the rescaled generator tL."""
        return epsilon_window(self.M, self.t * self.L, 1.0, WINDOW_GRID, self.gap_min)

    def require_admissible(self, n: int) -> None:
        eps = self.window
        if eps == 0.0:
            raise WindowError("separation window estimate is 0; refusing to extrapolate")
        if n * eps < 1.0:
            raise WindowError(f"n = {n} is below 1/epsilon = {1 / eps:.6g}")


def _power(A: np.ndarray, n: int) -> np.ndarray:
    if n >= BINARY_POWER_THRESHOLD:
        return np.linalg.matrix_power(A, n)
    out = A
    for _ in range(n - 1):
        out = A @ out
    return out


def zeno_product(s: ZenoStaticScenario, n: int) -> np.ndarray:
    """(M e^{tL/n})^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _power(s.M @ expm_superop(s.L, s.t / n), n)


def zeno_limit_static(s: ZenoStaticScenario) -> np.ndarray:
    """e^{t PLP} P."""
    P = s.P
    return expm_superop(P @ s.L @ P, s.t) @ P


def convergence_curve(s: ZenoStaticScenario, ns: Sequence[int], norm_kind: str = "proxy",
                      seed: int = 0, workers: int | None = None) -> list[ConvergenceRecord]:
    """Distance between the n-step Zeno product and the limit, for each n in ``ns``.

    Entries are independent; with ``workers`` they are evaluated on a thread
    pool and returned in input order.
    """
    if not ns or any(n < 1 for n in ns):
        raise ValueError("ns must be a nonempty list of positive integers")
    if norm_kind not in NORM_KINDS:
        raise ValueError(f"unknown norm kind {norm_kind!r}")
    limit = zeno_limit_static(s)

    def one(n):
        return ConvergenceRecord(int(n), measure(zeno_product(s, n) - limit, norm_kind, seed),
                                 norm_kind)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, ns))
    return [one(n) for n in ns]


def chernoff_gap(C, n: int, seed: int = 0, restarts: int = 4, iters: int = 30):
    """Both sides of |C^n - e^{n(C-1)}| <= sqrt(n) |C - 1| for a contraction C.

    Returns ``(lhs_lower, rhs)``: a rank-one lower estimate of the left side
    and sqrt(n) times a certified upper estimate of |C - 1|, so that
    ``lhs_lower <= rhs`` is implied by the inequality.

    The contraction precondition uses the exact norm |C^dag(1)|_inf when C is a
    positive map, otherwise the generic upper estimate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    C = as_superop(C)
    if classify_map(C, 1e-10).cp:
        cnorm = positive_map_norm(C)
    else:
        cnorm = upper_norm_estimate(C)
    if cnorm > 1 + 1e-9:
        raise ValueError(f"C is not a contraction (norm bound {cnorm:.6g})")
    one = identity_superop(superop_dim(C))
    D = _power(C, n) - expm_superop(C - one, n)
    lhs = norm_1to1_estimate(D, restarts=restarts, iters=iters, seed=seed).lower
    rhs = np.sqrt(n) * upper_norm_estimate(C - one)
    return lhs, float(rhs)


def _step_projector(s: ZenoStaticScenario, n: int):
    s.require_admissible(n)
    A = s.M @ expm_superop(s.L, s.t / n)
    Pn = projector_at(s.M, s.t * s.L, 1.0 / n, s.report).proj
    return A, Pn


def projected_zeno_product(s: ZenoStaticScenario, n: int) -> np.ndarray:
    """(P_{1/n} M e^{tL/n} P_{1/n})^n, with P_{1/n} the eigenvalue-1 projector of M e^{tL/n}."""
    A, Pn = _step_projector(s, n)
    return _power(Pn @ A @ Pn, n)


def central_quantity(s: ZenoStaticScenario, n: int) -> np.ndarray:
    """n (C - P_{1/n}) with C = P_{1/n} M e^{tL/n} P_{1/n}.

    The total time is folded into the generator (L -> tL), so the limit as
    n -> oo is t PLP.
    """
    A, Pn = _step_projector(s, n)
    return n * (Pn @ A @ Pn - Pn)


def projection_decay_certificate(s: ZenoStaticScenario, n: int, t_grid: int = 9) -> tuple[float, float]:
    """Proxy distance between the plain and projected products, and its decay bound.

    The bound is ((1 + delta)/2)^(n+1) times the sampled resolvent supremum on
    the inner circle.
    """
    gap = proxy_norm(zeno_product(s, n) - projected_zeno_product(s, n))
    inner = s.report.inner_contour()
    bound = inner.radius ** (n + 1) * resolvent_sup(s.M, s.t * s.L, inner, t_grid, n)
    return gap, bound


@dataclass(frozen=True)
class GeneratorVariants:
    plp: np.ndarray
    pl: np.ndarray
    shifted: np.ndarray
    max_distance: float


def generator_variants(P, L) -> GeneratorVariants:
    """PLP, PL and P(id + L) - id, which all give the same e^{G} P."""
    P = as_superop(P)
    L = as_superop(L)
    if proxy_norm(P @ P - P) > 1e-8:
        raise ValueError("P is not idempotent")
    one = identity_superop(superop_dim(P))
    plp, pl, shifted = P @ L @ P, P @ L, P @ (one + L) - one
    flows = [expm_superop(G) @ P for G in (plp, pl, shifted)]
    dist = max(proxy_norm(a - b) for i, a in enumerate(flows) for b in flows[i + 1:])
    return GeneratorVariants(plp, pl, shifted, dist)
