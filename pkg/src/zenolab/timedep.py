"""Zeno limit for time-dependent generators.

Propagators T[t, s] of d rho/dt = L_t(rho) are built as products of midpoint
exponentials, refined by step halving.  On top of them sit the intercepted
evolution T_n = prod_i M T[i tau/n, (i-1) tau/n], its piecewise-constant
counterpart with coarse-grained generators, and the projected limit.

Time-ordered products put later factors on the left.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError
from .lindblad import GeneratorPath, path_eval, path_lipschitz
from .spectral import DEFAULT_GAP_MIN, epsilon_window, require_gap
from .superop import (
    as_superop,
    expm_superop,
    identity_superop,
    norm_1to1_estimate,
    proxy_norm,
)

MAX_STEPS = 2 ** 20
# bound on complex entries held in memory per batched exponential
_BATCH_ENTRIES = 2 ** 22

GeneratorFn = Callable[[np.ndarray], np.ndarray]


def ordered_product(stack: np.ndarray) -> np.ndarray:
    """stack[-1] @ ... @ stack[0] by pairwise (tree) reduction."""
    while len(stack) > 1:
        if len(stack) % 2:
            head = stack[1:-1:2] @ stack[0:-1:2]
            stack = np.concatenate([head, stack[-1:]])
        else:
            stack = stack[1::2] @ stack[0::2]
    return stack[0]


def _midpoint_product(gen: GeneratorFn, s: float, t: float, steps: int, dim2: int) -> np.ndarray:
    h = (t - s) / steps
    chunk = max(16, _BATCH_ENTRIES // (dim2 * dim2))
    out = np.eye(dim2, dtype=complex)
    for lo in range(0, steps, chunk):
        k = np.arange(lo, min(steps, lo + chunk))
        mids = s + h * (k + 0.5)
        out = ordered_product(expm_superop(gen(mids), h)) @ out
    return out


def propagate_fn(gen: GeneratorFn, dim2: int, s: float, t: float, tol: float = 1e-10,
                 max_steps: int | None = None) -> np.ndarray:
    """Propagator of a generator family given as a vectorised callable.

    Steps double from 1 up to ``max_steps`` (default MAX_STEPS).
    """
    if max_steps is None:
        max_steps = MAX_STEPS
    if t < s:
        raise ValueError(f"need s <= t, got s = {s}, t = {t}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t == s:
        return identity_superop(int(round(np.sqrt(dim2))))
    steps = 1
    prev = _midpoint_product(gen, s, t, steps, dim2)
    while steps < max_steps:
        steps *= 2
        cur = _midpoint_product(gen, s, t, steps, dim2)
        if proxy_norm(cur - prev) < tol:
            return cur
        prev = cur
    raise ConvergenceError(f"propagator on [{s}, {t}] not converged at {max_steps} steps")


def propagate(path: GeneratorPath, s: float, t: float, tol: float = 1e-10) -> np.ndarray:
    """T[t, s]: evolution from time s to time t >= s along ``path``."""
    if not 0 <= s <= t <= path.horizon:
        raise ValueError(f"need 0 <= s <= t <= {path.horizon}, got s = {s}, t = {t}")
    return propagate_fn(path.eval_many, path.dim ** 2, s, t, tol)


def piecewise_constant_bound(path: GeneratorPath, t: float, s: float, delta: float,
                             tol: float = 1e-12, seed: int = 0) -> tuple[float, float]:
    """Compare T[t + delta, t] with the frozen-generator flow e^{delta L_s}.

    Returns ``(lhs_lower, rhs)`` where lhs_lower is a rank-one lower estimate
    of the distance and rhs = L (delta |t - s| + delta^2 / 2) with the
    certified Lipschitz constant L.
    """
    if delta < 0 or t < 0 or t + delta > path.horizon:
        raise ValueError("need 0 <= t and t + delta <= horizon")
    if not 0 <= s <= path.horizon:
        raise ValueError(f"s = {s} outside [0, {path.horizon}]")
    D = propagate(path, t, t + delta, tol) - expm_superop(path_eval(path, s), delta)
    lhs = norm_1to1_estimate(D, restarts=4, iters=30, seed=seed).lower
    rhs = path_lipschitz(path) * (delta * abs(t - s) + delta ** 2 / 2)
    return lhs, float(rhs)


@dataclass(frozen=True)
class InterceptedConfig:
    M: np.ndarray
    path: GeneratorPath
    n: int
    m: int | None = None
    tol: float = 1e-9
    gap_min: float = DEFAULT_GAP_MIN

    def __post_init__(self):
        M = as_superop(self.M, "M")
        if M.shape[0] != self.path.dim ** 2:
            raise ValueError("M and the generator path act on different spaces")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m is not None and not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m = {self.m}, n = {self.n}")
        require_gap(M, self.gap_min)
        object.__setattr__(self, "M", M)

    @property
    def horizon(self) -> float:
        return self.path.horizon


def intercepted_product(cfg: InterceptedConfig) -> np.ndarray:
    """M T[n] ... M T[1] over n equal sub-intervals, tolerance tol/n per factor."""
    tau, n = cfg.horizon, cfg.n
    out = identity_superop(cfg.path.dim)
    for i in range(1, n + 1):
        T = propagate(cfg.path, (i - 1) * tau / n, min(i * tau / n, tau), cfg.tol / n)
        out = cfg.M @ T @ out
    return out


def theta_step(i: int, n: int, m: int) -> float:
    """Coarse cell time ceil(i m / n) / m of fine step i."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m = {m}, n = {n}")
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got i = {i}")
    return float(Fraction(-(-i * m // n), m))


def w_pair(cfg: InterceptedConfig) -> tuple[np.ndarray, np.ndarray]:
    """The intercepted evolution and its coarse-grained counterpart.

    The second factor sequence replaces each propagator on step i by
    M e^{(tau/n) L_{theta(i) tau}}; on a unit horizon this is the usual
    product over theta.
    """
    if cfg.m is None:
        raise ValueError("w_pair needs the coarse resolution m")
    tau, n, m = cfg.horizon, cfg.n, cfg.m
    W = intercepted_product(cfg)
    cells = cfg.path.eval_many(tau * np.arange(1, m + 1) / m)
    factors = cfg.M @ expm_superop(cells, tau / n)
    Wp = identity_superop(cfg.path.dim)
    for i in range(1, n + 1):
        j = -(-i * m // n)
        Wp = factors[j - 1] @ Wp
    return W, Wp


def telescoping_check(cfg: InterceptedConfig, seed: int = 0) -> tuple[float, float]:
    """Rank-one lower estimate of |W - W'| and the bound 3 L / m.

    For a horizon tau the generator path is rescaled to the unit interval,
    which multiplies the Lipschitz constant by tau^2.
    """
    W, Wp = w_pair(cfg)
    dist = norm_1to1_estimate(W - Wp, restarts=4, iters=30, seed=seed).lower
    bound = 3 * path_lipschitz(cfg.path) * cfg.horizon ** 2 / cfg.m
    return dist, float(bound)


def coarse_cell_windows(M, path: GeneratorPath, m: int, grid: int = 64,
                        gap_min: float = DEFAULT_GAP_MIN) -> np.ndarray:
    """Separation window of M e^{s (tau/m) L_{j tau/m}} for each coarse cell j.

    Inside cell j the fine steps must satisfy (n/m) * window_j >= 1; a zero
    entry flags a cell where that cannot be certified.
    """
    tau = path.horizon
    cells = path.eval_many(tau * np.arange(1, m + 1) / m)
    return np.array([epsilon_window(M, (tau / m) * G, 1.0, grid, gap_min) for G in cells])


def zeno_limit_timedep(P, path: GeneratorPath, tol: float = 1e-10) -> np.ndarray:
    """Propagator of the projected generators P L_t P over [0, tau], followed after P."""
    P = as_superop(P)
    if proxy_norm(P @ P - P) > 1e-8:
        raise ValueError("P is not idempotent")
    U = propagate_fn(lambda ts: P @ path.eval_many(ts) @ P, path.dim ** 2, 0.0, path.horizon, tol)
    return U @ P


def wprime_m(P, path: GeneratorPath, m: int) -> np.ndarray:
    """prod_j e^{(tau/m) P L_{j tau/m} P} P, time-ordered over j = 1..m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    P = as_superop(P)
    tau = path.horizon
    cells = P @ path.eval_many(tau * np.arange(1, m + 1) / m) @ P
    return ordered_product(expm_superop(cells, tau / m)) @ P


def reparameterize_path(path: GeneratorPath, nu_keyframes: Sequence[tuple[float, float]]
                        ) -> GeneratorPath:
    """Path u -> L_{nu(u)} for a nondecreasing piecewise-linear time change nu.

    ``nu_keyframes`` lists ``(u, nu(u))`` pairs with nu(0) = 0 and nu ending at
    the horizon of ``path``.  Running equally spaced interceptions on the new
    path is the same as intercepting the old one at times nu(i/n).
    """
    us = np.array([float(u) for u, _ in nu_keyframes])
    vs = np.array([float(v) for _, v in nu_keyframes])
    if len(us) < 2 or us[0] != 0.0 or np.any(np.diff(us) <= 0):
        raise ValueError("nu keyframes need strictly increasing u starting at 0")
    if vs[0] != 0.0 or abs(vs[-1] - path.horizon) > 1e-12:
        raise ValueError(f"nu must map 0 -> 0 and end at the horizon {path.horizon}")
    if np.any(np.diff(vs) < 0):
        raise ValueError("nu must be nondecreasing")
    vs[-1] = path.horizon
    slopes = np.diff(vs) / np.diff(us)
    lip_nu = float(slopes.max())

    breaks = set(us.tolist())
    for a in range(len(us) - 1):
        if slopes[a] == 0:
            continue
        for tk in path.times[1:-1]:
            if vs[a] < tk < vs[a + 1]:
                breaks.add(us[a] + (tk - vs[a]) / slopes[a])
    grid = np.array(sorted(breaks))
    keep = np.concatenate([[True], np.diff(grid) > 1e-14 * max(1.0, grid[-1])])
    grid = grid[keep]
    grid[-1] = us[-1]

    gens = []
    for u in grid:
        v = float(np.interp(u, us, vs))
        gens.append(path.generator_at(min(max(v, 0.0), path.horizon)))
    return GeneratorPath(tuple(grid.tolist()), tuple(gens),
                         lipschitz_bound=lip_nu * path.lipschitz_bound)
