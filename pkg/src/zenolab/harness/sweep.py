"""Convergence sweeps over the number of interceptions n."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..spectral import eigenprojector, require_gap
from ..superop import apply, trace_norm
from ..timedep import InterceptedConfig, intercepted_product, zeno_limit_timedep
from ..zeno_static import (
    ConvergenceRecord,
    ZenoStaticScenario,
    convergence_curve,
    measure,
)
from .config import ScenarioConfig


@dataclass(frozen=True)
class ExperimentResult:
    scenario: str
    records: tuple
    slope: float | None
    final_error: float | None
    metadata: dict = field(default_factory=dict, compare=False)


def loglog_slope(records) -> float | None:
    """Least-squares slope of log(error) against log(n); None with fewer than two positive errors."""
    pts = [(r.n, r.error) for r in records if r.error > 0]
    if len(pts) < 2:
        return None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _static_records(cfg: ScenarioConfig, workers):
    scen = ZenoStaticScenario(cfg.M, cfg.L, cfg.t, cfg.gap_min)
    if not cfg.sweep:
        return []
    return convergence_curve(scen, list(cfg.sweep), cfg.norm_kind, cfg.seed, workers)


def _timedep_records(cfg: ScenarioConfig, workers):
    require_gap(cfg.M, cfg.gap_min)
    P = eigenprojector(cfg.M, cfg.gap_min).proj
    limit = zeno_limit_timedep(P, cfg.path, cfg.limit_tol)
    rho0 = cfg.rho0.op
    target = apply(limit, rho0)

    def one(n):
        Tn = intercepted_product(InterceptedConfig(cfg.M, cfg.path, n, tol=cfg.tol,
                                                   gap_min=cfg.gap_min))
        if cfg.norm_kind == "trace":
            err = trace_norm(apply(Tn, rho0) - target)
        else:
            err = measure(Tn - limit, cfg.norm_kind, cfg.seed)
        return ConvergenceRecord(int(n), err, cfg.norm_kind)

    return _map(one, cfg.sweep, workers)


def run_sweep(cfg: ScenarioConfig, workers: int | None = None) -> ExperimentResult:
    """Distance to the Zeno limit for every n in the scenario's sweep.

    Static scenarios compare superoperators; time-dependent ones compare the
    evolved initial state in trace norm unless another norm is configured.
    Deterministic for a fixed configuration and seed.
    """
    start = time.perf_counter()
    records = _timedep_records(cfg, workers) if cfg.is_timedep else _static_records(cfg, workers)
    meta = {
        "kind": "timedep" if cfg.is_timedep else "static",
        "seed": cfg.seed,
        "gap_min": cfg.gap_min,
        "norm_kind": cfg.norm_kind,
        "sweep": list(cfg.sweep),
    }
    if cfg.is_timedep:
        meta.update(tol=cfg.tol, limit_tol=cfg.limit_tol, horizon=cfg.path.horizon)
    else:
        meta["t"] = cfg.t
    meta["wall_time_s"] = time.perf_counter() - start
    return ExperimentResult(
        scenario=cfg.name,
        records=tuple(records),
        slope=loglog_slope(records),
        final_error=records[-1].error if records else None,
        metadata=meta,
    )
