"""Self-check suites behind ``zeno check``.

Each suite draws seeded random instances, evaluates one inequality in its
sound form (lower estimate of the left side against an upper estimate of the
right side) and reports the worst case.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..ensembles import random_channel, random_gapped_operation, random_gksl
from ..lindblad import GeneratorPath
from ..spectral import power_limit_projector, riesz_contour, riesz_schur, spectrum_report
from ..superop import classify_map, kraus_to_superop, proxy_norm
from ..timedep import InterceptedConfig, piecewise_constant_bound, telescoping_check
from ..zeno_static import chernoff_gap
from .config import builtin_scenario

SUITES = ("chernoff", "lemma4", "projectors", "telescoping")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.elapsed:.2f}s)"


def _timed(name, fn):
    start = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, passed, detail, time.perf_counter() - start)


def check_chernoff(count: int = 100, ns=(1, 2, 4, 8, 16, 32, 64), seed: int = 2024,
                   slack: float = 1e-9) -> CheckResult:
    """|C^n - e^{n(C-1)}| <= sqrt(n) |C-1| on random qubit and qutrit channels."""
    def run():
        rng = np.random.default_rng(seed)
        worst, violations = 0.0, 0
        for k in range(count):
            d = 2 + k % 2
            C = kraus_to_superop(random_channel(d, int(rng.integers(1, d * d + 1)), rng))
            for n in ns:
                lhs, rhs = chernoff_gap(C, n, seed=k)
                violations += lhs > rhs + slack
                if rhs > 0:
                    worst = max(worst, lhs / rhs)
        return violations == 0, f"{count} channels x {len(ns)} n, max lhs/rhs = {worst:.4f}, violations = {violations}"
    return _timed("chernoff", run)


def check_projectors(count: int = 50, seed: int = 7, agree: float = 1e-8,
                     idem: float = 1e-10, op_tol: float = 1e-7) -> CheckResult:
    """Contour, Schur and power-limit projectors agree and are quantum operations."""
    def run():
        rng = np.random.default_rng(seed)
        worst_gap = worst_idem = 0.0
        non_ops = 0
        for k in range(count):
            d = 2 + k % 2
            M, _ = random_gapped_operation(d, rng)
            rep = spectrum_report(M)
            ps = [riesz_contour(M, rep.outer_contour()),
                  riesz_schur(M, 1.0, (1 - rep.delta) / 2),
                  power_limit_projector(M)]
            for i in range(3):
                for j in range(i + 1, 3):
                    worst_gap = max(worst_gap, proxy_norm(ps[i].proj - ps[j].proj))
            worst_idem = max(worst_idem, *(p.idempotency_defect for p in ps))
            non_ops += sum(not classify_map(p.proj, op_tol).is_operation for p in ps)
        ok = worst_gap <= agree and worst_idem <= idem and non_ops == 0
        return ok, (f"{count} operations, max pairwise distance = {worst_gap:.2e}, "
                    f"max idempotency defect = {worst_idem:.2e}, non-operations = {non_ops}")
    return _timed("projectors", run)


def check_frozen_generator(seed: int = 11, ts=(0.0, 0.3, 0.6), deltas=(0.1, 0.05, 0.025),
                 slack: float = 1e-8) -> CheckResult:
    """Frozen-generator approximation of the propagator on a random linear qubit path."""
    def run():
        rng = np.random.default_rng(seed)
        path = GeneratorPath.linear(random_gksl(2, rng), random_gksl(2, rng))
        worst, violations = 0.0, 0
        for t in ts:
            for s in ts:
                for delta in deltas:
                    lhs, rhs = piecewise_constant_bound(path, t, s, delta, seed=seed)
                    violations += lhs > rhs + slack
                    worst = max(worst, lhs / rhs)
        return violations == 0, (f"L = {path.lipschitz_bound:.4f}, {len(ts) ** 2 * len(deltas)} "
                                 f"grid points, max lhs/rhs = {worst:.4f}, violations = {violations}")
    return _timed("lemma4", run)


def check_telescoping(ms=(2, 4, 8), factor: int = 64, seed: int = 0) -> CheckResult:
    """Coarse-grained products stay within 3L/m of the true intercepted evolution."""
    def run():
        cfg = builtin_scenario("timedep_drive")
        parts, ok = [], True
        for m in ms:
            dist, bound = telescoping_check(
                InterceptedConfig(cfg.M, cfg.path, factor * m, m, tol=cfg.tol), seed=seed)
            ok &= dist <= bound
            parts.append(f"m={m}: {dist:.3e} <= {bound:.3e}")
        return ok, "; ".join(parts)
    return _timed("telescoping", run)


RUNNERS = {
    "chernoff": check_chernoff,
    "lemma4": check_frozen_generator,
    "projectors": check_projectors,
    "telescoping": check_telescoping,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [RUNNERS[s]() for s in SUITES]
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    return [RUNNERS[name]()]
