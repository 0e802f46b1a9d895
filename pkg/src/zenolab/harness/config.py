"""Scenario configuration: JSON schema, validation, builtin systems.

Complex matrices are stored row-major as nested lists of ``[re, im]`` pairs.
A scenario file looks like::

    {
      "name": "classic_zeno",
      "dim": 2,
      "measurement": {"kraus": [<matrix>, ...], "kind": "channel"},
      "generator": {"hamiltonian": <matrix>, "jumps": [<matrix>, ...]},
      "t": 1.0,
      "sweep": [4, 8, 16],
      "norm_kind": "proxy",
      "seed": 0
    }

Time-dependent scenarios replace ``generator``/``t`` with ``path`` (keyframed
generators, see :func:`path_from_json`) and give an initial state ``rho0``.
``measurement`` may instead hold an explicit ``{"superop": <matrix>}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..ensembles import random_gapped_operation, random_gksl
from ..lindblad import GeneratorPath, LindbladGenerator
from ..spectral import DEFAULT_GAP_MIN
from ..superop import DensityMatrix, KrausSet, as_superop, kraus_to_superop

STATIC_NORMS = ("proxy", "rank1_lower")
TIMEDEP_NORMS = ("trace", "proxy", "rank1_lower")
DEFAULT_SWEEP = tuple(2 ** k for k in range(2, 11))
BUILTIN_NAMES = ("classic_zeno", "damped_rabi", "timedep_drive", "random_gapped", "identity_m")
RANDOM_GAPPED_SEED = 42


class ScenarioError(ValueError):
    """A scenario file that does not parse or violates an invariant.

    ``field`` names the offending entry when there is one.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(data, field_name: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"not a matrix of [re, im] pairs ({exc})", field_name) from exc
    if arr.ndim != 3 or arr.shape[-1] != 2 or arr.shape[0] != arr.shape[1]:
        raise ScenarioError(f"expected a square matrix of [re, im] pairs, got shape {arr.shape}",
                            field_name)
    return arr[..., 0] + 1j * arr[..., 1]


def _generator_from_json(data, where: str) -> LindbladGenerator:
    H = matrix_from_json(data.get("hamiltonian"), f"{where}.hamiltonian")
    jumps = [matrix_from_json(V, f"{where}.jumps[{k}]") for k, V in enumerate(data.get("jumps", []))]
    if np.max(np.abs(H - H.conj().T)) > 1e-12:
        raise ScenarioError("hamiltonian is not Hermitian", f"{where}.hamiltonian")
    try:
        return LindbladGenerator(H, tuple(jumps))
    except ValueError as exc:
        raise ScenarioError(str(exc), where) from exc


def generator_to_json(gen: LindbladGenerator) -> dict:
    return {"hamiltonian": matrix_to_json(gen.hamiltonian),
            "jumps": [matrix_to_json(V) for V in gen.jumps]}


def path_to_json(path: GeneratorPath) -> dict:
    return {
        "dim": path.dim,
        "horizon": path.horizon,
        "keyframes": [{"t": t, **generator_to_json(g)} for t, g in zip(path.times, path.generators)],
    }


def path_from_json(data) -> GeneratorPath:
    """Parse ``{"dim", "horizon", "keyframes": [{"t", "hamiltonian", "jumps"}]}``."""
    if not isinstance(data, dict) or "keyframes" not in data:
        raise ScenarioError("expected an object with keyframes", "path")
    frames = data["keyframes"]
    times = [float(f["t"]) for f in frames]
    gens = [_generator_from_json(f, f"path.keyframes[{k}]") for k, f in enumerate(frames)]
    if "horizon" in data and abs(float(data["horizon"]) - times[-1]) > 1e-12:
        raise ScenarioError("last keyframe time must equal the horizon", "path.horizon")
    if "dim" in data and any(g.dim != int(data["dim"]) for g in gens):
        raise ScenarioError("keyframe dimension differs from dim", "path.dim")
    try:
        return GeneratorPath(tuple(times), tuple(gens))
    except ValueError as exc:
        raise ScenarioError(str(exc), "path.keyframes") from exc


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    dim: int
    M: np.ndarray
    kraus: KrausSet | None = None
    generator: LindbladGenerator | None = None
    path: GeneratorPath | None = None
    t: float = 1.0
    sweep: tuple = DEFAULT_SWEEP
    norm_kind: str = "proxy"
    seed: int = 0
    gap_min: float = DEFAULT_GAP_MIN
    rho0: DensityMatrix | None = None
    tol: float = 1e-9
    limit_tol: float = 1e-10

    def __post_init__(self):
        if (self.generator is None) == (self.path is None):
            raise ScenarioError("exactly one of generator or path is required")
        if self.M.shape != (self.dim ** 2, self.dim ** 2):
            raise ScenarioError(f"superoperator shape {self.M.shape} does not match dim", "measurement")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])) or any(n < 1 for n in self.sweep):
            raise ScenarioError("sweep must be strictly increasing positive integers", "sweep")
        allowed = TIMEDEP_NORMS if self.is_timedep else STATIC_NORMS
        if self.norm_kind not in allowed:
            raise ScenarioError(f"must be one of {allowed}", "norm_kind")
        if self.is_timedep:
            if self.rho0 is None:
                raise ScenarioError("time-dependent scenarios need an initial state", "rho0")
            if self.path.dim != self.dim:
                raise ScenarioError("path dimension differs from dim", "path")
        elif self.generator.dim != self.dim:
            raise ScenarioError("generator dimension differs from dim", "generator")
        if self.t < 0:
            raise ScenarioError("must be non-negative", "t")

    @property
    def is_timedep(self) -> bool:
        return self.path is not None

    @property
    def L(self) -> np.ndarray:
        return self.generator.superop

    def to_json(self) -> dict:
        out = {"name": self.name, "dim": self.dim}
        if self.kraus is not None:
            out["measurement"] = {"kraus": [matrix_to_json(K) for K in self.kraus.kraus_ops],
                                  "kind": self.kraus.kind}
        else:
            out["measurement"] = {"superop": matrix_to_json(self.M)}
        if self.is_timedep:
            out["path"] = path_to_json(self.path)
            out["rho0"] = matrix_to_json(self.rho0.op)
            out["tol"] = self.tol
            out["limit_tol"] = self.limit_tol
        else:
            out["generator"] = generator_to_json(self.generator)
            out["t"] = self.t
        out.update(sweep=list(self.sweep), norm_kind=self.norm_kind, seed=self.seed,
                   gap_min=self.gap_min)
        return out


def _number(data, key, default, cast=float):
    if key not in data:
        return default
    try:
        return cast(data[key])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"not a valid number: {data[key]!r}", key) from exc


def config_from_json(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ScenarioError("top level must be a JSON object")
    for key in ("name", "dim", "measurement"):
        if key not in data:
            raise ScenarioError("missing required entry", key)
    dim = _number(data, "dim", None, int)
    if dim < 1:
        raise ScenarioError("must be positive", "dim")

    meas = data["measurement"]
    kraus = None
    if "kraus" in meas:
        ops = [matrix_from_json(K, f"measurement.kraus[{k}]") for k, K in enumerate(meas["kraus"])]
        try:
            kraus = KrausSet(tuple(ops), kind=meas.get("kind", "channel"))
        except ValueError as exc:
            raise ScenarioError(str(exc), "measurement.kraus") from exc
        M = kraus_to_superop(kraus)
    elif "superop" in meas:
        A = np.asarray(meas["superop"], dtype=float)
        if A.ndim != 3 or A.shape[-1] != 2:
            raise ScenarioError("expected a matrix of [re, im] pairs", "measurement.superop")
        try:
            M = as_superop(A[..., 0] + 1j * A[..., 1])
        except ValueError as exc:
            raise ScenarioError(str(exc), "measurement.superop") from exc
    else:
        raise ScenarioError("needs 'kraus' or 'superop'", "measurement")

    generator = path = rho0 = None
    if "generator" in data:
        generator = _generator_from_json(data["generator"], "generator")
    if "path" in data:
        path = path_from_json(data["path"])
    if "rho0" in data:
        try:
            rho0 = DensityMatrix(matrix_from_json(data["rho0"], "rho0"))
        except ValueError as exc:
            raise ScenarioError(str(exc), "rho0") from exc
    t_default = path.horizon if path is not None else 1.0
    return ScenarioConfig(
        name=str(data["name"]),
        dim=dim,
        M=M,
        kraus=kraus,
        generator=generator,
        path=path,
        t=_number(data, "t", t_default),
        sweep=tuple(int(n) for n in data.get("sweep", DEFAULT_SWEEP)),
        norm_kind=data.get("norm_kind", "trace" if path is not None else "proxy"),
        seed=_number(data, "seed", 0, int),
        gap_min=_number(data, "gap_min", DEFAULT_GAP_MIN),
        rho0=rho0,
        tol=_number(data, "tol", 1e-9),
        limit_tol=_number(data, "limit_tol", 1e-10),
    )


def load_scenario(path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return config_from_json(data)


def _fixture(name: str) -> ScenarioConfig:
    ref = resources.files("zenolab") / "scenarios" / f"{name}.json"
    return config_from_json(json.loads(ref.read_text()))


def random_gapped(seed: int = RANDOM_GAPPED_SEED) -> ScenarioConfig:
    """Seeded random gapped channel M (delta <= 0.5) with a random GKLS generator."""
    rng = np.random.default_rng(seed)
    d = 2 + int(rng.integers(2))
    M, ks = random_gapped_operation(d, rng, max_delta=0.5, family="channel")
    return ScenarioConfig(name="random_gapped", dim=d, M=M, kraus=ks,
                          generator=random_gksl(d, rng), t=1.0, seed=seed)


def builtin_scenario(name: str, seed: int | None = None) -> ScenarioConfig:
    if name == "random_gapped":
        return random_gapped(RANDOM_GAPPED_SEED if seed is None else seed)
    if name not in BUILTIN_NAMES:
        raise ScenarioError(f"unknown builtin scenario {name!r}; choose from {BUILTIN_NAMES}")
    cfg = _fixture(name)
    return cfg if seed is None else replace(cfg, seed=seed)


def builtin_scenarios() -> list[ScenarioConfig]:
    return [builtin_scenario(name) for name in BUILTIN_NAMES]


def resolve_scenario(name_or_path: str, seed: int | None = None) -> ScenarioConfig:
    """A builtin name or a path to a scenario file."""
    if name_or_path in BUILTIN_NAMES:
        return builtin_scenario(name_or_path, seed)
    cfg = load_scenario(name_or_path)
    return cfg if seed is None else replace(cfg, seed=seed)
