"""Quantum Zeno limits of intercepted open-system evolutions.

Superoperators are plain ``(d*d, d*d)`` complex arrays acting on
column-stacked density matrices.
"""
from .errors import ConvergenceError, GapError, SpectralError, WindowError
from .lindblad import GeneratorPath, LindbladGenerator, build_generator, check_generator
from .spectral import eigenprojector, spectrum_report
from .superop import (
    DensityMatrix,
    KrausSet,
    apply,
    classify_map,
    expm_superop,
    kraus_to_superop,
    norm_1to1_estimate,
)
from .timedep import InterceptedConfig, intercepted_product, propagate, zeno_limit_timedep
from .zeno_static import ZenoStaticScenario, zeno_limit_static, zeno_product

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "GapError", "SpectralError", "WindowError",
    "GeneratorPath", "LindbladGenerator", "build_generator", "check_generator",
    "eigenprojector", "spectrum_report",
    "DensityMatrix", "KrausSet", "apply", "classify_map", "expm_superop",
    "kraus_to_superop", "norm_1to1_estimate",
    "InterceptedConfig", "intercepted_product", "propagate", "zeno_limit_timedep",
    "ZenoStaticScenario", "zeno_limit_static", "zeno_product",
]
