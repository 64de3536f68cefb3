"""Morse homology engine: critical points, gradient-flow counting, GF(2)
homology, spectral numbers, continuation maps and Fredholm index checks."""

from ._core import (  # noqa: F401
    __version__,
    builtin_fixtures,
    run_scene,
    critical_points,
    homology_of_complex,
    spectral_number,
    fredholm_index,
    infinitesimal_glue,
    integrate_flow,
    continuation_map,
)

__all__ = [
    "__version__",
    "builtin_fixtures",
    "run_scene",
    "critical_points",
    "homology_of_complex",
    "spectral_number",
    "fredholm_index",
    "infinitesimal_glue",
    "integrate_flow",
    "continuation_map",
]
