"""Multi-patch IGA flexoelectric solver with lattice generators."""

from ._core import (
    FlexoigaError,
    LatticeSpec,
    MaterialSet,
    ScenarioConfig,
    analytical_kem,
    bspline_basis,
    builtin_scenarios,
    lattice_summary,
    material_preset,
    normalized_thickness,
    run_scenario,
    strut_width,
)


def run_table(config):
    """Runs a scenario and returns its rows as a list of dicts keyed by column."""
    result = run_scenario(config)
    return [dict(zip(result["header"], row)) for row in result["rows"]]


__all__ = [
    "FlexoigaError",
    "LatticeSpec",
    "MaterialSet",
    "ScenarioConfig",
    "analytical_kem",
    "bspline_basis",
    "builtin_scenarios",
    "lattice_summary",
    "material_preset",
    "normalized_thickness",
    "run_scenario",
    "run_table",
    "strut_width",
]
