"""Python bindings for the sirsat C++ core."""

from ._core import (
    BifurcationPoint,
    EquilibriumReport,
    ModelParams,
    SirsatError,
    basic_reproduction_number,
    classify_regime,
    cubic_coefficients,
    disease_free_equilibrium,
    endemic_equilibria,
    find_stable_cycle,
    find_unstable_cycle,
    gamma_of_I,
    integrate,
    locate_bifurcations,
    locate_hopf,
    locate_saddle_node,
    locate_transcritical,
    phase_portrait,
    reference_params,
    rhs_full,
    run_builtin_scenario,
    run_hysteresis_demo,
    sensitivity_indices,
    transcritical_direction,
)

__all__ = [name for name in dir() if not name.startswith("_")]
