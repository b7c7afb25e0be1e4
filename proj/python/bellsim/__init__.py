"""Linear-optics polarization Bell-state analysis toolkit."""

from bellsim._bellsim import (  # noqa: F401
    RNG_NAME,
    TOLERANCE,
    Analysis,
    BellState,
    CapacityRegime,
    Circuit,
    CoefficientTable,
    ConfusionMatrix,
    EvidencePolicy,
    LocalOp,
    RuleSet,
    analyze,
    bell_state,
    brute_force_two_photon,
    build_symmetric,
    build_symmetry_broken,
    capacity,
    classify,
    coefficient_table,
    combine_two_photon,
    decompose_bell,
    detector_row,
    estimate_confusion,
    evolve_single,
    evolve_to_tap,
    load_circuit,
    local_transform,
    multi_pair_success,
    parse_circuit,
    state_name,
    success_curve,
    success_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
