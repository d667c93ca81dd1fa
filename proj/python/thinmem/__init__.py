"""Diffusion across a semi-permeable membrane in thin annular layers.

Deterministic finite-difference solvers for the coupled-annuli generators and
their rescaled thin-layer families, the three limit generators (two circles,
circle plus annulus, circle plus lumped point), closed-form one-dimensional
resolvent oracles, and particle-level simulations.
"""

from thinmem._core import (  # noqa: F401
    CorrectorProfile,
    DiscreteGenerator,
    DomainError,
    EmpiricalSummary,
    Flavor,
    InternalError,
    LayerField,
    LimitGenerator,
    LimitState,
    McInit,
    McOptions,
    MismatchError,
    ParameterError,
    PreconditionError,
    ReferenceGrid,
    Scenario,
    ScenarioKind,
    Side,
    TimeScheme,
    TransmissionParams,
    __version__,
    apply_generator,
    apply_limit_generator,
    assemble_fast_operator,
    assemble_generator,
    assemble_limit_generator,
    build_corrector,
    build_reference_grid,
    corrector_lift,
    evolve,
    evolve_limit,
    field_from_numpy,
    kurtz_fast_residual,
    lift_limit_state,
    log_conjugate_resolvent,
    matrix_exponential_2x2,
    physical_radius,
    project,
    read_field_csv,
    resolvent_closed_form,
    resolvent_solve,
    run_cli,
    run_convergence_study,
    simulate_limit_jump_diffusion,
    simulate_membrane_bm,
    transmission_determinant,
    write_field_csv,
)
