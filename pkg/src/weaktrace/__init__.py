"""Simulator for pre- and post-selected interferometry.

Builds staged optical scenarios (beam splitters, wave plates, phase
shifters) over a discrete arm basis, computes weak values of arm
projectors both analytically and through exact finite-strength Gaussian
pointer couplings, and classifies which arms were visited and whether the
visited set forms a connected source-to-detector path.
"""

from .evolution import (
    DETECTOR,
    SOURCE,
    BoundaryError,
    Scenario,
    Slot,
    Stage,
    backward_state,
    forward_state,
    postselect_amplitude,
    postselect_probability,
    total_unitary,
    transition_amplitude,
)
from .optics import (
    ElementSpec,
    arm_projector,
    beamsplitter,
    element_operator,
    mirror,
    phaseshifter,
    polarizer_projector,
    routed_beamsplitter,
    waveplate,
)
from .qstate import (
    ATOL,
    BasisDescriptor,
    DimensionError,
    Operator,
    StateVector,
    UnknownLabelError,
    adjoint,
    apply,
    embed,
    identity,
    inner,
)
from .scendsl import (
    BUILTIN_TEXTS,
    Diagnostic,
    ScenarioParseError,
    ScenarioSource,
    builtin_scenario,
    parse_scenario,
    scan,
    scenarios_equivalent,
    serialize_scenario,
    validate,
)
from .trace import (
    DEFAULT_THRESHOLD,
    ContinuityVerdict,
    PresenceMap,
    TraceComponent,
    continuity_check,
    presence_map,
    trace_verdict,
)
from .weakmeas import (
    Branch,
    DegeneratePostselectionError,
    PointerEnsemble,
    PointerReadout,
    PointerSpec,
    SweepReport,
    UndefinedReadoutError,
    WeakValueResult,
    arm_weak_value,
    couple_pointers,
    postselect_and_readout,
    weak_limit_sweep,
    weak_value,
    weak_value_table,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL",
    "BUILTIN_TEXTS",
    "BasisDescriptor",
    "BoundaryError",
    "Branch",
    "ContinuityVerdict",
    "DEFAULT_THRESHOLD",
    "DETECTOR",
    "DegeneratePostselectionError",
    "Diagnostic",
    "DimensionError",
    "ElementSpec",
    "Operator",
    "PointerEnsemble",
    "PointerReadout",
    "PointerSpec",
    "PresenceMap",
    "SOURCE",
    "Scenario",
    "ScenarioParseError",
    "ScenarioSource",
    "Slot",
    "Stage",
    "StateVector",
    "SweepReport",
    "TraceComponent",
    "UndefinedReadoutError",
    "UnknownLabelError",
    "WeakValueResult",
    "adjoint",
    "apply",
    "arm_projector",
    "arm_weak_value",
    "backward_state",
    "beamsplitter",
    "builtin_scenario",
    "continuity_check",
    "couple_pointers",
    "element_operator",
    "embed",
    "forward_state",
    "identity",
    "inner",
    "mirror",
    "parse_scenario",
    "phaseshifter",
    "polarizer_projector",
    "postselect_amplitude",
    "postselect_and_readout",
    "postselect_probability",
    "presence_map",
    "routed_beamsplitter",
    "scan",
    "scenarios_equivalent",
    "serialize_scenario",
    "total_unitary",
    "trace_verdict",
    "transition_amplitude",
    "validate",
    "waveplate",
    "weak_limit_sweep",
    "weak_value",
    "weak_value_table",
]
