"""Scenario staging and two-sided state evolution.

A :class:`Scenario` is an ordered list of unitary stages between a
preselected state (boundary 0) and a postselected state (final boundary).
Boundary ``b`` denotes the instant after stage ``b``; the forward state is
the preselection pushed up to a boundary, the backward state is the
postselection pulled down to it through adjoint stages.  Transition
amplitudes pair the two at the same boundary, which makes the identity
amplitude boundary-independent by unitarity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .optics import ElementSpec
from .qstate import (
    BasisDescriptor,
    DimensionError,
    Operator,
    StateVector,
    adjoint,
    apply,
    identity,
    inner,
)

#: Sentinel node names usable in adjacency declarations.
SOURCE = "SOURCE"
DETECTOR = "DETECTOR"


class BoundaryError(IndexError):
    """Raised for boundary indices outside ``0..len(stages)``."""


@dataclass(frozen=True)
class Stage:
    """One unitary step, with the element list it was built from."""

    label: str
    unitary: Operator
    elements: tuple[ElementSpec, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))


@dataclass(frozen=True)
class Slot:
    """Named stage boundary where a weak coupling may be inserted."""

    name: str
    boundary: int


@dataclass(frozen=True)
class Scenario:
    """Immutable pre/post-selected interferometer description.

    ``adjacency`` lists undirected arm-graph edges; endpoints are arm labels
    or the SOURCE/DETECTOR sentinels.  ``coupling_slots`` name boundaries;
    slots named after an arm define that arm's canonical coupling point.
    Structural consistency (matching bases) is enforced here; softer
    invariants (normalization, unitarity, adjacency closure) are reported
    by ``scendsl.validate`` so that broken scenarios can be diagnosed
    instead of being unrepresentable.
    """

    basis: BasisDescriptor
    stages: tuple[Stage, ...]
    preselect: StateVector
    postselect: StateVector
    adjacency: tuple[tuple[str, str], ...] = ()
    coupling_slots: tuple[Slot, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "adjacency", tuple(tuple(e) for e in self.adjacency))
        object.__setattr__(self, "coupling_slots", tuple(self.coupling_slots))
        if self.preselect.basis != self.basis or self.postselect.basis != self.basis:
            raise DimensionError("preselect/postselect basis differs from scenario basis")
        for stage in self.stages:
            if stage.unitary.basis != self.basis:
                raise DimensionError(f"stage {stage.label!r} basis differs from scenario basis")

    @property
    def n_boundaries(self) -> int:
        return len(self.stages) + 1

    def check_boundary(self, boundary: int) -> int:
        if not 0 <= boundary <= len(self.stages):
            raise BoundaryError(
                f"boundary {boundary} out of range 0..{len(self.stages)}"
            )
        return boundary

    def canonical_slots(self) -> tuple[tuple[str, int], ...]:
        """Canonical ``(arm, boundary)`` coupling points for weak-value reports.

        Slots whose name matches an arm label define the canonical points,
        in declaration order.  A scenario with no arm-named slots reports
        every arm at the final boundary.
        """
        named = [
            (slot.name, slot.boundary)
            for slot in self.coupling_slots
            if slot.name in self.basis.path_modes
        ]
        if named:
            return tuple(named)
        final = len(self.stages)
        return tuple((arm, final) for arm in self.basis.path_modes)


def total_unitary(scenario: Scenario) -> Operator:
    """Product of all stage unitaries (identity for an empty scenario)."""
    op = identity(scenario.basis)
    for stage in scenario.stages:
        op = stage.unitary @ op
    return op


def forward_state(scenario: Scenario, boundary: int) -> StateVector:
    """Preselected state evolved through the first ``boundary`` stages."""
    scenario.check_boundary(boundary)
    state = scenario.preselect
    for stage in scenario.stages[:boundary]:
        state = apply(stage.unitary, state)
    return state


def backward_state(scenario: Scenario, boundary: int) -> StateVector:
    """Postselected state pulled back to ``boundary`` through adjoint stages.

    This is the bra side of the two-state pair, stored as a ket: pairing it
    with the forward state at the same boundary reproduces the full
    transition amplitude.
    """
    scenario.check_boundary(boundary)
    state = scenario.postselect
    for stage in reversed(scenario.stages[boundary:]):
        state = apply(adjoint(stage.unitary), state)
    return state


def transition_amplitude(scenario: Scenario, observable: Operator, boundary: int) -> complex:
    """``<postselect back-evolved| observable |preselect forward-evolved>``.

    With the identity observable this is the post-selection amplitude and
    does not depend on the boundary.
    """
    scenario.check_boundary(boundary)
    return inner(backward_state(scenario, boundary), apply(observable, forward_state(scenario, boundary)))


def postselect_amplitude(scenario: Scenario) -> complex:
    """Overlap of the postselection with the fully evolved preselection."""
    return inner(scenario.postselect, forward_state(scenario, len(scenario.stages)))


def postselect_probability(scenario: Scenario) -> float:
    """Probability of the post-selection outcome, ``|<psi_f|U|psi_i>|²``."""
    return abs(postselect_amplitude(scenario)) ** 2
