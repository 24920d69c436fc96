import numpy as np
import pytest

from weaktrace.scendsl import parse_scenario, serialize_scenario
from weaktrace.trace import (
    ContinuityVerdict,
    continuity_check,
    presence_map,
    trace_verdict,
)


class TestPresenceMap:
    @pytest.mark.parametrize("name", ["fig1", "fig2"])
    def test_builtin_presence_pattern(self, name, fig1, fig2):
        scenario = {"fig1": fig1, "fig2": fig2}[name]
        presence = presence_map(scenario, threshold=1e-9)
        assert set(presence.present_arms()) == {"A", "B", "C"}
        assert set(presence.absent_arms()) == {"D", "E"}

    def test_flags_match_magnitudes(self, fig1):
        presence = presence_map(fig1, threshold=1e-9)
        for entry in presence.entries:
            assert entry.present == (entry.magnitude > presence.threshold)
            assert entry.magnitude == pytest.approx(abs(entry.value))

    def test_single_path_scenario(self):
        text = (
            "modes A B C\npreselect 1@A\npostselect 1@A\n"
            "adjacency SOURCE A\nadjacency A DETECTOR\n"
            "adjacency SOURCE B\nadjacency B C\nadjacency C DETECTOR\n"
        )
        presence = presence_map(parse_scenario(text))
        assert presence.present_arms() == ("A",)
        assert set(presence.absent_arms()) == {"B", "C"}

    def test_threshold_monotonicity(self, fig1, fig2):
        for scenario in (fig1, fig2):
            previous = None
            for threshold in (1e-12, 1e-6, 1e-2, 0.4, 0.7, 1.5):
                present = set(presence_map(scenario, threshold).present_arms())
                if previous is not None:
                    assert present <= previous
                previous = present

    def test_negative_threshold_rejected(self, fig1):
        with pytest.raises(ValueError):
            presence_map(fig1, threshold=-1.0)


class TestContinuityCheck:
    @pytest.mark.parametrize("threshold", [1e-9, 1e-3, 0.1, 0.29])
    def test_builtins_discontinuous_across_thresholds(self, threshold, fig1, fig2):
        for scenario in (fig1, fig2):
            verdict = trace_verdict(scenario, threshold)
            assert not verdict.continuous
            assert verdict.gap_arms == ("D", "E")
            groups = sorted(component.arms for component in verdict.components)
            assert groups == [("A",), ("B", "C")]

    def test_builtin_component_endpoints(self, fig1):
        verdict = trace_verdict(fig1)
        by_arms = {component.arms: component for component in verdict.components}
        outer = by_arms[("A",)]
        island = by_arms[("B", "C")]
        assert outer.touches_source and outer.touches_detector
        assert not island.touches_source and not island.touches_detector

    def test_all_present_connected_graph_is_continuous(self):
        text = (
            "modes A B\npreselect 1/sqrt2@A + 1/sqrt2@B\n"
            "postselect 1/sqrt2@A + 1/sqrt2@B\n"
            "adjacency SOURCE A\nadjacency A B\nadjacency B DETECTOR\n"
            "adjacency A DETECTOR\nadjacency SOURCE B\n"
        )
        verdict = trace_verdict(parse_scenario(text))
        assert verdict.continuous
        assert verdict.gap_arms == ()

    def test_no_present_arms_is_discontinuous_with_empty_components(self, fig1):
        presence = presence_map(fig1, threshold=10.0)
        assert presence.present_arms() == ()
        verdict = continuity_check(presence, fig1.adjacency)
        assert verdict == ContinuityVerdict(continuous=False, components=(), gap_arms=())

    def test_adjacency_must_cover_arms(self, fig1):
        presence = presence_map(fig1)
        with pytest.raises(ValueError):
            continuity_check(presence, (("A", "B"),))

    def test_verdict_invariant_under_relabeling(self, fig1):
        mapping = {"S": "s0", "A": "a0", "B": "b0", "C": "c0", "D": "d0", "E": "e0", "F": "f0"}
        text = serialize_scenario(fig1)
        for old, new in mapping.items():
            text = "\n".join(
                " ".join(mapping.get(token, token) for token in line.split(" "))
                for line in text.splitlines()
            )
            break
        relabeled = parse_scenario(text)
        original = trace_verdict(fig1)
        renamed = trace_verdict(relabeled)
        assert renamed.continuous == original.continuous
        assert tuple(mapping[a] for a in original.gap_arms) == renamed.gap_arms
        assert sorted(
            tuple(mapping[a] for a in component.arms) for component in original.components
        ) == sorted(component.arms for component in renamed.components)
