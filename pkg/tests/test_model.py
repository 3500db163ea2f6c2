"""Actors, action types, and progress graph semantics."""

import pytest

from norm_engine.errors import IllegalActionError, UnknownKeyError
from norm_engine.model import (ActionInstance, ActionParam, ActionType, Actor,
                               Edge, ProgressGraph, display_action_id)


def tiny_graph():
    return ProgressGraph(
        states=("A", "B", "END"),
        start="A",
        terminals=frozenset({"END"}),
        edges=(
            Edge("A", "P1", "go", "B"),
            Edge("A", "P1", "quit", "END"),
            Edge("B", "P2", "back", "A", verified=False),
            Edge("B", "P1", "quit", "END"),
        ))


class TestProgressGraph:
    def test_transitions_follow_edges(self):
        g = tiny_graph()
        assert g.transition("A", "P1", "go") == "B"
        assert g.transition("B", "P2", "back") == "A"

    def test_missing_edge_is_illegal(self):
        g = tiny_graph()
        with pytest.raises(IllegalActionError) as exc_info:
            g.transition("A", "P2", "back")
        assert "go" not in exc_info.value.legal
        with pytest.raises(IllegalActionError):
            g.transition("B", "P1", "go")

    def test_available_actions_in_declaration_order(self):
        g = tiny_graph()
        assert g.available_actions("A", "P1") == ("go", "quit")
        assert g.available_actions("A", "P2") == ()
        assert g.available_actions("END", "P1") == ()

    def test_terminal_states(self):
        g = tiny_graph()
        assert g.is_terminal("END")
        assert not g.is_terminal("A")
        with pytest.raises(UnknownKeyError):
            g.is_terminal("nowhere")

    def test_construction_is_validated(self):
        with pytest.raises(ValueError):
            ProgressGraph(("A",), "B", frozenset(), ())
        with pytest.raises(ValueError):
            ProgressGraph(("A",), "A", frozenset({"X"}), ())
        with pytest.raises(ValueError):
            ProgressGraph(("A", "B"), "A", frozenset(),
                          (Edge("A", "P", "go", "B"), Edge("A", "P", "go", "B")))
        with pytest.raises(ValueError):
            ProgressGraph(("A",), "A", frozenset(), (Edge("A", "P", "go", "X"),))


class TestActor:
    def test_kinds_are_validated(self):
        Actor("Crowd", kind="group", group_size=100)
        with pytest.raises(ValueError):
            Actor("X", kind="herd")
        with pytest.raises(ValueError):
            Actor("X", kind="group", group_size=1)
        with pytest.raises(ValueError):
            Actor("X", kind="individual", group_size=3)


class TestActionParam:
    def test_unit_domain(self):
        p = ActionParam("x", "unit")
        assert p.contains(0.0) and p.contains(1.0) and p.contains(0.5)
        assert not p.contains(-0.01) and not p.contains(1.01)
        assert not p.contains(float("nan")) and not p.contains(True)

    def test_seconds_domain(self):
        p = ActionParam("t", "seconds")
        assert p.contains(0.0) and p.contains(3600.0)
        assert not p.contains(-1.0) and not p.contains(float("inf"))

    def test_unknown_domain_rejected(self):
        with pytest.raises(ValueError):
            ActionParam("x", "percent")


class TestActionType:
    atype = ActionType("alpha10", performer="Client",
                       params=(ActionParam("x", "unit", ladder="loudness"),
                               ActionParam("y", "unit", ladder="rudeness")))

    def test_check_args_accepts_exact_match(self):
        assert self.atype.check_args({"x": 0.2, "y": 0.4}) == []

    def test_check_args_reports_each_problem(self):
        problems = self.atype.check_args({"x": 1.5, "z": 0.1})
        assert len(problems) == 3  # unexpected z, missing y, x out of domain
        assert any("z" in p for p in problems)
        assert any("y" in p for p in problems)
        assert any("outside unit" in p for p in problems)

    def test_display_id_uses_greek_alpha(self):
        assert self.atype.display_id == "α10"
        assert display_action_id("alpha1") == "α1"
        assert display_action_id("offer_flower") == "offer_flower"

    def test_param_lookup(self):
        assert self.atype.param("x").ladder == "loudness"
        with pytest.raises(UnknownKeyError):
            self.atype.param("q")


class TestActionInstance:
    def test_describe_includes_args(self):
        assert ActionInstance("alpha13", "Seller", {"t": 15.0}).describe() == \
            "α13(t=15) by Seller"
        assert ActionInstance("alpha2", "Client").describe() == "α2 by Client"
