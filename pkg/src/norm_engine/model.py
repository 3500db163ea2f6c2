"""Actors, action types, and the progress graph.

A scenario's possible courses of events form a directed graph over progress
states. Edges are keyed by (state, actor, action type) and are deterministic:
one such triple leads to exactly one successor state. Terminal states have no
outgoing edges; reaching one ends the session. Stochastic outcomes, when a
scenario wants them, are modelled as an ordinary actor (a "nature" actor)
whose action choice carries the randomness, so the graph itself stays
deterministic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import IllegalActionError, UnknownKeyError

# Param domains an action parameter may declare. "unit" is the closed [0,1]
# interval; "seconds" is a non-negative duration.
PARAM_DOMAINS = ("unit", "seconds")

_GREEK_ID = re.compile(r"^alpha(\d+)$")


def display_action_id(action_id: str) -> str:
    """Map a file-safe action id to its display form (alpha10 -> α10)."""
    m = _GREEK_ID.match(action_id)
    return f"α{m.group(1)}" if m else action_id


@dataclass(frozen=True)
class ActionParam:
    """A named parameter of an action type.

    ladder optionally names a calibration ladder (keyword scale) that user
    interfaces may show next to the raw number.
    """

    name: str
    domain: str
    ladder: str | None = None

    def __post_init__(self):
        if self.domain not in PARAM_DOMAINS:
            raise ValueError(f"unknown param domain {self.domain!r}")

    def contains(self, value: float) -> bool:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return False
        if not math.isfinite(value):
            return False
        if self.domain == "unit":
            return 0.0 <= value <= 1.0
        return value >= 0.0


@dataclass(frozen=True)
class Actor:
    """A participant in the scenario.

    kind is "individual" or "group"; group actors carry a member count and
    their beliefs are stored as a single homogeneous aggregate.
    """

    id: str
    kind: str = "individual"
    group_size: int = 1
    cultures: tuple[str, ...] = ()
    display: str | None = None

    def __post_init__(self):
        if self.kind not in ("individual", "group"):
            raise ValueError(f"unknown actor kind {self.kind!r}")
        if self.kind == "group" and self.group_size < 2:
            raise ValueError("group actor needs group_size >= 2")
        if self.kind == "individual" and self.group_size != 1:
            raise ValueError("individual actor has group_size 1")

    @property
    def name(self) -> str:
        return self.display or self.id


@dataclass(frozen=True)
class ActionType:
    """A kind of action an actor may perform.

    performer names the actor allowed to perform it; terminal action types
    always move the session to a terminal progress state.
    """

    id: str
    performer: str
    params: tuple[ActionParam, ...] = ()
    terminal: bool = False
    description: str | None = None

    @property
    def display_id(self) -> str:
        return display_action_id(self.id)

    def param(self, name: str) -> ActionParam:
        for p in self.params:
            if p.name == name:
                return p
        raise UnknownKeyError(f"action {self.id} has no param {name!r}")

    def check_args(self, args: dict[str, float]) -> list[str]:
        """Return a list of problems with the given argument dict (empty if fine)."""
        problems = []
        declared = {p.name for p in self.params}
        for name in args:
            if name not in declared:
                problems.append(f"unexpected arg {name!r}")
        for p in self.params:
            if p.name not in args:
                problems.append(f"missing arg {p.name!r}")
            elif not p.contains(args[p.name]):
                problems.append(f"arg {p.name}={args[p.name]!r} outside {p.domain} domain")
        return problems


@dataclass(frozen=True)
class ActionInstance:
    """One concrete performance of an action type by an actor."""

    type_id: str
    actor: str
    args: dict[str, float] = field(default_factory=dict)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.args.items())
        call = f"{display_action_id(self.type_id)}({inner})" if inner else display_action_id(self.type_id)
        return f"{call} by {self.actor}"


@dataclass(frozen=True)
class Edge:
    """One deterministic transition of the progress graph."""

    state: str
    actor: str
    action: str
    successor: str
    verified: bool = True


class ProgressGraph:
    """The directed graph of progress states.

    Lookup is by (state, actor, action type); determinism is enforced at
    construction: a duplicate triple is a bug in the scenario data, not a
    runtime condition, so it raises ValueError.
    """

    def __init__(self, states: tuple[str, ...], start: str, terminals: frozenset[str],
                 edges: tuple[Edge, ...]):
        if start not in states:
            raise ValueError(f"start state {start!r} not declared")
        unknown_terminals = terminals - set(states)
        if unknown_terminals:
            raise ValueError(f"terminal states not declared: {sorted(unknown_terminals)}")
        self.states = states
        self.start = start
        self.terminals = terminals
        self.edges = edges
        self._by_triple: dict[tuple[str, str, str], Edge] = {}
        self._by_state: dict[str, list[Edge]] = {s: [] for s in states}
        for e in edges:
            triple = (e.state, e.actor, e.action)
            if triple in self._by_triple:
                raise ValueError(f"duplicate edge for {triple}")
            if e.state not in self._by_state:
                raise ValueError(f"edge from undeclared state {e.state!r}")
            if e.successor not in self._by_state:
                raise ValueError(f"edge to undeclared state {e.successor!r}")
            self._by_triple[triple] = e
            self._by_state[e.state].append(e)

    def is_terminal(self, state: str) -> bool:
        if state not in self._by_state:
            raise UnknownKeyError(f"unknown progress state {state!r}")
        return state in self.terminals

    def available_actions(self, state: str, actor: str) -> tuple[str, ...]:
        """Action type ids the actor may perform at the state, in declaration order."""
        if state not in self._by_state:
            raise UnknownKeyError(f"unknown progress state {state!r}")
        return tuple(e.action for e in self._by_state[state] if e.actor == actor)

    def outgoing(self, state: str) -> tuple[Edge, ...]:
        if state not in self._by_state:
            raise UnknownKeyError(f"unknown progress state {state!r}")
        return tuple(self._by_state[state])

    def transition(self, state: str, actor: str, action: str) -> str:
        edge = self._by_triple.get((state, actor, action))
        if edge is None:
            legal = self.available_actions(state, actor)
            raise IllegalActionError(
                f"{display_action_id(action)} by {actor} is not available at {state}",
                legal=legal,
            )
        return edge.successor

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProgressGraph):
            return NotImplemented
        return (self.states == other.states and self.start == other.start
                and self.terminals == other.terminals and self.edges == other.edges)

    def __repr__(self) -> str:
        return (f"ProgressGraph({len(self.states)} states, "
                f"{len(self.edges)} edges, start={self.start})")
