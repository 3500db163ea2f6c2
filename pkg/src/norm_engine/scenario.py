"""Compiled scenario definitions.

A ScenarioDef is the immutable, fully resolved form of one scenario variant:
actors, action types, the progress graph, declared metric and belief keys
with their initial values, update functions, evidence table, and calibration
ladders. Scenario files produce these through the format package; the engine
only ever consumes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .beliefs import CbKey, EvidenceSpec, MassFunction
from .errors import UnknownKeyError
from .metrics import Aif, CssmKey, METRIC_SCALES
from .model import ActionType, Actor, ProgressGraph

# the keyword grid every calibration ladder must cover
LADDER_GRID = tuple(round(i * 0.1, 1) for i in range(11))


@dataclass(frozen=True)
class CssmDecl:
    """One declared metric key with its scale and initial value."""

    key: CssmKey
    scale: str
    init: float

    def __post_init__(self):
        if self.scale not in METRIC_SCALES:
            raise ValueError(f"unknown metric scale {self.scale!r}")

    @property
    def clamp(self) -> bool:
        return self.scale == "unit"


@dataclass(frozen=True)
class CbDecl:
    """One declared belief key with its initial mass.

    frozen marks beliefs that never receive evidence (certainties of the
    scenario setup); the compiler drops any evidence aimed at them.
    """

    key: CbKey
    init: MassFunction
    frozen: bool = False


@dataclass(frozen=True)
class Question:
    """The yes/no question a belief id stands for."""

    id: str
    text: str


@dataclass(frozen=True)
class Ladder:
    """Keyword calibration scale for one action parameter kind.

    Maps each grid value to the keyword a participant would recognise, so
    interfaces can label numeric inputs with natural language.
    """

    name: str
    entries: tuple[tuple[float, str], ...]

    def keyword(self, value: float) -> str | None:
        for v, word in self.entries:
            if v == value:
                return word
        return None


@dataclass(frozen=True)
class ScenarioDef:
    """One compiled scenario variant."""

    id: str
    variant: str
    variants: tuple[str, ...]
    cultures: tuple[str, ...]
    actors: dict[str, Actor]
    action_types: dict[str, ActionType]
    graph: ProgressGraph
    questions: dict[str, Question]
    cssm_decls: tuple[CssmDecl, ...]
    cb_decls: tuple[CbDecl, ...]
    aifs: tuple[Aif, ...]
    evidence: tuple[EvidenceSpec, ...]
    ladders: dict[str, Ladder] = field(default_factory=dict)

    # --- lookups ---

    def actor(self, actor_id: str) -> Actor:
        if actor_id not in self.actors:
            raise UnknownKeyError(f"unknown actor {actor_id!r}")
        return self.actors[actor_id]

    def action_type(self, type_id: str) -> ActionType:
        if type_id not in self.action_types:
            raise UnknownKeyError(f"unknown action type {type_id!r}")
        return self.action_types[type_id]

    def cssm_decl(self, key: CssmKey) -> CssmDecl:
        for decl in self.cssm_decls:
            if decl.key == key:
                return decl
        raise UnknownKeyError(f"undeclared metric key {key}")

    def cb_decl(self, key: CbKey) -> CbDecl:
        for decl in self.cb_decls:
            if decl.key == key:
                return decl
        raise UnknownKeyError(f"undeclared belief key {key}")

    def all_keys(self) -> tuple[CssmKey | CbKey, ...]:
        """Every registered key, metrics first, in declaration order."""
        return tuple(d.key for d in self.cssm_decls) + tuple(d.key for d in self.cb_decls)

    # --- per-estimator views ---

    def initial_metrics(self, estimator: str) -> dict[CssmKey, float]:
        return {d.key: d.init for d in self.cssm_decls if d.key.estimator == estimator}

    def initial_beliefs(self, estimator: str) -> dict[CbKey, MassFunction]:
        return {d.key: d.init for d in self.cb_decls if d.key.estimator == estimator}

    def aifs_for(self, action_type: str, estimator: str) -> tuple[Aif, ...]:
        return tuple(a for a in self.aifs
                     if a.trigger == action_type and a.target.estimator == estimator)

    def evidence_for(self, action_type: str, estimator: str) -> tuple[EvidenceSpec, ...]:
        return tuple(e for e in self.evidence
                     if e.trigger == action_type and e.target.estimator == estimator)

    def cognizant(self, actor_id: str, culture: str) -> bool:
        """Whether the actor can evaluate metrics sanctioned by the culture."""
        return culture in self.actor(actor_id).cultures
