"""Syntax tree and diagnostics for scenario files.

Parsing produces a ScenarioSource: a faithful, location-annotated record of
every statement in the file, before any cross-reference or variant
resolution. Validation and compilation consume it. Keeping spans on every
node lets later phases point diagnostics at the exact token that caused
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One problem found in a source file, with its location."""

    severity: str
    code: str
    message: str
    line: int
    col: int
    file: str = "<scenario>"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity} {self.code} {self.message}"


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (d.line, d.col, d.severity, d.code, d.message))


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diags)


# --- expression nodes (location-annotated mirror of the runtime types) ------

@dataclass(frozen=True)
class SrcNumAtom:
    sign: int
    const: float | None
    param: str | None
    line: int
    col: int


@dataclass(frozen=True)
class SrcNum:
    atoms: tuple[SrcNumAtom, ...]
    line: int
    col: int


@dataclass(frozen=True)
class SrcVar:
    """kind is one of "one", "param", "cssm", "cb"; parts hold the reference."""

    kind: str
    parts: tuple[str, ...]
    line: int
    col: int


@dataclass(frozen=True)
class SrcFactor:
    var: SrcVar
    K: SrcNum
    M: SrcNum
    B: SrcNum
    line: int
    col: int


SrcTerm = tuple[SrcFactor, ...]
SrcExpr = tuple[SrcTerm, ...]


# --- statements --------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioStmt:
    id: str
    line: int
    col: int


@dataclass(frozen=True)
class VariantStmt:
    id: str
    default: bool
    line: int
    col: int


@dataclass(frozen=True)
class CultureStmt:
    id: str
    display: str | None
    line: int
    col: int


@dataclass(frozen=True)
class ActorStmt:
    id: str
    kind: str
    size: int
    cultures: tuple[str, ...]
    only: tuple[str, ...]
    display: str | None
    line: int
    col: int


@dataclass(frozen=True)
class QuestionStmt:
    id: str
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class ParamStmt:
    name: str
    domain: str
    ladder: str | None
    line: int
    col: int


@dataclass(frozen=True)
class ActionStmt:
    id: str
    performer: str
    params: tuple[ParamStmt, ...]
    terminal: bool
    description: str | None
    line: int
    col: int


@dataclass(frozen=True)
class StateStmt:
    id: str
    start: bool
    terminal: bool
    verified: bool
    line: int
    col: int


@dataclass(frozen=True)
class EdgeStmt:
    state: str
    actor: str
    action: str
    successor: str
    verified: bool
    line: int
    col: int


@dataclass(frozen=True)
class CssmStmt:
    culture: str
    metric: str
    subject: str
    perspective: str
    estimator: str
    scale: str
    init: float
    only: tuple[str, ...]
    line: int
    col: int


@dataclass(frozen=True)
class CbStmt:
    belief: str
    perspective: str
    estimator: str
    m_true: float
    m_false: float
    frozen: bool
    only: tuple[str, ...]
    line: int
    col: int


@dataclass(frozen=True)
class AifStmt:
    action: str
    target: tuple[str, str, str, str, str]
    mode: str
    expr: SrcExpr
    calibrated: bool
    only: tuple[str, ...]
    line: int
    col: int
    target_line: int = 0
    target_col: int = 0


@dataclass(frozen=True)
class EvidenceStmt:
    action: str
    belief: str
    perspective: str
    estimator: str  # "*" targets every declared estimator of (belief, perspective)
    m_true: float
    m_false: float
    per_second: bool
    calibrated: bool
    only: tuple[str, ...]
    line: int
    col: int
    target_line: int = 0
    target_col: int = 0


@dataclass(frozen=True)
class CalibrateStmt:
    ladder: str
    value: float
    keyword: str
    line: int
    col: int


@dataclass
class ScenarioSource:
    """Everything a scenario file declared, in file order."""

    file: str = "<scenario>"
    scenario: ScenarioStmt | None = None
    variants: list[VariantStmt] = field(default_factory=list)
    cultures: list[CultureStmt] = field(default_factory=list)
    actors: list[ActorStmt] = field(default_factory=list)
    questions: list[QuestionStmt] = field(default_factory=list)
    actions: list[ActionStmt] = field(default_factory=list)
    states: list[StateStmt] = field(default_factory=list)
    edges: list[EdgeStmt] = field(default_factory=list)
    cssms: list[CssmStmt] = field(default_factory=list)
    cbs: list[CbStmt] = field(default_factory=list)
    aifs: list[AifStmt] = field(default_factory=list)
    evidence: list[EvidenceStmt] = field(default_factory=list)
    calibrations: list[CalibrateStmt] = field(default_factory=list)

    def variant_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variants)

    def default_variant(self) -> str | None:
        for v in self.variants:
            if v.default:
                return v.id
        if self.variants:
            return self.variants[0].id
        return None

    def in_variant(self, only: tuple[str, ...], variant: str | None) -> bool:
        """Whether a declaration tagged `only` belongs to the given variant."""
        if not only or variant is None:
            return True
        return variant in only
