"""Culture-sanctioned metrics and their update functions.

A metric value is addressed by a five-part key: the sanctioning culture, the
metric name, the subject whose standing is measured, the perspective whose
judgement is modelled, and the estimator in whose private state the number
lives. Update functions are sums of products of logistic components; each
component reads one variable (the constant 1, an action parameter, or another
key private to the same estimator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Mapping

from .errors import DomainError, UnknownKeyError

if TYPE_CHECKING:
    from .beliefs import CbKey, MassFunction
    from .model import ActionInstance

# exp(x) overflows IEEE doubles just above x = 709.78; beyond the clip the
# logistic has saturated to full precision anyway
_EXP_CLIP = 709.0

# Metric scales. "unit" values are clamped to [0,1] after every update;
# tangible scales are unbounded.
METRIC_SCALES = ("unit", "currency", "seconds")


@dataclass(frozen=True, order=True)
class CssmKey:
    """Address of one metric value inside one estimator's private state."""

    culture: str
    metric: str
    subject: str
    perspective: str
    estimator: str

    def __str__(self) -> str:
        return (f"cssm({self.culture},{self.metric},{self.subject},"
                f"{self.perspective},{self.estimator})")


def logistic(x: float, K: float, M: float, B: float) -> float:
    """Logistic component: K / (1 + e^(-B(x - M))).

    Saturates to 0 or K when B(x - M) leaves the range where the exponential
    is representable, instead of overflowing. Non-finite arguments are a
    domain error; an infinite exponent from the product of finite arguments
    is treated as saturation.
    """
    for name, value in (("x", x), ("K", K), ("M", M), ("B", B)):
        if not math.isfinite(value):
            raise DomainError(f"logistic argument {name} must be finite, got {value!r}")
    z = B * (x - M)
    if z > _EXP_CLIP:
        return K
    if z < -_EXP_CLIP:
        return 0.0
    return K / (1.0 + math.exp(-z))


def richards(t: float, A: float, K: float, B: float, v: float, Q: float, M: float) -> float:
    """Generalised growth curve: A + (K - A) / (1 + Q e^(-B(t - M)))^(1/v).

    Reduces to logistic(t, K, M, B) at A=0, Q=1, v=1. v must be non-zero.
    The exponent saturates like logistic(); parameter combinations that take
    the base out of the real domain raise DomainError.
    """
    for name, value in (("t", t), ("A", A), ("K", K), ("B", B), ("v", v), ("Q", Q), ("M", M)):
        if not math.isfinite(value):
            raise DomainError(f"richards argument {name} must be finite, got {value!r}")
    if v == 0.0:
        raise DomainError("richards shape parameter v must be non-zero")
    z = B * (t - M)
    if z > _EXP_CLIP:
        e = 0.0
    elif z < -_EXP_CLIP:
        e = math.inf
    else:
        e = math.exp(-z)
    base = 1.0 + Q * e
    try:
        denom = base ** (1.0 / v)
        # float ** float quietly goes complex for negative bases
        if isinstance(denom, complex):
            raise DomainError(f"richards undefined for base={base!r}, v={v!r}")
        return A + (K - A) / denom
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise DomainError(f"richards undefined for base={base!r}, v={v!r}") from exc


def clamp_unit(value: float) -> float:
    """Clamp an intangible metric value to the closed unit interval."""
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


# --- update-function expressions -------------------------------------------

@dataclass(frozen=True)
class ConstOne:
    """The constant-1 variable; turns a logistic component into a constant."""

    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class ParamRef:
    """Reads a parameter of the triggering action."""

    name: str

    def __str__(self) -> str:
        return f"param {self.name}"


@dataclass(frozen=True)
class CssmRef:
    """Reads a metric value from the same estimator's private state."""

    key: CssmKey

    def __str__(self) -> str:
        return str(self.key)


@dataclass(frozen=True)
class CbRef:
    """Reads the support of a belief held by the same estimator."""

    key: CbKey

    def __str__(self) -> str:
        return str(self.key)


AifVar = ConstOne | ParamRef | CssmRef | CbRef


@dataclass(frozen=True)
class NumAtom:
    """One signed addend of a numeric field: a literal or an action param."""

    sign: int
    const: float | None = None
    param: str | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("atom sign must be +1 or -1")
        if (self.const is None) == (self.param is None):
            raise ValueError("atom is either a constant or a param reference")


@dataclass(frozen=True)
class NumExpr:
    """A signed sum of literals and action-param references.

    Lets scenario files write parameter-dependent logistic coefficients such
    as a wait-duration term without a general expression language.
    """

    atoms: tuple[NumAtom, ...]

    @classmethod
    def constant(cls, value: float) -> NumExpr:
        return cls((NumAtom(1, const=float(value)),))

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(a.param for a in self.atoms if a.param is not None)

    def evaluate(self, args: Mapping[str, float]) -> float:
        total = 0.0
        for a in self.atoms:
            if a.param is not None:
                if a.param not in args:
                    raise UnknownKeyError(f"action has no param {a.param!r}")
                total += a.sign * args[a.param]
            else:
                total += a.sign * a.const
        return total

    def __str__(self) -> str:
        parts: list[str] = []
        for i, a in enumerate(self.atoms):
            body = a.param if a.param is not None else format_number(a.const)
            if i == 0:
                parts.append(body if a.sign > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if a.sign > 0 else '-'} {body}")
        return " ".join(parts)


def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class LogisticComponent:
    """One L(var, K, M, B) factor of an update function."""

    var: AifVar
    K: NumExpr
    M: NumExpr
    B: NumExpr

    def __str__(self) -> str:
        return f"L({self.var}, {self.K}, {self.M}, {self.B})"


@dataclass(frozen=True)
class AifExpr:
    """A sum of products of logistic components."""

    terms: tuple[tuple[LogisticComponent, ...], ...]

    def __post_init__(self):
        if not self.terms or any(not t for t in self.terms):
            raise ValueError("expression needs at least one term, terms at least one factor")

    def components(self) -> Iterator[LogisticComponent]:
        for term in self.terms:
            yield from term

    def referenced_keys(self) -> Iterator[CssmRef | CbRef]:
        for comp in self.components():
            if isinstance(comp.var, (CssmRef, CbRef)):
                yield comp.var

    def referenced_params(self) -> set[str]:
        names: set[str] = set()
        for comp in self.components():
            if isinstance(comp.var, ParamRef):
                names.add(comp.var.name)
            for num in (comp.K, comp.M, comp.B):
                names.update(num.params)
        return names

    def format_terms(self) -> list[str]:
        return [" * ".join(str(c) for c in term) for term in self.terms]

    def __str__(self) -> str:
        return " + ".join(self.format_terms())


@dataclass(frozen=True)
class Aif:
    """An update function bound to a triggering action type and a target key.

    mode "replace" stores the expression value; mode "delta" adds it to the
    target's previous value. clamp marks unit-scale targets.
    """

    trigger: str
    target: CssmKey
    mode: str
    expr: AifExpr
    clamp: bool = False

    def __post_init__(self):
        if self.mode not in ("replace", "delta"):
            raise ValueError(f"unknown update mode {self.mode!r}")


# One estimator's metric values. Plain dict: the engine owns copying.
MetricState = dict[CssmKey, float]


def _resolve_var(var: AifVar, args: Mapping[str, float],
                 metrics: Mapping[CssmKey, float],
                 beliefs: Mapping[CbKey, MassFunction]) -> float:
    if isinstance(var, ConstOne):
        return 1.0
    if isinstance(var, ParamRef):
        if var.name not in args:
            raise UnknownKeyError(f"action has no param {var.name!r}")
        return args[var.name]
    if isinstance(var, CssmRef):
        if var.key not in metrics:
            raise UnknownKeyError(f"no metric {var.key} in this estimator's state")
        return metrics[var.key]
    if isinstance(var, CbRef):
        if var.key not in beliefs:
            raise UnknownKeyError(f"no belief {var.key} in this estimator's state")
        return beliefs[var.key].support
    raise TypeError(f"unknown variable kind {type(var).__name__}")


def eval_aif(expr: AifExpr, *, args: Mapping[str, float] | None = None,
             metrics: Mapping[CssmKey, float] | None = None,
             beliefs: Mapping[CbKey, MassFunction] | None = None) -> float:
    """Evaluate an expression: terms left to right, factors left to right.

    The fixed accumulation order makes results bit-reproducible across runs.
    """
    args = args or {}
    metrics = metrics or {}
    beliefs = beliefs or {}
    total = 0.0
    for term in expr.terms:
        product = 1.0
        for comp in term:
            x = _resolve_var(comp.var, args, metrics, beliefs)
            product *= logistic(x, comp.K.evaluate(args), comp.M.evaluate(args),
                                comp.B.evaluate(args))
        total += product
    return total


def apply_cssm_updates(state: Mapping[CssmKey, float], action: ActionInstance,
                       aifs: Iterator[Aif] | list[Aif],
                       beliefs: Mapping[CbKey, MassFunction]) -> MetricState:
    """Apply every update function the action triggers for one estimator.

    All expressions read the pre-action snapshot passed as `state`, so the
    update is simultaneous: permuting the triggered functions cannot change
    the committed result. Each target key may be written by at most one
    function per action (scenario validation enforces this; a violation here
    is a programming error).
    """
    new_state: MetricState = dict(state)
    written: set[CssmKey] = set()
    for aif in aifs:
        if aif.trigger != action.type_id:
            continue
        if aif.target not in state:
            raise UnknownKeyError(f"no metric {aif.target} in this estimator's state")
        if aif.target in written:
            raise ValueError(f"two update functions write {aif.target} on {action.type_id}")
        written.add(aif.target)
        value = eval_aif(aif.expr, args=action.args, metrics=state, beliefs=beliefs)
        if aif.mode == "delta":
            value = state[aif.target] + value
        if aif.clamp:
            value = clamp_unit(value)
        new_state[aif.target] = value
    return new_state
