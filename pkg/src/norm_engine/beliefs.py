"""Concrete beliefs as two-valued evidence masses.

Each belief answers a yes/no question about the running scenario. An
estimator's state of knowledge is a mass function over {true, false} plus an
implicit undecided remainder. Actions carry evidence masses that are fused
into the prior by Dempster's rule of combination; fully contradictory
evidence is an error rather than a silent renormalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AggregationError, DomainError, TotalConflictError

# float dust tolerated when validating mass invariants
_MASS_EPS = 1e-9


@dataclass(frozen=True)
class CbKey:
    """Address of one belief inside one estimator's private state."""

    scenario: str
    belief: str
    perspective: str
    estimator: str

    def __str__(self) -> str:
        return f"cb({self.belief},{self.perspective},{self.estimator})"


@dataclass(frozen=True)
class MassFunction:
    """Evidence mass on {true} and {false}; the frame gets the remainder.

    Invariant: both masses are non-negative and sum to at most 1. Values a
    hair outside due to rounding are snapped; anything worse is rejected.
    """

    m_true: float = 0.0
    m_false: float = 0.0

    def __post_init__(self):
        mt, mf = self.m_true, self.m_false
        if not (math.isfinite(mt) and math.isfinite(mf)):
            raise DomainError(f"masses must be finite, got ({mt!r}, {mf!r})")
        if mt < -_MASS_EPS or mf < -_MASS_EPS or mt + mf > 1.0 + _MASS_EPS:
            raise DomainError(f"invalid mass assignment ({mt!r}, {mf!r})")
        mt = min(max(mt, 0.0), 1.0)
        mf = min(max(mf, 0.0), 1.0)
        if mt + mf > 1.0:
            mf = 1.0 - mt
        object.__setattr__(self, "m_true", mt)
        object.__setattr__(self, "m_false", mf)

    @classmethod
    def vacuous(cls) -> MassFunction:
        return cls(0.0, 0.0)

    @classmethod
    def certain(cls, value: bool) -> MassFunction:
        return cls(1.0, 0.0) if value else cls(0.0, 1.0)

    @property
    def theta(self) -> float:
        """Mass left on the whole frame (undecided)."""
        return max(0.0, 1.0 - self.m_true - self.m_false)

    @property
    def support(self) -> float:
        """Total mass that forces the answer true."""
        return self.m_true

    @property
    def plausibility(self) -> float:
        """Total mass that does not contradict the answer true."""
        return 1.0 - self.m_false

    @property
    def is_vacuous(self) -> bool:
        return self.m_true == 0.0 and self.m_false == 0.0

    def __str__(self) -> str:
        return f"(T:{self.m_true:g}, F:{self.m_false:g}, Θ:{self.theta:g})"


def combine(prior: MassFunction, evidence: MassFunction) -> MassFunction:
    """Fuse two mass functions by Dempster's rule.

    The conflict weight is the probability mass assigned to contradictory
    pairs; the remainder is renormalised. Conflict weight 1 means the inputs
    flatly contradict each other and raises TotalConflictError.
    """
    mt, mf, mo = prior.m_true, prior.m_false, prior.theta
    et, ef, eo = evidence.m_true, evidence.m_false, evidence.theta
    conflict = mt * ef + mf * et
    if conflict >= 1.0:
        raise TotalConflictError(
            f"total conflict combining {prior} with {evidence}")
    scale = 1.0 - conflict
    new_true = (mt * et + mt * eo + mo * et) / scale
    new_false = (mf * ef + mf * eo + mo * ef) / scale
    return MassFunction(new_true, new_false)


def apply_duration_evidence(prior: MassFunction, per_second: MassFunction,
                            seconds: float) -> MassFunction:
    """Fuse a per-second evidence mass once per whole elapsed second."""
    if not math.isfinite(seconds) or seconds < 0:
        raise DomainError(f"duration must be a non-negative finite number, got {seconds!r}")
    result = prior
    for _ in range(int(math.floor(seconds))):
        result = combine(result, per_second)
    return result


def group_mass(members: Sequence[tuple[float, float, float]], group_size: int) -> MassFunction:
    """Aggregate a homogeneous group's member masses into one mass function.

    Each member contributes an explicit (true, false, undecided) triple whose
    entries sum to 1/group_size; the aggregate is the entrywise sum. When all
    members are identical this equals the single-agent mass scaled back up,
    which is why a uniform crowd can be stored as one aggregate.
    """
    if group_size < 1:
        raise AggregationError(f"group size must be positive, got {group_size}")
    if len(members) != group_size:
        raise AggregationError(
            f"expected {group_size} member masses, got {len(members)}")
    share = 1.0 / group_size
    total_true = total_false = 0.0
    for i, triple in enumerate(members):
        if len(triple) != 3:
            raise AggregationError(f"member {i}: expected a (true, false, undecided) triple")
        t, f, o = triple
        if min(t, f, o) < -_MASS_EPS:
            raise AggregationError(f"member {i}: negative mass entry")
        if abs((t + f + o) - share) > _MASS_EPS:
            raise AggregationError(
                f"member {i}: entries sum to {t + f + o!r}, expected 1/{group_size}")
        total_true += t
        total_false += f
    return MassFunction(total_true, total_false)


@dataclass(frozen=True)
class EvidenceSpec:
    """Evidence one action type contributes to one belief key.

    per_second marks duration evidence: the mass is fused once per whole
    second of the action's `t` parameter instead of once per action.
    """

    trigger: str
    target: CbKey
    mass: MassFunction
    per_second: bool = False


# One estimator's belief values. Plain dict: the engine owns copying.
BeliefState = dict[CbKey, MassFunction]
