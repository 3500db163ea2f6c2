"""Session execution: stepping, recording, branching, comparing.

A session holds the joint private state of every estimator plus the progress
state. One step runs a fixed pipeline: (1) resolve the progress transition,
(2) fuse the action's evidence into beliefs, (3) evaluate metric update
functions against the pre-action metric snapshot and the post-update
beliefs. The step either commits entirely or leaves the session untouched.

Estimator isolation is structural: each estimator's updates are computed
from that estimator's own state only. Debug runs additionally fingerprint
every other estimator's state around each computation to catch regressions.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

from .beliefs import BeliefState, CbKey, MassFunction, apply_duration_evidence, combine
from .errors import (EngineError, IllegalActionError, SessionTerminatedError,
                     TraceError, UnknownKeyError)
from .metrics import CssmKey, MetricState, apply_cssm_updates
from .model import ActionInstance
from .scenario import ScenarioDef

Key = CssmKey | CbKey


@dataclass(frozen=True)
class Snapshot:
    """Full session state at one instant. Treated as immutable everywhere."""

    progress: str
    metrics: dict[str, MetricState]
    beliefs: dict[str, BeliefState]

    def value(self, key: Key) -> float:
        """Numeric view of one key: metric value, or belief support."""
        if isinstance(key, CssmKey):
            state = self.metrics.get(key.estimator, {})
            if key not in state:
                raise UnknownKeyError(f"no metric {key} in this session")
            return state[key]
        state = self.beliefs.get(key.estimator, {})
        if key not in state:
            raise UnknownKeyError(f"no belief {key} in this session")
        return state[key].support

    def mass(self, key: CbKey) -> MassFunction:
        state = self.beliefs.get(key.estimator, {})
        if key not in state:
            raise UnknownKeyError(f"no belief {key} in this session")
        return state[key]

    def copy(self) -> Snapshot:
        return Snapshot(
            progress=self.progress,
            metrics={est: dict(vals) for est, vals in self.metrics.items()},
            beliefs={est: dict(vals) for est, vals in self.beliefs.items()},
        )


@dataclass(frozen=True)
class StepReport:
    """What one committed step changed. Deltas list only keys that moved."""

    index: int
    action: ActionInstance
    progress_before: str
    progress_after: str
    cssm_deltas: dict[CssmKey, tuple[float, float]]
    cb_deltas: dict[CbKey, tuple[MassFunction, MassFunction]]
    terminated: bool


@dataclass(frozen=True)
class TraceStep:
    action: ActionInstance
    report: StepReport
    after: Snapshot


@dataclass
class Trace:
    """A session's recorded history: initial snapshot plus one entry per step."""

    scenario: ScenarioDef
    initial: Snapshot
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def actions(self) -> list[ActionInstance]:
        return [s.action for s in self.steps]

    def snapshot_at(self, step: int) -> Snapshot:
        """State after `step` steps; 0 is the initial state."""
        if step < 0 or step > len(self.steps):
            raise TraceError(
                f"step index {step} outside 0..{len(self.steps)}", step=step)
        return self.initial if step == 0 else self.steps[step - 1].after

    def series(self, key: Key) -> list[float]:
        """The key's value after each step, in step order."""
        return [s.after.value(key) for s in self.steps]


def _fresh_snapshot(scenario: ScenarioDef) -> Snapshot:
    metrics = {actor: scenario.initial_metrics(actor) for actor in scenario.actors}
    beliefs = {actor: scenario.initial_beliefs(actor) for actor in scenario.actors}
    return Snapshot(progress=scenario.graph.start, metrics=metrics, beliefs=beliefs)


class Session:
    """One running playthrough of a scenario variant."""

    def __init__(self, scenario: ScenarioDef, *, session_id: str | None = None,
                 initial: Snapshot | None = None,
                 history: list[TraceStep] | None = None,
                 current: Snapshot | None = None):
        self.id = session_id or secrets.token_urlsafe(16)
        self.scenario = scenario
        start = (initial or _fresh_snapshot(scenario)).copy()
        self.trace = Trace(scenario=scenario, initial=start, steps=list(history or ()))
        self._current = (current or start).copy()

    # --- state views ---

    @property
    def progress(self) -> str:
        return self._current.progress

    @property
    def terminated(self) -> bool:
        return self.scenario.graph.is_terminal(self._current.progress)

    @property
    def current(self) -> Snapshot:
        return self._current.copy()

    def value(self, key: Key) -> float:
        return self._current.value(key)

    def available(self, actor: str) -> tuple[str, ...]:
        return self.scenario.graph.available_actions(self._current.progress, actor)

    def available_map(self) -> dict[str, tuple[str, ...]]:
        """Legal action type ids per actor at the current progress state."""
        return {actor: self.available(actor) for actor in self.scenario.actors}

    # --- the step pipeline ---

    def step(self, action: ActionInstance) -> StepReport:
        """Apply one action atomically; raise without side effects on failure."""
        scenario = self.scenario
        before = self._current
        if self.terminated:
            raise SessionTerminatedError(
                f"session ended at {before.progress}; {action.describe()} rejected")
        if action.type_id not in scenario.action_types:
            raise IllegalActionError(
                f"unknown action type {action.type_id!r}",
                legal=self.available(action.actor) if action.actor in scenario.actors else ())
        atype = scenario.action_type(action.type_id)
        if action.actor not in scenario.actors:
            raise IllegalActionError(f"unknown actor {action.actor!r}")
        if atype.performer != action.actor:
            raise IllegalActionError(
                f"{atype.display_id} is performed by {atype.performer}, not {action.actor}",
                legal=self.available(action.actor))
        problems = atype.check_args(action.args)
        if problems:
            raise IllegalActionError(
                f"bad arguments for {action.describe()}: " + "; ".join(problems),
                legal=self.available(action.actor))

        # phase 1: progress transition (raises IllegalActionError when the
        # graph has no edge for this triple)
        progress_after = scenario.graph.transition(
            before.progress, action.actor, action.type_id)

        # phase 2: evidence fusion, computed on copies
        new_beliefs: dict[str, BeliefState] = {}
        cb_deltas: dict[CbKey, tuple[MassFunction, MassFunction]] = {}
        for estimator in scenario.actors:
            state = dict(before.beliefs[estimator])
            for spec in scenario.evidence_for(action.type_id, estimator):
                # an actor learns nothing about its own first-person beliefs
                # from its own action
                if action.actor == estimator and spec.target.perspective == estimator:
                    continue
                if spec.target not in state:
                    raise UnknownKeyError(
                        f"evidence targets undeclared belief {spec.target}")
                prior = state[spec.target]
                if spec.per_second:
                    seconds = self._duration_of(action, atype)
                    state[spec.target] = apply_duration_evidence(prior, spec.mass, seconds)
                else:
                    state[spec.target] = combine(prior, spec.mass)
            new_beliefs[estimator] = state

        # phase 3: metric updates; reads are pre-action metrics plus
        # post-update beliefs, so all updates are simultaneous
        new_metrics: dict[str, MetricState] = {}
        cssm_deltas: dict[CssmKey, tuple[float, float]] = {}
        fingerprints = None
        if __debug__:
            fingerprints = {est: _fingerprint(before.metrics[est], before.beliefs[est])
                            for est in scenario.actors}
        for estimator in scenario.actors:
            aifs = scenario.aifs_for(action.type_id, estimator)
            new_metrics[estimator] = apply_cssm_updates(
                before.metrics[estimator], action, aifs, new_beliefs[estimator])
            if __debug__:
                for other in scenario.actors:
                    if other != estimator:
                        assert fingerprints[other] == _fingerprint(
                            before.metrics[other], before.beliefs[other]), \
                            f"estimator isolation violated while updating {estimator}"

        # commit
        for estimator in scenario.actors:
            for key, new in new_metrics[estimator].items():
                old = before.metrics[estimator][key]
                if new != old:
                    cssm_deltas[key] = (old, new)
            for key, new_mass in new_beliefs[estimator].items():
                old_mass = before.beliefs[estimator][key]
                if new_mass != old_mass:
                    cb_deltas[key] = (old_mass, new_mass)
        after = Snapshot(progress=progress_after, metrics=new_metrics, beliefs=new_beliefs)
        report = StepReport(
            index=len(self.trace.steps),
            action=action,
            progress_before=before.progress,
            progress_after=progress_after,
            cssm_deltas=cssm_deltas,
            cb_deltas=cb_deltas,
            terminated=scenario.graph.is_terminal(progress_after),
        )
        self._current = after
        self.trace.steps.append(TraceStep(action=action, report=report, after=after.copy()))
        return report

    @staticmethod
    def _duration_of(action: ActionInstance, atype) -> float:
        for p in atype.params:
            if p.domain == "seconds":
                return action.args[p.name]
        raise IllegalActionError(
            f"{atype.display_id} carries per-second evidence but has no duration param")


def _fingerprint(metrics: MetricState, beliefs: BeliefState) -> int:
    return hash((tuple(sorted(((str(k), v) for k, v in metrics.items()))),
                 tuple(sorted(((str(k), m.m_true, m.m_false) for k, m in beliefs.items())))))


def new_session(scenario: ScenarioDef, *, session_id: str | None = None) -> Session:
    """Start a session at the scenario's initial snapshot."""
    return Session(scenario, session_id=session_id)


def run_trace(scenario: ScenarioDef, actions: list[ActionInstance], *,
              session_id: str | None = None) -> Trace:
    """Replay an action list from a fresh session; step errors carry the index."""
    session = new_session(scenario, session_id=session_id)
    for i, action in enumerate(actions):
        try:
            session.step(action)
        except EngineError as exc:
            raise TraceError(f"step {i} ({action.describe()}): {exc}", step=i) from exc
    return session.trace


def branch(trace: Trace, at_step: int, *, session_id: str | None = None) -> Session:
    """Fork a new session that kept the first `at_step` steps of the trace.

    The new session's history shares the parent's prefix, so comparisons of
    parent and branch align step for step up to the branch point.
    """
    resume = trace.snapshot_at(at_step)  # validates the index
    prefix = [TraceStep(s.action, s.report, s.after.copy()) for s in trace.steps[:at_step]]
    session = Session(trace.scenario, session_id=session_id,
                      initial=trace.initial, history=prefix, current=resume)
    return session


@dataclass(frozen=True)
class SeriesComparison:
    """Aligned per-step series of two traces for a set of keys.

    Each series has one value per step of its own trace, padded with None up
    to the longer trace's length. initial_* carry the pre-step values.
    """

    keys: tuple[Key, ...]
    length: int
    initial_a: dict[Key, float]
    initial_b: dict[Key, float]
    series_a: dict[Key, list[float | None]]
    series_b: dict[Key, list[float | None]]

    def rows(self, key: Key) -> list[tuple[int, float | None, float | None]]:
        return [(i, self.series_a[key][i], self.series_b[key][i])
                for i in range(self.length)]


def compare(trace_a: Trace, trace_b: Trace, keys: list[Key]) -> SeriesComparison:
    """Extract aligned value series for the given keys from two traces."""
    length = max(len(trace_a), len(trace_b))

    def padded(trace: Trace, key: Key) -> list[float | None]:
        values: list[float | None] = list(trace.series(key))
        values.extend([None] * (length - len(values)))
        return values

    return SeriesComparison(
        keys=tuple(keys),
        length=length,
        initial_a={k: trace_a.initial.value(k) for k in keys},
        initial_b={k: trace_b.initial.value(k) for k in keys},
        series_a={k: padded(trace_a, k) for k in keys},
        series_b={k: padded(trace_b, k) for k in keys},
    )
