"""Event-sourced operator sessions.

A session is an append-only log of events; state is a pure fold over that log,
so replaying the same log always reproduces the same state byte for byte.
Events never mutate, and the belief is recomputed deterministically from the
recorded evidence and dynamics operations on every fold step.

Belief pipeline (per fold): diagnosis posterior from all recorded
observations, aggregated to leak states and embedded with zero ignited mass,
then the recorded dynamics ops replayed in order. A time advance projects
under the level in force at that moment; a test result updates the
non-ignited part by Bayes rule and preserves the ignited mass; a reported
ignition short-circuits everything to the ignited indicator.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .dist import DiscreteDistribution
from .errors import SessionError
from .evolution import (
    IGNITED,
    LEAK_STATES,
    condition_on_no_ignition,
    embed_no_ignition,
    project_for,
    transition_matrix_for_level,
)
from .inference import aggregate, bayes_update, posterior, validate_evidence
from .model import AGGREGATE_STATES, ScenarioBundle

EVENT_KINDS = (
    "session-created",
    "observation",
    "test-result",
    "time-advance",
    "level-set",
    "ignition-reported",
)

_TIME_TOL = 1e-9
_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    timestamp: float  # session clock when the event was appended
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "kind": self.kind,
            "payload": dict(self.payload),
        }

    @staticmethod
    def from_json(data: dict) -> "SessionEvent":
        try:
            return SessionEvent(
                seq=int(data["seq"]),
                timestamp=float(data["timestamp"]),
                kind=str(data["kind"]),
                payload=dict(data.get("payload", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SessionError(f"malformed event record: {exc}") from exc


# Dynamics ops recorded in fold order: ("project", duration, level) for a time
# advance, ("test", test_id, outcome) for a test result.
DynamicsOp = tuple


@dataclass(frozen=True)
class SessionState:
    scenario_id: str
    seq: int
    clock: float
    status_quo_level: int
    evidence: tuple[tuple[str, str], ...]
    test_results: tuple[tuple[str, str, float], ...]
    ops: tuple[DynamicsOp, ...]
    ignition_evident: bool
    belief: DiscreteDistribution  # current leak-state belief, 4 states

    def evidence_dict(self) -> dict[str, str]:
        return dict(self.evidence)

    def to_json(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "seq": self.seq,
            "clock": self.clock,
            "status_quo_level": self.status_quo_level,
            "evidence": dict(self.evidence),
            "test_results": [list(t) for t in self.test_results],
            "ignition_evident": self.ignition_evident,
            "belief": self.belief.as_dict(),
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def compute_belief(
    bundle: ScenarioBundle,
    evidence: dict[str, str],
    ops: Iterable[DynamicsOp],
    ignition_evident: bool,
) -> DiscreteDistribution:
    """Recompute the current leak-state belief from recorded inputs."""
    if ignition_evident:
        return DiscreteDistribution.indicator(LEAK_STATES, "ignited")
    detailed = posterior(bundle.network, evidence, bundle.network.real_state_node)
    agg = aggregate(detailed, bundle.aggregation, AGGREGATE_STATES)
    bel = embed_no_ignition(agg)
    for op in ops:
        if op[0] == "project":
            _, duration, level = op
            tm = transition_matrix_for_level(bundle.transitions, int(level))
            bel = project_for(bel, tm, float(duration))
        elif op[0] == "test":
            _, test_id, outcome = op
            test = bundle.test(test_id)
            ignited_mass = float(bel.probs[IGNITED])
            part = condition_on_no_ignition(bel)
            updated = bayes_update(part, test.outcome_column(outcome))
            probs = np.append(updated.probs * (1.0 - ignited_mass), ignited_mass)
            bel = DiscreteDistribution(LEAK_STATES, probs)
        else:
            raise SessionError(f"unknown dynamics op {op[0]!r}")
    return bel


def initial_event(scenario_id: str) -> SessionEvent:
    return SessionEvent(0, 0.0, "session-created", {"scenario_id": scenario_id})


def apply_event(
    state: SessionState | None, event: SessionEvent, bundle: ScenarioBundle
) -> SessionState:
    """Fold one event into the state. Pure: returns a new state or raises."""
    if event.kind not in EVENT_KINDS:
        raise SessionError(f"unknown event kind {event.kind!r}")

    if state is None:
        if event.kind != "session-created" or event.seq != 0:
            raise SessionError("log must start with session-created at seq 0")
        scenario_id = event.payload.get("scenario_id")
        if scenario_id != bundle.id:
            raise SessionError(
                f"log is for scenario {scenario_id!r}, fold given {bundle.id!r}"
            )
        belief = compute_belief(bundle, {}, (), False)
        return SessionState(
            scenario_id=bundle.id,
            seq=0,
            clock=0.0,
            status_quo_level=0,
            evidence=(),
            test_results=(),
            ops=(),
            ignition_evident=False,
            belief=belief,
        )

    if event.seq != state.seq + 1:
        raise SessionError(
            f"out-of-order event: expected seq {state.seq + 1}, got {event.seq}"
        )
    if event.kind == "session-created":
        raise SessionError("session-created only valid as the first event")
    if abs(event.timestamp - state.clock) > _TIME_TOL:
        raise SessionError(
            f"event timestamp {event.timestamp} does not match session clock {state.clock}"
        )

    evidence = dict(state.evidence)
    test_results = state.test_results
    ops = state.ops
    level = state.status_quo_level
    clock = state.clock
    ignition = state.ignition_evident

    if event.kind == "observation":
        node = event.payload.get("node")
        outcome = event.payload.get("outcome")
        validate_evidence(bundle.network, {node: outcome})
        evidence[node] = outcome  # re-observation replaces the earlier reading
    elif event.kind == "test-result":
        test_id = event.payload.get("test_id")
        outcome = event.payload.get("outcome")
        try:
            test = bundle.test(test_id)
        except KeyError:
            raise SessionError(f"unknown test {test_id!r}") from None
        if outcome not in test.outcomes:
            raise SessionError(f"test {test_id!r} has no outcome {outcome!r}")
        test_results = (*test_results, (test_id, outcome, clock))
        ops = (*ops, ("test", test_id, outcome))
    elif event.kind == "time-advance":
        duration = event.payload.get("duration")
        if not isinstance(duration, (int, float)) or not duration > 0:
            raise SessionError("time-advance requires duration > 0")
        ops = (*ops, ("project", float(duration), level))
        clock = clock + float(duration)
    elif event.kind == "level-set":
        value = event.payload.get("level")
        if not isinstance(value, int) or not 0 <= value < len(bundle.transitions.levels):
            raise SessionError(f"level must be an index in [0, {bundle.max_level}]")
        level = value
    elif event.kind == "ignition-reported":
        ignition = True

    belief = compute_belief(bundle, evidence, ops, ignition)
    return replace(
        state,
        seq=event.seq,
        clock=clock,
        status_quo_level=level,
        evidence=tuple(sorted(evidence.items())),
        test_results=test_results,
        ops=ops,
        ignition_evident=ignition,
        belief=belief,
    )


def replay(events: Iterable[SessionEvent], bundle: ScenarioBundle) -> SessionState:
    state: SessionState | None = None
    for event in events:
        state = apply_event(state, event, bundle)
    if state is None:
        raise SessionError("empty event log")
    return state


def replay_states(
    events: Iterable[SessionEvent], bundle: ScenarioBundle
) -> list[SessionState]:
    """States after each event, in order. Drives the session profile view."""
    states: list[SessionState] = []
    state: SessionState | None = None
    for event in events:
        state = apply_event(state, event, bundle)
        states.append(state)
    return states


class SessionStore:
    """JSONL-backed append-only session logs, one file per session."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def path(self, session_id: str) -> Path:
        if not _ID_PATTERN.match(session_id):
            raise SessionError(f"invalid session id {session_id!r}")
        return self.root / f"{session_id}.jsonl"

    def exists(self, session_id: str) -> bool:
        return _ID_PATTERN.match(session_id) is not None and self.path(session_id).exists()

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))

    def create(self, bundle: ScenarioBundle, session_id: str | None = None) -> str:
        sid = session_id if session_id is not None else uuid.uuid4().hex[:12]
        path = self.path(sid)
        with self._lock(sid):
            if path.exists():
                raise SessionError(f"session {sid!r} already exists")
            self._write_line(path, initial_event(bundle.id), mode="x")
        return sid

    def events(self, session_id: str) -> list[SessionEvent]:
        path = self.path(session_id)
        if not path.exists():
            raise SessionError(f"no such session {session_id!r}")
        out: list[SessionEvent] = []
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(SessionEvent.from_json(json.loads(line)))
        return out

    def scenario_id(self, session_id: str) -> str:
        events = self.events(session_id)
        if not events or events[0].kind != "session-created":
            raise SessionError(f"corrupt log for session {session_id!r}")
        return str(events[0].payload.get("scenario_id"))

    def state(self, session_id: str, bundle: ScenarioBundle) -> SessionState:
        return replay(self.events(session_id), bundle)

    def append(
        self,
        session_id: str,
        bundle: ScenarioBundle,
        kind: str,
        payload: dict,
        expected_seq: int | None = None,
    ) -> SessionState:
        """Validate against current state, then append. Returns the new state.

        ``expected_seq`` is the optimistic-concurrency guard: when given and
        not equal to the current seq the append is refused.
        """
        with self._lock(session_id):
            state = self.state(session_id, bundle)
            if expected_seq is not None and expected_seq != state.seq:
                raise StaleSequenceError(expected=expected_seq, actual=state.seq)
            event = SessionEvent(state.seq + 1, state.clock, kind, payload)
            new_state = apply_event(state, event, bundle)  # raises before any write
            self._write_line(self.path(session_id), event, mode="a")
        return new_state

    @staticmethod
    def _write_line(path: Path, event: SessionEvent, mode: str) -> None:
        line = json.dumps(event.to_json(), sort_keys=True, separators=(",", ":"))
        with path.open(mode, encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()


class StaleSequenceError(SessionError):
    """Optimistic concurrency conflict: the log moved past expected_seq."""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"stale sequence: expected seq {expected}, session is at {actual}"
        )
        self.expected = expected
        self.actual = actual
