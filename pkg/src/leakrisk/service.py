"""HTTP/JSON session service.

Thin FastAPI layer over the session fold: every mutating request appends
exactly one event to the session log, every GET is a pure view of the
replayed state.  No numeric work happens here beyond calling the library.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .decision import (
    RESPONSE_LABELS,
    SeverityLayer,
    classify_severity,
    escalating_recommend,
    forced_esd_recommendation,
    recommend,
)
from .errors import LeakRiskError
from .evolution import IGNITED, condition_on_no_ignition
from .inference import aggregate, posterior
from .model import AGGREGATE_STATES, FramingConstraints, ScenarioBundle
from .plan import HEURISTICS, build_plan
from .scenarios import load_builtin
from .session import SessionState, SessionStore, StaleSequenceError, replay_states


class CreateSessionIn(BaseModel):
    scenario_id: str
    session_id: str | None = None


class ObservationIn(BaseModel):
    node: str
    outcome: str
    expected_seq: int | None = None


class TestResultIn(BaseModel):
    test_id: str
    outcome: str
    expected_seq: int | None = None


class AdvanceIn(BaseModel):
    dt: float
    expected_seq: int | None = None


class LevelIn(BaseModel):
    level: int | str
    expected_seq: int | None = None


class IgnitionIn(BaseModel):
    expected_seq: int | None = None


class PlanIn(BaseModel):
    constraints: dict | None = None
    heuristic: str = "highest-ev-path"
    seed: int | None = None


def _severity_of(state: SessionState, bundle: ScenarioBundle) -> SeverityLayer:
    if state.ignition_evident:
        return classify_severity(None, True, bundle.severity)
    part = condition_on_no_ignition(state.belief)
    return classify_severity(part, False, bundle.severity)


def _scenario_view(bundle: ScenarioBundle) -> dict:
    return {
        "id": bundle.id,
        "levels": list(bundle.transitions.levels),
        "production_loss_rate": list(bundle.value.production_loss_rate),
        "ignition_loss": bundle.value.ignition_loss,
        "horizons": list(bundle.value.horizons),
        "observation_nodes": [
            {"name": node.name, "outcomes": list(node.outcomes)}
            for node in bundle.network.nodes
            if node.name != bundle.network.real_state_node
        ],
        "tests": [
            {
                "id": t.id,
                "label": t.label,
                "outcomes": list(t.outcomes),
                "duration": t.duration,
                "cost": t.cost,
                "repeatable": t.repeatable,
            }
            for t in bundle.tests
        ],
    }


def _session_view(session_id: str, state: SessionState, bundle: ScenarioBundle) -> dict:
    layer = _severity_of(state, bundle)
    return {
        "session_id": session_id,
        "state": state.to_json(),
        "severity": layer.label,
        "response_label": RESPONSE_LABELS[layer],
        "scenario": _scenario_view(bundle),
    }


def _constraints_from(bundle: ScenarioBundle, overrides: dict | None) -> FramingConstraints:
    base = bundle.constraints_default
    if not overrides:
        return base
    fields = {
        "max_tests": base.max_tests,
        "max_total_time": base.max_total_time,
        "max_total_cost": base.max_total_cost,
        "expansion_budget": base.expansion_budget,
        "seed": base.seed,
    }
    unknown = set(overrides) - set(fields)
    if unknown:
        raise LeakRiskError(f"unknown constraint fields: {sorted(unknown)}")
    fields.update(overrides)
    return FramingConstraints(**fields)


def create_app(
    store: SessionStore | None = None,
    scenarios: dict[str, ScenarioBundle] | None = None,
    data_dir: Path | str = "sessions",
) -> FastAPI:
    if store is None:
        store = SessionStore(data_dir)
    if scenarios is None:
        builtin = load_builtin()
        scenarios = {builtin.id: builtin}

    app = FastAPI(title="leakrisk session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(StaleSequenceError)
    async def _stale(_: Request, exc: StaleSequenceError):
        return JSONResponse(
            status_code=409,
            content={"detail": str(exc), "expected": exc.expected, "actual": exc.actual},
        )

    @app.exception_handler(LeakRiskError)
    async def _bad_request(_: Request, exc: LeakRiskError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def bundle_for(scenario_id: str) -> ScenarioBundle:
        if scenario_id not in scenarios:
            raise HTTPException(404, f"unknown scenario {scenario_id!r}")
        return scenarios[scenario_id]

    def session_bundle(session_id: str) -> ScenarioBundle:
        if not store.exists(session_id):
            raise HTTPException(404, f"unknown session {session_id!r}")
        return bundle_for(store.scenario_id(session_id))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionIn):
        bundle = bundle_for(body.scenario_id)
        sid = store.create(bundle, body.session_id)
        return _session_view(sid, store.state(sid, bundle), bundle)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        bundle = session_bundle(session_id)
        return _session_view(session_id, store.state(session_id, bundle), bundle)

    def _append(session_id: str, kind: str, payload: dict, expected_seq: int | None):
        bundle = session_bundle(session_id)
        state = store.append(session_id, bundle, kind, payload, expected_seq)
        return _session_view(session_id, state, bundle)

    @app.post("/sessions/{session_id}/observations")
    def post_observation(session_id: str, body: ObservationIn):
        return _append(
            session_id,
            "observation",
            {"node": body.node, "outcome": body.outcome},
            body.expected_seq,
        )

    @app.post("/sessions/{session_id}/test-results")
    def post_test_result(session_id: str, body: TestResultIn):
        return _append(
            session_id,
            "test-result",
            {"test_id": body.test_id, "outcome": body.outcome},
            body.expected_seq,
        )

    @app.post("/sessions/{session_id}/advance")
    def post_advance(session_id: str, body: AdvanceIn):
        return _append(session_id, "time-advance", {"duration": body.dt}, body.expected_seq)

    @app.post("/sessions/{session_id}/level")
    def post_level(session_id: str, body: LevelIn):
        bundle = session_bundle(session_id)
        level = body.level
        if isinstance(level, str):
            if level not in bundle.transitions.levels:
                raise HTTPException(400, f"unknown level {level!r}")
            level = bundle.transitions.levels.index(level)
        return _append(session_id, "level-set", {"level": level}, body.expected_seq)

    @app.post("/sessions/{session_id}/ignition")
    def post_ignition(session_id: str, body: IgnitionIn | None = None):
        expected = body.expected_seq if body is not None else None
        return _append(session_id, "ignition-reported", {}, expected)

    @app.get("/sessions/{session_id}/diagnosis")
    def get_diagnosis(session_id: str):
        bundle = session_bundle(session_id)
        state = store.state(session_id, bundle)
        detailed = posterior(
            bundle.network, state.evidence_dict(), bundle.network.real_state_node
        )
        agg = aggregate(detailed, bundle.aggregation, AGGREGATE_STATES)
        return {
            "session_id": session_id,
            "seq": state.seq,
            "evidence": state.evidence_dict(),
            "detailed": detailed.as_dict(),
            "aggregate": agg.as_dict(),
            "belief": state.belief.as_dict(),
            "ignition_evident": state.ignition_evident,
        }

    @app.get("/sessions/{session_id}/recommendation")
    def get_recommendation(session_id: str, horizon: float | None = Query(default=None)):
        bundle = session_bundle(session_id)
        state = store.state(session_id, bundle)
        if state.ignition_evident:
            rec = forced_esd_recommendation(
                bundle, horizon if horizon is not None else bundle.value.horizons[0]
            )
        else:
            part = condition_on_no_ignition(state.belief)
            if horizon is not None:
                rec = recommend(part, 0.0, state.status_quo_level, horizon, bundle)
            else:
                rec = escalating_recommend(part, 0.0, state.status_quo_level, bundle)
        return {"session_id": session_id, "seq": state.seq, **rec.to_json()}

    @app.post("/sessions/{session_id}/plan")
    def post_plan(session_id: str, body: PlanIn):
        bundle = session_bundle(session_id)
        state = store.state(session_id, bundle)
        if state.ignition_evident:
            raise HTTPException(
                400, "ignition evident: planning unavailable, emergency shutdown applies"
            )
        if body.heuristic not in HEURISTICS:
            raise HTTPException(400, f"heuristic must be one of {list(HEURISTICS)}")
        constraints = _constraints_from(bundle, body.constraints)
        if body.seed is not None:
            constraints = _constraints_from(bundle, {**(body.constraints or {}), "seed": body.seed})
        part = condition_on_no_ignition(state.belief)
        plan = build_plan(
            bundle, part, state.status_quo_level, constraints, heuristic=body.heuristic
        )
        return {"session_id": session_id, "seq": state.seq, **plan.to_json()}

    @app.get("/sessions/{session_id}/profile")
    def get_profile(session_id: str):
        bundle = session_bundle(session_id)
        events = store.events(session_id)
        states = replay_states(events, bundle)
        points = []
        for event, state in zip(events, states):
            layer = _severity_of(state, bundle)
            points.append(
                {
                    "seq": event.seq,
                    "kind": event.kind,
                    "clock": state.clock,
                    "ignition_probability": float(state.belief.probs[IGNITED]),
                    "severity": layer.label,
                    "response_label": RESPONSE_LABELS[layer],
                }
            )
        return {"session_id": session_id, "points": points}

    return app


def main() -> None:  # convenience for `python3 -m leakrisk.service`
    import uvicorn

    uvicorn.run(create_app(), host="127.0.0.1", port=8000)


if __name__ == "__main__":
    main()
