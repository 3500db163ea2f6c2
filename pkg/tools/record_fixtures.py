#!/usr/bin/env python3
"""Record live service responses into JSON fixtures for the explorer tests.

The explorer suite replays these through a mock fetch, so every number its
assertions touch originated from the real HTTP service. The request logs
mirror, request for request, the UI flows the tests drive; rerun this after
changing the bundled scenario or the service formats:

    python3 tools/record_fixtures.py
"""

import json
import random
from pathlib import Path

from fastapi.testclient import TestClient

from norm_engine.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

SCENARIO = "spanish_steps"

# The four crowd-perspective keys the branch comparison charts.
KEYS4 = [
    "cssm(Western,Politeness,Client,Crowd,Client)",
    "cssm(Western,Dignity,Client,Crowd,Client)",
    "cssm(Western,Politeness,Seller,Crowd,Seller)",
    "cssm(Western,Dignity,Seller,Crowd,Seller)",
]

# sell_success through the first declined return; the branch point.
PREFIX = [
    ("alpha1", "Seller", {}),
    ("alpha4", "Client", {}),
    ("alpha5", "Seller", {}),
    ("alpha7", "Client", {}),
    ("alpha13", "Seller", {"t": 15}),
    ("alpha14", "Seller", {}),
    ("alpha10", "Client", {"x": 0.2, "y": 0.4}),
    ("alpha11", "Seller", {}),
]

ESCALATION = [
    ("alpha10", "Client", {"x": 0.5, "y": 0.6}),
    ("alpha11", "Seller", {}),
    ("alpha10", "Client", {"x": 0.7, "y": 0.8}),
    ("alpha11", "Seller", {}),
    ("alpha10", "Client", {"x": 0.9, "y": 1.0}),
]

SELL_SUCCESS_TAIL = [("alpha2", "Client", {}), ("alpha3", "Client", {})]

SELL_FAIL = [
    ("alpha1", "Seller", {}),
    ("alpha4", "Client", {}),
    ("alpha5", "Seller", {}),
    ("alpha7", "Client", {}),
    ("alpha13", "Seller", {"t": 1}),
    ("alpha14", "Seller", {}),
    ("alpha10", "Client", {"x": 0.2, "y": 0.4}),
    ("alpha11", "Seller", {}),
    ("alpha10", "Client", {"x": 0.5, "y": 0.6}),
    ("alpha12", "Seller", {}),
]


class Recorder:
    """Logs every request/response pair in the order the UI would issue them."""

    def __init__(self, client: TestClient):
        self.client = client
        self.log: list[dict] = []

    def post(self, path: str, body: dict) -> dict:
        resp = self.client.post(path, json=body)
        self.log.append({"method": "POST", "path": path, "keys": None,
                         "body": body, "status": resp.status_code,
                         "response": resp.json()})
        return resp.json()

    def trace(self, session_id: str, keys: list[str]) -> dict:
        joined = ",".join(keys)
        path = f"/api/v1/sessions/{session_id}/trace"
        resp = self.client.get(path, params={"keys": joined})
        assert resp.status_code == 200, resp.text
        self.log.append({"method": "GET", "path": path, "keys": joined,
                         "body": None, "status": resp.status_code,
                         "response": resp.json()})
        return resp.json()


def create(rec: Recorder, variant: str = "with_spouse") -> dict:
    doc = rec.post("/api/v1/sessions", {"scenario": SCENARIO, "variant": variant})
    assert "session" in doc, doc
    for key in KEYS4:
        assert key in doc["keys"], f"{key} missing from scenario keys"
    return doc


def step(rec: Recorder, session_id: str, action: str, actor: str, args: dict,
         keys: list[str]) -> dict:
    doc = rec.post(f"/api/v1/sessions/{session_id}/actions",
                   {"actor": actor, "action_type": action, "args": args})
    assert "step" in doc, doc
    if keys:
        rec.trace(session_id, keys)
    return doc


def record_branch_flow(client: TestClient) -> list[dict]:
    """Mirror the interactive flow: replay to the branch point, fork, escalate.

    UI request order per mutation: POST, then a trace refetch for the touched
    session. Key selection happens one checkbox at a time right after create.
    """
    rec = Recorder(client)
    base = create(rec)
    base_id = base["session"]["id"]
    for upto in range(1, len(KEYS4) + 1):
        rec.trace(base_id, KEYS4[:upto])
    for action, actor, args in PREFIX:
        step(rec, base_id, action, actor, args, KEYS4)
    fork = rec.post(f"/api/v1/sessions/{base_id}/branch", {"at_step": 8})
    fork_id = fork["session"]["id"]
    rec.trace(fork_id, KEYS4)
    for action, actor, args in ESCALATION:
        step(rec, fork_id, action, actor, args, KEYS4)
    return rec.log


def record_error_surface(client: TestClient) -> list[dict]:
    """A fresh session, one illegal action (409), one bad branch index (422)."""
    rec = Recorder(client)
    base = create(rec)
    base_id = base["session"]["id"]
    doc = rec.post(f"/api/v1/sessions/{base_id}/actions",
                   {"actor": "Client", "action_type": "alpha3", "args": {}})
    assert rec.log[-1]["status"] == 409, doc
    doc = rec.post(f"/api/v1/sessions/{base_id}/branch", {"at_step": 99})
    assert rec.log[-1]["status"] == 422, doc
    return rec.log


def snapshot(client: TestClient, session_id: str) -> dict:
    state = client.get(f"/api/v1/sessions/{session_id}").json()
    trace = client.get(f"/api/v1/sessions/{session_id}/trace",
                       params={"keys": ",".join(state["keys"])}).json()
    return {"state": state, "trace": trace}


def replay(client: TestClient, variant: str, actions: list[tuple]) -> str:
    doc = client.post("/api/v1/sessions",
                      json={"scenario": SCENARIO, "variant": variant}).json()
    sid = doc["session"]["id"]
    for action, actor, args in actions:
        resp = client.post(f"/api/v1/sessions/{sid}/actions",
                           json={"actor": actor, "action_type": action,
                                 "args": args})
        assert resp.status_code == 200, resp.text
    return sid


def record_gating_states(client: TestClient, count: int = 50) -> list[dict]:
    """Session states at assorted depths, variants, and terminal outcomes."""
    rng = random.Random(777)
    variants = ["with_spouse", "no_spouse", "paper-verbatim"]
    entries = [
        snapshot(client, replay(client, "with_spouse", [])),
        snapshot(client, replay(client, "with_spouse", PREFIX[:4])),
        snapshot(client, replay(client, "with_spouse",
                                PREFIX + SELL_SUCCESS_TAIL)),
        snapshot(client, replay(client, "no_spouse", SELL_FAIL)),
    ]
    while len(entries) < count:
        variant = variants[len(entries) % len(variants)]
        doc = client.post("/api/v1/sessions",
                          json={"scenario": SCENARIO,
                                "variant": variant}).json()
        sid = doc["session"]["id"]
        available = doc["available"]
        for _ in range(rng.randint(0, 12)):
            pairs = [(actor, action)
                     for actor, actions in sorted(available.items())
                     for action in actions]
            if not pairs:
                break
            actor, action = rng.choice(pairs)
            args = {}
            if action in ("alpha8", "alpha10"):
                args = {"x": rng.randint(0, 10) / 10,
                        "y": rng.randint(0, 10) / 10}
            elif action == "alpha13":
                args = {"t": rng.randint(0, 20)}
            try:
                resp = client.post(f"/api/v1/sessions/{sid}/actions",
                                   json={"actor": actor, "action_type": action,
                                         "args": args})
            except Exception:
                break  # conflicting evidence rolls the step back; state holds
            if resp.status_code != 200:
                break
            available = resp.json()["available"]
        entries.append(snapshot(client, sid))
    return entries


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with TestClient(create_app()) as client:
        scenarios = client.get("/api/v1/scenarios").json()
        out = {
            "scenario.json": scenarios,
            "branch_flow.json": record_branch_flow(client),
            "error_surface.json": record_error_surface(client),
            "gating_states.json": record_gating_states(client),
        }
    for name, payload in out.items():
        path = FIXTURES / name
        compact = name == "gating_states.json"
        text = json.dumps(payload, separators=(",", ":")) if compact \
            else json.dumps(payload, indent=1)
        path.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {path} ({path.stat().st_size:,} bytes)")


if __name__ == "__main__":
    main()
