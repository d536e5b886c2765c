"""HTTP service: blinded experiment stimuli, survey collection, exports.

Raters never see which strategy produced a stimulus: item payloads and
submission acknowledgements carry no method field. The stimulus-to-method join
happens server-side into the persisted store, which only the admin-gated
export exposes.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .evaluation import (INSTRUMENTS, SurveyResponse, validate_answers,
                         validate_demographics)
from .pipeline import GenerationRecord, StrategyKind, load_records

EXPERIMENTS = ("e1", "e2", "e3")


@dataclass
class StimulusSet:
    set_id: str
    cards: list[str]  # record ids in blinded display order


@dataclass
class ServiceState:
    run_dir: Path
    records: dict[str, GenerationRecord]
    e1_items: list[str]
    e2_items: list[str]
    e3_sets: list[StimulusSet]
    responses_path: Path
    participants_path: Path
    admin_token: str
    participants: dict[str, dict] = field(default_factory=dict)
    seen: set[tuple[str, str, str]] = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def method_of(self, record_id: str) -> str:
        return self.records[record_id].strategy.value


def _blind_order(set_id: str, members: list[str]) -> list[str]:
    """Deterministic shuffle keyed by the set id, so display order is stable
    across restarts but uncorrelated with method order."""
    return sorted(members,
                  key=lambda rid: hashlib.sha256(f"{set_id}|{rid}".encode()).hexdigest())


def derive_stimuli(records: list[GenerationRecord],
                   cap: int = 25) -> tuple[list[str], list[str], list[StimulusSet]]:
    """Default stimulus lists: first ``cap`` records for E1/E2, and every
    triplet covered by all five strategies as an E3 comparison set."""
    e1 = [r.id for r in records[:cap]]
    e2 = [r.id for r in records[:cap]]
    by_triplet: dict[str, dict[str, str]] = {}
    for record in records:
        by_triplet.setdefault(record.triplet.key(), {})[record.strategy.value] = record.id
    e3_sets = []
    for key in sorted(by_triplet):
        methods = by_triplet[key]
        if len(methods) == len(StrategyKind):
            members = sorted(methods.values())
            set_id = "set-" + hashlib.sha256("|".join(members).encode()).hexdigest()[:12]
            e3_sets.append(StimulusSet(set_id=set_id,
                                       cards=_blind_order(set_id, members)))
        if len(e3_sets) >= cap:
            break
    return e1, e2, e3_sets


def load_state(run_dir: str | Path, admin_token: str,
               stimulus_cap: int = 25) -> ServiceState:
    run_dir = Path(run_dir)
    records_path = run_dir / "records.jsonl"
    records = load_records(records_path) if records_path.exists() else []
    e1, e2, e3_sets = derive_stimuli(records, cap=stimulus_cap)
    state = ServiceState(
        run_dir=run_dir,
        records={r.id: r for r in records},
        e1_items=e1, e2_items=e2, e3_sets=e3_sets,
        responses_path=run_dir / "responses.jsonl",
        participants_path=run_dir / "participants.jsonl",
        admin_token=admin_token,
    )
    if state.participants_path.exists():
        with open(state.participants_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    state.participants[row["participant_id"]] = row["demographics"]
    if state.responses_path.exists():
        with open(state.responses_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    state.seen.add((row["participant_id"], row["experiment"],
                                    row["stimulus_id"]))
    return state


def _problems_response(problems: list[tuple[str, str]], status: int = 422) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"errors": [{"field": f, "message": m} for f, m in problems]})


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="outfitgen survey service")

    @app.post("/api/participants", status_code=201)
    def register_participant(payload: dict):
        demographics = payload.get("demographics")
        problems = validate_demographics(demographics or {})
        if problems:
            return _problems_response(problems)
        token = uuid.uuid4().hex
        with state.lock:
            state.participants[token] = demographics
            with open(state.participants_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"participant_id": token,
                                     "demographics": demographics}) + "\n")
                fh.flush()
        return {"participant_id": token}

    @app.get("/api/experiments/{experiment}/items")
    def experiment_items(experiment: str):
        if experiment not in EXPERIMENTS:
            return JSONResponse(status_code=404,
                                content={"detail": f"unknown experiment {experiment!r}"})
        instrument = INSTRUMENTS[experiment].to_dict()
        if experiment == "e1":
            items = [{"stimulus_id": rid, "image_url": f"/api/records/{rid}/image"}
                     for rid in state.e1_items]
        elif experiment == "e2":
            items = [{"stimulus_id": rid,
                      "description": state.records[rid].description}
                     for rid in state.e2_items]
        else:
            items = [{"stimulus_id": s.set_id,
                      "cards": [{"card_id": rid,
                                 "image_url": f"/api/records/{rid}/image"}
                                for rid in s.cards]}
                     for s in state.e3_sets]
        return {"experiment": experiment, "instrument": instrument, "items": items}

    @app.post("/api/responses")
    def submit_response(payload: dict):
        problems = []
        for key in ("participant_id", "experiment", "stimulus_id", "answers"):
            if key not in payload:
                problems.append((key, "missing"))
        if problems:
            return _problems_response(problems)
        experiment = payload["experiment"]
        if experiment not in EXPERIMENTS:
            return _problems_response([("experiment", "must be e1, e2, or e3")])
        participant_id = payload["participant_id"]
        if participant_id not in state.participants:
            return _problems_response([("participant_id", "unknown participant")])
        stimulus_id = payload["stimulus_id"]

        method: Optional[str] = None
        answers = payload["answers"]
        if experiment in ("e1", "e2"):
            known = state.e1_items if experiment == "e1" else state.e2_items
            if stimulus_id not in known:
                return JSONResponse(status_code=404,
                                    content={"detail": "unknown stimulus"})
            problems = validate_answers(experiment, answers)
            if problems:
                return _problems_response(problems)
            method = state.method_of(stimulus_id)
        else:
            matching = [s for s in state.e3_sets if s.set_id == stimulus_id]
            if not matching:
                return JSONResponse(status_code=404,
                                    content={"detail": "unknown stimulus"})
            cards = matching[0].cards
            if not isinstance(answers, dict) or "e3_rank" not in answers:
                return _problems_response([("answers.e3_rank", "missing answer")])
            rank = answers["e3_rank"]
            if (not isinstance(rank, list) or len(rank) != 5
                    or set(rank) != set(cards)):
                return _problems_response(
                    [("answers.e3_rank",
                      "must be a permutation of the served card ids")])
            answers = {"e3_rank": [state.method_of(rid) for rid in rank]}

        key = (participant_id, experiment, stimulus_id)
        with state.lock:
            if key in state.seen:
                return JSONResponse(status_code=409,
                                    content={"detail": "response already stored"})
            stored = SurveyResponse(
                participant_id=participant_id,
                experiment=experiment,
                stimulus_id=stimulus_id,
                answers=answers,
                demographics=state.participants[participant_id],
                method=method,
                timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            )
            with open(state.responses_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(stored.to_dict(), ensure_ascii=False) + "\n")
                fh.flush()
            state.seen.add(key)
        return JSONResponse(status_code=201, content={"status": "stored"})

    @app.get("/api/responses/export")
    def export_responses(request: Request):
        auth = request.headers.get("authorization", "")
        if auth != f"Bearer {state.admin_token}":
            return JSONResponse(status_code=401, content={"detail": "admin token required"})
        body = ""
        if state.responses_path.exists():
            body = state.responses_path.read_text(encoding="utf-8")
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/api/records/{record_id}/image")
    def record_image(record_id: str):
        record = state.records.get(record_id)
        if record is None:
            return JSONResponse(status_code=404, content={"detail": "unknown record"})
        path = state.run_dir / record.image_path
        if not path.exists():
            return JSONResponse(status_code=404, content={"detail": "image not on disk"})
        return Response(content=path.read_bytes(), media_type="image/png")

    return app
