"""Bidirectional message protocol exposing sessions to clients.

Two roles connect over websockets: the participant (board and tour client)
and the assessor (corrections, advancement, score view). Every state
transition visible to clients maps 1:1 onto a session operation; the
service adds no state of its own beyond connection bookkeeping. Logs are
persisted continuously as JSONL, one record per protocol-relevant event.
"""

from __future__ import annotations

import asyncio
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import storage
from .board import configuration_hash
from .errors import (
    ClockError,
    CogmapError,
    ConflictError,
    CorrectionReferenceError,
    PendingCorrectionError,
    PhaseError,
)
from .session import (
    AssessmentPlan,
    Correction,
    Participant,
    Session,
    create_session,
)

ROLES = ("participant", "assessor")

CLIENT_KINDS = {
    "join": ["role", "participant", "group"],
    "tour_ready": [],
    "tour_pause": ["waypoint_index"],
    "tour_resume": [],
    "tour_complete": [],
    "board_event": ["action", "building", "col", "row", "orientation"],
    "done": [],
    "resolve": ["event_id", "building"],
    "advance": [],
    "abort": [],
}

SERVER_KINDS = {
    "joined": ["role", "session_id"],
    "trial_start": ["index", "kind", "num_buildings"],
    "tour_data": ["waypoints", "north_heading", "panorama", "resume_at"],
    "phase": ["phase"],
    "event_ack": ["event_id", "status", "error", "state_hash"],
    "correction_needed": ["event_id"],
    "trial_score": ["report"],
    "session_complete": ["status"],
    "error": ["code", "detail"],
}

ASSESSOR_ONLY = {"resolve", "advance", "abort"}


def message_schema() -> dict:
    """The exact protocol descriptor; stable across releases."""
    return {
        "version": 1,
        "client": {kind: list(fields) for kind, fields in CLIENT_KINDS.items()},
        "server": {kind: list(fields) for kind, fields in SERVER_KINDS.items()},
        "assessor_only": sorted(ASSESSOR_ONLY),
    }


@dataclass
class LiveSession:
    token: str
    session: Session
    log_path: Path
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    clients: Dict[str, WebSocket] = field(default_factory=dict)

    def persist(self, record: dict) -> None:
        with open(self.log_path, "a") as fh:
            fh.write(storage._dump(record) + "\n")

    async def send(self, role: str, message: dict) -> None:
        ws = self.clients.get(role)
        if ws is not None:
            await ws.send_json(message)

    async def broadcast(self, message: dict) -> None:
        for role in ROLES:
            await self.send(role, message)


def create_app(plan: AssessmentPlan, log_dir, clock=None) -> FastAPI:
    app = FastAPI()
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    live: Dict[str, LiveSession] = {}
    app.state.live_sessions = live

    def get_or_create(token: str, participant: str, group: str) -> LiveSession:
        if token not in live:
            session = create_session(
                Participant(participant, group), plan,
                session_id=token, clock=clock,
            )
            ls = LiveSession(token, session,
                             log_dir / f"{token}{storage.SESSION_SUFFIX}")
            ls.persist(storage.meta_record(session))
            ls.persist(storage.trial_start_record(session.current_trial))
            live[token] = ls
        return live[token]

    def trial_start_message(session: Session) -> dict:
        trial = session.current_trial
        return {
            "kind": "trial_start",
            "index": trial.index,
            "trial_kind": trial.kind,
            "num_buildings": trial.num_buildings,
        }

    @app.get("/schema")
    def schema():
        return message_schema()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket, token: str):
        await websocket.accept()
        ls: Optional[LiveSession] = None
        role: Optional[str] = None
        last_seq = 0
        server_seq = itertools.count(1)

        async def reply(message: dict, re: Optional[int] = None):
            message = dict(message)
            message["seq"] = next(server_seq)
            if re is not None:
                message["re"] = re
            await websocket.send_json(message)

        try:
            while True:
                msg = await websocket.receive_json()
                kind = msg.get("kind")
                seq = msg.get("seq")
                if not isinstance(seq, int) or seq <= last_seq:
                    await reply({"kind": "error", "code": "ordering",
                                 "detail": f"stale or missing seq {seq!r}"},
                                re=seq if isinstance(seq, int) else None)
                    continue
                last_seq = seq
                if kind not in CLIENT_KINDS:
                    await reply({"kind": "error", "code": "protocol",
                                 "detail": f"unknown kind {kind!r}"}, re=seq)
                    continue
                if kind == "join":
                    if msg.get("role") not in ROLES:
                        await reply({"kind": "error", "code": "protocol",
                                     "detail": "role must be participant|assessor"},
                                    re=seq)
                        continue
                    role = msg["role"]
                    ls = get_or_create(token,
                                       msg.get("participant", "anonymous"),
                                       msg.get("group", "young"))
                    ls.clients[role] = websocket
                    await reply({"kind": "joined", "role": role,
                                 "session_id": ls.session.session_id}, re=seq)
                    await reply(trial_start_message(ls.session))
                    continue
                if ls is None:
                    await reply({"kind": "error", "code": "protocol",
                                 "detail": "join first"}, re=seq)
                    continue
                if kind in ASSESSOR_ONLY and role != "assessor":
                    await reply({"kind": "error", "code": "role",
                                 "detail": f"{kind} is assessor-only"}, re=seq)
                    continue
                async with ls.lock:
                    await handle(ls, role, kind, msg, reply)
        except WebSocketDisconnect:
            if ls is not None and role is not None \
                    and ls.clients.get(role) is websocket:
                del ls.clients[role]

    async def handle(ls: LiveSession, role: str, kind: str, msg: dict, reply):
        session = ls.session
        seq = msg["seq"]
        try:
            if kind == "tour_ready":
                tour = session.begin_viewing()
                ls.persist(storage.phase_record(session.trial_index, "viewing"))
                await reply({"kind": "phase", "phase": "viewing"}, re=seq)
                await reply({
                    "kind": "tour_data",
                    "waypoints": [
                        {"x": w.x, "y": w.y, "heading": w.heading}
                        for w in tour.waypoints
                    ],
                    "north_heading": tour.north_heading,
                })
            elif kind == "tour_pause":
                panorama = session.pause_tour(msg.get("waypoint_index"))
                await reply({
                    "kind": "tour_data",
                    "panorama": {
                        "waypoint_index": panorama.waypoint_index,
                        "sweep_degrees": panorama.sweep_degrees,
                        "rate_deg_per_s": panorama.rate_deg_per_s,
                    },
                }, re=seq)
            elif kind == "tour_resume":
                resume_at = session.resume_tour()
                await reply({"kind": "tour_data", "resume_at": resume_at}, re=seq)
            elif kind == "tour_complete":
                session.complete_tour()
                session.begin_construction()
                ls.persist(storage.phase_record(session.trial_index,
                                                "construction", t_ms=0))
                await ls.broadcast({"kind": "phase", "phase": "construction"})
            elif kind == "board_event":
                building = msg.get("building")
                outcome = session.record_event(
                    action=msg["action"],
                    building=None if building in (None, "unknown") else building,
                    col=msg["col"], row=msg["row"],
                    orientation=msg.get("orientation"),
                )
                ls.persist(storage.board_event_record(session.trial_index,
                                                      outcome.event))
                await reply({
                    "kind": "event_ack",
                    "event_id": outcome.event.event_id,
                    "status": outcome.status,
                    "error": outcome.error_code,
                    "state_hash": configuration_hash(
                        session.current_configuration()),
                }, re=seq)
                if outcome.status == "flagged":
                    await ls.send("assessor", {
                        "kind": "correction_needed",
                        "event_id": outcome.event.event_id,
                        "seq": -1,
                    })
            elif kind == "resolve":
                trial_index = session.trial_index
                correction = Correction(msg["event_id"], msg["building"],
                                        source="interactive")
                session.resolve_unidentified(correction)
                ls.persist(storage.correction_record(trial_index, correction))
                await reply({
                    "kind": "event_ack",
                    "event_id": msg["event_id"],
                    "status": "resolved",
                    "state_hash": configuration_hash(
                        session.current_configuration()),
                }, re=seq)
            elif kind == "done":
                trial = session.current_trial
                report = session.participant_done()
                log = session.logs[trial.index]
                ls.persist(storage.phase_record(trial.index, "done",
                                                t_ms=log.done_ms))
                if report is not None:
                    ls.persist(storage.score_record(report))
                    await ls.send("assessor", {
                        "kind": "trial_score",
                        "trial": trial.index,
                        "report": storage.report_to_dict(report),
                        "seq": -1,
                    })
                await reply({"kind": "phase", "phase": "done"}, re=seq)
                if session.complete:
                    ls.persist(storage.session_end_record("complete"))
                    await ls.broadcast({"kind": "session_complete",
                                        "status": "complete", "seq": -1})
            elif kind == "advance":
                if session.complete:
                    await reply({"kind": "error", "code": "phase",
                                 "detail": "session already complete"}, re=seq)
                    return
                ls.persist(storage.trial_start_record(session.current_trial))
                await ls.broadcast({**trial_start_message(session), "seq": -1})
            elif kind == "abort":
                session.abort()
                ls.persist(storage.session_end_record("aborted"))
                await ls.broadcast({"kind": "session_complete",
                                    "status": "aborted", "seq": -1})
        except PhaseError as exc:
            await reply({"kind": "error", "code": "phase", "detail": str(exc)},
                        re=seq)
        except PendingCorrectionError as exc:
            await reply({"kind": "error", "code": "pending_correction",
                         "detail": str(exc)}, re=seq)
        except (ConflictError, CorrectionReferenceError) as exc:
            await reply({"kind": "error", "code": "conflict",
                         "detail": str(exc)}, re=seq)
        except (ClockError, CogmapError) as exc:
            await reply({"kind": "error", "code": "data", "detail": str(exc)},
                        re=seq)

    return app


def serve(plan: AssessmentPlan, host: str = "127.0.0.1", port: int = 8321,
          log_dir="sessions") -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(plan, log_dir), host=host, port=port)
