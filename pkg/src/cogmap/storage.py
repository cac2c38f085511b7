"""Durable formats: neighborhood files, JSONL session logs, score exports.

Session logs are JSONL so they can be appended to safely during a live
session and read back as a consistent prefix. All timestamps persist as
integer milliseconds; seconds appear only in derived reports. A log file
written by this module round-trips byte-identically through read/write.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import scoring
from .board import (
    BoardEvent,
    BoardGeometry,
    MapConfiguration,
    Placement,
    TrialLog,
    default_geometry,
    validate_configuration,
)
from .errors import (
    NeighborhoodParseError,
    NeighborhoodValidationError,
    PartialReadError,
    PendingScoreError,
    PlanError,
)
from .session import (
    AssessmentPlan,
    Correction,
    Participant,
    Session,
    TrialDefinition,
    Waypoint,
    default_assessment_plan,
)

NEIGHBORHOOD_SUFFIX = ".neighborhood.json"
SESSION_SUFFIX = ".session.jsonl"


def _dump(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"))


# ---------------------------------------------------------------------------
# neighborhood files


@dataclass(frozen=True)
class Neighborhood:
    name: str
    config: MapConfiguration
    tour: Tuple[Waypoint, ...]
    geometry: BoardGeometry


def _geometry_from_dict(data: Optional[dict]) -> BoardGeometry:
    if not data:
        return default_geometry()
    kwargs = {}
    for key in ("columns", "rows", "width", "height"):
        if key in data:
            kwargs[key] = data[key]
    if "street_mask" in data:
        kwargs["street_mask"] = frozenset(tuple(c) for c in data["street_mask"])
    return BoardGeometry(**kwargs)


def load_neighborhood(path, geometry: Optional[BoardGeometry] = None) -> Neighborhood:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
        name = data["name"]
        placements = [
            Placement(b["id"], b["col"], b["row"], b.get("orientation", 0))
            for b in data["buildings"]
        ]
        tour = tuple(
            Waypoint(w["x"], w["y"], w.get("heading", 0.0))
            for w in data.get("tour", [])
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise NeighborhoodParseError(f"{path}: {exc}") from exc
    geometry = geometry or _geometry_from_dict(data.get("geometry"))
    config = MapConfiguration.of(placements)
    violations = validate_configuration(config, geometry)
    if violations:
        raise NeighborhoodValidationError(violations)
    return Neighborhood(name, config, tour, geometry)


def write_neighborhood(path, name: str, config: MapConfiguration,
                       tour, geometry: Optional[BoardGeometry] = None) -> None:
    data = {
        "name": name,
        "buildings": [
            {"id": p.building, "col": p.col, "row": p.row,
             "orientation": p.orientation}
            for p in config.placements
        ],
        "tour": [{"x": w.x, "y": w.y, "heading": w.heading} for w in tour],
    }
    if geometry is not None:
        data["geometry"] = {
            "columns": geometry.columns, "rows": geometry.rows,
            "width": geometry.width, "height": geometry.height,
            "street_mask": sorted(list(c) for c in geometry.street_mask),
        }
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------------------
# assessment plans


def load_plan(path) -> AssessmentPlan:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
        name = data["name"]
        trial_specs = data["trials"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise NeighborhoodParseError(f"{path}: {exc}") from exc
    geometry = _geometry_from_dict(data.get("geometry"))
    trials = []
    for i, spec in enumerate(trial_specs):
        neighborhood = load_neighborhood(path.parent / spec["neighborhood"], geometry)
        trials.append(TrialDefinition(
            index=i, kind=spec["kind"], target=neighborhood.config,
            tour=neighborhood.tour, num_buildings=len(neighborhood.config),
        ))
    if not trials:
        raise PlanError(f"{path}: plan has no trials")
    return AssessmentPlan(name, tuple(trials), geometry, m_max=data.get("m_max"))


def write_plan_files(directory, plan: AssessmentPlan) -> Path:
    """Materialize a plan and its neighborhoods as files; returns plan path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    specs = []
    for trial in plan.trials:
        fname = f"trial{trial.index:02d}{NEIGHBORHOOD_SUFFIX}"
        write_neighborhood(directory / fname, f"{plan.name}-trial{trial.index}",
                           trial.target, trial.tour)
        specs.append({"kind": trial.kind, "neighborhood": fname})
    plan_path = directory / "plan.json"
    plan_path.write_text(json.dumps({
        "name": plan.name,
        "m_max": plan.params().m_max,
        "trials": specs,
    }, indent=2) + "\n")
    return plan_path


def write_default_plan_files(directory) -> Path:
    return write_plan_files(directory, default_assessment_plan())


# ---------------------------------------------------------------------------
# session logs (JSONL)


def meta_record(session: Session) -> dict:
    return {
        "kind": "session_meta",
        "session_id": session.session_id,
        "participant": session.participant.participant_id,
        "group": session.participant.group,
        "plan": session.plan.name,
        "north_heading": session.north_heading,
    }


def trial_start_record(trial: TrialDefinition) -> dict:
    return {
        "kind": "trial_start",
        "trial": trial.index,
        "trial_kind": trial.kind,
        "num_buildings": trial.num_buildings,
    }


def phase_record(trial_index: int, phase: str, t_ms: Optional[int] = None) -> dict:
    rec = {"kind": "phase_change", "trial": trial_index, "phase": phase}
    if t_ms is not None:
        rec["t_ms"] = t_ms
    return rec


def board_event_record(trial_index: int, event: BoardEvent) -> dict:
    return {
        "kind": "board_event",
        "trial": trial_index,
        "event_id": event.event_id,
        "t_ms": event.t_ms,
        "action": event.action,
        "building": event.building if event.building is not None else "unknown",
        "col": event.col,
        "row": event.row,
        "orientation": event.orientation,
        "rejected": event.rejected,
    }


def correction_record(trial_index: int, correction: Correction) -> dict:
    return {
        "kind": "correction",
        "trial": trial_index,
        "event_id": correction.event_id,
        "building": correction.resolved_building,
        "source": correction.source,
    }


def report_to_dict(report: scoring.ScoreReport) -> dict:
    return {
        "trial": report.trial,
        "number": report.number,
        "difference": report.difference,
        "distance": report.distance,
        "orient": report.orient,
        "interbuilding": report.interbuilding,
        "similarity": report.similarity,
        "totalTime_s": report.total_time_s,
        "dSim_per_s": report.d_sim_per_s,
    }


def report_from_dict(data: dict) -> scoring.ScoreReport:
    return scoring.ScoreReport(
        trial=data["trial"], number=data["number"], difference=data["difference"],
        distance=data["distance"], orient=data["orient"],
        interbuilding=data["interbuilding"], similarity=data["similarity"],
        total_time_s=data["totalTime_s"], d_sim_per_s=data["dSim_per_s"],
    )


def score_record(report: scoring.ScoreReport) -> dict:
    return {"kind": "trial_score", **report_to_dict(report)}


def session_end_record(status: str) -> dict:
    return {"kind": "session_end", "status": status}


def serialize_session(session: Session) -> List[dict]:
    """Flatten a session into its ordered JSONL records."""
    records = [meta_record(session)]
    corrections_by_trial: Dict[int, List[Correction]] = {}
    for trial_index, correction in session.corrections:
        corrections_by_trial.setdefault(trial_index, []).append(correction)
    for trial in session.plan.trials:
        if trial.index not in session.logs:
            break
        log = session.logs[trial.index]
        records.append(trial_start_record(trial))
        records.append(phase_record(trial.index, "viewing"))
        records.append(phase_record(trial.index, "construction", t_ms=0))
        for event in log.events:
            records.append(board_event_record(trial.index, event))
        for correction in corrections_by_trial.get(trial.index, []):
            records.append(correction_record(trial.index, correction))
        records.append(phase_record(trial.index, "done", t_ms=log.done_ms))
        if trial.index in session.reports:
            records.append(score_record(session.reports[trial.index]))
    if session.complete:
        records.append(session_end_record(
            "aborted" if session.aborted else "complete"
        ))
    return records


@dataclass
class StoredSession:
    """A session log file's contents, raw records plus reconstructed views."""

    records: List[dict]
    session_id: str = ""
    participant: Optional[Participant] = None
    trial_logs: Dict[int, TrialLog] = field(default_factory=dict)
    reports: Dict[int, scoring.ScoreReport] = field(default_factory=dict)
    corrections: List[Tuple[int, Correction]] = field(default_factory=list)
    status: str = "open"


def _reconstruct(records: List[dict]) -> StoredSession:
    stored = StoredSession(records=records)
    events: Dict[int, List[BoardEvent]] = {}
    done: Dict[int, Optional[int]] = {}
    for rec in records:
        kind = rec["kind"]
        if kind == "session_meta":
            stored.session_id = rec["session_id"]
            stored.participant = Participant(rec["participant"], rec["group"])
        elif kind == "board_event":
            building = rec["building"]
            events.setdefault(rec["trial"], []).append(BoardEvent(
                event_id=rec["event_id"], t_ms=rec["t_ms"], action=rec["action"],
                building=None if building == "unknown" else building,
                col=rec["col"], row=rec["row"],
                orientation=rec["orientation"], rejected=rec["rejected"],
            ))
        elif kind == "phase_change":
            if rec["phase"] == "done":
                done[rec["trial"]] = rec.get("t_ms")
            events.setdefault(rec["trial"], [])
        elif kind == "correction":
            stored.corrections.append((rec["trial"], Correction(
                rec["event_id"], rec["building"], rec["source"],
            )))
        elif kind == "trial_score":
            stored.reports[rec["trial"]] = report_from_dict(rec)
        elif kind == "session_end":
            stored.status = rec["status"]
    for trial_index, trial_events in events.items():
        stored.trial_logs[trial_index] = TrialLog(
            tuple(trial_events), started=True, done_ms=done.get(trial_index),
        )
    return stored


def write_log(path, session) -> None:
    """Write a Session or StoredSession to a JSONL file."""
    records = session.records if isinstance(session, StoredSession) \
        else serialize_session(session)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(_dump(rec) + "\n")


def read_log(path) -> StoredSession:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                rec = json.loads(stripped)
                if not isinstance(rec, dict) or "kind" not in rec:
                    raise ValueError("record without kind")
            except ValueError as exc:
                raise PartialReadError(lineno - 1,
                                       f"{path}: bad record at line {lineno}: {exc}")
            records.append(rec)
    return _reconstruct(records)


# ---------------------------------------------------------------------------
# report export


METRIC_COLUMNS = ("number", "difference", "distance", "orient",
                  "interbuilding", "similarity", "totalTime_s", "dSim_per_s")


def mean_and_se(values) -> Tuple[float, float]:
    """Sample mean and standard error (n-1 denominator); SE is 0 for n=1."""
    values = list(values)
    mean = statistics.mean(values)
    se = 0.0 if len(values) < 2 else statistics.stdev(values) / len(values) ** 0.5
    return mean, se


def _trial_rows(stored: StoredSession, plan: AssessmentPlan) -> List[dict]:
    rows = []
    for trial in plan.recorded_trials():
        if trial.index not in stored.reports:
            raise PendingScoreError(
                f"session {stored.session_id}: trial {trial.index} unscored"
            )
        report = stored.reports[trial.index]
        rows.append({
            "session": stored.session_id,
            "participant": stored.participant.participant_id,
            "group": stored.participant.group,
            "num_buildings": trial.num_buildings,
            **report_to_dict(report),
        })
    return rows


def build_report(sessions: List[StoredSession], plan: AssessmentPlan) -> dict:
    """Per-trial table, per-group mean/SE table, and similarity timelines."""
    trials = []
    for stored in sessions:
        trials.extend(_trial_rows(stored, plan))
    groups = []
    keys = sorted({(r["group"], r["num_buildings"]) for r in trials})
    for group, n in keys:
        row = {"group": group, "num_buildings": n}
        members = [r for r in trials if r["group"] == group
                   and r["num_buildings"] == n]
        for metric in METRIC_COLUMNS:
            values = [r[metric] for r in members if r[metric] is not None]
            if values:
                row[f"{metric}_mean"], row[f"{metric}_se"] = mean_and_se(values)
            else:
                row[f"{metric}_mean"] = row[f"{metric}_se"] = None
        groups.append(row)
    timelines = []
    params = plan.params()
    for stored in sessions:
        for trial in plan.recorded_trials():
            log = stored.trial_logs.get(trial.index)
            if log is None:
                continue
            timeline = scoring.score_timeline(log, trial.target, params,
                                              plan.geometry)
            timelines.append({
                "session": stored.session_id,
                "participant": stored.participant.participant_id,
                "group": stored.participant.group,
                "trial": trial.index,
                "num_buildings": trial.num_buildings,
                "samples": [[t, s] for t, s in timeline.samples],
            })
    return {"trials": trials, "groups": groups, "timelines": timelines}


def _write_csv(path, rows: List[dict], columns: List[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def export_report(sessions: List[StoredSession], plan: AssessmentPlan,
                  path, fmt: str = "json") -> dict:
    """Write the aggregate report; returns the report dict."""
    report = build_report(sessions, plan)
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(report, indent=2) + "\n")
    elif fmt == "csv":
        trial_cols = ["session", "participant", "group", "num_buildings",
                      "trial"] + [c for c in METRIC_COLUMNS]
        _write_csv(path, report["trials"], trial_cols)
        group_cols = ["group", "num_buildings"]
        for metric in METRIC_COLUMNS:
            group_cols += [f"{metric}_mean", f"{metric}_se"]
        _write_csv(path.with_suffix(".groups.csv"), report["groups"], group_cols)
        timeline_rows = [
            {"session": t["session"], "participant": t["participant"],
             "group": t["group"], "trial": t["trial"],
             "num_buildings": t["num_buildings"], "t_s": sample[0],
             "similarity": sample[1]}
            for t in report["timelines"] for sample in t["samples"]
        ]
        _write_csv(path.with_suffix(".timelines.csv"), timeline_rows,
                   ["session", "participant", "group", "trial",
                    "num_buildings", "t_s", "similarity"])
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return report
