"""Operator entry points: serve, score, simulate, replay.

Exit codes: 0 success, 1 usage error, 2 data error. Standard output is
human-readable; machine consumption always goes through --out files.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import scoring, simulate, storage
from .board import MapConfiguration, apply_event, configuration_hash
from .errors import CogmapError, PartialReadError
from .session import apply_posthoc_corrections

# spec'd exit-code contract: usage errors exit 1
click.UsageError.exit_code = 1

PLAN_DIR_ENV = "CMP_PLAN_DIR"


def _resolve_plan(plan_path):
    if plan_path is None:
        plan_dir = os.environ.get(PLAN_DIR_ENV)
        if plan_dir:
            plan_path = Path(plan_dir) / "plan.json"
    if plan_path is None:
        raise click.UsageError(
            f"--plan required (or set {PLAN_DIR_ENV})"
        )
    try:
        return storage.load_plan(plan_path)
    except CogmapError as exc:
        _data_error(f"cannot load plan: {exc}")


def _data_error(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


@click.group()
def main():
    """Cognitive-map assessment engine."""


@main.command("serve")
@click.option("--plan", "plan_path", type=click.Path(), default=None,
              help="Assessment plan JSON.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
@click.option("--log-dir", default="sessions", show_default=True,
              help="Directory for live .session.jsonl files.")
def cmd_serve(plan_path, host, port, log_dir):
    """Run the assessment service until interrupted."""
    from .service import serve

    plan = _resolve_plan(plan_path)
    click.echo(f"serving plan {plan.name!r} on ws://{host}:{port}/ws")
    serve(plan, host=host, port=port, log_dir=log_dir)


def _load_scored_session(session_path, plan, corrections_path=None):
    try:
        stored = storage.read_log(session_path)
    except PartialReadError as exc:
        _data_error(f"truncated log: last good line {exc.last_good_line} ({exc})")
    except OSError as exc:
        _data_error(str(exc))
    corrections_by_trial = {}
    if corrections_path:
        data = json.loads(Path(corrections_path).read_text())
        from .session import Correction
        for c in data:
            corrections_by_trial.setdefault(c.get("trial"), []).append(
                Correction(c["event_id"], c["building"],
                           c.get("source", "posthoc")))
    params = plan.params()
    reports = {}
    timelines = {}
    for trial in plan.recorded_trials():
        log = stored.trial_logs.get(trial.index)
        if log is None:
            _data_error(f"session has no log for recorded trial {trial.index}")
        if trial.index in corrections_by_trial:
            try:
                log = apply_posthoc_corrections(
                    log, corrections_by_trial[trial.index])
            except CogmapError as exc:
                _data_error(f"trial {trial.index}: {exc}")
        pending = [e.event_id for e in log.events
                   if e.building is None and not e.rejected]
        if pending:
            _data_error(
                f"trial {trial.index} has unresolved events: {', '.join(pending)}"
            )
        try:
            reports[trial.index] = scoring.score_trial(
                trial.index, log, trial.target, params, plan.geometry)
            timelines[trial.index] = scoring.score_timeline(
                log, trial.target, params, plan.geometry)
        except CogmapError as exc:
            _data_error(f"trial {trial.index}: {exc}")
    return stored, reports, timelines


@main.command("score")
@click.option("--session", "session_path", type=click.Path(), required=True,
              help="Session log (.session.jsonl).")
@click.option("--plan", "plan_path", type=click.Path(), default=None)
@click.option("--corrections", "corrections_path", type=click.Path(),
              default=None, help="Posthoc corrections JSON list.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
def cmd_score(session_path, plan_path, corrections_path, out_path, fmt):
    """Score a recorded session log and write the per-trial report."""
    plan = _resolve_plan(plan_path)
    stored, reports, timelines = _load_scored_session(
        session_path, plan, corrections_path)
    rows = [storage.report_to_dict(reports[i]) for i in sorted(reports)]
    timeline_rows = {
        str(i): [[t, s] for t, s in timelines[i].samples]
        for i in sorted(timelines)
    }
    if fmt == "json":
        Path(out_path).write_text(json.dumps(
            {"session": stored.session_id, "trials": rows,
             "timelines": timeline_rows}, indent=2) + "\n")
    else:
        storage._write_csv(out_path, rows,
                           ["trial"] + list(storage.METRIC_COLUMNS))
    for row in rows:
        click.echo(f"trial {row['trial']}: similarity={row['similarity']:.4f} "
                   f"totalTime={row['totalTime_s']:.1f}s")
    click.echo(f"wrote {out_path}")


@main.command("simulate")
@click.option("--profiles", "profiles_path", type=click.Path(), required=True,
              help='JSON: {"groups":[{"name":..., "agent":{...}}]}.')
@click.option("--plan", "plan_path", type=click.Path(), default=None)
@click.option("--participants", default=10, show_default=True,
              help="Participants per group.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
def cmd_simulate(profiles_path, plan_path, participants, seed, out_dir, fmt):
    """Generate synthetic sessions per agent group and aggregate them."""
    plan = _resolve_plan(plan_path)
    try:
        profiles = json.loads(Path(profiles_path).read_text())
        groups = profiles["groups"]
    except (OSError, ValueError, KeyError) as exc:
        _data_error(f"cannot load profiles: {exc}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stored_sessions = []
    try:
        for g_idx, group_spec in enumerate(groups):
            group = group_spec["name"]
            base_agent = simulate.agent_profile_from_dict(group_spec["agent"])
            for p_idx in range(participants):
                # deterministic per-participant seed derivation
                agent_seed = (seed * 1_000_003 + g_idx * 10_007 + p_idx) \
                    & 0x7FFFFFFF
                agent = simulate.AgentProfile(
                    recall_capacity=base_agent.recall_capacity,
                    position_noise_sigma_cm=base_agent.position_noise_sigma_cm,
                    orientation_error_rate=base_agent.orientation_error_rate,
                    mean_inter_action_s=base_agent.mean_inter_action_s,
                    rng_seed=agent_seed,
                )
                pid = f"{group}-{p_idx:03d}"
                session = simulate.generate_session(
                    plan, agent, pid, group,
                    session_id=f"sim-{group}-{p_idx:03d}")
                path = out_dir / f"{pid}{storage.SESSION_SUFFIX}"
                storage.write_log(path, session)
                stored_sessions.append(storage.read_log(path))
    except CogmapError as exc:
        _data_error(f"generation failed: {exc}")
    report_path = out_dir / ("report.json" if fmt == "json" else "report.csv")
    report = storage.export_report(stored_sessions, plan, report_path, fmt)
    for row in report["groups"]:
        sim = row["similarity_mean"]
        click.echo(f"group {row['group']} n={row['num_buildings']}: "
                   f"mean similarity {sim:.4f}" if sim is not None else
                   f"group {row['group']} n={row['num_buildings']}: no data")
    click.echo(f"wrote {report_path}")


@main.command("replay")
@click.option("--session", "session_path", type=click.Path(), required=True)
@click.option("--plan", "plan_path", type=click.Path(), default=None)
@click.option("--trial", "trial_index", type=int, required=True)
@click.option("--at-event", "at_event", type=int, default=None,
              help="Stop after the k-th applied event (default: final).")
def cmd_replay(session_path, plan_path, trial_index, at_event):
    """Print the board state and all metrics after event k of a trial."""
    plan = _resolve_plan(plan_path)
    try:
        stored = storage.read_log(session_path)
    except PartialReadError as exc:
        _data_error(f"truncated log: last good line {exc.last_good_line}")
    trials = {t.index: t for t in plan.trials}
    if trial_index not in trials or trial_index not in stored.trial_logs:
        _data_error(f"no trial {trial_index} in session")
    trial = trials[trial_index]
    log = stored.trial_logs[trial_index]
    applied = log.applied_events()
    k = len(applied) if at_event is None else at_event
    if not (0 <= k <= len(applied)):
        _data_error(f"event index {k} out of range 0..{len(applied)}")
    config = MapConfiguration()
    try:
        for event in applied[:k]:
            config = apply_event(config, event, plan.geometry)
    except CogmapError as exc:
        _data_error(str(exc))
    params = plan.params()
    click.echo(f"trial {trial_index} after event {k}/{len(applied)} "
               f"(state hash {configuration_hash(config)}):")
    for p in config.placements:
        click.echo(f"  {p.building} @ ({p.col},{p.row}) {p.orientation}deg")
    click.echo(f"  number        {scoring.number(trial.target, config):+.6f}")
    click.echo(f"  difference    {scoring.difference(trial.target, config):.6f}")
    click.echo(f"  distance      {scoring.distance(trial.target, config, params, plan.geometry):.6f}")
    click.echo(f"  orient        {scoring.orient(trial.target, config, params, plan.geometry):.6f}")
    click.echo(f"  interbuilding {scoring.interbuilding(trial.target, config, params, plan.geometry):.6f}")
    click.echo(f"  similarity    {scoring.similarity(trial.target, config, params, plan.geometry):.6f}")


if __name__ == "__main__":
    main()
