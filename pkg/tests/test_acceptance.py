"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see per-criterion
pass/fail lines and runtimes.
"""

import itertools
import json
import math
import random
import time

import pytest
from click.testing import CliRunner
from starlette.testclient import TestClient

from cogmap import (
    AgentProfile,
    FaultProfile,
    MapConfiguration,
    MetricParams,
    Timeline,
    apply_event,
    apply_posthoc_corrections,
    d_sim,
    default_assessment_plan,
    default_geometry,
    default_params,
    difference,
    distance,
    inject_faults,
    interbuilding,
    number,
    orient,
    reconcile,
    replay,
    score_timeline,
    similarity,
    storage,
)
from cogmap.board import BoardGeometry
from cogmap.cli import main as cli_main
from cogmap.scoring import (
    distance_from_points,
    interbuilding_from_points,
    orient_from_points,
)
from cogmap.service import create_app
from cogmap.simulate import generate_session, synth_participant
from conftest import random_config
from oracle import (
    difference_oracle,
    distance_oracle,
    interbuilding_oracle,
    number_oracle,
    orient_oracle,
)
from test_simulate import make_clean_log
from ws_helpers import StepClock, run_full_session


def _report(name, started):
    print(f"PASS: {name} ({time.time() - started:.1f}s)")


def test_metric_identity_suite():
    """1,000 random targets: every metric is exactly 1.0 when C = M."""
    started = time.time()
    g = default_geometry()
    params = default_params(g)
    rng = random.Random(20021123)
    for _ in range(1000):
        M = random_config(rng, g, rng.randint(1, 8))
        assert number(M, M) == 1.0
        assert difference(M, M) == 1.0
        assert distance(M, M, params, g) == 1.0
        assert orient(M, M, params, g) == 1.0
        assert interbuilding(M, M, params, g) == 1.0
        assert similarity(M, M, params, g) == 1.0
    assert time.time() - started < 5.0
    _report("metric identity suite (1000 random maps, all six == 1.0)", started)


def test_metric_oracle_equivalence():
    """Exhaustive C over a 4x4 grid, <=3 buildings, 4 orientations."""
    started = time.time()
    g = BoardGeometry(columns=4, rows=4, width=40, height=40,
                      street_mask=frozenset())
    params = MetricParams(d_max=math.hypot(40, 40), m_max=3)
    ids = ("B01", "B02", "B03")
    slot_points = [((c + 0.5) * 10.0, (r + 0.5) * 10.0)
                   for c in range(4) for r in range(4)]
    orientations = (0, 90, 180, 270)
    targets = [
        {"B01": (5.0, 5.0, 0)},
        {"B01": (5.0, 5.0, 90), "B02": (25.0, 35.0, 180)},
        {"B01": (5.0, 5.0, 0), "B02": (25.0, 35.0, 90),
         "B03": (35.0, 15.0, 270)},
    ]
    max_dev = 0.0
    n_pairs = 0
    for k in range(0, 4):
        for subset in itertools.combinations(ids, k):
            for slots in itertools.permutations(slot_points, k):
                for orients in itertools.product(orientations, repeat=k):
                    c_pts = {b: (x, y, o) for b, (x, y), o
                             in zip(subset, slots, orients)}
                    for m_pts in targets:
                        checks = (
                            (distance_from_points(m_pts, c_pts, params),
                             distance_oracle(m_pts, c_pts, params.d_max,
                                             params.m_max)),
                            (orient_from_points(m_pts, c_pts, params),
                             orient_oracle(m_pts, c_pts, params.m_max)),
                            (interbuilding_from_points(m_pts, c_pts, params),
                             interbuilding_oracle(m_pts, c_pts, params.d_max,
                                                  params.m_max)),
                            (1 - abs(len(m_pts) - len(c_pts)) / len(m_pts),
                             number_oracle(m_pts, c_pts)),
                        )
                        if m_pts or c_pts:
                            only = (len(set(m_pts) - set(c_pts))
                                    + len(set(c_pts) - set(m_pts)))
                            checks += ((1 - only / (len(m_pts) + len(c_pts)),
                                        difference_oracle(m_pts, c_pts)),)
                        for impl, oracle_value in checks:
                            dev = abs(impl - oracle_value) \
                                / max(1.0, abs(oracle_value))
                            max_dev = max(max_dev, dev)
                        n_pairs += 1
    assert n_pairs == 680259
    assert max_dev <= 1e-12, f"max relative deviation {max_dev}"
    assert time.time() - started < 120.0
    _report(f"metric oracle equivalence ({n_pairs} exhaustive pairs, "
            f"max dev {max_dev:.2e})", started)


def test_range_symmetry_and_translation_invariance():
    """10,000 random pairs: range [0,1], symmetry, rigid-motion invariance."""
    started = time.time()
    g = default_geometry()
    params = default_params(g)
    rng = random.Random(42)
    for _ in range(10000):
        M = random_config(rng, g, rng.randint(1, 8))
        C = random_config(rng, g, rng.randint(1, 8))
        d = difference(M, C)
        dist_v = distance(M, C, params, g)
        o = orient(M, C, params, g)
        ib = interbuilding(M, C, params, g)
        s = similarity(M, C, params, g)
        for value in (d, dist_v, o, ib, s):
            assert 0.0 <= value <= 1.0
        assert abs(d - difference(C, M)) <= 1e-9
        assert abs(dist_v - distance(C, M, params, g)) <= 1e-9
        assert abs(o - orient(C, M, params, g)) <= 1e-9
        assert abs(ib - interbuilding(C, M, params, g)) <= 1e-9
    # interbuilding invariance under rigid translation of matched placements
    from cogmap.scoring import resolve_points

    for _ in range(500):
        M = random_config(rng, g, rng.randint(2, 8))
        m_pts = resolve_points(M, g)
        dx, dy = rng.uniform(-30, 30), rng.uniform(-30, 30)
        c_pts = {b: (x + dx, y + dy, o) for b, (x, y, o) in m_pts.items()}
        assert abs(interbuilding_from_points(m_pts, c_pts, params) - 1.0) \
            <= 1e-9
    _report("range, symmetry, and translation invariance (10,000 pairs)",
            started)


def test_timeline_consistency():
    """200 synthetic logs: incremental samples == from-scratch recompute."""
    started = time.time()
    plan = default_assessment_plan()
    params = plan.params()
    g = plan.geometry
    recorded = plan.recorded_trials()
    for seed in range(200):
        trial = recorded[seed % len(recorded)]
        agent = AgentProfile(recall_capacity=seed % 9,
                             position_noise_sigma_cm=float(seed % 4) * 5.0,
                             orientation_error_rate=0.2, rng_seed=seed)
        log = synth_participant(agent, trial, g)
        timeline = score_timeline(log, trial.target, params, g)
        applied = log.applied_events()
        assert len(timeline.samples) == len(applied)
        for k, (t, s) in enumerate(timeline.samples):
            config = MapConfiguration()
            for event in applied[: k + 1]:
                config = apply_event(config, event, g)
            assert s == similarity(trial.target, config, params, g)
            assert t == applied[k].t_ms / 1000.0
    # final-event metrics equal cmd_score output exactly
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        plan_path = storage.write_default_plan_files(tmp / "plans")
        session = generate_session(
            plan, AgentProfile(position_noise_sigma_cm=7.0,
                               orientation_error_rate=0.2, rng_seed=17),
            "p1", "young", "acc-timeline")
        log_path = tmp / "s.session.jsonl"
        storage.write_log(log_path, session)
        out = tmp / "r.json"
        result = CliRunner().invoke(cli_main, [
            "score", "--session", str(log_path), "--plan", str(plan_path),
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        for row in report["trials"]:
            trial = plan.trials[row["trial"]]
            config = replay(session.logs[trial.index], g)
            assert row["similarity"] == similarity(trial.target, config,
                                                   params, g)
            assert row["number"] == number(trial.target, config)
            assert row["difference"] == difference(trial.target, config)
            assert row["distance"] == distance(trial.target, config, params, g)
            assert row["orient"] == orient(trial.target, config, params, g)
            assert row["interbuilding"] == interbuilding(trial.target, config,
                                                         params, g)
    _report("timeline consistency (200 logs incremental == from-scratch; "
            "cmd_score agreement)", started)


def test_d_sim_checks():
    """Hand case 0.04/s, constant series 0, single sample null."""
    started = time.time()
    value = d_sim(Timeline(((0, 0.0), (10, 0.5), (20, 0.8))))
    # 0.04 up to one ulp of float evaluation of the exact slopes
    assert abs(value - 0.04) <= 1e-15
    assert d_sim(Timeline(((0, 0.7), (4, 0.7), (11, 0.7)))) == 0.0
    assert d_sim(Timeline(((3, 0.4),))) is None
    _report("dSim hand case / constant / single-sample", started)


def test_fault_statistics_and_reconcile_round_trip():
    """Default rates within binomial bounds; 100/100 seeds round-trip."""
    started = time.time()
    log = make_clean_log(10000, seed=1)
    noisy, truth = inject_faults(log, FaultProfile(rng_seed=424242))
    unknown = sum(1 for e in noisy.events if e.building is None)
    misid = len(truth) - unknown
    assert abs(unknown / 10000 - 0.18) <= 0.01
    assert abs(misid / 10000 - 0.02) <= 0.005
    g = default_geometry()
    for seed in range(100):
        clean = make_clean_log(60, seed=seed)
        corrupted, truth_map = inject_faults(clean, FaultProfile(rng_seed=seed))
        restored = apply_posthoc_corrections(
            corrupted, reconcile(corrupted, truth_map))
        assert replay(restored, g) == replay(clean, g)
    _report(f"fault statistics (unid {unknown/10000:.3f}, "
            f"misid {misid/10000:.3f}) + reconcile round-trip 100/100",
            started)


def test_synthetic_group_contrast():
    """10 low-noise vs 10 high-noise agents over trials with 2..8 buildings."""
    started = time.time()
    plan = default_assessment_plan()
    sessions = []
    specs = (
        ("low_noise", AgentProfile(position_noise_sigma_cm=0.0,
                                   mean_inter_action_s=6.0)),
        ("high_noise", AgentProfile(position_noise_sigma_cm=18.0,
                                    recall_capacity=6,
                                    orientation_error_rate=0.3,
                                    mean_inter_action_s=14.0)),
    )
    for group, base in specs:
        for i in range(10):
            agent = AgentProfile(
                recall_capacity=base.recall_capacity,
                position_noise_sigma_cm=base.position_noise_sigma_cm,
                orientation_error_rate=base.orientation_error_rate,
                mean_inter_action_s=base.mean_inter_action_s,
                rng_seed=1000 + i,
            )
            session = generate_session(plan, agent, f"{group}-{i}", group,
                                       f"acc-{group}-{i}")
            sessions.append(storage.StoredSession(
                records=storage.serialize_session(session),
                session_id=session.session_id,
                participant=session.participant,
                trial_logs=dict(session.logs),
                reports=dict(session.reports),
            ))
    report = storage.build_report(sessions, plan)
    by_key = {(r["group"], r["num_buildings"]): r for r in report["groups"]}
    for n in range(2, 9):
        assert by_key[("high_noise", n)]["similarity_mean"] \
            <= by_key[("low_noise", n)]["similarity_mean"]
        # slower pacing parameter must show up as longer mean totalTime
        assert by_key[("high_noise", n)]["totalTime_s_mean"] \
            >= by_key[("low_noise", n)]["totalTime_s_mean"]
    assert time.time() - started < 30.0
    _report("synthetic group contrast (high-noise <= low-noise on all 7 "
            "trials; totalTime ordering)", started)


def test_end_to_end_scripted_session(tmp_path):
    """Protocol client completes 3 practice + 7 recorded trials."""
    started = time.time()
    plan = default_assessment_plan()
    app = create_app(plan, tmp_path / "logs", clock=StepClock())
    with TestClient(app) as client:
        run_full_session(client, plan, "acceptance")
    log_path = tmp_path / "logs" / "acceptance.session.jsonl"
    # byte-identical storage round-trip
    stored = storage.read_log(log_path)
    rewritten = tmp_path / "rewritten.session.jsonl"
    storage.write_log(rewritten, stored)
    assert rewritten.read_bytes() == log_path.read_bytes()
    # scores without manual intervention
    assert stored.status == "complete"
    assert sorted(stored.reports) == [3, 4, 5, 6, 7, 8, 9]
    plan_path = storage.write_default_plan_files(tmp_path / "plans")
    out = tmp_path / "r.json"
    result = CliRunner().invoke(cli_main, [
        "score", "--session", str(log_path), "--plan", str(plan_path),
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert all(t["similarity"] == 1.0 for t in report["trials"])
    _report("end-to-end scripted session (10 trials, byte-identical "
            "round-trip, scored)", started)
