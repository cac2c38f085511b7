"""Headless stand-in for the tangible board.

Fault injection reproduces the original hardware's identity-error rates
(18% unidentified, under 2% misidentified); synthetic participant agents
generate plausible trial logs so the whole pipeline can be exercised and
group contrasts replicated at desk scale. All randomness flows through
Python's Mersenne Twister (random.Random) seeded explicitly, so every
operation is bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

from .board import (
    PLACE,
    BUILDING_IDS,
    BoardEvent,
    BoardGeometry,
    TrialLog,
    default_geometry,
    slot_to_physical,
)
from .errors import CoverageError, GenerationError
from .session import Correction, TrialDefinition


@dataclass(frozen=True)
class FaultProfile:
    """Per-action identity-corruption rates of the emulated hardware."""

    p_unidentified: float = 0.18
    p_misidentified: float = 0.02
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_unidentified <= 1.0
                and 0.0 <= self.p_misidentified <= 1.0):
            raise ValueError("probabilities must lie in [0,1]")
        if self.p_unidentified + self.p_misidentified > 1.0:
            raise ValueError("p_unidentified + p_misidentified must not exceed 1")


@dataclass(frozen=True)
class AgentProfile:
    """Synthetic participant: recall span, placement noise, and pacing."""

    recall_capacity: int = 8
    position_noise_sigma_cm: float = 0.0
    orientation_error_rate: float = 0.0
    mean_inter_action_s: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.recall_capacity < 0:
            raise ValueError("recall_capacity must be nonnegative")
        if (self.position_noise_sigma_cm < 0 or self.orientation_error_rate < 0
                or self.mean_inter_action_s < 0):
            raise ValueError("agent parameters must be nonnegative")


def inject_faults(log: TrialLog, profile: FaultProfile,
                  building_ids=BUILDING_IDS) -> Tuple[TrialLog, Dict[str, str]]:
    """Corrupt building identities per-event, independently.

    Each event independently becomes unidentified with p_unidentified, or
    misidentified (a uniformly chosen different id) with p_misidentified.
    Timestamps, locations, orientations, and order are never touched.
    Returns the corrupted log and a map from corrupted event_id to true id.
    """
    rng = random.Random(profile.rng_seed)
    truth: Dict[str, str] = {}
    events = []
    for event in log.events:
        u = rng.random()
        if u < profile.p_unidentified:
            truth[event.event_id] = event.building
            events.append(replace(event, building=None))
        elif u < profile.p_unidentified + profile.p_misidentified:
            others = [b for b in building_ids if b != event.building]
            truth[event.event_id] = event.building
            events.append(replace(event, building=rng.choice(others)))
        else:
            events.append(event)
    return replace(log, events=tuple(events)), truth


def reconcile(noisy: TrialLog, truth_map: Dict[str, str]) -> List[Correction]:
    """Corrections that restore a corrupted log to its clean identities."""
    corrections = []
    corrupted = set()
    for event in noisy.events:
        if event.building is None:
            corrupted.add(event.event_id)
            if event.event_id not in truth_map:
                raise CoverageError(
                    f"truth map missing unidentified event {event.event_id}"
                )
            corrections.append(Correction(event.event_id, truth_map[event.event_id],
                                          source="posthoc"))
        elif event.event_id in truth_map \
                and truth_map[event.event_id] != event.building:
            corrections.append(Correction(event.event_id, truth_map[event.event_id],
                                          source="posthoc"))
    return corrections


def _nearest_free_slot(geometry: BoardGeometry, point, occupied) -> Tuple[int, int]:
    """Nearest free non-street slot to a physical point.

    Ties break by lowest column, then lowest row.
    """
    best = None
    best_key = None
    for col in range(geometry.columns):
        for row in range(geometry.rows):
            if (col, row) in geometry.street_mask or (col, row) in occupied:
                continue
            x, y = slot_to_physical(geometry, col, row)
            key = (math.hypot(x - point[0], y - point[1]), col, row)
            if best_key is None or key < best_key:
                best, best_key = (col, row), key
    if best is None:
        raise GenerationError("no free slot left on the board")
    return best


def synth_participant(agent: AgentProfile, trial: TrialDefinition,
                      geometry: BoardGeometry = None) -> TrialLog:
    """Generate a valid construction log for one trial.

    The agent recalls min(recall_capacity, |M|) buildings and places each at
    its true slot displaced by Gaussian noise in cm, rounded to the nearest
    free non-street slot. Orientation is flipped to a random wrong value
    with orientation_error_rate; inter-action times are exponential.

    The random draw sequence per building is fixed, so two agents differing
    only in noise magnitude consume identical draws and remain comparable
    under a shared seed.
    """
    geometry = geometry or default_geometry()
    if len(trial.target) == 0:
        raise GenerationError("trial target is empty")
    rng = random.Random(agent.rng_seed)
    ids = sorted(p.building for p in trial.target.placements)
    k = min(agent.recall_capacity, len(ids))
    recalled = rng.sample(ids, k)
    occupied = set()
    events = []
    t_ms = 0.0
    for n, building in enumerate(recalled):
        dt = rng.expovariate(1.0 / agent.mean_inter_action_s) \
            if agent.mean_inter_action_s > 0 else 0.0
        dx = rng.gauss(0.0, agent.position_noise_sigma_cm)
        dy = rng.gauss(0.0, agent.position_noise_sigma_cm)
        u_orient = rng.random()
        wrong_pick = rng.randrange(3)
        true = trial.target.get(building)
        x, y = slot_to_physical(geometry, true.col, true.row)
        col, row = _nearest_free_slot(geometry, (x + dx, y + dy), occupied)
        occupied.add((col, row))
        orientation = true.orientation
        if u_orient < agent.orientation_error_rate:
            others = [o for o in (0, 90, 180, 270) if o != true.orientation]
            orientation = others[wrong_pick]
        t_ms += dt * 1000.0
        events.append(BoardEvent(
            event_id=f"synth-{trial.index}-{n}",
            t_ms=int(round(t_ms)),
            action=PLACE,
            building=building,
            col=col,
            row=row,
            orientation=orientation,
        ))
    done_dt = rng.expovariate(1.0 / agent.mean_inter_action_s) \
        if agent.mean_inter_action_s > 0 else 0.0
    done_ms = int(round(t_ms + done_dt * 1000.0))
    return TrialLog(tuple(events), started=True, done_ms=done_ms)


def generate_session(plan, agent: AgentProfile, participant_id: str,
                     group: str, session_id: str):
    """Drive one synthetic participant through every trial of a plan.

    Returns a completed Session whose event timestamps come from the
    agent's own pacing (the engine clock is stepped to match).
    """
    from .session import Participant, create_session

    clock_ms = [0.0]
    session = create_session(Participant(participant_id, group), plan,
                             session_id=session_id, clock=lambda: clock_ms[0])
    while not session.complete:
        trial = session.current_trial
        session.begin_viewing()
        session.complete_tour()
        session.begin_construction()
        log = synth_participant(agent, trial, plan.geometry)
        base = clock_ms[0]
        for event in log.events:
            clock_ms[0] = base + event.t_ms
            session.record_event(event.action, event.building, event.col,
                                 event.row, event.orientation)
        clock_ms[0] = base + (log.done_ms or 0)
        session.participant_done()
    return session


def fault_profile_from_dict(data: dict) -> FaultProfile:
    return FaultProfile(
        p_unidentified=data.get("p_unidentified", 0.18),
        p_misidentified=data.get("p_misidentified", 0.02),
        rng_seed=data.get("seed", 0),
    )


def agent_profile_from_dict(data: dict) -> AgentProfile:
    return AgentProfile(
        recall_capacity=data.get("recall_capacity", 8),
        position_noise_sigma_cm=data.get("position_noise_sigma_cm", 0.0),
        orientation_error_rate=data.get("orientation_error_rate", 0.0),
        mean_inter_action_s=data.get("mean_inter_action_s", 10.0),
        rng_seed=data.get("seed", 0),
    )
