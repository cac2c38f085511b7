"""Trial-protocol state machine.

A session walks an ordered list of trials. Each trial advances through
viewing -> construction -> done and never backward. The engine clock is
authoritative for event timestamps; client timestamps are advisory and
replaced at ingestion. Practice trials exercise the full protocol but are
never scored.
"""

from __future__ import annotations

import itertools
import random
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

from . import scoring
from .board import (
    PLACE,
    BUILDING_IDS,
    BoardEvent,
    BoardGeometry,
    MapConfiguration,
    Placement,
    TrialLog,
    apply_event,
    default_geometry,
    replay,
    validate_configuration,
)
from .errors import (
    ClockError,
    ConflictError,
    CorrectionReferenceError,
    PendingCorrectionError,
    PhaseError,
    PlanError,
    ReplayError,
)

# trial kinds
PRACTICE_INTRO = "practice_intro"
PRACTICE_CHANGE = "practice_change"
PRACTICE_FULL = "practice_full"
RECORDED = "recorded"
TRIAL_KINDS = (PRACTICE_INTRO, PRACTICE_CHANGE, PRACTICE_FULL, RECORDED)

# phases
VIEWING_PENDING = "viewing_pending"
VIEWING = "viewing"
VIEWED = "viewed"
CONSTRUCTION = "construction"
DONE = "done"

PANORAMA_RATE_DEG_PER_S = 20.0


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class TrialDefinition:
    index: int
    kind: str
    target: MapConfiguration
    tour: Tuple[Waypoint, ...]
    num_buildings: int

    def __post_init__(self):
        if self.kind not in TRIAL_KINDS:
            raise PlanError(f"unknown trial kind {self.kind!r}")


@dataclass(frozen=True)
class AssessmentPlan:
    name: str
    trials: Tuple[TrialDefinition, ...]
    geometry: BoardGeometry = field(default_factory=default_geometry)
    m_max: Optional[int] = None

    def params(self) -> scoring.MetricParams:
        m_max = self.m_max
        if m_max is None:
            recorded = [t for t in self.trials if t.kind == RECORDED]
            m_max = max((len(t.target) for t in recorded), default=1)
        return scoring.default_params(self.geometry, m_max=m_max)

    def recorded_trials(self):
        return [t for t in self.trials if t.kind == RECORDED]


@dataclass(frozen=True)
class Participant:
    participant_id: str
    group: str  # age-group tag, e.g. "young" / "elderly"


@dataclass(frozen=True)
class Correction:
    event_id: str
    resolved_building: str
    source: str = "interactive"  # interactive | posthoc


@dataclass(frozen=True)
class TourDescriptor:
    waypoints: Tuple[Waypoint, ...]
    north_heading: float


@dataclass(frozen=True)
class PanoramaDescriptor:
    """A paused tour sweeps the camera through a full turn, then resumes."""

    waypoint_index: int
    sweep_degrees: float = 360.0
    rate_deg_per_s: float = PANORAMA_RATE_DEG_PER_S


@dataclass(frozen=True)
class EventOutcome:
    event: BoardEvent
    status: str  # accepted | flagged | rejected
    error_code: Optional[str] = None


def _monotonic_ms() -> float:
    return time.monotonic() * 1000.0


class Session:
    """One participant's pass through an assessment plan.

    All mutating operations on a session must be serialized by the caller
    (one writer per session); reads may happen at any time.
    """

    def __init__(self, participant: Participant, plan: AssessmentPlan,
                 session_id: Optional[str] = None,
                 clock: Optional[Callable[[], float]] = None,
                 north_heading: float = 0.0):
        self.session_id = session_id or uuid.uuid4().hex
        self.participant = participant
        self.plan = plan
        self.north_heading = north_heading
        self._clock = clock or _monotonic_ms
        self.trial_index = 0
        self.phase = VIEWING_PENDING
        self.complete = False
        self.aborted = False
        self.logs: Dict[int, TrialLog] = {}
        self.reports: Dict[int, scoring.ScoreReport] = {}
        self.corrections: List[Tuple[int, Correction]] = []
        self._events: List[BoardEvent] = []
        self._pending: set = set()
        self._t0: Optional[float] = None
        self._last_t: int = 0
        self._tour_position = 0
        self._tour_paused = False
        self._event_counter = itertools.count()

    # ------------------------------------------------------------------
    @property
    def current_trial(self) -> TrialDefinition:
        return self.plan.trials[self.trial_index]

    def current_log(self) -> TrialLog:
        if self.trial_index in self.logs:
            return self.logs[self.trial_index]
        return TrialLog(tuple(self._events),
                        started=self.phase in (CONSTRUCTION, DONE))

    def current_configuration(self) -> MapConfiguration:
        resolved = TrialLog(tuple(
            e for e in self._events if not e.rejected and e.building is not None
        ))
        return replay(resolved, self.plan.geometry)

    def pending_event_ids(self):
        return sorted(self._pending)

    # ------------------------------------------------------------------
    # viewing phase

    def begin_viewing(self) -> TourDescriptor:
        if self.complete:
            raise PhaseError("session is complete")
        if self.phase != VIEWING_PENDING:
            raise PhaseError(f"begin_viewing not allowed in phase {self.phase}")
        self.phase = VIEWING
        self._tour_position = 0
        self._tour_paused = False
        return TourDescriptor(self.current_trial.tour, self.north_heading)

    def pause_tour(self, waypoint_index: Optional[int] = None) -> PanoramaDescriptor:
        if self.phase != VIEWING:
            raise PhaseError(f"pause_tour not allowed in phase {self.phase}")
        if waypoint_index is not None:
            self._tour_position = waypoint_index
        self._tour_paused = True
        return PanoramaDescriptor(self._tour_position)

    def resume_tour(self) -> int:
        """Resume from the waypoint at which the tour paused."""
        if self.phase != VIEWING or not self._tour_paused:
            raise PhaseError("no paused tour to resume")
        self._tour_paused = False
        return self._tour_position

    def complete_tour(self) -> None:
        if self.phase != VIEWING:
            raise PhaseError(f"complete_tour not allowed in phase {self.phase}")
        self.phase = VIEWED

    # ------------------------------------------------------------------
    # construction phase

    def begin_construction(self) -> None:
        if self.phase != VIEWED:
            raise PhaseError(f"begin_construction not allowed in phase {self.phase}")
        self.phase = CONSTRUCTION
        self._t0 = self._clock()
        self._last_t = 0
        self._events = []
        self._pending = set()

    def record_event(self, action: str, building: Optional[str], col: int, row: int,
                     orientation: Optional[int] = None,
                     client_t_ms: Optional[int] = None) -> EventOutcome:
        """Ingest one board action; the engine clock stamps it.

        Identified events are validated against the running configuration;
        invalid ones stay in the log with a rejected flag. Unknown-building
        events are flagged for interactive correction.
        """
        if self.phase != CONSTRUCTION:
            raise PhaseError(f"board events not accepted in phase {self.phase}")
        t = int(round(self._clock() - self._t0))
        if t < self._last_t:
            raise ClockError(f"timestamp {t} before previous event {self._last_t}")
        self._last_t = t
        event_id = f"{self.session_id[:8]}-{self.trial_index}-{next(self._event_counter)}"
        event = BoardEvent(
            event_id=event_id, t_ms=t, action=action, building=building,
            col=col, row=row,
            orientation=orientation if action == PLACE else None,
        )
        if building is None:
            self._events.append(event)
            self._pending.add(event_id)
            return EventOutcome(event, "flagged")
        # validate by tentatively applying to the running configuration
        try:
            apply_event(self.current_configuration(), event, self.plan.geometry)
        except Exception as exc:
            code = type(exc).__name__
            event = replace(event, rejected=True)
            self._events.append(event)
            return EventOutcome(event, "rejected", error_code=code)
        self._events.append(event)
        return EventOutcome(event, "accepted")

    def resolve_unidentified(self, correction: Correction) -> None:
        """Assessor fills in a flagged event's building identity."""
        if correction.event_id not in {e.event_id for e in self._events}:
            raise CorrectionReferenceError(f"no event {correction.event_id}")
        if correction.event_id not in self._pending:
            raise CorrectionReferenceError(
                f"event {correction.event_id} is not flagged"
            )
        updated = [
            replace(e, building=correction.resolved_building)
            if e.event_id == correction.event_id else e
            for e in self._events
        ]
        # re-check replay validity over resolved events before committing
        check = TrialLog(tuple(
            e for e in updated if not e.rejected and e.building is not None
        ))
        try:
            replay(check, self.plan.geometry)
        except ReplayError as exc:
            raise ConflictError(str(exc)) from exc
        self._events = updated
        self._pending.discard(correction.event_id)
        self.corrections.append((self.trial_index, correction))

    def participant_done(self) -> Optional[scoring.ScoreReport]:
        """Close the trial, score it (recorded trials only), and advance."""
        if self.phase != CONSTRUCTION:
            raise PhaseError(f"done not allowed in phase {self.phase}")
        if self._pending:
            raise PendingCorrectionError(
                f"unresolved flagged events: {sorted(self._pending)}"
            )
        done_ms = int(round(self._clock() - self._t0))
        log = TrialLog(tuple(self._events), started=True, done_ms=done_ms)
        trial = self.current_trial
        self.logs[trial.index] = log
        report = None
        if trial.kind == RECORDED:
            report = scoring.score_trial(
                trial.index, log, trial.target, self.plan.params(),
                self.plan.geometry,
            )
            self.reports[trial.index] = report
        self.phase = DONE
        if self.trial_index + 1 < len(self.plan.trials):
            self.trial_index += 1
            self.phase = VIEWING_PENDING
            self._events = []
            self._pending = set()
        else:
            self.complete = True
        return report

    def abort(self) -> None:
        self.aborted = True
        self.complete = True


def create_session(participant: Participant, plan: AssessmentPlan,
                   session_id: Optional[str] = None,
                   clock: Optional[Callable[[], float]] = None) -> Session:
    """Validate the plan and open a session at trial 0, viewing pending."""
    if not plan.trials:
        raise PlanError("assessment plan has no trials")
    indices = [t.index for t in plan.trials]
    if len(set(indices)) != len(indices):
        raise PlanError("duplicate trial indices in plan")
    if indices != sorted(indices):
        raise PlanError("trial indices out of order")
    params = plan.params()
    for trial in plan.trials:
        violations = validate_configuration(trial.target, plan.geometry)
        if violations:
            raise PlanError(
                f"trial {trial.index} target invalid: "
                + "; ".join(str(v) for v in violations)
            )
        if trial.kind == RECORDED and len(trial.target) > params.m_max:
            raise PlanError(
                f"trial {trial.index} has {len(trial.target)} buildings, "
                f"exceeding m_max={params.m_max}"
            )
    return Session(participant, plan, session_id=session_id, clock=clock)


def apply_posthoc_corrections(log: TrialLog, corrections) -> TrialLog:
    """Return a new log with substituted building ids; the original is untouched.

    Raises CorrectionReferenceError for unknown event ids and ReplayError
    when a correction leaves the log unreplayable.
    """
    events = list(log.events)
    by_id = {e.event_id: i for i, e in enumerate(events)}
    for c in corrections:
        if c.event_id not in by_id:
            raise CorrectionReferenceError(f"no event {c.event_id}")
        i = by_id[c.event_id]
        events[i] = replace(events[i], building=c.resolved_building)
    corrected = replace(log, events=tuple(events))
    replay(corrected)  # raises ReplayError / UnresolvedLogError if invalid
    return corrected


# ---------------------------------------------------------------------------
# default plan: 3 practice trials (two-building neighborhoods) followed by
# 7 recorded trials with 2..8 buildings in increasing order.

def _street_tour(geometry: BoardGeometry, n_waypoints: int = 6) -> Tuple[Waypoint, ...]:
    # drive east along the horizontal street (row 8), facing travel direction
    y = (8 + 0.5) * geometry.height / geometry.rows
    xs = [geometry.width * (i + 0.5) / n_waypoints for i in range(n_waypoints)]
    return tuple(Waypoint(x, y, 90.0) for x in xs)


def _random_layout(rng: random.Random, geometry: BoardGeometry,
                   ids, orientations=True) -> MapConfiguration:
    free = [
        (c, r)
        for c in range(geometry.columns)
        for r in range(geometry.rows)
        if (c, r) not in geometry.street_mask
    ]
    slots = rng.sample(free, len(ids))
    placements = [
        Placement(b, c, r, rng.choice((0, 90, 180, 270)) if orientations else 0)
        for b, (c, r) in zip(ids, slots)
    ]
    return MapConfiguration.of(placements)


def default_assessment_plan(geometry: Optional[BoardGeometry] = None,
                            seed: int = 20021123) -> AssessmentPlan:
    geometry = geometry or default_geometry()
    rng = random.Random(seed)
    tour = _street_tour(geometry)
    trials = []
    for i, kind in enumerate((PRACTICE_INTRO, PRACTICE_CHANGE, PRACTICE_FULL)):
        target = _random_layout(rng, geometry, BUILDING_IDS[:2])
        trials.append(TrialDefinition(i, kind, target, tour, 2))
    for k, n in enumerate(range(2, 9)):
        target = _random_layout(rng, geometry, BUILDING_IDS[:n])
        trials.append(TrialDefinition(3 + k, RECORDED, target, tour, n))
    return AssessmentPlan("default", tuple(trials), geometry, m_max=8)
