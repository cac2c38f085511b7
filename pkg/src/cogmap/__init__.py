"""Cognitive-map assessment engine.

A trial-based assessment: participants view a virtual neighborhood, then
reconstruct it on a slotted board. The engine records every placement
event and scores the reconstruction against the target map with a suite
of set, positional, composite, and temporal metrics.
"""

from .board import (
    BUILDING_IDS,
    DEFAULT_BUILDINGS,
    BoardEvent,
    BoardGeometry,
    BuildingModel,
    MapConfiguration,
    Placement,
    TrialLog,
    apply_event,
    configuration_hash,
    default_geometry,
    diagonal,
    replay,
    slot_to_physical,
    validate_configuration,
)
from .scoring import (
    MetricParams,
    ScoreReport,
    Timeline,
    d_sim,
    default_params,
    difference,
    distance,
    interbuilding,
    number,
    orient,
    score_timeline,
    score_trial,
    similarity,
    total_time,
)
from .session import (
    AssessmentPlan,
    Correction,
    Participant,
    Session,
    TrialDefinition,
    Waypoint,
    apply_posthoc_corrections,
    create_session,
    default_assessment_plan,
)
from .simulate import (
    AgentProfile,
    FaultProfile,
    inject_faults,
    reconcile,
    synth_participant,
)

__version__ = "0.1.0"
