"""The full metric suite: set, positional, composite, and temporal measures.

All scores compare a target map M against a participant map C. Set metrics
treat the maps as sets of building ids; positional metrics sum over the ids
present in both maps and are normalized by the board diagonal (d_max) and
the largest target-map size in the assessment (m_max). When the
intersection is empty the positional sums are empty and those three metrics
are 1 by the literal formulas; the composite similarity is still driven low
by its difference factor. This quirk is deliberate and documented, not
corrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .board import (
    BoardGeometry,
    MapConfiguration,
    TrialLog,
    apply_event,
    default_geometry,
    diagonal,
    slot_to_physical,
)
from .errors import MalformedLogError, UndefinedMetricError


@dataclass(frozen=True)
class MetricParams:
    """Fixed normalizers for one whole assessment."""

    d_max: float
    m_max: int = 8

    def __post_init__(self):
        if self.d_max <= 0:
            raise ValueError("d_max must be positive")
        if self.m_max < 1:
            raise ValueError("m_max must be at least 1")


def default_params(geometry: BoardGeometry = None, m_max: int = 8) -> MetricParams:
    return MetricParams(d_max=diagonal(geometry or default_geometry()), m_max=m_max)


@dataclass(frozen=True)
class ScoreReport:
    trial: int
    number: Optional[float]
    difference: float
    distance: float
    orient: float
    interbuilding: float
    similarity: float
    total_time_s: float
    d_sim_per_s: Optional[float]


@dataclass(frozen=True)
class Timeline:
    """Similarity after each applied board event, in trial time (seconds)."""

    samples: Tuple[Tuple[float, float], ...] = ()


# ---------------------------------------------------------------------------
# positional resolution

def resolve_points(config: MapConfiguration, geometry: BoardGeometry):
    """Map each placed building to (x_cm, y_cm, orientation_deg)."""
    return {
        p.building: (*slot_to_physical(geometry, p.col, p.row), p.orientation)
        for p in config.placements
    }


def odiff(a: float, b: float) -> float:
    """Angular difference in degrees, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def _dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


# ---------------------------------------------------------------------------
# set metrics

def number(M: MapConfiguration, C: MapConfiguration) -> float:
    """1 - abs(|M|-|C|)/|M|; not clamped, may be negative when |C| > 2|M|."""
    if len(M) == 0:
        raise UndefinedMetricError("number undefined for empty target map")
    return 1.0 - abs(len(M) - len(C)) / len(M)


def difference(M: MapConfiguration, C: MapConfiguration) -> float:
    """1 - (|M-C| + |C-M|) / (|M| + |C|) over building-id sets."""
    m_ids, c_ids = M.ids(), C.ids()
    total = len(m_ids) + len(c_ids)
    if total == 0:
        raise UndefinedMetricError("difference undefined when both maps are empty")
    return 1.0 - (len(m_ids - c_ids) + len(c_ids - m_ids)) / total


# ---------------------------------------------------------------------------
# positional metrics (sums over M ∩ C)

def distance(M: MapConfiguration, C: MapConfiguration, params: MetricParams,
             geometry: BoardGeometry = None) -> float:
    geometry = geometry or default_geometry()
    return distance_from_points(resolve_points(M, geometry),
                                resolve_points(C, geometry), params)


def distance_from_points(m_pts: Dict, c_pts: Dict, params: MetricParams) -> float:
    shared = sorted(set(m_pts) & set(c_pts))
    total = sum(_dist(m_pts[b], c_pts[b]) / params.d_max for b in shared)
    return 1.0 - total / params.m_max


def orient(M: MapConfiguration, C: MapConfiguration, params: MetricParams,
           geometry: BoardGeometry = None) -> float:
    geometry = geometry or default_geometry()
    return orient_from_points(resolve_points(M, geometry),
                              resolve_points(C, geometry), params)


def orient_from_points(m_pts: Dict, c_pts: Dict, params: MetricParams) -> float:
    shared = sorted(set(m_pts) & set(c_pts))
    total = sum(odiff(m_pts[b][2], c_pts[b][2]) / 180.0 for b in shared)
    return 1.0 - total / params.m_max


def interbuilding(M: MapConfiguration, C: MapConfiguration, params: MetricParams,
                  geometry: BoardGeometry = None) -> float:
    geometry = geometry or default_geometry()
    return interbuilding_from_points(resolve_points(M, geometry),
                                     resolve_points(C, geometry), params)


def interbuilding_from_points(m_pts: Dict, c_pts: Dict, params: MetricParams) -> float:
    """Compare the two pairwise-distance matrices over M ∩ C.

    The double sum includes the zero diagonal and both (i,j) and (j,i),
    matching the printed matrix formulation exactly.
    """
    shared = sorted(set(m_pts) & set(c_pts))
    total = 0.0
    for i in shared:
        for j in shared:
            d_m = _dist(m_pts[i], m_pts[j])
            d_c = _dist(c_pts[i], c_pts[j])
            total += abs(d_m - d_c) / params.d_max
    return 1.0 - total / (params.m_max ** 2)


def similarity(M: MapConfiguration, C: MapConfiguration, params: MetricParams,
               geometry: BoardGeometry = None) -> float:
    """difference x distance x orient; interbuilding and number are not factors."""
    geometry = geometry or default_geometry()
    return (difference(M, C)
            * distance(M, C, params, geometry)
            * orient(M, C, params, geometry))


# ---------------------------------------------------------------------------
# temporal measures

def total_time(log: TrialLog) -> float:
    """Seconds from construction-phase start to the participant's done signal."""
    if not log.started:
        raise MalformedLogError("log has no construction-phase start marker")
    if log.done_ms is None:
        raise MalformedLogError("log has no done marker")
    return log.done_ms / 1000.0


def score_timeline(log: TrialLog, M: MapConfiguration, params: MetricParams,
                   geometry: BoardGeometry = None) -> Timeline:
    """Replay the log, emitting (t_s, similarity) after each applied event."""
    geometry = geometry or default_geometry()
    config = MapConfiguration()
    samples: List[Tuple[float, float]] = []
    for event in log.applied_events():
        config = apply_event(config, event, geometry)
        samples.append((event.t_ms / 1000.0, similarity(M, config, params, geometry)))
    return Timeline(tuple(samples))


def d_sim(timeline: Timeline) -> Optional[float]:
    """Mean of local slopes of the similarity-vs-time series.

    Consecutive samples with identical timestamps are merged (last state
    wins) before slopes are taken; None when fewer than two distinct
    instants remain.
    """
    merged: List[Tuple[float, float]] = []
    for t, s in timeline.samples:
        if merged and merged[-1][0] == t:
            merged[-1] = (t, s)
        else:
            merged.append((t, s))
    if len(merged) < 2:
        return None
    slopes = [
        (merged[k + 1][1] - merged[k][1]) / (merged[k + 1][0] - merged[k][0])
        for k in range(len(merged) - 1)
    ]
    return sum(slopes) / len(slopes)


def score_trial(trial_index: int, log: TrialLog, M: MapConfiguration,
                params: MetricParams, geometry: BoardGeometry = None) -> ScoreReport:
    """Score one closed trial: final-state metrics plus temporal measures."""
    geometry = geometry or default_geometry()
    timeline = score_timeline(log, M, params, geometry)
    C = MapConfiguration()
    for event in log.applied_events():
        C = apply_event(C, event, geometry)
    return ScoreReport(
        trial=trial_index,
        number=number(M, C) if len(M) else None,
        difference=difference(M, C),
        distance=distance(M, C, params, geometry),
        orient=orient(M, C, params, geometry),
        interbuilding=interbuilding(M, C, params, geometry),
        similarity=similarity(M, C, params, geometry),
        total_time_s=total_time(log),
        d_sim_per_s=d_sim(timeline),
    )
