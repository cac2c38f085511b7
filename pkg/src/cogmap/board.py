"""Board geometry, building models, placements, configurations, and events.

Everything here is an immutable value; the operations are pure functions.
The board is a single 24x16 placement grid mapped onto a 102cm x 71cm
surface; positions used by the metrics are slot cell centers in physical cm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .errors import (
    AbsentBuildingError,
    DuplicateBuildingError,
    GeometryError,
    OccupancyError,
    ReplayError,
    UnresolvedLogError,
)

ORIENTATIONS = (0, 90, 180, 270)

PLACE = "place"
REMOVE = "remove"


def _default_street_mask() -> frozenset:
    """Street pattern: one four-way and one 'T' intersection.

    A vertical street at column 6 crosses a horizontal street at row 8
    (the four-way); a second vertical street at column 17 runs from the
    horizontal street to the board edge (the 'T'). Street cells are
    permanently blocked for placement.
    """
    cells = set()
    for row in range(16):
        cells.add((6, row))
    for col in range(24):
        cells.add((col, 8))
    for row in range(9, 16):
        cells.add((17, row))
    return frozenset(cells)


DEFAULT_STREET_MASK = _default_street_mask()


@dataclass(frozen=True)
class BoardGeometry:
    columns: int = 24
    rows: int = 16
    width: float = 102.0
    height: float = 71.0
    street_mask: frozenset = DEFAULT_STREET_MASK

    def __post_init__(self):
        if self.columns < 1 or self.rows < 1:
            raise GeometryError("grid must be at least 1x1")
        if self.width <= 0 or self.height <= 0:
            raise GeometryError("board dimensions must be positive")
        for col, row in self.street_mask:
            if not (0 <= col < self.columns and 0 <= row < self.rows):
                raise GeometryError(
                    f"street cell ({col},{row}) outside {self.columns}x{self.rows} grid"
                )

    def in_grid(self, col: int, row: int) -> bool:
        return 0 <= col < self.columns and 0 <= row < self.rows


def default_geometry() -> BoardGeometry:
    return BoardGeometry()


def slot_to_physical(geometry: BoardGeometry, col: int, row: int):
    """Physical cm coordinates of a slot's cell center."""
    if not geometry.in_grid(col, row):
        raise GeometryError(f"slot ({col},{row}) outside grid")
    x = (col + 0.5) * geometry.width / geometry.columns
    y = (row + 0.5) * geometry.height / geometry.rows
    return (x, y)


def diagonal(geometry: BoardGeometry) -> float:
    """Board diagonal length; the distance normalizer for all metrics."""
    return math.hypot(geometry.width, geometry.height)


@dataclass(frozen=True)
class BuildingModel:
    id: str
    label: str
    color: str
    footprint: tuple = (1, 1)


# Ten models; all fit on the board together with the street pattern.
DEFAULT_BUILDINGS = (
    BuildingModel("B01", "Bakery", "red"),
    BuildingModel("B02", "Church", "blue"),
    BuildingModel("B03", "School", "yellow"),
    BuildingModel("B04", "Grocery", "green"),
    BuildingModel("B05", "Post Office", "orange"),
    BuildingModel("B06", "Bank", "purple"),
    BuildingModel("B07", "Cafe", "brown"),
    BuildingModel("B08", "Library", "teal"),
    BuildingModel("B09", "Pharmacy", "pink"),
    BuildingModel("B10", "Fire Hall", "crimson"),
)

BUILDING_IDS = tuple(b.id for b in DEFAULT_BUILDINGS)


@dataclass(frozen=True)
class Placement:
    building: str
    col: int
    row: int
    orientation: int = 0

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise GeometryError(
                f"orientation {self.orientation} not in {ORIENTATIONS}"
            )


@dataclass(frozen=True)
class MapConfiguration:
    """A set of placements; the target map and the participant map.

    The container itself does not enforce invariants so that
    validate_configuration can report violations on arbitrary input;
    apply_event never produces an invalid configuration.
    """

    placements: tuple = ()

    @classmethod
    def of(cls, placements: Iterable[Placement]) -> "MapConfiguration":
        return cls(tuple(sorted(placements, key=lambda p: (p.building, p.col, p.row))))

    def ids(self) -> frozenset:
        return frozenset(p.building for p in self.placements)

    def get(self, building: str) -> Optional[Placement]:
        for p in self.placements:
            if p.building == building:
                return p
        return None

    def __len__(self):
        return len(self.placements)


@dataclass(frozen=True)
class Violation:
    kind: str  # duplicate_id | slot_collision | street_overlap | out_of_grid
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate_configuration(config: MapConfiguration, geometry: BoardGeometry):
    """Return every invariant violation; empty list means ok."""
    violations = []
    seen_ids = set()
    seen_slots = set()
    for p in config.placements:
        if p.building in seen_ids:
            violations.append(Violation("duplicate_id", f"building {p.building} appears twice"))
        seen_ids.add(p.building)
        slot = (p.col, p.row)
        if not geometry.in_grid(p.col, p.row):
            violations.append(Violation("out_of_grid", f"{p.building} at {slot}"))
            continue
        if slot in geometry.street_mask:
            violations.append(Violation("street_overlap", f"{p.building} at {slot}"))
        if slot in seen_slots:
            violations.append(Violation("slot_collision", f"{p.building} at {slot}"))
        seen_slots.add(slot)
    return violations


@dataclass(frozen=True)
class BoardEvent:
    """One place or remove action on the board.

    t_ms is milliseconds since construction-phase start. building is None
    while the action's building identity is unknown. Rejected events stay
    in the log for full-fidelity capture but are skipped during replay.
    """

    event_id: str
    t_ms: int
    action: str  # PLACE | REMOVE
    building: Optional[str]
    col: int
    row: int
    orientation: Optional[int] = None
    rejected: bool = False

    def __post_init__(self):
        if self.action not in (PLACE, REMOVE):
            raise ValueError(f"unknown action {self.action!r}")
        if self.t_ms < 0:
            raise ValueError("t_ms must be nonnegative")
        if self.action == PLACE and self.orientation is not None \
                and self.orientation not in ORIENTATIONS:
            raise GeometryError(f"orientation {self.orientation} not in {ORIENTATIONS}")


def apply_event(config: MapConfiguration, event: BoardEvent,
                geometry: BoardGeometry = None) -> MapConfiguration:
    """Apply one fully identified event to a configuration.

    Raises DuplicateBuildingError, AbsentBuildingError, or OccupancyError
    when the event would violate configuration invariants.
    """
    if geometry is None:
        geometry = default_geometry()
    if event.building is None:
        raise UnresolvedLogError(f"event {event.event_id} has unknown building")
    if event.action == PLACE:
        if config.get(event.building) is not None:
            raise DuplicateBuildingError(
                f"{event.building} already on the board"
            )
        slot = (event.col, event.row)
        if not geometry.in_grid(event.col, event.row):
            raise OccupancyError(f"slot {slot} outside grid")
        if slot in geometry.street_mask:
            raise OccupancyError(f"slot {slot} is a street cell")
        if any((p.col, p.row) == slot for p in config.placements):
            raise OccupancyError(f"slot {slot} already occupied")
        orientation = event.orientation if event.orientation is not None else 0
        return MapConfiguration.of(
            list(config.placements)
            + [Placement(event.building, event.col, event.row, orientation)]
        )
    # remove
    if config.get(event.building) is None:
        raise AbsentBuildingError(f"{event.building} not on the board")
    return MapConfiguration.of(
        p for p in config.placements if p.building != event.building
    )


@dataclass(frozen=True)
class TrialLog:
    """Append-only record of one trial's construction phase.

    started marks the construction-phase start (the log clock's zero);
    done_ms is the participant's done signal, None while the trial is open.
    """

    events: tuple = ()
    started: bool = True
    done_ms: Optional[int] = None

    def append(self, event: BoardEvent) -> "TrialLog":
        return replace(self, events=self.events + (event,))

    def applied_events(self):
        return [e for e in self.events if not e.rejected]


def replay(log: TrialLog, geometry: BoardGeometry = None) -> MapConfiguration:
    """Fold a log's applied events from the empty configuration.

    Raises UnresolvedLogError on unknown-building events and ReplayError
    when an event sequence cannot be applied.
    """
    if geometry is None:
        geometry = default_geometry()
    config = MapConfiguration()
    for event in log.applied_events():
        try:
            config = apply_event(config, event, geometry)
        except UnresolvedLogError:
            raise
        except (DuplicateBuildingError, AbsentBuildingError, OccupancyError) as exc:
            raise ReplayError(f"event {event.event_id}: {exc}") from exc
    return config


def configuration_hash(config: MapConfiguration) -> str:
    """FNV-1a 32-bit hex over the canonical placement string.

    Stable across releases and cheap to mirror in client code; used by the
    protocol's state-hash echo.
    """
    canonical = "|".join(
        f"{p.building}@{p.col},{p.row},{p.orientation}"
        for p in sorted(config.placements, key=lambda p: p.building)
    )
    h = 0x811C9DC5
    for byte in canonical.encode("utf-8"):
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return f"{h:08x}"
