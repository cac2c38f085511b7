"""Exception hierarchy shared across the engine."""


class CogmapError(Exception):
    """Base class for all engine errors."""


class GeometryError(CogmapError):
    """Invalid board geometry or out-of-grid coordinate."""


class DuplicateBuildingError(CogmapError):
    """A building id would appear twice in a configuration."""


class AbsentBuildingError(CogmapError):
    """Removal of a building that is not on the board."""


class OccupancyError(CogmapError):
    """Placement onto a street cell, an occupied slot, or outside the grid."""


class UndefinedMetricError(CogmapError):
    """A metric's precondition (nonempty sets) does not hold."""


class MalformedLogError(CogmapError):
    """Trial log lacks a construction-start or done marker."""


class UnresolvedLogError(CogmapError):
    """Log still contains unidentified events and cannot be replayed."""


class ReplayError(CogmapError):
    """Event sequence cannot be replayed into a valid configuration."""


class PhaseError(CogmapError):
    """Operation attempted outside its allowed trial phase."""


class ClockError(CogmapError):
    """Nonmonotone timestamp within a trial log."""


class ConflictError(CogmapError):
    """Correction would violate configuration invariants."""


class CorrectionReferenceError(CogmapError):
    """Correction targets an unknown or unflagged event."""


class PendingCorrectionError(CogmapError):
    """Trial cannot close while flagged events remain unresolved."""


class PlanError(CogmapError):
    """Assessment plan is empty, inconsistent, or references bad data."""


class CoverageError(CogmapError):
    """Ground-truth mapping does not cover every corrupted event."""


class GenerationError(CogmapError):
    """Synthetic agent could not produce a valid log (board exhausted)."""


class NeighborhoodParseError(CogmapError):
    """Neighborhood or plan file failed to parse."""


class NeighborhoodValidationError(CogmapError):
    """Neighborhood file parsed but violates board invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class PartialReadError(CogmapError):
    """Session log file is truncated or corrupt past a known-good line."""

    def __init__(self, last_good_line, message=""):
        self.last_good_line = last_good_line
        super().__init__(
            message or f"log unreadable after line {last_good_line}"
        )


class PendingScoreError(CogmapError):
    """Export requested for a session that has unscored recorded trials."""
