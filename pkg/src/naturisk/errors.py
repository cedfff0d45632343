"""Exception hierarchy.

Every error raised by the engine derives from :class:`NatureRiskError` so the
CLI can map it to an exit code without catching unrelated exceptions.
"""

from __future__ import annotations


class NatureRiskError(Exception):
    """Base class for all engine errors."""


class ConfigError(NatureRiskError, ValueError):
    pass


# -- ingestion ---------------------------------------------------------------


class MissingFile(NatureRiskError, FileNotFoundError):
    def __init__(self, path):
        super().__init__(f"required input file not found: {path}")
        self.path = path


class SchemaViolation(NatureRiskError, ValueError):
    def __init__(self, table: str, row: int, column: str, reason: str):
        super().__init__(f"{table} row {row}, column {column!r}: {reason}")
        self.table = table
        self.row = row
        self.column = column
        self.reason = reason


class DanglingReference(NatureRiskError, ValueError):
    def __init__(self, table: str, key: str):
        super().__init__(f"{table}: unresolved reference {key!r}")
        self.table = table
        self.key = key


class ValidationFailed(NatureRiskError, ValueError):
    def __init__(self, report):
        super().__init__(f"dataset validation failed with {len(report.errors)} error(s)")
        self.report = report


# -- numerical domain --------------------------------------------------------


class DomainError(NatureRiskError, ValueError):
    pass


class InsufficientData(NatureRiskError, ValueError):
    pass


class SingularFit(NatureRiskError, ValueError):
    pass


class ThresholdDegenerate(NatureRiskError, ValueError):
    pass


class YearOutOfRange(NatureRiskError, ValueError):
    pass


class EmptyInput(NatureRiskError, ValueError):
    pass


class NoHazardData(NatureRiskError, ValueError):
    pass


class EmptyRegion(NatureRiskError, ValueError):
    pass


# -- firms -------------------------------------------------------------------


class UnknownRating(NatureRiskError, ValueError):
    pass


class UnknownProcess(NatureRiskError, KeyError):
    pass


class UnmappedNace(NatureRiskError, KeyError):
    pass


class UnmappedSector(NatureRiskError, KeyError):
    pass


class ZeroTotalRevenue(NatureRiskError, ValueError):
    pass


class NegativeRevenue(NatureRiskError, ValueError):
    pass


class EmptyAggregate(NatureRiskError, ValueError):
    pass


class ZeroAggregateGdp(NatureRiskError, ValueError):
    pass


class MissingCdi(NatureRiskError, KeyError):
    def __init__(self, iso3: str):
        super().__init__(f"no CDI available for {iso3!r}")
        self.iso3 = iso3


class InvalidRates(NatureRiskError, ValueError):
    pass
