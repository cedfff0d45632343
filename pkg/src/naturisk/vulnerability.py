"""Vulnerability Score of NACE level-4 activities from ecosystem-service dependencies."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable

from naturisk.errors import UnknownProcess, UnknownRating, UnmappedNace
from naturisk.ingest import CrosswalkRow, DependencyRow, normalize_rating

RATING_SCORES = {
    "none": 0.0,
    "very_low": 0.2,
    "low": 0.4,
    "medium": 0.6,
    "high": 0.8,
    "very_high": 1.0,
}


def rating_to_score(rating: str) -> float:
    token = normalize_rating(rating)
    if token is None:
        raise UnknownRating(rating)
    return RATING_SCORES[token]


class DependencyIndex:
    """Per-process ratings, built once from the dependency table."""

    def __init__(self, rows: Iterable[DependencyRow]):
        self._ratings: dict[str, dict[str, float]] = defaultdict(dict)
        for row in rows:
            self._ratings[row.production_process][row.ecosystem_service] = rating_to_score(row.rating)

    def __contains__(self, process: str) -> bool:
        return process in self._ratings

    def services(self, process: str) -> dict[str, float]:
        try:
            return self._ratings[process]
        except KeyError:
            raise UnknownProcess(process) from None


def process_max_dependency(process: str, table: DependencyIndex | Iterable[DependencyRow]) -> float:
    """Highest dependency score of a production process over its services."""
    index = table if isinstance(table, DependencyIndex) else DependencyIndex(table)
    services = index.services(process)
    if not services:
        raise UnknownProcess(process)
    return max(services.values())


@dataclass(frozen=True)
class VulnerabilityScore:
    nace4: str
    score: float
    processes: tuple[tuple[str, float], ...]
    services: tuple[str, ...]

    @property
    def n_processes(self) -> int:
        return len(self.processes)

    @property
    def top_service(self) -> str:
        return self.services[0] if self.services else ""


def processes_for(nace4: str, crosswalk: Iterable[CrosswalkRow]) -> list[str]:
    return sorted({row.production_process for row in crosswalk if row.nace4 == nace4})


def vulnerability_score(
    nace4: str,
    crosswalk: Iterable[CrosswalkRow],
    table: DependencyIndex | Iterable[DependencyRow],
) -> VulnerabilityScore:
    """Mean over the activity's distinct processes of each process's top dependency.

    ``services`` lists the ecosystem services that attain a process maximum,
    most frequent first (ties alphabetical).
    """
    index = table if isinstance(table, DependencyIndex) else DependencyIndex(table)
    processes = processes_for(nace4, crosswalk)
    if not processes:
        raise UnmappedNace(nace4)
    maxima = []
    top = Counter()
    for process in processes:
        nd = process_max_dependency(process, index)
        maxima.append((process, nd))
        if nd > 0:
            top.update(s for s, v in index.services(process).items() if v == nd)
    score = math.fsum(nd for _, nd in maxima) / len(maxima)
    services = tuple(s for s, _ in sorted(top.items(), key=lambda kv: (-kv[1], kv[0])))
    return VulnerabilityScore(nace4, score, tuple(maxima), services)


def score_all(nace_codes: Iterable[str], crosswalk, dependencies) -> dict[str, VulnerabilityScore]:
    index = DependencyIndex(dependencies)
    crosswalk = list(crosswalk)
    return {code: vulnerability_score(code, crosswalk, index) for code in sorted(set(nace_codes))}
