"""Derived dashboard views: gauge summaries, the per-visit table, trend series.

Pure transformations over observation lists. A "visit" is the set of
observations sharing one calendar date in the clinic timezone. Duplicate
measurements of a concept on one date resolve the same way everywhere:
the later obs_datetime wins.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Iterable

from .classify import Classification, classify
from .config import DashboardConfig
from .model import Observation, UnitKind

logger = logging.getLogger(__name__)

MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)


@dataclass(frozen=True)
class GaugeSummary:
    """Latest value for one concept, classified; drives one gauge."""

    concept_uuid: str
    latest_value: float
    unit: UnitKind
    obs_datetime: datetime
    classification: Classification


@dataclass(frozen=True)
class GaugeBoard:
    """All gauge summaries for a patient plus the concepts that had no data.

    failed maps concept uuid to the per-concept classification error, so one
    bad concept never takes down the other gauges.
    """

    summaries: tuple[GaugeSummary, ...]
    missing: tuple[str, ...]
    failed: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class VisitRow:
    """One table row: every concept measured on one visit date."""

    visit_date: date
    values: dict[str, float]


@dataclass(frozen=True)
class TrendSeries:
    """Time-ordered (datetime, value) points for one concept.

    month_labels[i] is the English month name of points[i], repeated when
    several tests fall in one month (the axis is per test, not per month).
    """

    concept_uuid: str
    unit: UnitKind
    points: tuple[tuple[datetime, float], ...]
    month_labels: tuple[str, ...]


PAGE_SIZE_MIN = 10
PAGE_SIZE_MAX = 100


@dataclass(frozen=True)
class PageRequest:
    """Pagination request; size is clamped into [10, 100] at construction."""

    page: int = 1
    size: int = PAGE_SIZE_MIN
    date_query: date | None = None

    def __post_init__(self) -> None:
        if self.page < 1:
            raise ValueError(f"page must be >= 1, got {self.page}")
        object.__setattr__(self, "size", min(max(self.size, PAGE_SIZE_MIN), PAGE_SIZE_MAX))


def _recency_key(obs: Observation) -> tuple[datetime, str]:
    # Stable tie-break for equal timestamps: greatest EHR record id wins.
    return (obs.obs_datetime, obs.obs_uuid or "")


def latest_observation(observations: Iterable[Observation], concept_uuid: str) -> Observation | None:
    """The observation for the concept with maximum obs_datetime, or None."""
    matching = [o for o in observations if o.concept_uuid == concept_uuid]
    if not matching:
        return None
    return max(matching, key=_recency_key)


def build_gauge_summaries(observations: list[Observation], config: DashboardConfig) -> GaugeBoard:
    """One summary per registry concept with data; the rest are reported missing.

    Each summary's value is the latest observation's value converted into the
    band spec's unit and classified there. Classification failures (missing
    band spec, no conversion path, bad value) are collected per concept.
    """
    summaries: list[GaugeSummary] = []
    missing: list[str] = []
    failed: dict[str, str] = {}
    for concept in config.registry:
        latest = latest_observation(observations, concept.uuid)
        if latest is None:
            missing.append(concept.uuid)
            continue
        spec = config.band_spec_for(concept.uuid)
        if spec is None:
            failed[concept.uuid] = f"no band spec configured for {concept.name}"
            logger.warning("gauge for %s skipped: no band spec", concept.name)
            continue
        try:
            classification = classify(
                latest.value,
                latest.unit,
                spec,
                analyte=concept.analyte,
                conversions=config.conversions,
            )
        except ValueError as exc:
            failed[concept.uuid] = str(exc)
            logger.warning("gauge for %s skipped: %s", concept.name, exc)
            continue
        summaries.append(
            GaugeSummary(
                concept_uuid=concept.uuid,
                latest_value=classification.value,
                unit=classification.unit,
                obs_datetime=latest.obs_datetime,
                classification=classification,
            )
        )
    return GaugeBoard(summaries=tuple(summaries), missing=tuple(missing), failed=failed)


def build_visit_table(observations: list[Observation], config: DashboardConfig) -> list[VisitRow]:
    """Group observations into per-visit-date rows, newest date first.

    Within one date a concept measured twice keeps the later obs_datetime;
    values are reported in each concept's canonical unit.
    """
    winners: dict[date, dict[str, Observation]] = {}
    for obs in observations:
        if obs.concept_uuid not in config.registry:
            logger.warning("dropping observation for unregistered concept %s", obs.concept_uuid)
            continue
        cells = winners.setdefault(obs.visit_date, {})
        cur = cells.get(obs.concept_uuid)
        if cur is None or _recency_key(obs) > _recency_key(cur):
            cells[obs.concept_uuid] = obs
    rows = []
    for visit_date in sorted(winners, reverse=True):
        values = {}
        for concept_uuid, obs in winners[visit_date].items():
            concept = config.registry.get(concept_uuid)
            values[concept_uuid] = config.conversions.convert(
                obs.value, concept.analyte, obs.unit, concept.canonical_unit
            )
        rows.append(VisitRow(visit_date=visit_date, values=values))
    return rows


def filter_rows(rows: list[VisitRow], date_query: date | None) -> list[VisitRow]:
    """Exactly the rows whose visit_date equals the query date; no query, no filter."""
    if date_query is None:
        return rows
    return [row for row in rows if row.visit_date == date_query]


def paginate(rows: list[VisitRow], req: PageRequest) -> tuple[list[VisitRow], int, int]:
    """Slice rows into the requested page.

    Returns (page rows, total_rows, total_pages). Pages beyond the last are
    empty, not errors, and totals stay correct.
    """
    total_rows = len(rows)
    total_pages = math.ceil(total_rows / req.size)
    start = (req.page - 1) * req.size
    return rows[start : start + req.size], total_rows, total_pages


def build_trend_series(
    observations: list[Observation], concept_uuid: str, config: DashboardConfig
) -> TrendSeries:
    """All of a patient's values for one concept, oldest first, in canonical unit.

    The output is independent of input arrival order. Observations sharing an
    identical timestamp collapse to the tie-break winner so the series stays
    strictly ascending.
    """
    concept = config.registry.get(concept_uuid)
    by_instant: dict[datetime, Observation] = {}
    for obs in observations:
        if obs.concept_uuid != concept_uuid:
            continue
        cur = by_instant.get(obs.obs_datetime)
        if cur is None or _recency_key(obs) > _recency_key(cur):
            by_instant[obs.obs_datetime] = obs
    ordered = sorted(by_instant.values(), key=_recency_key)
    tz = config.tz
    points = []
    labels = []
    for obs in ordered:
        value = config.conversions.convert(obs.value, concept.analyte, obs.unit, concept.canonical_unit)
        points.append((obs.obs_datetime, value))
        labels.append(MONTH_NAMES[obs.obs_datetime.astimezone(tz).month - 1])
    return TrendSeries(
        concept_uuid=concept_uuid,
        unit=concept.canonical_unit,
        points=tuple(points),
        month_labels=tuple(labels),
    )
