"""Shared domain types for the lab dashboard.

Everything here is immutable after construction and safe to share across
threads. Reference bands, concepts, and observations are plain data; the
clinical thresholds themselves live in the config file, never in code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import Iterator
from zoneinfo import ZoneInfo


class UnitKind(str, Enum):
    """Units a lab observation can be expressed in."""

    MMOL_PER_L = "mmol_per_L"
    MG_PER_DL = "mg_per_dL"
    PERCENT = "percent"
    MMOL_PER_MOL = "mmol_per_mol"
    UMOL_PER_L = "umol_per_L"
    ML_PER_MIN_PER_1_73M2 = "mL_per_min_per_1_73m2"


class ProfileGroup(str, Enum):
    """Clinical profile a concept belongs to."""

    GLYCEMIC = "glycemic"
    LIPID = "lipid"
    RENAL = "renal"


class TrafficColor(str, Enum):
    """Traffic-light coding: green (normal), yellow (borderline), red (abnormal).

    Severity is totally ordered: green < yellow < red.
    """

    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]


_SEVERITY = {TrafficColor.GREEN: 0, TrafficColor.YELLOW: 1, TrafficColor.RED: 2}


class Gender(str, Enum):
    MALE = "M"
    FEMALE = "F"
    OTHER = "U"

    @classmethod
    def parse(cls, raw: str) -> "Gender":
        """Map an EHR gender string to the enum, defaulting to OTHER."""
        norm = (raw or "").strip().upper()
        if norm in ("M", "MALE"):
            return cls.MALE
        if norm in ("F", "FEMALE"):
            return cls.FEMALE
        return cls.OTHER


@dataclass(frozen=True)
class Concept:
    """A measurable clinical quantity.

    Attributes:
        uuid: Opaque identifier, unique within a registry.
        name: Display name.
        analyte: Substance key used to look up unit-conversion rules
            (several concepts may share one analyte, e.g. the cholesterol
            fractions).
        canonical_unit: Unit all derived views report the value in.
        profile: Profile group the concept is displayed under.
        codes: (terminology, code) pairs, e.g. ("LOINC", "4548-4").
    """

    uuid: str
    name: str
    analyte: str
    canonical_unit: UnitKind
    profile: ProfileGroup
    codes: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.uuid:
            raise ValueError("concept uuid must be non-empty")
        if not self.name:
            raise ValueError(f"concept {self.uuid}: name must be non-empty")


class ConceptRegistry:
    """Concepts keyed by uuid; lookup is total over registered concepts."""

    def __init__(self, concepts: list[Concept] | tuple[Concept, ...] = ()):
        self._by_uuid: dict[str, Concept] = {}
        for concept in concepts:
            self.add(concept)

    def add(self, concept: Concept) -> None:
        if concept.uuid in self._by_uuid:
            raise ValueError(f"duplicate concept uuid: {concept.uuid}")
        self._by_uuid[concept.uuid] = concept

    def get(self, uuid: str) -> Concept:
        try:
            return self._by_uuid[uuid]
        except KeyError:
            raise KeyError(f"unknown concept uuid: {uuid}") from None

    def __contains__(self, uuid: str) -> bool:
        return uuid in self._by_uuid

    def __iter__(self) -> Iterator[Concept]:
        return iter(self._by_uuid.values())

    def __len__(self) -> int:
        return len(self._by_uuid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConceptRegistry):
            return NotImplemented
        return self._by_uuid == other._by_uuid

    @property
    def uuids(self) -> list[str]:
        return list(self._by_uuid)


@dataclass(frozen=True)
class Observation:
    """One measured value for one patient/concept at one point in time.

    ``visit_date`` is derived once, at construction, as the calendar date
    of ``obs_datetime`` in the clinic timezone; it is never recomputed.
    ``obs_uuid`` is the EHR record id when known, used only as a stable
    tie-breaker for equal timestamps.
    """

    patient_uuid: str
    concept_uuid: str
    value: float
    unit: UnitKind
    obs_datetime: datetime
    visit_date: date
    obs_uuid: str | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"observation value must be finite, got {self.value!r}")
        if self.value < 0:
            raise ValueError(f"observation value must be non-negative, got {self.value!r}")
        if self.obs_datetime.tzinfo is None:
            raise ValueError("obs_datetime must be timezone-aware")

    @classmethod
    def make(
        cls,
        patient_uuid: str,
        concept_uuid: str,
        value: float,
        unit: UnitKind,
        obs_datetime: datetime,
        clinic_tz: ZoneInfo,
        obs_uuid: str | None = None,
    ) -> "Observation":
        """Build an observation, deriving visit_date in the clinic timezone."""
        return cls(
            patient_uuid=patient_uuid,
            concept_uuid=concept_uuid,
            value=value,
            unit=unit,
            obs_datetime=obs_datetime,
            visit_date=visit_date_of(obs_datetime, clinic_tz),
            obs_uuid=obs_uuid,
        )


def visit_date_of(obs_datetime: datetime, clinic_tz: ZoneInfo) -> date:
    """Calendar date of a timestamp in the clinic timezone."""
    return obs_datetime.astimezone(clinic_tz).date()


@dataclass(frozen=True)
class PatientHeader:
    """Patient identity shown at the top of the dashboard."""

    patient_uuid: str
    display_name: str
    gender: Gender
    birthdate: date

    def __post_init__(self) -> None:
        if self.birthdate > date.today():
            raise ValueError(f"birthdate {self.birthdate} is in the future")


@dataclass(frozen=True)
class Band:
    """One reference interval: [lower, upper) -> color. upper may be +inf."""

    lower: float
    upper: float
    color: TrafficColor

    def contains(self, value: float) -> bool:
        return self.lower <= value < self.upper


@dataclass(frozen=True)
class BandSpec:
    """Ordered, contiguous reference intervals for one concept.

    A valid spec partitions [0, +inf): bands are ascending, each upper bound
    equals the next lower bound, and the last upper bound is +inf. Colors may
    appear in any order (so "higher is better" measures like HDL are valid).
    """

    concept_uuid: str
    unit: UnitKind
    bands: tuple[Band, ...]


@dataclass(frozen=True)
class BandViolation:
    """First invariant violated by a band spec.

    rule is one of "empty", "unsorted", "gap", "overlap"; band_index points
    at the offending band (0 for an empty list).
    """

    rule: str
    band_index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} at band {self.band_index}: {self.detail}"


def validate_band_spec(spec: BandSpec) -> BandViolation | None:
    """Check all BandSpec invariants; return the first violation, or None if ok."""
    bands = spec.bands
    if not bands:
        return BandViolation("empty", 0, "band list is empty")
    for i, band in enumerate(bands):
        if not math.isfinite(band.lower) or band.lower < 0:
            return BandViolation("unsorted", i, f"lower bound {band.lower} is not a finite non-negative number")
        if not band.lower < band.upper:
            return BandViolation("unsorted", i, f"interval [{band.lower}, {band.upper}) is empty or inverted")
    if bands[0].lower != 0:
        return BandViolation("gap", 0, f"first band starts at {bands[0].lower}, leaving [0, {bands[0].lower}) uncovered")
    for i in range(1, len(bands)):
        prev, cur = bands[i - 1], bands[i]
        if cur.lower > prev.upper:
            return BandViolation("gap", i, f"gap between {prev.upper} and {cur.lower}")
        if cur.lower < prev.upper:
            return BandViolation("overlap", i, f"band starts at {cur.lower}, before previous upper bound {prev.upper}")
    if bands[-1].upper != math.inf:
        return BandViolation("gap", len(bands) - 1, f"last band ends at {bands[-1].upper}, leaving [{bands[-1].upper}, inf) uncovered")
    return None


def find_band(spec: BandSpec, value: float) -> int:
    """Index of the unique band containing value, for a valid spec.

    Intervals are lower-inclusive, upper-exclusive, so a value sitting
    exactly on an interior boundary lands in the higher band.
    """
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"value must be finite and non-negative, got {value!r}")
    for i, band in enumerate(spec.bands):
        if band.contains(value):
            return i
    raise ValueError(f"no band contains {value!r}; spec for {spec.concept_uuid} is invalid")


# Stable uuids for the default concept set. These double as the uuids in the
# shipped config; a test pins the two against each other.
HBA1C_UUID = "969d92ae-3981-5783-9480-6bf647c549a6"
FPG_UUID = "7afc6e4d-6df5-54aa-a8a5-d57911982359"
TOTAL_CHOL_UUID = "16efbac4-e4c8-58d9-ad47-c511073a6e72"
LDL_UUID = "fae10ff4-a672-50f1-b2d7-4f45312d7616"
HDL_UUID = "460f5dd5-5a01-5e7c-8005-d649cbc367d4"
TRIGLYCERIDES_UUID = "4f9bec70-5d26-5fa3-a660-dcae9b79f0dd"
CREATININE_UUID = "001007b0-ec1f-5ea6-aa3b-816b15d2504f"
EGFR_UUID = "1b9259d6-634d-5117-965d-66cf631d762e"


def default_registry() -> ConceptRegistry:
    """The eight measures the dashboard tracks out of the box."""
    return ConceptRegistry(
        [
            Concept(
                uuid=HBA1C_UUID,
                name="HbA1c",
                analyte="hba1c",
                canonical_unit=UnitKind.PERCENT,
                profile=ProfileGroup.GLYCEMIC,
                codes=(("LOINC", "4548-4"), ("SNOMED", "43396009")),
            ),
            Concept(
                uuid=FPG_UUID,
                name="Fasting Plasma Glucose",
                analyte="glucose",
                canonical_unit=UnitKind.MMOL_PER_L,
                profile=ProfileGroup.GLYCEMIC,
                codes=(("LOINC", "1558-6"),),
            ),
            Concept(
                uuid=TOTAL_CHOL_UUID,
                name="Total Cholesterol",
                analyte="cholesterol",
                canonical_unit=UnitKind.MMOL_PER_L,
                profile=ProfileGroup.LIPID,
                codes=(("LOINC", "2093-3"),),
            ),
            Concept(
                uuid=LDL_UUID,
                name="LDL Cholesterol",
                analyte="cholesterol",
                canonical_unit=UnitKind.MMOL_PER_L,
                profile=ProfileGroup.LIPID,
                codes=(("LOINC", "2089-1"),),
            ),
            Concept(
                uuid=HDL_UUID,
                name="HDL Cholesterol",
                analyte="cholesterol",
                canonical_unit=UnitKind.MMOL_PER_L,
                profile=ProfileGroup.LIPID,
                codes=(("LOINC", "2085-9"),),
            ),
            Concept(
                uuid=TRIGLYCERIDES_UUID,
                name="Triglycerides",
                analyte="triglycerides",
                canonical_unit=UnitKind.MMOL_PER_L,
                profile=ProfileGroup.LIPID,
                codes=(("LOINC", "2571-8"),),
            ),
            Concept(
                uuid=CREATININE_UUID,
                name="Serum Creatinine",
                analyte="creatinine",
                canonical_unit=UnitKind.UMOL_PER_L,
                profile=ProfileGroup.RENAL,
                codes=(("LOINC", "2160-0"),),
            ),
            Concept(
                uuid=EGFR_UUID,
                name="eGFR",
                analyte="egfr",
                canonical_unit=UnitKind.ML_PER_MIN_PER_1_73M2,
                profile=ProfileGroup.RENAL,
                codes=(("LOINC", "33914-3"),),
            ),
        ]
    )
