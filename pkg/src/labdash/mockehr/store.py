"""Fixture storage for the mock EHR.

Fixtures are CSV files with the exact header

    patient_uuid,concept_uuid,value,unit,obs_datetime

Every row is validated at load time: the concept must exist in the registry,
the unit must be the concept's canonical unit (the wire protocol carries no
unit field, so anything else could not round-trip), the value must be a
finite non-negative number, and the timestamp must carry a UTC offset.
Errors name the offending line so a bad fixture is fixable in one look.
"""

from __future__ import annotations

import csv
import io
import math
import uuid as uuidlib
from dataclasses import dataclass, field
from datetime import datetime

from ..model import ConceptRegistry, UnitKind

EXPECTED_HEADER = ["patient_uuid", "concept_uuid", "value", "unit", "obs_datetime"]

_OBS_UUID_NAMESPACE = uuidlib.UUID("6ba7b811-9dad-11d1-80b4-00c04fd430c8")


class FixtureError(ValueError):
    """A fixture file is malformed; the message names the line."""


@dataclass(frozen=True)
class FixtureRow:
    """One observation as stored by the mock EHR."""

    patient_uuid: str
    concept_uuid: str
    value: float
    unit: UnitKind
    obs_datetime: datetime
    obs_uuid: str


@dataclass
class ObservationStore:
    """All fixture rows, indexed by patient."""

    rows_by_patient: dict[str, list[FixtureRow]] = field(default_factory=dict)

    def add_patient(self, patient_uuid: str) -> None:
        """Register a patient even if no observations follow."""
        self.rows_by_patient.setdefault(patient_uuid, [])

    def add_row(self, row: FixtureRow) -> None:
        self.rows_by_patient.setdefault(row.patient_uuid, []).append(row)

    @property
    def patients(self) -> list[str]:
        return sorted(self.rows_by_patient)

    def __contains__(self, patient_uuid: str) -> bool:
        return patient_uuid in self.rows_by_patient

    def observations_for(self, patient_uuid: str, concept_uuid: str) -> list[FixtureRow]:
        rows = self.rows_by_patient.get(patient_uuid, [])
        return [r for r in rows if r.concept_uuid == concept_uuid]

    def __len__(self) -> int:
        return sum(len(rows) for rows in self.rows_by_patient.values())


def obs_uuid_for(patient_uuid: str, concept_uuid: str, obs_datetime: datetime, value: float) -> str:
    """Deterministic observation id, stable across reloads of the same row."""
    name = f"{patient_uuid}|{concept_uuid}|{obs_datetime.isoformat()}|{value!r}"
    return str(uuidlib.uuid5(_OBS_UUID_NAMESPACE, name))


def load_fixtures(text: str, registry: ConceptRegistry) -> ObservationStore:
    """Parse fixture CSV into a store, rejecting malformed rows by line.

    Args:
        text: The CSV file contents.
        registry: Concepts the fixtures are allowed to reference.

    Raises:
        FixtureError: Wrong header, unknown concept, non-canonical unit,
            bad value, or a timestamp without a UTC offset.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FixtureError("fixture file is empty") from None
    if header != EXPECTED_HEADER:
        raise FixtureError(
            f"line 1: header must be {','.join(EXPECTED_HEADER)!r}, got {','.join(header)!r}"
        )

    store = ObservationStore()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(EXPECTED_HEADER):
            raise FixtureError(f"line {lineno}: expected {len(EXPECTED_HEADER)} fields, got {len(row)}")
        patient_uuid, concept_uuid, value_raw, unit_raw, when_raw = (cell.strip() for cell in row)

        if concept_uuid not in registry:
            raise FixtureError(f"line {lineno}: unknown concept uuid {concept_uuid!r}")
        concept = registry.get(concept_uuid)

        try:
            unit = UnitKind(unit_raw)
        except ValueError:
            raise FixtureError(f"line {lineno}: unknown unit {unit_raw!r}") from None
        if unit is not concept.canonical_unit:
            raise FixtureError(
                f"line {lineno}: unit {unit.value!r} is not the canonical unit "
                f"{concept.canonical_unit.value!r} for {concept.name}"
            )

        try:
            value = float(value_raw)
        except ValueError:
            raise FixtureError(f"line {lineno}: value {value_raw!r} is not a number") from None
        if not math.isfinite(value) or value < 0:
            raise FixtureError(f"line {lineno}: value {value_raw!r} must be finite and >= 0")

        try:
            when = datetime.fromisoformat(when_raw)
        except ValueError:
            raise FixtureError(f"line {lineno}: obs_datetime {when_raw!r} is not ISO-8601") from None
        if when.tzinfo is None:
            raise FixtureError(f"line {lineno}: obs_datetime {when_raw!r} has no UTC offset")

        store.add_row(
            FixtureRow(
                patient_uuid=patient_uuid,
                concept_uuid=concept_uuid,
                value=value,
                unit=unit,
                obs_datetime=when,
                obs_uuid=obs_uuid_for(patient_uuid, concept_uuid, when, value),
            )
        )
    return store
