"""Deterministic fixture generator for the mock EHR.

Given a seed, produces a CSV fixture of monthly lab visits whose values
drift along a per-concept trajectory with bounded noise. The same seed
always yields byte-identical output, so generated patients can serve as
reproducible test subjects.
"""

from __future__ import annotations

import random
import uuid as uuidlib
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone

from ..model import (
    CREATININE_UUID,
    EGFR_UUID,
    FPG_UUID,
    HBA1C_UUID,
    HDL_UUID,
    LDL_UUID,
    TOTAL_CHOL_UUID,
    TRIGLYCERIDES_UUID,
    ConceptRegistry,
)
from .store import EXPECTED_HEADER

_PATIENT_UUID_NAMESPACE = uuidlib.UUID("8c1f2f2e-0a5b-4c4e-9f6a-b1d2c3e4f5a6")

_CLINIC_OFFSET = timezone(timedelta(hours=5, minutes=30))


@dataclass(frozen=True)
class ConceptTrajectory:
    """How one analyte evolves across visits, in its canonical unit."""

    baseline: float
    drift_per_visit: float
    noise: float


DEFAULT_TRAJECTORIES: dict[str, ConceptTrajectory] = {
    HBA1C_UUID: ConceptTrajectory(8.2, -0.2, 0.15),
    FPG_UUID: ConceptTrajectory(8.5, -0.35, 0.3),
    TOTAL_CHOL_UUID: ConceptTrajectory(5.8, -0.15, 0.2),
    LDL_UUID: ConceptTrajectory(3.9, -0.2, 0.15),
    HDL_UUID: ConceptTrajectory(0.95, 0.05, 0.05),
    TRIGLYCERIDES_UUID: ConceptTrajectory(2.6, -0.15, 0.2),
    CREATININE_UUID: ConceptTrajectory(95.0, 3.0, 5.0),
    EGFR_UUID: ConceptTrajectory(78.0, -2.0, 3.0),
}


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for one generated patient."""

    seed: int
    visits: int = 6
    start: date = date(2018, 6, 30)
    interval_days: int = 31
    patient_uuid: str | None = None
    trajectories: dict[str, ConceptTrajectory] = field(default_factory=lambda: dict(DEFAULT_TRAJECTORIES))

    def __post_init__(self) -> None:
        if self.visits < 1:
            raise ValueError(f"visits must be >= 1, got {self.visits}")
        if self.interval_days < 1:
            raise ValueError(f"interval_days must be >= 1, got {self.interval_days}")

    def resolved_patient_uuid(self) -> str:
        if self.patient_uuid is not None:
            return self.patient_uuid
        return str(uuidlib.uuid5(_PATIENT_UUID_NAMESPACE, f"mock-patient-{self.seed}"))


def generate_fixture(spec: GeneratorSpec, registry: ConceptRegistry) -> str:
    """Render a fixture CSV for one synthetic patient.

    Values are drawn visit-major in registry order from a seeded RNG, so
    the draw sequence (and therefore the file) is fully determined by the
    spec. Values are clamped at zero and rounded to two decimals.
    """
    for concept in registry:
        if concept.uuid not in spec.trajectories:
            raise ValueError(f"no trajectory for concept {concept.name} ({concept.uuid})")

    rng = random.Random(spec.seed)
    patient_uuid = spec.resolved_patient_uuid()
    lines = [",".join(EXPECTED_HEADER)]
    for visit_index in range(spec.visits):
        visit_day = spec.start + timedelta(days=visit_index * spec.interval_days)
        for concept_index, concept in enumerate(registry):
            trajectory = spec.trajectories[concept.uuid]
            value = trajectory.baseline + trajectory.drift_per_visit * visit_index
            value += rng.uniform(-trajectory.noise, trajectory.noise)
            value = round(max(0.0, value), 2)
            when = datetime.combine(visit_day, time(9, 0), tzinfo=_CLINIC_OFFSET)
            when += timedelta(minutes=concept_index)
            lines.append(
                ",".join(
                    [
                        patient_uuid,
                        concept.uuid,
                        f"{value:.2f}",
                        concept.canonical_unit.value,
                        when.isoformat(),
                    ]
                )
            )
    return "\n".join(lines) + "\n"
