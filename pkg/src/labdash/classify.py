"""Traffic-light classification of lab values against reference bands."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .convert import ConversionTable, UnitConversionError
from .model import BandSpec, ConceptRegistry, TrafficColor, UnitKind, find_band


@dataclass(frozen=True)
class Classification:
    """Outcome of classifying one value against one band spec.

    value/unit are the classified value after conversion into the spec's
    unit; band_index addresses the unique band containing it.
    """

    concept_uuid: str
    value: float
    unit: UnitKind
    color: TrafficColor
    band_index: int


def classify(
    value: float,
    unit: UnitKind,
    spec: BandSpec,
    *,
    analyte: str | None = None,
    conversions: ConversionTable | None = None,
) -> Classification:
    """Classify a value, converting into the spec's unit first if needed.

    The classifier works on full-precision floats; display rounding is the
    UI's job. A value on an interior band boundary classifies into the
    higher band (lower-inclusive intervals).

    Raises:
        ValueError: value is negative or non-finite.
        UnitConversionError: unit differs from the spec's and no conversion
            rule is available.
    """
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"cannot classify value {value!r}: must be finite and non-negative")
    if unit != spec.unit:
        if conversions is None or analyte is None:
            raise UnitConversionError(
                f"value in {unit.value} but spec for {spec.concept_uuid} is in {spec.unit.value} "
                f"and no conversion table/analyte was supplied"
            )
        value = conversions.convert(value, analyte, unit, spec.unit)
    index = find_band(spec, value)
    return Classification(
        concept_uuid=spec.concept_uuid,
        value=value,
        unit=spec.unit,
        color=spec.bands[index].color,
        band_index=index,
    )


def severity_key(classification: Classification, registry: ConceptRegistry) -> tuple[int, str]:
    """Sort key placing the most severe classification first, ties by concept name."""
    name = registry.get(classification.concept_uuid).name
    return (-classification.color.severity, name)


def classification_severity(a: Classification, b: Classification, registry: ConceptRegistry) -> int:
    """Three-way ordering for UI sorting: negative if a orders before b.

    Red sorts before yellow before green; equal colors order by concept
    name ascending; equal color and name compare equal.
    """
    ka, kb = severity_key(a, registry), severity_key(b, registry)
    return -1 if ka < kb else (1 if ka > kb else 0)
