"""Unit conversion between lab units, driven by a per-analyte table.

The conversion factors are data, loaded from the config file next to the
reference bands, so every number in play is auditable. Each rule is either a
plain linear factor (to = from * factor) or an affine pair (to = from * slope
+ intercept, used for HbA1c percent <-> mmol/mol). The inverse direction is
derived, so round-trips are exact up to float arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Concept, UnitKind


class UnitConversionError(ValueError):
    """No conversion rule exists for the requested (analyte, unit, unit)."""


@dataclass(frozen=True)
class ConversionRule:
    """to_value = from_value * slope + intercept. A plain factor has intercept 0."""

    analyte: str
    from_unit: UnitKind
    to_unit: UnitKind
    slope: float
    intercept: float = 0.0

    def __post_init__(self) -> None:
        if self.slope == 0 or not math.isfinite(self.slope) or not math.isfinite(self.intercept):
            raise ValueError(
                f"conversion {self.analyte} {self.from_unit.value}->{self.to_unit.value}: "
                f"slope must be finite and non-zero, intercept finite"
            )
        if self.from_unit == self.to_unit:
            raise ValueError(f"conversion {self.analyte}: from and to unit are both {self.from_unit.value}")

    def apply(self, value: float) -> float:
        return value * self.slope + self.intercept

    def apply_inverse(self, value: float) -> float:
        return (value - self.intercept) / self.slope


class ConversionTable:
    """Lookup of conversion rules by (analyte, from unit, to unit).

    Each configured rule also registers its inverse; identity conversions
    always succeed.
    """

    def __init__(self, rules: list[ConversionRule] | tuple[ConversionRule, ...] = ()):
        self._rules: tuple[ConversionRule, ...] = tuple(rules)
        self._index: dict[tuple[str, UnitKind, UnitKind], tuple[ConversionRule, bool]] = {}
        for rule in self._rules:
            forward = (rule.analyte, rule.from_unit, rule.to_unit)
            backward = (rule.analyte, rule.to_unit, rule.from_unit)
            if forward in self._index or backward in self._index:
                raise ValueError(f"duplicate conversion rule for {forward}")
            self._index[forward] = (rule, False)
            self._index[backward] = (rule, True)

    @property
    def rules(self) -> tuple[ConversionRule, ...]:
        return self._rules

    def supported_units(self, analyte: str, base: UnitKind) -> list[UnitKind]:
        """All units reachable from base for this analyte, base included."""
        units = [base]
        for (name, src, dst), _ in self._index.items():
            if name == analyte and src == base and dst not in units:
                units.append(dst)
        return units

    def convert(self, value: float, analyte: str, from_unit: UnitKind, to_unit: UnitKind) -> float:
        if from_unit == to_unit:
            return value
        entry = self._index.get((analyte, from_unit, to_unit))
        if entry is None:
            raise UnitConversionError(
                f"no conversion rule for analyte {analyte!r} from {from_unit.value} to {to_unit.value}"
            )
        rule, inverted = entry
        return rule.apply_inverse(value) if inverted else rule.apply(value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConversionTable):
            return NotImplemented
        return self._rules == other._rules


def convert_unit(
    value: float,
    measure: Concept,
    from_unit: UnitKind,
    to_unit: UnitKind,
    table: ConversionTable,
) -> float:
    """Convert a value between units valid for the given measure."""
    if not math.isfinite(value):
        raise ValueError(f"cannot convert non-finite value {value!r}")
    return table.convert(value, measure.analyte, from_unit, to_unit)
