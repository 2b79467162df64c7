"""Dashboard configuration: registry, reference bands, conversions, clinic settings.

The config is a single YAML file. All clinical thresholds and conversion
factors live there, with provenance comments, so none of them are baked into
code. ``load_config`` returns a fully validated, immutable config or raises
``ConfigError`` naming the offending concept and rule; a config that loads is
safe to serve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from zoneinfo import ZoneInfo, ZoneInfoNotFoundError

import yaml

from .convert import ConversionRule, ConversionTable
from .model import (
    Band,
    BandSpec,
    Concept,
    ConceptRegistry,
    ProfileGroup,
    TrafficColor,
    UnitKind,
    validate_band_spec,
)


class ConfigError(ValueError):
    """Configuration file is unreadable, unparsable, or invalid."""


@dataclass(frozen=True)
class DashboardConfig:
    """Validated dashboard configuration. Immutable; reload makes a new value."""

    clinic_timezone: str
    ehr_base_url: str | None
    registry: ConceptRegistry
    band_specs: dict[str, BandSpec] = field(default_factory=dict)
    conversions: ConversionTable = field(default_factory=ConversionTable)

    @property
    def tz(self) -> ZoneInfo:
        return ZoneInfo(self.clinic_timezone)

    def band_spec_for(self, concept_uuid: str) -> BandSpec | None:
        return self.band_specs.get(concept_uuid)


def default_config_path() -> Path:
    """Path of the configuration bundled with the package."""
    return Path(str(resources.files("labdash") / "data" / "default-bands.yaml"))


def load_config(path: str | Path) -> DashboardConfig:
    """Load and validate a config file.

    Raises:
        ConfigError: on I/O failure, YAML syntax errors (with line info),
            or any validation failure (naming the concept and rule).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"parse error in {path}{where}: {exc}") from exc
    return parse_config(data, source=str(path))


def parse_config(data: object, *, source: str = "<config>") -> DashboardConfig:
    """Validate an already-parsed config document (the YAML/JSON object tree)."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")

    clinic_timezone = data.get("clinic_timezone")
    if not isinstance(clinic_timezone, str) or not clinic_timezone:
        raise ConfigError(f"{source}: clinic_timezone is required and must be an IANA zone name")
    try:
        ZoneInfo(clinic_timezone)
    except (ZoneInfoNotFoundError, ValueError) as exc:
        raise ConfigError(f"{source}: clinic_timezone {clinic_timezone!r} is not a known IANA zone") from exc

    ehr_base_url = data.get("ehr_base_url")
    if ehr_base_url is not None and not isinstance(ehr_base_url, str):
        raise ConfigError(f"{source}: ehr_base_url must be a string when present")

    registry = _parse_concepts(data.get("concepts"), source)
    band_specs = _parse_bands(data.get("bands"), registry, source)
    conversions = _parse_conversions(data.get("conversions"), source)

    return DashboardConfig(
        clinic_timezone=clinic_timezone,
        ehr_base_url=ehr_base_url,
        registry=registry,
        band_specs=band_specs,
        conversions=conversions,
    )


def _parse_concepts(raw: object, source: str) -> ConceptRegistry:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{source}: concepts must be a non-empty list")
    registry = ConceptRegistry()
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"{source}: concepts[{i}] must be a mapping")
        label = entry.get("name") or entry.get("uuid") or f"concepts[{i}]"
        codes_raw = entry.get("codes", [])
        if not isinstance(codes_raw, list):
            raise ConfigError(f"{source}: concept {label}: codes must be a list")
        codes = []
        for code in codes_raw:
            if not (isinstance(code, (list, tuple)) and len(code) == 2):
                raise ConfigError(f"{source}: concept {label}: each code must be a [terminology, code] pair")
            codes.append((str(code[0]), str(code[1])))
        try:
            concept = Concept(
                uuid=str(entry.get("uuid") or ""),
                name=str(entry.get("name") or ""),
                analyte=str(entry.get("analyte") or ""),
                canonical_unit=_parse_unit(entry.get("unit"), f"concept {label}", source),
                profile=_parse_profile(entry.get("profile"), label, source),
                codes=tuple(codes),
            )
            registry.add(concept)
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        if not concept.analyte:
            raise ConfigError(f"{source}: concept {label}: analyte is required")
    return registry


def _parse_bands(raw: object, registry: ConceptRegistry, source: str) -> dict[str, BandSpec]:
    if raw is None:
        return {}
    if not isinstance(raw, list):
        raise ConfigError(f"{source}: bands must be a list")
    specs: dict[str, BandSpec] = {}
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"{source}: bands[{i}] must be a mapping")
        concept_uuid = str(entry.get("concept_uuid") or "")
        if concept_uuid not in registry:
            raise ConfigError(f"{source}: bands[{i}]: unknown concept uuid {concept_uuid!r}")
        name = registry.get(concept_uuid).name
        if concept_uuid in specs:
            raise ConfigError(f"{source}: duplicate band spec for concept {name}")
        unit = _parse_unit(entry.get("unit"), f"band spec for {name}", source)
        intervals = entry.get("intervals")
        if not isinstance(intervals, list):
            raise ConfigError(f"{source}: band spec for {name}: intervals must be a list")
        bands = []
        for j, interval in enumerate(intervals):
            if not (isinstance(interval, (list, tuple)) and len(interval) == 3):
                raise ConfigError(
                    f"{source}: band spec for {name}: intervals[{j}] must be [lower, upper, color]"
                )
            lower_raw, upper_raw, color_raw = interval
            bands.append(
                Band(
                    lower=_parse_bound(lower_raw, name, j, "lower", source),
                    upper=_parse_bound(upper_raw, name, j, "upper", source),
                    color=_parse_color(color_raw, name, j, source),
                )
            )
        spec = BandSpec(concept_uuid=concept_uuid, unit=unit, bands=tuple(bands))
        violation = validate_band_spec(spec)
        if violation is not None:
            raise ConfigError(f"{source}: band spec for {name}: {violation}")
        specs[concept_uuid] = spec
    return specs


def _parse_conversions(raw: object, source: str) -> ConversionTable:
    if raw is None:
        return ConversionTable()
    if not isinstance(raw, list):
        raise ConfigError(f"{source}: conversions must be a list")
    rules = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"{source}: conversions[{i}] must be a mapping")
        analyte = str(entry.get("analyte") or "")
        if not analyte:
            raise ConfigError(f"{source}: conversions[{i}]: analyte is required")
        from_unit = _parse_unit(entry.get("from_unit"), f"conversion for {analyte}", source)
        to_unit = _parse_unit(entry.get("to_unit"), f"conversion for {analyte}", source)
        has_factor = "factor" in entry
        has_affine = "slope" in entry or "intercept" in entry
        if has_factor == has_affine:
            raise ConfigError(
                f"{source}: conversion for {analyte}: give either factor or (slope, intercept)"
            )
        if has_factor:
            slope, intercept = _parse_number(entry["factor"], analyte, "factor", source), 0.0
        else:
            slope = _parse_number(entry.get("slope"), analyte, "slope", source)
            intercept = _parse_number(entry.get("intercept", 0.0), analyte, "intercept", source)
        try:
            rules.append(
                ConversionRule(
                    analyte=analyte, from_unit=from_unit, to_unit=to_unit, slope=slope, intercept=intercept
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
    try:
        return ConversionTable(rules)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _parse_unit(raw: object, where: str, source: str) -> UnitKind:
    try:
        return UnitKind(raw)
    except ValueError:
        valid = ", ".join(u.value for u in UnitKind)
        raise ConfigError(f"{source}: {where}: unit {raw!r} is not one of: {valid}") from None


def _parse_profile(raw: object, label: str, source: str) -> ProfileGroup:
    try:
        return ProfileGroup(raw)
    except ValueError:
        raise ConfigError(f"{source}: concept {label}: profile {raw!r} is not glycemic/lipid/renal") from None


def _parse_color(raw: object, name: str, index: int, source: str) -> TrafficColor:
    try:
        return TrafficColor(raw)
    except ValueError:
        raise ConfigError(
            f"{source}: band spec for {name}: intervals[{index}]: color {raw!r} is not green/yellow/red"
        ) from None


def _parse_bound(raw: object, name: str, index: int, side: str, source: str) -> float:
    if isinstance(raw, str):
        if raw.strip().lower() in ("inf", ".inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(
            f"{source}: band spec for {name}: intervals[{index}]: {side} bound {raw!r} "
            f'must be a number or "inf"'
        )
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(
            f"{source}: band spec for {name}: intervals[{index}]: {side} bound {raw!r} must be a number"
        )
    return float(raw)


def _parse_number(raw: object, analyte: str, what: str, source: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{source}: conversion for {analyte}: {what} must be a number, got {raw!r}")
    return float(raw)


def config_to_dict(config: DashboardConfig) -> dict:
    """Serialize a config back to the file schema (JSON-safe; inf becomes \"inf\").

    The result re-parses under ``parse_config``, so the /api/config/ranges
    echo is always a loadable config document.
    """
    return {
        "clinic_timezone": config.clinic_timezone,
        "ehr_base_url": config.ehr_base_url,
        "concepts": [
            {
                "uuid": c.uuid,
                "name": c.name,
                "analyte": c.analyte,
                "unit": c.canonical_unit.value,
                "profile": c.profile.value,
                "codes": [[terminology, code] for terminology, code in c.codes],
            }
            for c in config.registry
        ],
        "bands": [
            {
                "concept_uuid": spec.concept_uuid,
                "unit": spec.unit.value,
                "intervals": [
                    [band.lower, "inf" if math.isinf(band.upper) else band.upper, band.color.value]
                    for band in spec.bands
                ],
            }
            for spec in config.band_specs.values()
        ],
        "conversions": [
            (
                {
                    "analyte": rule.analyte,
                    "from_unit": rule.from_unit.value,
                    "to_unit": rule.to_unit.value,
                    "factor": rule.slope,
                }
                if rule.intercept == 0
                else {
                    "analyte": rule.analyte,
                    "from_unit": rule.from_unit.value,
                    "to_unit": rule.to_unit.value,
                    "slope": rule.slope,
                    "intercept": rule.intercept,
                }
            )
            for rule in config.conversions.rules
        ],
    }
