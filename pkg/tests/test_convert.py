import math

import pytest
from hypothesis import given, settings, strategies as st

from labdash.convert import ConversionRule, ConversionTable, UnitConversionError, convert_unit
from labdash.model import FPG_UUID, UnitKind, default_registry

REGISTRY = default_registry()
GLUCOSE = REGISTRY.get(FPG_UUID)


@pytest.fixture(scope="module")
def table(request):
    # The conversion rules under test are the shipped ones.
    from labdash.config import default_config_path, load_config

    return load_config(default_config_path()).conversions


def test_glucose_factor_against_molar_mass(table):
    # mg/dL = mmol/L * (molar mass 180.156 g/mol) / 10
    assert table.convert(5.0, "glucose", UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL) == pytest.approx(90.078, abs=0.01)


def test_cholesterol_factor(table):
    assert table.convert(5.2, "cholesterol", UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL) == pytest.approx(201.08, abs=0.05)


def test_triglycerides_factor(table):
    assert table.convert(1.7, "triglycerides", UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL) == pytest.approx(150.6, abs=0.1)


def test_creatinine_factor(table):
    assert table.convert(1.0, "creatinine", UnitKind.MG_PER_DL, UnitKind.UMOL_PER_L) == pytest.approx(88.42, abs=0.01)


def test_hba1c_affine_both_ways(table):
    # NGSP % = 0.09148 * IFCC mmol/mol + 2.152; 53 mmol/mol is about 7.0 %
    assert table.convert(53.0, "hba1c", UnitKind.MMOL_PER_MOL, UnitKind.PERCENT) == pytest.approx(7.0, abs=0.01)
    assert table.convert(7.0, "hba1c", UnitKind.PERCENT, UnitKind.MMOL_PER_MOL) == pytest.approx(53.0, abs=0.15)


def test_identity_conversion_is_exact(table):
    assert table.convert(6.25, "glucose", UnitKind.MMOL_PER_L, UnitKind.MMOL_PER_L) == 6.25


def test_unknown_pair_raises(table):
    with pytest.raises(UnitConversionError):
        table.convert(1.0, "glucose", UnitKind.MMOL_PER_L, UnitKind.UMOL_PER_L)
    with pytest.raises(UnitConversionError):
        table.convert(1.0, "egfr", UnitKind.ML_PER_MIN_PER_1_73M2, UnitKind.MG_PER_DL)


def test_convert_unit_uses_concept_analyte(table):
    out = convert_unit(5.0, GLUCOSE, UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL, table)
    assert out == pytest.approx(90.078, abs=0.01)
    with pytest.raises(ValueError):
        convert_unit(math.nan, GLUCOSE, UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL, table)


def all_supported_pairs(table):
    pairs = []
    for rule in table.rules:
        pairs.append((rule.analyte, rule.from_unit, rule.to_unit))
        pairs.append((rule.analyte, rule.to_unit, rule.from_unit))
    return pairs


@settings(max_examples=1000, deadline=None)
@given(value=st.floats(min_value=0, max_value=1e6, allow_nan=False))
def test_round_trip_within_relative_tolerance(table, value):
    for analyte, src, dst in all_supported_pairs(table):
        there = table.convert(value, analyte, src, dst)
        back = table.convert(there, analyte, dst, src)
        assert back == pytest.approx(value, rel=1e-9, abs=1e-9)


def test_rule_rejects_zero_slope():
    with pytest.raises(ValueError):
        ConversionRule("x", UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL, slope=0.0)


def test_rule_rejects_same_units():
    with pytest.raises(ValueError):
        ConversionRule("x", UnitKind.MMOL_PER_L, UnitKind.MMOL_PER_L, slope=2.0)


def test_table_rejects_duplicate_rules():
    rule = ConversionRule("x", UnitKind.MMOL_PER_L, UnitKind.MG_PER_DL, slope=18.0)
    reverse = ConversionRule("x", UnitKind.MG_PER_DL, UnitKind.MMOL_PER_L, slope=1 / 18.0)
    with pytest.raises(ValueError, match="duplicate"):
        ConversionTable([rule, rule])
    with pytest.raises(ValueError, match="duplicate"):
        ConversionTable([rule, reverse])


def test_supported_units_lists_reachable_units(table):
    units = table.supported_units("glucose", UnitKind.MMOL_PER_L)
    assert UnitKind.MMOL_PER_L in units
    assert UnitKind.MG_PER_DL in units
    assert table.supported_units("egfr", UnitKind.ML_PER_MIN_PER_1_73M2) == [UnitKind.ML_PER_MIN_PER_1_73M2]
