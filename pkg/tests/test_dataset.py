import math

import numpy as np
import pandas as pd
import pytest

from ActionEffects.dataset import (
    ObservationTable, Schema, VariableSpec, load_table, write_table, validate_schema,
    descriptive_summary, weighted_moments, OVERALL,
)
from ActionEffects.errors import DegenerateArmError, SchemaError, TableError


def _write_csv(path, text):
    path.write_text(text, encoding='utf8')
    return path


def test_schema_config_round_trip(tmp_path, toy_schema):
    path = tmp_path / 'schema.ini'
    toy_schema.to_config(path)
    assert Schema.from_config(path) == toy_schema


def test_schema_config_keeps_level_order_and_case(tmp_path):
    path = _write_csv(tmp_path / 'schema.ini', (
        "[schema]\n"
        "treatment = cross\n"
        "outcome = shot\n"
        "[covariates]\n"
        "Space_Controlled = continuous\n"
        "position = categorical: Forward, Midfielder, Defender\n"
        "ten_minute_warning = binary\n"
    ))
    schema = Schema.from_config(path)
    assert schema.treatment == 'cross'
    assert schema.covariate_names == ['Space_Controlled', 'position', 'ten_minute_warning']
    assert schema.covariate('position').levels == ('Forward', 'Midfielder', 'Defender')
    assert schema.covariate('position').reference_level == 'Forward'


def test_schema_rejects_duplicates_and_bad_kinds():
    with pytest.raises(SchemaError):
        Schema('z', 'z')
    with pytest.raises(SchemaError):
        VariableSpec('x', 'ordinal')
    with pytest.raises(SchemaError):
        VariableSpec('c', 'categorical', ('A',))
    with pytest.raises(SchemaError):
        VariableSpec('c', 'categorical', ('A', 'A'))


def test_schema_file_without_section(tmp_path):
    path = _write_csv(tmp_path / 'schema.ini', "[covariates]\nx = continuous\n")
    with pytest.raises(SchemaError):
        Schema.from_config(path)


def test_load_table_parses_and_orders_rows(tmp_path, toy_schema):
    path = _write_csv(tmp_path / 'data.csv', (
        "z,y,x1,b1,c1,extra\n"
        "1,0.1,0.30000000000000004,1,A,ignored\n"
        "0,2,-1.5,0,C,ignored\n"
        "0,3.25, 7 ,1,B,ignored\n"
    ))
    table = load_table(path, toy_schema)
    assert table.n == 3
    assert list(table.unit_ids) == [0, 1, 2]
    assert list(table.z) == [1, 0, 0]
    # exact decimal to double conversion
    assert table.frame['x1'].iloc[0] == 0.30000000000000004
    assert table.frame['x1'].iloc[2] == 7.0
    assert list(table.frame['c1']) == ['A', 'C', 'B']
    assert table.arm_counts == (1, 2)


def test_load_table_missing_file(tmp_path, toy_schema):
    with pytest.raises(FileNotFoundError):
        load_table(tmp_path / 'missing.csv', toy_schema)


def test_load_table_missing_column(tmp_path, toy_schema):
    path = _write_csv(tmp_path / 'data.csv', "z,y,x1,b1\n1,0,0,0\n0,1,1,1\n")
    with pytest.raises(TableError) as info:
        load_table(path, toy_schema)
    assert [v.column for v in info.value.violations] == ['c1']


def test_load_table_non_binary_treatment(tmp_path, toy_schema):
    path = _write_csv(tmp_path / 'data.csv', "z,y,x1,b1,c1\n1,0,0,0,A\n2,1,1,1,B\n0,1,1,1,C\n")
    with pytest.raises(TableError) as info:
        load_table(path, toy_schema)
    assert any('treatment not binary' in v.reason and v.row == 1 for v in info.value.violations)


def test_load_table_empty_arm(tmp_path, toy_schema):
    path = _write_csv(tmp_path / 'data.csv', "z,y,x1,b1,c1\n1,0,0,0,A\n1,1,1,1,B\n")
    with pytest.raises(DegenerateArmError) as info:
        load_table(path, toy_schema)
    assert [v.reason for v in info.value.violations] == ['arm 0 empty']


@pytest.mark.parametrize('content', [
    b"z,y,x1,b1,c1\n1,0,\xff,0,A\n0,1,1,1,B\n",
    b"z,y,x1,b1,c1\n1,0,0,0,A\n0,1,1,1,B,7,8\n",
    b"",
], ids=['invalid-utf8', 'ragged-row', 'empty-file'])
def test_load_table_malformed_file(tmp_path, toy_schema, content):
    path = tmp_path / 'data.csv'
    path.write_bytes(content)
    with pytest.raises(TableError) as info:
        load_table(path, toy_schema)
    assert 'data.csv' in str(info.value)
    assert len(info.value.violations) == 1 and info.value.violations[0].row is None


def test_load_table_reports_every_bad_cell(tmp_path, toy_schema):
    path = _write_csv(tmp_path / 'data.csv', (
        "z,y,x1,b1,c1\n"
        "1,abc,0,0,A\n"
        "0,1,,2,D\n"
        "0,1,inf,1,\n"
    ))
    with pytest.raises(TableError) as info:
        load_table(path, toy_schema)
    found = {(v.row, v.column) for v in info.value.violations}
    assert {(0, 'y'), (1, 'x1'), (1, 'b1'), (1, 'c1'), (2, 'x1'), (2, 'c1')} <= found


def test_write_table_round_trip(tmp_path, toy_table):
    path = tmp_path / 'data.csv'
    write_table(toy_table, path)
    loaded = load_table(path, toy_table.schema)
    pd.testing.assert_frame_equal(loaded.frame, toy_table.frame)


def test_validate_schema_returns_violations(toy_schema, toy_frame):
    frame = toy_frame.copy()
    frame.loc[3, 'c1'] = 'Z'
    frame.loc[4, 'y'] = math.nan
    violations = validate_schema(ObservationTable(toy_schema, frame))
    assert {(v.row, v.column) for v in violations} == {(3, 'c1'), (4, 'y')}
    assert validate_schema(ObservationTable.from_frame(toy_schema, toy_frame)) == []


def test_take_reassigns_unit_ids(toy_table):
    resample = toy_table.take([5, 5, 0])
    assert resample.n == 3
    assert list(resample.unit_ids) == [0, 1, 2]
    assert list(resample.y) == [2.0, 2.0, 2.5]
    assert toy_table.n == 8


def test_weighted_moments_unit_weights_match_sample_sd():
    x = np.array([1.0, 2.0, 4.0, 7.0])
    mean, sd = weighted_moments(x, np.ones(4))
    assert mean == pytest.approx(3.5)
    assert sd == pytest.approx(np.std(x, ddof=1))


def test_weighted_moments_scale_invariant():
    x = np.array([0.5, 1.5, -2.0, 3.0, 0.0])
    assert weighted_moments(x, np.full(5, 2.0)) == pytest.approx(weighted_moments(x, np.ones(5)))
    w = np.array([0.5, 1.0, 1.5, 0.25, 2.0])
    assert weighted_moments(x, 3 * w) == pytest.approx(weighted_moments(x, w))


def test_weighted_moments_single_unit():
    assert weighted_moments([4.0], [1.0]) == (4.0, 0.0)


def test_descriptive_summary(toy_table):
    summary = descriptive_summary(toy_table)
    assert summary.n == {OVERALL: 8.0, 0: 4.0, 1: 4.0}

    x1 = summary['x1'].strata
    treated = np.array([0.3, 1.1, 2.2, 0.9])
    assert x1[1].mean == pytest.approx(treated.mean())
    assert x1[1].sd == pytest.approx(treated.std(ddof=1))

    b1 = summary['b1'].strata
    assert b1[1].counts == {'0': 1.0, '1': 3.0}
    assert b1[1].percents['1'] == pytest.approx(75.0)
    assert b1[OVERALL].mean == pytest.approx(0.5)

    c1 = summary['c1'].strata
    assert c1[0].counts == {'A': 2.0, 'B': 1.0, 'C': 1.0}
    assert sum(c1[OVERALL].percents.values()) == pytest.approx(100.0)


def test_descriptive_summary_weights(toy_table):
    doubled = descriptive_summary(toy_table, weights=np.full(8, 2.0))
    plain = descriptive_summary(toy_table)
    assert doubled['x1'].strata[0].sd == pytest.approx(plain['x1'].strata[0].sd)
    assert doubled.n[1] == 8.0
    assert doubled['c1'].strata[1].percents == pytest.approx(plain['c1'].strata[1].percents)


def test_descriptive_summary_zero_weight_arm(toy_table):
    weights = np.where(toy_table.z == 1, 0.0, 1.0)
    with pytest.raises(DegenerateArmError):
        descriptive_summary(toy_table, weights=weights)


def test_summary_records_cover_every_stratum(toy_table):
    records = descriptive_summary(toy_table).records()
    assert {r['arm'] for r in records} == {'overall', '0', '1'}
    levels = {(r['variable'], r['level']) for r in records}
    assert ('c1', 'B') in levels and ('b1', '1') in levels and ('x1', '') in levels
