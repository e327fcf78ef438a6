import math

import numpy as np
import pandas as pd
import pytest

from ActionEffects.balance import (
    balance_table, format_smd, overlap_coefficient, ps_histogram, smd_binary, smd_categorical,
    smd_continuous, IMBALANCE_THRESHOLD, PROPENSITY_ROW,
)
from ActionEffects.effects import fit_propensity
from ActionEffects.matching import Estimand, MatchSpec, nearest_neighbor_match
from ActionEffects.propensity import overlap_report
from ActionEffects.synthlab import generate, get_scenario

# (mean, SD) of crossing plays: (cross, no cross), reference SMD
REFERENCE_CONTINUOUS = [
    ((-0.06, 1.11), (0.03, 1.20), 8.13, 1.0),
    ((3.93, 2.28), (2.49, 1.78), 70.06, 1.0),
    ((0.79, 0.29), (0.54, 0.37), 75.51, 1.0),
    ((13.37, 5.92), (9.68, 5.05), 66.98, 1.0),
    ((14.29, 8.61), (23.21, 8.82), 102.33, 1.0),
    # two-decimal means move this row by about 2 points
    ((0.43, 0.21), (0.20, 0.28), 90.87, 2.5),
]


@pytest.mark.parametrize('treated, control, reference, tolerance', REFERENCE_CONTINUOUS)
def test_continuous_smd_from_rounded_moments(treated, control, reference, tolerance):
    assert smd_continuous(treated[0], treated[1], control[0], control[1]) == \
        pytest.approx(reference, abs=tolerance)


def test_categorical_smd_from_counts():
    cross = np.array([111, 323, 258]) / 692
    no_cross = np.array([501, 669, 363]) / 1533
    assert smd_categorical(cross, no_cross) == pytest.approx(42.96, abs=1.0)


def test_binary_smd_from_counts():
    assert smd_binary(201 / 692, 352 / 1533) == pytest.approx(13.90, abs=1.0)


def test_categorical_two_levels_reduces_to_binary():
    rng = np.random.default_rng(17)
    for _ in range(20):
        p1, p0 = rng.uniform(0.05, 0.95, 2)
        assert smd_categorical([1 - p1, p1], [1 - p0, p0]) == pytest.approx(smd_binary(p1, p0))


def test_categorical_matches_direct_solve():
    rng = np.random.default_rng(23)
    for _ in range(20):
        p1, p0 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        q1, q0 = p1[1:], p0[1:]
        S = np.array([[(q1[k] * ((k == l) - q1[l]) + q0[k] * ((k == l) - q0[l])) / 2
                       for l in range(2)] for k in range(2)])
        d = q1 - q0
        expected = 100 * math.sqrt(d @ np.linalg.solve(S, d))
        assert smd_categorical(p1, p0) == pytest.approx(expected, rel=1e-9)


def test_smd_symmetry():
    assert smd_continuous(1.0, 2.0, 0.0, 1.0) == smd_continuous(0.0, 1.0, 1.0, 2.0)
    assert smd_binary(0.3, 0.6) == smd_binary(0.6, 0.3)
    p1, p0 = [0.2, 0.5, 0.3], [0.4, 0.4, 0.2]
    assert smd_categorical(p1, p0) == pytest.approx(smd_categorical(p0, p1))


def test_smd_degenerate_cases():
    assert smd_continuous(1.0, 0.0, 1.0, 0.0) == 0.0
    assert smd_continuous(1.0, 0.0, 0.0, 0.0) == math.inf
    assert smd_binary(1.0, 0.0) == math.inf
    assert smd_binary(0.5, 0.5) == 0.0
    assert smd_categorical([0, 1], [1, 0]) == math.inf
    assert smd_categorical([0.5, 0.5, 0.0], [0.5, 0.5, 0.0]) == 0.0
    assert format_smd(math.inf) == 'Inf'
    assert format_smd(12.3456) == '12.35'
    with pytest.raises(ValueError):
        smd_categorical([0.5, 0.6], [0.5, 0.5])


def test_pre_match_balance_table(toy_table):
    table = balance_table(toy_table)
    assert not table.matched
    assert [row.variable for row in table.rows] == ['x1', 'b1', 'c1']
    x1 = table['x1']
    assert x1.smd_percent == pytest.approx(smd_continuous(
        x1.arm_stats[1].mean, x1.arm_stats[1].sd, x1.arm_stats[0].mean, x1.arm_stats[0].sd))
    assert table['b1'].smd_percent == pytest.approx(smd_binary(0.75, 0.25))
    assert table.n == {'overall': 8.0, 0: 4.0, 1: 4.0}


def test_balance_records_layout(toy_table):
    records = balance_table(toy_table, scores=np.linspace(0.2, 0.8, 8)).records()
    assert records[0]['variable'] == 'n' and records[0]['n_1'] == 4.0
    keys = [(r['variable'], r['level']) for r in records]
    assert keys == [('n', ''), ('x1', ''), ('b1', '1'), ('c1', ''), ('c1', 'A'), ('c1', 'B'),
                    ('c1', 'C'), (PROPENSITY_ROW, '')]
    level_b = records[5]
    assert level_b['count_0'] == 1.0 and level_b['percent_0'] == pytest.approx(25.0)
    assert level_b['smd_percent'] is None
    assert records[3]['smd_percent'] == pytest.approx(balance_table(toy_table)['c1'].smd_percent)


def test_perfect_match_is_balanced(toy_table):
    """Every treated unit matched to a copy of itself in the control arm: zero SMD."""
    frame = toy_table.frame.copy()
    twins = frame.copy()
    twins['z'] = 1 - twins['z']
    doubled = type(toy_table).from_frame(toy_table.schema, pd.concat([frame, twins], ignore_index=True))
    scores = np.tile(np.linspace(0.1, 0.9, 8), 2)
    result = nearest_neighbor_match(scores, doubled.z, MatchSpec(), Estimand.ATE)
    table = balance_table(doubled, result, scores)
    assert table.matched and table.estimand == 'ATE'
    assert table.max_smd == pytest.approx(0.0, abs=1e-9)
    assert table.flagged == []


@pytest.mark.parametrize('estimand', [Estimand.ATE, Estimand.ATT])
def test_matching_removes_strong_confounding(estimand):
    table, _ = generate(get_scenario('strong_confounding'))
    _, _, scores = fit_propensity(table)
    pre = balance_table(table, scores=scores)
    result = nearest_neighbor_match(scores, table.z, MatchSpec(), estimand)
    post = balance_table(table, result, scores)
    assert pre.max_smd > 50
    assert post.max_smd < IMBALANCE_THRESHOLD


def test_weak_overlap_scenario_is_flagged():
    table, _ = generate(get_scenario('weak_overlap'))
    _, _, scores = fit_propensity(table)
    assert overlap_report(scores, table.z).poor_overlap


def test_histogram_bins_and_weights():
    scores = np.array([0.05, 0.5, 1.0, 0.55, 0.0])
    z = np.array([0, 0, 1, 1, 1])
    weights = np.array([1.0, 2.0, 0.5, 1.5, 1.0])
    histogram = ps_histogram(scores, z, weights, bins=10)
    assert len(histogram.bin_edges) == 11 and histogram.bin_edges[5] == 0.5
    np.testing.assert_allclose(histogram.counts_arm0, [1, 0, 0, 0, 0, 2, 0, 0, 0, 0])
    np.testing.assert_allclose(histogram.counts_arm1, [1, 0, 0, 0, 0, 1.5, 0, 0, 0, 0.5])
    records = histogram.records('pre')
    assert records[5] == {'stage': 'pre', 'bin_lo': 0.5, 'bin_hi': 0.6,
                          'count_arm0': 2.0, 'count_arm1': 1.5}


def test_overlap_coefficient():
    same = ps_histogram([0.1, 0.1, 0.7, 0.7], [0, 1, 0, 1], bins=10)
    assert overlap_coefficient(same) == pytest.approx(1.0)
    apart = ps_histogram([0.1, 0.9], [0, 1], bins=10)
    assert overlap_coefficient(apart) == 0.0


def test_histogram_default_bins():
    histogram = ps_histogram(np.full(6, 0.5), np.array([0, 1, 0, 1, 1, 0]))
    assert len(histogram.bin_edges) == 31
    assert np.flatnonzero(histogram.counts_arm0).tolist() == [15]
    assert np.flatnonzero(histogram.counts_arm1).tolist() == [15]
    assert histogram.counts_arm0[15] == 3.0 and histogram.counts_arm1[15] == 3.0


def test_matching_raises_overlap_coefficient():
    from ActionEffects.matching import expand_matched_sample

    table, _ = generate(get_scenario('strong_confounding'))
    _, _, scores = fit_propensity(table)
    result = nearest_neighbor_match(scores, table.z, MatchSpec(), Estimand.ATT)
    sample = expand_matched_sample(table, result)
    pre = overlap_coefficient(ps_histogram(scores, table.z))
    post = overlap_coefficient(ps_histogram(scores[sample.source_ids], sample.z, sample.weights))
    assert post > pre
    assert post > 0.85


@pytest.mark.parametrize('factor', [0.01, 2.5, 1000.0])
def test_smd_invariant_to_positive_scaling(toy_table, factor):
    frame = toy_table.frame.copy()
    frame['x1'] = factor * frame['x1']
    scaled = type(toy_table)(toy_table.schema, frame)
    scores = np.array([0.3, 0.2, 0.6, 0.35, 0.25, 0.7, 0.55, 0.4])
    result = nearest_neighbor_match(scores, toy_table.z, MatchSpec(), Estimand.ATT)
    for match_result in (None, result):
        reference = balance_table(toy_table, match_result, scores)['x1'].smd_percent
        assert balance_table(scaled, match_result, scores)['x1'].smd_percent == \
            pytest.approx(reference, rel=1e-9)
