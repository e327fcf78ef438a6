import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .smd import smd_binary, smd_categorical, smd_continuous, IMBALANCE_THRESHOLD
from ..dataset import descriptive_summary, weighted_moments, ArmStats, OVERALL
from ..dataset import BINARY, CATEGORICAL, CONTINUOUS
from ..matching import expand_matched_sample

__all__ = ['BalanceRow', 'BalanceTable', 'balance_table', 'PROPENSITY_ROW']

logger = logging.getLogger(__name__)

PROPENSITY_ROW = 'propensity_score'


@dataclass(frozen=True)
class BalanceRow:
    variable: str
    kind: str
    smd_percent: float
    arm_stats: Dict[object, ArmStats]
    levels: Tuple[str, ...] = ()

    @property
    def flagged(self):
        return self.smd_percent >= IMBALANCE_THRESHOLD


@dataclass(frozen=True)
class BalanceTable:
    """
    Covariate balance between arms: one row per covariate (a categorical
    covariate is one row with per-level statistics) and the weighted per-arm
    sample sizes.
    """
    rows: Tuple[BalanceRow, ...]
    n: Dict[object, float]
    matched: bool
    estimand: Optional[str] = None

    @property
    def flagged(self):
        return [row for row in self.rows if row.flagged]

    @property
    def max_smd(self):
        return max((row.smd_percent for row in self.rows), default=0.0)

    def __getitem__(self, variable):
        for row in self.rows:
            if row.variable == variable:
                return row
        raise KeyError(variable)

    def records(self):
        """
        Flat records in descriptive-table layout: a sample size record, one
        record per continuous/binary covariate and, for categoricals, a
        header record carrying the SMD followed by one record per level.

        :rtype: list of dict
        """
        records = [_record('n', '', None, None, self.n, None)]
        for row in self.rows:
            if row.kind == CATEGORICAL:
                records.append(_record(row.variable, '', row.kind, None, None, row))
                for level in row.levels:
                    records.append(_record(row.variable, level, row.kind, row.arm_stats, None, None))
            elif row.kind == BINARY:
                records.append(_record(row.variable, '1', row.kind, row.arm_stats, None, row))
            else:
                records.append(_record(row.variable, '', row.kind, row.arm_stats, None, row))
        return records


def balance_table(table, match_result=None, scores=None):
    """
    Standardized absolute mean differences (percent) of every covariate
    between arms, before matching (plain table) or after matching (the
    pair-expanded weighted sample of match_result). Rows with SMD >= 10 are
    flagged.

    :param table: dataset.ObservationTable.
    :param match_result: Optional matching.MatchResult computed on 'table'.
    :param scores: Optional propensity scores (one per unit of 'table'); adds
                   a propensity score row.
    :rtype: BalanceTable
    """
    if match_result is not None:
        sample = expand_matched_sample(table, match_result)
        source_ids, weights = sample.source_ids, sample.weights
    else:
        sample = table
        source_ids, weights = np.arange(table.n), np.ones(table.n)

    summary = descriptive_summary(sample, weights=weights)
    rows = []
    for variable in summary.variables:
        arm1, arm0 = variable.strata[1], variable.strata[0]
        if variable.kind == CONTINUOUS:
            smd = smd_continuous(arm1.mean, arm1.sd, arm0.mean, arm0.sd)
        elif variable.kind == BINARY:
            smd = smd_binary(_unit(arm1.mean), _unit(arm0.mean))
        else:
            smd = smd_categorical(arm1.proportions(variable.levels),
                                  arm0.proportions(variable.levels))
        rows.append(BalanceRow(variable.variable, variable.kind, smd, variable.strata,
                               variable.levels))

    if scores is not None:
        rows.append(_score_row(np.asarray(scores, dtype=float)[source_ids],
                               np.asarray(sample.z, dtype=int), weights, summary.n))

    result = BalanceTable(tuple(rows), summary.n, match_result is not None,
                          str(match_result.estimand) if match_result is not None else None)
    if result.matched and result.flagged:
        logger.warning("Residual imbalance after matching (SMD >= %g%%): %s.",
                       IMBALANCE_THRESHOLD,
                       ', '.join("{} {:.2f}".format(r.variable, r.smd_percent) for r in result.flagged))
    return result


def _score_row(scores, z, weights, n):
    strata = {}
    for stratum, mask in ((OVERALL, np.ones(len(z), dtype=bool)), (0, z == 0), (1, z == 1)):
        mean, sd = weighted_moments(scores[mask], weights[mask])
        strata[stratum] = ArmStats(n[stratum], mean, sd)
    smd = smd_continuous(strata[1].mean, strata[1].sd, strata[0].mean, strata[0].sd)
    return BalanceRow(PROPENSITY_ROW, CONTINUOUS, smd, strata)


def _unit(p):
    # weighted proportions can stray from [0, 1] by rounding
    return min(max(p, 0.0), 1.0)


def _record(variable, level, kind, arm_stats, n, row):
    record = {'variable': variable, 'level': level}
    for stratum, suffix in ((OVERALL, 'overall'), (0, '0'), (1, '1')):
        stats = arm_stats[stratum] if arm_stats else None
        record['n_' + suffix] = n[stratum] if n else (stats.n if stats else None)
        if stats is not None and kind == CATEGORICAL:
            record['mean_' + suffix], record['sd_' + suffix] = None, None
            record['count_' + suffix] = stats.counts[level]
            record['percent_' + suffix] = stats.percents[level]
        elif stats is not None and kind == BINARY:
            record['mean_' + suffix], record['sd_' + suffix] = stats.mean, stats.sd
            record['count_' + suffix] = stats.counts['1']
            record['percent_' + suffix] = stats.percents['1']
        elif stats is not None:
            record['mean_' + suffix], record['sd_' + suffix] = stats.mean, stats.sd
            record['count_' + suffix], record['percent_' + suffix] = None, None
        else:
            for key in ('mean_', 'sd_', 'count_', 'percent_'):
                record[key + suffix] = None
    record['smd_percent'] = row.smd_percent if row is not None else None
    record['flag'] = row.flagged if row is not None else None
    return record
