from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .schema import BINARY, CATEGORICAL, CONTINUOUS
from ..errors import DegenerateArmError

__all__ = [
    'ArmStats',
    'VariableSummary',
    'Summary',
    'OVERALL',
    'descriptive_summary',
    'weighted_moments',
]

OVERALL = 'overall'
STRATA = (OVERALL, 0, 1)


@dataclass(frozen=True)
class ArmStats:
    """
    Weighted statistics of one variable within one stratum. 'n' is the weight
    total. Continuous and binary variables fill mean/sd (the binary mean is the
    proportion of ones); binary and categorical variables fill counts/percents
    keyed by level.
    """
    n: float
    mean: Optional[float] = None
    sd: Optional[float] = None
    counts: Dict[str, float] = field(default_factory=dict)
    percents: Dict[str, float] = field(default_factory=dict)

    def proportions(self, levels):
        return np.array([self.counts.get(level, 0.0) / self.n for level in levels])


@dataclass(frozen=True)
class VariableSummary:
    variable: str
    kind: str
    levels: tuple
    strata: Dict[object, ArmStats]


@dataclass(frozen=True)
class Summary:
    """Per-variable statistics stratified by arm (0, 1) and overall."""
    n: Dict[object, float]
    variables: List[VariableSummary]

    def __getitem__(self, variable):
        for summary in self.variables:
            if summary.variable == variable:
                return summary
        raise KeyError(variable)

    def records(self):
        """
        Flattens the summary into one record per (variable, level, stratum);
        continuous variables use an empty level.

        :rtype: list of dict
        """
        records = [{'variable': 'n', 'level': '', 'arm': str(s), 'n': self.n[s],
                    'mean': None, 'sd': None, 'count': None, 'percent': None}
                   for s in STRATA]
        for summary in self.variables:
            for stratum in STRATA:
                stats = summary.strata[stratum]
                if summary.kind == CONTINUOUS:
                    records.append({'variable': summary.variable, 'level': '', 'arm': str(stratum),
                                    'n': stats.n, 'mean': stats.mean, 'sd': stats.sd,
                                    'count': None, 'percent': None})
                    continue
                for level in summary.levels:
                    records.append({'variable': summary.variable, 'level': level,
                                    'arm': str(stratum), 'n': stats.n,
                                    'mean': stats.mean if summary.kind == BINARY else None,
                                    'sd': stats.sd if summary.kind == BINARY else None,
                                    'count': stats.counts[level],
                                    'percent': stats.percents[level]})
        return records


def weighted_moments(x, w):
    """
    Returns the weighted mean and standard deviation of x.

    The variance uses the reliability-weight denominator
    sum(w) - sum(w**2)/sum(w), which equals n - 1 for unit weights (the sample
    SD) and is unchanged when every weight is multiplied by the same constant.
    A non-positive denominator (a single effective unit) gives SD 0.

    :param x: Values.
    :param w: Non-negative weights, same length as x, positive total.
    :rtype: tuple (float, float)
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    total = w.sum()
    mean = float(np.dot(w, x) / total)
    denominator = total - np.dot(w, w) / total
    if denominator <= 0:
        return mean, 0.0
    variance = float(np.dot(w, (x - mean) ** 2) / denominator)
    return mean, float(np.sqrt(max(variance, 0.0)))


def descriptive_summary(table, weights=None):
    """
    Computes weighted per-variable statistics stratified by treatment arm and
    overall: mean and SD for continuous covariates, weighted counts and
    percentages per level for binary and categorical covariates.

    :param table: ObservationTable, or a matched sample exposing 'schema',
                  'frame', 'z' and 'weights' (see matching.expand_matched_sample).
    :param weights: Optional non-negative per-row weights (length N). Defaults
                    to the sample's own weights if it has them, else all ones.
    :raises DegenerateArmError if an arm has zero total weight.
    :raises ValueError if weights have the wrong length or are negative.
    :rtype: Summary
    """
    schema, frame, z = table.schema, table.frame, np.asarray(table.z, dtype=int)
    if weights is None:
        weights = getattr(table, 'weights', None)
    w = np.ones(len(frame)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(frame),):
        raise ValueError("weights must have length {} (got {}).".format(len(frame), w.shape))
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative.")

    masks = {OVERALL: np.ones(len(frame), dtype=bool), 0: z == 0, 1: z == 1}
    n = {stratum: float(w[mask].sum()) for stratum, mask in masks.items()}
    for arm in (0, 1):
        if n[arm] <= 0:
            raise DegenerateArmError("arm {} has zero total weight".format(arm))

    variables = []
    for spec in schema.covariates:
        column = frame[spec.name]
        strata = {}
        if spec.kind == CONTINUOUS:
            levels = ()
            x = column.to_numpy(dtype=float)
            for stratum, mask in masks.items():
                mean, sd = weighted_moments(x[mask], w[mask])
                strata[stratum] = ArmStats(n[stratum], mean, sd)
        elif spec.kind == BINARY:
            levels = ('0', '1')
            x = column.to_numpy(dtype=float)
            for stratum, mask in masks.items():
                mean, sd = weighted_moments(x[mask], w[mask])
                counts = {'0': float(w[mask & (x == 0)].sum()), '1': float(w[mask & (x == 1)].sum())}
                strata[stratum] = ArmStats(n[stratum], mean, sd, counts,
                                           _percents(counts, n[stratum]))
        else:
            levels = spec.levels
            x = column.astype(str).to_numpy()
            for stratum, mask in masks.items():
                counts = {level: float(w[mask & (x == level)].sum()) for level in levels}
                strata[stratum] = ArmStats(n[stratum], counts=counts,
                                           percents=_percents(counts, n[stratum]))
        variables.append(VariableSummary(spec.name, spec.kind, tuple(levels), strata))
    return Summary(n, variables)


def _percents(counts, total):
    return {level: 100.0 * count / total for level, count in counts.items()}
