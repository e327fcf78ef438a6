import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

__all__ = ['ArmOverlap', 'OverlapReport', 'overlap_report']

logger = logging.getLogger(__name__)

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
POOR_OVERLAP_FRACTION = 0.05


@dataclass(frozen=True)
class ArmOverlap:
    arm: int
    n: int
    below: int
    above: int
    minimum: float
    maximum: float
    quantiles: Dict[float, float]

    @property
    def outside(self):
        return self.below + self.above

    @property
    def outside_fraction(self):
        return self.outside / self.n if self.n else 0.0


@dataclass(frozen=True)
class OverlapReport:
    """Propensity score positivity diagnostics per treatment arm."""
    thresholds: Tuple[float, float]
    arms: Tuple[ArmOverlap, ArmOverlap]
    poor_overlap: bool

    def records(self):
        records = []
        for arm in self.arms:
            record = {'arm': arm.arm, 'n': arm.n, 'lower_threshold': self.thresholds[0],
                      'upper_threshold': self.thresholds[1], 'below': arm.below,
                      'above': arm.above, 'outside_fraction': arm.outside_fraction,
                      'min': arm.minimum, 'max': arm.maximum}
            record.update({'q{:02d}'.format(int(round(q * 100))): v
                           for q, v in arm.quantiles.items()})
            record['poor_overlap'] = self.poor_overlap
            records.append(record)
        return records


def overlap_report(scores, z, thresholds=(0.01, 0.99)):
    """
    Counts, per arm, the units whose propensity score lies below thresholds[0]
    or above thresholds[1], and summarizes each arm's score distribution.
    Overlap is flagged as poor when more than 5% of any arm lies outside.

    :param scores: Propensity scores aligned with z.
    :param z: Treatment vector of 0/1 values.
    :param thresholds: (lo, hi) positivity thresholds.
    :rtype: OverlapReport
    """
    scores = np.asarray(scores, dtype=float)
    z = np.asarray(z, dtype=int)
    lo, hi = thresholds
    if scores.shape != z.shape:
        raise ValueError("scores and z must be aligned ({} vs {}).".format(scores.shape, z.shape))
    if not lo < hi:
        raise ValueError("thresholds must satisfy lo < hi (got {}).".format(thresholds))

    arms = []
    for arm in (0, 1):
        s = scores[z == arm]
        if len(s):
            quantiles = {q: float(v) for q, v in zip(QUANTILES, np.quantile(s, QUANTILES))}
            minimum, maximum = float(s.min()), float(s.max())
        else:
            quantiles = {q: float('nan') for q in QUANTILES}
            minimum = maximum = float('nan')
        arms.append(ArmOverlap(arm, int(len(s)), int(np.sum(s < lo)), int(np.sum(s > hi)),
                               minimum, maximum, quantiles))

    poor = any(a.outside_fraction > POOR_OVERLAP_FRACTION for a in arms)
    if poor:
        logger.warning("Poor overlap: %s of units outside [%g, %g].",
                       ', '.join("arm {} {:.1%}".format(a.arm, a.outside_fraction) for a in arms),
                       lo, hi)
    return OverlapReport((float(lo), float(hi)), tuple(arms), poor)
