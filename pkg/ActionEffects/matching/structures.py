import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

__all__ = ['Estimand', 'MatchSpec', 'MatchResult']


class Estimand(str, enum.Enum):
    """
    Target population of the effect: all units (ATE), treated units (ATT) or
    untreated units (ATNT).
    """
    ATE = 'ATE'
    ATT = 'ATT'
    ATNT = 'ATNT'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError("Unknown estimand '{}'; expected one of ate, att, atnt."
                             .format(value)) from None

    def focal_mask(self, z):
        """Boolean mask of the units whose effects this estimand averages."""
        z = np.asarray(z, dtype=int)
        if self is Estimand.ATT:
            return z == 1
        if self is Estimand.ATNT:
            return z == 0
        return np.ones(len(z), dtype=bool)

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MatchSpec:
    """
    Nearest-neighbor matching options. Distances are absolute differences of
    propensity scores; candidates within 'tie_tolerance' of the minimum
    distance are tied. 'caliper' caps the minimum distance of a focal unit.
    """
    with_replacement: bool = True
    allow_ties: bool = True
    tie_tolerance: float = 1e-8
    caliper: Optional[float] = None

    def __post_init__(self):
        if self.tie_tolerance < 0:
            raise ValueError("tie_tolerance must be >= 0 (got {}).".format(self.tie_tolerance))
        if self.caliper is not None and not self.caliper > 0:
            raise ValueError("caliper must be > 0 when given (got {}).".format(self.caliper))


@dataclass(frozen=True)
class MatchResult:
    """
    Matched pairs as parallel arrays sorted by (focal_id, match_id). Each
    matched focal unit's weights sum to 1. k_counts[j] is the total weight
    with which unit j serves as a match. 'unmatched' lists focal units
    excluded by the caliper.
    """
    focal_ids: np.ndarray
    match_ids: np.ndarray
    weights: np.ndarray
    k_counts: np.ndarray
    estimand: Estimand
    unmatched: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def pairs(self):
        """List of (focal_id, match_id, weight) triples."""
        return list(zip(self.focal_ids.tolist(), self.match_ids.tolist(), self.weights.tolist()))

    @property
    def n_units(self):
        return len(self.k_counts)

    @property
    def matched_focal_ids(self):
        return np.unique(self.focal_ids)

    @property
    def n_matched(self):
        return len(self.matched_focal_ids)

    def __len__(self):
        return len(self.focal_ids)

    def records(self):
        return [{'focal_id': f, 'match_id': m, 'weight': w} for f, m, w in self.pairs]

    def k_count_records(self):
        return [{'unit_id': i, 'k_count': float(k)} for i, k in enumerate(self.k_counts)]
