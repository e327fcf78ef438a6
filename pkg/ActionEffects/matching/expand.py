from dataclasses import dataclass

import numpy as np
import pandas as pd

from .structures import MatchResult

__all__ = ['WeightedSample', 'expand_matched_sample']


@dataclass(frozen=True)
class WeightedSample:
    """
    Weighted two-arm sample built from matched pairs. Row r holds the
    covariates of unit source_ids[r], counted in arm z[r] with weight
    weights[r]. Accepted by dataset.descriptive_summary.
    """
    schema: object
    frame: pd.DataFrame
    z: np.ndarray
    weights: np.ndarray
    source_ids: np.ndarray

    @property
    def arm_totals(self):
        """(weight total of arm 1, weight total of arm 0)"""
        return float(self.weights[self.z == 1].sum()), float(self.weights[self.z == 0].sum())


def expand_matched_sample(table, match_result: MatchResult):
    """
    Expands matched pairs into a weighted two-arm sample: each pair (i, j, w)
    contributes unit i's row to i's arm and unit j's row to the opposite arm,
    both with weight w. Per-arm weight totals therefore both equal the number
    of matched focal units.

    :param table: dataset.ObservationTable the match was computed on.
    :param match_result: MatchResult.
    :rtype: WeightedSample
    """
    if match_result.n_units != table.n:
        raise ValueError("Match result covers {} units but the table has {}."
                         .format(match_result.n_units, table.n))
    source_ids = np.concatenate([match_result.focal_ids, match_result.match_ids])
    weights = np.concatenate([match_result.weights, match_result.weights])
    z = table.z[source_ids]
    frame = table.frame.iloc[source_ids].reset_index(drop=True)
    return WeightedSample(table.schema, frame, z, weights, source_ids)
