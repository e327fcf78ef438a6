import numpy as np

from ..bases import BaseMatcher
from .replacement_matcher import ReplacementMatcher

__all__ = ['GreedyMatcher']


class GreedyMatcher(BaseMatcher):
    def matcher(self, scores, focal_ids, candidate_ids, spec, **kwargs):
        """
        Greedy one-to-one matching without replacement. Focal units are visited
        in ascending order of their minimum distance to the full candidate set
        (ties broken by unit_id); each takes the closest still-available
        candidate (lowest unit_id among exact ties), which is then consumed.
        Ties are never shared. A focal unit whose closest available candidate
        lies beyond spec.caliper is left unmatched.

        :param scores: Propensity scores of all units.
        :param focal_ids: Sorted ids of the focal units.
        :param candidate_ids: Sorted ids of the candidate units.
        :param spec: MatchSpec.
        :rtype: generator
        """
        sorted_scores = np.sort(scores[candidate_ids], kind='stable')
        nearest = ReplacementMatcher.min_distances(sorted_scores, scores[focal_ids])
        visit_order = focal_ids[np.lexsort((focal_ids, nearest))]

        candidate_scores = scores[candidate_ids]
        available = np.ones(len(candidate_ids), dtype=bool)
        for focal_id in visit_order.tolist():
            open_positions = np.flatnonzero(available)
            distances = np.abs(scores[focal_id] - candidate_scores[open_positions])
            d_min = distances.min()
            if spec.caliper is not None and d_min > spec.caliper:
                continue
            # candidate_ids are sorted, so the first exact minimum has the lowest id
            position = open_positions[np.flatnonzero(distances == d_min)[0]]
            available[position] = False
            yield focal_id, int(candidate_ids[position]), 1.0
