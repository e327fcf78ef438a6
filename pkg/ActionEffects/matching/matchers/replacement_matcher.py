import numpy as np

from ..bases import BaseMatcher

__all__ = ['ReplacementMatcher']

# Window padding for the sorted-score search; the exact distance test below
# decides membership.
_WINDOW_SLACK = 1e-9


class ReplacementMatcher(BaseMatcher):
    def matcher(self, scores, focal_ids, candidate_ids, spec, **kwargs):
        """
        Nearest-neighbor matching with replacement. Every focal unit is matched
        to the candidate(s) at minimum score distance; with ties allowed, all
        candidates within spec.tie_tolerance of that minimum are kept with
        equal weight 1/m, otherwise the lowest unit_id among the exact minima.
        A focal unit whose minimum distance exceeds spec.caliper yields nothing.

        :param scores: Propensity scores of all units.
        :param focal_ids: Sorted ids of the focal units.
        :param candidate_ids: Sorted ids of the candidate units.
        :param spec: MatchSpec.
        :rtype: generator
        """
        order = np.argsort(scores[candidate_ids], kind='stable')
        sorted_scores = scores[candidate_ids][order]
        sorted_ids = candidate_ids[order]
        focal_scores = scores[focal_ids]

        nearest = self.min_distances(sorted_scores, focal_scores)
        bounds = nearest + spec.tie_tolerance if spec.allow_ties else nearest
        lows = np.searchsorted(sorted_scores, focal_scores - bounds - _WINDOW_SLACK, side='left')
        highs = np.searchsorted(sorted_scores, focal_scores + bounds + _WINDOW_SLACK, side='right')

        for focal_id, e, d_min, bound, lo, hi in zip(focal_ids.tolist(), focal_scores, nearest,
                                                     bounds, lows, highs):
            if spec.caliper is not None and d_min > spec.caliper:
                continue
            window_ids = sorted_ids[lo:hi]
            distances = np.abs(e - sorted_scores[lo:hi])
            if spec.allow_ties:
                chosen = np.sort(window_ids[distances <= bound])
            else:
                chosen = [window_ids[distances == d_min].min()]
            weight = 1.0 / len(chosen)
            for match_id in chosen:
                yield focal_id, int(match_id), weight

    @staticmethod
    def min_distances(sorted_scores, focal_scores):
        """
        Minimum |e - s| over the sorted candidate scores for every focal score;
        the minimum is always at one of the two sorted neighbors of e.

        :rtype: numpy.ndarray
        """
        positions = np.searchsorted(sorted_scores, focal_scores, side='left')
        above = sorted_scores[np.minimum(positions, len(sorted_scores) - 1)]
        below = sorted_scores[np.maximum(positions - 1, 0)]
        return np.minimum(np.abs(focal_scores - above), np.abs(focal_scores - below))
