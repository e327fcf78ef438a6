import numpy as np

from .unit_effects import unit_effects, point_estimate
from ..errors import EstimationError
from ..matching import Estimand, MatchResult

__all__ = ['ai_standard_error', 'same_arm_neighbors', 'conditional_variances']


def same_arm_neighbors(scores, z):
    """
    For every unit, the unit of the same arm (other than itself) with the
    closest propensity score; exact distance ties go to the lowest unit_id.

    :param scores: Propensity scores.
    :param z: Treatment vector.
    :raises EstimationError if an arm has fewer than two units.
    :rtype: numpy.ndarray
    """
    scores = np.asarray(scores, dtype=float)
    z = np.asarray(z, dtype=int)
    neighbors = np.empty(len(z), dtype=int)
    for arm in (0, 1):
        ids = np.flatnonzero(z == arm)
        if len(ids) < 2:
            raise EstimationError("Arm {} has {} unit(s); the within-arm outcome variance "
                                  "needs at least 2.".format(arm, len(ids)))
        order = np.argsort(scores[ids], kind='stable')
        sorted_ids, sorted_scores = ids[order], scores[ids][order]
        gaps = np.abs(np.diff(sorted_scores))
        left = np.concatenate([[np.inf], gaps])
        right = np.concatenate([gaps, [np.inf]])
        nearest = np.minimum(left, right)
        for position, unit in enumerate(sorted_ids.tolist()):
            e, d_min = sorted_scores[position], nearest[position]
            lo = np.searchsorted(sorted_scores, e - d_min - 1e-9, side='left')
            hi = np.searchsorted(sorted_scores, e + d_min + 1e-9, side='right')
            window = sorted_ids[lo:hi]
            distances = np.abs(e - sorted_scores[lo:hi])
            candidates = window[(distances <= d_min) & (window != unit)]
            neighbors[unit] = candidates.min()
    return neighbors


def conditional_variances(y, z, scores):
    """
    sigma_i^2 = (Y_i - Y_l(i))^2 / 2 with l(i) the nearest same-arm neighbor
    by propensity score.

    :rtype: numpy.ndarray
    """
    y = np.asarray(y, dtype=float)
    return 0.5 * (y - y[same_arm_neighbors(scores, z)]) ** 2


def ai_standard_error(match_result: MatchResult, y, z, scores, estimand=None):
    """
    Abadie-Imbens-type standard error of a one-to-one matching estimator
    with replacement:

        V = [ sum_focal (tau_i - tau)^2 + sum_j max(K_j (K_j - 1), 0) sigma_j^2 ] / n^2

    where n is the number of matched focal units, K_j the match-usage
    counts and sigma_j^2 the within-arm nearest-neighbor outcome variance.
    Units never used as matches have K_j = 0, so the correction runs over
    controls for ATT, treated units for ATNT and all units for ATE.

    :param match_result: MatchResult (with replacement, one match or ties).
    :param y: Outcome vector.
    :param z: Treatment vector.
    :param scores: Propensity scores used for matching.
    :param estimand: Defaults to match_result.estimand.
    :raises EstimationError if an arm has a single unit.
    :rtype: float
    """
    estimand = Estimand.parse(estimand or match_result.estimand)
    effects = unit_effects(match_result, y, z)
    tau = point_estimate(effects, estimand)
    sigma2 = conditional_variances(y, z, scores)

    k = match_result.k_counts
    reuse = np.maximum(k * (k - 1), 0.0)
    n = len(effects)
    variance = (np.sum((effects.tau - tau) ** 2) + np.sum(reuse * sigma2)) / n ** 2
    return float(np.sqrt(max(variance, 0.0)))
