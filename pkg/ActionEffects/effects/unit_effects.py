import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..errors import EstimationError
from ..matching import Estimand, MatchResult

__all__ = ['UnitEffects', 'unit_effects', 'point_estimate']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitEffects:
    """
    Per-focal-unit effect estimates, signed so each estimates Y(1) - Y(0).
    'excluded' lists focal units with no match (caliper exclusions).
    """
    focal_ids: np.ndarray
    focal_arms: np.ndarray
    imputed: np.ndarray
    tau: np.ndarray
    excluded: Tuple[int, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.tau)


def unit_effects(match_result: MatchResult, y, z):
    """
    Imputes each focal unit's missing potential outcome as the weighted mean
    outcome of its matches and returns tau_i = Y_i - imputed for treated focal
    units and imputed - Y_i for control focal units.

    :param match_result: MatchResult.
    :param y: Outcome vector.
    :param z: Treatment vector.
    :rtype: UnitEffects
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=int)
    if not (len(y) == len(z) == match_result.n_units):
        raise ValueError("y, z and the match result must cover the same units.")

    focal_ids, inverse = np.unique(match_result.focal_ids, return_inverse=True)
    imputed = np.bincount(inverse, weights=match_result.weights * y[match_result.match_ids],
                          minlength=len(focal_ids))
    arms = z[focal_ids]
    tau = np.where(arms == 1, y[focal_ids] - imputed, imputed - y[focal_ids])

    if match_result.unmatched:
        logger.warning("%d unmatched focal unit(s) excluded from the effect estimate.",
                       len(match_result.unmatched))
    return UnitEffects(focal_ids, arms, imputed, tau, tuple(match_result.unmatched))


def point_estimate(effects: UnitEffects, estimand=Estimand.ATT):
    """
    Mean of the unit effects over the focal set of the estimand.

    :param effects: UnitEffects.
    :param estimand: Estimand the unit effects were matched for.
    :raises EstimationError if the focal set is empty or the unit effects
            contain units outside the estimand's focal arm.
    :rtype: float
    """
    estimand = Estimand.parse(estimand)
    if len(effects) == 0:
        raise EstimationError("Cannot estimate {}: empty focal set.".format(estimand))
    if not np.all(estimand.focal_mask(effects.focal_arms)):
        raise EstimationError("Unit effects include units outside the {} focal set."
                              .format(estimand))
    return float(np.mean(effects.tau))
