import logging

import numpy as np

from .bases import BaseMatcher
from .matchers import ReplacementMatcher, GreedyMatcher
from .structures import Estimand, MatchSpec, MatchResult
from ..errors import MatchingError

__all__ = ['nearest_neighbor_match', 'compute_k_counts', 'match_directions']

logger = logging.getLogger(__name__)


def match_directions(z, estimand: Estimand):
    """
    Returns the (focal_ids, candidate_ids) pairs searched for an estimand:
    treated -> controls for ATT, controls -> treated for ATNT and both for ATE.

    :rtype: list of tuple
    """
    z = np.asarray(z, dtype=int)
    treated, controls = np.flatnonzero(z == 1), np.flatnonzero(z == 0)
    directions = []
    if estimand in (Estimand.ATE, Estimand.ATT):
        directions.append((treated, controls))
    if estimand in (Estimand.ATE, Estimand.ATNT):
        directions.append((controls, treated))
    return directions


def nearest_neighbor_match(scores, z, spec: MatchSpec = None, estimand=Estimand.ATT,
                           matcher: BaseMatcher = None):
    """
    Pipeline link. One-to-one nearest-neighbor propensity score matching.

    The focal set is every unit (ATE), the treated units (ATT) or the control
    units (ATNT); candidates always come from the opposite arm. The matcher
    defaults to ReplacementMatcher (with replacement, the default spec) or
    GreedyMatcher (spec.with_replacement=False).

    :param scores: Propensity scores in (0, 1), one per unit.
    :param z: Treatment vector of 0/1 values.
    :param spec: MatchSpec; defaults to MatchSpec().
    :param estimand: Estimand (or 'ate'/'att'/'atnt').
    :param matcher: Optional matcher instance. Must inherit from BaseMatcher.
    :raises MatchingError if a candidate arm is empty, or when matching
            without replacement a focal arm is larger than its candidate arm.
    :rtype: MatchResult
    """
    spec = spec or MatchSpec()
    estimand = Estimand.parse(estimand)
    scores = np.asarray(scores, dtype=float)
    z = np.asarray(z, dtype=int)
    if scores.shape != z.shape:
        raise ValueError("scores and z must be aligned ({} vs {}).".format(scores.shape, z.shape))
    if np.any(scores <= 0) or np.any(scores >= 1):
        raise ValueError("Propensity scores must lie strictly between 0 and 1.")

    if matcher is None:
        matcher = ReplacementMatcher() if spec.with_replacement else GreedyMatcher()
    if not isinstance(matcher, BaseMatcher):
        raise ValueError(f"{matcher.__class__.__name__} must inherit from BaseMatcher")

    for arm in (0, 1):
        if not np.any(z == arm):
            raise MatchingError("empty candidate arm: no units with Z={}.".format(arm))

    triples = []
    unmatched = []
    for focal_ids, candidate_ids in match_directions(z, estimand):
        if not spec.with_replacement and len(focal_ids) > len(candidate_ids):
            raise MatchingError("Matching without replacement needs at least as many candidates "
                                "as focal units ({} focal, {} candidates)."
                                .format(len(focal_ids), len(candidate_ids)))
        direction = list(matcher.matcher(scores, focal_ids, candidate_ids, spec))
        matched = {focal_id for focal_id, _, _ in direction}
        unmatched.extend(int(i) for i in focal_ids if int(i) not in matched)
        triples.extend(direction)

    triples.sort(key=lambda t: (t[0], t[1]))
    focal_ids = np.array([t[0] for t in triples], dtype=int)
    match_ids = np.array([t[1] for t in triples], dtype=int)
    weights = np.array([t[2] for t in triples], dtype=float)
    if np.any(z[focal_ids] == z[match_ids]):
        raise MatchingError("Matcher paired units from the same treatment arm.")

    if unmatched:
        logger.warning("%d focal unit(s) exceed the caliper and are unmatched.", len(unmatched))
    logger.debug("Matched %d focal units (%s) with %d pairs.",
                 len(np.unique(focal_ids)), estimand, len(triples))
    return MatchResult(
        focal_ids=focal_ids,
        match_ids=match_ids,
        weights=weights,
        k_counts=compute_k_counts(zip(focal_ids, match_ids, weights), len(z)),
        estimand=estimand,
        unmatched=tuple(sorted(unmatched)),
    )


def compute_k_counts(pairs, n):
    """
    K_j = total weight of the pairs in which unit j is the match (0 for
    units never used).

    :param pairs: Iterable of (focal_id, match_id, weight) triples, ids < n.
    :param n: Number of units.
    :rtype: numpy.ndarray
    """
    pairs = list(pairs)
    if not pairs:
        return np.zeros(n)
    match_ids = np.array([p[1] for p in pairs], dtype=int)
    weights = np.array([p[2] for p in pairs], dtype=float)
    if np.any(match_ids < 0) or np.any(match_ids >= n):
        raise ValueError("pairs reference unit ids outside 0..{}.".format(n - 1))
    return np.bincount(match_ids, weights=weights, minlength=n).astype(float)
