from abc import ABC, abstractmethod

__all__ = ['BaseMatcher']


class BaseMatcher(ABC):
    """Abstract base class for ActionEffects matchers. All matchers must inherit from this class.
    """

    @abstractmethod
    def matcher(self, scores, focal_ids, candidate_ids, spec):
        """
        Abstract matcher method. Must be overridden in concrete subclass.

        A matcher() implementation receives the propensity scores of all
        units, the focal units to match and the candidate units from the
        opposite arm, and returns an iterator over
        <focal_id, match_id, weight> triples.

        The weights yielded for one focal unit must sum to 1. A focal unit
        for which nothing is yielded is reported as unmatched.

        :param scores: (numpy.ndarray) Propensity scores of all units.
        :param focal_ids: (numpy.ndarray) Sorted ids of the focal units.
        :param candidate_ids: (numpy.ndarray) Sorted ids of the candidate units.
        :param spec: (MatchSpec) Matching options.
        """
        raise NotImplementedError(f"{self.__class__.__name__}.matcher is not defined")
