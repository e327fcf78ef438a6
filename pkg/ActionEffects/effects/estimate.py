import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .bootstrap import bootstrap_standard_error
from .standard_errors import ai_standard_error
from .unit_effects import unit_effects, point_estimate
from ..errors import ConvergenceError
from ..matching import Estimand, MatchSpec, nearest_neighbor_match
from ..propensity import encode_design, fit_logistic, predict_scores

__all__ = ['EffectEstimate', 'estimate', 'estimate_from_match', 'fit_propensity', 'effect_from_scores', 'Z_95']

logger = logging.getLogger(__name__)

Z_95 = 1.96


@dataclass(frozen=True)
class EffectEstimate:
    estimand: Estimand
    tau_hat: float
    ai_se: float
    bootstrap_se: Optional[float]
    n_focal: int
    bootstrap_replicates: int = 0
    seed: Optional[int] = None
    dropped_replicates: int = 0
    n_unmatched: int = 0

    def confidence_interval(self, se_kind='ai'):
        """
        tau_hat -/+ 1.96 * SE for se_kind 'ai' or 'bootstrap'.

        :rtype: tuple (float, float)
        """
        se = {'ai': self.ai_se, 'bootstrap': self.bootstrap_se}[se_kind]
        if se is None:
            raise ValueError("No {} standard error available.".format(se_kind))
        return self.tau_hat - Z_95 * se, self.tau_hat + Z_95 * se

    def as_dict(self):
        data = {
            'estimand': str(self.estimand),
            'tau_hat': self.tau_hat,
            'ai_se': self.ai_se,
            'bootstrap_se': self.bootstrap_se,
            'n_focal': self.n_focal,
            'B': self.bootstrap_replicates,
            'seed': self.seed,
            'dropped_replicates': self.dropped_replicates,
            'n_unmatched': self.n_unmatched,
            'ci95_ai': list(self.confidence_interval('ai')),
        }
        if self.bootstrap_se is not None:
            data['ci95_bootstrap'] = list(self.confidence_interval('bootstrap'))
        return data


def fit_propensity(table):
    """
    Encodes the design, fits the logistic propensity model and predicts the
    scores of a table.

    :raises ConvergenceError if the fit does not converge.
    :rtype: tuple (DesignMatrix, PropensityModel, numpy.ndarray)
    """
    design = encode_design(table)
    model = fit_logistic(design, table.z)
    if not model.converged:
        raise ConvergenceError("Propensity model did not converge: {}.".format(model.message))
    return design, model, predict_scores(model, design)


def effect_from_scores(table, match_result):
    """Point estimate of a match result on a table's outcomes."""
    effects = unit_effects(match_result, table.y, table.z)
    return point_estimate(effects, match_result.estimand)


def estimate(table, spec: MatchSpec = None, estimand=Estimand.ATT,
             bootstrap: Optional[Tuple[int, int]] = None, workers=1, schema=None,
             progress=False):
    """
    Estimates a causal effect by propensity score matching: fit the propensity
    model, match, compute unit effects, the point estimate, the Abadie-Imbens
    standard error and, when requested, the bootstrap standard error.

    :param table: dataset.ObservationTable.
    :param spec: MatchSpec (default MatchSpec()).
    :param estimand: Estimand or 'ate'/'att'/'atnt'.
    :param bootstrap: Optional (replicates, seed).
    :param workers: Bootstrap worker processes.
    :param schema: Optional schema overriding table.schema.
    :param progress: Show a bootstrap progress bar.
    :rtype: EffectEstimate
    """
    from ..dataset import ObservationTable

    spec = spec or MatchSpec()
    estimand = Estimand.parse(estimand)
    if schema is not None and schema != table.schema:
        table = ObservationTable(schema, table.frame)

    _, _, scores = fit_propensity(table)
    match_result = nearest_neighbor_match(scores, table.z, spec, estimand)
    return estimate_from_match(table, match_result, scores, spec, bootstrap, workers, progress)


def estimate_from_match(table, match_result, scores, spec: MatchSpec = None, bootstrap=None,
                        workers=1, progress=False):
    """
    Point estimate, Abadie-Imbens SE and optional bootstrap SE of an existing
    match result (the bootstrap re-runs the whole pipeline per replicate).

    :param table: dataset.ObservationTable the match was computed on.
    :param match_result: MatchResult.
    :param scores: Propensity scores used for matching.
    :param spec: MatchSpec used for matching (needed by the bootstrap).
    :param bootstrap: Optional (replicates, seed).
    :rtype: EffectEstimate
    """
    spec = spec or MatchSpec()
    estimand = match_result.estimand
    effects = unit_effects(match_result, table.y, table.z)
    tau_hat = point_estimate(effects, estimand)
    ai_se = ai_standard_error(match_result, table.y, table.z, scores, estimand)

    boot = None
    if bootstrap is not None:
        replicates, seed = bootstrap
        boot = bootstrap_standard_error(table, spec, estimand, replicates, seed,
                                        workers=workers, progress=progress)

    result = EffectEstimate(
        estimand=estimand,
        tau_hat=tau_hat,
        ai_se=ai_se,
        bootstrap_se=boot.se if boot else None,
        n_focal=len(effects),
        bootstrap_replicates=boot.replicates if boot else 0,
        seed=boot.seed if boot else None,
        dropped_replicates=boot.dropped if boot else 0,
        n_unmatched=len(effects.excluded),
    )
    logger.info("%s = %.4f (AI SE %.4f%s)", estimand, tau_hat, ai_se,
                ", bootstrap SE {:.4f}".format(boot.se) if boot else '')
    return result
