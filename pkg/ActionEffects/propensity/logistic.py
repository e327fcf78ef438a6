import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.linalg
from scipy.special import expit
from scipy.stats import norm

from .design import DesignMatrix
from ..errors import ConvergenceError, DegenerateArmError, RankDeficiencyError

__all__ = [
    'PropensityModel',
    'WaldRow',
    'fit_logistic',
    'predict_scores',
    'wald_inference',
    'wald_p_value',
    'SCORE_EPS',
]

logger = logging.getLogger(__name__)

SCORE_EPS = 1e-12
DEVIANCE_TOL = 1e-8
MAX_ITER = 25
MAX_COEFFICIENT = 30.0
MAX_STEP_HALVINGS = 20


@dataclass(frozen=True)
class PropensityModel:
    """
    Logistic propensity model fitted by iteratively reweighted least squares.

    'covariance' is the inverse Fisher information at the final coefficients.
    A model with converged=False holds the last accepted iterate and 'message'
    says why fitting stopped.
    """
    columns: Tuple[str, ...]
    coefficients: np.ndarray
    covariance: np.ndarray
    scores: np.ndarray
    deviance: float
    iterations: int
    converged: bool
    deviance_history: Tuple[float, ...] = field(default_factory=tuple)
    message: str = ''


@dataclass(frozen=True)
class WaldRow:
    term: str
    estimate: float
    std_error: float
    z_value: float
    p_value: float

    def as_record(self):
        return {'term': self.term, 'estimate': self.estimate, 'std_error': self.std_error,
                'p_value': self.p_value}


def fit_logistic(design: DesignMatrix, z, tol=DEVIANCE_TOL, max_iter=MAX_ITER):
    """
    Fits P(Z=1 | X) = logistic(X.beta) by maximum likelihood with Newton
    iterations (IRLS), starting from beta = 0.

    Each Newton step is halved until the deviance does not increase, so the
    recorded deviance sequence is non-increasing. Fitting stops when the
    deviance changes by less than 'tol' (converged), after 'max_iter'
    iterations, when a coefficient exceeds 30 in magnitude (separation) or
    when no step decreases the deviance. The last three return a model with
    converged=False.

    :param design: DesignMatrix with full column rank.
    :param z: Treatment vector of 0/1 values with both values present.
    :param tol: Convergence tolerance on the absolute deviance change.
    :param max_iter: Maximum number of Newton iterations.
    :raises DegenerateArmError if z is not binary or one arm is empty.
    :raises RankDeficiencyError if the design is rank deficient.
    :rtype: PropensityModel
    """
    X = np.asarray(design.values, dtype=float)
    z = np.asarray(z, dtype=float)
    n, p = X.shape
    if z.shape != (n,):
        raise ValueError("z must have length {} (got {}).".format(n, z.shape))
    if not np.all(np.isin(z, (0.0, 1.0))):
        raise DegenerateArmError("treatment not binary")
    if z.sum() == 0 or z.sum() == n:
        raise DegenerateArmError("arm {} empty".format(0 if z.sum() == n else 1))
    rank = np.linalg.matrix_rank(X)
    if rank < p:
        raise RankDeficiencyError("Design matrix has rank {} < {} columns ({})."
                                  .format(rank, p, ', '.join(design.columns)))

    beta = np.zeros(p)
    eta = X @ beta
    deviance = _deviance(z, eta)
    history = [deviance]
    converged = False
    message = 'iteration limit reached'

    for _ in range(max_iter):
        e = expit(eta)
        information = X.T @ (X * (e * (1 - e))[:, None])
        gradient = X.T @ (z - e)
        try:
            step = scipy.linalg.solve(information, gradient, assume_a='pos')
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            message = 'singular Fisher information'
            break

        # Step halving keeps the deviance non-increasing.
        scale = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            candidate = beta + scale * step
            candidate_eta = X @ candidate
            candidate_deviance = _deviance(z, candidate_eta)
            if candidate_deviance <= deviance + tol:
                break
            scale /= 2
        else:
            message = 'deviance failed to decrease'
            break

        change = deviance - candidate_deviance
        beta, eta, deviance = candidate, candidate_eta, candidate_deviance
        history.append(deviance)
        if np.max(np.abs(beta)) > MAX_COEFFICIENT:
            message = 'coefficient magnitude exceeded {:g} (separation)'.format(MAX_COEFFICIENT)
            break
        if abs(change) < tol:
            converged = True
            message = ''
            break

    e = expit(eta)
    information = X.T @ (X * (e * (1 - e))[:, None])
    try:
        covariance = np.linalg.inv(information)
        covariance = (covariance + covariance.T) / 2
    except np.linalg.LinAlgError:
        covariance = np.full((p, p), np.nan)

    if not converged:
        logger.warning("Logistic fit did not converge after %d iterations: %s.",
                       len(history) - 1, message)
    else:
        logger.debug("Logistic fit converged in %d iterations (deviance %.6f).",
                     len(history) - 1, deviance)

    return PropensityModel(
        columns=tuple(design.columns),
        coefficients=beta,
        covariance=covariance,
        scores=_clamp(e),
        deviance=float(deviance),
        iterations=len(history) - 1,
        converged=converged,
        deviance_history=tuple(float(d) for d in history),
        message=message,
    )


def predict_scores(model: PropensityModel, design: DesignMatrix):
    """
    Returns logistic(design.beta) for every row, clamped to [1e-12, 1 - 1e-12].

    :param model: Fitted PropensityModel.
    :param design: DesignMatrix with the same columns as the fitted design.
    :raises ValueError on a column mismatch.
    :rtype: numpy.ndarray
    """
    if tuple(design.columns) != tuple(model.columns):
        raise ValueError("Design columns {} do not match model columns {}."
                         .format(list(design.columns), list(model.columns)))
    return _clamp(expit(np.asarray(design.values, dtype=float) @ model.coefficients))


def wald_inference(model: PropensityModel):
    """
    Per-coefficient Wald inference: SE_j = sqrt(covariance[j, j]) and the
    two-sided standard normal p-value of beta_j / SE_j.

    :param model: Converged PropensityModel.
    :raises ConvergenceError if the model did not converge.
    :rtype: list of WaldRow
    """
    if not model.converged:
        raise ConvergenceError("Wald inference refused: propensity model did not converge ({})."
                               .format(model.message))
    rows = []
    for j, term in enumerate(model.columns):
        estimate = float(model.coefficients[j])
        se = float(np.sqrt(max(model.covariance[j, j], 0.0)))
        z_value = estimate / se if se > 0 else (0.0 if estimate == 0 else np.inf)
        rows.append(WaldRow(term, estimate, se, float(z_value), wald_p_value(estimate, se)))
    return rows


def wald_p_value(estimate, std_error):
    """
    Two-sided p-value of a Wald statistic under the standard normal.

    :rtype: float
    """
    if estimate == 0:
        return 1.0
    if std_error <= 0:
        return 0.0
    return float(2 * norm.sf(abs(estimate / std_error)))


def _deviance(z, eta):
    # -2 log-likelihood with log(e) = -log(1 + exp(-eta)) evaluated stably
    return float(2 * np.sum(z * np.logaddexp(0, -eta) + (1 - z) * np.logaddexp(0, eta)))


def _clamp(scores):
    return np.clip(scores, SCORE_EPS, 1 - SCORE_EPS)
