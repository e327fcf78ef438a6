import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
import pandas as pd
from scipy.special import expit

from .scenario import Scenario, GAUSSIAN
from ..dataset import ObservationTable
from ..errors import EstimationError
from ..propensity import encode_covariates, SCORE_EPS

__all__ = ['SyntheticUnit', 'TrueEstimands', 'generate', 'true_estimands', 'write_counterfactuals']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticUnit:
    """A generated unit carrying both potential outcomes."""
    unit_id: int
    x: Dict[str, object]
    e_true: float
    z: int
    y0: float
    y1: float
    y: float


@dataclass(frozen=True)
class TrueEstimands:
    """Finite-sample effect truths of a generated dataset."""
    ate: float
    att: float
    atnt: float

    def as_dict(self):
        return {'ate': self.ate, 'att': self.att, 'atnt': self.atnt}


def generate(scenario: Scenario):
    """
    Draws a synthetic observational dataset. With one generator seeded by
    scenario.seed: covariates are drawn in declaration order, e_true =
    logistic(X.gamma), Z ~ bernoulli(e_true), then the potential outcomes.

    Gaussian noise is shared by Y(0) and Y(1) (common random numbers), so
    Y(1) - Y(0) = tau0 + tau1 * e_true for every unit. Bernoulli outcomes draw
    Y(0) and Y(1) independently from the mean model, with probabilities
    clamped to [0, 1] (the number of clamped units is logged).

    :param scenario: Scenario.
    :raises DegenerateArmError if the draw leaves a treatment arm empty.
    :rtype: tuple (dataset.ObservationTable, list of SyntheticUnit)
    """
    rng = np.random.default_rng(scenario.seed)
    n, schema = scenario.n, scenario.schema

    covariates = pd.DataFrame({gen.name: gen.draw(rng, n) for gen in scenario.covariates},
                              index=pd.RangeIndex(n))
    X = encode_covariates(schema, covariates).values
    e_true = np.clip(expit(X @ scenario.gamma), SCORE_EPS, 1 - SCORE_EPS)
    z = (rng.random(n) < e_true).astype(int)

    mu0 = X @ scenario.alpha
    tau = scenario.tau0 + scenario.tau1 * e_true
    if scenario.noise == GAUSSIAN:
        noise = rng.normal(0.0, scenario.noise_sd, n)
        y0 = mu0 + noise
        y1 = mu0 + tau + noise
    else:
        p0, p1 = mu0, mu0 + tau
        clamped = int(np.sum((p0 < 0) | (p0 > 1) | (p1 < 0) | (p1 > 1)))
        if clamped:
            logger.warning("Scenario '%s': clamped outcome probabilities of %d unit(s) to [0, 1].",
                           scenario.name, clamped)
        y0 = (rng.random(n) < np.clip(p0, 0, 1)).astype(float)
        y1 = (rng.random(n) < np.clip(p1, 0, 1)).astype(float)
    y = np.where(z == 1, y1, y0)

    frame = covariates.copy()
    frame.insert(0, scenario.outcome, y)
    frame.insert(0, scenario.treatment, z)
    table = ObservationTable.from_frame(schema, frame)

    records = covariates.to_dict(orient='records')
    units = [SyntheticUnit(i, records[i], float(e_true[i]), int(z[i]), float(y0[i]),
                           float(y1[i]), float(y[i])) for i in range(n)]
    logger.info("Generated scenario '%s': n=%d, treated=%d.", scenario.name, n, int(z.sum()))
    return table, units


def true_estimands(units: List[SyntheticUnit]):
    """
    Finite-sample truths: mean of Y(1) - Y(0) over all units (ATE), over
    treated units (ATT) and over control units (ATNT).

    :raises EstimationError if an arm is empty.
    :rtype: TrueEstimands
    """
    z = np.array([u.z for u in units], dtype=int)
    effects = np.array([u.y1 - u.y0 for u in units], dtype=float)
    if len(units) == 0 or not np.any(z == 1) or not np.any(z == 0):
        raise EstimationError("True estimands need units in both arms.")
    return TrueEstimands(float(effects.mean()), float(effects[z == 1].mean()),
                         float(effects[z == 0].mean()))


def write_counterfactuals(units: List[SyntheticUnit], filepath):
    """
    Writes the counterfactual sidecar file (unit_id, Y0, Y1, e_true).

    :param units: Generated units.
    :param filepath: Destination CSV path.
    """
    from ..utils import to_csv

    to_csv(filepath, ((u.unit_id, u.y0, u.y1, u.e_true) for u in units),
           headers=('unit_id', 'Y0', 'Y1', 'e_true'))
