import functools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from tqdm import tqdm

from ..errors import ActionEffectsError, BootstrapError, ConvergenceError, DegenerateArmError
from ..matching import Estimand, MatchSpec, nearest_neighbor_match
from ..propensity import encode_design, fit_logistic, predict_scores

__all__ = ['BootstrapResult', 'bootstrap_standard_error', 'default_workers', 'MAX_DROPPED_FRACTION']

logger = logging.getLogger(__name__)

MAX_DROPPED_FRACTION = 0.05


@dataclass(frozen=True)
class BootstrapResult:
    """Bootstrap standard error with its replicate metadata."""
    se: float
    replicates: int
    seed: int
    dropped: int
    estimates: Tuple[float, ...] = field(default_factory=tuple, repr=False)


def default_workers():
    """Number of usable CPUs (at least 1)."""
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def _skip_failed_replicate(method):
    """
    Decorator. Returns None instead of raising when a bootstrap replicate
    cannot be estimated (lost arm, rank deficient or non-converged propensity
    fit, matching failure), so the caller can drop and count it.

    :param method: Replicate function returning a point estimate.
    """
    @functools.wraps(method)
    def wrapped(*args, **kwargs):
        try:
            return method(*args, **kwargs)
        except ActionEffectsError as e:
            logger.debug("Dropped bootstrap replicate %s: %s", args[-1], e)
            return None

    return wrapped


@_skip_failed_replicate
def _replicate(table, spec, estimand, seed, index):
    from .estimate import effect_from_scores

    rng = np.random.default_rng([seed, index])
    resample = table.take(rng.integers(0, table.n, table.n))
    treated, controls = resample.arm_counts
    if treated == 0 or controls == 0:
        raise DegenerateArmError("resample lost an arm")
    design = encode_design(resample)
    model = fit_logistic(design, resample.z)
    if not model.converged:
        raise ConvergenceError(model.message)
    scores = predict_scores(model, design)
    match_result = nearest_neighbor_match(scores, resample.z, spec, estimand)
    return effect_from_scores(resample, match_result)


def bootstrap_standard_error(table, spec: MatchSpec = None, estimand=Estimand.ATT,
                             replicates=1000, seed=0, workers=1, schema=None, progress=False):
    """
    Nonparametric bootstrap standard error of the matching estimator.

    Replicate b resamples N rows with replacement using a generator seeded by
    (seed, b), then re-runs the whole pipeline on the resample: propensity
    refit, rematching and re-estimation. Failed replicates are dropped and
    counted. The result does not depend on 'workers': every replicate derives
    its own generator and estimates are aggregated in replicate order.

    :param table: dataset.ObservationTable.
    :param spec: MatchSpec (default MatchSpec()).
    :param estimand: Estimand.
    :param replicates: Number of replicates B (>= 2).
    :param seed: Non-negative integer seed.
    :param workers: Worker processes; 1 runs in-process.
    :param schema: Optional schema overriding table.schema.
    :param progress: Show a progress bar on stderr.
    :raises BootstrapError if more than 5% of replicates fail.
    :raises DegenerateArmError if the table itself has an empty arm.
    :rtype: BootstrapResult
    """
    from ..dataset import ObservationTable

    spec = spec or MatchSpec()
    estimand = Estimand.parse(estimand)
    if replicates < 2:
        raise ValueError("Bootstrap needs at least 2 replicates (got {}).".format(replicates))
    if int(seed) != seed or seed < 0:
        raise ValueError("seed must be a non-negative integer (got {}).".format(seed))
    if schema is not None and schema != table.schema:
        table = ObservationTable(schema, table.frame)
    if min(table.arm_counts) == 0 or table.n < 2:
        raise DegenerateArmError("Cannot bootstrap a table with an empty arm.")

    job = functools.partial(_replicate, table, spec, estimand, int(seed))
    indices = range(replicates)
    workers = max(1, int(workers or 1))
    if workers == 1:
        results = [job(b) for b in tqdm(indices, disable=not progress, desc='bootstrap')]
    else:
        chunksize = max(1, replicates // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(tqdm(executor.map(job, indices, chunksize=chunksize),
                                total=replicates, disable=not progress, desc='bootstrap'))

    estimates = np.array([r for r in results if r is not None], dtype=float)
    dropped = replicates - len(estimates)
    if dropped > MAX_DROPPED_FRACTION * replicates or len(estimates) < 2:
        raise BootstrapError("{} of {} bootstrap replicates failed (limit {:.0%})."
                             .format(dropped, replicates, MAX_DROPPED_FRACTION))
    if dropped:
        logger.warning("Dropped %d of %d bootstrap replicates.", dropped, replicates)

    se = float(np.std(estimates, ddof=1))
    logger.info("Bootstrap SE %.6f from %d replicates (seed %d).", se, len(estimates), seed)
    return BootstrapResult(se, replicates, int(seed), dropped, tuple(estimates.tolist()))
