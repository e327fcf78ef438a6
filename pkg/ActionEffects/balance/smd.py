import math

import numpy as np

__all__ = ['smd_continuous', 'smd_binary', 'smd_categorical', 'IMBALANCE_THRESHOLD', 'format_smd']

# SMD values (in percent) at or above this indicate poor covariate balance.
IMBALANCE_THRESHOLD = 10.0


def smd_continuous(mean1, sd1, mean0, sd0):
    """
    Standardized absolute mean difference of a continuous covariate, in
    percent: 100 * |mean1 - mean0| / sqrt((sd1^2 + sd0^2) / 2).

    Both SDs zero gives 0 for equal means and math.inf (infinite imbalance)
    otherwise.

    :rtype: float
    """
    if sd1 < 0 or sd0 < 0:
        raise ValueError("Standard deviations must be non-negative (got {}, {}).".format(sd1, sd0))
    pooled = math.sqrt((sd1 ** 2 + sd0 ** 2) / 2)
    difference = abs(mean1 - mean0)
    if pooled == 0:
        return 0.0 if difference == 0 else math.inf
    return 100 * difference / pooled


def smd_binary(p1, p0):
    """
    Standardized absolute difference in proportions, in percent:
    100 * |p1 - p0| / sqrt((p1(1 - p1) + p0(1 - p0)) / 2).

    :rtype: float
    """
    for p in (p1, p0):
        if not 0 <= p <= 1:
            raise ValueError("Proportions must lie in [0, 1] (got {}).".format(p))
    pooled = math.sqrt((p1 * (1 - p1) + p0 * (1 - p0)) / 2)
    difference = abs(p1 - p0)
    if pooled == 0:
        return 0.0 if difference == 0 else math.inf
    return 100 * difference / pooled


def smd_categorical(props1, props0, tol=1e-9):
    """
    Multivariate (Mahalanobis) SMD of a categorical covariate, in percent:
    100 * sqrt(d' S^+ d), where d is the difference of the non-reference level
    proportions and S the pooled multinomial covariance
    S_kl = [p_k1 (delta_kl - p_l1) + p_k0 (delta_kl - p_l0)] / 2.

    A difference outside the column space of a singular S is an infinite
    imbalance (math.inf). With two levels this equals smd_binary of the
    second level.

    :param props1: Level proportions in arm 1 (declared level order, reference first).
    :param props0: Level proportions in arm 0, same order.
    :param tol: Tolerance for each vector summing to 1.
    :rtype: float
    """
    p1 = np.asarray(props1, dtype=float)
    p0 = np.asarray(props0, dtype=float)
    if p1.shape != p0.shape or p1.ndim != 1:
        raise ValueError("Proportion vectors must have the same length ({} vs {})."
                         .format(p1.shape, p0.shape))
    if len(p1) < 2:
        raise ValueError("A categorical covariate needs at least 2 levels.")
    for p in (p1, p0):
        if abs(p.sum() - 1) > tol or np.any(p < 0):
            raise ValueError("Proportions must be non-negative and sum to 1 (got {}).".format(p))

    q1, q0 = p1[1:], p0[1:]
    d = q1 - q0
    S = (np.diag(q1) - np.outer(q1, q1) + np.diag(q0) - np.outer(q0, q0)) / 2
    S_pinv = np.linalg.pinv(S, hermitian=True)
    if np.linalg.norm(d - S @ (S_pinv @ d)) > 1e-10:
        return math.inf
    return float(100 * math.sqrt(max(float(d @ S_pinv @ d), 0.0)))


def format_smd(value, digits=2):
    """Formats an SMD for display; infinite imbalance prints as 'Inf'."""
    if value is None:
        return ''
    if math.isinf(value):
        return 'Inf'
    return '{:.{}f}'.format(value, digits)
