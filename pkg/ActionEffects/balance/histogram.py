from dataclasses import dataclass

import numpy as np

__all__ = ['HistogramSeries', 'ps_histogram', 'overlap_coefficient']


@dataclass(frozen=True)
class HistogramSeries:
    """Weighted propensity score histogram per arm on equal-width bins over [0, 1]."""
    bin_edges: np.ndarray
    counts_arm0: np.ndarray
    counts_arm1: np.ndarray

    def records(self, stage=None):
        records = []
        for lo, hi, c0, c1 in zip(self.bin_edges[:-1], self.bin_edges[1:],
                                  self.counts_arm0, self.counts_arm1):
            record = {} if stage is None else {'stage': stage}
            record.update({'bin_lo': float(lo), 'bin_hi': float(hi),
                           'count_arm0': float(c0), 'count_arm1': float(c1)})
            records.append(record)
        return records


def ps_histogram(scores, z, weights=None, bins=30):
    """
    Weighted histogram of propensity scores per arm on 'bins' equal-width bins
    spanning [0, 1]. Bins are right-open except the last, which includes 1.

    :param scores: Scores in [0, 1].
    :param z: Arm of each score (0/1).
    :param weights: Optional non-negative weight per score (default 1).
    :param bins: Number of bins.
    :rtype: HistogramSeries
    """
    scores = np.asarray(scores, dtype=float)
    z = np.asarray(z, dtype=int)
    weights = np.ones(len(scores)) if weights is None else np.asarray(weights, dtype=float)
    if np.any(scores < 0) or np.any(scores > 1):
        raise ValueError("Propensity scores must lie in [0, 1].")
    if not (scores.shape == z.shape == weights.shape):
        raise ValueError("scores, z and weights must be aligned.")

    # k / bins is exact for the edges that matter (0.5 stays 0.5)
    edges = np.arange(bins + 1) / bins
    counts = [np.histogram(scores[z == arm], bins=edges, weights=weights[z == arm])[0]
              for arm in (0, 1)]
    return HistogramSeries(edges, counts[0].astype(float), counts[1].astype(float))


def overlap_coefficient(histogram: HistogramSeries):
    """
    Sum over bins of the smaller of the two normalized arm histograms; 1 for
    identical distributions, 0 for disjoint ones.

    :rtype: float
    """
    total0, total1 = histogram.counts_arm0.sum(), histogram.counts_arm1.sum()
    if total0 <= 0 or total1 <= 0:
        return 0.0
    return float(np.minimum(histogram.counts_arm0 / total0, histogram.counts_arm1 / total1).sum())
