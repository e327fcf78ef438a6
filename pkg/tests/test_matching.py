import networkx
import numpy as np
import pytest

from ActionEffects.dataset import descriptive_summary
from ActionEffects.errors import MatchingError
from ActionEffects.matching import (
    BaseMatcher, Estimand, MatchSpec, GreedyMatcher, build_match_graph, compute_k_counts,
    expand_matched_sample, nearest_neighbor_match, write_match_graph,
)


def random_instance(rng, n, p_treated=0.4):
    """Random (scores, z) with both arms; half the instances use a coarse grid to force ties."""
    while True:
        z = (rng.random(n) < p_treated).astype(int)
        if 0 < z.sum() < n:
            break
    scores = rng.uniform(0.001, 0.999, n)
    if rng.random() < 0.5:
        scores = np.clip(np.round(scores, 2), 0.01, 0.99)
    return scores, z


def exhaustive_match(scores, z, spec, estimand):
    """O(N^2) scan: every focal unit against every candidate."""
    triples = []
    focal_mask = Estimand.parse(estimand).focal_mask(z)
    for i in np.flatnonzero(focal_mask):
        candidates = np.flatnonzero(z != z[i])
        distances = np.abs(scores[i] - scores[candidates])
        d_min = distances.min()
        if spec.caliper is not None and d_min > spec.caliper:
            continue
        if spec.allow_ties:
            chosen = candidates[distances <= d_min + spec.tie_tolerance]
        else:
            chosen = [candidates[distances == d_min].min()]
        triples.extend((int(i), int(j), 1.0 / len(chosen)) for j in sorted(chosen))
    return sorted(triples)


def exhaustive_greedy(scores, z, spec, estimand):
    triples = []
    z = np.asarray(z)
    directions = {Estimand.ATT: [1], Estimand.ATNT: [0], Estimand.ATE: [1, 0]}[estimand]
    for focal_arm in directions:
        focal = np.flatnonzero(z == focal_arm)
        candidates = list(np.flatnonzero(z != focal_arm))
        nearest = [min(abs(scores[i] - scores[j]) for j in candidates) for i in focal]
        for _, i in sorted(zip(nearest, focal)):
            distances = [abs(scores[i] - scores[j]) for j in candidates]
            d_min = min(distances)
            if spec.caliper is not None and d_min > spec.caliper:
                continue
            j = min(c for c, d in zip(candidates, distances) if d == d_min)
            candidates.remove(j)
            triples.append((int(i), int(j), 1.0))
    return sorted(triples)


def test_matches_exhaustive_scan():
    """200 random instances with all estimands, with/without ties and caliper."""
    rng = np.random.default_rng(20240519)
    for _ in range(200):
        n = int(rng.integers(2, 501))
        scores, z = random_instance(rng, n)
        spec = MatchSpec(allow_ties=bool(rng.random() < 0.5),
                         tie_tolerance=float(rng.choice([1e-8, 0.005])),
                         caliper=None if rng.random() < 0.5 else float(rng.choice([0.002, 0.02])))
        estimand = list(Estimand)[int(rng.integers(3))]
        result = nearest_neighbor_match(scores, z, spec, estimand)
        assert result.pairs == exhaustive_match(scores, z, spec, estimand)


def test_greedy_matches_exhaustive_scan():
    rng = np.random.default_rng(99)
    for _ in range(40):
        n = int(rng.integers(4, 80))
        scores, z = random_instance(rng, n, p_treated=0.3)
        estimand = Estimand.ATT
        if z.sum() > n - z.sum():
            z = 1 - z
        spec = MatchSpec(with_replacement=False,
                         caliper=None if rng.random() < 0.5 else 0.05)
        result = nearest_neighbor_match(scores, z, spec, estimand)
        assert result.pairs == exhaustive_greedy(scores, z, spec, estimand)
        assert len(set(result.match_ids.tolist())) == len(result.match_ids)


def test_ties_share_weight():
    scores = np.array([0.5, 0.4, 0.6, 0.9])
    z = np.array([1, 0, 0, 0])
    result = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATT)
    assert result.pairs == [(0, 1, 0.5), (0, 2, 0.5)]
    np.testing.assert_allclose(result.k_counts, [0, 0.5, 0.5, 0])


def test_without_ties_lowest_id_wins():
    scores = np.array([0.25, 0.75, 0.5])
    z = np.array([0, 0, 1])
    result = nearest_neighbor_match(scores, z, MatchSpec(allow_ties=False), Estimand.ATT)
    assert result.pairs == [(2, 0, 1.0)]


def test_caliper_leaves_focal_unmatched():
    scores = np.array([0.1, 0.9, 0.12])
    z = np.array([0, 1, 1])
    result = nearest_neighbor_match(scores, z, MatchSpec(caliper=0.05), Estimand.ATT)
    assert result.pairs == [(2, 0, 1.0)]
    assert result.unmatched == (1,)
    assert result.n_matched == 1


def test_ate_matches_every_unit():
    rng = np.random.default_rng(4)
    scores, z = random_instance(rng, 60)
    result = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATE)
    assert result.matched_focal_ids.tolist() == list(range(60))
    assert np.all(z[result.focal_ids] != z[result.match_ids])


def test_k_count_conservation():
    rng = np.random.default_rng(8)
    for estimand in Estimand:
        scores, z = random_instance(rng, 150)
        result = nearest_neighbor_match(scores, z, MatchSpec(), estimand)
        assert result.k_counts.sum() == pytest.approx(result.n_matched)
        per_focal = np.bincount(result.focal_ids, weights=result.weights)
        np.testing.assert_allclose(per_focal[result.matched_focal_ids], 1.0)


def test_label_flip_swaps_att_and_atnt():
    rng = np.random.default_rng(12)
    scores, z = random_instance(rng, 100)
    att = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATT)
    atnt = nearest_neighbor_match(scores, 1 - z, MatchSpec(), Estimand.ATNT)
    assert att.pairs == atnt.pairs


def test_compute_k_counts():
    k = compute_k_counts([(0, 2, 0.5), (0, 3, 0.5), (1, 2, 1.0)], 4)
    np.testing.assert_allclose(k, [0, 0, 1.5, 0.5])
    np.testing.assert_array_equal(compute_k_counts([], 3), np.zeros(3))


def test_match_errors():
    scores = np.array([0.2, 0.4, 0.6])
    with pytest.raises(MatchingError):
        nearest_neighbor_match(scores, np.array([1, 1, 1]))
    with pytest.raises(MatchingError):
        nearest_neighbor_match(scores, np.array([1, 1, 0]), MatchSpec(with_replacement=False))
    with pytest.raises(ValueError):
        nearest_neighbor_match(np.array([0.0, 0.5]), np.array([1, 0]))
    with pytest.raises(ValueError):
        nearest_neighbor_match(scores, np.array([1, 0, 0]), matcher=object())


def test_custom_matcher_is_used():
    class FirstCandidate(BaseMatcher):
        def matcher(self, scores, focal_ids, candidate_ids, spec):
            for focal_id in focal_ids.tolist():
                yield focal_id, int(candidate_ids[0]), 1.0

    scores = np.array([0.2, 0.4, 0.6, 0.8])
    z = np.array([1, 0, 1, 0])
    result = nearest_neighbor_match(scores, z, matcher=FirstCandidate())
    assert result.pairs == [(0, 1, 1.0), (2, 1, 1.0)]
    assert isinstance(GreedyMatcher(), BaseMatcher)


def test_match_graph_in_degree_is_k_count(tmp_path):
    rng = np.random.default_rng(21)
    scores, z = random_instance(rng, 80)
    result = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATE)
    graph = build_match_graph(result, scores, z)
    assert graph.number_of_nodes() == 80
    assert graph.number_of_edges() == len(result)
    in_degree = dict(graph.in_degree(weight='weight'))
    np.testing.assert_allclose([in_degree[i] for i in range(80)], result.k_counts)
    assert graph.nodes[0]['arm'] == int(z[0])

    path = tmp_path / 'matches.graphml'
    write_match_graph(graph, path)
    assert networkx.read_graphml(path).number_of_edges() == len(result)


def test_expanded_sample_arm_totals(toy_table):
    scores = np.array([0.6, 0.3, 0.7, 0.35, 0.45, 0.8, 0.2, 0.55])
    result = nearest_neighbor_match(scores, toy_table.z, MatchSpec(), Estimand.ATT)
    sample = expand_matched_sample(toy_table, result)
    assert sample.arm_totals == (4.0, 4.0)
    summary = descriptive_summary(sample)
    assert summary.n[0] == summary.n[1] == 4.0


def test_records():
    scores = np.array([0.5, 0.4, 0.6])
    result = nearest_neighbor_match(scores, np.array([1, 0, 0]))
    assert result.records() == [{'focal_id': 0, 'match_id': 1, 'weight': 0.5},
                                {'focal_id': 0, 'match_id': 2, 'weight': 0.5}]
    assert [r['k_count'] for r in result.k_count_records()] == [0.0, 0.5, 0.5]


@pytest.mark.parametrize('with_replacement', [True, False])
def test_pairs_invariant_to_constant_score_shift(with_replacement):
    rng = np.random.default_rng(21)
    z = np.tile([1, 0, 0], 40)
    # multiples of 1/1024 keep score differences exact after the shift
    scores = rng.integers(64, 897, z.size) / 1024
    spec = MatchSpec(with_replacement=with_replacement)
    for estimand in (Estimand.ATT, Estimand.ATNT) if with_replacement else (Estimand.ATT,):
        shifted = nearest_neighbor_match(scores + 0.0625, z, spec, estimand)
        assert shifted.pairs == nearest_neighbor_match(scores, z, spec, estimand).pairs


def test_ate_pairs_of_treated_units_are_the_att_pairs():
    rng = np.random.default_rng(17)
    for _ in range(10):
        scores, z = random_instance(rng, 120)
        ate = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATE)
        att = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATT)
        atnt = nearest_neighbor_match(scores, z, MatchSpec(), Estimand.ATNT)
        assert [p for p in ate.pairs if z[p[0]] == 1] == att.pairs
        assert [p for p in ate.pairs if z[p[0]] == 0] == atnt.pairs
