import networkx

from .structures import MatchResult

__all__ = ['build_match_graph', 'write_match_graph']


def build_match_graph(match_result: MatchResult, scores=None, z=None):
    """
    Builds a NetworkX DiGraph from a match result. Every unit is a node
    (named by its unit_id); every pair (focal, match, weight) is a directed
    edge from focal to match with 'weight' and 'label' attributes, so a
    unit's weighted in-degree is its K-count.

    Node attributes 'score' and 'arm' are added when scores/z are given.

    :param match_result: MatchResult.
    :param scores: Optional propensity scores.
    :param z: Optional treatment vector.
    :rtype: networkx.DiGraph
    """
    g = networkx.DiGraph()

    for unit_id in range(match_result.n_units):
        attrs = {}
        if scores is not None:
            attrs['score'] = float(scores[unit_id])
        if z is not None:
            attrs['arm'] = int(z[unit_id])
        g.add_node(unit_id, **attrs)

    for focal_id, match_id, weight in match_result.pairs:
        g.add_edge(focal_id, match_id, weight=weight, label='isMatchedTo')

    return g


def write_match_graph(graph: networkx.DiGraph, filepath):
    """
    Exports a match graph as GraphML (readable by most network visualization
    tools).

    :param graph: Graph returned by build_match_graph.
    :param filepath: Destination path.
    """
    networkx.write_graphml(graph, filepath)
