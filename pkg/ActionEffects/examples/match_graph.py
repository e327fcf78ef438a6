from ActionEffects import *
from ActionEffects.utils import timeit, PROJECT_ROOT


@timeit
def main():
    table, _ = generate(get_scenario('tiny'))
    _, _, scores = fit_propensity(table)
    match_result = nearest_neighbor_match(scores, table.z, estimand=Estimand.ATT)

    graph = build_match_graph(match_result, scores, table.z)
    write_match_graph(graph, PROJECT_ROOT / "tiny_att_matches.graphml")


if __name__ == '__main__':
    main()
