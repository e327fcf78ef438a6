from ActionEffects import *
from ActionEffects.utils import timeit, setup_logging


@timeit
def main():
    table, _ = generate(get_scenario('crossing'))
    _, model, scores = fit_propensity(table)
    for row in wald_inference(model):
        print("{:<28} {:>8.3f} {:>8.3f} {:>8.3f}".format(row.term, row.estimate, row.std_error, row.p_value))

    match_result = nearest_neighbor_match(scores, table.z, MatchSpec(), Estimand.ATE)
    for label, balance in (('pre', balance_table(table, scores=scores)),
                           ('post', balance_table(table, match_result, scores))):
        print(label, ', '.join("{} {}".format(row.variable, format_smd(row.smd_percent))
                               for row in balance.rows))


if __name__ == '__main__':
    setup_logging()
    main()
