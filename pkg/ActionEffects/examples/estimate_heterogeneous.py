from ActionEffects import *
from ActionEffects.utils import timeit, setup_logging


@timeit
def main():
    table, units = generate(get_scenario('heterogeneous'))
    truth = true_estimands(units)

    for estimand in (Estimand.ATT, Estimand.ATE):
        result = estimate(table, estimand=estimand, bootstrap=(200, 7), workers=default_workers())
        low, high = result.confidence_interval('bootstrap')
        print("{}: {:.4f} (truth {:.4f}), bootstrap 95% CI [{:.4f}, {:.4f}]".format(
            estimand, result.tau_hat, getattr(truth, str(estimand).lower()), low, high))


if __name__ == '__main__':
    setup_logging()
    main()
