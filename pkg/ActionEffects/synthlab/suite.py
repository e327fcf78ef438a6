from dataclasses import replace

from .scenario import CovariateGen, Scenario, BERNOULLI, GAUSSIAN
from ..errors import ScenarioError

__all__ = ['scenario_suite', 'get_scenario']

_COVARIATES = (
    CovariateGen.normal('x1', 0.0, 1.0),
    CovariateGen.normal('x2', 0.0, 1.0),
    CovariateGen.bernoulli('b1', 0.3),
    CovariateGen.categorical('c1', {'A': 0.3, 'B': 0.45, 'C': 0.25}),
)

_MODERATE = {'(Intercept)': -0.2, 'x1': 0.8, 'x2': -0.6, 'b1': 0.4, 'c1: B': 0.3, 'c1: C': 0.6}
_STRONG = {'(Intercept)': -0.3, 'x1': 1.0, 'x2': -0.8, 'b1': 0.8, 'c1: B': 0.5, 'c1: C': 1.0}
_EXTREME = {'(Intercept)': 0.0, 'x1': 3.0, 'x2': -2.5, 'b1': 1.0, 'c1: B': 0.5, 'c1: C': 1.0}


def _baseline(gamma, scale=0.1, intercept=0.5):
    # outcome mean tied to the propensity index so the confounding runs through e(X)
    baseline = {column: scale * value for column, value in gamma.items()}
    baseline['(Intercept)'] = intercept + scale * gamma.get('(Intercept)', 0.0)
    return baseline


# Crossing-shaped data: reference propensity coefficients, binary shot outcome.
_CROSSING_COVARIATES = (
    CovariateGen.normal('score_differential', 0.0, 1.17),
    CovariateGen.normal('distance_to_defender', 2.94, 2.06),
    CovariateGen.normal('space_controlled', 0.62, 0.36),
    CovariateGen.normal('distance_to_teammate', 10.83, 5.60),
    CovariateGen.normal('distance_to_endline', 20.44, 9.68),
    CovariateGen.normal('box_player_ratio', 0.27, 0.29),
    CovariateGen.categorical('position', {'Forward': 0.275, 'Midfielder': 0.446, 'Defender': 0.279}),
    CovariateGen.bernoulli('ten_minute_warning', 0.249),
)

_CROSSING_PROPENSITY = {
    '(Intercept)': -2.131,
    'score_differential': -0.103,
    'distance_to_defender': 0.309,
    'space_controlled': 1.689,
    'distance_to_teammate': 0.030,
    'distance_to_endline': -0.125,
    'box_player_ratio': 1.885,
    'position: Midfielder': 0.537,
    'position: Defender': 0.753,
    'ten_minute_warning': 0.262,
}


def scenario_suite():
    """
    Returns the standard seeded scenarios by name:

        null                no effect, Y(1) = Y(0) for every unit
        homogeneous         constant effect 0.25
        heterogeneous       effect 0.4 * e(X), so ATT > ATE
        strong_confounding  large pre-match imbalance with adequate overlap
        weak_overlap        many propensities beyond [0.01, 0.99]
        tiny                50 units, for brute-force oracle checks
        crossing            crossing-play covariates and binary shot outcome

    :rtype: dict
    """
    base = Scenario(
        name='null',
        n=2000,
        covariates=_COVARIATES,
        ps_coefficients=dict(_MODERATE),
        baseline=_baseline(_MODERATE),
        tau0=0.0,
        tau1=0.0,
        noise=GAUSSIAN,
        noise_sd=0.1,
        seed=101,
    )
    suite = [
        base,
        replace(base, name='homogeneous', n=5000, tau0=0.25, seed=202),
        replace(base, name='heterogeneous', n=5000, tau0=0.0, tau1=0.4, seed=303),
        replace(base, name='strong_confounding', n=5000, ps_coefficients=dict(_STRONG),
                baseline=_baseline(_STRONG), tau0=0.2, seed=404),
        replace(base, name='weak_overlap', n=2000, ps_coefficients=dict(_EXTREME),
                baseline=_baseline(_EXTREME), tau0=0.2, seed=505),
        replace(base, name='tiny', n=50, tau0=0.3, seed=606),
        Scenario(
            name='crossing',
            n=2225,
            covariates=_CROSSING_COVARIATES,
            ps_coefficients=dict(_CROSSING_PROPENSITY),
            baseline={'(Intercept)': 0.06, 'space_controlled': 0.05, 'box_player_ratio': 0.05},
            tau0=0.0,
            tau1=0.08,
            noise=BERNOULLI,
            seed=707,
            treatment='cross',
            outcome='shot',
        ),
    ]
    return {scenario.name: scenario for scenario in suite}


def get_scenario(name):
    """
    Looks up a suite scenario by name.

    :raises ScenarioError for an unknown name.
    :rtype: Scenario
    """
    suite = scenario_suite()
    if name not in suite:
        raise ScenarioError("Unknown suite scenario '{}'; available: {}."
                            .format(name, ', '.join(suite)))
    return suite[name]
