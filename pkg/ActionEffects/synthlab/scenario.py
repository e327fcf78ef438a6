from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..dataset import Schema, VariableSpec, BINARY, CATEGORICAL, CONTINUOUS
from ..errors import ScenarioError, SchemaError
from ..propensity import design_columns

__all__ = ['CovariateGen', 'Scenario', 'GAUSSIAN', 'BERNOULLI']

GAUSSIAN = 'gaussian'
BERNOULLI = 'bernoulli'


@dataclass(frozen=True)
class CovariateGen:
    """
    Generator of one covariate: normal(mean, sd) for continuous, bernoulli(p)
    for binary, or categorical with level probabilities.
    """
    name: str
    kind: str
    mean: float = 0.0
    sd: float = 1.0
    p: float = 0.5
    levels: Tuple[str, ...] = ()
    probabilities: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == CONTINUOUS and not (np.isfinite(self.mean) and self.sd >= 0):
            raise ScenarioError("normal({}, {}) for '{}' is invalid.".format(self.mean, self.sd, self.name))
        if self.kind == BINARY and not 0 <= self.p <= 1:
            raise ScenarioError("bernoulli({}) for '{}' is invalid.".format(self.p, self.name))
        if self.kind == CATEGORICAL:
            probs = np.asarray(self.probabilities, dtype=float)
            if len(probs) != len(self.levels) or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
                raise ScenarioError("categorical probabilities for '{}' must be non-negative, one per "
                                    "level and sum to 1 (got {}).".format(self.name, self.probabilities))
        try:
            self.variable_spec()
        except SchemaError as e:
            raise ScenarioError(str(e))

    @classmethod
    def normal(cls, name, mean, sd):
        return cls(name, CONTINUOUS, mean=float(mean), sd=float(sd))

    @classmethod
    def bernoulli(cls, name, p):
        return cls(name, BINARY, p=float(p))

    @classmethod
    def categorical(cls, name, probabilities: Dict[str, float]):
        return cls(name, CATEGORICAL, levels=tuple(probabilities),
                   probabilities=tuple(float(v) for v in probabilities.values()))

    def variable_spec(self):
        return VariableSpec(self.name, self.kind, self.levels)

    def draw(self, rng: np.random.Generator, n):
        if self.kind == CONTINUOUS:
            return rng.normal(self.mean, self.sd, n)
        if self.kind == BINARY:
            return (rng.random(n) < self.p).astype(int)
        return np.asarray(self.levels, dtype=object)[rng.choice(len(self.levels), size=n,
                                                                p=self.probabilities)]

    def to_config_value(self):
        if self.kind == CONTINUOUS:
            return "normal: {!r}, {!r}".format(self.mean, self.sd)
        if self.kind == BINARY:
            return "bernoulli: {!r}".format(self.p)
        return "categorical: " + ', '.join("{}={!r}".format(level, p)
                                           for level, p in zip(self.levels, self.probabilities))

    @classmethod
    def from_config_value(cls, name, value):
        from ..utils import parse_list

        kind, _, args = value.partition(':')
        kind, items = kind.strip().lower(), parse_list(args)
        try:
            if kind == 'normal' and len(items) == 2:
                return cls.normal(name, float(items[0]), float(items[1]))
            if kind == 'bernoulli' and len(items) == 1:
                return cls.bernoulli(name, float(items[0]))
            if kind == 'categorical' and items:
                pairs = [item.split('=', 1) for item in items]
                return cls.categorical(name, {level.strip(): float(p) for level, p in pairs})
        except ValueError as e:
            raise ScenarioError("Cannot parse generator '{}' for '{}': {}".format(value, name, e))
        raise ScenarioError("Unknown generator '{}' for '{}'; expected normal: mu, sigma | "
                            "bernoulli: p | categorical: A=p, B=p, ...".format(value, name))


@dataclass(frozen=True)
class Scenario:
    """
    Synthetic observational study with known potential outcomes.

    The true propensity is logistic(X.gamma), the control outcome mean is
    X.alpha and the unit effect is tau0 + tau1 * e(X), where X is the design
    row (intercept, covariates, categorical indicators) and coefficients are
    given per design column name (absent columns are 0).
    """
    name: str
    n: int
    covariates: Tuple[CovariateGen, ...]
    ps_coefficients: Dict[str, float] = field(default_factory=dict)
    baseline: Dict[str, float] = field(default_factory=dict)
    tau0: float = 0.0
    tau1: float = 0.0
    noise: str = GAUSSIAN
    noise_sd: float = 1.0
    seed: int = 0
    treatment: str = 'z'
    outcome: str = 'y'

    def __post_init__(self):
        object.__setattr__(self, 'covariates', tuple(self.covariates))
        if int(self.n) != self.n or self.n < 2:
            raise ScenarioError("Scenario '{}' needs n >= 2 (got {}).".format(self.name, self.n))
        if self.noise not in (GAUSSIAN, BERNOULLI):
            raise ScenarioError("Unknown outcome noise '{}'; expected gaussian or bernoulli."
                                .format(self.noise))
        if self.noise == GAUSSIAN and not self.noise_sd >= 0:
            raise ScenarioError("noise_sd must be >= 0 (got {}).".format(self.noise_sd))
        if int(self.seed) != self.seed or self.seed < 0:
            raise ScenarioError("seed must be a non-negative integer (got {}).".format(self.seed))
        try:
            columns = design_columns(self.schema)
        except SchemaError as e:
            raise ScenarioError(str(e))
        for label, coefficients in (('propensity', self.ps_coefficients), ('outcome', self.baseline)):
            unknown = [c for c in coefficients if c not in columns]
            if unknown:
                raise ScenarioError("Unknown {} coefficient column(s) {}; design columns are {}."
                                    .format(label, unknown, list(columns)))

    @property
    def schema(self):
        return Schema(self.treatment, self.outcome,
                      tuple(gen.variable_spec() for gen in self.covariates))

    @property
    def gamma(self):
        return np.array([self.ps_coefficients.get(c, 0.0) for c in design_columns(self.schema)])

    @property
    def alpha(self):
        return np.array([self.baseline.get(c, 0.0) for c in design_columns(self.schema)])

    @classmethod
    def from_config(cls, filepath):
        """
        Reads a scenario from a key-value configuration file:

            [scenario]
            name = heterogeneous
            n = 5000
            seed = 303
            tau0 = 0.0
            tau1 = 0.4
            noise = gaussian
            noise_sd = 0.1

            [covariates]
            x1 = normal: 0, 1
            b1 = bernoulli: 0.3
            c1 = categorical: A=0.3, B=0.45, C=0.25

            [propensity]
            (Intercept) = -0.2
            x1 = 0.8
            c1: B = 0.3

            [outcome]
            (Intercept) = 0.5

        :rtype: Scenario
        """
        from ..utils import read_config

        config = read_config(filepath)
        if not config.has_section('scenario'):
            raise ScenarioError("Scenario file '{}' has no [scenario] section.".format(filepath))
        section = config['scenario']
        covariates = [CovariateGen.from_config_value(name, value)
                      for name, value in (config['covariates'].items()
                                          if config.has_section('covariates') else [])]
        try:
            return cls(
                name=section.get('name', str(filepath)),
                n=int(section['n']),
                covariates=tuple(covariates),
                ps_coefficients=_coefficients(config, 'propensity'),
                baseline=_coefficients(config, 'outcome'),
                tau0=float(section.get('tau0', '0')),
                tau1=float(section.get('tau1', '0')),
                noise=section.get('noise', GAUSSIAN).strip().lower(),
                noise_sd=float(section.get('noise_sd', '1')),
                seed=int(section.get('seed', '0')),
                treatment=section.get('treatment', 'z').strip(),
                outcome=section.get('outcome', 'y').strip(),
            )
        except KeyError as e:
            raise ScenarioError("Scenario file '{}' is missing key {}.".format(filepath, e))
        except ValueError as e:
            if isinstance(e, ScenarioError):
                raise
            raise ScenarioError("Scenario file '{}' has an invalid value: {}.".format(filepath, e))

    def to_config(self, filepath):
        from ..utils import new_config

        config = new_config()
        config['scenario'] = {
            'name': self.name, 'n': str(self.n), 'seed': str(self.seed),
            'tau0': repr(self.tau0), 'tau1': repr(self.tau1), 'noise': self.noise,
            'noise_sd': repr(self.noise_sd), 'treatment': self.treatment, 'outcome': self.outcome,
        }
        config['covariates'] = {gen.name: gen.to_config_value() for gen in self.covariates}
        config['propensity'] = {k: repr(v) for k, v in self.ps_coefficients.items()}
        config['outcome'] = {k: repr(v) for k, v in self.baseline.items()}
        with open(filepath, "w", encoding='utf8') as f:
            config.write(f)


def _coefficients(config, section):
    if not config.has_section(section):
        return {}
    return {name.strip(): float(value) for name, value in config[section].items()}
