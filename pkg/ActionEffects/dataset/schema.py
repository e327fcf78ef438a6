import re
from dataclasses import dataclass, field
from typing import Tuple

from ..errors import SchemaError

__all__ = ['VariableSpec', 'Schema', 'CONTINUOUS', 'BINARY', 'CATEGORICAL']

CONTINUOUS = 'continuous'
BINARY = 'binary'
CATEGORICAL = 'categorical'

_KINDS = (CONTINUOUS, BINARY, CATEGORICAL)
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


@dataclass(frozen=True)
class VariableSpec:
    """
    A covariate declaration. Categorical variables carry their levels in
    declared order; the first level is the reference level of the design matrix.
    """
    name: str
    kind: str
    levels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(str(level) for level in self.levels))
        if not _IDENTIFIER.match(self.name):
            raise SchemaError("'{}' is not a valid variable name.".format(self.name))
        if self.kind not in _KINDS:
            raise SchemaError("Variable '{}' has unknown kind '{}'; expected one of {}."
                              .format(self.name, self.kind, ', '.join(_KINDS)))
        if self.kind == CATEGORICAL:
            if len(self.levels) < 2:
                raise SchemaError("Categorical variable '{}' needs at least 2 levels."
                                  .format(self.name))
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError("Categorical variable '{}' has duplicate levels: {}."
                                  .format(self.name, ', '.join(self.levels)))
        elif self.levels:
            raise SchemaError("Only categorical variables declare levels ('{}' is {})."
                              .format(self.name, self.kind))

    @property
    def reference_level(self):
        return self.levels[0] if self.kind == CATEGORICAL else None

    def to_config_value(self):
        if self.kind == CATEGORICAL:
            return "{}: {}".format(CATEGORICAL, ', '.join(self.levels))
        return self.kind

    @classmethod
    def from_config_value(cls, name: str, value: str):
        """
        Parses a schema file entry such as 'continuous', 'binary' or
        'categorical: Forward, Midfielder, Defender'.
        """
        from ..utils import parse_list

        kind, _, levels = value.partition(':')
        kind = kind.strip().lower()
        return cls(name, kind, tuple(parse_list(levels)) if kind == CATEGORICAL else ())


@dataclass(frozen=True)
class Schema:
    """
    Declares the treatment column (binary action), the outcome column and the
    ordered covariates of an observation table.
    """
    treatment: str
    outcome: str
    covariates: Tuple[VariableSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'covariates', tuple(self.covariates))
        names = [self.treatment, self.outcome] + [v.name for v in self.covariates]
        for name in (self.treatment, self.outcome):
            if not _IDENTIFIER.match(name):
                raise SchemaError("'{}' is not a valid variable name.".format(name))
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise SchemaError("Schema variable names must be unique; repeated: {}."
                              .format(', '.join(duplicates)))

    @property
    def columns(self):
        """All schema columns: treatment, outcome, then covariates in order."""
        return [self.treatment, self.outcome] + [v.name for v in self.covariates]

    @property
    def covariate_names(self):
        return [v.name for v in self.covariates]

    def covariate(self, name):
        for spec in self.covariates:
            if spec.name == name:
                return spec
        raise KeyError(name)

    @classmethod
    def from_config(cls, filepath):
        """
        Reads a schema from a key-value configuration file:

            [schema]
            treatment = cross
            outcome = shot

            [covariates]
            distance_to_defender = continuous
            position = categorical: Forward, Midfielder, Defender
            ten_minute_warning = binary

        :param filepath: Path to schema file.
        :raises SchemaError if a section or key is missing or malformed.
        :rtype: Schema
        """
        from ..utils import read_config

        config = read_config(filepath)
        if not config.has_section('schema'):
            raise SchemaError("Schema file '{}' has no [schema] section.".format(filepath))
        try:
            treatment = config['schema']['treatment'].strip()
            outcome = config['schema']['outcome'].strip()
        except KeyError as e:
            raise SchemaError("Schema file '{}' is missing key {}.".format(filepath, e))
        covariates = []
        if config.has_section('covariates'):
            covariates = [VariableSpec.from_config_value(name, value)
                          for name, value in config['covariates'].items()]
        return cls(treatment, outcome, tuple(covariates))

    def to_config(self, filepath):
        """
        Writes the schema in the format read by Schema.from_config.

        :param filepath: Path to schema file.
        """
        from ..utils import new_config

        config = new_config()
        config['schema'] = {'treatment': self.treatment, 'outcome': self.outcome}
        config['covariates'] = {v.name: v.to_config_value() for v in self.covariates}
        with open(filepath, "w", encoding='utf8') as f:
            config.write(f)
