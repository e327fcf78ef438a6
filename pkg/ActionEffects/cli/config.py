import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from ..errors import ConfigError
from ..matching import Estimand, MatchSpec

__all__ = ['RunConfig', 'default_out_dir', 'OUT_ENV', 'FORMATS']

OUT_ENV = 'ACTIONEFFECTS_OUT'
DEFAULT_OUT = 'actioneffects-out'
FORMATS = ('csv', 'json')


def default_out_dir():
    """Output directory from $ACTIONEFFECTS_OUT, else ./actioneffects-out."""
    return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a pipeline run needs. 'bootstrap' is (replicates, seed) or None
    to skip the bootstrap standard error.
    """
    data: Path
    schema: Path
    estimand: Estimand = Estimand.ATT
    spec: MatchSpec = field(default_factory=MatchSpec)
    bootstrap: Optional[Tuple[int, int]] = None
    out: Path = field(default_factory=default_out_dir)
    fmt: str = 'csv'
    workers: int = 1
    graphml: bool = False
    progress: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'data', Path(self.data))
        object.__setattr__(self, 'schema', Path(self.schema))
        object.__setattr__(self, 'out', Path(self.out))
        try:
            object.__setattr__(self, 'estimand', Estimand.parse(self.estimand))
        except ValueError as e:
            raise ConfigError(str(e))
        if self.fmt not in FORMATS:
            raise ConfigError("Unknown output format '{}'; expected csv or json.".format(self.fmt))
        if self.bootstrap is not None:
            replicates, seed = self.bootstrap
            if replicates < 2:
                raise ConfigError("--bootstrap needs at least 2 replicates (got {}).".format(replicates))
            if seed < 0:
                raise ConfigError("--seed must be non-negative (got {}).".format(seed))
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1 (got {}).".format(self.workers))

    def prepare_out(self):
        """
        Creates the output directory if needed.

        :raises PermissionError if the directory is not writable.
        :rtype: pathlib.Path
        """
        self.out.mkdir(parents=True, exist_ok=True)
        if not os.access(self.out, os.W_OK):
            raise PermissionError("Output directory '{}' is not writable.".format(self.out))
        return self.out
