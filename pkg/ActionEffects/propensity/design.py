import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..dataset import BINARY, CATEGORICAL, CONTINUOUS

__all__ = ['DesignMatrix', 'INTERCEPT', 'encode_design', 'encode_covariates', 'design_columns']

logger = logging.getLogger(__name__)

INTERCEPT = '(Intercept)'


@dataclass(frozen=True)
class DesignMatrix:
    """
    Numeric predictors for the propensity model: intercept first, then
    covariates in schema order. Categorical covariates expand into one 0/1
    indicator per non-reference level, named '<variable>: <level>'.

    'flags' lists non-fatal problems found while encoding (constant columns,
    categorical levels never observed).
    """
    columns: Tuple[str, ...]
    values: np.ndarray
    flags: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def shape(self):
        return self.values.shape

    def column(self, name):
        return self.values[:, self.columns.index(name)]


def design_columns(schema):
    """
    Returns the ordered design column names for a schema.

    :rtype: tuple of str
    """
    columns = [INTERCEPT]
    for spec in schema.covariates:
        if spec.kind == CATEGORICAL:
            columns.extend("{}: {}".format(spec.name, level) for level in spec.levels[1:])
        else:
            columns.append(spec.name)
    return tuple(columns)


def encode_covariates(schema, frame):
    """
    Encodes the covariate columns of 'frame' according to 'schema'.
    Does not need treatment or outcome columns.

    :param schema: dataset.Schema.
    :param frame: DataFrame holding the schema's covariate columns.
    :rtype: DesignMatrix
    """
    n = len(frame)
    blocks = [np.ones((n, 1))]
    flags = []
    for spec in schema.covariates:
        if spec.kind in (CONTINUOUS, BINARY):
            block = frame[spec.name].to_numpy(dtype=float).reshape(n, 1)
            if n and np.all(block == block[0]):
                flags.append("column '{}' is constant".format(spec.name))
        else:
            values = frame[spec.name].astype(str).to_numpy()
            block = np.column_stack([(values == level).astype(float) for level in spec.levels[1:]])
            for level in spec.levels:
                if not np.any(values == level):
                    flags.append("level '{}' of '{}' is never observed".format(level, spec.name))
        blocks.append(block)

    for flag in flags:
        logger.warning("Design matrix: %s.", flag)
    return DesignMatrix(design_columns(schema), np.hstack(blocks), tuple(flags))


def encode_design(table):
    """
    Builds the propensity design matrix of a validated table. Column order is
    deterministic: intercept, then covariates in schema order, with
    categoricals expanding in declared level order (first level is the
    reference and gets no column).

    Constant non-intercept columns and unobserved categorical levels are
    flagged (logged and recorded in DesignMatrix.flags), not rejected.

    :param table: dataset.ObservationTable.
    :rtype: DesignMatrix
    """
    return encode_covariates(table.schema, table.frame)
