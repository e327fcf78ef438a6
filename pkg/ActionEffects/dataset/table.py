import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .schema import Schema, BINARY, CATEGORICAL, CONTINUOUS
from ..errors import TableError, DegenerateArmError

__all__ = ['ObservationTable', 'Violation', 'load_table', 'write_table', 'validate_schema']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    """
    A single broken table invariant. 'row' is the unit_id (None for
    table-level problems such as an empty arm).
    """
    row: Optional[int]
    column: Optional[str]
    reason: str

    def __str__(self):
        where = []
        if self.row is not None:
            where.append("row {}".format(self.row))
        if self.column is not None:
            where.append("column '{}'".format(self.column))
        return "{}: {}".format(', '.join(where), self.reason) if where else self.reason


@dataclass(frozen=True)
class ObservationTable:
    """
    Observational units with a binary treatment, a numeric outcome and typed
    covariates. The frame index is the unit_id (0..N-1, row order).

    Tables are treated as immutable once built: operations never modify
    'frame' in place and derived tables (see take()) are new objects.
    """
    schema: Schema
    frame: pd.DataFrame

    @classmethod
    def from_frame(cls, schema: Schema, frame: pd.DataFrame):
        """
        Builds and validates a table from a DataFrame holding (at least) the
        schema columns. Row order is preserved and unit_ids are reassigned.

        :raises TableError if any table invariant is violated.
        :rtype: ObservationTable
        """
        missing = [c for c in schema.columns if c not in frame.columns]
        if missing:
            raise TableError("Missing column(s): {}.".format(', '.join(missing)),
                             [Violation(None, c, 'missing column') for c in missing])
        frame = frame.loc[:, schema.columns].reset_index(drop=True)
        table = cls(schema, frame)
        _raise_for_violations(validate_schema(table))
        return cls(schema, _normalize_dtypes(schema, frame))

    def __len__(self):
        return len(self.frame)

    @property
    def n(self):
        return len(self.frame)

    @property
    def z(self):
        """Treatment vector as int array of 0/1."""
        return self.frame[self.schema.treatment].to_numpy(dtype=int)

    @property
    def y(self):
        """Outcome vector as float array."""
        return self.frame[self.schema.outcome].to_numpy(dtype=float)

    @property
    def unit_ids(self):
        return np.arange(len(self.frame))

    @property
    def arm_counts(self):
        """(number of units with Z=1, number of units with Z=0)"""
        z = self.z
        return int(z.sum()), int(len(z) - z.sum())

    def take(self, indices):
        """
        Returns a new table made of the rows at 'indices' (repeats allowed), in
        that order, with unit_ids reassigned 0..len(indices)-1. Arms are not
        re-validated; callers resampling rows must check arm_counts.

        :param indices: Integer positions into this table.
        :rtype: ObservationTable
        """
        frame = self.frame.iloc[np.asarray(indices, dtype=int)].reset_index(drop=True)
        return ObservationTable(self.schema, frame)

    def with_outcome(self, y):
        """Returns a copy of this table with the outcome column replaced."""
        frame = self.frame.copy()
        frame[self.schema.outcome] = np.asarray(y, dtype=float)
        return ObservationTable(self.schema, frame)

    def with_treatment(self, z):
        """Returns a copy of this table with the treatment column replaced."""
        frame = self.frame.copy()
        frame[self.schema.treatment] = np.asarray(z, dtype=int)
        return ObservationTable(self.schema, frame)


def load_table(filepath, schema: Schema):
    """
    Loads a comma-separated UTF-8 file with a header row into a validated
    ObservationTable. Row order is preserved; unit_id is the 0-based data row
    number.

    :param filepath: Path to the CSV file.
    :param schema: Schema naming the treatment, outcome and covariate columns.
    :raises FileNotFoundError if filepath does not exist.
    :raises TableError on undecodable or malformed CSV text, missing columns, unparseable numbers, categorical
            values outside the declared levels, a non-binary treatment or an
            empty treatment arm (DegenerateArmError).
    :rtype: ObservationTable
    """
    filepath = Path(filepath)
    if not filepath.is_file():
        raise FileNotFoundError("'{}' is not a valid data file path.".format(filepath))

    try:
        raw = pd.read_csv(filepath, dtype=str, keep_default_na=False, encoding='utf8')
    except (UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise TableError("Cannot parse '{}': {}".format(filepath, e),
                         [Violation(None, None, "unreadable file '{}': {}".format(filepath.name, e))]) from e
    raw.columns = [c.strip() for c in raw.columns]
    missing = [c for c in schema.columns if c not in raw.columns]
    if missing:
        raise TableError("Missing column(s) in '{}': {}.".format(filepath, ', '.join(missing)),
                         [Violation(None, c, 'missing column') for c in missing])

    frame, violations = _parse_columns(schema, raw)
    table = ObservationTable(schema, frame)
    violations += [v for v in validate_schema(table) if v not in violations]
    _raise_for_violations(violations)

    table = ObservationTable(schema, _normalize_dtypes(schema, frame))
    logger.info("Loaded %d units from %s (treated=%d, control=%d).",
                table.n, filepath.name, *table.arm_counts)
    return table


def write_table(table: ObservationTable, filepath):
    """
    Writes a table as comma-separated UTF-8 text with a header row, in schema
    column order. load_table(filepath, table.schema) reproduces the table.

    :param table: Table to write.
    :param filepath: Destination path.
    """
    table.frame.loc[:, table.schema.columns].to_csv(
        filepath, index=False, encoding='utf8', lineterminator='\n')


def validate_schema(table: ObservationTable) -> List[Violation]:
    """
    Checks every ObservationTable invariant and returns the violations found.
    An empty list means the table is valid. Violations are data, never raised.

    :param table: Table to check (may be unvalidated).
    :rtype: list of Violation
    """
    schema, frame = table.schema, table.frame
    violations = [Violation(None, c, 'missing column')
                  for c in schema.columns if c not in frame.columns]
    if violations:
        return violations

    numeric = [schema.treatment, schema.outcome] + \
              [v.name for v in schema.covariates if v.kind != CATEGORICAL]
    for column in numeric:
        values = pd.to_numeric(frame[column], errors='coerce').to_numpy(dtype=float)
        for row in np.flatnonzero(~np.isfinite(values)):
            violations.append(Violation(int(row), column, 'missing or non-finite value'))

    treatment = pd.to_numeric(frame[schema.treatment], errors='coerce').to_numpy(dtype=float)
    for row in np.flatnonzero(np.isfinite(treatment) & ~np.isin(treatment, (0, 1))):
        violations.append(Violation(int(row), schema.treatment,
                                    'treatment not binary (value {})'.format(treatment[row])))

    for spec in schema.covariates:
        column = frame[spec.name]
        if spec.kind == BINARY:
            values = pd.to_numeric(column, errors='coerce').to_numpy(dtype=float)
            for row in np.flatnonzero(np.isfinite(values) & ~np.isin(values, (0, 1))):
                violations.append(Violation(int(row), spec.name,
                                            'binary value {} not in {{0, 1}}'.format(values[row])))
        elif spec.kind == CATEGORICAL:
            values = column.astype(object)
            for row in np.flatnonzero(values.isna().to_numpy() | (values.astype(str) == '')):
                violations.append(Violation(int(row), spec.name, 'missing value'))
            bad = ~values.isna() & (values.astype(str) != '') & ~values.astype(str).isin(spec.levels)
            for row in np.flatnonzero(bad.to_numpy()):
                violations.append(Violation(
                    int(row), spec.name,
                    "level '{}' not in declared levels {{{}}}".format(values.iloc[row],
                                                                    ', '.join(spec.levels))))

    if len(frame) < 2:
        violations.append(Violation(None, None, 'table needs at least 2 units (has {})'
                                    .format(len(frame))))
    for arm in (0, 1):
        if not np.any(treatment == arm):
            violations.append(Violation(None, schema.treatment, 'arm {} empty'.format(arm)))
    return violations


def _parse_columns(schema: Schema, raw: pd.DataFrame):
    """
    Converts raw string columns to typed columns with exact float parsing.
    Returns the typed frame and the parse violations found on the way.
    """
    violations = []
    frame = pd.DataFrame(index=raw.index)
    for column in schema.columns:
        spec = schema.covariate(column) if column in schema.covariate_names else None
        if spec is not None and spec.kind == CATEGORICAL:
            frame[column] = raw[column].str.strip().astype(object)
            continue
        parsed = np.empty(len(raw))
        for row, text in enumerate(raw[column]):
            text = text.strip()
            if text == '':
                parsed[row] = math.nan
                continue
            try:
                parsed[row] = float(text)
            except ValueError:
                parsed[row] = math.nan
                violations.append(Violation(row, column, "unparseable numeric '{}'".format(text)))
        frame[column] = parsed
    return frame, violations


def _normalize_dtypes(schema: Schema, frame: pd.DataFrame):
    frame = frame.copy()
    frame[schema.treatment] = pd.to_numeric(frame[schema.treatment]).astype(int)
    frame[schema.outcome] = pd.to_numeric(frame[schema.outcome]).astype(float)
    for spec in schema.covariates:
        if spec.kind == CONTINUOUS:
            frame[spec.name] = pd.to_numeric(frame[spec.name]).astype(float)
        elif spec.kind == BINARY:
            frame[spec.name] = pd.to_numeric(frame[spec.name]).astype(int)
        else:
            frame[spec.name] = frame[spec.name].astype(str).astype(object)
    return frame


def _raise_for_violations(violations: List[Violation]):
    if not violations:
        return
    shown = '; '.join(str(v) for v in violations[:5])
    more = " (and {} more)".format(len(violations) - 5) if len(violations) > 5 else ''
    message = "Table failed validation: {}{}".format(shown, more)
    if all(v.reason.startswith('arm ') for v in violations):
        raise DegenerateArmError(message, violations)
    raise TableError(message, violations)
