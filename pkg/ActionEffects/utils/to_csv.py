import json
import math
from pathlib import Path
from typing import Iterable, Collection, Mapping

__all__ = ['to_csv', 'to_json', 'write_records', 'json_safe']


def to_csv(filepath, data: Iterable, headers: Collection = None):
    """
    Writes a CSV file containing the data in 'data'.
    Uses 'headers' as file headers if provided;
    otherwise, omits file headers from the CSV file.

    :param filepath: Path to CSV file.
    :param data: Data to write to CSV file.
                Each item in 'data' is written as a row.
    :param headers: Headers for CSV file.
    """
    import csv

    with open(filepath, "w", newline='', encoding='utf8') as f:
        writer = csv.writer(f, lineterminator='\n')
        if headers:
            writer.writerow(headers)
        for row in data:
            writer.writerow([_csv_cell(value) for value in row])


def to_json(filepath, data):
    """
    Writes 'data' as indented UTF-8 JSON. Non-finite floats are written as
    the strings "inf", "-inf" and "nan" so the file stays valid JSON.

    :param filepath: Path to JSON file.
    :param data: JSON serializable object (dicts, lists, numbers, strings).
    :rtype: pathlib.Path
    """
    with open(filepath, "w", encoding='utf8') as f:
        json.dump(json_safe(data), f, indent=2)
        f.write('\n')
    return Path(filepath)


def write_records(filepath, records: Collection[Mapping], fmt='csv'):
    """
    Writes a list of flat dict records as CSV (one row per record, keys of the
    first record as headers) or as a JSON list.

    :param filepath: Output path without extension; the extension is added.
    :param records: Flat mappings sharing the same keys.
    :param fmt: 'csv' or 'json'.
    :rtype: pathlib.Path
    """
    filepath = Path(filepath).with_suffix('.' + fmt)
    records = list(records)
    if fmt == 'csv':
        headers = list(records[0]) if records else []
        to_csv(filepath, ([r.get(h) for h in headers] for r in records), headers=headers)
    elif fmt == 'json':
        to_json(filepath, records)
    else:
        raise ValueError("Unknown output format '{}'; expected csv or json.".format(fmt))
    return filepath


def json_safe(value):
    """
    Recursively converts numpy scalars to Python scalars and non-finite floats
    to marker strings.
    """
    if isinstance(value, Mapping):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def _csv_cell(value):
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        value = value.item()
    if value is None:
        return ''
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    return value
