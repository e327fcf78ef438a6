import json
import logging
from pathlib import Path

import pandas as pd

from .pipeline import ARTIFACTS, MANIFEST_FILE
from ..balance import format_smd, IMBALANCE_THRESHOLD
from ..errors import ManifestError

__all__ = ['report_render', 'read_records', 'format_p_value', 'REPORT_FILE', 'SECTIONS']

logger = logging.getLogger(__name__)

REPORT_FILE = 'report.txt'

SECTIONS = (
    'Descriptive statistics and pre-match balance',
    'Propensity score model',
    'Propensity score overlap',
    'Matching',
    'Post-match balance',
    'Effect estimate',
)

_RULE = '=' * 72


def read_records(filepath):
    """
    Reads records written by utils.write_records. CSV cells stay strings
    (empty for missing values); JSON values keep their JSON types.

    :rtype: list of dict
    """
    filepath = Path(filepath)
    if filepath.suffix == '.json':
        with open(filepath, "r", encoding='utf8') as f:
            return json.load(f)
    frame = pd.read_csv(filepath, dtype=str, keep_default_na=False, encoding='utf8')
    return frame.to_dict(orient='records')


def format_p_value(p):
    """Three decimals, with values below 0.001 shown as '<0.001'."""
    p = _num(p)
    if p is None:
        return ''
    return '<0.001' if p < 0.001 else '{:.3f}'.format(p)


def report_render(run_dir):
    """
    Renders the artifacts of a complete run directory as one plain-text
    report, written to <run_dir>/report.txt. Sections follow the analysis:
    descriptive statistics with pre-match balance, the propensity model and
    its overlap, the matching, post-match balance and the effect estimate.
    SMDs at or above 10% are marked with '*', and residual imbalance after
    matching adds a warning line.

    :param run_dir: Directory written by run_pipeline.
    :raises ManifestError if the manifest is missing or incomplete.
    :rtype: str
    """
    run_dir = Path(run_dir)
    manifest = _read_manifest(run_dir)
    files = {a['name']: [run_dir / f for f in a['files']] for a in manifest['artifacts']}

    with open(files['estimate'][0], "r", encoding='utf8') as f:
        estimate = json.load(f)

    lines = ['ACTION EFFECTS REPORT', 'Estimand: {}'.format(manifest['estimand']), '']
    lines += _section(SECTIONS[0], _balance_lines(read_records(files['balance_pre'][0])))
    lines += _section(SECTIONS[1], _coefficient_lines(read_records(files['coefficients'][0])))
    lines += _section(SECTIONS[2], _overlap_lines(read_records(files['overlap'][0])))
    match_files = {Path(p).stem: p for p in files['matches']}
    lines += _section(SECTIONS[3], _matching_lines(read_records(match_files['matches']),
                                                   read_records(match_files['k_counts']), estimate))
    post = read_records(files['balance_post'][0])
    lines += _section(SECTIONS[4], _balance_lines(post) + _imbalance_warning(post))
    lines += _section(SECTIONS[5], _estimate_lines(estimate))

    text = '\n'.join(lines).rstrip('\n') + '\n'
    with open(run_dir / REPORT_FILE, "w", encoding='utf8') as f:
        f.write(text)
    logger.info("Wrote %s.", run_dir / REPORT_FILE)
    return text


def _read_manifest(run_dir):
    path = run_dir / MANIFEST_FILE
    if not path.is_file():
        raise ManifestError("No manifest in '{}'; run the pipeline first.".format(run_dir))
    try:
        with open(path, "r", encoding='utf8') as f:
            manifest = json.load(f)
    except ValueError as e:
        raise ManifestError("Unreadable manifest '{}': {}.".format(path, e))
    names = tuple(a.get('name') for a in manifest.get('artifacts', []))
    if not manifest.get('complete') or names != ARTIFACTS:
        missing = [name for name in ARTIFACTS if name not in names]
        raise ManifestError("Incomplete run in '{}'; missing artifact(s): {}."
                            .format(run_dir, ', '.join(missing) or 'none (run failed)'))
    return manifest


def _section(title, body):
    return [_RULE, title, _RULE] + body + ['']


def _table(rows, columns):
    return pd.DataFrame(rows, columns=columns).to_string(index=False).splitlines()


def _num(value):
    if value is None or value == '':
        return None
    return float(value)


def _flag(value):
    return value is True or value == 'True'


def _count(value):
    value = _num(value)
    return '{:d}'.format(int(value)) if float(value).is_integer() else '{:.1f}'.format(value)


def _balance_lines(records):
    columns = ('Variable', 'Overall', 'No action (0)', 'Action (1)', 'SMD (%)')
    suffixes = ('overall', '0', '1')
    rows = []
    for i, r in enumerate(records):
        if i == 0:
            rows.append(['n'] + [_count(r['n_' + s]) for s in suffixes] + [''])
            continue
        smd = _num(r['smd_percent'])
        smd_cell = '' if smd is None else format_smd(smd) + (' *' if _flag(r['flag']) else '')
        has_count, has_mean = _num(r['count_0']) is not None, _num(r['mean_0']) is not None
        if has_count:
            label = r['variable'] if smd is not None else '  ' + str(r['level'])
            cells = ['{} ({:.1f}%)'.format(_count(r['count_' + s]), _num(r['percent_' + s]))
                     for s in suffixes]
        elif has_mean:
            label = r['variable']
            cells = ['{:.2f} ({:.2f})'.format(_num(r['mean_' + s]), _num(r['sd_' + s]))
                     for s in suffixes]
        else:
            label, cells = r['variable'], ['', '', '']
        rows.append([label] + cells + [smd_cell])
    return _table(rows, columns) + [
        '',
        'Cells: mean (SD) for continuous, count (%) for binary and categorical variables.',
        '* SMD >= {:g}% indicates covariate imbalance.'.format(IMBALANCE_THRESHOLD),
    ]


def _imbalance_warning(records):
    flagged = ['{} ({})'.format(r['variable'], format_smd(_num(r['smd_percent'])))
               for r in records[1:] if _flag(r['flag'])]
    if not flagged:
        return []
    return ['WARNING: residual imbalance after matching (SMD >= {:g}%): {}'
            .format(IMBALANCE_THRESHOLD, ', '.join(flagged))]


def _coefficient_lines(records):
    rows = [[r['term'], '{:.3f}'.format(_num(r['estimate'])), '{:.3f}'.format(_num(r['std_error'])),
             format_p_value(r['p_value'])] for r in records]
    return _table(rows, ('Term', 'Estimate', 'Std. Error', 'p-value'))


def _overlap_lines(records):
    rows = [[r['arm'], _count(r['n']), _count(r['below']), _count(r['above']),
             '{:.2%}'.format(_num(r['outside_fraction'])), '{:.4f}'.format(_num(r['min'])),
             '{:.4f}'.format(_num(r['max']))] for r in records]
    lines = _table(rows, ('Arm', 'n', 'Below', 'Above', 'Outside', 'Min', 'Max'))
    if records and _flag(records[0]['poor_overlap']):
        lines.append('WARNING: poor overlap: more than 5% of an arm lies outside [{}, {}].'
                     .format(records[0]['lower_threshold'], records[0]['upper_threshold']))
    return lines


def _matching_lines(matches, k_counts, estimate):
    focal = {r['focal_id'] for r in matches}
    k = [_num(r['k_count']) for r in k_counts]
    used = [value for value in k if value > 0]
    return [
        'Matched pairs:            {}'.format(len(matches)),
        'Matched focal units:      {}'.format(len(focal)),
        'Unmatched focal units:    {}'.format(estimate['n_unmatched']),
        'Units used as matches:    {}'.format(len(used)),
        'Units reused (K > 1):     {}'.format(sum(value > 1 for value in used)),
        'Maximum K:                {}'.format(_count(max(used, default=0.0))),
    ]


def _estimate_lines(estimate):
    lines = [
        '{} estimate:            {:.4f}'.format(estimate['estimand'], _num(estimate['tau_hat'])),
        'Abadie-Imbens SE:        {:.4f}'.format(_num(estimate['ai_se'])),
        '95% CI (Abadie-Imbens):  [{:.4f}, {:.4f}]'.format(*map(_num, estimate['ci95_ai'])),
    ]
    if estimate.get('bootstrap_se') is not None:
        lines += [
            'Bootstrap SE:            {:.4f}  (B = {}, seed = {}, dropped = {})'.format(
                _num(estimate['bootstrap_se']), estimate['B'], estimate['seed'],
                estimate['dropped_replicates']),
            '95% CI (bootstrap):      [{:.4f}, {:.4f}]'.format(*map(_num, estimate['ci95_bootstrap'])),
        ]
    lines.append('Focal units:             {}'.format(estimate['n_focal']))
    return lines
