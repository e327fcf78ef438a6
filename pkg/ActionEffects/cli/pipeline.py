import logging
from pathlib import Path

from .config import RunConfig
from ..balance import balance_table, ps_histogram
from ..dataset import Schema, load_table, descriptive_summary
from ..effects import fit_propensity, estimate_from_match
from ..errors import ActionEffectsError
from ..matching import nearest_neighbor_match, expand_matched_sample, build_match_graph, write_match_graph
from ..propensity import wald_inference, overlap_report
from ..utils import to_json, write_records

__all__ = ['Manifest', 'Pipeline', 'run_pipeline', 'describe_command', 'STAGES',
           'ARTIFACTS', 'MANIFEST_FILE', 'WARNINGS_FILE']

logger = logging.getLogger(__name__)

ARTIFACTS = ('coefficients', 'overlap', 'balance_pre', 'matches', 'balance_post', 'histograms', 'estimate')
MANIFEST_FILE = 'manifest.json'
WARNINGS_FILE = 'warnings.txt'


class Manifest:
    """
    Record of the artifacts a run completed, in completion order. Written
    last, so a run directory without a manifest belongs to a crashed run.
    """

    def __init__(self, requested=ARTIFACTS):
        self.requested = tuple(requested)
        self.artifacts = []

    def add(self, name, *paths):
        self.artifacts.append({'name': name, 'files': [Path(p).name for p in paths]})
        logger.debug("Completed artifact '%s'.", name)

    @property
    def names(self):
        return tuple(a['name'] for a in self.artifacts)

    @property
    def complete(self):
        return self.names == self.requested

    def write(self, out_dir, config: RunConfig, error=None):
        data = {
            'complete': self.complete,
            'requested': list(self.requested),
            'artifacts': self.artifacts,
            'estimand': str(config.estimand),
            'format': config.fmt,
            'warnings': WARNINGS_FILE,
            'error': error,
        }
        return to_json(Path(out_dir) / MANIFEST_FILE, data)


class Pipeline:
    """
    Stages of a matching analysis over one run directory. Each stage writes
    its artifacts and registers them with the manifest; later stages reuse
    the state of earlier ones.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = config.out
        self.manifest = Manifest()
        self.warnings = []
        self.table = None
        self.scores = None
        self.match_result = None

    def _write(self, name, records):
        return write_records(self.out / name, records, self.config.fmt)

    def load(self):
        schema = Schema.from_config(self.config.schema)
        self.table = load_table(self.config.data, schema)

    def fit(self):
        design, model, self.scores = fit_propensity(self.table)
        self.warnings.extend("design matrix: {}".format(flag) for flag in design.flags)
        path = self._write('coefficients', [row.as_record() for row in wald_inference(model)])
        self.manifest.add('coefficients', path)

        report = overlap_report(self.scores, self.table.z)
        if report.poor_overlap:
            self.warnings.append("poor overlap: more than 5% of an arm has a propensity score "
                                 "outside [{}, {}]".format(*report.thresholds))
        self.manifest.add('overlap', self._write('overlap', report.records()))

    def balance_pre(self):
        pre = balance_table(self.table, scores=self.scores)
        self.manifest.add('balance_pre', self._write('balance_pre', pre.records()))

    def match(self):
        config = self.config
        self.match_result = nearest_neighbor_match(self.scores, self.table.z, config.spec, config.estimand)
        if self.match_result.unmatched:
            self.warnings.append("{} focal unit(s) unmatched within the caliper"
                                 .format(len(self.match_result.unmatched)))
        paths = [self._write('matches', self.match_result.records()),
                 self._write('k_counts', self.match_result.k_count_records())]
        if config.graphml:
            graph = build_match_graph(self.match_result, self.scores, self.table.z)
            paths.append(self.out / 'match_graph.graphml')
            write_match_graph(graph, paths[-1])
        self.manifest.add('matches', *paths)

    def balance_post(self):
        post = balance_table(self.table, self.match_result, self.scores)
        for row in post.flagged:
            self.warnings.append("residual imbalance after matching: {} SMD {:.2f}%"
                                 .format(row.variable, row.smd_percent))
        self.manifest.add('balance_post', self._write('balance_post', post.records()))

    def histograms(self):
        sample = expand_matched_sample(self.table, self.match_result)
        pre = ps_histogram(self.scores, self.table.z)
        post = ps_histogram(self.scores[sample.source_ids], sample.z, sample.weights)
        path = self._write('histograms', pre.records('pre') + post.records('post'))
        self.manifest.add('histograms', path)

    def estimate(self):
        config = self.config
        result = estimate_from_match(self.table, self.match_result, self.scores, config.spec,
                                     config.bootstrap, config.workers, config.progress)
        if result.dropped_replicates:
            self.warnings.append("dropped {} of {} bootstrap replicates"
                                 .format(result.dropped_replicates, result.bootstrap_replicates))
        self.manifest.add('estimate', to_json(self.out / 'estimate.json', result.as_dict()))

    def write_warnings(self):
        path = self.out / WARNINGS_FILE
        with open(path, "w", encoding='utf8') as f:
            f.writelines(warning + '\n' for warning in self.warnings)
        return path


STAGES = {
    'fit': ('fit',),
    'match': ('fit', 'match'),
    'balance': ('fit', 'balance_pre', 'match', 'balance_post', 'histograms'),
    'estimate': ('fit', 'balance_pre', 'match', 'balance_post', 'histograms', 'estimate'),
}


def run_pipeline(config: RunConfig, stages=STAGES['estimate']):
    """
    Runs the analysis stages in order and writes their artifacts to
    config.out: propensity coefficients, overlap report, pre-match balance,
    match result, post-match balance, pre/post histograms and the effect
    estimate. Warnings go to warnings.txt (and are logged to stderr) without
    failing the run. The manifest is written last, listing what completed.

    :param config: RunConfig.
    :param stages: Pipeline stage names to run (default: all).
    :return: Exit status, 0 iff every requested artifact was written.
    :rtype: int
    """
    try:
        out = config.prepare_out()
    except OSError as e:
        logger.error("%s", e)
        return 1
    # a stale manifest would describe an older run
    (out / MANIFEST_FILE).unlink(missing_ok=True)

    pipeline = Pipeline(config)
    pipeline.manifest.requested = tuple(name for name in ARTIFACTS
                                        if _stage_of(name) in stages)
    error = None
    try:
        pipeline.load()
        for stage in stages:
            getattr(pipeline, stage)()
    except (ActionEffectsError, OSError) as e:
        error = "{}: {}".format(type(e).__name__, e)
        logger.error("Run failed after %d artifact(s): %s", len(pipeline.manifest.artifacts), error)
    except Exception as e:
        error = "{}: {}".format(type(e).__name__, e)
        raise
    finally:
        pipeline.write_warnings()
        pipeline.manifest.write(out, config, error)

    return 0 if error is None and pipeline.manifest.complete else 1


def _stage_of(artifact):
    return {'coefficients': 'fit', 'overlap': 'fit', 'matches': 'match'}.get(artifact, artifact)


def describe_command(config: RunConfig):
    """
    Writes the descriptive summary (per-arm and overall) of the data set.

    :rtype: pathlib.Path
    """
    out = config.prepare_out()
    table = load_table(config.data, Schema.from_config(config.schema))
    return write_records(out / 'summary', descriptive_summary(table).records(), config.fmt)
