import argparse
import logging
import sys

from .config import RunConfig, default_out_dir, FORMATS
from .pipeline import run_pipeline, describe_command, STAGES
from .report import report_render
from .simulate import simulate_command
from ..effects import default_workers
from ..errors import ActionEffectsError
from ..matching import MatchSpec
from ..utils import setup_logging

__all__ = ['build_parser', 'main']

logger = logging.getLogger(__name__)


def build_parser():
    """
    Builds the command-line parser. The default output directory is read from
    $ACTIONEFFECTS_OUT when the parser is built.

    :rtype: argparse.ArgumentParser
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', type=str, default=str(default_out_dir()),
                        help="Output directory (default: $ACTIONEFFECTS_OUT or ./actioneffects-out).")
    common.add_argument('--format', choices=FORMATS, default='csv', help="Table file format.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="Log debug messages.")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="Log warnings and errors only.")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument('--data', required=True, help="Observation table (CSV with a header row).")
    data.add_argument('--schema', required=True, help="Schema configuration file.")

    matching = argparse.ArgumentParser(add_help=False)
    matching.add_argument('--estimand', choices=('ate', 'att', 'atnt'), default='att')
    matching.add_argument('--no-replacement', action='store_true',
                          help="Greedy matching without replacement.")
    matching.add_argument('--no-ties', action='store_true',
                          help="Keep only the lowest-id nearest neighbor.")
    matching.add_argument('--tie-tol', type=float, default=1e-8,
                          help="Distance tolerance for tied neighbors.")
    matching.add_argument('--caliper', type=float, default=None,
                          help="Maximum propensity score distance of a match.")

    parser = argparse.ArgumentParser(
        prog='ActionEffects',
        description="Propensity score matching estimates of action effects.")
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('describe', parents=[common, data],
                        help="Descriptive statistics by treatment arm.")
    commands.add_parser('fit', parents=[common, data],
                        help="Propensity model coefficients and overlap report.")
    match = commands.add_parser('match', parents=[common, data, matching],
                                help="Nearest-neighbor match on the propensity score.")
    match.add_argument('--graphml', action='store_true', help="Also export the match graph as GraphML.")
    commands.add_parser('balance', parents=[common, data, matching],
                        help="Pre/post-match balance tables and score histograms.")
    estimate = commands.add_parser('estimate', parents=[common, data, matching],
                                   help="Full pipeline ending in the effect estimate.")
    estimate.add_argument('--bootstrap', type=int, default=None, metavar='B',
                          help="Number of bootstrap replicates (at least 2).")
    estimate.add_argument('--seed', type=int, default=0, help="Bootstrap seed.")
    estimate.add_argument('--workers', type=int, default=default_workers(),
                          help="Bootstrap worker processes (default: available CPUs).")
    estimate.add_argument('--graphml', action='store_true', help="Also export the match graph as GraphML.")
    simulate = commands.add_parser('simulate', parents=[common],
                                   help="Generate a synthetic data set with known effects.")
    simulate.add_argument('--scenario', required=True, help="Scenario file or suite scenario name.")
    commands.add_parser('report', parents=[common], help="Render the text report of the run in --out.")
    return parser


def _run_config(args):
    spec = MatchSpec(with_replacement=not getattr(args, 'no_replacement', False),
                     allow_ties=not getattr(args, 'no_ties', False),
                     tie_tolerance=getattr(args, 'tie_tol', 1e-8),
                     caliper=getattr(args, 'caliper', None))
    replicates = getattr(args, 'bootstrap', None)
    return RunConfig(
        data=args.data,
        schema=args.schema,
        estimand=getattr(args, 'estimand', 'att'),
        spec=spec,
        bootstrap=None if replicates is None else (replicates, args.seed),
        out=args.out,
        fmt=args.format,
        workers=getattr(args, 'workers', 1),
        graphml=getattr(args, 'graphml', False),
        progress=not args.quiet,
    )


def main(argv=None):
    """
    Command-line entry point.

    :param argv: Argument list (default: sys.argv[1:]).
    :return: Exit status: 0 on success, 1 on a failed run, 2 on usage errors.
    :rtype: int
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)

    try:
        if args.command == 'simulate':
            simulate_command(args.scenario, args.out)
            return 0
        if args.command == 'report':
            sys.stdout.write(report_render(args.out))
            return 0
        try:
            config = _run_config(args)
        except ValueError as e:
            parser.error(str(e))
        if args.command == 'describe':
            describe_command(config)
            return 0
        return run_pipeline(config, STAGES[args.command])
    except (ActionEffectsError, OSError) as e:
        logger.error("%s", e)
        return 1
