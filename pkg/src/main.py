"""
hBOA with distance-based transfer bias - command-line entry point
"""
import argparse
import sys

from algorithms.bias.bias_table import DEFAULT_EPSILON, MODES
from algorithms.hboa.config import HARVEST_POLICIES
from algorithms.problem_registry import get_available_families
from harness.commands import COMMANDS
from harness.config_file import config_defaults, load_config_file
from harness.experiments import ARMS
from utils.errors import HboaError
from utils.logging_setup import configure_logging


def _common_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--seed', type=int, default=0, help='master seed of all randomness')
    parser.add_argument('--config', help='key=value file with defaults for any long option')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    return parser


def _hboa_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--population', type=int, default=100, help='population size N')
    parser.add_argument('--max-iterations', type=int, help='iteration cap (default n)')
    parser.add_argument('--sporadic', action='store_true', help='sporadic model building')
    parser.add_argument('--window', type=int, help='RTS window (default min(n, N/20))')
    parser.add_argument('--offspring-fraction', type=float, default=0.5)
    parser.add_argument('--harvest', choices=HARVEST_POLICIES, default='final', help='models kept per run')
    parser.add_argument('--max-splits', type=int)
    parser.add_argument('--penalty-factor', type=float, default=0.5, help='penalty per leaf in log2(N) units')
    return parser


def _family_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--L', type=int, help='spin glass lattice side')
    parser.add_argument('--n', type=int, help='vertex count (mvc) or string length (onemax)')
    parser.add_argument('--c', type=float, help='edges-to-vertices ratio (mvc)')
    parser.add_argument('--nv', type=int, help='proposition count (maxsat)')
    parser.add_argument('--p', type=float, help='morphing probability (maxsat)')
    parser.add_argument('--count', type=int, help='number of instances (default 1; xval: one per fold)')
    return parser


def _experiment_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--kappa', type=float, nargs='+', default=[5.0], help='bias strengths to sweep')
    parser.add_argument('--arm', choices=ARMS, default='dbb', help='treatment compared with plain hBOA')
    parser.add_argument('--workers', type=int, default=1, help='parallel instance jobs')
    parser.add_argument('--bisect', action='store_true', help='bisect N per instance first')
    parser.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON, help='probability floor')
    parser.add_argument('--report', default='report.csv', help='per-instance CSV')
    parser.add_argument('--summary', help='aggregated CSV')
    parser.add_argument('--timing', choices=('on', 'off'), default='on',
                        help='off leaves wall-clock columns empty')
    return parser


def build_parser():
    """Argument parser with one subparser per command; subparsers in parser.commands"""
    common, hboa, family, experiment = _common_options(), _hboa_options(), _family_options(), _experiment_options()
    parser = argparse.ArgumentParser(prog='hboa', description='hBOA with distance-based transfer bias')
    sub = parser.add_subparsers(dest='command', required=True)
    commands = {}

    gen = sub.add_parser('gen', parents=[common, family], help='generate instance files')
    gen.add_argument('family', choices=get_available_families())
    gen.add_argument('--out', help='output directory')
    commands['gen'] = gen

    run = sub.add_parser('run', parents=[common, hboa], help='single hBOA run')
    run.add_argument('--instance')
    run.add_argument('--bias', help='bias table file')
    run.add_argument('--kappa', type=float, default=0.0)
    run.add_argument('--trace', help='trace file (default stdout)')
    run.add_argument('--models-out', help='model dump file')
    commands['run'] = run

    bisect = sub.add_parser('bisect', parents=[common, hboa], help='minimal population for 10/10 success')
    bisect.add_argument('--instance')
    bisect.add_argument('--trials', type=int, default=10)
    bisect.add_argument('--start', type=int, default=32)
    bisect.add_argument('--verify', action='store_true', help='re-check on fresh seeds')
    commands['bisect'] = bisect

    harvest = sub.add_parser('harvest', parents=[common, hboa], help='models -> bias table')
    harvest.add_argument('--instances', nargs='+', help='instance files or directories')
    harvest.add_argument('--models-in', help='existing model dump file instead of new runs')
    harvest.add_argument('--models-out', help='write the harvested model dumps')
    harvest.add_argument('--mode', choices=MODES, default='pair')
    harvest.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON)
    harvest.add_argument('--workers', type=int, default=1)
    harvest.add_argument('--bisect', action='store_true')
    harvest.add_argument('--out', help='bias table file')
    commands['harvest'] = harvest

    xval = sub.add_parser('xval', parents=[common, hboa, family, experiment], help='crossvalidated transfer')
    xval.add_argument('--instances', nargs='+', help='instance files or directories')
    xval.add_argument('--problem', choices=get_available_families(), help='generate instances of this family')
    xval.add_argument('--folds', type=int, default=10)
    commands['xval'] = xval

    transfer = sub.add_parser('transfer', parents=[common, hboa, experiment], help='cross-size transfer')
    transfer.add_argument('--source', nargs='+', help='smaller instances to harvest')
    transfer.add_argument('--target', nargs='+', help='larger instances to run')
    transfer.add_argument('--bias', help='pooled bias table instead of harvesting')
    commands['transfer'] = transfer

    report = sub.add_parser('report', parents=[common], help='aggregate report CSVs')
    report.add_argument('inputs', nargs='+')
    report.add_argument('--out', help='summary CSV')
    commands['report'] = report

    parser.commands = commands
    return parser


def main(argv=None):
    """
    Returns:
        Exit status: 0 success, 2 usage or parse error, 3 infeasible
        configuration, 4 oracle refusal
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            subparser = parser.commands[args.command]
            subparser.set_defaults(**config_defaults(subparser, load_config_file(args.config), args.config))
            args = parser.parse_args(argv)
        configure_logging(args.verbose)
        return COMMANDS[args.command](args)
    except HboaError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return exc.exit_code


if __name__ == '__main__':
    sys.exit(main())
