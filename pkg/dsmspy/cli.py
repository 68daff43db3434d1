from argparse import ArgumentParser, Namespace
import json
import logging
import sys
from typing import List

from dsmspy.analysis import AnalysisFault
from dsmspy.configuration import ExperimentConfig, HstFile, parse_check_mode
from dsmspy.configuration.base import installed_version
from dsmspy.experiment import replay, run_experiment
from dsmspy.interface import ServingSystem
from dsmspy.network import embed_frt, metric_closure, normalize_weights, WeightedGraph
from dsmspy.protocol import ProtocolViolation
from dsmspy.utilities import format_fraction, parse_fraction

LOGGER = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


def parse_arguments(argv: List[str] = None) -> Namespace:
    parser = ArgumentParser(
        prog='dsmspy',
        description='simulate, check and analyse link-reversal scheduling of mobile servers on HSTs',
    )
    parser.add_argument('--version', action='version', version=f'dsmspy {installed_version()}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='log more; repeat for debug output')
    parser.add_argument('-q', '--quiet', action='store_true', help='log errors only')

    subparsers = parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', help='run one scenario file')
    simulate.add_argument('--scenario', required=True, help='scenario JSON')
    simulate.add_argument('--out', required=True, help='output directory')
    simulate.add_argument('--check-mode', default='off', help='off, inline, sampled or sampled:N')
    simulate.add_argument('--overwrite', action='store_true', help='overwrite existing output files')

    experiment = subparsers.add_parser('experiment', help='run an experiment configuration')
    experiment.add_argument('--config', required=True, help='experiment configuration JSON')

    replayed = subparsers.add_parser('replay', help='check and analyse a stored trace')
    replayed.add_argument('--trace', required=True, help='trace file')
    replayed.add_argument('--out', help='output directory')

    embed = subparsers.add_parser('embed', help='embed a graph into an HST')
    embed.add_argument('--graph', required=True, help='graph JSON')
    embed.add_argument('--alpha', default='2', help='level ratio, greater than 1')
    embed.add_argument('--seed', type=int, default=0, help='embedding seed')
    embed.add_argument('--out', help='HST file; printed to standard output when omitted')

    return parser.parse_args(argv)


def configure_logging(verbose: int, quiet: bool):
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='[%(asctime)s] %(name)-20s %(levelname)-8s: %(message)s')


def simulate(arguments: Namespace) -> int:
    check_mode, sample_every = parse_check_mode(arguments.check_mode)
    system = ServingSystem.from_file(arguments.scenario, check_mode=check_mode, sample_every=sample_every)
    system.write(arguments.out, overwrite=arguments.overwrite)
    report = system.report
    LOGGER.info(f'cost {format_fraction(system.cost)}, checks {"passed" if report.passed else "failed"}')
    if not report.passed:
        LOGGER.error(f'failed checks: {report.checks.failures}')
    return EXIT_PASSED if report.passed else EXIT_VIOLATION


def experiment(arguments: Namespace) -> int:
    report = run_experiment(ExperimentConfig.from_file(arguments.config))
    print(json.dumps(report['aggregates'], sort_keys=True, indent=2))
    return EXIT_PASSED if report['passed'] else EXIT_VIOLATION


def replay_trace(arguments: Namespace) -> int:
    system = replay(arguments.trace, arguments.out)
    report = system.report
    if arguments.out is None:
        print(report)
    return EXIT_PASSED if report.passed else EXIT_VIOLATION


def embed(arguments: Namespace) -> int:
    with open(arguments.graph) as input_file:
        graph = normalize_weights(WeightedGraph.from_json(json.load(input_file)))
    hst = embed_frt(metric_closure(graph), parse_fraction(arguments.alpha), arguments.seed)
    hst_file = HstFile(hst)
    if arguments.out is not None:
        hst_file.write(arguments.out, overwrite=True)
    else:
        print(hst_file)
    return EXIT_PASSED


COMMANDS = {
    'simulate': simulate,
    'experiment': experiment,
    'replay': replay_trace,
    'embed': embed,
}


def main(argv: List[str] = None) -> int:
    arguments = parse_arguments(argv)
    configure_logging(arguments.verbose, arguments.quiet)

    try:
        return COMMANDS[arguments.command](arguments)
    except (ProtocolViolation, AnalysisFault) as error:
        LOGGER.error(f'{error.__class__.__name__}: {error}')
        return EXIT_VIOLATION
    except (FileNotFoundError, KeyError, TypeError, ValueError) as error:
        LOGGER.error(f'{error.__class__.__name__}: {error}')
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
