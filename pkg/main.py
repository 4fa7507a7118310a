#!/usr/bin/env python3
"""Main CLI application for possibilistic-fusion.

This script provides a command-line interface for aggregating scenario
observations into ranked unit hierarchies and for explaining the units of
a previous run.
"""

import sys
import argparse
import logging
from typing import List, Optional

from src.core.base_parser import ParserError
from src.core.dispatcher import Dispatcher
from src.core.units import LEVELS, DoctrineError, Report
from src.processors.aggregator import ENUMERATE, GREEDY, PhaseAggregator, build_report
from src.processors.certainty import CertaintyModel
from src.processors.reporter import UnknownUnitError, explain, render_structured, render_text
from src.processors.solution_checker import SolutionChecker
from src.utils.file_io import write_text_file
from src.utils.logger import get_logger
from src.config import (
    setup_logging, APP_CONFIG, DEFAULT_DOCTRINE_PATH, FUSION_CONFIG, OUTPUT_CONFIG
)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERRUPTED = 130


class CommandLineParser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser."""
    parser = CommandLineParser(
        prog=APP_CONFIG['name'],
        description='possibilistic-fusion: aggregate observed units into ranked hierarchies',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s run --scenario data/scenarios/four_sections.scn --until company
  %(prog)s best --scenario data/scenarios/three_axes.scn --format structured --output run.rpt
  %(prog)s explain --report run.rpt --explain-id S1
        """
    )

    parser.add_argument(
        'command',
        choices=['run', 'best', 'explain'],
        help='run: k-best pipeline; best: single best solution; explain: explain a unit'
    )

    parser.add_argument(
        '--scenario', '-s',
        type=str,
        help='Path to scenario file'
    )

    parser.add_argument(
        '--doctrine', '-d',
        type=str,
        default=str(DEFAULT_DOCTRINE_PATH),
        help='Path to doctrine file (default: shipped doctrine)'
    )

    parser.add_argument(
        '--k',
        type=int,
        default=FUSION_CONFIG['k'],
        help=f"Solutions kept by each intermediate phase (default: {FUSION_CONFIG['k']})"
    )

    parser.add_argument(
        '--m',
        type=int,
        default=None,
        help='Solutions kept by the last phase (default: --k when given, else '
             f"{FUSION_CONFIG['m']})"
    )

    parser.add_argument(
        '--until',
        type=str,
        choices=list(LEVELS[1:]),
        default=LEVELS[-1],
        help=f"Highest level to build (default: {LEVELS[-1]})"
    )

    parser.add_argument(
        '--format', '-f',
        type=str,
        choices=OUTPUT_CONFIG['formats'],
        default=OUTPUT_CONFIG['default_format'],
        help=f"Output format (default: {OUTPUT_CONFIG['default_format']})"
    )

    parser.add_argument(
        '--trace',
        action='store_true',
        help='Include the per-phase trace'
    )

    parser.add_argument(
        '--explain-id',
        type=str,
        help='Unit to explain (explain command)'
    )

    parser.add_argument(
        '--report', '-r',
        type=str,
        help='Structured report of a previous run (explain command)'
    )

    parser.add_argument(
        '--parallel',
        action='store_true',
        help='Process working memories on a thread pool'
    )

    parser.add_argument(
        '--output', '-o',
        type=str,
        help='Write the output to a file instead of stdout'
    )

    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Enable verbose output'
    )

    parser.add_argument(
        '--version',
        action='version',
        version=f"%(prog)s {APP_CONFIG['version']}"
    )

    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Returns:
        Namespace object with parsed arguments.
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.m is None:
        args.m = args.k if args.k != FUSION_CONFIG['k'] else FUSION_CONFIG['m']
    if args.k < 1 or args.m < 1:
        parser.error('--k and --m must be at least 1')
    if args.command in ('run', 'best') and not args.scenario:
        parser.error(f"{args.command} needs --scenario")
    if args.command == 'explain':
        if not args.explain_id:
            parser.error('explain needs --explain-id')
        if not args.report and not args.scenario:
            parser.error('explain needs --report or --scenario')

    return args


def run_fusion(
    args: argparse.Namespace,
    dispatcher: Dispatcher,
    logger: logging.Logger,
    command: Optional[str] = None
) -> Report:
    """Parse the inputs and run the pipeline of ``command`` (default ``args.command``)."""
    command = command or args.command
    scenario = dispatcher.parse(args.scenario, kind='scenario')
    doctrine = dispatcher.parse(args.doctrine, kind='doctrine')
    logger.info(f"Scenario '{scenario.name}': {len(scenario)} observations, doctrine: {len(doctrine)} templates")

    selection = GREEDY if command == 'best' else ENUMERATE
    k, m = (1, 1) if selection == GREEDY else (args.k, args.m)
    aggregator = PhaseAggregator(doctrine, selection=selection, parallel=args.parallel)
    solutions, trace = aggregator.run_pipeline(scenario, k, m, args.until)

    result = SolutionChecker().check(solutions)
    if not result['passed']:
        for issue in result['issues']:
            logger.warning(f"  - {issue}")
    for warning in result['warnings']:
        logger.info(f"  - {warning}")

    meta = (
        ('command', command),
        ('scenario', scenario.name),
        ('k', str(k)),
        ('m', str(m)),
        ('until', args.until),
    )
    return build_report(solutions, trace if args.trace else (), meta)


def explain_unit(args: argparse.Namespace, dispatcher: Dispatcher, logger: logging.Logger) -> str:
    """Explanation of ``args.explain_id`` from a report file or a fresh run."""
    doctrine = dispatcher.parse(args.doctrine, kind='doctrine')
    if args.report:
        report = dispatcher.parse(args.report, kind='report')
    else:
        report = run_fusion(args, dispatcher, logger, command='run')
    return explain(report, args.explain_id, CertaintyModel(doctrine))


def emit(text: str, output: Optional[str], logger: logging.Logger) -> None:
    if output:
        write_text_file(output, text)
        logger.info(f"Output written to {output}")
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point.

    Returns:
        Exit code (0 success, 1 usage error, 2 input error, 130 interrupted).
    """
    args = parse_arguments(argv)

    setup_logging(verbose=args.verbose)
    logger = get_logger(__name__)

    logger.info(f"{APP_CONFIG['name']} v{APP_CONFIG['version']}: {args.command}")

    try:
        dispatcher = Dispatcher()
        if args.command == 'explain':
            text = explain_unit(args, dispatcher, logger)
        else:
            report = run_fusion(args, dispatcher, logger)
            if args.format == 'structured':
                text = render_structured(report)
            else:
                text = render_text(report, trace=args.trace)
        emit(text, args.output, logger)
        return EXIT_OK

    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user", file=sys.stderr)
        logger.info("Operation cancelled by user")
        return EXIT_INTERRUPTED

    except (ParserError, DoctrineError, FileNotFoundError, IOError) as e:
        logger.error(f"Input error: {e}", exc_info=args.verbose)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT

    except UnknownUnitError as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except Exception as e:
        logger.error(f"Error: {e}", exc_info=args.verbose)
        print(f"\nError: {e}", file=sys.stderr)

        if args.verbose:
            import traceback
            traceback.print_exc()

        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
