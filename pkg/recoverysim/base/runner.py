""" The command-line entry point.

    recoverysim run --config F [--trace-out G] [--seed S]
    recoverysim check --trace G [--checker NAME ...]
    recoverysim suite [--dir D] [--seeds K]
    recoverysim demo eve|no-wait|double-spend

    Exit values: 0 ok, 1 a checker failed, 2 configuration or input
    error.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import argparse
import datetime
import logging
import logging.config
import sys

from twisted.python import log

from recoverysim import VERSION_STRING
from recoverysim.base.utils import log_text


def _build_parser():
    """ Returns: the argparse parser with one sub-parser per command. """
    parser = argparse.ArgumentParser(
        prog='recoverysim',
        description='freezing and recovery gadget simulator')
    parser.add_argument(
        '-v', '--version',
        help='Display the version number',
        action='store_true',
        default=False)
    parser.add_argument(
        '-d', '--debug',
        help='enable debug output',
        action='store_true',
        default=False)
    commands = parser.add_subparsers(dest='command')

    run_parser = commands.add_parser('run', help='run a scenario')
    run_parser.add_argument('--config', required=True,
                            help='scenario file (.json or .py)')
    run_parser.add_argument('--trace-out', help='write the JSONL trace here')
    run_parser.add_argument('--seed', type=int,
                            help='override the scenario seed')

    check_parser = commands.add_parser('check', help='check a trace')
    check_parser.add_argument('--trace', required=True,
                              help='JSONL trace file')
    check_parser.add_argument('--checker', action='append',
                              help='run only this checker (repeatable)')

    suite_parser = commands.add_parser('suite', help='run the corpus')
    suite_parser.add_argument('--dir', help='scenario directory (default: '
                                            '$RECOVERYSIM_SCENARIO_DIR or the '
                                            'bundled corpus)')
    suite_parser.add_argument('--seeds', type=int, default=1,
                              help='seeds per scenario (default: 1)')

    demo_parser = commands.add_parser('demo', help='run a narrative demo')
    demo_parser.add_argument('name', choices=['eve', 'no-wait',
                                              'double-spend'])
    return parser


def _setup_logging_config(debug):
    """ Console logging.  Trace lines already carry their round header,
        so only debug output adds the logger name.
    """
    level = 'DEBUG' if debug else 'INFO'
    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'plain': {'format': '%(message)s'},
            'named': {'format': '%(name)s: %(message)s'},
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'named' if debug else 'plain',
            },
        },
        'root': {'handlers': ['console'], 'level': level},
        'loggers': {
            'twisted': {'level': level if debug else 'WARNING'},
        },
    })


def _make_controller(args):
    # imported late so that --version works without the harness
    # pylint: disable=import-outside-toplevel
    from recoverysim.harness.controllers import CheckController, \
        DemoController, ScenarioController, SuiteController

    if args.command == 'run':
        return ScenarioController(args.config, trace_out=args.trace_out,
                                  seed=args.seed)
    if args.command == 'check':
        return CheckController(args.trace, checkers=args.checker)
    if args.command == 'suite':
        return SuiteController(args.dir, seeds=args.seeds)
    return DemoController(args.name)


def main(argv=None):
    """ The recoverysim console script.  Always exits through sys.exit. """
    argv = sys.argv[1:] if argv is None else list(argv)

    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.version:
        print(f"recoverysim, version {VERSION_STRING}")
        sys.exit(0)
    if args.command is None:
        parser.print_usage()
        sys.exit(2)

    _setup_logging_config(args.debug)
    logger = logging.getLogger()
    if args.debug:
        # twisted log events are forwarded to the "twisted" logger
        observer = log.PythonLoggingObserver()
        observer.start()

    controller = _make_controller(args)
    log_text(logger.info, None, '================')
    log_text(logger.info, None, f"Starting {controller.description}: "
                                f"{datetime.datetime.now().date()}")
    log_text(logger.info, None, '================')

    exit_value = controller.execute()

    log_text(logger.info, None, '================')
    log_text(logger.info, None, f"Status: {controller.status}\n")
    sys.exit(exit_value)
