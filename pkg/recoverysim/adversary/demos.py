""" Narrative attack scenarios with annotated timelines.

    no-wait: clients confirm the moment a witness arrives, so two
        clients shown conflicting forks in the same round both confirm.
    double-spend: the same attack against the standard waits and a
        recovery at r_rec; every checker passes.
    eve: Alice confirms ahead of Bob, Eve forks Bob's view and her
        corrupted validators broadcast the fork at r_rec; the new
        genesis still extends what Alice confirmed.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging

from recoverysim.base import RecoverysimDemoError
from recoverysim.base.utils import log_text
from recoverysim.harness.checkers import run_checkers, summary_line
from recoverysim.harness.scenario import ScenarioConfig
from recoverysim.harness.simulator import run

TIMELINE_KINDS = ('confirm', 'bookmark', 'freeze', 'recover', 'new_genesis',
                  'restart')


def no_wait_scenario(client_wait=0, client_gossip=True):
    """ n=4, delta=2, standalone freezing gadget; three validators are
        corrupted at r_maj=12 and the adversary double-spends at r_maj,
        both forks arriving in the next round.
    """
    return {
        'name': 'no-wait' if client_wait == 0 else 'with-wait',
        'description': 'double spend against clients that do not wait',
        'n': 4, 'delta': 2, 'horizon': 30,
        'gadget': 'freezing',
        'protocol': {'kind': 'scripted_oracle'},
        'client_wait': client_wait,
        'client_gossip': client_gossip,
        'corruption': {
            'corrupt': [{'validator': i, 'round': 12} for i in range(3)],
            'r_maj': 12,
        },
        'clients': 2,
        'transactions': {'count': 5, 'start': 1, 'every': 2},
        'adversary': {'strategy': 'double_spend_equivocator',
                      'params': {'skew': 1, 'spread': 0}},
    }


def _healing_scenario(name, strategy, params=None):
    """ n=7, delta=2: four validators fall at r_maj=20, three of them
        are removed at r_rec=30.
    """
    return {
        'name': name,
        'n': 7, 'delta': 2, 'horizon': 80,
        'gadget': 'recovery',
        'protocol': {'kind': 'scripted_oracle'},
        'corruption': {
            'corrupt': [{'validator': i, 'round': 20} for i in range(4)],
            'r_maj': 20, 'r_rec': 30, 'kill': [0, 1, 2],
        },
        'clients': 3,
        'transactions': {'count': 24, 'start': 1, 'every': 3},
        'adversary': {'strategy': strategy, 'params': params or {}},
    }


def double_spend_scenario():
    return _healing_scenario('double-spend', 'double_spend_equivocator',
                             {'to_validators': True})


def eve_scenario():
    return _healing_scenario('eve', 'eve_confuser')


# ----------------------------------------------------------------------


def timeline(trace):
    """ One line per confirm, bookmark, freeze, recover, new genesis and
        restart event.
    """
    lines = []
    for _, event in trace.of_kind(*TIMELINE_KINDS):
        data = event['data']
        text = f"r={event['round']:<4} {event['party'] or '-':<4} " \
               f"{event['kind']:<12}"
        if 'ledger' in data:
            text += ' [' + ','.join(data['ledger']) + ']'
        if event['kind'] == 'freeze':
            text += f" ({data.get('reason')})"
        if event['kind'] == 'recover':
            text += ' v_new=' + ','.join(data.get('v_new', []))
        lines.append(text)
    return lines


def verdict_lines(verdicts):
    lines = [f"{'PASS' if v.passed else 'FAIL':<5} {v.checker:<20} "
             f"{v.details}" for v in verdicts]
    lines.append(summary_line(verdicts))
    return lines


def _run(scenario, config):
    config = config or ScenarioConfig.from_dict(scenario)
    trace = run(config)
    return trace, run_checkers(trace)


def no_wait_break_demo(config=None):
    """ Runs the no-wait scenario (or config).

        Returns: (Trace, verdicts)

        Raises:
            RecoverysimDemoError: the safety checker found no violation.
    """
    trace, verdicts = _run(no_wait_scenario(), config)
    safety = next(v for v in verdicts if v.checker == 'safety')
    if safety.passed:
        raise RecoverysimDemoError(
            'no-wait: the double spend did not break safety')
    return trace, verdicts


def _all_pass(name, trace, verdicts):
    failed = [v.checker for v in verdicts if not v.passed]
    if failed:
        raise RecoverysimDemoError(f"{name}: checkers failed: "
                                   f"{', '.join(failed)}")
    return trace, verdicts


def double_spend_demo(config=None):
    """ Raises:
            RecoverysimDemoError: a checker failed.
    """
    return _all_pass('double-spend',
                     *_run(double_spend_scenario(), config))


def eve_demo(config=None):
    """ Raises:
            RecoverysimDemoError: a checker failed.
    """
    return _all_pass('eve', *_run(eve_scenario(), config))


DEMOS = {
    'eve': eve_demo,
    'no-wait': no_wait_break_demo,
    'double-spend': double_spend_demo,
}


def print_demo(name, trace, verdicts, log=None):
    """ Writes the annotated timeline and the verdict table. """
    log = log or logging.getLogger(__name__).info
    log_text(log, None, f"demo {name}: {trace.header['config']['name']}")
    for line in timeline(trace):
        log(line)
    for line in verdict_lines(verdicts):
        log(line)
