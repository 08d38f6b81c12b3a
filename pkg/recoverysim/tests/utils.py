""" test utilities module

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import copy
import logging
import pathlib

from twisted.internet import task

from recoverysim.core.crypto import Pki
from recoverysim.core.ledger import EMPTY_LEDGER, Ledger
from recoverysim.core.party import ValidatorSet, validator
from recoverysim.harness.scenario import ScenarioConfig
from recoverysim.harness.trace import Trace
from recoverysim.internal.messages import FinalityVote, InstanceId

SCENARIO_DIR = pathlib.Path(__file__).resolve().parent.parent / 'scenarios'


def ledger(*txs):
    """ ledger('a', 'b') -> Ledger(('a', 'b')) """
    return Ledger(tuple(txs))


def make_instance(n, genesis=EMPTY_LEDGER, epoch_tag=0, start_round=0):
    return InstanceId(epoch_tag, genesis, ValidatorSet.of_size(n),
                      start_round)


def make_vote(instance, pki, index, *txs):
    """ A FinalityVote of validator index for instance.genesis + txs. """
    return FinalityVote.make(instance, instance.genesis.extend(txs),
                             pki.issue(validator(index)))


def make_pki(seed=0):
    return Pki(seed=seed)


BASE_SCENARIO = {
    'name': 'unit',
    'n': 4, 'delta': 2, 'horizon': 40,
    'gadget': 'recovery',
    'protocol': {'kind': 'scripted_oracle'},
    'clients': 2,
    'transactions': {'count': 4, 'start': 1, 'every': 3},
}


def scenario_dict(**overrides):
    data = copy.deepcopy(BASE_SCENARIO)
    data.update(overrides)
    return data


def scenario(**overrides):
    return ScenarioConfig.from_dict(scenario_dict(**overrides))


def synthetic_trace(config=None, events=()):
    """ A trace with the header of config followed by events, each a
        (round, party, kind, data) tuple.
    """
    config = config or scenario()
    trace = Trace()
    trace.record_header(config.to_dict(), config.constants())
    for round_index, party, kind, data in events:
        trace.record(round_index, party, kind, data)
    return trace


class MockParty:
    """ Stands in for a Party: records what the gadget does. """

    def __init__(self, party_id=None):
        self.party_id = party_id
        self.clock = task.Clock()
        self.records = []
        self.gossiped = []

    def record(self, round_index, kind, **payload):
        self.records.append((round_index, kind, payload))

    def log(self, round_index, text, level=logging.DEBUG):
        # pylint: disable=unused-argument
        pass

    def gossip(self, payload, round_index):
        self.gossiped.append((round_index, payload))

    def call_at(self, round_index, function, *args):
        delay = max(0, round_index - self.clock.seconds())
        return self.clock.callLater(delay, function, *args)

    def advance_to(self, round_index):
        self.clock.advance(round_index - self.clock.seconds())

    def kinds(self):
        return [kind for _, kind, _ in self.records]
