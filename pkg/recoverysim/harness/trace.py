""" The trace of a scenario run.

    A trace is a list of events, each a JSON object
    {"round": r, "party": "v3" | "c0" | null, "kind": k, "data": {...}},
    persisted one per line with sorted keys and compact separators so
    identical runs produce identical bytes.  The first event is the
    'scenario' header holding the validated configuration and the
    derived constants.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import json
import logging
import pathlib

from recoverysim.base import RecoverysimHarnessError

EVENT_KINDS = frozenset((
    'scenario', 'send', 'deliver', 'inject', 'corrupt', 'kill', 'recover',
    'wake', 'sleep', 'witness', 'witness_reject', 'confirm', 'bookmark',
    'freeze', 'finalize', 'ds_broadcast', 'ds_deliver', 'new_genesis',
    'genesis_vote', 'restart', 'tx_input'))


def encode_event(event):
    return json.dumps(event, sort_keys=True, separators=(',', ':'))


class Trace:
    """ An append-only list of events with non-decreasing rounds. """

    def __init__(self, events=None):
        self.events = []
        for event in events or []:
            self._append(event)
        self._logger = logging.getLogger(__name__)

    def _append(self, event):
        if event['kind'] not in EVENT_KINDS:
            raise RecoverysimHarnessError(
                f"unknown trace event kind {event['kind']!r}")
        if self.events and event['round'] < self.events[-1]['round']:
            raise RecoverysimHarnessError(
                f"trace event at round {event['round']} after round "
                f"{self.events[-1]['round']}")
        self.events.append(event)

    def record(self, round_index, party, kind, data=None):
        self._append({'round': round_index,
                      'party': None if party is None else str(party),
                      'kind': kind,
                      'data': dict(data or {})})

    def record_header(self, scenario, constants):
        """ Records the 'scenario' header; must be the first event. """
        if self.events:
            raise RecoverysimHarnessError(
                'the scenario header must be the first trace event')
        self.record(0, None, 'scenario',
                    {'config': scenario, 'constants': constants})

    @property
    def header(self):
        if not self.events or self.events[0]['kind'] != 'scenario':
            raise RecoverysimHarnessError('trace has no scenario header')
        return self.events[0]['data']

    def of_kind(self, *kinds):
        """ Yields (index, event) for the events of the given kinds. """
        for index, event in enumerate(self.events):
            if event['kind'] in kinds:
                yield index, event

    def __len__(self):
        return len(self.events)

    def to_jsonl(self):
        return ''.join(encode_event(event) + '\n' for event in self.events)

    def write(self, path):
        pathlib.Path(path).write_text(self.to_jsonl(), encoding='utf-8')
        self._logger.info('wrote %d events to %s', len(self.events), path)

    @classmethod
    def from_jsonl(cls, text):
        """ Raises:
                ValueError: a line is not valid JSON.
                RecoverysimHarnessError: the events are not a trace.
        """
        return cls([json.loads(line) for line in text.splitlines()
                    if line.strip()])

    @classmethod
    def load(cls, path):
        return cls.from_jsonl(pathlib.Path(path).read_text(encoding='utf-8'))
