""" Scenario configuration.

    A scenario is a JSON object (or the SCENARIO dict of a python config
    file) checked in two passes: the JSON schema below fixes its shape,
    then the model constraints are checked on the parsed values.  Every
    problem found is reported in a single RecoverysimConfigError.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import copy
import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Tuple

from jsonschema import Draft202012Validator

from recoverysim.base import RecoverysimConfigError
from recoverysim.adversary.strategies import STRATEGIES
from recoverysim.core.ledger import Transaction
from recoverysim.gadget.broadcast import t_ds, u_bc
from recoverysim.internal.simple_sync import default_latency
from recoverysim.netsim.schedule import ClientSchedule, ClientWindow, \
    CorruptionSchedule

GADGETS = ('freezing', 'recovery')
PROTOCOLS = ('simple_sync', 'scripted_oracle')

_ROUND = {'type': 'integer', 'minimum': 0}
_OPTIONAL_ROUND = {'type': ['integer', 'null'], 'minimum': 0}
_INDEX_LIST = {'type': 'array', 'items': {'type': 'integer', 'minimum': 0}}

SCENARIO_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'type': 'object',
    'required': ['n', 'delta', 'horizon'],
    'additionalProperties': False,
    'properties': {
        'name': {'type': 'string'},
        'description': {'type': 'string'},
        'n': {'type': 'integer', 'minimum': 1},
        'delta': {'type': 'integer', 'minimum': 1},
        'horizon': _ROUND,
        'gadget': {'enum': list(GADGETS)},
        'protocol': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'kind': {'enum': list(PROTOCOLS)},
                'latency': {'type': ['integer', 'null'], 'minimum': 1},
                'forged_votes': {
                    'type': 'array',
                    'items': {
                        'type': 'object',
                        'required': ['round', 'signers', 'ledger'],
                        'additionalProperties': False,
                        'properties': {
                            'round': _ROUND,
                            'signers': _INDEX_LIST,
                            'ledger': {'type': 'array',
                                       'items': {'type': 'string'}},
                        },
                    },
                },
            },
        },
        'validator_wait': {'type': ['integer', 'null'], 'minimum': 0},
        'client_wait': {'type': ['integer', 'null'], 'minimum': 0},
        'client_gossip': {'type': 'boolean'},
        'corruption': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'corrupt': {
                    'type': 'array',
                    'items': {
                        'type': 'object',
                        'required': ['validator', 'round'],
                        'additionalProperties': False,
                        'properties': {
                            'validator': {'type': 'integer', 'minimum': 0},
                            'round': _ROUND,
                        },
                    },
                },
                'r_maj': _OPTIONAL_ROUND,
                'r_rec': _OPTIONAL_ROUND,
                'kill': _INDEX_LIST,
            },
        },
        'clients': {
            'oneOf': [
                {'type': 'integer', 'minimum': 0},
                {'type': 'array',
                 'items': {
                     'type': 'object',
                     'additionalProperties': False,
                     'properties': {'wake': _ROUND,
                                    'sleep': _OPTIONAL_ROUND},
                 }},
            ],
        },
        'transactions': {
            'oneOf': [
                {'type': 'array',
                 'items': {
                     'type': 'object',
                     'required': ['id', 'round'],
                     'additionalProperties': False,
                     'properties': {
                         'id': {'type': 'string', 'minLength': 1},
                         'round': _ROUND,
                         'recipients': {'oneOf': [_INDEX_LIST,
                                                  {'type': 'null'}]},
                     },
                 }},
                {'type': 'object',
                 'required': ['count'],
                 'additionalProperties': False,
                 'properties': {
                     'count': {'type': 'integer', 'minimum': 0},
                     'start': _ROUND,
                     'every': {'type': 'integer', 'minimum': 1},
                     'prefix': {'type': 'string'},
                 }},
            ],
        },
        'adversary': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'strategy': {'type': 'string'},
                'params': {'type': 'object'},
            },
        },
        'seed': {'type': 'integer'},
    },
}


@dataclass(frozen=True)
class TxInput:
    """ tx_id is handed to the recipient validators at round_index
        (recipients None: every validator).
    """
    tx_id: str
    round_index: int
    recipients: Optional[Tuple[int, ...]] = None

    def transaction(self):
        return Transaction(self.tx_id, submit_round=self.round_index)


@dataclass(frozen=True)
class ScenarioConfig:
    """ A validated scenario.  Build it with from_dict(). """
    # pylint: disable=too-many-instance-attributes
    n: int
    delta: int
    horizon: int
    name: str = 'scenario'
    description: str = ''
    gadget: str = 'recovery'
    protocol: str = 'simple_sync'
    u_pi: int = 0
    forged_votes: tuple = ()
    validator_wait: int = 0
    client_wait: int = 0
    client_gossip: bool = True
    corruption: CorruptionSchedule = None
    client_windows: tuple = ()
    transactions: Tuple[TxInput, ...] = ()
    strategy: str = 'none'
    strategy_params: dict = field(default_factory=dict)
    seed: int = 0
    duplicate_corruptions: tuple = ()

    # ------------------------------------------------------------------
    # derived values

    @property
    def client_schedule(self):
        return ClientSchedule(dict(enumerate(self.client_windows)))

    @property
    def n_new(self):
        return self.n - len(self.corruption.kill_set)

    @property
    def u(self):
        """ Latency bound before r_maj: u_PI plus the client wait. """
        return self.u_pi + self.client_wait

    @property
    def t_ds(self):
        return t_ds(self.n_new)

    @property
    def u_bc(self):
        return u_bc(self.n_new, self.delta)

    @property
    def u_rec(self):
        """ Latency bound after recovery. """
        return self.u_pi + self.u_bc + self.delta + self.client_wait

    def liveness_windows(self):
        """ The closed round intervals where liveness is required. """
        r_rec = self.corruption.r_rec
        r_maj = self.corruption.r_maj
        if r_maj is None:
            r_maj = r_rec
        if r_maj is None:
            return [(0, self.horizon)]
        windows = [(0, r_maj - 1)] if r_maj > 0 else []
        if r_rec is not None and r_rec + self.u_rec < self.horizon:
            windows.append((r_rec + self.u_rec + 1, self.horizon))
        return windows

    def constants(self):
        return {
            'u_pi': self.u_pi,
            'u': self.u,
            'validator_wait': self.validator_wait,
            'client_wait': self.client_wait,
            'n_new': self.n_new,
            't_ds': self.t_ds,
            'u_bc': self.u_bc,
            'u_rec': self.u_rec,
            'v_new': self.corruption.v_new().to_list(),
            'liveness_windows': [list(w) for w in self.liveness_windows()],
        }

    def with_seed(self, seed):
        return dataclasses.replace(self, seed=seed)

    # ------------------------------------------------------------------
    # conversions

    def to_dict(self):
        """ The normalized JSON form (every default made explicit). """
        corruption = self.corruption
        return {
            'name': self.name,
            'description': self.description,
            'n': self.n,
            'delta': self.delta,
            'horizon': self.horizon,
            'gadget': self.gadget,
            'protocol': {'kind': self.protocol, 'latency': self.u_pi,
                         'forged_votes': copy.deepcopy(
                             list(self.forged_votes))},
            'validator_wait': self.validator_wait,
            'client_wait': self.client_wait,
            'client_gossip': self.client_gossip,
            'corruption': {
                'corrupt': [{'validator': index, 'round': round_index}
                            for index, round_index
                            in sorted(corruption.corrupt_round.items())],
                'r_maj': corruption.r_maj,
                'r_rec': corruption.r_rec,
                'kill': sorted(corruption.kill_set),
            },
            'clients': [{'wake': w.wake_round, 'sleep': w.sleep_round}
                        for w in self.client_windows],
            'transactions': [
                {'id': tx.tx_id, 'round': tx.round_index,
                 'recipients': None if tx.recipients is None
                 else list(tx.recipients)}
                for tx in self.transactions],
            'adversary': {'strategy': self.strategy,
                          'params': copy.deepcopy(self.strategy_params)},
            'seed': self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        """ Parses and validates a scenario.

            Raises:
                RecoverysimConfigError: with every problem found.
        """
        validator = Draft202012Validator(SCENARIO_SCHEMA)
        errors = sorted(validator.iter_errors(data),
                        key=lambda e: [str(p) for p in e.absolute_path])
        if errors:
            raise RecoverysimConfigError('invalid scenario', [
                f"{'/'.join(str(p) for p in error.absolute_path) or '.'}: "
                f"{error.message}" for error in errors])

        config = cls._parse(data)
        problems = config.validate()
        if problems:
            raise RecoverysimConfigError(
                f"invalid scenario {config.name}", problems)
        return config

    @classmethod
    def _parse(cls, data):
        n = data['n']
        delta = data['delta']
        gadget = data.get('gadget', 'recovery')
        protocol = data.get('protocol', {})
        kind = protocol.get('kind', 'simple_sync')
        latency = protocol.get('latency')
        if latency is None:
            latency = default_latency(delta, n) if kind == 'simple_sync' \
                else 4 * delta

        client_wait = data.get('client_wait')
        if client_wait is None:
            client_wait = delta if gadget == 'freezing' else 3 * delta
        validator_wait = data.get('validator_wait')
        if validator_wait is None:
            validator_wait = delta

        corruption_data = data.get('corruption', {})
        corrupt_round = {}
        duplicates = []
        for entry in corruption_data.get('corrupt', []):
            if entry['validator'] in corrupt_round:
                duplicates.append(entry['validator'])
            corrupt_round[entry['validator']] = entry['round']
        corruption = CorruptionSchedule(
            n=n, corrupt_round=corrupt_round,
            kill_set=frozenset(corruption_data.get('kill', [])),
            r_maj=corruption_data.get('r_maj'),
            r_rec=corruption_data.get('r_rec'))

        clients = data.get('clients', 2)
        if isinstance(clients, int):
            windows = tuple(ClientWindow() for _ in range(clients))
        else:
            windows = tuple(ClientWindow(entry.get('wake', 0),
                                         entry.get('sleep'))
                            for entry in clients)

        adversary = data.get('adversary', {})
        config = cls(
            n=n, delta=delta, horizon=data['horizon'],
            name=data.get('name', 'scenario'),
            description=data.get('description', ''),
            gadget=gadget, protocol=kind, u_pi=latency,
            forged_votes=tuple(copy.deepcopy(
                protocol.get('forged_votes', []))),
            validator_wait=validator_wait, client_wait=client_wait,
            client_gossip=data.get('client_gossip', True),
            corruption=corruption, client_windows=windows,
            transactions=_parse_transactions(data.get('transactions', [])),
            strategy=adversary.get('strategy', 'none'),
            strategy_params=copy.deepcopy(adversary.get('params', {})),
            seed=data.get('seed', 0),
            duplicate_corruptions=tuple(duplicates))
        return config

    def validate(self):
        """ Returns the list of violated model constraints. """
        problems = [f"validator {index} is corrupted twice"
                    for index in self.duplicate_corruptions]
        problems.extend(self.corruption.validate(self.horizon))
        problems.extend(self.client_schedule.validate())

        if self.gadget == 'freezing' and self.corruption.r_rec is not None:
            problems.append('the freezing gadget has no recovery: '
                            'r_rec must be null')
        if self.protocol == 'scripted_oracle' and self.u_pi < self.delta:
            problems.append(f"scripted_oracle latency {self.u_pi} is below "
                            f"delta ({self.delta})")
        if self.forged_votes and self.protocol != 'scripted_oracle':
            problems.append('forged_votes need the scripted_oracle protocol')
        for entry in self.forged_votes:
            if entry['round'] > self.horizon:
                problems.append(f"forged votes at round {entry['round']} "
                                f"are beyond R ({self.horizon})")
            for index in entry['signers']:
                if index >= self.n:
                    problems.append(f"forged vote by unknown validator "
                                    f"{index}")

        seen = set()
        for tx in self.transactions:
            if tx.tx_id in seen:
                problems.append(f"transaction {tx.tx_id} is input twice")
            seen.add(tx.tx_id)
            if tx.round_index > self.horizon:
                problems.append(f"transaction {tx.tx_id} at round "
                                f"{tx.round_index} is beyond R")
            for index in tx.recipients or ():
                if index >= self.n:
                    problems.append(f"transaction {tx.tx_id} sent to "
                                    f"unknown validator {index}")

        if self.strategy not in STRATEGIES:
            problems.append(f"unknown strategy {self.strategy!r}")
        else:
            problems.extend(
                STRATEGIES[self.strategy].validate_params(
                    self.strategy_params))
        return problems

    def transactions_at(self, round_index):
        return [tx for tx in self.transactions
                if tx.round_index == round_index]


def _parse_transactions(data):
    if isinstance(data, dict):
        start = data.get('start', 1)
        every = data.get('every', 1)
        prefix = data.get('prefix', 't')
        return tuple(TxInput(f"{prefix}{i + 1}", start + i * every)
                     for i in range(data['count']))
    return tuple(TxInput(entry['id'], entry['round'],
                         None if entry.get('recipients') is None
                         else tuple(entry['recipients']))
                 for entry in data)


def load_scenario(config):
    """ Builds a ScenarioConfig from the SCENARIO section of a Config.

        Raises:
            RecoverysimConfigError: missing or invalid section.
    """
    if not config.has_section('SCENARIO'):
        raise RecoverysimConfigError('invalid configuration',
                                     ['no SCENARIO section'])
    return ScenarioConfig.from_dict(config.get_section('SCENARIO'))
