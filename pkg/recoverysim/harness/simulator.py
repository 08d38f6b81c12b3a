""" Deterministic round-by-round execution of a scenario.

    Each round runs, in order: the environment (corruptions, kills,
    wake/sleep, <recover>), the adversary, the oracle script, the
    network deliveries, the transaction inputs, the validators by
    index, the clients by index, and finally the timers due this round.
    Time is a twisted task.Clock whose seconds are rounds.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import collections
import logging

from twisted.internet import task

from recoverysim.adversary.strategies import make_strategy, strategy_step
from recoverysim.adversary.view import AdversaryView
from recoverysim.base.utils import log_text, round_header
from recoverysim.core.crypto import Pki
from recoverysim.core.ledger import EMPTY_LEDGER
from recoverysim.core.party import ValidatorSet, validator
from recoverysim.gadget.freezing import FreezingClient, ProtocolValidator
from recoverysim.gadget.recovery import RecoveryClient, RecoveryValidator
from recoverysim.harness.trace import Trace
from recoverysim.internal.messages import InstanceId
from recoverysim.internal.scripted_oracle import OracleLedger, OracleScript, \
    ScriptedOracle, scripted_oracle_step
from recoverysim.internal.simple_sync import SimpleSync
from recoverysim.netsim.network import Network


class Simulator:
    """ One run of a ScenarioConfig.

        Attributes:
            config: the ScenarioConfig.
            trace: the Trace being written.
            clock: the twisted Clock.
            network: the Network.
            validators: list of validator parties, by index.
            clients: list of client parties, by index.
    """
    # pylint: disable=too-many-instance-attributes

    def __init__(self, config):
        self.config = config
        self.trace = Trace()
        self.clock = task.Clock()
        self.pki = Pki(seed=config.seed)
        self.validators = []
        self.clients = []
        self._oracles = {}
        self._script = OracleScript.from_list(config.forged_votes)
        self._logger = logging.getLogger(__name__)

        self.trace.record_header(config.to_dict(), config.constants())

        valset = ValidatorSet.of_size(config.n)
        self.instance = InstanceId(0, EMPTY_LEDGER, valset, 0)
        self.network = Network(config.delta, list(valset),
                               config.client_schedule, config.corruption,
                               self.trace, pki=self.pki,
                               echo_clients=config.client_gossip)
        self._build_parties()

        parties = {party.party_id: party
                   for party in self.validators + self.clients}
        self.view = AdversaryView(self.network, parties, config.corruption,
                                  self.pki, instance=self.instance,
                                  seed=config.seed)
        self.strategy = make_strategy(config.strategy, self.view,
                                      config.strategy_params)
        self.network.set_delay_policy(self.strategy.delay)
        self.network.add_observer(self.view.observe)
        self.network.add_environment_listener(self.view.on_environment)
        self.network.add_environment_listener(self._on_environment)

    # ------------------------------------------------------------------
    # setup

    def oracle(self, instance):
        """ The OracleLedger shared by the validators of instance. """
        if instance not in self._oracles:
            self._oracles[instance] = OracleLedger(
                instance, self.config.u_pi - self.config.delta)
        return self._oracles[instance]

    def make_protocol(self, instance, party_id, key):
        if self.config.protocol == 'scripted_oracle':
            return ScriptedOracle(instance, party_id, key, self.pki,
                                  self.oracle(instance))
        return SimpleSync(instance, party_id, key, self.pki,
                          self.config.delta)

    def _build_parties(self):
        config = self.config
        common = (self.network, self.clock, self.trace, self.pki)
        for index in range(config.n):
            party_id = validator(index)
            kwargs = {'key': self.pki.issue(party_id),
                      'protocol_factory': self.make_protocol,
                      'instance': self.instance}
            if config.gadget == 'recovery':
                self.validators.append(RecoveryValidator(
                    party_id, *common, wait=config.validator_wait,
                    delta=config.delta, r_rec=config.corruption.r_rec,
                    **kwargs))
            else:
                self.validators.append(
                    ProtocolValidator(party_id, *common, **kwargs))

        client_class = RecoveryClient if config.gadget == 'recovery' \
            else FreezingClient
        for party_id in config.client_schedule.clients():
            self.clients.append(client_class(
                party_id, *common, instance=self.instance,
                wait=config.client_wait))

    def _party(self, party_id):
        parties = self.validators if party_id.is_validator else self.clients
        return parties[party_id.index]

    def _on_environment(self, kind, party_id, round_index):
        if kind in ('kill', 'sleep'):
            self._party(party_id).halt(round_index)

    # ------------------------------------------------------------------
    # the round loop

    def _forge_oracle_votes(self, round_index):
        if self.config.protocol != 'scripted_oracle' or \
                not self._script.steps:
            return
        _, forged = scripted_oracle_step(
            self.oracle(self.instance), self._script, round_index,
            self.config.corruption, self.view.keys)
        for vote in forged:
            self.network.broadcast(vote.signer, vote, round_index)

    def _transaction_inputs(self, round_index):
        inputs = collections.defaultdict(list)
        for tx in self.config.transactions_at(round_index):
            recipients = tx.recipients if tx.recipients is not None \
                else range(self.config.n)
            for index in recipients:
                party = self.validators[index]
                if not self.network.is_awake(party.party_id, round_index):
                    continue
                party.record(round_index, 'tx_input', tx=tx.tx_id)
                inputs[index].append(tx.transaction())
        return inputs

    def run_round(self, round_index):
        self.network.open_round(round_index)
        strategy_step(self.strategy, self.view, round_index)
        self._forge_oracle_votes(round_index)

        inboxes = collections.defaultdict(list)
        for recipient, envelope in self.network.step(round_index):
            inboxes[recipient].append(envelope)
        inputs = self._transaction_inputs(round_index)

        for party in self.validators:
            if self.network.is_awake(party.party_id, round_index):
                party.step(round_index, inboxes[party.party_id],
                           inputs[party.party_id.index])
        for party in self.clients:
            if self.network.is_awake(party.party_id, round_index):
                party.step(round_index, inboxes[party.party_id])

        self.clock.advance(round_index - self.clock.seconds())

    def run(self):
        """ Runs rounds 0..R.

            Returns: the Trace.

            Raises:
                RecoverysimScenarioError: a model contract was broken.
        """
        log_text(self._logger.info, None,
                 f"running {self.config.name} (n={self.config.n}, "
                 f"delta={self.config.delta}, R={self.config.horizon}, "
                 f"seed={self.config.seed})")
        for round_index in range(self.config.horizon + 1):
            self.run_round(round_index)
        log_text(self._logger.info, round_header(self.config.horizon),
                 f"{self.config.name} finished, {len(self.trace)} events")
        return self.trace


def run(config):
    """ Executes the scenario and returns its Trace. """
    return Simulator(config).run()
