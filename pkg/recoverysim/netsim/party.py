""" Base class for the parties attached to a Network.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging

from recoverysim.base.utils import log_text, round_header


class Party:
    """ Glue between a party's state machine and its surroundings:
        the network, the round clock and the trace.

        Attributes:
            party_id: the PartyId.
            network: the Network.
            clock: a twisted.internet.task.Clock whose seconds are rounds.
            trace: the Trace.
            silent: set by the adversary; a silent party sends nothing.
            halted: the party was killed or went to sleep for good.
    """

    def __init__(self, party_id, network, clock, trace):
        self.party_id = party_id
        self.network = network
        self.clock = clock
        self.trace = trace
        self.silent = False
        self.halted = False
        self._logger = logging.getLogger(__name__)

    def _may_send(self):
        if self.silent or self.halted:
            return False
        return self.party_id.is_validator or self.network.echo_clients

    def gossip(self, payload, round_index):
        """ Sends payload to everyone; returns the msg_id or None. """
        if not self._may_send():
            return None
        return self.network.broadcast(self.party_id, payload, round_index)

    def send(self, payload, recipients, round_index):
        """ Sends payload to the given recipients only. """
        if not self._may_send():
            return None
        return self.network.broadcast(self.party_id, payload, round_index,
                                      recipients=recipients)

    def echo(self, envelope, round_index):
        """ Relays a gossip message received this round. """
        if self.silent or self.halted:
            return None
        return self.network.echo_on_receipt(self.party_id, envelope,
                                            round_index)

    def call_at(self, round_index, function, *args):
        """ Schedules function(*args) for the timer phase of round_index.

            Returns: the twisted DelayedCall.
        """
        delay = max(0, round_index - self.clock.seconds())
        return self.clock.callLater(delay, function, *args)

    def halt(self, round_index):
        """ Stops the party for good (killed validator, sleeping client). """
        self.halted = True
        self.log(round_index, 'halted')

    def record(self, round_index, kind, **payload):
        self.trace.record(round_index, self.party_id, kind, payload)

    def log(self, round_index, text, level=logging.DEBUG):
        log_text(lambda line: self._logger.log(level, line),
                 round_header(round_index, self.party_id), text)
