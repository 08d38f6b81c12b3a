""" Built-in adversary strategies.

    A strategy chooses the delay of every delivery (within delta), acts
    once per round before the deliveries of that round, and may replace
    the bookmark that corrupted validators broadcast at r_rec.
    Strategies only use the AdversaryView and its seeded rng, so a
    (scenario, seed) pair always replays the same attack.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging

from recoverysim.base import RecoverysimConfigError
from recoverysim.base.utils import log_text, round_header
from recoverysim.adversary.view import Injection, StrategyActions
from recoverysim.internal.messages import FinalityVote, Witness


class Strategy:
    """ The network-only adversary: it delays every message by delta, or
        by a seeded random delay in [1, delta] when 'jitter' is set.

        Params:
            jitter: random delays. (Default: False)
            silence_corrupted: corrupted validators send nothing.
                (Default: False)
    """
    name = 'none'
    known_params = ('jitter', 'silence_corrupted')

    def __init__(self, view, params=None):
        self.view = view
        self.params = dict(params or {})
        self.jitter = bool(self.params.get('jitter', False))
        self.silence_corrupted = bool(
            self.params.get('silence_corrupted', False))
        self._logger = logging.getLogger(__name__)
        view.add_corruption_listener(self.on_corrupt)

    @classmethod
    def validate_params(cls, params):
        """ Returns a list of problems with params. """
        return [f"strategy {cls.name}: unknown parameter {name!r}"
                for name in sorted(params or {})
                if name not in cls.known_params]

    def on_corrupt(self, party_id, round_index):
        # pylint: disable=unused-argument
        party = self.view.state_of(party_id)
        if self.silence_corrupted:
            party.silent = True
        if hasattr(party, 'bookmark_override'):
            party.bookmark_override = self.bookmark_override

    def delay(self, envelope, recipient, round_index):
        # pylint: disable=unused-argument
        if self.jitter:
            return self.view.rng.randint(1, self.view.delta)
        return self.view.delta

    def strategy_step(self, round_index):
        """ Returns the StrategyActions for round_index. """
        # pylint: disable=unused-argument
        return StrategyActions()

    def bookmark_override(self, party_id, bookmark, round_index):
        """ The ledger a corrupted V_new member broadcasts at r_rec, or
            None to broadcast its real bookmark.
        """
        # pylint: disable=unused-argument
        return None

    def log(self, round_index, text):
        log_text(self._logger.info, round_header(round_index),
                 f"{self.name}: {text}")


class ValidatorLag(Strategy):
    """ Clients and prompt validators receive everything after one round,
        lagging validators after delta rounds.

        Params:
            lagging: indices of the lagging validators.  (Default: a
                seeded non-empty subset, drawn at the first delivery)
    """
    name = 'validator_lag'
    known_params = Strategy.known_params + ('lagging',)

    def __init__(self, view, params=None):
        super().__init__(view, params)
        lagging = self.params.get('lagging')
        self.lagging = None if lagging is None else frozenset(lagging)

    @classmethod
    def validate_params(cls, params):
        problems = super().validate_params(params)
        if (params or {}).get('lagging') == []:
            problems.append(f"strategy {cls.name}: lagging must name at "
                            f"least one validator")
        return problems

    def draw_lagging(self, round_index):
        validators = self.view.validators()
        count = self.view.rng.randint(1, len(validators))
        chosen = self.view.rng.sample(validators, count)
        self.lagging = frozenset(party.index for party in chosen)
        self.log(round_index, 'lagging validators ' + ', '.join(
            f"v{index}" for index in sorted(self.lagging)))

    def delay(self, envelope, recipient, round_index):
        if self.lagging is None:
            self.draw_lagging(round_index)
        if recipient.is_validator and recipient.index in self.lagging:
            return self.view.delta
        return 1


def forge_witness(view, ledger, instance=None):
    """ A witness for ledger signed by the first quorum of corrupted
        members of the instance.
    """
    instance = instance or view.instance
    keys = view.signing_keys(instance)[:instance.valset.quorum]
    votes = tuple(FinalityVote.make(instance, ledger, key) for key in keys)
    return Witness(instance, votes)


def _bad_count(params, name, minimum):
    value = (params or {}).get(name, minimum)
    return isinstance(value, bool) or not isinstance(value, int) or \
        value < minimum


class ForkingStrategy(Strategy):
    """ Common part of the strategies that fork the ledger once they hold
        a quorum of keys.  The fork round is drawn from [r_maj, r_maj +
        spread] and stays before r_rec; without a quorum by then the fork
        waits for one.

        Params:
            spread: how many rounds past r_maj the fork may be postponed.
                (Default: delta)
    """
    known_params = Strategy.known_params + ('spread',)

    def __init__(self, view, params=None):
        super().__init__(view, params)
        self.triggered_round = None
        self.spread = self.params.get('spread')
        self.fork_round = None

    @classmethod
    def validate_params(cls, params):
        problems = super().validate_params(params)
        if _bad_count(params, 'spread', 0):
            problems.append(f"strategy {cls.name}: spread must be a "
                            f"non-negative integer")
        return problems

    def draw_fork_round(self):
        spread = self.view.delta if self.spread is None else self.spread
        latest = self.view.r_maj + spread
        if self.view.r_rec is not None:
            latest = min(latest, self.view.r_rec - 1)
        self.fork_round = self.view.rng.randint(self.view.r_maj, latest)

    def ready(self, round_index):
        if self.triggered_round is not None or self.view.r_maj is None or \
                round_index < self.view.r_maj:
            return False
        if self.view.r_rec is not None and round_index >= self.view.r_rec:
            return False
        if self.fork_round is None:
            self.draw_fork_round()
        return round_index >= self.fork_round and self.view.holds_quorum()

    def split(self, parties):
        """ The parties shuffled and cut into two halves; the first half
            is the larger one.
        """
        shuffled = list(parties)
        self.view.rng.shuffle(shuffled)
        half = (len(shuffled) + 1) // 2
        return shuffled[:half], shuffled[half:]


class DoubleSpendEquivocator(ForkingStrategy):
    """ Forges witnesses for base + [tx_a] and base + [tx_b], where base
        is the longest finalized ledger seen, and shows each fork to one
        half of a seeded partition of the clients.  A seeded coin picks
        the fork that arrives in the next round; the other one arrives
        skew rounds after the fork round.

        Params:
            txs: the two conflicting transaction ids.
                (Default: ['adv-a', 'adv-b'])
            to_validators: also partition the validators between the
                forks. (Default: False)
            skew: delivery delay of the late fork, in [1, delta].
                (Default: delta)
    """
    name = 'double_spend_equivocator'
    known_params = ForkingStrategy.known_params + ('txs', 'to_validators',
                                                   'skew')

    def __init__(self, view, params=None):
        super().__init__(view, params)
        self.txs = list(self.params.get('txs', ['adv-a', 'adv-b']))
        self.to_validators = bool(self.params.get('to_validators', False))
        self.skew = self.params.get('skew')
        self.groups = None

    @classmethod
    def validate_params(cls, params):
        problems = super().validate_params(params)
        txs = (params or {}).get('txs', ['adv-a', 'adv-b'])
        if len(txs) != 2 or txs[0] == txs[1]:
            problems.append(f"strategy {cls.name}: txs must be two "
                            f"distinct transaction ids")
        if _bad_count(params, 'skew', 1):
            problems.append(f"strategy {cls.name}: skew must be a "
                            f"positive integer")
        return problems

    def strategy_step(self, round_index):
        actions = StrategyActions()
        if not self.ready(round_index):
            return actions
        self.triggered_round = round_index
        base = self.view.longest_vote_ledger()
        forks = [base.extend([tx_id]) for tx_id in self.txs]

        groups = self.split(self.view.clients())
        if self.to_validators:
            for group, extra in zip(groups, self.split(
                    self.view.validators())):
                group.extend(extra)
        self.groups = groups
        skew = min(self.view.delta if self.skew is None else self.skew,
                   self.view.delta)
        early = self.view.rng.randrange(2)
        self.log(round_index, f"forking {base} into {forks[0]} and "
                              f"{forks[1]}, {forks[early]} first")
        for position, (fork, group) in enumerate(zip(forks, groups)):
            if group:
                delay = 1 if position == early else skew
                actions.injections.append(Injection(
                    tuple(group), forge_witness(self.view, fork),
                    round_index + delay))
        return actions


class EveConfuser(ForkingStrategy):
    """ Alice receives everything after one round and every other party
        after delta, so Alice confirms ledgers Bob has not seen.  Once the
        adversary holds a quorum it forks Bob's view with a fake
        transaction and shows the fork to everyone; at r_rec corrupted
        members of V_new broadcast the fork as their bookmark.

        Params:
            alice, bob: client indices.  (Default: a seeded pair of
                distinct clients, drawn at the first delivery)
            fake_tx: id of the fake transaction. (Default: 'eve-fake')
            fork_depth: how many transactions of the longest finalized
                ledger the fork drops. (Default: 1)
    """
    name = 'eve_confuser'
    known_params = ForkingStrategy.known_params + ('alice', 'bob',
                                                   'fake_tx', 'fork_depth')

    def __init__(self, view, params=None):
        super().__init__(view, params)
        self.alice = self.params.get('alice')
        self.bob = self.params.get('bob')
        self.fake_tx = self.params.get('fake_tx', 'eve-fake')
        self.fork_depth = self.params.get('fork_depth', 1)
        self.fork = None
        self.targets_drawn = False

    @classmethod
    def validate_params(cls, params):
        problems = super().validate_params(params)
        params = params or {}
        if 'alice' in params and params.get('alice') == params.get('bob'):
            problems.append(f"strategy {cls.name}: alice and bob must be "
                            f"different clients")
        if _bad_count(params, 'fork_depth', 0):
            problems.append(f"strategy {cls.name}: fork_depth must be a "
                            f"non-negative integer")
        return problems

    def draw_targets(self, round_index):
        self.targets_drawn = True
        others = [party.index for party in self.view.clients()
                  if party.index not in (self.alice, self.bob)]
        self.view.rng.shuffle(others)
        if self.alice is None and others:
            self.alice = others.pop()
        if self.bob is None and others:
            self.bob = others.pop()
        self.log(round_index, f"alice is c{self.alice}, bob is c{self.bob}")

    def delay(self, envelope, recipient, round_index):
        if not self.targets_drawn:
            self.draw_targets(round_index)
        if recipient.is_client and recipient.index == self.alice:
            return 1
        return self.view.delta

    def strategy_step(self, round_index):
        actions = StrategyActions()
        if not self.ready(round_index):
            return actions
        self.triggered_round = round_index
        longest = self.view.longest_vote_ledger()
        base = longest.prefix(max(len(longest) - self.fork_depth, 0))
        self.fork = base.extend([self.fake_tx])
        self.log(round_index, f"claiming {self.fork} over {longest}")
        recipients = tuple(self.view.clients() + self.view.validators())
        actions.injections.append(Injection(
            recipients, forge_witness(self.view, self.fork), round_index + 1))
        return actions

    def bookmark_override(self, party_id, bookmark, round_index):
        if self.fork is not None:
            return self.fork
        return bookmark.extend([self.fake_tx])


class BookmarkLiar(Strategy):
    """ Corrupted members of V_new broadcast their bookmark extended with
        a seeded non-empty prefix of the adversary transactions, so liars
        may disagree with each other.

        Params:
            txs: the adversary transaction ids. (Default: ['liar'])
    """
    name = 'bookmark_liar'
    known_params = Strategy.known_params + ('txs',)

    @classmethod
    def validate_params(cls, params):
        problems = super().validate_params(params)
        if not (params or {}).get('txs', ['liar']):
            problems.append(f"strategy {cls.name}: txs must not be empty")
        return problems

    def bookmark_override(self, party_id, bookmark, round_index):
        txs = list(self.params.get('txs', ['liar']))
        txs = txs[:self.view.rng.randint(1, len(txs))]
        self.log(round_index, f"{party_id} broadcasts {bookmark} + {txs}")
        return bookmark.extend(txs)


STRATEGIES = {strategy.name: strategy for strategy in (
    Strategy, ValidatorLag, DoubleSpendEquivocator, EveConfuser,
    BookmarkLiar)}


def make_strategy(name, view, params=None):
    """ Builds the named strategy.

        Raises:
            RecoverysimConfigError: unknown strategy or parameters.
    """
    if name not in STRATEGIES:
        raise RecoverysimConfigError(
            'invalid adversary', [f"unknown strategy {name!r}"])
    problems = STRATEGIES[name].validate_params(params)
    if problems:
        raise RecoverysimConfigError('invalid adversary', problems)
    return STRATEGIES[name](view, params)


def strategy_step(strategy, view, round_index):
    """ Runs one strategy step and applies its actions.

        Returns: the StrategyActions produced.
    """
    view.round = round_index
    actions = strategy.strategy_step(round_index)
    if actions:
        view.apply(actions, round_index)
    return actions
