""" Simulated signatures.

    A Pki issues one KeyHandle per validator.  A signature is the
    signer, the digest of the signed bytes, and a tag only the
    signer's handle can compute.  The simulator hands a handle to the
    validator's own logic and, once the validator is corrupted, to the
    adversary; nobody else can produce a signature that verifies.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import hashlib
import hmac
from dataclasses import dataclass

from recoverysim.base.utils import canonical_bytes, digest


@dataclass(frozen=True)
class Signature:
    """ Attributes:
            signer: the validator PartyId.
            message_digest: hex digest of the signed bytes.
            tag: hex tag computed with the signer's secret.
    """
    signer: object
    message_digest: str
    tag: str

    def canonical(self):
        return canonical_bytes(str(self.signer), self.message_digest, self.tag)

    def to_dict(self):
        return {'signer': str(self.signer),
                'digest': self.message_digest[:16]}


class KeyHandle:
    """ The capability to sign for one validator. """

    def __init__(self, owner, secret):
        self.owner = owner
        self._secret = secret

    def sign(self, message):
        """ Signs message (bytes) as self.owner. """
        message_digest = digest(message)
        return Signature(self.owner, message_digest,
                         _tag(self._secret, message_digest))

    def __repr__(self):
        return f"KeyHandle({self.owner})"


def _tag(secret, message_digest):
    return hmac.new(secret, message_digest.encode('ascii'),
                    hashlib.sha256).hexdigest()


class Pki:
    """ Public key infrastructure for one scenario.

        Secrets are derived from the scenario seed so traces are
        reproducible.
    """

    def __init__(self, seed=0):
        self._seed = seed
        self._secrets = {}

    def _secret(self, party):
        if party not in self._secrets:
            self._secrets[party] = hashlib.sha256(
                canonical_bytes('recoverysim-key', self._seed,
                                str(party))).digest()
        return self._secrets[party]

    def issue(self, party):
        """ Returns the KeyHandle of a validator.

            Raises:
                ValueError: party is not a validator.
        """
        if not party.is_validator:
            raise ValueError(f"only validators hold keys: {party}")
        return KeyHandle(party, self._secret(party))

    def verify(self, signer, message, sig):
        """ True iff sig was produced by signer's handle over message. """
        if not isinstance(sig, Signature) or sig.signer != signer:
            return False
        if not signer.is_validator:
            return False
        message_digest = digest(message)
        if sig.message_digest != message_digest:
            return False
        return hmac.compare_digest(
            sig.tag, _tag(self._secret(signer), message_digest))


def sign(signer_key, message):
    """ Signs message with the given KeyHandle. """
    return signer_key.sign(message)


def verify(pki, signer, message, sig):
    """ Verifies sig for (signer, message) against the scenario Pki. """
    return pki.verify(signer, message, sig)
