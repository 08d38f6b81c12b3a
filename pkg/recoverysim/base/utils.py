""" Utilities module

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import datetime
import hashlib


def current_timestamp():
    """Return the current time as a string"""
    return datetime.datetime.now().strftime("%H:%M:%S.%f")


def format_log_line(header, text):
    """ Formats a single of line of text given a header and some text.
    """
    if header is None:
        return f"{current_timestamp()}: {text}"
    return f"{current_timestamp()}: {header}: {text}"


def log_text(log, header, text):
    """Write out the name/text to the specified log object"""
    log(format_log_line(header, text))


def round_header(round_index, party=None):
    """ The log header used by the simulation: 'r=12 v3'. """
    if party is None:
        return f"r={round_index}"
    return f"r={round_index} {party}"


def _field_bytes(value):
    """ Converts a single field into bytes before length-prefixing. """
    # pylint: disable=too-many-return-statements
    if value is None:
        return b'\x00'
    if isinstance(value, bytes):
        return value
    if isinstance(value, str):
        return value.encode('utf-8')
    if isinstance(value, bool):
        return b'1' if value else b'0'
    if isinstance(value, int):
        return str(value).encode('ascii')
    if isinstance(value, (list, tuple)):
        return canonical_bytes(*value)
    if hasattr(value, 'canonical'):
        return value.canonical()
    raise TypeError(f"no canonical encoding for {type(value).__name__}")


def canonical_bytes(*fields):
    """ Length-prefixed concatenation of the fields, in order.

        Each field is encoded (nested sequences recursively) and
        prefixed by its length as an 8-byte big-endian integer.  The
        encoding is stable across runs and platforms.

        Args:
            fields: bytes, str, int, bool, None, sequences of these,
                or objects that provide a canonical() method.

        Returns: bytes

        Raises:
            TypeError: a field has no canonical encoding.
    """
    parts = []
    for value in fields:
        data = _field_bytes(value)
        parts.append(len(data).to_bytes(8, 'big'))
        parts.append(data)
    return b''.join(parts)


def digest(data):
    """ Returns the hex SHA-256 digest of data (bytes). """
    return hashlib.sha256(data).hexdigest()
