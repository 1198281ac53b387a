"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class HnsError(Exception):
    """Base class for all errors raised by ndn_hns."""


# registry

class UnknownCode(HnsError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class DuplicateCode(HnsError, ValueError):
    pass


class InvalidCode(HnsError, ValueError):
    pass


# names

class InvalidComponent(HnsError, ValueError):
    pass


class OutOfRange(HnsError, ValueError):
    pass


class NameParseError(HnsError, ValueError):
    """Raised by the codec. ``offset`` is a UTF-8 byte offset into the input."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.reason = message
        self.offset = offset


class NameSyntaxError(NameParseError):
    pass


class UnknownScheme(NameParseError):
    pass


class BadDigest(NameParseError):
    pass


# flat component

class MissingFlatComponent(HnsError, ValueError):
    pass


class TruncatedDigest(HnsError, ValueError):
    pass


# forwarding

class UnknownFace(HnsError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NotAnAction(HnsError, ValueError):
    pass


# simulation

class DisconnectedTopology(HnsError):
    pass


class ConfigError(HnsError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.reason = message


class SimulationError(HnsError, RuntimeError):
    pass
