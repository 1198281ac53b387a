"""Self-certifying flat component: SHA-256 over three hierarchical fields."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import MissingFlatComponent, TruncatedDigest
from .name import Digest, Encoding, FlatComponent, HierarchicalComponent, Name

FIELDS = ("originator", "super_type", "sub_type")


def _sha256(value: str) -> Digest:
    return Digest.from_bytes(hashlib.sha256(value.encode("utf-8")).digest())


def compute_fc(hc: HierarchicalComponent, encoding: Encoding = Encoding.HEX) -> FlatComponent:
    """Hash the decoded originator, super-type and sub-type portions independently."""
    return FlatComponent(
        _sha256(hc.originator_id),
        _sha256(hc.content_super_type),
        _sha256(hc.content_sub_type),
        encoding=Encoding(encoding),
    )


def with_fc(name: Name, encoding: Encoding = Encoding.HEX) -> Name:
    return Name(name.root, name.hc, name.ac, compute_fc(name.hc, encoding))


@dataclass(frozen=True)
class VerificationReport:
    matches: dict[str, bool]
    verified: bool
    prefix_only: bool = False

    @property
    def mismatched(self) -> list[str]:
        return [k for k, ok in self.matches.items() if not ok]

    def as_dict(self) -> dict:
        return {"verified": self.verified, "prefix_only": self.prefix_only, "matches": dict(self.matches)}


def verify_fc(name: Name, *, lenient: bool = False) -> VerificationReport:
    """Recompute the three digests from ``name.hc`` and compare with ``name.fc``.

    Truncated digests cannot certify anything. They raise
    :class:`TruncatedDigest` unless ``lenient`` is set, in which case the
    report only says whether each stored prefix agrees with the real digest
    and ``verified`` stays False.
    """
    if name.fc is None:
        raise MissingFlatComponent("no flat component")
    expected = compute_fc(name.hc).digests
    stored = name.fc.digests
    if name.fc.truncated:
        if not lenient:
            short = [f for f, d in zip(FIELDS, stored) if d.truncated]
            raise TruncatedDigest(f"truncated digest(s) for {', '.join(short)}; full verification impossible")
        matches = {f: e.hex.startswith(s.hex) for f, e, s in zip(FIELDS, expected, stored)}
        return VerificationReport(matches, verified=False, prefix_only=True)
    matches = {f: e.raw == s.raw for f, e, s in zip(FIELDS, expected, stored)}
    return VerificationReport(matches, verified=all(matches.values()))
