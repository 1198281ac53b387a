"""In-memory model of hybrid IoT content names.

A name is ``root : hierarchical [: attributes] [: flat]``. All values are
immutable; text conversion lives in :mod:`ndn_hns.codec`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, fields
from typing import NamedTuple

from .errors import InvalidComponent, OutOfRange
from .registry import is_valid_code

SCHEME = "IoT"
HC_ARITY = 7
DIGEST_SIZE = 32
_HEX_RE = re.compile(r"[0-9a-f]{1,64}")


def _check_portion(value: object, what: str) -> None:
    if not isinstance(value, str) or not value:
        raise InvalidComponent(f"{what} must be a non-empty string")
    try:
        value.encode("utf-8")
    except UnicodeEncodeError:
        raise InvalidComponent(f"{what} is not valid UTF-8 text") from None


@dataclass(frozen=True)
class RootPrefix:
    app_code: str
    scheme: str = SCHEME

    def __post_init__(self) -> None:
        if self.scheme != SCHEME:
            raise InvalidComponent(f"root scheme must be {SCHEME!r}, got {self.scheme!r}")
        if not is_valid_code(self.app_code):
            raise InvalidComponent(f"root app_code {self.app_code!r} is not 1-8 uppercase ASCII letters")


@dataclass(frozen=True)
class HierarchicalComponent:
    campus_name: str
    campus_sub_name: str
    campus_location: str
    campus_sub_location: str
    originator_id: str
    content_super_type: str
    content_sub_type: str

    def __post_init__(self) -> None:
        for f in fields(self):
            _check_portion(getattr(self, f.name), f"hierarchical {f.name}")

    @property
    def portions(self) -> tuple[str, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def from_portions(cls, portions) -> HierarchicalComponent:
        portions = tuple(portions)
        if len(portions) != HC_ARITY:
            raise InvalidComponent(f"hierarchical component needs {HC_ARITY} portions, got {len(portions)}")
        return cls(*portions)


class AttributePair(NamedTuple):
    key: str
    value: str


class FreshnessKind(enum.Enum):
    LATEST = "latest"
    OLDEST = "oldest"
    GENERATED_AT = "generated_at"


@dataclass(frozen=True)
class FreshnessSpec:
    kind: FreshnessKind
    timestamp: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, FreshnessKind):
            raise InvalidComponent(f"unknown freshness kind {self.kind!r}")
        if self.kind is FreshnessKind.GENERATED_AT:
            if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int) or self.timestamp < 0:
                raise InvalidComponent("generated-at freshness needs a non-negative integer timestamp")
        elif self.timestamp is not None:
            raise InvalidComponent(f"{self.kind.value} freshness selector takes no timestamp")

    @classmethod
    def latest(cls) -> FreshnessSpec:
        return cls(FreshnessKind.LATEST)

    @classmethod
    def oldest(cls) -> FreshnessSpec:
        return cls(FreshnessKind.OLDEST)

    @classmethod
    def generated_at(cls, timestamp: int) -> FreshnessSpec:
        return cls(FreshnessKind.GENERATED_AT, timestamp)


class TaskType(enum.Enum):
    SENSE = "sense"
    ACTION = "action"


@dataclass(frozen=True)
class TaskSpec:
    task_type: TaskType
    task_sub_type: str

    def __post_init__(self) -> None:
        if not isinstance(self.task_type, TaskType):
            raise InvalidComponent(f"unknown task type {self.task_type!r}")
        _check_portion(self.task_sub_type, "task_sub_type")

    @property
    def is_push(self) -> bool:
        return self.task_type is TaskType.ACTION


@dataclass(frozen=True)
class AttributesComponent:
    attributes: tuple[AttributePair, ...] = ()
    freshness: FreshnessSpec | None = None
    popularity: int | None = None
    task: TaskSpec | None = None

    def __post_init__(self) -> None:
        pairs = tuple(AttributePair(*p) for p in self.attributes)
        object.__setattr__(self, "attributes", pairs)
        keys = set()
        for key, value in pairs:
            _check_portion(key, "attribute key")
            _check_portion(value, f"attribute {key!r} value")
            if key in keys:
                raise InvalidComponent(f"duplicate attribute key {key!r}")
            keys.add(key)
        if self.freshness is not None and not isinstance(self.freshness, FreshnessSpec):
            raise InvalidComponent("freshness must be a FreshnessSpec")
        if self.popularity is not None and (
            isinstance(self.popularity, bool) or not isinstance(self.popularity, int) or self.popularity < 0
        ):
            raise InvalidComponent("popularity must be a non-negative integer")
        if self.task is not None and not isinstance(self.task, TaskSpec):
            raise InvalidComponent("task must be a TaskSpec")
        if not pairs and self.freshness is None and self.popularity is None and self.task is None:
            raise InvalidComponent("attributes component is empty; omit it instead")

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.attributes:
            if k == key:
                return v
        return default


class Encoding(enum.Enum):
    HEX = "hex"
    BASE64 = "base64"


@dataclass(frozen=True)
class Digest:
    """A SHA-256 digest held as lowercase hex.

    Full digests have 64 hex digits. Shorter values only come from lenient
    parsing of abbreviated names and can never verify.
    """

    hex: str

    def __post_init__(self) -> None:
        if not isinstance(self.hex, str) or _HEX_RE.fullmatch(self.hex) is None:
            raise InvalidComponent(f"digest must be 1-64 lowercase hex digits, got {self.hex!r}")

    @classmethod
    def from_bytes(cls, raw: bytes) -> Digest:
        if len(raw) != DIGEST_SIZE:
            raise InvalidComponent(f"digest must be {DIGEST_SIZE} bytes, got {len(raw)}")
        return cls(raw.hex())

    @property
    def truncated(self) -> bool:
        return len(self.hex) < 2 * DIGEST_SIZE

    @property
    def raw(self) -> bytes:
        if self.truncated:
            raise InvalidComponent("truncated digest has no full byte value")
        return bytes.fromhex(self.hex)


@dataclass(frozen=True)
class FlatComponent:
    originator_digest: Digest
    super_type_digest: Digest
    sub_type_digest: Digest
    encoding: Encoding = Encoding.HEX

    def __post_init__(self) -> None:
        for d in self.digests:
            if not isinstance(d, Digest):
                raise InvalidComponent("flat component digests must be Digest values")
            if d.truncated and self.encoding is not Encoding.HEX:
                raise InvalidComponent("truncated digests can only be rendered as hex")
        if not isinstance(self.encoding, Encoding):
            raise InvalidComponent(f"unknown encoding {self.encoding!r}")

    @property
    def digests(self) -> tuple[Digest, Digest, Digest]:
        return (self.originator_digest, self.super_type_digest, self.sub_type_digest)

    @property
    def truncated(self) -> bool:
        return any(d.truncated for d in self.digests)

    def same_bytes(self, other: FlatComponent) -> bool:
        """Byte-wise equality regardless of text encoding."""
        return all(a.hex == b.hex for a, b in zip(self.digests, other.digests))


@dataclass(frozen=True)
class NamePrefix:
    """Root prefix plus the first 1..7 hierarchical portions."""

    root: RootPrefix
    portions: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        portions = tuple(self.portions)
        object.__setattr__(self, "portions", portions)
        if not 1 <= len(portions) <= HC_ARITY:
            raise OutOfRange(f"prefix length must be 1..{HC_ARITY}, got {len(portions)}")
        for p in portions:
            _check_portion(p, "prefix portion")

    def __len__(self) -> int:
        return len(self.portions)

    @property
    def parent(self) -> NamePrefix | None:
        if len(self.portions) == 1:
            return None
        return NamePrefix(self.root, self.portions[:-1])


@dataclass(frozen=True)
class Name:
    root: RootPrefix
    hc: HierarchicalComponent
    ac: AttributesComponent | None = None
    fc: FlatComponent | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.root, RootPrefix):
            raise InvalidComponent("root must be a RootPrefix")
        if not isinstance(self.hc, HierarchicalComponent):
            raise InvalidComponent("hc must be a HierarchicalComponent")
        if self.ac is not None and not isinstance(self.ac, AttributesComponent):
            raise InvalidComponent("ac must be an AttributesComponent")
        if self.fc is not None and not isinstance(self.fc, FlatComponent):
            raise InvalidComponent("fc must be a FlatComponent")

    @property
    def portions(self) -> tuple[str, ...]:
        return self.hc.portions

    @property
    def attributes(self) -> tuple[AttributePair, ...]:
        return self.ac.attributes if self.ac else ()

    @property
    def freshness(self) -> FreshnessSpec | None:
        return self.ac.freshness if self.ac else None

    @property
    def task(self) -> TaskSpec | None:
        return self.ac.task if self.ac else None


def build_name(
    root: RootPrefix,
    hc: HierarchicalComponent,
    ac: AttributesComponent | None = None,
    fc: FlatComponent | None = None,
) -> Name:
    return Name(root, hc, ac, fc)


def hierarchical_prefix(name: Name, k: int) -> NamePrefix:
    if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= HC_ARITY:
        raise OutOfRange(f"prefix length must be 1..{HC_ARITY}, got {k!r}")
    return NamePrefix(name.root, name.hc.portions[:k])


def is_prefix_of(prefix: NamePrefix, name: Name | NamePrefix) -> bool:
    """Exact, case-sensitive portion-wise prefix test."""
    if prefix.root != name.root:
        return False
    target = name.portions
    return len(prefix.portions) <= len(target) and target[: len(prefix.portions)] == prefix.portions
