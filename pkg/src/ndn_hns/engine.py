"""Per-node NDN forwarding: Content Store, PIT and FIB processing.

Each handler returns the list of :class:`Effect` values it produced, in the
order they happened. Effects carry packets so a driver (the simulator, or a
test) can deliver them; their text form is one trace line::

    time<TAB>node<TAB>effect<TAB>canonical-name
"""

from __future__ import annotations

import random
from collections import Counter, OrderedDict
from dataclasses import dataclass, field, replace

from .codec import serialize
from .errors import NotAnAction, UnknownFace
from .name import (
    HC_ARITY,
    AttributesComponent,
    FreshnessKind,
    FreshnessSpec,
    Name,
    NamePrefix,
    TaskType,
    hierarchical_prefix,
    is_prefix_of,
)
from .security import compute_fc

APP_FACE = 0
ROLES = ("consumer", "router", "producer", "actuator", "campus_server")
DEFAULT_PIT_LIFETIME = 4000
DEFAULT_NONCE_WINDOW = 1000


@dataclass(frozen=True)
class Face:
    face_id: int
    peer: str


@dataclass(frozen=True)
class InterestPacket:
    name: Name
    nonce: int
    hop_count: int = 0
    key: str = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 < self.nonce < 2**64:
            raise ValueError("interest nonce must be a nonzero 64-bit value")
        if self.hop_count < 0:
            raise ValueError("hop_count must be non-negative")
        object.__setattr__(self, "key", serialize(self.name))


@dataclass(frozen=True)
class DataPacket:
    name: Name
    payload: bytes
    generated_at: int
    hop_count: int = 0
    cacheable: bool = True
    key: str = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        fresh = self.name.freshness
        if fresh is not None and fresh != FreshnessSpec.generated_at(self.generated_at):
            raise ValueError("data freshness must be a generated-at stamp equal to generated_at")
        object.__setattr__(self, "key", serialize(self.name))


@dataclass
class PitEntry:
    name_key: str
    interest: Name
    faces: set[int]
    created_at: int


@dataclass(frozen=True)
class FibEntry:
    prefix: NamePrefix
    next_faces: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "next_faces", tuple(self.next_faces))
        if not self.next_faces:
            raise ValueError("FIB entry needs at least one next face")


@dataclass
class ContentStoreEntry:
    data: DataPacket
    inserted_at: int
    popularity: int = 0


@dataclass(frozen=True)
class Effect:
    kind: str
    name: str
    face: int | None = None
    detail: str | None = None
    packet: InterestPacket | DataPacket | None = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        if self.face is not None:
            return f"{self.kind}({self.face})"
        if self.detail is not None:
            return f"{self.kind}({self.detail})"
        return self.kind

    def trace_line(self, time: int, node: str) -> str:
        return f"{time}\t{node}\t{self.label}\t{self.name}"


def satisfies(interest: Name, data: DataPacket) -> bool:
    """Whether ``data`` answers an Interest for ``interest``.

    Routing is on the hierarchical part only; attributes, task, flat digests
    and an explicit generated-at stamp act as filters. Latest/Oldest selectors
    never filter, they only rank candidates in the content store.
    """
    dn = data.name
    if not is_prefix_of(hierarchical_prefix(interest, HC_ARITY), dn):
        return False
    if interest.ac is not None:
        if interest.ac.attributes and not set(interest.ac.attributes) <= set(dn.attributes):
            return False
        if interest.ac.task is not None and dn.task != interest.ac.task:
            return False
        fresh = interest.ac.freshness
        if fresh is not None and fresh.kind is FreshnessKind.GENERATED_AT and data.generated_at != fresh.timestamp:
            return False
    if interest.fc is not None and (dn.fc is None or not interest.fc.same_bytes(dn.fc)):
        return False
    return True


def _stamped(name: Name, generated_at: int) -> Name:
    ac = name.ac or AttributesComponent(freshness=FreshnessSpec.generated_at(generated_at))
    ac = replace(ac, freshness=FreshnessSpec.generated_at(generated_at), popularity=None)
    return Name(name.root, name.hc, ac, name.fc)


def make_data(
    interest: Name,
    generated_at: int,
    payload: bytes,
    *,
    cacheable: bool = True,
    attach_fc: bool = False,
) -> DataPacket:
    """Data answering ``interest``: same HC, attribute filters and task echoed, stamped with
    ``generated_at``. The interest's flat component is kept; ``attach_fc`` computes one."""
    name = _stamped(interest, generated_at)
    if name.fc is None and attach_fc:
        name = Name(name.root, name.hc, name.ac, compute_fc(name.hc))
    return DataPacket(name, payload, generated_at, cacheable=cacheable)


def make_ack(interest: Name, generated_at: int, ok: bool = True) -> DataPacket:
    """Non-cacheable acknowledgment for a push (action) Interest."""
    return make_data(interest, generated_at, b"ACK" if ok else b"NACK", cacheable=False)


class NodeState:
    """One content router: faces, a bounded LRU content store, PIT and FIB.

    Face 0 is reserved for local applications. Prefixes registered with
    :meth:`serve` are answered by a local producer through face 0 and are
    not FIB entries.
    """

    def __init__(
        self,
        node_id: str,
        role: str = "router",
        cs_capacity: int = 100,
        *,
        pit_lifetime: int = DEFAULT_PIT_LIFETIME,
        nonce_window: int = DEFAULT_NONCE_WINDOW,
        multipath: bool = False,
        rng: random.Random | None = None,
    ):
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if cs_capacity < 0:
            raise ValueError("cs_capacity must be non-negative")
        self.node_id = node_id
        self.role = role
        self.cs_capacity = cs_capacity
        self.pit_lifetime = pit_lifetime
        self.nonce_window = nonce_window
        self.multipath = multipath
        self.rng = rng or random.Random(node_id)
        self.faces: dict[int, Face] = {APP_FACE: Face(APP_FACE, "app")}
        self.cs: OrderedDict[str, ContentStoreEntry] = OrderedDict()
        self.pit: dict[str, PitEntry] = {}
        self.fib: dict[NamePrefix, FibEntry] = {}
        self.local_prefixes: list[NamePrefix] = []
        self.nonces: dict[int, int] = {}
        self.popularity: Counter[str] = Counter()
        self.cs_lookups = 0
        self.cs_hits = 0
        self.unsatisfiable = 0

    def __repr__(self) -> str:
        return f"NodeState({self.node_id!r}, role={self.role!r}, cs={len(self.cs)}/{self.cs_capacity}, pit={len(self.pit)}, fib={len(self.fib)})"

    # configuration

    def add_face(self, face_id: int, peer: str) -> Face:
        if face_id in self.faces:
            raise ValueError(f"face {face_id} already exists on {self.node_id}")
        face = Face(face_id, peer)
        self.faces[face_id] = face
        return face

    def add_route(self, prefix: NamePrefix, next_faces) -> FibEntry:
        entry = FibEntry(prefix, tuple(next_faces))
        for f in entry.next_faces:
            self._check_face(f)
        self.fib[prefix] = entry
        return entry

    def serve(self, prefix: NamePrefix) -> None:
        if prefix not in self.local_prefixes:
            self.local_prefixes.append(prefix)

    def new_nonce(self) -> int:
        return self.rng.getrandbits(64) or 1

    def _check_face(self, face_id: int) -> None:
        if face_id not in self.faces:
            raise UnknownFace(f"node {self.node_id} has no face {face_id}")

    # lookups

    def cs_lookup(self, interest: InterestPacket) -> ContentStoreEntry | None:
        """Best cached Data for ``interest``; bumps its popularity and recency on a hit."""
        if self.cs_capacity == 0:
            return None
        self.cs_lookups += 1
        candidates = [e for e in self.cs.values() if satisfies(interest.name, e.data)]
        if not candidates:
            return None
        fresh = interest.name.freshness
        if fresh is not None and fresh.kind is FreshnessKind.OLDEST:
            best = min(candidates, key=lambda e: (e.data.generated_at, e.data.key))
        else:
            best = min(candidates, key=lambda e: (-e.data.generated_at, e.data.key))
        best.popularity += 1
        self.popularity[best.data.key] += 1
        self.cs_hits += 1
        self.cs.move_to_end(best.data.key)
        return best

    def fib_longest_prefix_match(self, name: Name) -> FibEntry | None:
        for k in range(HC_ARITY, 0, -1):
            entry = self.fib.get(hierarchical_prefix(name, k))
            if entry is not None:
                return entry
        return None

    def _targets(self, name: Name, in_face: int) -> list[int]:
        if any(is_prefix_of(p, name) for p in self.local_prefixes):
            return [APP_FACE]
        entry = self.fib_longest_prefix_match(name)
        if entry is None:
            return []
        live = [f for f in entry.next_faces if f in self.faces and (f != in_face or f == APP_FACE)]
        return live if self.multipath else live[:1]

    def _expire(self, now: int, effects: list[Effect]) -> None:
        for key in [k for k, e in self.pit.items() if now - e.created_at >= self.pit_lifetime]:
            del self.pit[key]
            effects.append(Effect("PitExpire", key))
        if len(self.nonces) > 64:
            self.nonces = {n: t for n, t in self.nonces.items() if now - t < self.nonce_window}

    # packet handlers

    def on_interest(self, interest: InterestPacket, in_face: int, now: int = 0) -> list[Effect]:
        self._check_face(in_face)
        effects: list[Effect] = []
        self._expire(now, effects)
        key = interest.key
        seen = self.nonces.get(interest.nonce)
        if seen is not None and now - seen < self.nonce_window:
            effects.append(Effect("Drop", key, detail="loop"))
            return effects
        self.nonces[interest.nonce] = now

        hit = self.cs_lookup(interest)
        if hit is not None:
            data = replace(hit.data, hop_count=0)
            effects.append(Effect("SendData", data.key, face=in_face, packet=data))
            return effects

        entry = self.pit.get(key)
        if entry is not None:
            entry.faces.add(in_face)
            effects.append(Effect("PitAddFace", key, face=in_face))
            effects.append(Effect("Drop", key, detail="aggregated"))
            return effects

        targets = self._targets(interest.name, in_face)
        if not targets:
            self.unsatisfiable += 1
            effects.append(Effect("Drop", key, detail="no-route"))
            return effects
        self.pit[key] = PitEntry(key, interest.name, {in_face}, now)
        effects.append(Effect("PitCreate", key))
        for face in targets:
            effects.append(Effect("ForwardInterest", key, face=face, packet=interest))
        return effects

    def on_data(self, data: DataPacket, in_face: int, now: int = 0) -> list[Effect]:
        self._check_face(in_face)
        effects: list[Effect] = []
        self._expire(now, effects)
        key = data.key

        if data.cacheable and self.cs_capacity > 0:
            if key in self.cs:
                cached = self.cs[key]
                cached.data, cached.inserted_at = data, now
                self.cs.move_to_end(key)
            else:
                while len(self.cs) >= self.cs_capacity:
                    evicted, _ = self.cs.popitem(last=False)
                    effects.append(Effect("CacheEvict", evicted))
                self.cs[key] = ContentStoreEntry(data, now)
            effects.append(Effect("CacheInsert", key))

        matched = [e for e in self.pit.values() if satisfies(e.interest, data)]
        faces: set[int] = set()
        for e in matched:
            faces |= e.faces
        if in_face != APP_FACE:
            faces.discard(in_face)
        for face in sorted(faces):
            effects.append(Effect("SendData", key, face=face, packet=data))
        for e in matched:
            del self.pit[e.name_key]
            effects.append(Effect("PitRemove", e.name_key))
        return effects

    def issue_action(self, name: Name) -> InterestPacket:
        """Interest that pushes the command carried by an action task."""
        task = name.task
        if task is None or task.task_type is not TaskType.ACTION:
            raise NotAnAction("name carries no action task")
        return InterestPacket(name, self.new_nonce())
