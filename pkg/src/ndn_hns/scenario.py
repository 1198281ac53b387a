"""Scenario files: topology, producers, consumer workloads and run options.

Scenario files are UTF-8 JSON. Unknown keys are rejected and every error
names the offending field path, e.g. ``consumers[0].workload[2].time``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .codec import parse, parse_prefix
from .errors import ConfigError, NameParseError
from .name import Name, NamePrefix
from .engine import DEFAULT_NONCE_WINDOW, DEFAULT_PIT_LIFETIME, ROLES

DEFAULT_CS_CAPACITY = {"router": 100, "campus_server": 100, "consumer": 0, "producer": 0, "actuator": 0}


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    role: str
    cs_capacity: int


@dataclass(frozen=True)
class LinkSpec:
    node_a: str
    node_b: str
    latency: int


@dataclass(frozen=True)
class Topology:
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def neighbors(self) -> dict[str, dict[str, int]]:
        adj: dict[str, dict[str, int]] = {n.node_id: {} for n in self.nodes}
        for link in self.links:
            adj[link.node_a][link.node_b] = link.latency
            adj[link.node_b][link.node_a] = link.latency
        return adj


@dataclass(frozen=True)
class ContentGenerator:
    period: int = 1
    payload_size: int = 16


@dataclass(frozen=True)
class ProducerSpec:
    node_id: str
    served_prefix: NamePrefix
    content_generator: ContentGenerator = ContentGenerator()
    attach_fc: bool = False


@dataclass(frozen=True)
class TimedInterest:
    time: int
    name: Name


@dataclass(frozen=True)
class RandomWorkload:
    count: int
    start: int
    end: int
    names: tuple[Name, ...]


@dataclass(frozen=True)
class ConsumerSpec:
    node_id: str
    workload: tuple[TimedInterest, ...] = ()
    random_workload: RandomWorkload | None = None


@dataclass(frozen=True)
class Injection:
    """A raw packet handed to a node on a given face, bypassing applications."""

    time: int
    node_id: str
    face: int
    kind: str
    name: Name
    payload: bytes = b""


@dataclass(frozen=True)
class Options:
    pit_lifetime: int = DEFAULT_PIT_LIFETIME
    nonce_window: int = DEFAULT_NONCE_WINDOW
    interest_timeout: int | None = None
    multipath: bool = False
    aggregate_fib: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    topology: Topology
    producers: tuple[ProducerSpec, ...] = ()
    consumers: tuple[ConsumerSpec, ...] = ()
    seed: int = 0
    duration: int = 0
    injections: tuple[Injection, ...] = ()
    options: Options = field(default_factory=Options)

    def with_seed(self, seed: int) -> ScenarioConfig:
        _uint(seed, "seed", 2**64 - 1)
        return ScenarioConfig(
            self.topology, self.producers, self.consumers, seed, self.duration, self.injections, self.options
        )


# validation helpers

def _obj(value: Any, path: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(path, "expected an object")
    missing = sorted(required - value.keys())
    if missing:
        raise ConfigError(f"{path}.{missing[0]}" if path else missing[0], "required field missing")
    extra = sorted(value.keys() - required - optional)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}" if path else extra[0], "unknown field")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list")
    return value


def _uint(value: Any, path: str, maximum: int | None = None, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(path, f"expected an integer >= {minimum}")
    if maximum is not None and value > maximum:
        raise ConfigError(path, f"must be <= {maximum}")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigError(path, "expected a non-empty string")
    return value


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(path, "expected true or false")
    return value


def _name(value: Any, path: str) -> Name:
    try:
        return parse(_str(value, path))
    except NameParseError as exc:
        raise ConfigError(path, f"bad name: {exc}") from None


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _topology(raw: Any, path: str) -> Topology:
    raw = _obj(raw, path, {"nodes", "links"})
    nodes, seen = [], set()
    for i, item in enumerate(_list(raw["nodes"], f"{path}.nodes")):
        p = f"{path}.nodes[{i}]"
        item = _obj(item, p, {"node_id", "role"}, {"cs_capacity"})
        node_id = _str(item["node_id"], f"{p}.node_id")
        if node_id in seen:
            raise ConfigError(f"{p}.node_id", f"duplicate node id {node_id!r}")
        seen.add(node_id)
        role = item["role"]
        if role not in ROLES:
            raise ConfigError(f"{p}.role", f"expected one of {', '.join(ROLES)}")
        cap = _uint(item.get("cs_capacity", DEFAULT_CS_CAPACITY[role]), f"{p}.cs_capacity")
        nodes.append(NodeSpec(node_id, role, cap))
    if not nodes:
        raise ConfigError(f"{path}.nodes", "topology needs at least one node")
    if sum(n.role == "campus_server" for n in nodes) > 1:
        raise ConfigError(f"{path}.nodes", "at most one campus_server is allowed")
    links, pairs = [], set()
    for i, item in enumerate(_list(raw["links"], f"{path}.links")):
        p = f"{path}.links[{i}]"
        item = _obj(item, p, {"node_a", "node_b", "latency"})
        a, b = _str(item["node_a"], f"{p}.node_a"), _str(item["node_b"], f"{p}.node_b")
        for key, nid in (("node_a", a), ("node_b", b)):
            if nid not in seen:
                raise ConfigError(f"{p}.{key}", f"unknown node {nid!r}")
        if a == b:
            raise ConfigError(p, "self-loop")
        if frozenset((a, b)) in pairs:
            raise ConfigError(p, f"duplicate link {a}-{b}")
        pairs.add(frozenset((a, b)))
        links.append(LinkSpec(a, b, _uint(item["latency"], f"{p}.latency", minimum=1)))
    return Topology(tuple(nodes), tuple(links))


def scenario_from_dict(raw: Any) -> ScenarioConfig:
    raw = _obj(raw, "", {"topology", "duration"}, {"producers", "consumers", "seed", "injections", "options"})
    topology = _topology(raw["topology"], "topology")
    node_ids = {n.node_id for n in topology.nodes}
    duration = _uint(raw["duration"], "duration")
    seed = _uint(raw.get("seed", 0), "seed", 2**64 - 1)

    def node_ref(value: Any, p: str) -> str:
        nid = _str(value, p)
        if nid not in node_ids:
            raise ConfigError(p, f"unknown node {nid!r}")
        return nid

    def time_in_run(value: Any, p: str) -> int:
        return _uint(value, p, duration)

    producers = []
    for i, item in enumerate(_list(raw.get("producers", []), "producers")):
        p = f"producers[{i}]"
        item = _obj(item, p, {"node_id", "served_prefix"}, {"content_generator", "attach_fc"})
        try:
            prefix = parse_prefix(_str(item["served_prefix"], f"{p}.served_prefix"))
        except NameParseError as exc:
            raise ConfigError(f"{p}.served_prefix", f"bad prefix: {exc}") from None
        gen = ContentGenerator()
        if "content_generator" in item:
            g = _obj(item["content_generator"], f"{p}.content_generator", set(), {"period", "payload_size"})
            gen = ContentGenerator(
                _uint(g.get("period", 1), f"{p}.content_generator.period", minimum=1),
                _uint(g.get("payload_size", 16), f"{p}.content_generator.payload_size"),
            )
        producers.append(
            ProducerSpec(
                node_ref(item["node_id"], f"{p}.node_id"),
                prefix,
                gen,
                _bool(item.get("attach_fc", False), f"{p}.attach_fc"),
            )
        )

    consumers = []
    for i, item in enumerate(_list(raw.get("consumers", []), "consumers")):
        p = f"consumers[{i}]"
        item = _obj(item, p, {"node_id"}, {"workload", "random_workload"})
        workload = []
        for j, w in enumerate(_list(item.get("workload", []), f"{p}.workload")):
            wp = f"{p}.workload[{j}]"
            w = _obj(w, wp, {"time", "name"})
            workload.append(TimedInterest(time_in_run(w["time"], f"{wp}.time"), _name(w["name"], f"{wp}.name")))
        rand = None
        if "random_workload" in item:
            rp = f"{p}.random_workload"
            r = _obj(item["random_workload"], rp, {"count", "names"}, {"start", "end"})
            start = time_in_run(r.get("start", 0), f"{rp}.start")
            end = time_in_run(r.get("end", duration), f"{rp}.end")
            if end < start:
                raise ConfigError(f"{rp}.end", "end is before start")
            names = tuple(_name(n, f"{rp}.names[{k}]") for k, n in enumerate(_list(r["names"], f"{rp}.names")))
            if not names:
                raise ConfigError(f"{rp}.names", "needs at least one name")
            rand = RandomWorkload(_uint(r["count"], f"{rp}.count"), start, end, names)
        consumers.append(ConsumerSpec(node_ref(item["node_id"], f"{p}.node_id"), tuple(workload), rand))

    injections = []
    for i, item in enumerate(_list(raw.get("injections", []), "injections")):
        p = f"injections[{i}]"
        item = _obj(item, p, {"time", "node_id", "face", "kind", "name"}, {"payload"})
        kind = item["kind"]
        if kind not in ("interest", "data"):
            raise ConfigError(f"{p}.kind", "expected 'interest' or 'data'")
        name = _name(item["name"], f"{p}.name")
        if kind == "data" and name.freshness is not None and name.freshness.timestamp is None:
            raise ConfigError(f"{p}.name", "data names may only carry a ts/<time> freshness stamp")
        payload = item.get("payload", "")
        if not isinstance(payload, str):
            raise ConfigError(f"{p}.payload", "expected a string")
        injections.append(
            Injection(
                time_in_run(item["time"], f"{p}.time"),
                node_ref(item["node_id"], f"{p}.node_id"),
                _uint(item["face"], f"{p}.face"),
                kind,
                name,
                payload.encode("utf-8"),
            )
        )

    options = Options()
    if "options" in raw:
        o = _obj(
            raw["options"],
            "options",
            set(),
            {"pit_lifetime", "nonce_window", "interest_timeout", "multipath", "aggregate_fib"},
        )
        timeout = o.get("interest_timeout")
        options = Options(
            _uint(o.get("pit_lifetime", DEFAULT_PIT_LIFETIME), "options.pit_lifetime", minimum=1),
            _uint(o.get("nonce_window", DEFAULT_NONCE_WINDOW), "options.nonce_window", minimum=1),
            None if timeout is None else _uint(timeout, "options.interest_timeout", minimum=1),
            _bool(o.get("multipath", False), "options.multipath"),
            _bool(o.get("aggregate_fib", True), "options.aggregate_fib"),
        )

    return ScenarioConfig(
        topology, tuple(producers), tuple(consumers), seed, duration, tuple(injections), options
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(raw)
