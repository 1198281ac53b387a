"""Deterministic discrete-event simulation of a smart-campus NDN network.

Events are ordered by ``(time, sequence)``; all randomness derives from the
scenario seed, so equal configurations give byte-identical traces.
"""

from __future__ import annotations

import heapq
import csv
import io
import json
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable

from .codec import serialize
from .engine import (
    APP_FACE,
    DataPacket,
    Effect,
    InterestPacket,
    NodeState,
    make_ack,
    make_data,
    satisfies,
)
from .errors import SimulationError
from .name import FreshnessKind, Name, TaskType, is_prefix_of
from .routing import Routes, build_routes, distances
from .scenario import ProducerSpec, ScenarioConfig

MAX_EVENTS = 5_000_000

METRIC_FIELDS = (
    "interests_issued",
    "interests_satisfied",
    "satisfaction_rate",
    "fib_entries_unaggregated",
    "fib_entries_aggregated",
    "aggregation_ratio",
    "cache_hits",
    "cache_hit_ratio",
    "mean_hop_count",
)
_FLOAT_FIELDS = frozenset({"satisfaction_rate", "aggregation_ratio", "cache_hit_ratio", "mean_hop_count"})


@dataclass
class Metrics:
    interests_issued: int = 0
    interests_satisfied: int = 0
    fib_entries_unaggregated: int = 0
    fib_entries_aggregated: int = 0
    cache_hits: int = 0
    cs_lookups: int = 0
    hop_counts: list[int] = field(default_factory=list)
    popularity: dict[str, int] = field(default_factory=dict)

    @property
    def satisfaction_rate(self) -> float:
        # an empty workload counts as fully satisfied
        if self.interests_issued == 0:
            return 1.0
        return self.interests_satisfied / self.interests_issued

    @property
    def aggregation_ratio(self) -> float:
        if self.fib_entries_aggregated == 0:
            return 1.0
        return self.fib_entries_unaggregated / self.fib_entries_aggregated

    @property
    def cache_hit_ratio(self) -> float:
        return self.cache_hits / self.cs_lookups if self.cs_lookups else 0.0

    @property
    def mean_hop_count(self) -> float:
        return sum(self.hop_counts) / len(self.hop_counts) if self.hop_counts else 0.0

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in METRIC_FIELDS}
        out["popularity"] = dict(sorted(self.popularity.items()))
        return out


@dataclass
class Request:
    node_id: str
    name: Name
    issued_at: int
    deadline: int
    state: str = "pending"
    hop_count: int | None = None


@dataclass
class SimResult:
    metrics: Metrics
    trace: list[str]
    nodes: dict[str, NodeState]
    routes: Routes
    requests: list[Request]
    actuators: dict[str, dict[str, str]]

    @property
    def trace_text(self) -> str:
        return "".join(line + "\n" for line in self.trace)


# observer(time, node, effects, trigger) where trigger is ("interest" | "data", in_face)
Observer = Callable[[int, NodeState, list[Effect], tuple[str, int]], None]


def default_timeout(config: ScenarioConfig) -> int:
    """Ten times the latency-weighted network diameter (at least ten ticks)."""
    adj = config.topology.neighbors()
    diameter = max(max(distances(adj, n).values()) for n in adj)
    return 10 * max(diameter, 1)


class Simulation:
    def __init__(self, config: ScenarioConfig, observer: Observer | None = None):
        self.config = config
        self.observer = observer
        self.routes = build_routes(config.topology, config.producers)
        self.timeout = config.options.interest_timeout or default_timeout(config)
        self.trace: list[str] = []
        self.requests: list[Request] = []
        self.actuators: dict[str, dict[str, str]] = {}
        self._queue: list[tuple] = []
        self._seq = 0
        self._payload_counter: Counter[str] = Counter()
        self._build_nodes()

    # setup

    def _build_nodes(self) -> None:
        cfg = self.config
        opts = cfg.options
        self.nodes: dict[str, NodeState] = {}
        for spec in cfg.topology.nodes:
            self.nodes[spec.node_id] = NodeState(
                spec.node_id,
                spec.role,
                spec.cs_capacity,
                pit_lifetime=opts.pit_lifetime,
                nonce_window=opts.nonce_window,
                multipath=opts.multipath,
                rng=random.Random(f"{cfg.seed}:nonce:{spec.node_id}"),
            )
        # links: (node, face) -> (peer node, peer face, latency)
        self.links: dict[tuple[str, int], tuple[str, int, int]] = {}
        self.face_to: dict[str, dict[str, int]] = {n: {} for n in self.nodes}
        next_face = {n: 1 for n in self.nodes}
        for link in cfg.topology.links:
            fa, fb = next_face[link.node_a], next_face[link.node_b]
            next_face[link.node_a] += 1
            next_face[link.node_b] += 1
            self.nodes[link.node_a].add_face(fa, link.node_b)
            self.nodes[link.node_b].add_face(fb, link.node_a)
            self.face_to[link.node_a][link.node_b] = fa
            self.face_to[link.node_b][link.node_a] = fb
            self.links[(link.node_a, fa)] = (link.node_b, fb, link.latency)
            self.links[(link.node_b, fb)] = (link.node_a, fa, link.latency)
        tables = self.routes.aggregated if opts.aggregate_fib else self.routes.unaggregated
        for node_id, table in tables.items():
            node = self.nodes[node_id]
            for prefix, hops in table.items():
                node.add_route(prefix, [self.face_to[node_id][h] for h in hops])
        self.producers: dict[str, list[ProducerSpec]] = {}
        for p in cfg.producers:
            self.nodes[p.node_id].serve(p.served_prefix)
            self.producers.setdefault(p.node_id, []).append(p)
            if self.nodes[p.node_id].role == "actuator":
                self.actuators.setdefault(p.node_id, {})

    def _schedule(self, time: int, kind: str, *args) -> None:
        heapq.heappush(self._queue, (time, self._seq, kind, args))
        self._seq += 1

    def _log(self, time: int, node: str, effect: Effect) -> None:
        self.trace.append(effect.trace_line(time, node))

    def _seed_workload(self) -> None:
        cfg = self.config
        items: list[tuple[int, int, str, Name]] = []
        for ci, consumer in enumerate(cfg.consumers):
            for w in consumer.workload:
                items.append((w.time, ci, consumer.node_id, w.name))
            rw = consumer.random_workload
            if rw is not None:
                rng = random.Random(f"{cfg.seed}:workload:{ci}:{consumer.node_id}")
                for _ in range(rw.count):
                    items.append((rng.randint(rw.start, rw.end), ci, consumer.node_id, rng.choice(rw.names)))
        # stable: time, then consumer order, then listing order
        for time, _, node_id, name in sorted(items, key=lambda it: (it[0], it[1])):
            self._schedule(time, "issue", node_id, name)
        for inj in cfg.injections:
            self._schedule(inj.time, "inject", inj)

    # event handlers

    def _apply(self, now: int, node: NodeState, effects: list[Effect], trigger: tuple[str, int]) -> None:
        for effect in effects:
            self._log(now, node.node_id, effect)
        if self.observer is not None:
            self.observer(now, node, effects, trigger)
        for effect in effects:
            if effect.kind == "ForwardInterest":
                if effect.face == APP_FACE:
                    self._schedule(now, "app_interest", node.node_id, effect.packet)
                else:
                    peer, peer_face, latency = self.links[(node.node_id, effect.face)]
                    pkt = replace(effect.packet, hop_count=effect.packet.hop_count + 1)
                    self._schedule(now + latency, "interest", peer, peer_face, pkt)
            elif effect.kind == "SendData":
                if effect.face == APP_FACE:
                    self._schedule(now, "app_data", node.node_id, effect.packet)
                else:
                    peer, peer_face, latency = self.links[(node.node_id, effect.face)]
                    pkt = replace(effect.packet, hop_count=effect.packet.hop_count + 1)
                    self._schedule(now + latency, "data", peer, peer_face, pkt)

    def _issue(self, now: int, node_id: str, name: Name) -> None:
        node = self.nodes[node_id]
        interest = InterestPacket(name, node.new_nonce())
        self.requests.append(Request(node_id, name, now, now + self.timeout))
        self._schedule(now + self.timeout, "timeout", len(self.requests) - 1)
        self._log(now, node_id, Effect("Issue", interest.key))
        self._apply(now, node, node.on_interest(interest, APP_FACE, now), ("interest", APP_FACE))

    def _inject(self, now: int, inj) -> None:
        node = self.nodes[inj.node_id]
        if inj.kind == "interest":
            interest = InterestPacket(inj.name, node.new_nonce())
            self._log(now, inj.node_id, Effect("InjectInterest", interest.key, face=inj.face))
            effects = node.on_interest(interest, inj.face, now)
            trigger = ("interest", inj.face)
        else:
            fresh = inj.name.freshness
            stamp = fresh.timestamp if fresh is not None else now
            data = DataPacket(inj.name, inj.payload, stamp)
            self._log(now, inj.node_id, Effect("InjectData", data.key, face=inj.face))
            effects = node.on_data(data, inj.face, now)
            trigger = ("data", inj.face)
        self._apply(now, node, effects, trigger)

    def _produce(self, now: int, node_id: str, interest: InterestPacket) -> None:
        node = self.nodes[node_id]
        name = interest.name
        candidates = [p for p in self.producers.get(node_id, ()) if is_prefix_of(p.served_prefix, name)]
        if not candidates:
            return
        producer = max(candidates, key=lambda p: len(p.served_prefix))
        task = name.task
        if task is not None and task.task_type is TaskType.ACTION:
            ok = node.role == "actuator"
            if ok:
                self.actuators[node_id][interest.key] = task.task_sub_type
            data = make_ack(name, now, ok)
            self._log(now, node_id, Effect("Actuate", data.key, detail="ACK" if ok else "NACK"))
        else:
            period = producer.content_generator.period
            fresh = name.freshness
            if fresh is not None and fresh.kind is FreshnessKind.OLDEST:
                stamp = 0
            elif fresh is not None and fresh.kind is FreshnessKind.GENERATED_AT:
                stamp = fresh.timestamp
            else:
                stamp = now // period * period
            self._payload_counter[node_id] += 1
            rng = random.Random(f"{self.config.seed}:payload:{node_id}:{self._payload_counter[node_id]}")
            payload = rng.randbytes(producer.content_generator.payload_size)
            data = make_data(name, stamp, payload, attach_fc=producer.attach_fc)
            self._log(now, node_id, Effect("Produce", data.key))
        self._apply(now, node, node.on_data(data, APP_FACE, now), ("data", APP_FACE))

    def _deliver_to_app(self, now: int, node_id: str, data: DataPacket) -> None:
        for i, req in enumerate(self.requests):
            if req.node_id == node_id and req.state == "pending" and satisfies(req.name, data):
                req.state = "satisfied"
                req.hop_count = data.hop_count
                self._log(now, node_id, Effect("Satisfied", serialize(req.name), detail=f"hops={data.hop_count}"))

    def _expire_request(self, now: int, index: int) -> None:
        req = self.requests[index]
        if req.state == "pending":
            req.state = "timeout"
            self._log(now, req.node_id, Effect("Timeout", serialize(req.name)))

    # main loop

    def run(self) -> SimResult:
        self._seed_workload()
        processed = 0
        while self._queue:
            now, _, kind, args = heapq.heappop(self._queue)
            processed += 1
            if processed > MAX_EVENTS:
                raise SimulationError(f"event budget of {MAX_EVENTS} exhausted at t={now}")
            if kind == "issue":
                self._issue(now, *args)
            elif kind == "inject":
                self._inject(now, *args)
            elif kind == "interest":
                node_id, face, pkt = args
                node = self.nodes[node_id]
                self._apply(now, node, node.on_interest(pkt, face, now), ("interest", face))
            elif kind == "data":
                node_id, face, pkt = args
                node = self.nodes[node_id]
                self._apply(now, node, node.on_data(pkt, face, now), ("data", face))
            elif kind == "app_interest":
                self._produce(now, *args)
            elif kind == "app_data":
                self._deliver_to_app(now, *args)
            elif kind == "timeout":
                self._expire_request(now, *args)
            else:  # pragma: no cover
                raise SimulationError(f"unknown event kind {kind!r}")
        return SimResult(self._metrics(), self.trace, self.nodes, self.routes, self.requests, self.actuators)

    def _metrics(self) -> Metrics:
        popularity: Counter[str] = Counter()
        for node in self.nodes.values():
            popularity.update(node.popularity)
        satisfied = [r for r in self.requests if r.state == "satisfied"]
        return Metrics(
            interests_issued=len(self.requests),
            interests_satisfied=len(satisfied),
            fib_entries_unaggregated=self.routes.fib_entries_unaggregated,
            fib_entries_aggregated=self.routes.fib_entries_aggregated,
            cache_hits=sum(n.cs_hits for n in self.nodes.values()),
            cs_lookups=sum(n.cs_lookups for n in self.nodes.values()),
            hop_counts=[r.hop_count for r in satisfied],
            popularity=dict(popularity),
        )


def run(config: ScenarioConfig, observer: Observer | None = None) -> SimResult:
    return Simulation(config, observer).run()


# reporting

def _fmt(key: str, value) -> str:
    return f"{value:.6f}" if key in _FLOAT_FIELDS else str(value)


def report(metrics: Metrics, fmt: str = "json") -> str:
    """Serialize metrics with a fixed key order and six-decimal floats.

    CSV carries the scalar metrics only (header row plus one value row);
    JSON adds the per-name popularity table.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(METRIC_FIELDS)
        writer.writerow([_fmt(k, getattr(metrics, k)) for k in METRIC_FIELDS])
        return buf.getvalue()
    if fmt != "json":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f'  "{k}": {_fmt(k, getattr(metrics, k))},' for k in METRIC_FIELDS]
    pop = sorted(metrics.popularity.items())
    if pop:
        body = ",\n".join(f"    {json.dumps(k, ensure_ascii=False)}: {v}" for k, v in pop)
        lines.append('  "popularity": {\n' + body + "\n  }")
    else:
        lines.append('  "popularity": {}')
    return "{\n" + "\n".join(lines) + "\n}\n"
