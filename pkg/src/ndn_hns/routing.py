"""Static shortest-path FIB population and sibling-prefix aggregation."""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass

from .codec import serialize_prefix
from .errors import DisconnectedTopology
from .name import NamePrefix
from .scenario import ProducerSpec, Topology

# End devices hold routes too, but only content-router tables are what
# aggregation is meant to shrink.
ROUTER_ROLES = frozenset({"router", "campus_server"})

Table = dict[NamePrefix, tuple[str, ...]]


@dataclass(frozen=True)
class Routes:
    """Per-node FIB contents. Next hops are neighbour node ids, best first."""

    unaggregated: dict[str, Table]
    aggregated: dict[str, Table]
    fib_entries_unaggregated: int
    fib_entries_aggregated: int

    @property
    def aggregation_ratio(self) -> float:
        if self.fib_entries_aggregated == 0:
            return 1.0
        return self.fib_entries_unaggregated / self.fib_entries_aggregated


def check_connected(topology: Topology) -> None:
    adj = topology.neighbors()
    start = topology.nodes[0].node_id
    seen, stack = {start}, [start]
    while stack:
        for v in adj[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    missing = sorted(adj.keys() - seen)
    if missing:
        raise DisconnectedTopology(f"node(s) unreachable from {start}: {', '.join(missing)}")


def distances(adj: dict[str, dict[str, int]], source: str) -> dict[str, int]:
    """Latency-weighted Dijkstra distances from ``source``."""
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u].items():
            nd = d + w
            if nd < dist.get(v, nd + 1):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def next_hop(adj: dict[str, dict[str, int]], dist: dict[str, int], node: str) -> str:
    """Neighbour on a shortest path from ``node`` towards the Dijkstra source; lowest id wins ties."""
    return min(v for v, w in adj[node].items() if dist[v] + w == dist[node])


def aggregate(table: Table) -> Table:
    """Collapse sibling prefixes with identical next hops into their parent, to a fixed point.

    A collapse is skipped when the parent already routes elsewhere.
    """
    table = dict(table)
    while True:
        groups: dict[tuple[NamePrefix, tuple[str, ...]], list[NamePrefix]] = defaultdict(list)
        for prefix, hops in table.items():
            if prefix.parent is not None:
                groups[(prefix.parent, hops)].append(prefix)
        for (parent, hops), kids in sorted(groups.items(), key=lambda kv: serialize_prefix(kv[0][0])):
            if len(kids) < 2 or table.get(parent, hops) != hops:
                continue
            for kid in kids:
                del table[kid]
            table[parent] = hops
            break
        else:
            return table


def build_routes(topology: Topology, producers: tuple[ProducerSpec, ...] | list[ProducerSpec]) -> Routes:
    check_connected(topology)
    adj = topology.neighbors()
    dist_from = {p.node_id: distances(adj, p.node_id) for p in producers}
    serving: dict[NamePrefix, list[str]] = defaultdict(list)
    for p in producers:
        if p.node_id not in serving[p.served_prefix]:
            serving[p.served_prefix].append(p.node_id)

    unaggregated: dict[str, Table] = {}
    for n in topology.nodes:
        u = n.node_id
        table: Table = {}
        for prefix in sorted(serving, key=serialize_prefix):
            hosts = serving[prefix]
            if u in hosts:
                continue
            hops: list[str] = []
            for q in sorted(hosts, key=lambda q: (dist_from[q][u], q)):
                hop = next_hop(adj, dist_from[q], u)
                if hop not in hops:
                    hops.append(hop)
            table[prefix] = tuple(hops)
        unaggregated[u] = table

    aggregated = {u: aggregate(t) for u, t in unaggregated.items()}
    routers = [n.node_id for n in topology.nodes if n.role in ROUTER_ROLES]
    return Routes(
        unaggregated,
        aggregated,
        sum(len(unaggregated[u]) for u in routers),
        sum(len(aggregated[u]) for u in routers),
    )
