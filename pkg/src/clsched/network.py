"""Layered multi-pair networks and their route structure.

A network is a layered DAG with K source/destination pairs: layer 1 holds
the sources S_1..S_K, the last layer the destinations D_1..D_K, and every
edge goes from one layer to the next.  Each edge carries a channel gain,
either a non-negative shift amount (linear deterministic model) or an
opaque symbol (Gaussian model).

On top of the raw graph this module derives everything the schedules are
defined over: routes, the per-pair induced subgraphs G_ij, the index sets
J of pairs riding each node, degrees, and the route-adjacency graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    CrossLayerEdge,
    DanglingGain,
    DuplicateEdge,
    LayerMismatch,
    MixedGainKinds,
    NetworkError,
)

Edge = tuple[int, int]

DETERMINISTIC = "deterministic"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ChannelGain:
    """Gain on one edge: shift amount n >= 0, or a symbolic Gaussian label."""

    kind: str
    n: int | None = None
    label: str | None = None

    @classmethod
    def deterministic(cls, n: int) -> "ChannelGain":
        if n < 0:
            raise NetworkError(f"deterministic gain must be >= 0, got {n}")
        return cls(DETERMINISTIC, n=n)

    @classmethod
    def gaussian(cls, label: str) -> "ChannelGain":
        return cls(GAUSSIAN, label=label)

    def __str__(self) -> str:
        return str(self.n) if self.kind == DETERMINISTIC else f"h:{self.label}"


@dataclass(frozen=True)
class FamilyTag:
    """Identifies which generator produced a network, with its parameters.

    Capacity bounds are only claimed for recognized families; untagged
    networks fall back to the generic cross-path bound.
    """

    kind: str
    params: tuple[tuple[str, int], ...] = ()

    def get(self, key: str) -> int:
        return dict(self.params)[key]


@dataclass(frozen=True)
class InducedSubgraph:
    """G_ij: the union of all routes from S_i to D_j, with internal edges."""

    src_pair: int
    dst_pair: int
    vertices: frozenset[int]
    edges: frozenset[Edge]

    def __bool__(self) -> bool:
        return bool(self.vertices)


@dataclass(frozen=True)
class DegreeReport:
    in_degree: Mapping[int, int]
    out_degree: Mapping[int, int]
    d_max: int


@dataclass(frozen=True)
class RouteAdjacency:
    """Bipartite source/destination graph: edge (i, j) iff a route S_i -> D_j exists."""

    num_pairs: int
    edges: frozenset[tuple[int, int]]

    def connected(self, src_pair: int, dst_pair: int) -> bool:
        return (src_pair, dst_pair) in self.edges


@dataclass(frozen=True)
class LayeredNetwork:
    layers: tuple[tuple[int, ...], ...]
    edges: frozenset[Edge]
    gains: Mapping[Edge, ChannelGain]
    num_pairs: int
    names: Mapping[int, str]
    family: FamilyTag | None = None
    # Derived maps, filled in by build_network.
    layer_of: Mapping[int, int] = field(default_factory=dict)
    out_adj: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    in_adj: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    pair_members: tuple[frozenset[int], ...] = ()

    # --- basic accessors ----------------------------------------------------

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def sources(self) -> tuple[int, ...]:
        return self.layers[0]

    @property
    def destinations(self) -> tuple[int, ...]:
        return self.layers[-1]

    def source_of(self, pair: int) -> int:
        return self.sources[pair - 1]

    def dest_of(self, pair: int) -> int:
        return self.destinations[pair - 1]

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(n for layer in self.layers for n in layer)

    def name(self, node: int) -> str:
        return self.names.get(node, str(node))

    def gain(self, edge: Edge) -> ChannelGain:
        return self.gains[edge]

    @property
    def gain_kind(self) -> str:
        for g in self.gains.values():
            return g.kind
        return DETERMINISTIC

    def with_gains(self, gains: Mapping[Edge, ChannelGain]) -> "LayeredNetwork":
        """Same topology, different gain assignment."""
        full = dict(self.gains)
        for e, g in gains.items():
            if e not in self.edges:
                raise DanglingGain(f"gain for nonexistent edge {e}")
            full[e] = g
        return LayeredNetwork(
            layers=self.layers, edges=self.edges, gains=full,
            num_pairs=self.num_pairs, names=self.names, family=self.family,
            layer_of=self.layer_of, out_adj=self.out_adj, in_adj=self.in_adj,
            pair_members=self.pair_members)

    # --- route structure ------------------------------------------------------

    def routes(self, src: int, dst: int) -> frozenset[tuple[int, ...]]:
        """All layer-monotone paths from S_src to D_dst, as node tuples.

        The layering makes the graph acyclic, so plain DFS terminates
        without a visited set.
        """
        start = self.source_of(src)
        goal = self.dest_of(dst)
        reaches_goal = self._backward_reachable(goal)
        if start not in reaches_goal:
            return frozenset()
        paths: list[tuple[int, ...]] = []
        stack = [(start,)]
        while stack:
            path = stack.pop()
            tail = path[-1]
            if tail == goal:
                paths.append(path)
                continue
            for nxt in self.out_adj[tail]:
                if nxt in reaches_goal:
                    stack.append(path + (nxt,))
        return frozenset(paths)

    def induced_subgraph(self, src: int, dst: int) -> InducedSubgraph:
        """G_ij: union of all routes S_src -> D_dst plus edges between them."""
        start = self.source_of(src)
        goal = self.dest_of(dst)
        verts = self._forward_reachable(start) & self._backward_reachable(goal)
        edges = frozenset(e for e in self.edges if e[0] in verts and e[1] in verts)
        return InducedSubgraph(src, dst, frozenset(verts), edges)

    def pair_index_set(self, node: int) -> frozenset[int]:
        """J: the pairs j with node on some route S_j -> D_j."""
        return frozenset(
            j for j in range(1, self.num_pairs + 1)
            if node in self.pair_members[j - 1])

    def degrees(self) -> DegreeReport:
        ind = {n: len(self.in_adj[n]) for n in self.nodes}
        outd = {n: len(self.out_adj[n]) for n in self.nodes}
        d_max = max(max(ind[n], outd[n]) for n in self.nodes)
        return DegreeReport(ind, outd, d_max)

    def route_adjacency_graph(self) -> RouteAdjacency:
        edges = set()
        for i in range(1, self.num_pairs + 1):
            reach = self._forward_reachable(self.source_of(i))
            for j in range(1, self.num_pairs + 1):
                if self.dest_of(j) in reach:
                    edges.add((i, j))
        return RouteAdjacency(self.num_pairs, frozenset(edges))

    def non_interfering(self, i: int, j: int) -> bool:
        """True iff G_ii and G_jj share no vertex."""
        return not (self.pair_members[i - 1] & self.pair_members[j - 1])

    def routable_pairs(self) -> frozenset[int]:
        return frozenset(
            j for j in range(1, self.num_pairs + 1) if self.pair_members[j - 1])

    # --- internals -----------------------------------------------------------

    def _forward_reachable(self, start: int) -> set[int]:
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in self.out_adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    def _backward_reachable(self, goal: int) -> set[int]:
        seen = {goal}
        frontier = [goal]
        while frontier:
            node = frontier.pop()
            for prv in self.in_adj[node]:
                if prv not in seen:
                    seen.add(prv)
                    frontier.append(prv)
        return seen


def build_network(
    layers: Sequence[Sequence[int]],
    edges: Iterable[Edge],
    gains: Mapping[Edge, ChannelGain] | None = None,
    names: Mapping[int, str] | None = None,
    family: FamilyTag | None = None,
) -> LayeredNetwork:
    """Validate and assemble a LayeredNetwork.

    The first and last layers fix the pair order: layers[0][k] is S_{k+1}
    and layers[-1][k] is D_{k+1}.  Edges must connect adjacent layers,
    appear at most once, and every gain must refer to an existing edge.
    Missing gains default to deterministic 1.
    """
    if len(layers) < 2 or any(len(lay) == 0 for lay in layers):
        raise LayerMismatch("need at least source and destination layers, all non-empty")
    if len(layers[0]) != len(layers[-1]):
        raise LayerMismatch(
            f"{len(layers[0])} sources vs {len(layers[-1])} destinations")
    num_pairs = len(layers[0])

    layer_of: dict[int, int] = {}
    for idx, lay in enumerate(layers):
        for node in lay:
            if node in layer_of:
                raise NetworkError(f"node {node} appears in more than one layer")
            layer_of[node] = idx

    edge_list = list(edges)
    edge_set = set(edge_list)
    if len(edge_set) != len(edge_list):
        dupes = sorted({e for e in edge_list if edge_list.count(e) > 1})
        raise DuplicateEdge(f"parallel edges not allowed: {dupes}")
    for u, v in edge_set:
        if u not in layer_of or v not in layer_of:
            raise NetworkError(f"edge ({u}, {v}) references unknown node")
        if layer_of[v] != layer_of[u] + 1:
            raise CrossLayerEdge(
                f"edge ({u}, {v}) goes from layer {layer_of[u] + 1} "
                f"to layer {layer_of[v] + 1}")

    gains = dict(gains or {})
    for e in gains:
        if e not in edge_set:
            raise DanglingGain(f"gain for nonexistent edge {e}")
    kinds = {g.kind for g in gains.values()}
    if len(kinds) > 1:
        raise MixedGainKinds(f"gain kinds mixed: {sorted(kinds)}")
    default_kind = kinds.pop() if kinds else DETERMINISTIC
    for e in edge_set:
        if e not in gains:
            gains[e] = (ChannelGain.deterministic(1) if default_kind == DETERMINISTIC
                        else ChannelGain.gaussian(f"e{e[0]}_{e[1]}"))

    all_nodes = [n for lay in layers for n in lay]
    out_adj = {n: [] for n in all_nodes}
    in_adj = {n: [] for n in all_nodes}
    for u, v in sorted(edge_set):
        out_adj[u].append(v)
        in_adj[v].append(u)

    if names is None:
        names = {}
        for k, s in enumerate(layers[0]):
            names[s] = f"S{k + 1}"
        for k, d in enumerate(layers[-1]):
            names[d] = f"D{k + 1}"
        for li, lay in enumerate(layers[1:-1], start=2):
            for k, r in enumerate(lay):
                names[r] = f"R{li}_{k + 1}" if len(layers) > 3 else f"R{k + 1}"

    net = LayeredNetwork(
        layers=tuple(tuple(lay) for lay in layers),
        edges=frozenset(edge_set),
        gains=gains,
        num_pairs=num_pairs,
        names=dict(names),
        family=family,
        layer_of=layer_of,
        out_adj={n: tuple(v) for n, v in out_adj.items()},
        in_adj={n: tuple(v) for n, v in in_adj.items()},
    )
    # G_jj vertex sets: reachable from S_j and reaching D_j.
    members = []
    for j in range(1, num_pairs + 1):
        fwd = net._forward_reachable(net.source_of(j))
        bwd = net._backward_reachable(net.dest_of(j))
        members.append(frozenset(fwd & bwd))
    object.__setattr__(net, "pair_members", tuple(members))
    return net
