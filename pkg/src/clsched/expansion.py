"""Route-expanded graphs.

Every node V of the base network is duplicated once per pair j in its
index set J_V; duplicates of one base node form a super-node.  Two
duplicates are connected exactly when their base nodes are, regardless of
pair labels, so the expansion sees every interference edge the physical
network has.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .network import LayeredNetwork


class ExpandedNode(NamedTuple):
    base: int
    pair: int


@dataclass(frozen=True)
class SuperNode:
    base: int
    members: tuple[ExpandedNode, ...]


@dataclass(frozen=True)
class RouteExpandedGraph:
    net: LayeredNetwork
    nodes: tuple[ExpandedNode, ...]
    edges: frozenset[tuple[ExpandedNode, ExpandedNode]]
    supernodes: Mapping[int, SuperNode]
    layer_of: Mapping[ExpandedNode, int]
    unroutable_pairs: frozenset[int]

    def in_neighbors(self, node: ExpandedNode) -> tuple[ExpandedNode, ...]:
        return self._in_adj[node]

    def out_neighbors(self, node: ExpandedNode) -> tuple[ExpandedNode, ...]:
        return self._out_adj[node]

    def in_bases(self, node: ExpandedNode) -> tuple[int, ...]:
        """Base-network in-neighbours of node's base that carry any pair."""
        return self._in_bases[node.base]

    def pairs_at(self, base: int) -> tuple[int, ...]:
        sn = self.supernodes.get(base)
        return tuple(m.pair for m in sn.members) if sn else ()

    def transmitting_nodes(self) -> tuple[ExpandedNode, ...]:
        """Expanded nodes outside the destination layer, in fixed order."""
        last = self.net.num_layers - 1
        return tuple(n for n in self.nodes if self.layer_of[n] != last)

    def receiving_nodes(self) -> tuple[ExpandedNode, ...]:
        """Expanded nodes outside the source layer, in fixed order."""
        return tuple(n for n in self.nodes if self.layer_of[n] != 0)

    def label(self, node: ExpandedNode) -> str:
        return f"{self.net.name(node.base)}:{node.pair}"


def expand(net: LayeredNetwork) -> RouteExpandedGraph:
    """Build the route-expanded graph of a layered network.

    Nodes with an empty index set (on no pair's own route) are omitted;
    pairs with no route at all are reported in unroutable_pairs.  Node
    order is fixed lexicographically by (layer, base, pair) so search and
    file output are reproducible.
    """
    index_sets = {v: net.pair_index_set(v) for v in net.nodes}
    nodes = [
        ExpandedNode(base, pair)
        for base in sorted(net.nodes, key=lambda b: (net.layer_of[b], b))
        for pair in sorted(index_sets[base])
    ]
    node_set = set(nodes)
    supernodes = {}
    for base in net.nodes:
        members = tuple(ExpandedNode(base, j) for j in sorted(index_sets[base]))
        if members:
            supernodes[base] = SuperNode(base, members)

    edges = set()
    out_adj: dict[ExpandedNode, list[ExpandedNode]] = {n: [] for n in nodes}
    in_adj: dict[ExpandedNode, list[ExpandedNode]] = {n: [] for n in nodes}
    for u, v in sorted(net.edges):
        for un in supernodes.get(u, SuperNode(u, ())).members:
            for vn in supernodes.get(v, SuperNode(v, ())).members:
                edges.add((un, vn))
                out_adj[un].append(vn)
                in_adj[vn].append(un)

    in_bases = {
        base: tuple(b for b in net.in_adj[base] if b in supernodes)
        for base in supernodes
    }

    unroutable = frozenset(
        j for j in range(1, net.num_pairs + 1)
        if j not in index_sets[net.source_of(j)])

    g = RouteExpandedGraph(
        net=net,
        nodes=tuple(nodes),
        edges=frozenset(edges),
        supernodes=supernodes,
        layer_of={n: net.layer_of[n.base] for n in nodes},
        unroutable_pairs=unroutable,
    )
    object.__setattr__(g, "_out_adj", {n: tuple(out_adj[n]) for n in nodes})
    object.__setattr__(g, "_in_adj", {n: tuple(in_adj[n]) for n in nodes})
    object.__setattr__(g, "_in_bases", in_bases)
    assert all(n in node_set for n in g.nodes)
    return g


def pair_neighbors(g: RouteExpandedGraph, node: ExpandedNode) -> frozenset[ExpandedNode]:
    """N_{i,j}: in-neighbour duplicates that carry node's own pair."""
    return frozenset(n for n in g.in_neighbors(node) if n.pair == node.pair)
