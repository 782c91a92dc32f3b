"""Generators for the named topology families, plus random layered networks.

Generated networks carry a FamilyTag so the capacity-bound rules can
recognize them; gains default to deterministic 1 everywhere (topology and
gain assignment are independent concerns).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import BadParams, BadPattern, NotK22K, UnroutableAfterRetries
from .network import ChannelGain, FamilyTag, LayeredNetwork, build_network


def _ids(count: int, start: int = 0) -> list[int]:
    return list(range(start, start + count))


# --- K x 2 x ... x 2 x K ------------------------------------------------------

@dataclass(frozen=True)
class K22KPattern:
    """Connectivity of a K x 2 x ... x 2 x K network.

    source_to_relay[i] is the set of layer-2 relays ({1, 2}) source i+1
    feeds; relay_to_relay[b] the relay edges (a, b') across middle boundary
    b; relay_to_dest[i] the last-layer relays destination i+1 hears.
    """

    source_to_relay: tuple[frozenset[int], ...]
    relay_to_relay: tuple[frozenset[tuple[int, int]], ...]
    relay_to_dest: tuple[frozenset[int], ...]

    @classmethod
    def full(cls, k: int, m: int) -> "K22KPattern":
        both = frozenset({1, 2})
        cross = frozenset({(1, 1), (1, 2), (2, 1), (2, 2)})
        return cls(
            source_to_relay=tuple(both for _ in range(k)),
            relay_to_relay=tuple(cross for _ in range(m - 1)),
            relay_to_dest=tuple(both for _ in range(k)),
        )

    @classmethod
    def parallel(cls, k: int, m: int) -> "K22KPattern":
        """Two disjoint relay chains; sources/destinations alternate sides."""
        side = lambda i: frozenset({1 if i % 2 == 0 else 2})
        straight = frozenset({(1, 1), (2, 2)})
        return cls(
            source_to_relay=tuple(side(i) for i in range(k)),
            relay_to_relay=tuple(straight for _ in range(m - 1)),
            relay_to_dest=tuple(side(i) for i in range(k)),
        )


def gen_k22k(k: int, m: int, pattern: K22KPattern,
             gain: int = 1) -> LayeredNetwork:
    """K sources, M middle layers of exactly two relays, K destinations."""
    if k < 1 or m < 1:
        raise BadParams(f"need K >= 1 and M >= 1, got K={k}, M={m}")
    if (len(pattern.source_to_relay) != k or len(pattern.relay_to_dest) != k
            or len(pattern.relay_to_relay) != m - 1):
        raise BadPattern("pattern size disagrees with K or M")

    sources = _ids(k)
    relays = [_ids(2, start=k + 2 * b) for b in range(m)]
    dests = _ids(k, start=k + 2 * m)
    layers = [sources] + relays + [dests]

    edges: list[tuple[int, int]] = []
    for i, rs in enumerate(pattern.source_to_relay):
        for r in rs:
            if r not in (1, 2):
                raise BadPattern(f"relay index {r} out of range")
            edges.append((sources[i], relays[0][r - 1]))
    for b, pairs in enumerate(pattern.relay_to_relay):
        for a, bb in pairs:
            if a not in (1, 2) or bb not in (1, 2):
                raise BadPattern(f"relay edge ({a}, {bb}) out of range")
            edges.append((relays[b][a - 1], relays[b + 1][bb - 1]))
    for i, rs in enumerate(pattern.relay_to_dest):
        for r in rs:
            if r not in (1, 2):
                raise BadPattern(f"relay index {r} out of range")
            edges.append((relays[-1][r - 1], dests[i]))

    gains = {e: ChannelGain.deterministic(gain) for e in edges}
    return build_network(
        layers, edges, gains,
        family=FamilyTag("k22k", (("k", k), ("m_layers", m))))


def is_non_interfering_k22k(net: LayeredNetwork) -> bool:
    """No first-relay-layer node reaches a last-relay-layer node that the
    other first-layer relay also reaches."""
    if net.family is None or net.family.kind != "k22k":
        if not _looks_k22k(net):
            raise NotK22K("network is not a K x 2 x ... x 2 x K instance")
    first = net.layers[1]
    last = net.layers[-2]
    reach = {r: net._forward_reachable(r) for r in first}
    for j in last:
        if all(j in reach[r] for r in first) and len(first) == 2:
            return False
    return True


def _looks_k22k(net: LayeredNetwork) -> bool:
    return (net.num_layers >= 3
            and all(len(lay) == 2 for lay in net.layers[1:-1]))


# --- folded chains -------------------------------------------------------------

def _folded_targets(i: int, k: int, m: int) -> list[int]:
    """Destination/relay indices 1 + [((i-1)^+ + (j-1)) mod K], j = 1..m."""
    base = max(i - 1, 0)
    return [1 + ((base + (j - 1)) % k) for j in range(1, m + 1)]


def gen_folded_single(k: int, m: int, gain: int = 1) -> LayeredNetwork:
    """Single-layer (K, m) folded chain: source i feeds m cyclically
    consecutive destinations starting at its own."""
    if not 1 <= m <= k:
        raise BadParams(f"need 1 <= m <= K, got m={m}, K={k}")
    sources = _ids(k)
    dests = _ids(k, start=k)
    edges = [(sources[i - 1], dests[t - 1])
             for i in range(1, k + 1) for t in _folded_targets(i, k, m)]
    gains = {e: ChannelGain.deterministic(gain) for e in edges}
    return build_network(
        [sources, dests], edges, gains,
        family=FamilyTag("folded_single", (("k", k), ("m", m))))


def gen_folded_two_layer(k: int, m: int, gain: int = 1) -> LayeredNetwork:
    """Two-layer (K, m) folded chain: pair i has m disjoint two-hop paths
    through relays with the folded-chain index pattern."""
    if not 1 <= m <= k:
        raise BadParams(f"need 1 <= m <= K, got m={m}, K={k}")
    sources = _ids(k)
    relays = _ids(k, start=k)
    dests = _ids(k, start=2 * k)
    edges = []
    for i in range(1, k + 1):
        for r in _folded_targets(i, k, m):
            edges.append((sources[i - 1], relays[r - 1]))
            edges.append((relays[r - 1], dests[i - 1]))
    edges = sorted(set(edges))
    gains = {e: ChannelGain.deterministic(gain) for e in edges}
    return build_network(
        [sources, relays, dests], edges, gains,
        family=FamilyTag("folded_two_layer", (("k", k), ("m", m))))


def gen_nested(l: int, gain: int = 1) -> LayeredNetwork:
    """L-nested folded chain: 3^L pairs, single layer.

    L = 1 is the (3, 2) folded chain.  Deeper levels take three copies of
    the previous level and wire every source of copy c to every
    destination of copy c+1 (cyclically), so interfering copies overlap
    completely and the pair-conflict graph stays fully connected at every
    nesting level.  (A one-to-one cross wiring would leave the conflict
    graph 3-colorable, collapsing the separation between coded and
    interference-avoidance schedules that this family exists to show.)
    """
    if l < 1:
        raise BadParams(f"need L >= 1, got {l}")
    k = 3 ** l
    edge_pairs = _nested_edges(l)
    sources = _ids(k)
    dests = _ids(k, start=k)
    edges = [(sources[i - 1], dests[j - 1]) for i, j in sorted(edge_pairs)]
    gains = {e: ChannelGain.deterministic(gain) for e in edges}
    return build_network(
        [sources, dests], edges, gains,
        family=FamilyTag("nested", (("l", l),)))


def _nested_edges(l: int) -> set[tuple[int, int]]:
    """(source pair, destination pair) edges of the L-nested chain."""
    if l == 1:
        return {(i, t) for i in (1, 2, 3) for t in _folded_targets(i, 3, 2)}
    prev = _nested_edges(l - 1)
    size = 3 ** (l - 1)
    edges: set[tuple[int, int]] = set()
    for copy in range(3):
        off = copy * size
        edges |= {(i + off, j + off) for i, j in prev}
    for copy in range(3):
        nxt = (copy + 1) % 3
        for i in range(1, size + 1):
            for q in range(1, size + 1):
                edges.add((copy * size + i, nxt * size + q))
    return edges


# --- random layered networks ---------------------------------------------------

def gen_random(layer_sizes: Sequence[int], p: float, seed: int,
               max_retries: int = 200, gain: int = 1) -> LayeredNetwork:
    """Seeded Bernoulli(p) edges between adjacent layers; redraws until
    every pair is routable."""
    if not 0.0 <= p <= 1.0:
        raise BadParams(f"edge probability must be in [0, 1], got {p}")
    if len(layer_sizes) < 2 or layer_sizes[0] != layer_sizes[-1]:
        raise BadParams("first and last layer sizes must match")
    rng = random.Random(seed)
    for _ in range(max_retries):
        next_id = 0
        layers = []
        for size in layer_sizes:
            layers.append(_ids(size, start=next_id))
            next_id += size
        edges = []
        for a, b in zip(layers, layers[1:]):
            for u in a:
                for v in b:
                    if rng.random() < p:
                        edges.append((u, v))
        gains = {e: ChannelGain.deterministic(gain) for e in edges}
        net = build_network(layers, edges, gains)
        if len(net.routable_pairs()) == net.num_pairs:
            return net
    raise UnroutableAfterRetries(
        f"no fully routable draw in {max_retries} tries (p={p}, seed={seed})")
