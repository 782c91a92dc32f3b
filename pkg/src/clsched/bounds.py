"""Normalized sum-capacity bounds and the constructive schedules that
meet them.

Bounds are exact rationals and are only claimed for recognized topology
families (folded chains, K x 2 x ... x 2 x K); anything else gets the
generic cross-path bound of 1/2 or the trivial 1.  Constructive schedules
fix the transmit and coding sets from closed-form rules; receive sets are
derived per node, which reproduces the worked examples and also covers
the parameter ranges where the closed-form receive rules break down.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .coloring import ColorAssignment, tdma_coloring
from .errors import (
    BadParams,
    NoCrossPath,
    NotK22K,
    UnroutablePair,
    UnsupportedM,
)
from .expansion import ExpandedNode, RouteExpandedGraph, expand
from .network import ChannelGain, Edge, LayeredNetwork
from .search import derive_receive_sets, search_end_to_end, search_mcl, search_mil
from .topologies import (
    gen_folded_single,
    gen_folded_two_layer,
    gen_nested,
    is_non_interfering_k22k,
)

RULE_LEMMA1 = "lemma1_cross_path"
RULE_THM2_NONINT = "thm2_noninterfering"
RULE_THM2_INT = "thm2_interfering"
RULE_LEMMA3 = "lemma3_folded"
RULE_THM4 = "thm4_two_layer_folded"
RULE_NONE = "none_applicable"


@dataclass(frozen=True)
class Lemma1Witness:
    """Channel-gain pattern that forces the 1/2 bound: one cross path
    S_i -> D_j plus one own path per pair carries the high gain, the rest
    are zeroed, and v_star can decode both messages."""

    src_pair: int
    dst_pair: int
    high_edges: frozenset[Edge]
    v_star: int

    def gain_assignment(self, net: LayeredNetwork, n: int) -> dict[Edge, ChannelGain]:
        return {
            e: ChannelGain.deterministic(n if e in self.high_edges else 0)
            for e in sorted(net.edges)
        }


@dataclass(frozen=True)
class BoundResult:
    alpha_upper: Fraction
    rule: str
    witness: Lemma1Witness | None = None


def witness_lemma1(net: LayeredNetwork, i: int, j: int) -> Lemma1Witness:
    """Appendix-style witness: high gain on one S_i -> D_j path and one
    own path per pair, zero elsewhere; v_star sits in both G_ij and G_jj
    of the surviving network."""
    if i == j:
        raise NoCrossPath("witness needs two distinct pairs")
    cross = sorted(net.routes(i, j))
    own_i = sorted(net.routes(i, i))
    own_j = sorted(net.routes(j, j))
    if not cross:
        raise NoCrossPath(f"no route from S_{i} to D_{j}")
    if not own_i or not own_j:
        raise NoCrossPath(f"pairs {i} and {j} must both be routable")

    def path_edges(path):
        return set(zip(path, path[1:]))

    high = frozenset(path_edges(cross[0]) | path_edges(own_i[0])
                     | path_edges(own_j[0]))
    surviving = LayeredNetwork(
        layers=net.layers, edges=frozenset(high),
        gains={e: net.gains[e] for e in high},
        num_pairs=net.num_pairs, names=net.names,
        layer_of=net.layer_of,
        out_adj={n: tuple(v for v in net.out_adj[n] if (n, v) in high)
                 for n in net.nodes},
        in_adj={n: tuple(u for u in net.in_adj[n] if (u, n) in high)
                for n in net.nodes},
    )
    g_ij = surviving.induced_subgraph(i, j).vertices
    g_jj = surviving.induced_subgraph(j, j).vertices
    common = g_ij & g_jj
    assert common, "cross and own paths always meet at D_j"
    v_star = min(common, key=lambda v: (net.layer_of[v], v))
    return Lemma1Witness(i, j, high, v_star)


def _relay_degree_max(net: LayeredNetwork) -> int:
    relays = [n for lay in net.layers[1:-1] for n in lay]
    if not relays:
        return 1
    return max(max(len(net.in_adj[r]), len(net.out_adj[r])) for r in relays)


def _first_cross_pair(net: LayeredNetwork) -> tuple[int, int] | None:
    adj = net.route_adjacency_graph()
    for i in range(1, net.num_pairs + 1):
        for j in range(1, net.num_pairs + 1):
            if i != j and adj.connected(i, j):
                if net.routes(i, i) and net.routes(j, j):
                    return (i, j)
    return None


def upper_bound(net: LayeredNetwork) -> BoundResult:
    """Best known upper bound on the normalized sum-capacity.

    Family-tagged networks get their theorem's value; untagged networks
    only the cross-path 1/2 or the trivial 1.
    """
    fam = net.family
    if fam is not None and fam.kind == "folded_single":
        return BoundResult(Fraction(1, fam.get("m")), RULE_LEMMA3)
    if fam is not None and fam.kind == "folded_two_layer":
        return BoundResult(Fraction(1, fam.get("m")), RULE_THM4)
    if fam is not None and fam.kind == "k22k":
        if is_non_interfering_k22k(net):
            return BoundResult(Fraction(1, _relay_degree_max(net)), RULE_THM2_NONINT)
        return BoundResult(Fraction(1, net.num_pairs), RULE_THM2_INT)
    cross = _first_cross_pair(net)
    if cross is not None:
        return BoundResult(Fraction(1, 2), RULE_LEMMA1,
                           witness_lemma1(net, *cross))
    return BoundResult(Fraction(1), RULE_NONE)


# --- K x 2 x ... x 2 x K schedules ----------------------------------------------


def _boundary_classes(net: LayeredNetwork, g: RouteExpandedGraph,
                      boundary: int) -> tuple[list[int], list[int], list[int]]:
    """Split the pairs active across one layer boundary into: touching
    only the first receiver-side relay, only the second, or both.

    First boundary: by source edges into the layer-2 relays.  Last
    boundary: by destination edges from the last relay layer.  Middle
    boundaries: by which receiving relay a pair's transmission reaches.
    """
    last_boundary = net.num_layers - 2
    k = net.num_pairs
    if boundary == 0:
        relays = net.layers[1]
        touch = {p: {r for r in relays if (net.source_of(p), r) in net.edges}
                 for p in range(1, k + 1)}
    elif boundary == last_boundary:
        relays = net.layers[-2]
        touch = {p: {r for r in relays if (r, net.dest_of(p)) in net.edges}
                 for p in range(1, k + 1)}
    else:
        relays = net.layers[boundary + 1]
        transmitters = net.layers[boundary]
        touch = {}
        for p in range(1, k + 1):
            reached = set()
            for u in transmitters:
                if u in g.supernodes and p in {m.pair for m in g.supernodes[u].members}:
                    reached |= {v for v in net.out_adj[u] if v in relays}
            touch[p] = reached
    active = sorted(p for p in range(1, k + 1) if touch[p])
    r1, r2 = (tuple(relays) + (None, None))[:2]
    only1 = [p for p in active if touch[p] == {r1}]
    only2 = [p for p in active if r2 is not None and touch[p] == {r2}]
    both = [p for p in active if p not in only1 and p not in only2]
    return only1, only2, both


def _pairing_colors(only1: list[int], only2: list[int],
                    both: list[int]) -> dict[int, int]:
    """The pick-one-from-each-side procedure: paired members share a
    color, everyone else gets a fresh one."""
    colors: dict[int, int] = {}
    nxt = 0
    for a, b in zip(only1, only2):
        colors[a] = colors[b] = nxt
        nxt += 1
    for p in only1[len(only2):] + only2[len(only1):] + both:
        colors[p] = nxt
        nxt += 1
    return colors


def construct_thm2_coloring(net: LayeredNetwork) -> ColorAssignment:
    """Independent-layer schedule for K x 2 x ... x 2 x K networks:
    per-boundary source/destination pairing when non-interfering (one
    color per relay degree), TDMA otherwise."""
    if net.family is None or net.family.kind != "k22k":
        if not all(len(lay) == 2 for lay in net.layers[1:-1]) or net.num_layers < 3:
            raise NotK22K("expected a K x 2 x ... x 2 x K network")
    g = expand(net)
    if g.unroutable_pairs:
        raise UnroutablePair(f"pairs {sorted(g.unroutable_pairs)} have no route")
    if not is_non_interfering_k22k(net):
        return tdma_coloring(g)

    boundaries = net.num_layers - 1
    colors = []
    for b in range(boundaries):
        only1, only2, both = _boundary_classes(net, g, b)
        colors.append(_pairing_colors(only1, only2, both))
    num_colors = max(max(c.values(), default=0) for c in colors) + 1

    transmit = {}
    receive = {}
    for n in g.nodes:
        layer = g.layer_of[n]
        if layer < boundaries:
            transmit[n] = {colors[layer][n.pair]}
        if layer > 0:
            receive[n] = {colors[layer - 1][n.pair]}
    return ColorAssignment.build(g, num_colors, transmit, None, receive)


# --- folded-chain schedules -------------------------------------------------------


def _interval_transmit(local_pairs: list[int], m: int,
                       m_prime: int) -> dict[int, frozenset[int]]:
    """Block rule: local source i repeats over the color interval
    [max(0, i - m'), min(m - 1, i - 1)]."""
    out = {}
    for idx, pair in enumerate(local_pairs, start=1):
        lo = max(0, idx - m_prime)
        hi = min(m - 1, idx - 1)
        out[pair] = frozenset(range(lo, hi + 1))
    return out


def _tail_block_transmit(local_pairs: list[int], m: int) -> dict[int, frozenset[int]]:
    """Short final block (fewer pairs than m): color 0 plus a nested tail
    of high colors, deepest for the last pair.

    The literal m' rule degenerates here (its lone color collides with
    the next block's first source at the wrap-around destination), so the
    tail sources echo the high-interval structure a full block would
    have, keeping every wrap destination cancellable.
    """
    r = len(local_pairs)
    out = {}
    for idx, pair in enumerate(local_pairs, start=1):
        out[pair] = frozenset({0} | set(range(1 + r - idx, m)))
    return out


def folded_single_transmit(k: int, m: int) -> dict[int, frozenset[int]]:
    """Transmit color sets (by pair) of the single-layer (K, m) schedule."""
    if not 1 <= m <= k:
        raise BadParams(f"need 1 <= m <= K, got m={m}, K={k}")
    if m == 1:
        return {p: frozenset({0}) for p in range(1, k + 1)}
    pairs = list(range(1, k + 1))
    if k <= 2 * m - 1:
        return _interval_transmit(pairs, m, k - m + 1)
    out: dict[int, frozenset[int]] = {}
    block = 2 * m - 1
    full_blocks, r = divmod(k, block)
    for b in range(full_blocks):
        out.update(_interval_transmit(pairs[b * block:(b + 1) * block], m, m))
    if r >= m:
        out.update(_interval_transmit(pairs[full_blocks * block:], m, r - m + 1))
    elif r:
        out.update(_tail_block_transmit(pairs[full_blocks * block:], m))
    return out


def _assignment_from_pair_transmit(g: RouteExpandedGraph, num_colors: int,
                                   by_pair: Mapping[int, frozenset[int]],
                                   coding: Mapping[ExpandedNode, frozenset[int]] | None = None,
                                   transmit_override: Mapping[ExpandedNode, frozenset[int]] | None = None,
                                   ) -> ColorAssignment:
    last = g.net.num_layers - 1
    transmit = {}
    for n in g.nodes:
        if g.layer_of[n] == last:
            continue
        if transmit_override and n in transmit_override:
            transmit[n] = transmit_override[n]
        else:
            transmit[n] = by_pair[n.pair]
    coding = dict(coding or {})
    receive = derive_receive_sets(
        g, num_colors,
        {n: frozenset(transmit.get(n, ())) for n in g.nodes},
        {n: frozenset(coding.get(n, ())) for n in g.nodes},
        cancellation_fallback=True)
    if receive is None:
        raise AssertionError("constructive transmit sets admit no receive sets")
    return ColorAssignment.build(g, num_colors, transmit, coding, receive)


def _repair_pair_transmit(g: RouteExpandedGraph, num_colors: int,
                          preferred: Mapping[int, frozenset[int]],
                          ) -> dict[int, frozenset[int]] | None:
    """Per-pair transmit sets for a single-layer network, by backtracking.

    Tries each pair's preferred set first, so intact closed-form cases
    come back unchanged and broken ones get the smallest deviation.  A
    destination is feasibility-checked as soon as its whole in-window is
    assigned.
    """
    from .search import _Masks, _receive_candidates, _to_mask

    net = g.net
    k = net.num_pairs
    full = (1 << num_colors) - 1
    subsets = sorted(range(1, full + 1), key=lambda s: (bin(s).count("1"), s))
    src_node = {p: ExpandedNode(net.source_of(p), p) for p in range(1, k + 1)}
    dst_node = {p: ExpandedNode(net.dest_of(p), p) for p in range(1, k + 1)}
    windows = {j: {w.pair for w in g.in_neighbors(dst_node[j])}
               for j in range(1, k + 1)}
    masks = _Masks(num_colors, {}, {n: 0 for n in g.nodes})

    def candidates(p: int) -> list[int]:
        first = [_to_mask(preferred[p])] if p in preferred else []
        return first + [s for s in subsets if s not in first]

    def go(i: int) -> bool:
        if i > k:
            return True
        assigned = set(range(1, i + 1))
        ready = [j for j in range(1, k + 1)
                 if i in windows[j] and windows[j] <= assigned]
        for s in candidates(i):
            masks.t[src_node[i]] = s
            if all(_receive_candidates(g, masks, dst_node[j], first_only=True)
                   for j in ready) and go(i + 1):
                return True
            del masks.t[src_node[i]]
        return False

    if not go(1):
        return None
    from .search import _to_set
    return {p: _to_set(masks.t[src_node[p]]) for p in range(1, k + 1)}


def construct_folded_single_coloring(k: int, m: int) -> ColorAssignment:
    """Repetition-coded schedule with m colors for the single-layer
    (K, m) folded chain (on expand(gen_folded_single(k, m))).

    The closed-form block rule is used verbatim where it works; for the
    parameter points where its parity breaks down (e.g. (7, 5)), the
    transmit sets are repaired by a deterministic search that keeps every
    salvageable closed-form set.
    """
    g = expand(gen_folded_single(k, m))
    by_pair = folded_single_transmit(k, m)
    try:
        return _assignment_from_pair_transmit(g, m, by_pair)
    except AssertionError:
        repaired = _repair_pair_transmit(g, m, by_pair)
        if repaired is None:
            raise BadParams(
                f"no {m}-color schedule found for the ({k},{m}) folded chain")
        return _assignment_from_pair_transmit(g, m, repaired)


def construct_folded_two_layer_coloring(k: int, m: int) -> ColorAssignment:
    """Schedule with m colors for the two-layer (K, m) folded chain.

    m = 1 needs one instant, m = K is TDMA; m = 2 and m = K - 1 give the
    first K - 1 pairs fixed colors and serve pair K by network coding at
    its relays plus repetition at its source.
    """
    if not 1 <= m <= k:
        raise BadParams(f"need 1 <= m <= K, got m={m}, K={k}")
    g = expand(gen_folded_two_layer(k, m))
    if m == 1:
        return _assignment_from_pair_transmit(
            g, 1, {p: frozenset({0}) for p in range(1, k + 1)})
    if m == k:
        return tdma_coloring(g)
    if m not in (2, k - 1):
        raise UnsupportedM(
            f"two-layer folded-chain schedule known for m in {{1, 2, K-1, K}}, "
            f"got m={m}, K={k}")

    if m == 2 and k % 2 == 0:
        by_pair = {p: frozenset({(p - 1) % 2}) for p in range(1, k + 1)}
        return _assignment_from_pair_transmit(g, 2, by_pair)

    # Odd K with m = 2, or m = K - 1: pair K rides network coding.
    if m == 2:
        base_colors = {p: frozenset({(p - 1) % 2}) for p in range(1, k)}
    else:
        base_colors = {p: frozenset({p - 1}) for p in range(1, k)}
    palette = frozenset(range(m))
    coding: dict[ExpandedNode, frozenset[int]] = {}
    override: dict[ExpandedNode, frozenset[int]] = {}
    net = g.net
    for n in g.nodes:
        if n.pair != k or g.layer_of[n] == net.num_layers - 1:
            continue
        if g.layer_of[n] == 0:
            override[n] = palette  # source repeats in every instant
            continue
        others = frozenset().union(
            *(base_colors[mm.pair] for mm in g.supernodes[n.base].members
              if mm.pair != k))
        coding[n] = others
        override[n] = palette - others
    by_pair = dict(base_colors)
    by_pair[k] = palette
    return _assignment_from_pair_transmit(g, m, by_pair, coding, override)


def nested_transmit(l: int) -> dict[int, frozenset[int]]:
    """Product schedule of the L-nested folded chain: each base-3 digit of
    the pair index picks the (3, 2) chain's slot set at its nesting level,
    and slots combine positionally into 2^L colors."""
    level_sets = {0: (0,), 1: (0, 1), 2: (1,)}
    out = {}
    for pair in range(1, 3 ** l + 1):
        digits = []
        rest = pair - 1
        for _ in range(l):
            digits.append(rest % 3)
            rest //= 3
        choices = [level_sets[d] for d in digits]

        def combos(level: int) -> list[int]:
            if level == l:
                return [0]
            return [bit * (2 ** level) + tail
                    for bit in choices[level] for tail in combos(level + 1)]

        out[pair] = frozenset(combos(0))
    return out


def construct_nested_schedule(l: int) -> ColorAssignment:
    """2^L-color schedule for the L-nested folded chain."""
    if l < 1:
        raise BadParams(f"need L >= 1, got {l}")
    g = expand(gen_nested(l))
    return _assignment_from_pair_transmit(g, 2 ** l, nested_transmit(l))


# --- comparison report ---------------------------------------------------------


@dataclass(frozen=True)
class GainReport:
    t_e2e: int
    t_mil: int
    t_mcl: int
    alpha_e2e: Fraction
    alpha_mil: Fraction
    alpha_mcl: Fraction
    bound: BoundResult
    ratio_mcl_over_mil: Fraction
    tight: bool
    mcl_source: str  # "constructive" or "search"


def constructive_coloring(net: LayeredNetwork) -> ColorAssignment | None:
    """The family's closed-form schedule, if this network carries a tag
    the constructions cover."""
    fam = net.family
    if fam is None:
        return None
    if fam.kind == "folded_single":
        return construct_folded_single_coloring(fam.get("k"), fam.get("m"))
    if fam.kind == "folded_two_layer":
        k, m = fam.get("k"), fam.get("m")
        if m in (1, 2, k - 1, k):
            return construct_folded_two_layer_coloring(k, m)
        return None
    if fam.kind == "nested":
        return construct_nested_schedule(fam.get("l"))
    if fam.kind == "k22k":
        return construct_thm2_coloring(net)
    return None


def gain_report(net: LayeredNetwork, search_budget: int = 1_000_000) -> GainReport:
    """Compare the three schedules and the upper bound on one network."""
    g = expand(net)
    if g.unroutable_pairs:
        raise UnroutablePair(f"pairs {sorted(g.unroutable_pairs)} have no route")
    e2e = search_end_to_end(g)
    mil = search_mil(g)
    constructive = constructive_coloring(net)
    if constructive is not None:
        t_mcl = constructive.num_colors
        source = "constructive"
    else:
        outcome = search_mcl(g, budget=search_budget)
        if outcome.found:
            t_mcl = outcome.num_colors
            source = "search"
        else:
            t_mcl = mil.num_colors  # MIL is itself a coded-layer schedule
            source = "search"
    bound = upper_bound(net)
    best = Fraction(1, min(t_mcl, mil.num_colors, e2e.num_colors))
    return GainReport(
        t_e2e=e2e.num_colors,
        t_mil=mil.num_colors,
        t_mcl=t_mcl,
        alpha_e2e=Fraction(1, e2e.num_colors),
        alpha_mil=Fraction(1, mil.num_colors),
        alpha_mcl=Fraction(1, t_mcl),
        bound=bound,
        ratio_mcl_over_mil=Fraction(mil.num_colors, t_mcl),
        tight=(best == bound.alpha_upper),
        mcl_source=source,
    )
