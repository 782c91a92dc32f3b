"""Schedule construction by search.

search_mcl runs iterative deepening on the number of colors T with
backtracking over super-nodes: transmit and coding sets are searched,
receive sets are derived per node (they depend only on the node's own
in-neighbourhood, so feasibility can be checked layer by layer as the
search descends).

search_mil colors each layer boundary's pair-conflict graph exactly with a
shared palette; search_end_to_end colors the whole-pair conflict graph.
Both emit singleton transmit sets and no coding.

Internally color sets are integer bitmasks; public results are
ColorAssignment objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .coloring import ColorAssignment, check_coloring
from .errors import UnroutablePair
from .expansion import ExpandedNode, RouteExpandedGraph


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _submasks_by_size(mask: int) -> list[int]:
    """All submasks of mask ordered by (popcount, value): small and
    low-color-index first, so derived sets are minimal and reproducible."""
    bits = [b for b in range(mask.bit_length()) if mask >> b & 1]
    subs = [0]
    for r in range(1, len(bits) + 1):
        for combo in itertools.combinations(bits, r):
            subs.append(sum(1 << b for b in combo))
    subs.sort(key=lambda m: (_popcount(m), m))
    return subs


# --- per-node receive-set derivation ---------------------------------------------


@dataclass
class _Masks:
    """Bitmask view of a (partial) assignment during search."""

    num_colors: int
    t: dict[ExpandedNode, int]
    c: dict[ExpandedNode, int]

    @classmethod
    def empty(cls, num_colors: int) -> "_Masks":
        return cls(num_colors, {}, {})


def _receive_candidates(g: RouteExpandedGraph, m: _Masks, node: ExpandedNode,
                        first_only: bool = False) -> list[int]:
    """Valid receive masks for one node under the C4/C5/C6 conditions,
    smallest first.  Empty list means the in-neighbour assignment cannot
    serve this node at all."""
    own = [v for v in g.in_neighbors(node) if v.pair == node.pair]
    foreign = [w for w in g.in_neighbors(node) if w.pair != node.pair]
    mandatory = 0
    for v in own:
        mandatory |= m.c.get(v, 0)
    own_content = mandatory
    for v in own:
        own_content |= m.t.get(v, 0)

    full = (1 << m.num_colors) - 1
    results = []
    for extra in _submasks_by_size(full & ~mandatory):
        r_mask = mandatory | extra
        if _receive_ok(g, m, node, own, foreign, r_mask, own_content):
            results.append(r_mask)
            if first_only:
                break
    return results


def _receive_feasible(g: RouteExpandedGraph, m: _Masks,
                      node: ExpandedNode) -> bool:
    return bool(_receive_candidates(g, m, node, first_only=True))


def _receive_ok(g: RouteExpandedGraph, m: _Masks, node: ExpandedNode,
                own: list[ExpandedNode], foreign: list[ExpandedNode],
                r_mask: int, own_content: int) -> bool:
    for v in own:
        if _popcount(m.t.get(v, 0) & r_mask) != 1:
            return False
    zone = r_mask & own_content
    quiet = r_mask & ~zone
    constraints = []  # masks whose +-1 instant weights must sum to zero
    for w in foreign:
        t_w = m.t.get(w, 0)
        sibling_c = m.c.get(ExpandedNode(w.base, node.pair), 0)
        coded = t_w & sibling_c
        heard = t_w & r_mask
        if coded:
            if heard != coded & r_mask or _popcount(coded) != 1:
                return False
        elif t_w & zone:
            if _popcount(t_w & zone) != 1 or _popcount(t_w & quiet) != 1:
                return False
            constraints.append(heard)
        else:
            if _popcount(heard) % 2 != 0:
                return False
            if heard:
                constraints.append(heard)
    return _signs_solvable(constraints, quiet)


def _signs_solvable(constraints: list[int], quiet: int) -> bool:
    """Can +-1 weights on the quiet instants zero every constraint mask?

    Weights on desired instants are pinned to +1; interferers and coded
    terms already cancel structurally, so only the even-sized leftover
    masks (entirely inside the quiet zone) need a sign assignment.
    """
    if not constraints:
        return True
    bits = [b for b in range(quiet.bit_length()) if quiet >> b & 1]
    index = {b: i for i, b in enumerate(bits)}
    for signs in itertools.product((1, -1), repeat=len(bits)):
        ok = True
        for mask in constraints:
            total = 0
            for b in range(mask.bit_length()):
                if mask >> b & 1:
                    total += signs[index[b]] if b in index else 1
            if total != 0:
                ok = False
                break
        if ok:
            return True
    return False


class _MaskAssignment:
    """Duck-typed view of _Masks for the symbolic transmit builder."""

    def __init__(self, m: _Masks):
        self._m = m

    def t(self, dup: ExpandedNode) -> frozenset[int]:
        return _to_set(self._m.t.get(dup, 0))

    def c(self, dup: ExpandedNode) -> frozenset[int]:
        return _to_set(self._m.c.get(dup, 0))


def _cancellation_candidates(g: RouteExpandedGraph, m: _Masks,
                             node: ExpandedNode,
                             first_only: bool = False) -> list[int]:
    """Receive masks validated by exact per-edge symbol cancellation
    (modulo-2 and signed) instead of the per-interferer appearance
    structure.  Strictly more permissive than _receive_candidates: it
    admits cascaded cancellations the paper's case analysis never names,
    which some constructive schedules need."""
    from .channel import (
        MODE_DETERMINISTIC,
        MODE_GAUSSIAN,
        transmit_symbols,
    )

    view = _MaskAssignment(m)
    own = [v for v in g.in_neighbors(node) if v.pair == node.pair]
    mandatory = 0
    for v in own:
        mandatory |= m.c.get(v, 0)
    in_bases = g.in_bases(node)
    full = (1 << m.num_colors) - 1

    def sums_ok(r_mask: int) -> bool:
        for v in own:
            if _popcount(m.t.get(v, 0) & r_mask) != 1:
                return False
        window = [b for b in range(m.num_colors) if r_mask >> b & 1]
        per_base_instant = {
            b: [transmit_symbols(g, view, b, t, MODE_GAUSSIAN).terms
                for t in window]
            for b in in_bases
        }
        # Deterministic model: plain XOR accumulation must already cancel.
        for b in in_bases:
            want = (b, node.pair) if ExpandedNode(b, node.pair) in set(
                g.supernodes[b].members) else None
            totals: dict = {}
            for terms in per_base_instant[b]:
                for sym, coeff in terms.items():
                    totals[sym] = totals.get(sym, 0) + coeff
            for sym, coeff in totals.items():
                need = 1 if sym == want else 0
                if coeff % 2 != need:
                    return False
        # Gaussian model: some +-1 weighting of the window must cancel.
        for signs in itertools.product((1, -1), repeat=len(window)):
            good = True
            for b in in_bases:
                want = (b, node.pair) if ExpandedNode(b, node.pair) in set(
                    g.supernodes[b].members) else None
                totals = {}
                for sign, terms in zip(signs, per_base_instant[b]):
                    for sym, coeff in terms.items():
                        totals[sym] = totals.get(sym, 0) + sign * coeff
                for sym, coeff in totals.items():
                    need = 1 if sym == want else 0
                    if coeff != need:
                        good = False
                        break
                if want is not None and totals.get(want, 0) != 1:
                    good = False
                if not good:
                    break
            if good:
                return True
        return False

    results = []
    for extra in _submasks_by_size(full & ~mandatory):
        r_mask = mandatory | extra
        if sums_ok(r_mask):
            results.append(r_mask)
            if first_only:
                break
    return results


def derive_receive_sets(g: RouteExpandedGraph, num_colors: int,
                        transmit: dict[ExpandedNode, frozenset[int]],
                        coding: dict[ExpandedNode, frozenset[int]],
                        cancellation_fallback: bool = False,
                        ) -> dict[ExpandedNode, frozenset[int]] | None:
    """Smallest valid receive set for every receiving node, or None if
    some node cannot be served by the given transmit/coding sets.

    With cancellation_fallback, a node that admits no receive set under
    the per-interferer appearance conditions may still get one justified
    by exact symbol cancellation (both channel models)."""
    m = _Masks(num_colors,
               {n: _to_mask(s) for n, s in transmit.items()},
               {n: _to_mask(s) for n, s in coding.items()})
    out = {}
    for node in g.receiving_nodes():
        candidates = _receive_candidates(g, m, node, first_only=True)
        if not candidates and cancellation_fallback:
            candidates = _cancellation_candidates(g, m, node, first_only=True)
        if not candidates:
            return None
        out[node] = _to_set(candidates[0])
    return out


def _to_mask(colors) -> int:
    mask = 0
    for color in colors:
        mask |= 1 << color
    return mask


def _to_set(mask: int) -> frozenset[int]:
    return frozenset(b for b in range(mask.bit_length()) if mask >> b & 1)


# --- exact vertex coloring (conflict graphs on pair IDs) -------------------------

def exact_vertex_coloring(vertices: list[int],
                          conflicts: set[tuple[int, int]],
                          ) -> dict[int, int]:
    """Minimum proper coloring by iterative deepening backtracking.

    Vertices are colored in descending-degree order (ties by ID); colors
    are tried lowest-index first, so results are reproducible.
    """
    adj = {v: set() for v in vertices}
    for u, v in conflicts:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    order = sorted(vertices, key=lambda v: (-len(adj[v]), v))

    def attempt(k: int) -> dict[int, int] | None:
        coloring: dict[int, int] = {}

        def go(idx: int) -> bool:
            if idx == len(order):
                return True
            v = order[idx]
            used = {coloring[u] for u in adj[v] if u in coloring}
            bound = min(k, (max(coloring.values()) + 2) if coloring else 1)
            for color in range(bound):
                if color not in used:
                    coloring[v] = color
                    if go(idx + 1):
                        return True
                    del coloring[v]
            return False

        return coloring if go(0) else None

    if not vertices:
        return {}
    for k in range(1, len(vertices) + 1):
        result = attempt(k)
        if result is not None:
            return result
    raise AssertionError("unreachable: n colors always suffice")


# --- MIL and end-to-end schedules ------------------------------------------------

def _layer_pairs(g: RouteExpandedGraph, layer: int) -> list[int]:
    return sorted({n.pair for n in g.nodes if g.layer_of[n] == layer})


def mil_conflicts(g: RouteExpandedGraph, boundary: int) -> set[tuple[int, int]]:
    """Pairs that may not share a color while transmitting across one
    layer boundary: co-residents of a transmitting super-node, and pairs
    meeting at a common receiving node."""
    conflicts: set[tuple[int, int]] = set()
    for base, sn in g.supernodes.items():
        if g.net.layer_of[base] != boundary:
            continue
        for u, v in itertools.combinations(sn.members, 2):
            conflicts.add((min(u.pair, v.pair), max(u.pair, v.pair)))
    for node in g.nodes:
        if g.layer_of[node] != boundary + 1:
            continue
        for w in g.in_neighbors(node):
            if w.pair != node.pair:
                conflicts.add((min(node.pair, w.pair), max(node.pair, w.pair)))
    return conflicts


def search_mil(g: RouteExpandedGraph) -> ColorAssignment:
    """Minimal independent-layer schedule: per-boundary interference
    avoidance with a shared palette, no coding, singleton transmit sets."""
    if g.unroutable_pairs:
        raise UnroutablePair(f"pairs {sorted(g.unroutable_pairs)} have no route")
    boundaries = g.net.num_layers - 1
    colors: list[dict[int, int]] = []
    for b in range(boundaries):
        pairs = _layer_pairs(g, b)
        colors.append(exact_vertex_coloring(pairs, mil_conflicts(g, b)))
    num_colors = max(max(c.values(), default=-1) for c in colors) + 1

    transmit = {}
    receive = {}
    for n in g.nodes:
        layer = g.layer_of[n]
        if layer < boundaries:
            transmit[n] = {colors[layer][n.pair]}
        if layer > 0:
            receive[n] = {colors[layer - 1][n.pair]}
    return ColorAssignment.build(g, num_colors, transmit, None, receive)


def e2e_conflicts(g: RouteExpandedGraph) -> set[tuple[int, int]]:
    """Pairs joined by any edge of the route-expanded graph.

    An edge between duplicates of two pairs means one pair's transmission
    physically lands inside the other's subgraph, so an end-to-end
    schedule may not run them in the same instant.  (Disjointness of the
    induced subgraphs alone misses interference edges between them.)
    """
    conflicts = set()
    for u, v in g.edges:
        if u.pair != v.pair:
            conflicts.add((min(u.pair, v.pair), max(u.pair, v.pair)))
    return conflicts


def search_end_to_end(g: RouteExpandedGraph) -> ColorAssignment:
    """One color per pair everywhere, mutually interfering pairs apart."""
    if g.unroutable_pairs:
        raise UnroutablePair(f"pairs {sorted(g.unroutable_pairs)} have no route")
    pairs = sorted(g.net.routable_pairs())
    coloring = exact_vertex_coloring(pairs, e2e_conflicts(g))
    num_colors = max(coloring.values()) + 1
    last = g.net.num_layers - 1

    transmit = {}
    receive = {}
    for n in g.nodes:
        if g.layer_of[n] != last:
            transmit[n] = {coloring[n.pair]}
        if g.layer_of[n] != 0:
            receive[n] = {coloring[n.pair]}
    return ColorAssignment.build(g, num_colors, transmit, None, receive)


# --- maximal coded-layer search ----------------------------------------------------

@dataclass(frozen=True)
class SearchOutcome:
    """Result of search_mcl.

    When exhausted is True the budget ran out: t_frontier is the smallest
    period whose feasibility is unknown, and any assignment present is an
    upper bound on the minimum rather than a proven optimum.
    """

    assignment: ColorAssignment | None
    num_colors: int | None
    exhausted: bool
    t_frontier: int
    expansions: int

    @property
    def found(self) -> bool:
        return self.assignment is not None


def _supernode_options(g: RouteExpandedGraph, m: _Masks, base: int,
                       ) -> list[tuple[dict[ExpandedNode, int], dict[ExpandedNode, int]]]:
    """Joint (transmit, coding) choices for one super-node, canonical order.

    Transmit sets are non-empty and pairwise disjoint (C1).  Coding is
    attempted only in super-nodes with at least two members: a coding
    member transmits once (C2) and borrows at most one color from each
    non-coding sibling's transmit set (C3).
    """
    members = g.supernodes[base].members
    full = (1 << m.num_colors) - 1
    nonempty = [s for s in _submasks_by_size(full) if s]

    t_choices: list[list[int]] = []

    def assign_t(idx: int, used: int, acc: list[int]) -> None:
        if idx == len(members):
            t_choices.append(list(acc))
            return
        for t_mask in nonempty:
            if t_mask & used:
                continue
            acc.append(t_mask)
            assign_t(idx + 1, used | t_mask, acc)
            acc.pop()

    assign_t(0, 0, [])

    options = []
    for ts in t_choices:
        t_map = dict(zip(members, ts))
        for c_map in _coding_options(members, t_map):
            options.append((t_map, c_map))
    return options


def _coding_options(members, t_map) -> list[dict[ExpandedNode, int]]:
    if len(members) < 2:
        return [{u: 0 for u in members}]
    per_member: list[list[int]] = []
    for u in members:
        opts = [0]
        if _popcount(t_map[u]) == 1:
            donor_picks: list[list[int]] = []
            for v in members:
                if v == u:
                    continue
                picks = [0] + [1 << b for b in range(t_map[v].bit_length())
                               if t_map[v] >> b & 1]
                donor_picks.append(picks)
            for combo in itertools.product(*donor_picks):
                mask = 0
                for bit in combo:
                    mask |= bit
                if mask:
                    opts.append(mask)
        per_member.append(sorted(set(opts), key=lambda x: (_popcount(x), x)))

    options = []
    for combo in itertools.product(*per_member):
        c_map = dict(zip(members, combo))
        ok = True
        for u in members:
            if not c_map[u]:
                continue
            for v in members:
                if v != u and (c_map[u] & t_map[v]) and c_map[v]:
                    ok = False  # borrowed from a coding sibling (C3)
        if ok:
            options.append(c_map)
    return options


def mcl_lower_bound(g: RouteExpandedGraph) -> int:
    """Colors forced by C1: a transmitting super-node needs one disjoint
    non-empty transmit set per member."""
    last = g.net.num_layers - 1
    sizes = [len(sn.members) for base, sn in g.supernodes.items()
             if g.net.layer_of[base] != last]
    return max([1] + sizes)


def search_mcl(g: RouteExpandedGraph, t_max: int | None = None,
               budget: int = 10_000_000) -> SearchOutcome:
    """Find a valid coded-layer schedule with as few colors as possible.

    Iterative deepening on T; within one T, depth-first search over
    transmitting super-nodes in layer order.  After a layer is fully
    assigned, every next-layer node must still admit a receive set, which
    prunes most of the tree.  The budget counts super-node assignments.
    """
    if g.unroutable_pairs:
        raise UnroutablePair(f"pairs {sorted(g.unroutable_pairs)} have no route")
    if t_max is None:
        t_max = g.net.num_pairs
    last = g.net.num_layers - 1
    supernode_order = sorted(
        (base for base in g.supernodes if g.net.layer_of[base] != last),
        key=lambda b: (g.net.layer_of[b], b))
    layer_end = {}  # index after which a layer is fully assigned
    for idx, base in enumerate(supernode_order):
        layer_end[g.net.layer_of[base]] = idx

    expansions = 0

    def attempt(num_colors: int) -> ColorAssignment | None:
        nonlocal expansions
        m = _Masks.empty(num_colors)
        option_cache = {
            base: _supernode_options(g, m, base) for base in supernode_order}

        def nodes_ready_after(idx: int) -> list[ExpandedNode]:
            layer = g.net.layer_of[supernode_order[idx]]
            if layer_end[layer] != idx:
                return []
            return [n for n in g.receiving_nodes() if g.layer_of[n] == layer + 1]

        def go(idx: int) -> bool:
            nonlocal expansions
            if idx == len(supernode_order):
                return True
            base = supernode_order[idx]
            for t_map, c_map in option_cache[base]:
                if expansions >= budget:
                    return False
                expansions += 1
                m.t.update(t_map)
                m.c.update(c_map)
                ok = all(_receive_feasible(g, m, n)
                         for n in nodes_ready_after(idx))
                if ok and go(idx + 1):
                    return True
                for u in t_map:
                    del m.t[u]
                    del m.c[u]
            return False

        if not go(0):
            return None
        transmit = {n: _to_set(v) for n, v in m.t.items()}
        coding = {n: _to_set(v) for n, v in m.c.items()}
        receive = derive_receive_sets(g, num_colors, transmit, coding)
        assert receive is not None, "search accepted an unservable assignment"
        assignment = ColorAssignment.build(g, num_colors, transmit, coding, receive)
        report = check_coloring(g, assignment)
        assert report.valid, f"search emitted an invalid coloring: {report.violations[:3]}"
        return assignment

    for t in range(mcl_lower_bound(g), t_max + 1):
        found = attempt(t)
        if found is not None:
            return SearchOutcome(found, t, False, t, expansions)
        if expansions >= budget:
            return SearchOutcome(None, None, True, t, expansions)
    return SearchOutcome(None, None, False, t_max + 1, expansions)
