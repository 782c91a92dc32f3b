"""Independent brute-force oracles used to pin expected values.

These re-derive results from first principles (path enumeration through
networkx, direct set formulas, exhaustive assignment enumeration against
the public checker) without touching the implementations under test.
"""

from __future__ import annotations

import itertools

import networkx as nx

from clsched.coloring import (
    ColorAssignment,
    node_receive_violations,
    node_transmit_violations,
)
from clsched.expansion import ExpandedNode, RouteExpandedGraph


def nx_digraph(net) -> "nx.DiGraph":
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    g.add_edges_from(net.edges)
    return g


def all_paths(net, src_pair: int, dst_pair: int) -> set[tuple[int, ...]]:
    g = nx_digraph(net)
    return {
        tuple(p) for p in nx.all_simple_paths(
            g, net.source_of(src_pair), net.dest_of(dst_pair))
    } | ({(net.source_of(src_pair),)}
         if net.source_of(src_pair) == net.dest_of(dst_pair) else set())


def route_union_vertices(net, src_pair: int, dst_pair: int) -> frozenset[int]:
    verts = set()
    for path in all_paths(net, src_pair, dst_pair):
        verts.update(path)
    return frozenset(verts)


def pair_index_set_by_paths(net, node: int) -> frozenset[int]:
    return frozenset(
        j for j in range(1, net.num_pairs + 1)
        if node in route_union_vertices(net, j, j))


def interferers_by_clauses(g: RouteExpandedGraph, a: ColorAssignment,
                           node: ExpandedNode) -> frozenset[ExpandedNode]:
    """Clause-by-clause evaluation of the interferer definition."""
    arriving = set()
    for v in g.in_neighbors(node):
        if v.pair == node.pair:
            arriving |= a.t(v) | a.c(v)
    eff = a.r(node) & arriving
    out = set()
    for w in g.in_neighbors(node):
        if w.pair == node.pair:
            continue  # clause 1
        neutralized = False  # clause 2
        for sib in g.supernodes[w.base].members:
            if sib.pair == node.pair and a.t(w) & a.c(sib):
                neutralized = True
        if neutralized:
            continue
        if a.t(w) & eff:  # clause 3
            out.add(w)
    return frozenset(out)


# --- exhaustive minimal-period search -------------------------------------------

def _nonempty_subsets(num_colors: int) -> list[frozenset[int]]:
    colors = range(num_colors)
    out = []
    for r in range(1, num_colors + 1):
        out.extend(frozenset(c) for c in itertools.combinations(colors, r))
    return out


def _supernode_assignments(members, num_colors: int):
    """All (transmit, coding) maps for one super-node that survive the
    checker's per-super-node conditions.  Coding colors are drawn from
    sibling transmit sets: a coding color nobody transmits adds receive
    obligations downstream without transmitting anything, so it can never
    reduce the minimal period."""
    subsets = _nonempty_subsets(num_colors)

    def transmit_choices(idx: int, used: frozenset[int]):
        if idx == len(members):
            yield []
            return
        for t in subsets:
            if t & used:
                continue
            for rest in transmit_choices(idx + 1, used | t):
                yield [t] + rest

    for ts in transmit_choices(0, frozenset()):
        t_map = dict(zip(members, ts))
        donor_pool = {
            u: frozenset().union(*(t_map[v] for v in members if v != u))
            if len(members) > 1 else frozenset()
            for u in members
        }
        coding_choices = []
        for u in members:
            opts = [frozenset()]
            if len(t_map[u]) == 1 and donor_pool[u]:
                for r in range(1, len(donor_pool[u]) + 1):
                    opts.extend(frozenset(c) for c in
                                itertools.combinations(sorted(donor_pool[u]), r))
            coding_choices.append(opts)
        for cs in itertools.product(*coding_choices):
            yield t_map, dict(zip(members, cs))


def _receivable(g, a_partial: ColorAssignment, node) -> bool:
    """Does any receive set satisfy the checker at this node?"""
    colors = range(a_partial.num_colors)
    for r in range(len(list(colors)) + 1):
        for combo in itertools.combinations(colors, r):
            trial = ColorAssignment(
                a_partial.num_colors, a_partial.transmit, a_partial.coding,
                {**a_partial.receive, node: frozenset(combo)})
            if not node_receive_violations(g, trial, node):
                return True
    return False


def enumeration_minimal_t(g: RouteExpandedGraph, t_cap: int) -> int | None:
    """Smallest period <= t_cap admitting a checker-valid assignment, by
    exhaustive enumeration over super-node assignments."""
    last = g.net.num_layers - 1
    order = sorted((b for b in g.supernodes if g.net.layer_of[b] != last),
                   key=lambda b: (g.net.layer_of[b], b))
    receivers_after = {
        b: [n for n in g.receiving_nodes()
            if g.layer_of[n] == g.net.layer_of[b] + 1]
        for b in order
    }
    layer_last = {}
    for b in order:
        layer_last[g.net.layer_of[b]] = b

    for t in range(1, t_cap + 1):
        empty = {n: frozenset() for n in g.nodes}

        def feasible(idx: int, t_acc, c_acc) -> bool:
            if idx == len(order):
                return True
            base = order[idx]
            for t_map, c_map in _supernode_assignments(
                    g.supernodes[base].members, t):
                nt = {**t_acc, **t_map}
                nc = {**c_acc, **c_map}
                trial = ColorAssignment(t, {**empty, **nt}, {**empty, **nc}, empty)
                if node_transmit_violations(g, trial, base):
                    continue
                if layer_last[g.net.layer_of[base]] == base:
                    if not all(_receivable(g, trial, n)
                               for n in receivers_after[base]):
                        continue
                if feasible(idx + 1, nt, nc):
                    return True
            return False

        if feasible(0, {}, {}):
            return t
    return None
