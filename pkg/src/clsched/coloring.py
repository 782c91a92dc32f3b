"""Color assignments on route-expanded graphs and their validity conditions.

A schedule with period T assigns every expanded node a transmit set (the
instants it sends, repetition-coded), a coding set (the instants whose
signals it folds into its own transmission to neutralize them downstream)
and a receive set (the instants it sums over to reconstruct its own-pair
signal).

check_coloring enforces:

C1  transmit sets within a super-node are disjoint;
C2  a coding node transmits exactly once;
C3  coding colors are drawn from non-coding same-super-node transmit sets,
    at most one per donor, never from the node's own;
C4  receive sets contain every same-pair in-neighbour coding set;
C5  exactly one instant of each same-pair in-neighbour transmit set is
    received;
C6  every foreign transmission that lands in the receive set is
    cancellable: neutralized in-neighbours appear only at their coded
    instant, interferers appear exactly once during a desired instant and
    exactly once during an interference-only instant, and any other
    foreign node appears an even number of times, all outside the desired
    instants.

C6 is enforced per interferer rather than through one globally shared
color; the shared-color form is the special case where all interferers
cancel at the same instant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidColoring, MalformedAssignment
from .expansion import ExpandedNode, RouteExpandedGraph, pair_neighbors

EMPTY: frozenset[int] = frozenset()


@dataclass(frozen=True)
class ColorAssignment:
    num_colors: int
    transmit: Mapping[ExpandedNode, frozenset[int]]
    coding: Mapping[ExpandedNode, frozenset[int]]
    receive: Mapping[ExpandedNode, frozenset[int]]

    def t(self, node: ExpandedNode) -> frozenset[int]:
        return self.transmit.get(node, EMPTY)

    def c(self, node: ExpandedNode) -> frozenset[int]:
        return self.coding.get(node, EMPTY)

    def r(self, node: ExpandedNode) -> frozenset[int]:
        return self.receive.get(node, EMPTY)

    @classmethod
    def build(cls, g: RouteExpandedGraph, num_colors: int,
              transmit: Mapping[ExpandedNode, Iterable[int]] | None = None,
              coding: Mapping[ExpandedNode, Iterable[int]] | None = None,
              receive: Mapping[ExpandedNode, Iterable[int]] | None = None,
              ) -> "ColorAssignment":
        def fill(src):
            src = src or {}
            return {n: frozenset(src.get(n, ())) for n in g.nodes}
        return cls(num_colors, fill(transmit), fill(coding), fill(receive))


@dataclass(frozen=True)
class Violation:
    condition: str
    node: ExpandedNode
    detail: str


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    violations: tuple[Violation, ...]
    is_independent_layer: bool

    def conditions_failed(self) -> frozenset[str]:
        return frozenset(v.condition for v in self.violations)


@dataclass(frozen=True)
class InterfererSet:
    target: ExpandedNode
    interferers: frozenset[ExpandedNode]
    effective_receive: frozenset[int]


def effective_receive_set(g: RouteExpandedGraph, a: ColorAssignment,
                          node: ExpandedNode) -> frozenset[int]:
    """Instants in node's receive set during which same-pair content
    (a transmission or a coded copy) actually arrives."""
    arriving: set[int] = set()
    for v in pair_neighbors(g, node):
        arriving |= a.t(v) | a.c(v)
    return a.r(node) & arriving


def _neutralizer(g: RouteExpandedGraph, a: ColorAssignment,
                 w: ExpandedNode, pair: int) -> frozenset[int] | None:
    """Coded instants cancelling w's transmission for `pair` inside w's
    own super-node, or None if nobody there codes over it."""
    sibling = ExpandedNode(w.base, pair)
    members = g.supernodes[w.base].members if w.base in g.supernodes else ()
    if sibling not in members:
        return None
    hit = a.t(w) & a.c(sibling)
    return hit if hit else None


def interferers(g: RouteExpandedGraph, a: ColorAssignment,
                node: ExpandedNode) -> InterfererSet:
    """Foreign in-neighbour duplicates that are neither neutralized within
    their super-node nor silent during node's effective receive instants."""
    eff = effective_receive_set(g, a, node)
    found = set()
    for w in g.in_neighbors(node):
        if w.pair == node.pair:
            continue
        if _neutralizer(g, a, w, node.pair):
            continue
        if a.t(w) & eff:
            found.add(w)
    return InterfererSet(node, frozenset(found), eff)


def _structural_check(g: RouteExpandedGraph, a: ColorAssignment) -> None:
    if a.num_colors < 1:
        raise MalformedAssignment(f"need at least one color, got {a.num_colors}")
    for n in g.nodes:
        if n not in a.transmit or n not in a.coding or n not in a.receive:
            raise MalformedAssignment(f"no entry for expanded node {g.label(n)}")
        for s in (a.transmit[n], a.coding[n], a.receive[n]):
            bad = [c for c in s if not 0 <= c < a.num_colors]
            if bad:
                raise MalformedAssignment(
                    f"color {bad[0]} out of range at {g.label(n)} (T={a.num_colors})")


def node_receive_violations(g: RouteExpandedGraph, a: ColorAssignment,
                            node: ExpandedNode) -> list[Violation]:
    """C4, C5 and C6 at one receiving node.

    Receive-side conditions depend only on this node's receive set and its
    in-neighbours' transmit/coding sets, so they can be evaluated node by
    node; the search exploits this.
    """
    out: list[Violation] = []
    r_set = a.r(node)
    own = pair_neighbors(g, node)

    for v in sorted(own):
        if not a.c(v) <= r_set:
            out.append(Violation(
                "C4", node,
                f"coding set of {g.label(v)} not contained in receive set"))
        got = len(a.t(v) & r_set)
        if got != 1:
            out.append(Violation(
                "C5", node,
                f"receives {got} instants of {g.label(v)}'s transmit set, need 1"))

    zone = effective_receive_set(g, a, node)
    quiet = r_set - zone
    for w in sorted(g.in_neighbors(node)):
        if w.pair == node.pair:
            continue
        coded = _neutralizer(g, a, w, node.pair)
        heard = a.t(w) & r_set
        if coded is not None:
            if heard != (coded & r_set) or len(coded) != 1:
                out.append(Violation(
                    "C6", node,
                    f"neutralized {g.label(w)} heard at {sorted(heard)} "
                    f"beyond its coded instant {sorted(coded)}"))
        elif a.t(w) & zone:
            in_zone = a.t(w) & zone
            in_quiet = a.t(w) & quiet
            if len(in_zone) != 1 or len(in_quiet) != 1:
                out.append(Violation(
                    "C6", node,
                    f"interferer {g.label(w)} heard {len(in_zone)}x during "
                    f"desired instants and {len(in_quiet)}x during quiet "
                    f"instants, need exactly 1 and 1"))
        else:
            if len(heard) % 2 != 0:
                out.append(Violation(
                    "C6", node,
                    f"{g.label(w)} lands {len(heard)}x in the receive set "
                    f"with no cancellation partner"))
    return out


def node_transmit_violations(g: RouteExpandedGraph, a: ColorAssignment,
                             base: int) -> list[Violation]:
    """C1, C2 and C3 within one super-node."""
    out: list[Violation] = []
    members = g.supernodes[base].members
    for idx, u in enumerate(members):
        for v in members[idx + 1:]:
            if a.t(u) & a.t(v):
                out.append(Violation(
                    "C1", u,
                    f"transmit sets of {g.label(u)} and {g.label(v)} overlap "
                    f"on {sorted(a.t(u) & a.t(v))}"))
    for u in members:
        cset = a.c(u)
        if not cset:
            continue
        if len(a.t(u)) != 1:
            out.append(Violation(
                "C2", u,
                f"coding node transmits {len(a.t(u))} times, need exactly 1"))
        if cset & a.t(u):
            out.append(Violation(
                "C3", u, "coding colors drawn from the node's own transmit set"))
        for v in members:
            if v == u:
                continue
            shared = cset & a.t(v)
            if shared and a.c(v):
                out.append(Violation(
                    "C3", u,
                    f"coding color {sorted(shared)} comes from coding node "
                    f"{g.label(v)}"))
            if len(shared) > 1:
                out.append(Violation(
                    "C3", u,
                    f"{len(shared)} coding colors from one donor {g.label(v)}"))
    return out


def check_coloring(g: RouteExpandedGraph, a: ColorAssignment) -> ValidityReport:
    """Validate a color assignment against C1-C6."""
    _structural_check(g, a)
    violations: list[Violation] = []
    for base in sorted(g.supernodes):
        violations.extend(node_transmit_violations(g, a, base))
    for node in g.receiving_nodes():
        violations.extend(node_receive_violations(g, a, node))

    last = g.net.num_layers - 1
    is_il = all(not a.c(n) for n in g.nodes) and all(
        len(a.t(n)) == 1 for n in g.nodes if g.layer_of[n] != last)
    return ValidityReport(not violations, tuple(violations), is_il)


def achievable_alpha(g: RouteExpandedGraph, a: ColorAssignment) -> Fraction:
    """Normalized sum-rate 1/T guaranteed by a valid coloring."""
    report = check_coloring(g, a)
    if not report.valid:
        first = report.violations[0]
        raise InvalidColoring(
            f"{len(report.violations)} violation(s), first: "
            f"[{first.condition}] at {g.label(first.node)}: {first.detail}")
    return Fraction(1, a.num_colors)


def tdma_coloring(g: RouteExpandedGraph) -> ColorAssignment:
    """One color per pair, everywhere: always valid when all pairs route."""
    k = g.net.num_pairs
    last = g.net.num_layers - 1
    transmit = {}
    receive = {}
    for n in g.nodes:
        color = n.pair - 1
        if g.layer_of[n] != last:
            transmit[n] = {color}
        if g.layer_of[n] != 0:
            receive[n] = {color}
    return ColorAssignment.build(g, k, transmit, None, receive)
