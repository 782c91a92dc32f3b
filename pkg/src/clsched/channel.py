"""Signal-level verification of schedules.

Two independent instruments:

* symbolic_verify treats every snapshot signal X^j at every node as a
  formal symbol and checks that each receiving duplicate's combined
  receive-window sum reduces to exactly its own-pair symbol on every
  in-edge: XOR cancellation in the deterministic model, +1/-1 coefficient
  cancellation in the Gaussian model (where the receiver may weight
  instants by +-1; plain summation is the special case with all +1).

* deterministic_simulate runs actual bit vectors through the shift-matrix
  channel for one schedule period and compares, bit for bit, against an
  oracle that runs each pair's induced subgraph in isolation.

Both are pure functions of (network, assignment, inputs).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .coloring import ColorAssignment
from .errors import (
    GainExceedsQ,
    NoiseBudgetExceeded,
    SimultaneousTransmit,
    StrategyArity,
    VerificationError,
    MissingDesired,
    ResidualInterference,
)
from .expansion import ExpandedNode, RouteExpandedGraph
from .network import DETERMINISTIC, LayeredNetwork

Bits = np.ndarray
Symbol = tuple[int, int]  # (base node, pair)

MODE_DETERMINISTIC = "deterministic"
MODE_GAUSSIAN = "gaussian"


# --- bit vectors and the shift channel ---------------------------------------

def zeros(q: int) -> Bits:
    return np.zeros(q, dtype=np.uint8)


def random_bits(rng: random.Random, q: int) -> Bits:
    return np.array([rng.randint(0, 1) for _ in range(q)], dtype=np.uint8)


def shift_apply(n: int, x: Bits, q: int) -> Bits:
    """Apply S^(q-n) to x: the top n bits land in the bottom n positions.

    n = q is the identity, n = 0 wipes the signal (absent link).
    """
    if not 0 <= n <= q:
        raise GainExceedsQ(f"gain {n} outside [0, {q}]")
    if len(x) != q:
        raise ValueError(f"signal has {len(x)} bits, expected {q}")
    out = zeros(q)
    if n:
        out[q - n:] = x[:n]
    return out


def shift_matrix(q: int) -> np.ndarray:
    """The q x q down-shift matrix S (ones on the subdiagonal)."""
    return np.eye(q, k=-1, dtype=np.uint8)


# --- symbolic signals ----------------------------------------------------------

@dataclass
class SymbolicSignal:
    """Formal linear combination of per-pair snapshot symbols X^pair_base."""

    terms: dict[Symbol, int] = field(default_factory=dict)
    noise_count: int = 0

    def add(self, sym: Symbol, coeff: int) -> None:
        new = self.terms.get(sym, 0) + coeff
        if new:
            self.terms[sym] = new
        else:
            self.terms.pop(sym, None)

    def scaled(self, factor: int) -> "SymbolicSignal":
        out = SymbolicSignal(noise_count=self.noise_count)
        for sym, coeff in self.terms.items():
            out.add(sym, coeff * factor)
        return out

    def reduced_mod2(self) -> "SymbolicSignal":
        out = SymbolicSignal(noise_count=self.noise_count)
        for sym, coeff in self.terms.items():
            if coeff % 2:
                out.terms[sym] = 1
        return out


def transmit_symbols(g: RouteExpandedGraph, a: ColorAssignment, base: int,
                     instant: int, mode: str) -> SymbolicSignal:
    """What base node puts on the air at one instant, as formal symbols.

    For each pair p scheduled at this instant the node sends its own X^p
    plus (deterministic) or minus (Gaussian) the symbols of every pair
    whose transmit set meets p's coding set.
    """
    sig = SymbolicSignal()
    members = g.supernodes[base].members if base in g.supernodes else ()
    sign = 1 if mode == MODE_DETERMINISTIC else -1
    for dup in members:
        if instant not in a.t(dup):
            continue
        sig.add((base, dup.pair), 1)
        for other in members:
            if other != dup and a.t(other) & a.c(dup):
                sig.add((base, other.pair), sign)
    return sig


def _edge_window_sums(g: RouteExpandedGraph, a: ColorAssignment,
                      node: ExpandedNode, mode: str,
                      eps: Mapping[int, int]) -> dict[int, SymbolicSignal]:
    """Per in-neighbour base: the weighted sum of its transmissions over
    node's receive window.  Shifts/gains factor out per edge, so
    cancellation is checked on the pre-shift sums."""
    sums: dict[int, SymbolicSignal] = {}
    for b in g.in_bases(node):
        total = SymbolicSignal()
        for t in sorted(a.r(node)):
            for sym, coeff in transmit_symbols(g, a, b, t, mode).terms.items():
                total.add(sym, coeff * eps.get(t, 1))
        if mode == MODE_DETERMINISTIC:
            total = total.reduced_mod2()
        sums[b] = total
    return sums


def _edge_ok(sums: Mapping[int, SymbolicSignal], node: ExpandedNode,
             g: RouteExpandedGraph) -> bool:
    for b, sig in sums.items():
        expected_desired = ExpandedNode(b, node.pair) in g.supernodes[b].members
        for (sb, p), coeff in sig.terms.items():
            if p == node.pair and expected_desired:
                if coeff != 1:
                    return False
            elif coeff != 0:
                return False
        if expected_desired and sig.terms.get((b, node.pair), 0) != 1:
            return False
    return True


def solve_combiner(g: RouteExpandedGraph, a: ColorAssignment,
                   node: ExpandedNode, mode: str) -> dict[int, int] | None:
    """Receive weights making node's reconstruction exact, or None.

    Deterministic mode works in F2 where weights are invisible; Gaussian
    mode searches +-1 weights per receive instant (the all-ones vector
    first, so plain summation is preferred when it suffices).
    """
    window = sorted(a.r(node))
    if mode == MODE_DETERMINISTIC:
        eps = {t: 1 for t in window}
        return eps if _edge_ok(_edge_window_sums(g, a, node, mode, eps), node, g) else None
    for signs in itertools.product((1, -1), repeat=len(window)):
        eps = dict(zip(window, signs))
        if _edge_ok(_edge_window_sums(g, a, node, mode, eps), node, g):
            return eps
    return None


@dataclass(frozen=True)
class SymbolicFailure:
    kind: str  # "missing_desired" | "residual_interference" | "noise_budget"
    node: ExpandedNode
    symbol: Symbol | None
    coefficient: int
    detail: str


@dataclass(frozen=True)
class SymbolicReport:
    mode: str
    ok: bool
    failures: tuple[SymbolicFailure, ...]
    noise_counts: Mapping[ExpandedNode, int]
    combiners: Mapping[ExpandedNode, Mapping[int, int]]

    def raise_first(self) -> None:
        if self.ok:
            return
        f = self.failures[0]
        exc = {
            "missing_desired": MissingDesired,
            "residual_interference": ResidualInterference,
            "noise_budget": NoiseBudgetExceeded,
        }.get(f.kind, VerificationError)
        raise exc(f.detail)


def symbolic_verify(net: LayeredNetwork, g: RouteExpandedGraph,
                    a: ColorAssignment, mode: str = MODE_DETERMINISTIC,
                    ) -> SymbolicReport:
    """Check that every receiving duplicate reconstructs exactly its
    own-pair snapshot on every in-edge."""
    if mode not in (MODE_DETERMINISTIC, MODE_GAUSSIAN):
        raise ValueError(f"unknown mode {mode!r}")
    failures: list[SymbolicFailure] = []
    noise: dict[ExpandedNode, int] = {}
    combiners: dict[ExpandedNode, dict[int, int]] = {}

    for node in g.receiving_nodes():
        window = sorted(a.r(node))
        if mode == MODE_GAUSSIAN:
            noise[node] = len(window)
            if len(window) > a.num_colors:
                failures.append(SymbolicFailure(
                    "noise_budget", node, None, len(window),
                    f"{g.label(node)} accumulates {len(window)} noise terms, "
                    f"budget {a.num_colors}"))
        eps = solve_combiner(g, a, node, mode)
        if eps is not None:
            combiners[node] = eps
            continue
        # No combiner exists; diagnose with plain summation weights.
        plain = {t: 1 for t in window}
        sums = _edge_window_sums(g, a, node, mode, plain)
        for b in sorted(sums):
            sig = sums[b]
            desired_expected = ExpandedNode(b, node.pair) in g.supernodes[b].members
            desired = sig.terms.get((b, node.pair), 0)
            if desired_expected and desired != 1:
                failures.append(SymbolicFailure(
                    "missing_desired", node, (b, node.pair), desired,
                    f"{g.label(node)} receives X^{node.pair} of "
                    f"{net.name(b)} with coefficient {desired}, need 1"))
            for (sb, p), coeff in sorted(sig.terms.items()):
                if p != node.pair and coeff != 0:
                    failures.append(SymbolicFailure(
                        "residual_interference", node, (sb, p), coeff,
                        f"symbol X^{p} of {net.name(sb)} survives at "
                        f"{g.label(node)} with coefficient {coeff}"))

    ok = not failures
    return SymbolicReport(mode, ok, tuple(failures), noise, combiners)


# --- bit-exact simulation -------------------------------------------------------

@dataclass(frozen=True)
class SimulationTrace:
    q: int
    num_instants: int
    transmitted: tuple[Mapping[int, Bits], ...]  # per instant, per base node
    received: tuple[Mapping[int, Bits], ...]
    reconstructed: Mapping[ExpandedNode, Bits]


@dataclass(frozen=True)
class EqualityReport:
    equal: bool
    per_node: Mapping[ExpandedNode, bool]

    def mismatches(self) -> tuple[ExpandedNode, ...]:
        return tuple(n for n, ok in sorted(self.per_node.items()) if not ok)


def _det_gain(net: LayeredNetwork, edge: tuple[int, int], q: int) -> int:
    gain = net.gain(edge)
    if gain.kind != DETERMINISTIC:
        raise GainExceedsQ(
            f"edge {edge} carries a Gaussian gain; simulation needs "
            f"deterministic gains")
    if gain.n > q:
        raise GainExceedsQ(f"gain {gain.n} on edge {edge} exceeds q={q}")
    return gain.n


def _transmit_bits(g: RouteExpandedGraph, a: ColorAssignment, base: int,
                   instant: int, q: int,
                   signal_of: Callable[[ExpandedNode], Bits]) -> Bits:
    """Base node's physical transmission at one instant, with the guard
    that only one pair may be scheduled there."""
    members = g.supernodes[base].members if base in g.supernodes else ()
    active = [dup for dup in members if instant in a.t(dup)]
    if len(active) > 1:
        raise SimultaneousTransmit(
            f"node {g.net.name(base)} transmits for pairs "
            f"{sorted(d.pair for d in active)} at instant {instant}")
    if not active:
        return zeros(q)
    dup = active[0]
    out = signal_of(dup).copy()
    for other in members:
        if other != dup and a.t(other) & a.c(dup):
            out ^= signal_of(other)
    return out


def _run_period(net: LayeredNetwork, g: RouteExpandedGraph, a: ColorAssignment,
                q: int, signal_of: Callable[[ExpandedNode], Bits],
                ) -> tuple[list[dict[int, Bits]], list[dict[int, Bits]]]:
    transmitted = []
    received = []
    for t in range(a.num_colors):
        x = {base: _transmit_bits(g, a, base, t, q, signal_of)
             for base in g.supernodes}
        y = {}
        for node in net.nodes:
            acc = zeros(q)
            for src in net.in_adj[node]:
                if src in x:
                    acc ^= shift_apply(_det_gain(net, (src, node), q), x[src], q)
            y[node] = acc
        transmitted.append(x)
        received.append(y)
    return transmitted, received


def _isolated_receive(net: LayeredNetwork, pair: int, q: int,
                      signal_of: Callable[[ExpandedNode], Bits],
                      ) -> dict[int, Bits]:
    """One snapshot of pair's induced subgraph run on its own (the oracle)."""
    sub = net.induced_subgraph(pair, pair)
    y = {}
    for node in sorted(sub.vertices):
        acc = zeros(q)
        for src in net.in_adj[node]:
            if (src, node) in sub.edges:
                acc ^= shift_apply(_det_gain(net, (src, node), q),
                                   signal_of(ExpandedNode(src, pair)), q)
        y[node] = acc
    return y


def deterministic_simulate(net: LayeredNetwork, g: RouteExpandedGraph,
                           a: ColorAssignment, q: int,
                           snapshot: Mapping[Symbol, Bits],
                           ) -> tuple[SimulationTrace, EqualityReport]:
    """Run one schedule period on bit vectors and compare each duplicate's
    reconstruction against the isolated-subgraph oracle."""
    if q < 1:
        raise GainExceedsQ(f"need q >= 1, got {q}")
    last = net.num_layers - 1

    def signal_of(dup: ExpandedNode) -> Bits:
        if g.layer_of[dup] == last:
            return zeros(q)
        sig = snapshot[(dup.base, dup.pair)]
        if len(sig) != q:
            raise ValueError(f"snapshot for {g.label(dup)} has wrong width")
        return np.asarray(sig, dtype=np.uint8)

    transmitted, received = _run_period(net, g, a, q, signal_of)

    reconstructed = {}
    per_node_equal = {}
    oracle = {pair: _isolated_receive(net, pair, q, signal_of)
              for pair in sorted(g.net.routable_pairs())}
    for node in g.receiving_nodes():
        acc = zeros(q)
        for t in sorted(a.r(node)):
            acc = acc ^ received[t][node.base]
        reconstructed[node] = acc
        want = oracle[node.pair][node.base]
        per_node_equal[node] = bool(np.array_equal(acc, want))

    trace = SimulationTrace(
        q=q, num_instants=a.num_colors,
        transmitted=tuple(transmitted), received=tuple(received),
        reconstructed=reconstructed)
    report = EqualityReport(all(per_node_equal.values()), per_node_equal)
    return trace, report


@dataclass(frozen=True)
class TrialsReport:
    trials: int
    seed: int
    failures: int
    first_failure: tuple[int, tuple[ExpandedNode, ...]] | None

    @property
    def all_equal(self) -> bool:
        return self.failures == 0


def random_trials(net: LayeredNetwork, g: RouteExpandedGraph,
                  a: ColorAssignment, q: int, trials: int, seed: int,
                  randomize_gains: bool = True) -> TrialsReport:
    """Seeded random (gains, snapshot) draws through deterministic_simulate."""
    from .network import ChannelGain

    rng = random.Random(seed)
    last = net.num_layers - 1
    failures = 0
    first = None
    for trial in range(trials):
        trial_net = net
        if randomize_gains:
            gains = {e: ChannelGain.deterministic(rng.randint(0, q))
                     for e in sorted(net.edges)}
            trial_net = net.with_gains(gains)
        snapshot = {
            (n.base, n.pair): random_bits(rng, q)
            for n in g.nodes if g.layer_of[n] != last
        }
        _, report = deterministic_simulate(trial_net, g, a, q, snapshot)
        if not report.equal:
            failures += 1
            if first is None:
                first = (trial, report.mismatches())
    return TrialsReport(trials, seed, failures, first)


# --- multi-block simulation ------------------------------------------------------

RelayStrategy = Callable[[tuple[Bits, ...]], Bits]


def identity_forward(history: tuple[Bits, ...]) -> Bits:
    """Retransmit the previous block's reconstructed signal."""
    return history[-1]


@dataclass(frozen=True)
class BlockTrace:
    per_block_equal: tuple[bool, ...]
    reconstructed: tuple[Mapping[ExpandedNode, Bits], ...]

    @property
    def equal(self) -> bool:
        return all(self.per_block_equal)


def block_simulate(net: LayeredNetwork, g: RouteExpandedGraph,
                   a: ColorAssignment, q: int, num_blocks: int,
                   source_blocks: Sequence[Mapping[Symbol, Bits]],
                   relay_strategies: Mapping[Symbol, RelayStrategy],
                   ) -> BlockTrace:
    """Run N schedule blocks with relay functions applied between blocks.

    Each relay duplicate's strategy sees only its own prior-block
    reconstructions; block signals in the full network are compared
    against the per-pair isolated runs driven by the same strategies.
    """
    if len(source_blocks) != num_blocks:
        raise ValueError("need one source snapshot per block")
    last = net.num_layers - 1

    def relay_nodes():
        return [n for n in g.nodes if 0 < g.layer_of[n] < last]

    for n in relay_nodes():
        if (n.base, n.pair) not in relay_strategies:
            raise StrategyArity(f"no strategy for relay duplicate {g.label(n)}")

    def run(history_full: list[dict[ExpandedNode, Bits]],
            block: int, isolated_pair: int | None) -> dict[ExpandedNode, Bits]:
        def signal_of(dup: ExpandedNode) -> Bits:
            if g.layer_of[dup] == last:
                return zeros(q)
            if g.layer_of[dup] == 0:
                sig = source_blocks[block].get((dup.base, dup.pair))
                if sig is None:
                    raise StrategyArity(f"no source signal for {g.label(dup)}")
                return np.asarray(sig, dtype=np.uint8)
            history = tuple(h[dup] for h in history_full)
            out = relay_strategies[(dup.base, dup.pair)](history)
            out = np.asarray(out, dtype=np.uint8)
            if out.shape != (q,):
                raise StrategyArity(
                    f"strategy at {g.label(dup)} returned shape {out.shape}, "
                    f"expected ({q},)")
            return out

        if isolated_pair is None:
            _, received = _run_period(net, g, a, q, signal_of)
            return {
                node: np.bitwise_xor.reduce(
                    [received[t][node.base] for t in sorted(a.r(node))])
                if a.r(node) else zeros(q)
                for node in g.receiving_nodes()
            }
        iso = _isolated_receive(net, isolated_pair, q, signal_of)
        return {ExpandedNode(b, isolated_pair): y for b, y in iso.items()}

    # Full-network run: history of per-duplicate reconstructions.
    full_history: list[dict[ExpandedNode, Bits]] = []
    full_blocks = []
    for block in range(num_blocks):
        start_state = [dict(h) for h in full_history]
        recon = run(start_state, block, None)
        full_history.append(recon)
        full_blocks.append(recon)

    # Isolated oracle runs, one per pair, driven by the same strategies.
    iso_blocks: list[dict[ExpandedNode, Bits]] = [dict() for _ in range(num_blocks)]
    for pair in sorted(g.net.routable_pairs()):
        history: list[dict[ExpandedNode, Bits]] = []
        for block in range(num_blocks):
            recon = run([dict(h) for h in history], block, pair)
            history.append(recon)
            iso_blocks[block].update(
                {n: y for n, y in recon.items() if n in set(g.nodes)})

    per_block = []
    for block in range(num_blocks):
        ok = all(
            np.array_equal(full_blocks[block][n], iso_blocks[block][n])
            for n in g.receiving_nodes() if n in iso_blocks[block])
        per_block.append(ok)
    return BlockTrace(tuple(per_block), tuple(full_blocks))
