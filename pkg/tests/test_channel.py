import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clsched import (
    ColorAssignment,
    ExpandedNode,
    block_simulate,
    check_coloring,
    construct_folded_single_coloring,
    construct_folded_two_layer_coloring,
    deterministic_simulate,
    expand,
    gen_folded_single,
    gen_folded_two_layer,
    gen_random,
    random_trials,
    shift_apply,
    symbolic_verify,
    tdma_coloring,
)
from clsched.channel import (
    MODE_GAUSSIAN,
    identity_forward,
    shift_matrix,
    zeros,
)
from clsched.errors import GainExceedsQ, SimultaneousTransmit, StrategyArity


# --- shift channel ---------------------------------------------------------------

def test_shift_identity_and_zero():
    x = np.array([1, 0, 1], dtype=np.uint8)
    assert np.array_equal(shift_apply(3, x, 3), x)
    assert np.array_equal(shift_apply(0, x, 3), zeros(3))


def test_shift_partial():
    # q=3, n=2: top two bits land in the bottom two positions
    x = np.array([1, 0, 1], dtype=np.uint8)
    assert np.array_equal(shift_apply(2, x, 3), np.array([0, 1, 0], dtype=np.uint8))


def test_shift_gain_out_of_range():
    with pytest.raises(GainExceedsQ):
        shift_apply(4, zeros(3), 3)
    with pytest.raises(GainExceedsQ):
        shift_apply(-1, zeros(3), 3)


@settings(max_examples=60, deadline=None)
@given(q=st.integers(1, 8), n=st.integers(0, 8), data=st.data())
def test_shift_matches_dense_matrix_oracle(q, n, data):
    n = min(n, q)
    bits = data.draw(st.lists(st.integers(0, 1), min_size=q, max_size=q))
    x = np.array(bits, dtype=np.uint8)
    dense = np.linalg.matrix_power(shift_matrix(q), q - n) if n < q else np.eye(q, dtype=np.uint8)
    want = (dense @ x) % 2
    assert np.array_equal(shift_apply(n, x, q), want.astype(np.uint8))


# --- symbolic verification ----------------------------------------------------------

def test_symbolic_passes_for_tdma():
    net = gen_random([3, 2, 3], 0.7, seed=21)
    g = expand(net)
    a = tdma_coloring(g)
    assert symbolic_verify(net, g, a).ok
    rep = symbolic_verify(net, g, a, MODE_GAUSSIAN)
    assert rep.ok
    for node in g.receiving_nodes():
        assert rep.noise_counts[node] == len(a.r(node)) <= a.num_colors


def test_symbolic_two_layer_with_coding():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    assert symbolic_verify(net, g, a).ok
    assert symbolic_verify(net, g, a, MODE_GAUSSIAN).ok


def test_symbolic_detects_dropped_repetition():
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    s2 = ExpandedNode(net.source_of(2), 2)
    d3 = ExpandedNode(net.dest_of(3), 3)
    broken = ColorAssignment(
        a.num_colors, {**a.transmit, s2: frozenset({0})}, a.coding, a.receive)
    rep = symbolic_verify(net, g, broken)
    assert not rep.ok
    assert any(f.kind == "residual_interference" and f.node == d3
               and f.symbol == (s2.base, 2) and f.coefficient == 1
               for f in rep.failures)


def test_symbolic_detects_dropped_coding_set():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    coder = sorted(n for n in g.nodes if a.c(n))[0]
    broken = ColorAssignment(
        a.num_colors, a.transmit, {**a.coding, coder: frozenset()}, a.receive)
    rep = symbolic_verify(net, g, broken)
    assert not rep.ok
    assert any(f.kind == "residual_interference" for f in rep.failures)
    assert "C6" in check_coloring(g, broken).conditions_failed()


def test_symbolic_detects_shrunk_receive_set():
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    d3 = ExpandedNode(net.dest_of(3), 3)
    broken = ColorAssignment(
        a.num_colors, a.transmit, a.coding, {**a.receive, d3: frozenset({0})})
    rep = symbolic_verify(net, g, broken)
    assert not rep.ok
    assert any(f.kind == "missing_desired" and f.node == d3 for f in rep.failures)
    assert "C5" in check_coloring(g, broken).conditions_failed()


def test_symbolic_raise_first():
    from clsched.errors import ResidualInterference
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    s2 = ExpandedNode(net.source_of(2), 2)
    broken = ColorAssignment(
        a.num_colors, {**a.transmit, s2: frozenset({0})}, a.coding, a.receive)
    with pytest.raises(ResidualInterference):
        symbolic_verify(net, g, broken).raise_first()


# --- deterministic simulation ----------------------------------------------------------

def test_all_zero_snapshot():
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    snapshot = {(n.base, n.pair): zeros(4)
                for n in g.nodes if g.layer_of[n] == 0}
    trace, report = deterministic_simulate(net, g, a, 4, snapshot)
    assert report.equal
    assert all(not arr.any() for t in trace.received for arr in t.values())


def test_two_layer_folded_trials_bit_exact():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    report = random_trials(net, g, a, q=5, trials=100, seed=7)
    assert report.all_equal
    assert report.trials == 100


def test_destination_recovers_despite_interference():
    # the canonical two-slot sum at the overlapped destination
    import random
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    rng = random.Random(0)
    from clsched.channel import random_bits
    snapshot = {(n.base, n.pair): random_bits(rng, 4)
                for n in g.nodes if g.layer_of[n] == 0}
    trace, report = deterministic_simulate(net, g, a, 4, snapshot)
    assert report.equal
    d3 = ExpandedNode(net.dest_of(3), 3)
    want = shift_apply(1, snapshot[(net.source_of(3), 3)], 4)
    assert np.array_equal(trace.reconstructed[d3], want)


def test_simulation_linearity():
    import random
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    rng = random.Random(5)
    from clsched.channel import random_bits
    keys = [(n.base, n.pair) for n in g.nodes if g.layer_of[n] != net.num_layers - 1]
    s1 = {k: random_bits(rng, 5) for k in keys}
    s2 = {k: random_bits(rng, 5) for k in keys}
    sx = {k: s1[k] ^ s2[k] for k in keys}
    t1, _ = deterministic_simulate(net, g, a, 5, s1)
    t2, _ = deterministic_simulate(net, g, a, 5, s2)
    tx, _ = deterministic_simulate(net, g, a, 5, sx)
    for n in g.receiving_nodes():
        assert np.array_equal(tx.reconstructed[n],
                              t1.reconstructed[n] ^ t2.reconstructed[n])


def test_gain_exceeding_q_rejected():
    net = gen_folded_single(2, 1, gain=5)
    g = expand(net)
    a = tdma_coloring(g)
    snapshot = {(n.base, n.pair): zeros(3) for n in g.nodes if g.layer_of[n] == 0}
    with pytest.raises(GainExceedsQ):
        deterministic_simulate(net, g, a, 3, snapshot)


def test_simultaneous_transmit_guard():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    relay = next(b for b, sn in g.supernodes.items() if len(sn.members) == 2)
    m1, m2 = g.supernodes[relay].members
    clashing = ColorAssignment(
        a.num_colors, {**a.transmit, m1: a.t(m2)}, a.coding, a.receive)
    snapshot = {(n.base, n.pair): zeros(3)
                for n in g.nodes if g.layer_of[n] != net.num_layers - 1}
    with pytest.raises(SimultaneousTransmit):
        deterministic_simulate(net, g, clashing, 3, snapshot)


def test_symbolic_and_numeric_agree_on_mutants():
    # a coloring that fails symbolically must also fail some simulation
    import random
    net = gen_folded_single(3, 2)
    g = expand(net)
    a = construct_folded_single_coloring(3, 2)
    s2 = ExpandedNode(net.source_of(2), 2)
    broken = ColorAssignment(
        a.num_colors, {**a.transmit, s2: frozenset({0})}, a.coding, a.receive)
    assert not symbolic_verify(net, g, broken).ok
    report = random_trials(net, g, broken, q=4, trials=30, seed=2)
    assert report.failures > 0


# --- multi-block simulation --------------------------------------------------------------

def _relay_strategies(g, strategy):
    last = g.net.num_layers - 1
    return {
        (n.base, n.pair): strategy
        for n in g.nodes if 0 < g.layer_of[n] < last
    }


def test_block_simulate_identity_forward():
    import random
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    rng = random.Random(9)
    from clsched.channel import random_bits
    blocks = [
        {(n.base, n.pair): random_bits(rng, 4)
         for n in g.nodes if g.layer_of[n] == 0}
        for _ in range(3)
    ]

    def forward(history):
        return history[-1] if history else zeros(4)

    trace = block_simulate(net, g, a, 4, 3, blocks, _relay_strategies(g, forward))
    assert trace.equal


def test_block_simulate_single_block_matches_snapshot_run():
    import random
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    rng = random.Random(4)
    from clsched.channel import random_bits
    sources = {(n.base, n.pair): random_bits(rng, 4)
               for n in g.nodes if g.layer_of[n] == 0}

    def quiet(history):
        return history[-1] if history else zeros(4)

    trace = block_simulate(net, g, a, 4, 1, [sources], _relay_strategies(g, quiet))
    snapshot = {(n.base, n.pair): zeros(4)
                for n in g.nodes if g.layer_of[n] != net.num_layers - 1}
    snapshot.update(sources)
    _, report = deterministic_simulate(net, g, a, 4, snapshot)
    assert trace.equal == report.equal


def test_block_strategy_shape_guard():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    blocks = [{(n.base, n.pair): zeros(4)
               for n in g.nodes if g.layer_of[n] == 0}] * 2

    def bad(history):
        return zeros(3)  # wrong width

    with pytest.raises(StrategyArity):
        block_simulate(net, g, a, 4, 2, blocks, _relay_strategies(g, bad))


def test_block_missing_strategy_rejected():
    net = gen_folded_two_layer(3, 2)
    g = expand(net)
    a = construct_folded_two_layer_coloring(3, 2)
    with pytest.raises(StrategyArity):
        block_simulate(net, g, a, 4, 1,
                       [{(n.base, n.pair): zeros(4)
                         for n in g.nodes if g.layer_of[n] == 0}], {})
