import pytest
from hypothesis import given, settings, strategies as st

from clsched import build_network, expand, gen_folded_single, gen_folded_two_layer, gen_random
from clsched.errors import (
    CrossLayerEdge,
    DanglingGain,
    DuplicateEdge,
    LayerMismatch,
    MixedGainKinds,
)
from clsched.network import ChannelGain

import oracles
from conftest import make_net


def test_two_layer_three_pair_network_accepted(three_pair_parallel):
    net = three_pair_parallel
    assert net.num_layers == 3
    assert net.num_pairs == 3
    # each relay carries exactly two pairs
    for relay in net.layers[1]:
        assert len(net.pair_index_set(relay)) == 2


def test_single_pair_network():
    net = build_network([[0], [1]], [(0, 1)])
    assert net.num_pairs == 1
    assert net.routes(1, 1) == frozenset({(0, 1)})


def test_cross_layer_edge_rejected():
    with pytest.raises(CrossLayerEdge):
        build_network([[0], [1], [2]], [(0, 2)])
    with pytest.raises(CrossLayerEdge):
        build_network([[0], [1], [2]], [(1, 0)])


def test_layer_mismatch_rejected():
    with pytest.raises(LayerMismatch):
        build_network([[0, 1], [2]], [(0, 2)])
    with pytest.raises(LayerMismatch):
        build_network([], [])


def test_dangling_gain_rejected():
    with pytest.raises(DanglingGain):
        build_network([[0], [1]], [(0, 1)],
                      gains={(1, 0): ChannelGain.deterministic(1)})


def test_duplicate_edge_rejected():
    with pytest.raises(DuplicateEdge):
        build_network([[0], [1]], [(0, 1), (0, 1)])


def test_mixed_gain_kinds_rejected():
    with pytest.raises(MixedGainKinds):
        build_network([[0, 1], [2, 3]], [(0, 2), (1, 3)],
                      gains={(0, 2): ChannelGain.deterministic(1),
                             (1, 3): ChannelGain.gaussian("a")})


# --- routes ----------------------------------------------------------------------

def test_routes_single_layer_folded_chain():
    net = gen_folded_single(3, 2)
    assert net.routes(1, 1) == frozenset({(net.source_of(1), net.dest_of(1))})


def test_routes_empty_when_disconnected():
    net = make_net([["S1", "S2"], ["D1", "D2"]], [("S1", "D1"), ("S2", "D2")])
    assert net.routes(1, 2) == frozenset()


def test_routes_two_layer_folded_chain_against_path_enumeration():
    net = gen_folded_two_layer(3, 2)
    got = net.routes(1, 1)
    assert len(got) == 2  # one per relay on the pair's disjoint paths
    assert got == frozenset(oracles.all_paths(net, 1, 1))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_routes_match_networkx_on_random_networks(seed):
    net = gen_random([2, 3, 2], p=0.7, seed=seed)
    for i in (1, 2):
        for j in (1, 2):
            assert net.routes(i, j) == frozenset(oracles.all_paths(net, i, j))


# --- induced subgraphs ---------------------------------------------------------------

def test_induced_subgraph_single_layer():
    net = gen_folded_single(3, 2)
    sub = net.induced_subgraph(2, 2)
    assert sub.vertices == {net.source_of(2), net.dest_of(2)}
    assert sub.edges == {(net.source_of(2), net.dest_of(2))}


def test_induced_subgraph_empty_without_route():
    net = make_net([["S1", "S2"], ["D1", "D2"]], [("S1", "D1"), ("S2", "D2")])
    assert not net.induced_subgraph(1, 2)


def test_induced_subgraph_two_layer_folded():
    net = gen_folded_two_layer(3, 2)
    sub = net.induced_subgraph(1, 1)
    assert len(sub.vertices) == 4   # source, two relays, destination
    assert len(sub.edges) == 4
    assert sub.vertices == oracles.route_union_vertices(net, 1, 1)


def test_induced_subgraph_minimality():
    # every vertex of G_ij lies on at least one route
    net = gen_folded_two_layer(4, 2)
    for i in range(1, 5):
        sub = net.induced_subgraph(i, i)
        on_routes = oracles.route_union_vertices(net, i, i)
        assert sub.vertices == on_routes


# --- index sets -----------------------------------------------------------------------

def test_pair_index_set_two_layer(three_pair_parallel):
    net = three_pair_parallel
    relay_a, relay_b = net.layers[1]
    assert net.pair_index_set(relay_a) == {1, 2}
    assert net.pair_index_set(relay_b) == {2, 3}


def test_pair_index_set_source_contains_own_pair():
    net = gen_folded_single(4, 2)
    for j in range(1, 5):
        assert j in net.pair_index_set(net.source_of(j))


def test_pair_index_set_two_layer_folded_relay():
    net = gen_folded_two_layer(3, 2)
    relay1 = net.layers[1][0]
    assert net.pair_index_set(relay1) == {1, 3}
    assert net.pair_index_set(relay1) == oracles.pair_index_set_by_paths(net, relay1)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_route_consistency_on_random_networks(seed):
    # node in G_jj <=> j in its index set, against brute-force enumeration
    net = gen_random([3, 2, 3], p=0.6, seed=seed)
    for node in net.nodes:
        assert net.pair_index_set(node) == oracles.pair_index_set_by_paths(net, node)


# --- degrees, adjacency, interference ----------------------------------------------------

def test_degrees_k22k_full():
    from clsched import K22KPattern, gen_k22k
    net = gen_k22k(4, 1, K22KPattern.full(4, 1))
    assert net.degrees().d_max == 4


def test_degrees_chain():
    net = build_network([[0], [1]], [(0, 1)])
    assert net.degrees().d_max == 1


def test_degrees_two_relay_network(three_pair_parallel):
    assert three_pair_parallel.degrees().d_max == 2


def test_route_adjacency(three_pair_parallel):
    adj = three_pair_parallel.route_adjacency_graph()
    assert adj.edges == {(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3)}


def test_route_adjacency_isolated_pairs():
    net = make_net([["S1", "S2"], ["D1", "D2"]], [("S1", "D1")])
    adj = net.route_adjacency_graph()
    assert adj.edges == {(1, 1)}


def test_route_adjacency_folded_single():
    k, m = 5, 3
    net = gen_folded_single(k, m)
    adj = net.route_adjacency_graph()
    for i in range(1, k + 1):
        assert sum(1 for j in range(1, k + 1) if adj.connected(i, j)) == m


def test_non_interfering(three_pair_parallel):
    net = three_pair_parallel
    assert net.non_interfering(1, 3)
    assert not net.non_interfering(1, 2)
    assert not net.non_interfering(1, 1)


def test_non_interfering_two_layer_folded():
    net = gen_folded_two_layer(3, 2)
    assert not net.non_interfering(1, 2)  # they share a relay


def test_layering_invariant_after_generators():
    for net in (gen_folded_single(4, 2), gen_folded_two_layer(3, 3),
                gen_random([2, 2, 2], 0.8, seed=1)):
        for u, v in net.edges:
            assert net.layer_of[v] == net.layer_of[u] + 1
