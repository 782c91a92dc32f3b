import pytest

from clsched import build_network, expand


def _net(layer_names, edge_names, **kw):
    ids = {}
    layers = []
    for layer in layer_names:
        row = []
        for name in layer:
            ids[name] = len(ids)
            row.append(ids[name])
        layers.append(row)
    edges = [(ids[u], ids[v]) for u, v in edge_names]
    names = {i: n for n, i in ids.items()}
    return build_network(layers, edges, names=names, **kw)


@pytest.fixture
def three_pair_parallel():
    """Pairs 1 and 3 non-interfering, pair 2 overlapping both: end-to-end
    scheduling in two slots is optimal here."""
    return _net(
        [["S1", "S2", "S3"], ["A", "B"], ["D1", "D2", "D3"]],
        [("S1", "A"), ("S2", "A"), ("S2", "B"), ("S3", "B"),
         ("A", "D1"), ("A", "D2"), ("B", "D2"), ("B", "D3")])


@pytest.fixture
def three_pair_layered():
    """All pairs mutually interfering end-to-end, but each layer's conflicts
    are 2-colorable: per-layer scheduling halves the period."""
    return _net(
        [["S1", "S2", "S3"], ["A", "B"], ["D1", "D2", "D3"]],
        [("S1", "A"), ("S2", "A"), ("S2", "B"), ("S3", "B"),
         ("A", "D1"), ("A", "D3"), ("B", "D2"), ("B", "D3")])


@pytest.fixture
def parallel_expansion(three_pair_parallel):
    return expand(three_pair_parallel)


@pytest.fixture
def layered_expansion(three_pair_layered):
    return expand(three_pair_layered)


def make_net(layer_names, edge_names, **kw):
    return _net(layer_names, edge_names, **kw)
