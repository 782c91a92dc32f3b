"""Stable text formats: network descriptors, colorings, expansion dumps,
simulation traces.

Network descriptor (YAML, strict keys):

    layers:                 # node names, one list per layer
    - [S1, S2, S3]
    - [A, B]
    - [D1, D2, D3]
    pairs:                  # pair order; sources/destinations by name
      sources: [S1, S2, S3]
      destinations: [D1, D2, D3]
    edges:                  # [from, to, gain]; gain is an integer >= 0
    - [S1, A, 1]            # (deterministic) or the literal "h:<label>"
    - [A, D1, 1]
    family:                 # optional generator tag used by bound rules
      kind: folded_single
      params: {k: 3, m: 2}

Coloring file (one line per expanded node, sets as sorted color lists):

    T=2
    S1:1 T={0} C={} R={}
    D3:3 T={} C={} R={0,1}

Every reader rejects unknown keys and re-reads its writer's output
byte-identically.
"""

from __future__ import annotations

import re
from typing import Iterable

import yaml

from .coloring import ColorAssignment
from .errors import FormatError
from .expansion import RouteExpandedGraph
from .network import ChannelGain, DETERMINISTIC, FamilyTag, LayeredNetwork, build_network
from .channel import SimulationTrace


# --- network descriptors ------------------------------------------------------

def network_to_text(net: LayeredNetwork) -> str:
    doc: dict = {
        "layers": [[net.name(n) for n in layer] for layer in net.layers],
        "pairs": {
            "sources": [net.name(n) for n in net.sources],
            "destinations": [net.name(n) for n in net.destinations],
        },
        "edges": [
            [net.name(u), net.name(v),
             net.gains[(u, v)].n if net.gains[(u, v)].kind == DETERMINISTIC
             else f"h:{net.gains[(u, v)].label}"]
            for u, v in sorted(net.edges, key=lambda e: (net.layer_of[e[0]],
                                                         net.name(e[0]),
                                                         net.name(e[1])))
        ],
    }
    if net.family is not None:
        doc["family"] = {
            "kind": net.family.kind,
            "params": dict(net.family.params),
        }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def network_from_text(text: str) -> LayeredNetwork:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise FormatError(f"unparseable network descriptor: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("network descriptor must be a mapping")
    allowed = {"layers", "pairs", "edges", "family"}
    unknown = set(doc) - allowed
    if unknown:
        raise FormatError(f"unknown keys in network descriptor: {sorted(unknown)}")
    for key in ("layers", "pairs", "edges"):
        if key not in doc:
            raise FormatError(f"network descriptor missing key {key!r}")
    pairs = doc["pairs"]
    if not isinstance(pairs, dict) or set(pairs) != {"sources", "destinations"}:
        raise FormatError("pairs must map exactly sources and destinations")

    name_layers = [list(map(str, layer)) for layer in doc["layers"]]
    sources = [str(s) for s in pairs["sources"]]
    destinations = [str(d) for d in pairs["destinations"]]
    if sorted(sources) != sorted(name_layers[0]):
        raise FormatError("pairs.sources must name exactly the first layer")
    if sorted(destinations) != sorted(name_layers[-1]):
        raise FormatError("pairs.destinations must name exactly the last layer")
    name_layers[0] = sources
    name_layers[-1] = destinations

    ids: dict[str, int] = {}
    for layer in name_layers:
        for name in layer:
            if name in ids:
                raise FormatError(f"node name {name!r} appears twice")
            ids[name] = len(ids)

    edges = []
    gains = {}
    for item in doc["edges"]:
        if not (isinstance(item, list) and len(item) == 3):
            raise FormatError(f"edge entries are [from, to, gain], got {item!r}")
        u, v, gain = str(item[0]), str(item[1]), item[2]
        if u not in ids or v not in ids:
            raise FormatError(f"edge references unknown node in {item!r}")
        edge = (ids[u], ids[v])
        edges.append(edge)
        if isinstance(gain, int) and not isinstance(gain, bool):
            gains[edge] = ChannelGain.deterministic(gain)
        elif isinstance(gain, str) and gain.startswith("h:") and len(gain) > 2:
            gains[edge] = ChannelGain.gaussian(gain[2:])
        else:
            raise FormatError(
                f"gain must be a non-negative integer or 'h:<label>', got {gain!r}")

    family = None
    if "family" in doc:
        fam = doc["family"]
        if not isinstance(fam, dict) or set(fam) != {"kind", "params"}:
            raise FormatError("family must map exactly kind and params")
        params = fam["params"]
        if not isinstance(params, dict) or not all(
                isinstance(v, int) for v in params.values()):
            raise FormatError("family params must be integers")
        family = FamilyTag(str(fam["kind"]),
                           tuple(sorted((str(k), int(v)) for k, v in params.items())))

    names = {node_id: name for name, node_id in ids.items()}
    return build_network(
        [[ids[name] for name in layer] for layer in name_layers],
        edges, gains, names=names, family=family)


def write_network(net: LayeredNetwork, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(network_to_text(net))


def read_network(path: str) -> LayeredNetwork:
    with open(path) as fh:
        return network_from_text(fh.read())


# --- colorings -------------------------------------------------------------------

def _set_to_text(colors: Iterable[int]) -> str:
    return "{" + ",".join(str(c) for c in sorted(colors)) + "}"


_LINE_RE = re.compile(
    r"^(?P<name>\S+):(?P<pair>\d+)\s+"
    r"T=\{(?P<t>[\d,]*)\}\s+C=\{(?P<c>[\d,]*)\}\s+R=\{(?P<r>[\d,]*)\}$")


def coloring_to_text(g: RouteExpandedGraph, a: ColorAssignment) -> str:
    lines = [f"T={a.num_colors}"]
    for n in g.nodes:
        lines.append(
            f"{g.net.name(n.base)}:{n.pair} "
            f"T={_set_to_text(a.t(n))} "
            f"C={_set_to_text(a.c(n))} "
            f"R={_set_to_text(a.r(n))}")
    return "\n".join(lines) + "\n"


def coloring_from_text(text: str, g: RouteExpandedGraph) -> ColorAssignment:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("T="):
        raise FormatError("coloring file must start with a T=<n> header")
    try:
        num_colors = int(lines[0][2:])
    except ValueError as exc:
        raise FormatError(f"bad color count {lines[0]!r}") from exc

    by_name = {f"{g.net.name(n.base)}:{n.pair}": n for n in g.nodes}
    transmit, coding, receive = {}, {}, {}
    seen = set()
    for line in lines[1:]:
        match = _LINE_RE.match(line.strip())
        if not match:
            raise FormatError(f"unparseable coloring line: {line!r}")
        key = f"{match['name']}:{match['pair']}"
        node = by_name.get(key)
        if node is None:
            raise FormatError(f"coloring names unknown expanded node {key}")
        if node in seen:
            raise FormatError(f"duplicate coloring line for {key}")
        seen.add(node)

        def parse(compact: str) -> frozenset[int]:
            return frozenset(int(x) for x in compact.split(",") if x != "")

        transmit[node] = parse(match["t"])
        coding[node] = parse(match["c"])
        receive[node] = parse(match["r"])
    missing = [k for k, n in by_name.items() if n not in seen]
    if missing:
        raise FormatError(f"coloring misses expanded nodes: {sorted(missing)[:5]}")
    return ColorAssignment.build(g, num_colors, transmit, coding, receive)


def write_coloring(g: RouteExpandedGraph, a: ColorAssignment, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(coloring_to_text(g, a))


def read_coloring(path: str, g: RouteExpandedGraph) -> ColorAssignment:
    with open(path) as fh:
        return coloring_from_text(fh.read(), g)


# --- expansion dump ----------------------------------------------------------------

def expansion_to_text(g: RouteExpandedGraph) -> str:
    lines = ["# nodes base:pair@layer"]
    for n in g.nodes:
        lines.append(f"{g.net.name(n.base)}:{n.pair}@{g.layer_of[n] + 1}")
    lines.append("# edges")
    for u, v in sorted(g.edges, key=lambda e: (g.layer_of[e[0]], str(e))):
        lines.append(f"{g.net.name(u.base)}:{u.pair} {g.net.name(v.base)}:{v.pair}")
    return "\n".join(lines) + "\n"


# --- simulation traces ----------------------------------------------------------------

def _bits_to_hex(bits) -> str:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    width = (len(bits) + 3) // 4
    return format(value, f"0{width}x")


def trace_to_text(net: LayeredNetwork, trace: SimulationTrace) -> str:
    """Hex dump, one instant per stanza; bit 0 of a vector is the top bit
    of its hex word."""
    lines = [f"q={trace.q} T={trace.num_instants}"]
    for t in range(trace.num_instants):
        lines.append(f"instant {t}")
        for node in net.nodes:
            tx = trace.transmitted[t].get(node)
            rx = trace.received[t].get(node)
            tx_text = _bits_to_hex(tx) if tx is not None else "-"
            rx_text = _bits_to_hex(rx) if rx is not None else "-"
            lines.append(f"  {net.name(node)} tx={tx_text} rx={rx_text}")
    lines.append("reconstructed")
    for n in sorted(trace.reconstructed, key=lambda n: (net.layer_of[n.base], n)):
        lines.append(
            f"  {net.name(n.base)}:{n.pair} {_bits_to_hex(trace.reconstructed[n])}")
    return "\n".join(lines) + "\n"
