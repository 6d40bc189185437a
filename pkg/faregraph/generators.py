"""
Seeded instance generators for the randomized checks and the generate command
Every generator takes a random.Random so a seed reproduces the instance.
"""

import itertools
import random

import networkx as nx

from faregraph.errors import ConfigurationError
from faregraph.fares import (
    BasicZoneTariff,
    DistanceTariff,
    MetropolitanZoneTariff,
    NoDoubleCountingZoneTariff,
    OverlapZoneTariff,
    PriceFunction,
    TailRule,
)
from faregraph.instance import InstanceDocument, Query
from faregraph.ptn_core import Edge, Node, Ptn, ZoneStructure
from faregraph.routing import McsipInstance

PRICE_FAMILIES = ("monotone", "affine", "subadditive", "violating", "constant")
GENERATED_FARES = ("basic_zone", "metropolitan", "overlap_zone", "no_double_counting", "distance")


def rng_for(seed):
    return random.Random(seed)


def random_ptn(rng, n_nodes, extra_edges=2, max_length=3, coordinates=False):
    """
    Connected PTN: a random spanning tree plus extra edges

    Nodes are named v0..v{n-1}; lengths are integers in 1..max_length.
    """
    if n_nodes < 1:
        raise ConfigurationError("a PTN needs at least one node")
    ids = [f"v{i}" for i in range(n_nodes)]
    pairs = set()
    for i in range(1, n_nodes):
        pairs.add((ids[rng.randrange(i)], ids[i]))
    missing = [(a, b) for a, b in itertools.combinations(ids, 2) if (a, b) not in pairs and (b, a) not in pairs]
    rng.shuffle(missing)
    pairs.update(missing[:extra_edges])

    nodes = [
        Node(v, coords=(rng.randint(0, 10), rng.randint(0, 10)) if coordinates else None)
        for v in ids
    ]
    edges = [Edge(a, b, rng.randint(1, max_length)) for a, b in sorted(pairs)]
    return Ptn(nodes, edges)


def chain_ptn(n_nodes, length=1, prefix="x"):
    """Path x1 - x2 - ... - xn"""
    ids = [f"{prefix}{i}" for i in range(1, n_nodes + 1)]
    return Ptn([Node(v) for v in ids], [Edge(a, b, length) for a, b in zip(ids, ids[1:])])


def chain_zones(ptn):
    """One zone per node of a chain, in node order"""
    return ZoneStructure({v: {f"Z{i}"} for i, v in enumerate(_chain_order(ptn), start=1)})


def _chain_order(ptn):
    ends = [v for v in ptn.node_ids if len(ptn.neighbors(v)) <= 1]
    return list(nx.dfs_preorder_nodes(ptn.graph, ends[0]))


def random_partition(rng, ptn, n_zones):
    """Every node gets one of Z1..Z{n_zones}"""
    labels = [f"Z{i}" for i in range(1, n_zones + 1)]
    return ZoneStructure({v: {rng.choice(labels)} for v in ptn.node_ids})


def random_cover(rng, ptn, n_zones, overlap=0.3):
    """A partition where each node joins a second zone with probability overlap"""
    labels = [f"Z{i}" for i in range(1, n_zones + 1)]
    assignment = {}
    for v in ptn.node_ids:
        zones = {rng.choice(labels)}
        if n_zones > 1 and rng.random() < overlap:
            zones.add(rng.choice([z for z in labels if z not in zones]))
        assignment[v] = zones
    return ZoneStructure(assignment)


def connected_partition(rng, ptn, n_zones):
    """
    Partition into connected zones grown from random seeds

    Zones are grown one node at a time from a random frontier, so every zone
    induces a connected subgraph.
    """
    ids = list(ptn.node_ids)
    n_zones = min(n_zones, len(ids))
    seeds = rng.sample(ids, n_zones)
    owner = {v: f"Z{i}" for i, v in enumerate(seeds, start=1)}
    while len(owner) < len(ids):
        frontier = sorted(
            (u, v) for v in owner for u in ptn.neighbors(v) if u not in owner
        )
        u, v = rng.choice(frontier)
        owner[u] = owner[v]
    return ZoneStructure({v: {z} for v, z in owner.items()})


def one_disconnected_instance(rng, n_nodes, n_zones, extra_edges=2, attempts=50):
    """
    PTN with a partition in which exactly one zone is disconnected

    Two non-adjacent connected regions are merged into one zone.

    Returns:
        (Ptn, ZoneStructure, disconnected zone)
    """
    for _ in range(attempts):
        ptn = random_ptn(rng, n_nodes, extra_edges)
        regions = connected_partition(rng, ptn, n_zones + 1)
        labels = sorted(regions.zones)
        pairs = [
            (a, b) for a, b in itertools.combinations(labels, 2)
            if not _adjacent(ptn, regions, a, b)
        ]
        if not pairs:
            continue
        keep, merged = rng.choice(pairs)
        assignment = {
            v: {keep if regions.zone_of(v) == merged else regions.zone_of(v)}
            for v in ptn.node_ids
        }
        return ptn, ZoneStructure(assignment), keep
    raise ConfigurationError("could not build an instance with one disconnected zone")


def _adjacent(ptn, zones, a, b):
    return any(
        {zones.zone_of(e.u), zones.zone_of(e.v)} == {a, b}
        for e in ptn.edges
    )


def random_metropolitan(rng, zones, size=None):
    """Same zones with a random nonempty metropolitan area"""
    labels = sorted(zones.zones)
    size = size or rng.randint(1, len(labels))
    picked = rng.sample(labels, min(size, len(labels)))
    return ZoneStructure(
        {v: zones.zones_of(v) for v in zones.assignment},
        metropolitan=picked,
        empty_zones=zones.empty_zones,
    )


def random_price_function(rng, family, length=4, top=6):
    """
    Zone price function from one family

    monotone: nondecreasing table, constant tail
    affine: base + k * per_zone, affine tail
    subadditive: increasing with nonincreasing steps, constant tail
    violating: arbitrary table, usually neither monotone nor subadditive
    constant: one price for every zone count
    """
    if family == "monotone":
        table = sorted(rng.randint(1, top) for _ in range(length))
        return PriceFunction(tuple(table))
    if family == "affine":
        return PriceFunction.affine(rng.randint(0, 3), rng.randint(1, 3), length)
    if family == "subadditive":
        steps = sorted((rng.randint(0, 3) for _ in range(length - 1)), reverse=True)
        table = [rng.randint(max(steps[0], 1) if steps else 1, top)]
        for step in steps:
            table.append(table[-1] + step)
        return PriceFunction(tuple(table))
    if family == "violating":
        return PriceFunction(tuple(rng.randint(1, 3 * top) for _ in range(length)))
    if family == "constant":
        return PriceFunction.constant(rng.randint(1, top))
    raise ConfigurationError(f"unknown price family {family!r}")


def random_affine_tail(rng, length=4, top=6):
    """Nondecreasing table continued by an affine tail"""
    table = sorted(rng.randint(1, top) for _ in range(length))
    return PriceFunction(tuple(table), TailRule.AFFINE, rng.randint(1, 3))


def random_document(rng, n_nodes, n_zones, fare="basic_zone", family="monotone", extra_edges=2, name=None):
    """
    Instance document with a random network, zones and fare

    The query asks for a route between two different random stations.

    Args:
        fare: One of GENERATED_FARES
        family: Price family of the zone tariffs, one of PRICE_FAMILIES
    """
    if n_nodes < 2:
        raise ConfigurationError("a generated instance needs two stations for its query")
    ptn = random_ptn(rng, n_nodes, extra_edges)
    zones = None
    if fare == "distance":
        fs = DistanceTariff(rng.randint(0, 2), rng.randint(1, 3))
    elif fare == "overlap_zone":
        zones = random_cover(rng, ptn, n_zones)
        fs = OverlapZoneTariff(random_price_function(rng, family))
    elif fare in ("basic_zone", "no_double_counting"):
        zones = random_partition(rng, ptn, n_zones)
        tariff = BasicZoneTariff if fare == "basic_zone" else NoDoubleCountingZoneTariff
        fs = tariff(random_price_function(rng, family))
    elif fare == "metropolitan":
        zones = random_metropolitan(rng, random_partition(rng, ptn, n_zones))
        fs = MetropolitanZoneTariff(random_price_function(rng, family), rng.randint(1, 6))
    else:
        raise ConfigurationError(f"cannot generate fare type {fare!r}")
    x, y = rng.sample(list(ptn.node_ids), 2)
    return InstanceDocument(
        name=name or f"random-{fare}",
        base_ptn=ptn,
        base_zones=zones,
        fare=fs,
        query=Query(source=x, target=y),
    )


def random_mcsip(rng, n_nodes, n_edges, n_colors, k=None):
    """Random connected colored graph with terminals v0 and v{n-1}"""
    ptn = random_ptn(rng, n_nodes, max(n_edges - (n_nodes - 1), 0))
    colors = [f"c{i}" for i in range(1, n_colors + 1)]
    edges = [(e.u, e.v, rng.choice(colors)) for e in ptn.edges]
    k = rng.randint(1, n_colors) if k is None else k
    return McsipInstance(ptn.node_ids, edges, "v0", f"v{n_nodes - 1}", k)


def connected_colored_graphs(max_nodes=4, max_colors=3, k=1):
    """
    Every connected colored graph on up to max_nodes labelled nodes

    Colorings are generated in first-use order, so renaming colors does not
    produce duplicates. Terminals are the first and the last node.
    """
    for n in range(2, max_nodes + 1):
        ids = [f"v{i}" for i in range(n)]
        all_pairs = list(itertools.combinations(ids, 2))
        for size in range(n - 1, len(all_pairs) + 1):
            for pairs in itertools.combinations(all_pairs, size):
                graph = nx.Graph(pairs)
                graph.add_nodes_from(ids)
                if not nx.is_connected(graph):
                    continue
                for coloring in _colorings(len(pairs), max_colors):
                    edges = [(u, v, f"c{c}") for (u, v), c in zip(pairs, coloring)]
                    yield McsipInstance(ids, edges, ids[0], ids[-1], k)


def _colorings(count, max_colors):
    """Restricted growth strings: each color is at most one more than the largest used so far"""
    def grow(prefix, used):
        if len(prefix) == count:
            yield tuple(prefix)
            return
        for c in range(1, min(used + 1, max_colors) + 1):
            yield from grow(prefix + [c], max(used, c))

    yield from grow([], 0)
