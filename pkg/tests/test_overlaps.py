import itertools

from hypothesis import given
from hypothesis import strategies as st

from faregraph.generators import random_cover, random_ptn, rng_for
from faregraph.overlaps import assigned_zone_count, build_overlaps_resolved, minimal_assignment, project
from faregraph.ptn_core import Walk

W = Walk.of


def test_overlaps_resolved_graph(load):
    document = load("overlap_zones")
    resolved = build_overlaps_resolved(document.ptn, document.zones)
    assert sorted(resolved.station_nodes()) == ["x1", "x2", "x3", "x4", "x5"]
    assert len(resolved.membership_nodes()) == 6
    assert resolved.graph.number_of_edges() == 15
    assert resolved.weight("x2", ("x2", "R")) == 1
    assert resolved.weight(("x1", "L"), ("x2", "L")) == 0
    assert resolved.weight(("x1", "L"), ("x2", "R")) == 1


def test_compact_graph_keeps_overlap_stations_only(load):
    document = load("overlap_zones")
    resolved = build_overlaps_resolved(document.ptn, document.zones, compact=True)
    assert resolved.station_nodes() == ["x2"]
    assert resolved.graph.number_of_edges() == 11
    assert resolved.terminal("x1", document.zones) == ("x1", "L")
    assert resolved.terminal("x2", document.zones) == "x2"


def test_project():
    path = ["x1", ("x1", "L"), ("x2", "L"), ("x5", "R"), "x5"]
    walk, assignment = project(path)
    assert walk == W("x1", "x2", "x5")
    assert assignment == ("L", "L", "R")
    assert assigned_zone_count(walk, assignment) == 2


def test_revisit_gets_its_own_zone(load):
    document = load("overlap_zones")
    w = W("x1", "x2", "x3", "x4", "x2", "x5")
    assignment, count = minimal_assignment(document.ptn, document.zones, w)
    assert assignment == ("L", "L", "L", "R", "R", "R")
    assert count == 2


def test_overlap_station_joins_its_neighbors(load):
    document = load("overlap_zones")
    assert minimal_assignment(document.ptn, document.zones, W("x4", "x2", "x5")) == (("R", "R", "R"), 1)
    assert minimal_assignment(document.ptn, document.zones, W("x2")) == (("L",), 1)


def _walk(rng, ptn, steps):
    nodes = [rng.choice(ptn.node_ids)]
    for _ in range(steps):
        nodes.append(rng.choice(ptn.neighbors(nodes[-1])))
    return Walk(tuple(nodes))


@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=5))
def test_minimal_assignment_matches_exhaustive(seed, steps):
    rng = rng_for(seed)
    ptn = random_ptn(rng, 5)
    zones = random_cover(rng, ptn, 3, overlap=0.5)
    w = _walk(rng, ptn, steps)
    best = min(
        assigned_zone_count(w, choice)
        for choice in itertools.product(*(sorted(zones.zones_of(v)) for v in w))
    )
    assignment, count = minimal_assignment(ptn, zones, w)
    assert count == best
    assert assigned_zone_count(w, assignment) == count
    assert all(z in zones.zones_of(v) for v, z in zip(w, assignment))
