import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from faregraph.errors import ConfigurationError, InvalidReferenceError, InvalidWalkError
from faregraph.generators import chain_ptn
from faregraph.ptn_core import (
    Edge,
    Node,
    NodeKind,
    Ptn,
    Ticket,
    Walk,
    ZoneStructure,
    beeline_distance,
    concat,
    contract_walk,
    disconnected_zones,
    expand_empty_zones,
    find_decomposition,
    is_valid_ticket,
    lift_walk,
    station_count,
    subwalk,
    to_number,
    validate_walk,
    walk_length,
)

W = Walk.of


def walks_on(ptn, max_edges=6):
    """Strategy: a walk built by picking a neighbor index at every step"""
    return st.tuples(
        st.sampled_from(ptn.node_ids),
        st.lists(st.integers(min_value=0, max_value=10), max_size=max_edges),
    ).map(lambda args: _follow(ptn, *args))


def _follow(ptn, start, choices):
    nodes = [start]
    for c in choices:
        ns = ptn.neighbors(nodes[-1])
        nodes.append(ns[c % len(ns)])
    return Walk(tuple(nodes))


def test_validate_walk(load):
    ptn = load("example_network").ptn
    assert validate_walk(ptn, W("x1"))
    assert validate_walk(ptn, W("x1", "x2", "x3", "x7", "x6"))
    assert not validate_walk(ptn, W("x1", "x6"))


def test_validate_walk_unknown_node(load):
    ptn = load("example_network").ptn
    with pytest.raises(InvalidReferenceError):
        validate_walk(ptn, W("x1", "nowhere"))


def test_walk_length(load):
    beeline = load("beeline_detour").ptn
    assert walk_length(beeline, W("x1")) == 0
    assert walk_length(beeline, W("x1", "x2")) == 5
    assert walk_length(beeline, W("x1", "x2", "x1")) == 10


def test_beeline_distance(load):
    ptn = load("beeline_detour").ptn
    assert beeline_distance(ptn, W("x1")) == 0
    assert beeline_distance(ptn, W("x1", "x2", "x3")) == pytest.approx(4)
    assert beeline_distance(ptn, W("x1", "x2", "x1")) == 0


def test_beeline_needs_coordinates(triangle):
    with pytest.raises(ConfigurationError):
        beeline_distance(triangle, W("x1", "x2"))


def test_station_count():
    assert station_count(W("x1")) == 0
    assert station_count(W("x1", "x2", "x3")) == 2
    assert station_count(W("x1", "x2", "x3", "x7", "x6")) == 4


def test_subwalk_and_concat():
    w = W("x1", "x2", "x3", "x4", "x2", "x5")
    assert subwalk(w, 1, len(w)) == w
    assert subwalk(w, 4, 6) == W("x4", "x2", "x5")
    assert concat(W("x1", "x2"), W("x2", "x3")) == W("x1", "x2", "x3")


@pytest.mark.parametrize("i, j", [(0, 2), (3, 2), (1, 7)])
def test_subwalk_out_of_range(i, j):
    with pytest.raises(InvalidWalkError):
        subwalk(W("a", "b", "c", "d", "e", "f"), i, j)


def test_concat_junction_mismatch():
    with pytest.raises(InvalidWalkError):
        concat(W("x1", "x2"), W("x3", "x4"))


def test_ptn_rejects_bad_graphs():
    with pytest.raises(ConfigurationError, match="loop"):
        Ptn([Node("a")], [Edge("a", "a")])
    with pytest.raises(ConfigurationError, match="parallel"):
        Ptn([Node("a"), Node("b")], [Edge("a", "b"), Edge("b", "a")])
    with pytest.raises(ConfigurationError, match="connected"):
        Ptn([Node("a"), Node("b")], [])
    with pytest.raises(InvalidReferenceError):
        Ptn([Node("a")], [Edge("a", "b")])
    with pytest.raises(ConfigurationError):
        Edge("a", "b", -1)


def test_exact_lengths():
    assert to_number(0.1) == Fraction(1, 10)
    assert to_number("2.50") == Fraction(5, 2)
    assert to_number(Fraction(4, 2)) == 2
    assert isinstance(to_number(Fraction(4, 2)), int)


def test_zone_structure_modes(triangle, triangle_zones):
    assert triangle_zones.is_partition
    assert triangle_zones.zones == ("A", "B")
    cover = ZoneStructure({"x1": {"A"}, "x2": {"A", "B"}, "x3": {"B"}})
    assert not cover.is_partition
    assert cover.overlap("x2") == 2
    with pytest.raises(ConfigurationError):
        cover.zone_of("x2")
    with pytest.raises(ConfigurationError):
        ZoneStructure({"x1": set()})


def test_metropolitan_must_be_connected(load):
    ptn = load("metropolitan_ring").ptn
    zones = ZoneStructure(
        {"a1": {"A"}, "b": {"B"}, "c": {"C"}, "a2": {"A"}, "out": {"O"}},
        metropolitan=["B", "O"],
    )
    with pytest.raises(ConfigurationError):
        zones.validate_against(ptn)


def test_zone_components(load):
    document = load("metropolitan_ring")
    components = document.zones.zone_components(document.ptn, "A")
    assert components == [frozenset({"a1"}), frozenset({"a2"})]
    assert disconnected_zones(document.ptn, document.zones) == ["A"]


def test_example_ticket_is_valid(load):
    ptn = load("example_network").ptn
    traveled = W("x1", "x2", "x3", "x7", "x6")
    ticket = Ticket(
        (W("x1", "x2", "x3", "x4"), W("x5", "x3", "x7"), W("x7", "x6")),
        ((0, 2), (2, 3), (3, 4)),
    )
    assert is_valid_ticket(ptn, ticket, traveled)
    undecomposed = Ticket(ticket.segments)
    assert find_decomposition(ptn, undecomposed, traveled) == ((0, 2), (2, 3), (3, 4))


def test_standard_ticket_is_valid(load):
    ptn = load("example_network").ptn
    w = W("x1", "x2", "x3")
    assert is_valid_ticket(ptn, Ticket.standard(w), w)


def test_short_segment_is_not_a_ticket(load):
    ptn = load("example_network").ptn
    assert not is_valid_ticket(ptn, Ticket((W("x1", "x2"),)), W("x1", "x2", "x3"))


def test_expand_without_crossings_is_identity(triangle, triangle_zones):
    ptn, zones = expand_empty_zones(triangle, triangle_zones, {})
    assert ptn is triangle
    assert zones is triangle_zones


def test_expand_empty_zones(load):
    document = load("combined_empty_zones")
    ptn = document.ptn
    chain = ptn.subdivisions[("x2", "x3")]
    assert len(chain) == 2
    assert all(ptn.node(v).kind is NodeKind.VIRTUAL for v in chain)
    assert [document.zones.zone_of(v) for v in chain] == ["B", "C"]
    pieces = [ptn.length(a, b) for a, b in zip(("x2",) + chain, chain + ("x3",))]
    assert pieces == [Fraction(2, 3)] * 3
    assert sum(pieces) == 2
    assert document.zones.empty_zones == ()


def test_expand_rejects_missing_edge(triangle, triangle_zones):
    with pytest.raises(InvalidReferenceError):
        expand_empty_zones(triangle, triangle_zones, {("x1", "nowhere"): ("A",)})
    with pytest.raises(InvalidReferenceError):
        expand_empty_zones(triangle, triangle_zones, {("x1", "x2"): ("Q",)})


def test_lift_and_contract(load):
    document = load("combined_empty_zones")
    lifted = lift_walk(document.ptn, W("x3", "x2", "x1"))
    assert len(lifted) == 5
    assert lifted.nodes[1] == "x2~x3#2"
    assert contract_walk(document.ptn, lifted) == W("x3", "x2", "x1")


CHAIN = chain_ptn(5)


@given(walks_on(CHAIN), st.lists(st.integers(min_value=0, max_value=3), max_size=6))
def test_length_and_stations_add_up(w1, choices):
    w2 = _follow(CHAIN, w1.last, choices)
    joined = concat(w1, w2)
    assert walk_length(CHAIN, joined) == walk_length(CHAIN, w1) + walk_length(CHAIN, w2)
    assert station_count(joined) == station_count(w1) + station_count(w2)


def _decomposes(ticket, traveled):
    n, t = len(traveled), len(ticket.segments)
    for cuts in itertools.combinations_with_replacement(range(n), t - 1):
        bounds = (0,) + cuts + (n - 1,)
        if all(
            _contains(segment.nodes, traveled.nodes[a:b + 1])
            for segment, a, b in zip(ticket.segments, bounds, bounds[1:])
        ):
            return True
    return False


def _contains(segment, part):
    return any(segment[o:o + len(part)] == part for o in range(len(segment) - len(part) + 1))


SQUARE = Ptn(
    [Node(v) for v in "abcd"],
    [Edge("a", "b"), Edge("b", "c"), Edge("c", "d"), Edge("d", "a"), Edge("a", "c")],
)


@given(walks_on(SQUARE, 8), st.lists(walks_on(SQUARE, 4), min_size=1, max_size=3))
def test_decomposition_search_matches_exhaustive(traveled, segments):
    ticket = Ticket(tuple(segments))
    assert (find_decomposition(SQUARE, ticket, traveled) is not None) == _decomposes(ticket, traveled)


@given(walks_on(SQUARE, 5), walks_on(SQUARE, 2), walks_on(SQUARE, 2))
def test_elongating_a_segment_keeps_the_ticket_valid(traveled, before, after):
    ticket = Ticket.standard(traveled)
    head = _follow(SQUARE, traveled.first, [0] * (len(before) - 1)).reversed()
    tail = _follow(SQUARE, traveled.last, [1] * (len(after) - 1))
    longer = concat(concat(head, traveled), tail)
    elongated = Ticket((longer,))
    assert is_valid_ticket(SQUARE, elongated, traveled)
