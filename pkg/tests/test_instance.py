import json
from fractions import Fraction
from pathlib import Path

import pytest

from faregraph.errors import InstanceParseError
from faregraph.fares import CombinedFareSystem, NoDoubleCountingZoneTariff
from faregraph.instance import (
    dump_instance,
    load_instance,
    loads,
    parse_instance,
    parse_mcsip,
    parse_zones,
    reduced_document,
)
from faregraph.ptn_core import Walk

FIXTURES = Path(__file__).parent / "fixtures"
DOCUMENTS = sorted(p.stem for p in FIXTURES.glob("*.json") if not p.stem.startswith("mcsip"))


def _minimal(**changes):
    data = {
        "ptn": {"nodes": ["a", "b"], "edges": [{"u": "a", "v": "b"}]},
        "zones": {"A": ["a"], "B": ["b"]},
        "fare": {"type": "basic_zone", "prices": [1, 2]},
    }
    data.update(changes)
    return data


@pytest.mark.parametrize("name", DOCUMENTS)
def test_fixture_survives_dump_and_load(load, name):
    document = load(name)
    again = parse_instance(loads(dump_instance(document)))
    assert again.to_dict() == document.to_dict()
    assert again.fare == document.fare
    assert again.ptn.node_ids == document.ptn.node_ids


def test_dump_to_file(load, tmp_path):
    document = load("combined_empty_zones")
    target = tmp_path / "copy.json"
    dump_instance(document, target)
    assert load_instance(target).to_dict() == document.to_dict()


def test_decimals_stay_exact(load):
    document = load("flat")
    assert document.ptn.length("b", "c") == Fraction(3, 2)
    assert load("bounded_distance").fare.left.per_km == Fraction(1, 2)


def test_shorthand_fares_expand(load):
    assert isinstance(load("bounded_distance").fare, CombinedFareSystem)
    zsd = load("zsd_chain").fare
    assert zsd.right.max_stations == 3
    assert zsd.right.max_length is None
    assert zsd.right.amount == Fraction(5, 2)


def test_empty_zones_and_crossings(load):
    document = load("combined_empty_zones")
    assert document.base_zones.empty_zones == ("B", "C")
    assert document.crossings == {("x2", "x3"): ("B", "C")}
    assert len(document.ptn.nodes) == 5
    data = document.to_dict()
    assert data["zones"]["B"] == []
    assert data["ptn"]["edges"][1]["crosses"] == ["B", "C"]


def test_cover_and_metropolitan_sections(load):
    assert not load("overlap_zones").zones.is_partition
    ring = load("metropolitan_ring")
    assert ring.zones.metropolitan == frozenset({"A", "B", "C"})
    assert ring.to_dict()["metropolitan"] == ["A", "B", "C"]


def test_parse_zones():
    zones = parse_zones({"L": ["x1", "x2"], "R": ["x2"], "E": []})
    assert zones.zones_of("x2") == frozenset({"L", "R"})
    assert zones.empty_zones == ("E",)


def test_query(load):
    query = load("example_network").query
    assert query.walk == Walk.of("x1", "x2", "x3", "x7", "x6")
    assert (query.source, query.target) == ("x1", "x6")
    assert query.to_dict()["from"] == "x1"


@pytest.mark.parametrize(
    "data, message",
    [
        ({"fare": {"type": "flat", "price": 1}}, "missing field"),
        (_minimal(fare={"type": "helix"}), "unknown fare type"),
        (_minimal(zones=None, metropolitan=["A"]), "metropolitan zones need"),
        (_minimal(zones=None), "needs a zones section"),
        (_minimal(zones={"A": ["a"], "B": ["b", "c"]}), "unknown nodes"),
        (_minimal(ptn={"nodes": ["a", "b"], "edges": [{"u": "a", "v": "b", "length": -1}]}), "negative length"),
        (_minimal(fare={"type": "basic_zone", "prices": [1, "two"]}), "zone price"),
    ],
)
def test_parse_errors(data, message):
    with pytest.raises(InstanceParseError, match=message):
        parse_instance(data)


@pytest.mark.parametrize("text", ["{", "[1, 2]"])
def test_loads_rejects_non_documents(text):
    with pytest.raises(InstanceParseError):
        loads(text)


def test_loads_reads_decimals_as_fractions():
    assert loads('{"x": 0.1}') == {"x": Fraction(1, 10)}


def test_parse_mcsip(load_colored):
    inst = load_colored("mcsip_square")
    assert inst.k == 1
    assert inst.colors == frozenset({"red", "blue", "green"})
    assert parse_mcsip(json.loads(json.dumps(inst.to_dict()))) == inst
    with pytest.raises(InstanceParseError):
        parse_mcsip({"nodes": ["s", "t"], "edges": [], "from": "s", "to": "t"})


def test_reduced_document(load_colored):
    document, max_zones = reduced_document(load_colored("mcsip_single_edge"))
    assert max_zones == 2
    assert isinstance(document.fare, NoDoubleCountingZoneTariff)
    assert document.query.max_zones == 2
    assert (document.query.source, document.query.target) == ("s", "t")
    assert parse_instance(loads(dump_instance(document))).to_dict() == document.to_dict()
