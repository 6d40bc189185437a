"""
Instance documents
JSON reader and writer for PTN + zones + fare files and MCSiP files.

Decimal literals are parsed as Fractions so prices and lengths stay exact.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from faregraph.errors import FareGraphError, InstanceParseError
from faregraph.fares import (
    BasicZoneTariff,
    BeelineTariff,
    CombinedFareSystem,
    DistanceTariff,
    FlatTariff,
    MetropolitanZoneTariff,
    NoDoubleCountingZoneTariff,
    OverlapZoneTariff,
    PriceFunction,
    ShortDistanceTariff,
    TailRule,
    bounded_distance,
    format_number,
    zsd,
)
from faregraph.ptn_core import Edge, Node, Ptn, Walk, ZoneStructure, expand_empty_zones, to_number
from faregraph.routing import McsipInstance, mcsip_to_mzp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    walk: Optional[Walk] = None
    source: Optional[str] = None
    target: Optional[str] = None
    max_zones: Optional[int] = None

    def to_dict(self):
        data = {}
        if self.walk is not None:
            data["walk"] = list(self.walk.nodes)
        if self.source is not None:
            data["from"] = self.source
        if self.target is not None:
            data["to"] = self.target
        if self.max_zones is not None:
            data["max_zones"] = self.max_zones
        return data


@dataclass(frozen=True)
class InstanceDocument:
    """
    One PTN with its zones and fare system

    base_ptn and base_zones are the network as written; ptn and zones are
    the same network after empty-zone crossings have been expanded into
    virtual nodes, which is what every algorithm runs on.
    """

    name: str
    base_ptn: Ptn
    base_zones: Optional[ZoneStructure]
    fare: object
    crossings: Dict[Tuple[str, str], Tuple[str, ...]] = field(default_factory=dict)
    query: Query = field(default_factory=Query)
    ptn: Ptn = field(init=False)
    zones: Optional[ZoneStructure] = field(init=False)

    def __post_init__(self):
        if self.base_zones is None:
            if self.crossings:
                raise InstanceParseError("edge crossings need a zones section")
            ptn, zones = self.base_ptn, None
        else:
            self.base_zones.validate_against(self.base_ptn)
            ptn, zones = expand_empty_zones(self.base_ptn, self.base_zones, self.crossings)
        object.__setattr__(self, "ptn", ptn)
        object.__setattr__(self, "zones", zones)

    def to_dict(self):
        data = {"name": self.name, **network_dict(self.base_ptn, self.base_zones, self.crossings)}
        data["fare"] = self.fare.to_dict()
        query = self.query.to_dict()
        if query:
            data["query"] = query
        return data


def _number(value, what):
    try:
        return to_number(value)
    except FareGraphError as e:
        raise InstanceParseError(f"{what}: {e}") from e


def _bound(value, what):
    if value is None or value == "inf":
        return None
    return _number(value, what)


def parse_ptn(data):
    """
    {"nodes": ["x1", {"id": "x2", "kind": "virtual", "coords": [0, 1]}],
     "edges": [{"u": "x1", "v": "x2", "length": 2, "crosses": ["B"]}]}

    Returns:
        (Ptn, crossings) where crossings maps (u, v) to the empty zones the
        edge passes through going from u to v
    """
    nodes = []
    for entry in data["nodes"]:
        if isinstance(entry, str):
            nodes.append(Node(entry))
            continue
        coords = entry.get("coords")
        if coords is not None:
            coords = tuple(float(_number(c, "coordinate")) for c in coords)
        nodes.append(Node(entry["id"], entry.get("kind", "station"), coords))
    edges, crossings = [], {}
    for e in data["edges"]:
        edges.append(Edge(e["u"], e["v"], _number(e.get("length", 1), f"length of {e['u']}-{e['v']}")))
        if e.get("crosses"):
            crossings[(e["u"], e["v"])] = tuple(e["crosses"])
    return Ptn(nodes, edges), crossings


def dump_ptn(ptn, crossings=None):
    crossings = crossings or {}
    nodes = []
    for node in ptn.nodes:
        if node.coords is None and not node.is_virtual:
            nodes.append(node.id)
            continue
        entry = {"id": node.id, "kind": node.kind.value}
        if node.coords is not None:
            entry["coords"] = [_coordinate(c) for c in node.coords]
        nodes.append(entry)
    edges = []
    for e in ptn.edges:
        entry = {"u": e.u, "v": e.v, "length": _json_number(e.length)}
        if (e.u, e.v) in crossings:
            entry["crosses"] = list(crossings[(e.u, e.v)])
        elif (e.v, e.u) in crossings:
            entry["crosses"] = list(reversed(crossings[(e.v, e.u)]))
        edges.append(entry)
    return {"nodes": nodes, "edges": edges}


def _coordinate(value):
    return int(value) if float(value).is_integer() else value


def _json_number(value):
    value = to_number(value)
    return value if isinstance(value, int) else format_number(value)


def parse_zones(data, metropolitan=None):
    """
    {"A": ["x1", "x2"], "B": ["x2"], "C": []}

    A node listed under several zones makes the structure a cover; a zone
    with no nodes is an empty zone that edges may cross.
    """
    assignment = {}
    empty = []
    for zone, members in data.items():
        if not members:
            empty.append(zone)
        for node_id in members:
            assignment.setdefault(node_id, []).append(zone)
    return ZoneStructure(assignment, metropolitan=metropolitan, empty_zones=empty)


def dump_zones(zones):
    data = {zone: sorted(zones.members(zone)) for zone in sorted(zones.zones)}
    data.update({zone: [] for zone in sorted(zones.empty_zones)})
    return data


def network_dict(ptn, zones, crossings=None):
    """ptn, zones and metropolitan sections of a document"""
    data = {"ptn": dump_ptn(ptn, crossings)}
    if zones is not None:
        data["zones"] = dump_zones(zones)
        if zones.metropolitan is not None:
            data["metropolitan"] = sorted(zones.metropolitan)
    return data


def parse_price_function(data):
    """{"prices": [1, 2, 3], "tail": "affine", "slope": 1}"""
    return PriceFunction(
        tuple(_number(p, "zone price") for p in data["prices"]),
        TailRule(data.get("tail", "constant")),
        _number(data.get("slope", 0), "tail slope"),
    )


def parse_fare(data):
    """Fare block for every tariff, including the bounded_distance and zsd shorthands"""
    kind = data["type"]
    if kind == "distance":
        return DistanceTariff(_number(data.get("base", 0), "base"), _number(data.get("per_km", 1), "per_km"))
    if kind == "beeline":
        return BeelineTariff(_number(data.get("base", 0), "base"), _number(data.get("per_km", 1), "per_km"))
    if kind == "flat":
        return FlatTariff(_number(data["price"], "flat price"))
    if kind == "basic_zone":
        return BasicZoneTariff(parse_price_function(data))
    if kind == "metropolitan":
        return MetropolitanZoneTariff(
            parse_price_function(data), _number(data["metropolitan_price"], "metropolitan price")
        )
    if kind == "overlap_zone":
        return OverlapZoneTariff(parse_price_function(data))
    if kind == "no_double_counting":
        return NoDoubleCountingZoneTariff(parse_price_function(data))
    if kind == "short_distance":
        return ShortDistanceTariff(
            _number(data["price"], "short-distance price"),
            _bound(data.get("max_stations"), "max_stations"),
            _bound(data.get("max_length"), "max_length"),
        )
    if kind == "combined":
        return CombinedFareSystem(parse_fare(data["left"]), parse_fare(data["right"]))
    if kind == "bounded_distance":
        return bounded_distance(
            _number(data.get("base", 0), "base"),
            _number(data.get("per_km", 1), "per_km"),
            _number(data["cap"], "cap"),
        )
    if kind == "zsd":
        return zsd(
            parse_price_function(data),
            _number(data["short_price"], "short-distance price"),
            _bound(data.get("max_stations"), "max_stations"),
            _bound(data.get("max_length"), "max_length"),
        )
    raise InstanceParseError(f"unknown fare type {kind!r}")


def parse_query(data):
    walk = data.get("walk")
    max_zones = data.get("max_zones")
    return Query(
        walk=Walk(tuple(walk)) if walk is not None else None,
        source=data.get("from"),
        target=data.get("to"),
        max_zones=int(max_zones) if max_zones is not None else None,
    )


def parse_instance(data):
    """
    Build an InstanceDocument from decoded JSON

    Raises:
        InstanceParseError: missing sections, unknown ids, or values no tariff accepts
    """
    try:
        ptn, crossings = parse_ptn(data["ptn"])
        zones = None
        if data.get("zones") is not None:
            zones = parse_zones(data["zones"], data.get("metropolitan"))
        elif data.get("metropolitan") is not None:
            raise InstanceParseError("metropolitan zones need a zones section")
        fare = parse_fare(data["fare"])
        if fare.needs_zones and zones is None:
            raise InstanceParseError(f"fare type {fare.name!r} needs a zones section")
        return InstanceDocument(
            name=data.get("name", "instance"),
            base_ptn=ptn,
            base_zones=zones,
            fare=fare,
            crossings=crossings,
            query=parse_query(data.get("query") or {}),
        )
    except InstanceParseError:
        raise
    except FareGraphError as e:
        raise InstanceParseError(str(e)) from e
    except KeyError as e:
        raise InstanceParseError(f"missing field {e}") from e
    except (TypeError, ValueError) as e:
        raise InstanceParseError(str(e)) from e


def loads(text):
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InstanceParseError("an instance document is a JSON object")
    return data


def load_instance(path):
    with open(path, encoding="utf-8") as f:
        document = parse_instance(loads(f.read()))
    logger.debug("Loaded %s: %d nodes, fare %s", document.name, len(document.ptn.nodes), document.fare.name)
    return document


def dump_instance(document, path=None):
    """JSON text of the document; written to path when given"""
    text = json.dumps(document.to_dict(), indent=2)
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return text


def parse_mcsip(data):
    """
    {"nodes": [...], "edges": [{"u", "v", "color"}], "from": "s", "to": "t", "k": 2}
    """
    try:
        return McsipInstance(
            nodes=tuple(data["nodes"]),
            edges=tuple((e["u"], e["v"], e["color"]) for e in data["edges"]),
            source=data["from"],
            target=data["to"],
            k=int(data["k"]),
        )
    except FareGraphError as e:
        raise InstanceParseError(str(e)) from e
    except KeyError as e:
        raise InstanceParseError(f"missing field {e}") from e
    except (TypeError, ValueError) as e:
        raise InstanceParseError(str(e)) from e


def load_mcsip(path):
    with open(path, encoding="utf-8") as f:
        return parse_mcsip(loads(f.read()))


def reduced_document(inst):
    """
    Minimum-zone instance equivalent to an MCSiP instance

    Returns:
        (InstanceDocument with a no-double-counting fare and a max_zones query, K)
    """
    ptn, zones, x, y, max_zones = mcsip_to_mzp(inst)
    document = InstanceDocument(
        name="mcsip-reduction",
        base_ptn=ptn,
        base_zones=zones,
        fare=NoDoubleCountingZoneTariff(PriceFunction.linear()),
        query=Query(source=x, target=y, max_zones=max_zones),
    )
    return document, max_zones
