"""
Routing module
Cheapest paths and cheapest tickets for every fare system, the exact
minimum-zone solver and the reduction that shows why it is needed
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from itertools import count
from typing import Optional, Tuple

import networkx as nx

from faregraph.errors import (
    ConfigurationError,
    InvalidQueryError,
    InvalidReferenceError,
    ResourceLimitError,
    UnsupportedInstanceError,
)
from faregraph.fares import (
    BasicZoneTariff,
    BeelineTariff,
    CombinedFareSystem,
    DistanceTariff,
    FlatTariff,
    MetropolitanZoneTariff,
    NoDoubleCountingZoneTariff,
    OverlapZoneTariff,
    Price,
    ShortDistanceTariff,
    price_with_provenance,
    zone_border_weight,
    zone_count_basic,
    zone_count_no_double,
    zsd,
    zsd_parts,
)
from faregraph.overlaps import assigned_zone_count, build_overlaps_resolved, project
from faregraph.ptn_core import (
    Edge,
    Node,
    Ptn,
    Ticket,
    Walk,
    ZoneStructure,
    concat,
    disconnected_zones,
)
from faregraph.search import dijkstra, shortest_path

logger = logging.getLogger(__name__)

DEFAULT_STATE_LIMIT = 200_000


@dataclass(frozen=True)
class RouteResult:
    """A cheapest walk with its price and the tariff that priced it"""

    walk: Walk
    price: Price
    provenance: str
    assignment: Optional[Tuple[str, ...]] = None
    zone_count: Optional[int] = None
    decision: Optional[bool] = None

    def ticket(self):
        return Ticket.standard(self.walk)

    def to_dict(self):
        data = {
            "walk": list(self.walk.nodes),
            "price": self.price.to_json(),
            "provenance": self.provenance,
        }
        if self.assignment is not None:
            data["assignment"] = list(self.assignment)
        if self.zone_count is not None:
            data["zone_count"] = self.zone_count
        if self.decision is not None:
            data["decision"] = self.decision
        return data


@dataclass(frozen=True)
class McsipInstance:
    """Minimum-color single path: is there an x-y path using at most k colors?"""

    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[str, str, str], ...]
    source: str
    target: str
    k: int
    colors: frozenset = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        known = set(self.nodes)
        for u, v, color in self.edges:
            if u not in known or v not in known:
                raise InvalidReferenceError(f"edge {u}-{v} references an unknown node")
            if not color:
                raise ConfigurationError(f"edge {u}-{v} has no color")
        for terminal in (self.source, self.target):
            if terminal not in known:
                raise InvalidReferenceError(f"unknown terminal {terminal!r}")
        if self.source == self.target:
            raise ConfigurationError("terminals must differ")
        if self.k < 0:
            raise ConfigurationError("color budget must be nonnegative")
        object.__setattr__(self, "colors", frozenset(c for _, _, c in self.edges))

    def to_dict(self):
        return {
            "nodes": list(self.nodes),
            "edges": [{"u": u, "v": v, "color": c} for u, v, c in self.edges],
            "from": self.source,
            "to": self.target,
            "k": self.k,
        }


def _check_endpoints(ptn, x, y, forbid_virtual_endpoints=False):
    for node_id in (x, y):
        node = ptn.node(node_id)
        if forbid_virtual_endpoints and node.is_virtual:
            raise InvalidQueryError(f"{node_id!r} is a virtual node")


def _require_increasing(prices, what):
    if not prices.is_increasing():
        raise ConfigurationError(f"{what} needs an increasing price function")


def _border_weight(zones):
    return lambda u, v: zone_border_weight(zones, u, v)


def _route(ptn, x, y, weight):
    dist, path = shortest_path(x, y, ptn.neighbors, weight)
    return dist, Walk(path)


def cheapest_path_distance(ptn, base, per_km, x, y):
    """Shortest path by edge length, priced base + per_km * length"""
    _check_endpoints(ptn, x, y)
    _, walk = _route(ptn, x, y, ptn.length)
    fs = DistanceTariff(base, per_km)
    return RouteResult(walk, fs.price(ptn, None, walk), fs.name)


def cheapest_path_any(fs, ptn, zones, x, y):
    """Fewest-edge path; every path costs the same under flat and beeline tariffs"""
    _check_endpoints(ptn, x, y)
    _, walk = _route(ptn, x, y, lambda u, v: 0)
    return RouteResult(walk, fs.price(ptn, zones, walk), fs.name)


def cheapest_path_basic_zone(ptn, zones, prices, x, y):
    """
    Path crossing the fewest zone borders

    Args:
        ptn: Ptn
        zones: ZoneStructure in partition mode
        prices: Increasing PriceFunction
        x, y: Query endpoints

    Returns:
        RouteResult priced P(z)
    """
    zones.require_partition("basic zone routing")
    _require_increasing(prices, "basic zone routing")
    _check_endpoints(ptn, x, y)
    borders, walk = _route(ptn, x, y, _border_weight(zones))
    z = 1 + borders
    return RouteResult(walk, Price(prices(z)), BasicZoneTariff.name, zone_count=z)


def _metropolitan_weight(zones, metro):
    def weight(u, v):
        inside = zones.zone_of(u) in metro and zones.zone_of(v) in metro
        return 0 if inside else 1

    return weight


def cheapest_path_metropolitan(ptn, zones, prices, metropolitan_price, x, y):
    """Inside path at P_M when one exists, otherwise the fewest-border path"""
    zones.require_partition("metropolitan routing")
    metro = zones.require_metropolitan()
    _require_increasing(prices, "metropolitan routing")
    _check_endpoints(ptn, x, y)
    outside_edges, walk = _route(ptn, x, y, _metropolitan_weight(zones, metro))
    if outside_edges == 0:
        return RouteResult(
            walk,
            Price(metropolitan_price),
            MetropolitanZoneTariff.name,
            zone_count=zone_count_basic(ptn, zones, walk),
        )
    logger.debug("No metropolitan path %s -> %s, using fewest borders", x, y)
    fallback = cheapest_path_basic_zone(ptn, zones, prices, x, y)
    return RouteResult(fallback.walk, fallback.price, MetropolitanZoneTariff.name, zone_count=fallback.zone_count)


def _require_in_metropolitan(zones, *nodes):
    for node_id in nodes:
        if not zones.in_metropolitan(node_id):
            raise InvalidQueryError(f"{node_id!r} is outside the metropolitan zones")


def _walk_order(ptn, zones):
    return lambda w: (zone_count_basic(ptn, zones, w), len(w), w.nodes)


def cheapest_path_metropolitan_pm_gt_p3(ptn, zones, prices, metropolitan_price, x, y):
    """
    Compare the inside path with the best path that leaves Z_M

    The leaving candidates are stitched from shortest border-weight paths
    from x and from y through every edge on the boundary of Z_M.
    """
    zones.require_partition("metropolitan routing")
    metro = zones.require_metropolitan()
    _require_increasing(prices, "metropolitan routing")
    _check_endpoints(ptn, x, y)
    _require_in_metropolitan(zones, x, y)

    outside_edges, inside_walk = _route(ptn, x, y, _metropolitan_weight(zones, metro))
    weight = _border_weight(zones)
    from_x = dijkstra(x, ptn.neighbors, weight)
    from_y = dijkstra(y, ptn.neighbors, weight)

    candidates = []
    for edge in ptn.edges:
        for u, v in ((edge.u, edge.v), (edge.v, edge.u)):
            if not (zones.zone_of(u) in metro and zones.zone_of(v) not in metro):
                continue
            # x -> u, u -> v, v -> y and x -> v, v -> u, u -> y
            candidates.append(Walk(from_x[u][1] + from_y[v][1][::-1]))
            candidates.append(Walk(from_x[v][1] + from_y[u][1][::-1]))

    inside = None
    if outside_edges == 0:
        inside = RouteResult(
            inside_walk,
            Price(metropolitan_price),
            MetropolitanZoneTariff.name,
            zone_count=zone_count_basic(ptn, zones, inside_walk),
        )
    if not candidates:
        return inside

    leaving_walk = min(candidates, key=_walk_order(ptn, zones))
    z = zone_count_basic(ptn, zones, leaving_walk)
    leaving = RouteResult(leaving_walk, Price(prices(z)), MetropolitanZoneTariff.name, zone_count=z)
    if inside is not None and inside.price <= leaving.price:
        return inside
    return leaving


def cheapest_path_metropolitan_any(ptn, zones, prices, metropolitan_price, x, y):
    """Pick the metropolitan procedure that is exact for these prices"""
    if metropolitan_price <= prices(3):
        return cheapest_path_metropolitan(ptn, zones, prices, metropolitan_price, x, y)
    if zones.in_metropolitan(x) and zones.in_metropolitan(y):
        return cheapest_path_metropolitan_pm_gt_p3(ptn, zones, prices, metropolitan_price, x, y)
    return cheapest_path_metropolitan(ptn, zones, prices, metropolitan_price, x, y)


def metropolitan_elongated_ticket(ptn, zones, prices, metropolitan_price, x, y):
    """
    Cheaper of the standard ticket and an elongated ticket leaving Z_M

    The elongated ticket buys the fewest-zone inside walk extended by the
    fewest-zone path from y (or into x) to a node outside Z_M.

    Returns:
        Ticket with the traveled walk recorded
    """
    zones.require_partition("metropolitan routing")
    metro = zones.require_metropolitan()
    _require_in_metropolitan(zones, x, y)
    standard = cheapest_path_metropolitan_any(ptn, zones, prices, metropolitan_price, x, y)
    standard_ticket = Ticket.standard(standard.walk)

    inside_nodes = zones.metropolitan_nodes()
    outside = [v for v in ptn.node_ids if v not in inside_nodes]
    if not outside:
        return standard_ticket

    weight = _border_weight(zones)
    found = shortest_path(
        x,
        y,
        lambda v: [w for w in ptn.neighbors(v) if w in inside_nodes],
        weight,
    )
    if found is None:
        return standard_ticket
    inside_walk = Walk(found[1])

    def nearest_outside(origin):
        settled = dijkstra(origin, ptn.neighbors, weight)
        return min(
            (settled[v] for v in outside),
            key=lambda item: (item[0], len(item[1]), item[1]),
        )[1]

    at_y = concat(inside_walk, Walk(nearest_outside(y)))
    ext_x = Walk(nearest_outside(x)).reversed()
    at_x = concat(ext_x, inside_walk)
    z_y, z_x = zone_count_basic(ptn, zones, at_y), zone_count_basic(ptn, zones, at_x)
    bought, z = (at_x, z_x) if z_x < z_y else (at_y, z_y)
    elongated = Ticket((bought,), ((0, len(inside_walk) - 1),), inside_walk)
    logger.debug("Elongated ticket %s for %s at %d zones", bought, inside_walk, z)

    if Price(prices(z)) < standard.price:
        return elongated
    return standard_ticket


def compute_d_max(ptn, zones):
    """
    Largest fewest-zone count between two stations of Z_M using inside walks

    Raises:
        ConfigurationError: Z_M does not induce a connected subgraph
    """
    zones.require_partition("metropolitan distance")
    inside = zones.metropolitan_nodes()
    sub = ptn.graph.subgraph(inside)
    if not nx.is_connected(sub):
        raise ConfigurationError("metropolitan zones do not induce a connected subgraph")
    stations = [v for v in inside if not ptn.is_virtual(v)] or list(inside)
    lengths = dict(
        nx.all_pairs_dijkstra_path_length(sub, weight=lambda u, v, _: zone_border_weight(zones, u, v))
    )
    return 1 + max(lengths[a][b] for a in stations for b in stations)


def cheapest_path_zoa(ptn, zones, prices, x, y, compact=False):
    """
    Fewest-zone path with overlap areas via the overlaps-resolved graph

    Returns:
        RouteResult with the per-visit zone assignment
    """
    _require_increasing(prices, "overlap zone routing")
    _check_endpoints(ptn, x, y)
    if x == y:
        assignment = (min(zones.zones_of(x)),)
        return RouteResult(Walk.of(x), Price(prices(1)), OverlapZoneTariff.name, assignment, 1)
    resolved = build_overlaps_resolved(ptn, zones, compact)
    _, path = shortest_path(
        resolved.terminal(x, zones),
        resolved.terminal(y, zones),
        resolved.neighbors,
        resolved.weight,
    )
    walk, assignment = project(path)
    z = assigned_zone_count(walk, assignment)
    return RouteResult(walk, Price(prices(z)), OverlapZoneTariff.name, assignment, z)


def cheapest_path_no_double_connected(ptn, zones, prices, x, y):
    """
    Fewest different zones when every zone is connected

    Raises:
        UnsupportedInstanceError: some zone is disconnected
    """
    zones.require_partition("no-double-counting routing")
    broken = disconnected_zones(ptn, zones)
    if broken:
        raise UnsupportedInstanceError(
            f"zones {broken} are disconnected; use cheapest_path_one_disconnected or mzp_exact"
        )
    route = cheapest_path_basic_zone(ptn, zones, prices, x, y)
    z = zone_count_no_double(ptn, zones, route.walk)
    return RouteResult(route.walk, Price(prices(z)), NoDoubleCountingZoneTariff.name, zone_count=z)


def cheapest_path_one_disconnected(ptn, zones, prices, x, y, zone=None):
    """
    Fewest different zones when exactly one zone Z is disconnected

    Arcs entering Z from outside weigh 1/k, k being the number of components
    of Z; every other border arc weighs 1. The zone count is recovered from
    the path weight m as ceil(m + 1) when x is outside Z, ceil(m + 1/k) otherwise.
    """
    zones.require_partition("no-double-counting routing")
    _require_increasing(prices, "no-double-counting routing")
    _check_endpoints(ptn, x, y)
    broken = disconnected_zones(ptn, zones)
    if len(broken) > 1:
        raise UnsupportedInstanceError(f"zones {broken} are disconnected; use mzp_exact")
    if not broken:
        raise UnsupportedInstanceError("no disconnected zone; use cheapest_path_no_double_connected")
    if zone is not None and zone != broken[0]:
        raise UnsupportedInstanceError(f"zone {zone!r} is connected, {broken[0]!r} is not")
    zone = broken[0]
    k = len(zones.zone_components(ptn, zone))
    entry = Fraction(1, k)

    def weight(v, w):
        if zones.zone_of(w) == zone and zones.zone_of(v) != zone:
            return entry
        return zone_border_weight(zones, v, w)

    m, walk = _route(ptn, x, y, weight)
    if zones.zone_of(x) == zone:
        z = math.ceil(m + entry)
    else:
        z = math.ceil(m + 1)
    return RouteResult(walk, Price(prices(z)), NoDoubleCountingZoneTariff.name, zone_count=z)


class _Label:
    __slots__ = ("node", "zones", "path", "alive")

    def __init__(self, node, zones, path):
        self.node = node
        self.zones = zones
        self.path = path
        self.alive = True

    def order(self):
        return (len(self.path), self.path)


def _dominates(a, b):
    return a.zones <= b.zones and a.order() <= b.order()


def mzp_exact(ptn, zones, x, y, max_zones=None, prices=None, state_limit=DEFAULT_STATE_LIMIT):
    """
    Exact fewest-different-zones walk by best-first search over zone sets

    A label is (node, visited zones, path). Labels are expanded by
    (number of zones, edges, node sequence); a label is dropped when another
    label at the same node has a subset of its zones and an order no worse.

    Args:
        ptn: Ptn
        zones: ZoneStructure in partition mode
        x, y: Query endpoints
        max_zones: Optional K; the result then carries decision = (z <= K)
        prices: Optional PriceFunction; without it the price is the zone count
        state_limit: Maximum number of labels created

    Raises:
        ResourceLimitError: state_limit exceeded; incumbent is the best
            RouteResult reaching y found so far, or None
    """
    zones.require_partition("minimum-zone search")
    _check_endpoints(ptn, x, y)

    def result(label):
        z = len(label.zones)
        amount = Price(prices(z)) if prices is not None else Price(z)
        decision = None if max_zones is None else z <= max_zones
        return RouteResult(Walk(label.path), amount, "mzp_exact", zone_count=z, decision=decision)

    c = count()
    labels = {v: [] for v in ptn.node_ids}
    first = _Label(x, frozenset({zones.zone_of(x)}), (x,))
    labels[x].append(first)
    fringe = [(len(first.zones), 1, first.path, next(c), first)]
    created = 1
    incumbent = first if x == y else None

    while fringe:
        _, _, _, _, label = heappop(fringe)
        if not label.alive:
            continue
        if label.node == y:
            logger.debug("mzp_exact settled %s -> %s after %d labels", x, y, created)
            return result(label)
        for nxt in ptn.neighbors(label.node):
            grown = _Label(nxt, label.zones | {zones.zone_of(nxt)}, label.path + (nxt,))
            bucket = labels[nxt]
            if any(other.alive and _dominates(other, grown) for other in bucket):
                continue
            for other in bucket:
                if other.alive and _dominates(grown, other):
                    other.alive = False
            labels[nxt] = [other for other in bucket if other.alive] + [grown]
            heappush(fringe, (len(grown.zones), len(grown.path), grown.path, next(c), grown))
            created += 1
            if nxt == y and (incumbent is None or (len(grown.zones), grown.order()) < (len(incumbent.zones), incumbent.order())):
                incumbent = grown
            if created > state_limit:
                raise ResourceLimitError(
                    f"minimum-zone search exceeded {state_limit} labels",
                    incumbent=None if incumbent is None else result(incumbent),
                )
    # unreachable on a connected PTN
    raise InvalidQueryError(f"{y!r} is not reachable from {x!r}")


def null_zone_label(colors):
    label = "Null"
    while label in colors:
        label += "_"
    return label


def mcsip_to_mzp(inst):
    """
    Reduce a minimum-color single path instance to a minimum-zone path instance

    Each edge e = {u, v} gets a middle node v_e in the zone of its color; the
    original nodes share one extra zone. A path with at most k colors then
    visits at most k + 1 zones.

    Returns:
        (Ptn, ZoneStructure, x, y, K)
    """
    null = null_zone_label(inst.colors)
    nodes = [Node(v) for v in inst.nodes]
    edges = []
    assignment = {v: {null} for v in inst.nodes}
    for u, v, color in inst.edges:
        middle = f"e:{u}-{v}"
        if middle in assignment:
            raise ConfigurationError(f"node id {middle!r} collides with an edge node")
        nodes.append(Node(middle))
        assignment[middle] = {color}
        edges.append(Edge(u, middle, 1))
        edges.append(Edge(middle, v, 1))
    ptn = Ptn(nodes, edges)
    return ptn, ZoneStructure(assignment), inst.source, inst.target, inst.k + 1


def short_distance_path(ptn, max_stations, max_length, x, y):
    """
    Shortest walk with a bounded number of edges (layered Bellman-Ford)

    d_s(v) is the length of a shortest x-v walk with at most s edges and
    pi_s(v) the predecessor realizing it; both carry over from layer s - 1.
    The walk is read backwards from y, dropping one layer per step.

    Args:
        max_stations: Edge bound, None for unbounded
        max_length: Length bound, None for unbounded

    Returns:
        Walk, or None when the shortest walk within the edge bound is too long
    """
    _check_endpoints(ptn, x, y)
    n = len(ptn.nodes)
    s_max = n - 1 if max_stations is None else min(max_stations, n - 1)
    cap = ptn.max_length() * n
    l_max = cap if max_length is None else min(max_length, cap)

    d = [{v: math.inf for v in ptn.node_ids}]
    d[0][x] = 0
    pi = [{v: None for v in ptn.node_ids}]
    for s in range(1, s_max + 1):
        prev_d = d[s - 1]
        cur_d, cur_pi = dict(prev_d), dict(pi[s - 1])
        for v in ptn.node_ids:
            for w in ptn.neighbors(v):
                candidate = prev_d[w] + ptn.length(w, v)
                if cur_d[v] > candidate:
                    cur_d[v] = candidate
                    cur_pi[v] = w
        d.append(cur_d)
        pi.append(cur_pi)

    if d[s_max][y] > l_max:
        return None
    nodes = [y]
    v, s = y, s_max
    while v != x:
        v = pi[s][v]
        nodes.append(v)
        s -= 1
    return Walk(tuple(reversed(nodes)))


def cheapest_path_short_distance(fs, ptn, x, y):
    """The short walk at P_S if any, else any path at the infinite price"""
    walk = short_distance_path(ptn, fs.max_stations, fs.max_length, x, y)
    if walk is None:
        _, walk = _route(ptn, x, y, lambda u, v: 0)
    return RouteResult(walk, fs.price(ptn, None, walk), fs.name)


def cheapest_path_zsd(ptn, zones, prices, short_price, max_stations, max_length, x, y):
    """Short-distance walk only when P_S undercuts the best zone price"""
    zone_route = cheapest_path_basic_zone(ptn, zones, prices, x, y)
    short_walk = short_distance_path(ptn, max_stations, max_length, x, y)
    fs = zsd(prices, short_price, max_stations, max_length)
    if short_walk is not None and short_price < prices(zone_route.zone_count):
        walk = short_walk
    else:
        walk = zone_route.walk
    amount, provenance = price_with_provenance(fs, ptn, zones, walk)
    return RouteResult(walk, amount, provenance, zone_count=zone_count_basic(ptn, zones, walk))


def cheapest_path_combined(ptn, zones, fs, x, y, **options):
    """Cheapest walk of either child, left child on ties; ZSD uses its own routine"""
    parts = zsd_parts(fs)
    if parts is not None:
        zone_fs, short_fs = parts
        route = cheapest_path_zsd(
            ptn, zones, zone_fs.prices, short_fs.amount, short_fs.max_stations, short_fs.max_length, x, y
        )
    else:
        left = cheapest_path(fs.left, ptn, zones, x, y, **options)
        right = cheapest_path(fs.right, ptn, zones, x, y, **options)
        route = right if right.price < left.price else left
    amount, provenance = price_with_provenance(fs, ptn, zones, route.walk)
    return RouteResult(route.walk, amount, provenance, route.assignment, route.zone_count, route.decision)


def cheapest_path(fs, ptn, zones, x, y, compact=False, forbid_virtual_endpoints=False,
                  state_limit=DEFAULT_STATE_LIMIT):
    """
    Dispatch a cheapest-path query to the routine for the fare system

    Returns:
        RouteResult whose price equals the fare system's price of the walk
    """
    _check_endpoints(ptn, x, y, forbid_virtual_endpoints)
    options = {"compact": compact, "state_limit": state_limit}
    if isinstance(fs, DistanceTariff):
        return cheapest_path_distance(ptn, fs.base, fs.per_km, x, y)
    if isinstance(fs, (FlatTariff, BeelineTariff)):
        return cheapest_path_any(fs, ptn, zones, x, y)
    if isinstance(fs, BasicZoneTariff):
        return cheapest_path_basic_zone(ptn, zones, fs.prices, x, y)
    if isinstance(fs, MetropolitanZoneTariff):
        return cheapest_path_metropolitan_any(ptn, zones, fs.prices, fs.metropolitan_price, x, y)
    if isinstance(fs, OverlapZoneTariff):
        return cheapest_path_zoa(ptn, zones, fs.prices, x, y, compact)
    if isinstance(fs, NoDoubleCountingZoneTariff):
        zones.require_partition("no-double-counting routing")
        broken = disconnected_zones(ptn, zones)
        logger.debug("No-double routing with disconnected zones %s", broken)
        if not broken:
            return cheapest_path_no_double_connected(ptn, zones, fs.prices, x, y)
        if len(broken) == 1 and fs.prices.is_increasing():
            return cheapest_path_one_disconnected(ptn, zones, fs.prices, x, y)
        route = mzp_exact(ptn, zones, x, y, prices=fs.prices, state_limit=state_limit)
        return RouteResult(route.walk, route.price, fs.name, zone_count=route.zone_count)
    if isinstance(fs, ShortDistanceTariff):
        return cheapest_path_short_distance(fs, ptn, x, y)
    if isinstance(fs, CombinedFareSystem):
        return cheapest_path_combined(ptn, zones, fs, x, y, **options)
    raise UnsupportedInstanceError(f"no routing routine for {type(fs).__name__}")


def cheapest_standard_ticket(fs, ptn, zones, x, y, **options):
    return cheapest_path(fs, ptn, zones, x, y, **options).ticket()
