"""
PTN core module
Stations, edges, zone structures, walks and tickets, plus the virtual-node
expansion used to model empty zones crossed in the middle of an edge
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

import networkx as nx

from faregraph.errors import (
    ConfigurationError,
    InvalidReferenceError,
    InvalidWalkError,
)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, float]


def to_number(value):
    """
    Convert a length or price literal to an exact number

    Args:
        value: int, Fraction, Decimal, float or decimal string

    Returns:
        int or Fraction (floats are read as the decimal literal they print as)
    """
    if isinstance(value, bool):
        raise ConfigurationError(f"not a number: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigurationError(f"not a finite number: {value!r}")
        return to_number(Fraction(repr(value)))
    if isinstance(value, (Decimal, str)):
        try:
            return to_number(Fraction(value))
        except (ValueError, ZeroDivisionError):
            raise ConfigurationError(f"not a number: {value!r}")
    raise ConfigurationError(f"not a number: {value!r}")


class NodeKind(str, Enum):
    STATION = "station"
    VIRTUAL = "virtual"


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind = NodeKind.STATION
    coords: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ConfigurationError(f"node id must be a nonempty string, got {self.id!r}")
        object.__setattr__(self, "kind", NodeKind(self.kind))
        if self.coords is not None:
            x, y = self.coords
            object.__setattr__(self, "coords", (float(x), float(y)))

    @property
    def is_virtual(self):
        return self.kind is NodeKind.VIRTUAL


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    length: Number = 1

    def __post_init__(self):
        length = to_number(self.length)
        if length < 0:
            raise ConfigurationError(f"edge {self.u}-{self.v} has negative length {length}")
        object.__setattr__(self, "length", length)

    @property
    def key(self):
        return edge_key(self.u, self.v)


def edge_key(u, v):
    """Orientation-free key of the edge {u, v}"""
    return (u, v) if u <= v else (v, u)


class Ptn:
    """Undirected, simple, connected public transport network"""

    def __init__(self, nodes, edges, subdivisions=None):
        """
        Args:
            nodes: Iterable of Node
            edges: Iterable of Edge
            subdivisions: Mapping (u, v) of an original edge -> ids of the
                virtual nodes placed on it, in order from u to v
        """
        self._nodes = tuple(nodes)
        self._edges = tuple(edges)
        self._by_id: Dict[str, Node] = {}
        for node in self._nodes:
            if node.id in self._by_id:
                raise ConfigurationError(f"duplicate node id {node.id!r}")
            self._by_id[node.id] = node

        adjacency: Dict[str, List[str]] = {node.id: [] for node in self._nodes}
        self._lengths: Dict[Tuple[str, str], Number] = {}
        for edge in self._edges:
            for end in (edge.u, edge.v):
                if end not in self._by_id:
                    raise InvalidReferenceError(f"edge {edge.u}-{edge.v} references unknown node {end!r}")
            if edge.u == edge.v:
                raise ConfigurationError(f"loop at node {edge.u!r}")
            if edge.key in self._lengths:
                raise ConfigurationError(f"parallel edges between {edge.u!r} and {edge.v!r}")
            self._lengths[edge.key] = edge.length
            adjacency[edge.u].append(edge.v)
            adjacency[edge.v].append(edge.u)
        self._adjacency = {v: tuple(sorted(ns)) for v, ns in adjacency.items()}

        if not self._nodes:
            raise ConfigurationError("a PTN needs at least one node")
        graph = nx.Graph()
        graph.add_nodes_from(self._by_id)
        graph.add_weighted_edges_from((e.u, e.v, e.length) for e in self._edges)
        if not nx.is_connected(graph):
            raise ConfigurationError("PTN is not connected")
        self._graph = nx.freeze(graph)

        self._subdivisions = {}
        for (u, v), chain in (subdivisions or {}).items():
            chain = tuple(chain)
            for vid in chain:
                if vid not in self._by_id:
                    raise InvalidReferenceError(f"subdivision node {vid!r} is not in the PTN")
            self._subdivisions[(u, v)] = chain

    def __repr__(self):
        return f"Ptn(nodes={len(self._nodes)}, edges={len(self._edges)})"

    def __contains__(self, node_id):
        return node_id in self._by_id

    @property
    def nodes(self):
        return self._nodes

    @property
    def edges(self):
        return self._edges

    @property
    def node_ids(self):
        return tuple(sorted(self._by_id))

    @property
    def station_ids(self):
        return tuple(sorted(v for v, n in self._by_id.items() if not n.is_virtual))

    @property
    def graph(self):
        """Frozen networkx view; edge attribute `weight` holds the length"""
        return self._graph

    @property
    def subdivisions(self):
        return dict(self._subdivisions)

    def node(self, node_id):
        try:
            return self._by_id[node_id]
        except KeyError:
            raise InvalidReferenceError(f"unknown node {node_id!r}")

    def is_virtual(self, node_id):
        return self.node(node_id).is_virtual

    def neighbors(self, node_id):
        """Sorted neighbor ids of a node"""
        try:
            return self._adjacency[node_id]
        except KeyError:
            raise InvalidReferenceError(f"unknown node {node_id!r}")

    def has_edge(self, u, v):
        return edge_key(u, v) in self._lengths

    def length(self, u, v):
        try:
            return self._lengths[edge_key(u, v)]
        except KeyError:
            raise InvalidReferenceError(f"no edge between {u!r} and {v!r}")

    def max_length(self):
        return max(self._lengths.values(), default=0)

    def coordinates(self, node_id):
        coords = self.node(node_id).coords
        if coords is None:
            raise ConfigurationError(f"node {node_id!r} has no coordinates")
        return coords


@dataclass(frozen=True)
class Walk:
    """Node sequence along PTN edges; nodes may repeat"""

    nodes: Tuple[str, ...]

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if not nodes:
            raise InvalidWalkError("a walk has at least one node")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def of(cls, *node_ids):
        return cls(tuple(node_ids))

    def __len__(self):
        return len(self.nodes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def __getitem__(self, index):
        return self.nodes[index]

    def __str__(self):
        return "(" + ", ".join(self.nodes) + ")"

    @property
    def first(self):
        return self.nodes[0]

    @property
    def last(self):
        return self.nodes[-1]

    @property
    def edges(self):
        return tuple(zip(self.nodes, self.nodes[1:]))

    def reversed(self):
        return Walk(self.nodes[::-1])


def subwalk(w, i, j):
    """
    Contiguous slice [x_i, x_j] of a walk, 1-based and inclusive

    Args:
        w: Walk
        i: Index of the first node kept
        j: Index of the last node kept

    Returns:
        Walk
    """
    if not 1 <= i <= j <= len(w):
        raise InvalidWalkError(f"subwalk indices {i}..{j} out of range for a walk of {len(w)} nodes")
    return Walk(w.nodes[i - 1:j])


def concat(w1, w2):
    """Concatenate two walks sharing the junction node"""
    if w1.last != w2.first:
        raise InvalidWalkError(f"cannot concatenate: {w1.last!r} != {w2.first!r}")
    return Walk(w1.nodes + w2.nodes[1:])


def validate_walk(ptn, w):
    """
    Check that consecutive nodes of a walk are adjacent in the PTN

    Raises:
        InvalidReferenceError: a node id is not in the PTN
    """
    for node_id in w.nodes:
        ptn.node(node_id)
    return all(ptn.has_edge(a, b) for a, b in w.edges)


def require_walk(ptn, w):
    if not validate_walk(ptn, w):
        raise InvalidWalkError(f"walk {w} does not follow PTN edges")
    return w


def walk_length(ptn, w):
    total = 0
    for a, b in w.edges:
        total += ptn.length(a, b)
    return total


def beeline_distance(ptn, w):
    """Euclidean distance between the first and last node of a walk"""
    if w.first == w.last:
        return 0
    x1, y1 = ptn.coordinates(w.first)
    x2, y2 = ptn.coordinates(w.last)
    return math.hypot(x2 - x1, y2 - y1)


def station_count(w):
    """Stations passed after the start, i.e. the number of edges"""
    return len(w) - 1


class ZoneMode(str, Enum):
    PARTITION = "partition"
    COVER = "cover"


class ZoneStructure:
    """Zone memberships of PTN nodes, optionally with metropolitan zones"""

    def __init__(self, assignment, metropolitan=None, empty_zones=()):
        """
        Args:
            assignment: Mapping node id -> iterable of zone ids (nonempty)
            metropolitan: Optional iterable of zone ids forming Z_M
            empty_zones: Declared zones without stations, usable only in edge crossings
        """
        self._assignment: Dict[str, frozenset] = {}
        members: Dict[str, set] = {}
        for node_id, zone_ids in assignment.items():
            zone_set = frozenset(zone_ids)
            if not zone_set:
                raise ConfigurationError(f"node {node_id!r} belongs to no zone")
            self._assignment[node_id] = zone_set
            for zone in zone_set:
                members.setdefault(zone, set()).add(node_id)
        self._members = {z: frozenset(ns) for z, ns in members.items()}
        self._empty = frozenset(empty_zones) - set(self._members)

        if metropolitan is None:
            self._metropolitan = None
        else:
            self._metropolitan = frozenset(metropolitan)
            unknown = self._metropolitan - set(self._members)
            if unknown:
                raise InvalidReferenceError(f"unknown metropolitan zones {sorted(unknown)}")
            if not self._metropolitan:
                raise ConfigurationError("metropolitan zone set is empty")

    def __repr__(self):
        return f"ZoneStructure(zones={len(self._members)}, mode={self.mode.value})"

    @property
    def zones(self):
        return tuple(sorted(self._members))

    @property
    def empty_zones(self):
        return tuple(sorted(self._empty))

    @property
    def assignment(self):
        return dict(self._assignment)

    @property
    def mode(self):
        if all(len(zs) == 1 for zs in self._assignment.values()):
            return ZoneMode.PARTITION
        return ZoneMode.COVER

    @property
    def is_partition(self):
        return self.mode is ZoneMode.PARTITION

    @property
    def metropolitan(self):
        return self._metropolitan

    def zones_of(self, node_id):
        try:
            return self._assignment[node_id]
        except KeyError:
            raise InvalidReferenceError(f"node {node_id!r} has no zone assignment")

    def zone_of(self, node_id):
        """The single zone of a node (partition mode only)"""
        zones = self.zones_of(node_id)
        if len(zones) != 1:
            raise ConfigurationError(f"node {node_id!r} lies in several zones")
        return next(iter(zones))

    def members(self, zone):
        try:
            return self._members[zone]
        except KeyError:
            raise InvalidReferenceError(f"unknown zone {zone!r}")

    def overlap(self, node_id):
        """k_v: number of zones the node belongs to"""
        return len(self.zones_of(node_id))

    def require_partition(self, variant):
        if not self.is_partition:
            raise ConfigurationError(f"{variant} needs a zone partition, got overlapping zones")

    def require_metropolitan(self):
        if self._metropolitan is None:
            raise ConfigurationError("no metropolitan zones configured")
        return self._metropolitan

    def in_metropolitan(self, node_id):
        metro = self.require_metropolitan()
        return bool(self.zones_of(node_id) & metro)

    def metropolitan_nodes(self):
        metro = self.require_metropolitan()
        return frozenset(v for v, zs in self._assignment.items() if zs & metro)

    def zone_components(self, ptn, zone):
        """Connected components of the subgraph induced by a zone, ordered by smallest member"""
        sub = ptn.graph.subgraph(self.members(zone))
        return sorted((frozenset(c) for c in nx.connected_components(sub)), key=min)

    def validate_against(self, ptn):
        """
        Check referential integrity and the metropolitan connectivity assumption

        Raises:
            InvalidReferenceError: assignment mentions nodes outside the PTN
            ConfigurationError: a PTN node has no zone, or Z_M is disconnected
        """
        extra = set(self._assignment) - set(ptn.node_ids)
        if extra:
            raise InvalidReferenceError(f"zones reference unknown nodes {sorted(extra)}")
        missing = set(ptn.node_ids) - set(self._assignment)
        if missing:
            raise ConfigurationError(f"nodes without zone: {sorted(missing)}")
        if self._metropolitan is not None:
            sub = ptn.graph.subgraph(self.metropolitan_nodes())
            if not nx.is_connected(sub):
                raise ConfigurationError("metropolitan zones do not induce a connected subgraph")
        return self

    def with_assignment(self, extra, populated=()):
        """New structure with additional node memberships (used by the empty-zone expansion)"""
        assignment = dict(self._assignment)
        assignment.update(extra)
        return ZoneStructure(
            assignment,
            metropolitan=self._metropolitan,
            empty_zones=self._empty - set(populated),
        )


def disconnected_zones(ptn, zones):
    """Zone ids whose induced subgraph has more than one component"""
    return [z for z in zones.zones if len(zones.zone_components(ptn, z)) > 1]


@dataclass(frozen=True)
class Ticket:
    """
    Segments H_1..H_t bought for a traveled walk

    decomposition holds 0-based inclusive (start, end) positions of the parts
    W_1..W_t inside the traveled walk; consecutive parts share their junction.
    traveled is optional and only recorded for display and serialization.
    """

    segments: Tuple[Walk, ...]
    decomposition: Optional[Tuple[Tuple[int, int], ...]] = field(default=None)
    traveled: Optional[Walk] = field(default=None)

    def __post_init__(self):
        segments = tuple(s if isinstance(s, Walk) else Walk(tuple(s)) for s in self.segments)
        if not segments:
            raise InvalidWalkError("a ticket has at least one segment")
        object.__setattr__(self, "segments", segments)
        if self.decomposition is not None:
            decomposition = tuple((int(a), int(b)) for a, b in self.decomposition)
            if len(decomposition) != len(segments):
                raise InvalidWalkError("decomposition and segments differ in length")
            object.__setattr__(self, "decomposition", decomposition)
        if self.traveled is not None and not isinstance(self.traveled, Walk):
            object.__setattr__(self, "traveled", Walk(tuple(self.traveled)))

    @classmethod
    def standard(cls, w):
        return cls((w,), ((0, len(w) - 1),), w)

    @property
    def is_standard(self):
        return len(self.segments) == 1 and (self.traveled is None or self.segments[0] == self.traveled)

    def parts(self, traveled):
        """The walks W_1..W_t cut from the traveled walk by the decomposition"""
        if self.decomposition is None:
            raise InvalidWalkError("ticket carries no decomposition")
        return tuple(Walk(traveled.nodes[a:b + 1]) for a, b in self.decomposition)

    def to_dict(self):
        return {
            "segments": [list(s.nodes) for s in self.segments],
            "decomposition": None if self.decomposition is None else [list(r) for r in self.decomposition],
            "traveled": None if self.traveled is None else list(self.traveled.nodes),
        }


def _occurs_in(part, segment):
    n, m = len(part), len(segment)
    return any(segment.nodes[o:o + n] == part for o in range(m - n + 1))


def _station_endpoints(ptn, segments):
    return all(not ptn.is_virtual(s.first) and not ptn.is_virtual(s.last) for s in segments)


def check_decomposition(ptn, ticket, traveled, forbid_virtual_endpoints=False):
    """True iff the stored decomposition is a consecutive partition covered by the segments"""
    ranges = ticket.decomposition
    n = len(traveled)
    if ranges[0][0] != 0 or ranges[-1][1] != n - 1:
        return False
    for (a, b), (c, _) in zip(ranges, ranges[1:]):
        if c != b:
            return False
        if forbid_virtual_endpoints and ptn.is_virtual(traveled[b]):
            return False
    for (a, b), segment in zip(ranges, ticket.segments):
        if not 0 <= a <= b < n:
            return False
        if not _occurs_in(traveled.nodes[a:b + 1], segment):
            return False
    return True


def find_decomposition(ptn, ticket, traveled, forbid_virtual_endpoints=False):
    """
    Search a decomposition of the traveled walk into the ticket's segments

    Breadth-first search over (position in traveled, segment index, offset
    within segment). A state means traveled[position] is being covered by
    segment[offset] of that segment.

    Returns:
        Tuple of (start, end) ranges, or None when no decomposition exists
    """
    segments = ticket.segments
    trav = traveled.nodes
    n, t = len(trav), len(segments)

    parent = {}
    queue = deque()
    for o, node in enumerate(segments[0].nodes):
        if node == trav[0]:
            state = (0, 0, o)
            parent[state] = None
            queue.append(state)

    goal = None
    while queue:
        state = queue.popleft()
        i, j, o = state
        if i == n - 1 and j == t - 1:
            goal = state
            break
        nexts = []
        seg = segments[j].nodes
        if i + 1 < n and o + 1 < len(seg) and seg[o + 1] == trav[i + 1]:
            nexts.append((i + 1, j, o + 1))
        if j + 1 < t and not (forbid_virtual_endpoints and ptn.is_virtual(trav[i])):
            for o2, node in enumerate(segments[j + 1].nodes):
                if node == trav[i]:
                    nexts.append((i, j + 1, o2))
        for nxt in nexts:
            if nxt not in parent:
                parent[nxt] = state
                queue.append(nxt)

    if goal is None:
        return None

    cuts = []
    state = goal
    while parent[state] is not None:
        prev = parent[state]
        if prev[1] != state[1]:
            cuts.append(state[0])
        state = prev
    cuts.reverse()
    starts = [0] + cuts
    ends = cuts + [n - 1]
    return tuple(zip(starts, ends))


def is_valid_ticket(ptn, ticket, traveled, forbid_virtual_endpoints=False):
    """
    Check a ticket against the walk actually traveled

    Uses the stored decomposition when present, otherwise searches one.
    """
    if not all(validate_walk(ptn, s) for s in ticket.segments):
        return False
    if not validate_walk(ptn, traveled):
        return False
    if forbid_virtual_endpoints and not _station_endpoints(ptn, ticket.segments):
        return False
    if ticket.decomposition is not None:
        return check_decomposition(ptn, ticket, traveled, forbid_virtual_endpoints)
    return find_decomposition(ptn, ticket, traveled, forbid_virtual_endpoints) is not None


def _interpolate(a, b, fraction):
    if a is None or b is None:
        return None
    return (a[0] + (b[0] - a[0]) * fraction, a[1] + (b[1] - a[1]) * fraction)


def virtual_node_id(u, v, index):
    return f"{u}~{v}#{index}"


def expand_empty_zones(ptn, zones, crossings):
    """
    Subdivide edges that cross empty zones by virtual nodes

    Args:
        ptn: Ptn
        zones: ZoneStructure (crossing zones must be zones or declared empty zones)
        crossings: Mapping (u, v) -> ordered zone ids crossed going from u to v

    Returns:
        (Ptn, ZoneStructure) with one virtual node per crossed zone; the
        pieces of a subdivided edge have equal length
    """
    known = set(zones.zones) | set(zones.empty_zones)
    split = {}
    for (u, v), crossed in crossings.items():
        if u not in ptn or v not in ptn or not ptn.has_edge(u, v):
            raise InvalidReferenceError(f"crossing list on nonexistent edge {u}-{v}")
        unknown = [z for z in crossed if z not in known]
        if unknown:
            raise InvalidReferenceError(f"edge {u}-{v} crosses unknown zones {unknown}")
        if crossed:
            split[edge_key(u, v)] = (u, v, tuple(crossed))

    if not split:
        return ptn, zones

    nodes = list(ptn.nodes)
    edges = []
    extra_zones = {}
    subdivisions = ptn.subdivisions
    populated = set()
    for edge in ptn.edges:
        if edge.key not in split:
            edges.append(edge)
            continue
        u, v, crossed = split[edge.key]
        k = len(crossed)
        piece = to_number(Fraction(edge.length) / (k + 1))
        cu, cv = ptn.node(u).coords, ptn.node(v).coords
        chain = []
        for index, zone in enumerate(crossed, start=1):
            vid = virtual_node_id(u, v, index)
            if vid in ptn:
                raise ConfigurationError(f"virtual node id {vid!r} collides with an existing node")
            nodes.append(Node(vid, NodeKind.VIRTUAL, _interpolate(cu, cv, index / (k + 1))))
            extra_zones[vid] = {zone}
            populated.add(zone)
            chain.append(vid)
        path = [u] + chain + [v]
        edges.extend(Edge(a, b, piece) for a, b in zip(path, path[1:]))
        subdivisions[(u, v)] = tuple(chain)
        logger.debug("Subdivided %s-%s with %d virtual nodes", u, v, k)

    return Ptn(nodes, edges, subdivisions), zones.with_assignment(extra_zones, populated)


def lift_walk(ptn, w):
    """Map a walk over original edges onto the expanded PTN"""
    subdivisions = ptn.subdivisions
    nodes = [w.first]
    for a, b in w.edges:
        if (a, b) in subdivisions:
            nodes.extend(subdivisions[(a, b)])
        elif (b, a) in subdivisions:
            nodes.extend(reversed(subdivisions[(b, a)]))
        nodes.append(b)
    return Walk(tuple(nodes))


def contract_walk(ptn, w):
    """Drop virtual nodes (and the repeats that leaves) for display"""
    kept = [v for v in w.nodes if not ptn.is_virtual(v)]
    if not kept:
        return w
    out = [kept[0]]
    for v in kept[1:]:
        if v != out[-1]:
            out.append(v)
    return Walk(tuple(out))
