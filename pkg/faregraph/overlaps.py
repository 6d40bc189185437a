"""
Overlaps-resolved graph
One node per (station, zone) membership so that choosing the zone of an
overlap station becomes a shortest path problem
"""

import logging
from dataclasses import dataclass

import networkx as nx

from faregraph.ptn_core import Walk, require_walk
from faregraph.search import shortest_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OverlapsResolvedGraph:
    """
    G' with station nodes V and membership nodes (v, Z)

    Station v is joined to each (v, Z) with weight 1; a PTN edge {u, v}
    becomes all pairs (u, Z1)-(v, Z2) with weight 0 iff Z1 == Z2. In compact
    form station nodes with a single zone are left out.
    """

    graph: nx.Graph
    compact: bool = False

    def terminal(self, station, zones):
        """Node a query at this station starts or ends in"""
        if station in self.graph:
            return station
        (zone,) = zones.zones_of(station)
        return (station, zone)

    def weight(self, u, v):
        return self.graph[u][v]["weight"]

    def neighbors(self, node):
        return self.graph.adj[node]

    def station_nodes(self):
        return [n for n, kind in self.graph.nodes(data="kind") if kind == "station"]

    def membership_nodes(self):
        return [n for n, kind in self.graph.nodes(data="kind") if kind == "membership"]


def build_overlaps_resolved(ptn, zones, compact=False):
    """
    Build G' for a PTN with a zone cover

    Args:
        ptn: Ptn
        zones: ZoneStructure (partition or cover)
        compact: Drop station nodes that belong to exactly one zone

    Returns:
        OverlapsResolvedGraph
    """
    graph = nx.Graph()
    for v in ptn.node_ids:
        memberships = sorted(zones.zones_of(v))
        keep = not (compact and len(memberships) == 1)
        if keep:
            graph.add_node(v, kind="station")
        for zone in memberships:
            graph.add_node((v, zone), kind="membership", station=v, zone=zone)
            if keep:
                graph.add_edge(v, (v, zone), weight=1)
    for edge in ptn.edges:
        for z1 in zones.zones_of(edge.u):
            for z2 in zones.zones_of(edge.v):
                graph.add_edge((edge.u, z1), (edge.v, z2), weight=0 if z1 == z2 else 1)
    logger.debug("Overlaps-resolved graph: %d nodes, %d edges", graph.number_of_nodes(), graph.number_of_edges())
    return OverlapsResolvedGraph(nx.freeze(graph), compact)


def project(path):
    """
    Map a G' path to a PTN walk and its per-visit zone assignment

    Station nodes only occur at the ends of a shortest path and are dropped.
    """
    visits = [n for n in path if isinstance(n, tuple)]
    walk = Walk(tuple(v for v, _ in visits))
    assignment = tuple(z for _, z in visits)
    return walk, assignment


def assigned_zone_count(walk, assignment):
    """1 + number of changes of the assigned zone along the walk"""
    return 1 + sum(1 for a, b in zip(assignment, assignment[1:]) if a != b)


def minimal_assignment(ptn, zones, w):
    """
    Cheapest per-visit zone assignment of a walk

    Runs the overlaps-resolved shortest path on the graph restricted to the
    walk: visit i has one node per zone of x_i, so repeated stations are
    assigned independently. A start and an end node play the role of the
    station nodes and are attached with weight 1 each.

    Returns:
        (assignment tuple, zone count)
    """
    require_walk(ptn, w)
    n = len(w)
    start, end = (-1, ""), (n, "")
    options = [tuple(sorted(zones.zones_of(v))) for v in w]

    def neighbors(node):
        i = node[0]
        if i == n - 1:
            return [end]
        if i == n:
            return []
        return [(i + 1, z) for z in options[i + 1]]

    def weight(u, v):
        if u == start or v == end:
            return 1
        return 0 if u[1] == v[1] else 1

    dist, path = shortest_path(start, end, neighbors, weight, key=lambda node: node)
    assignment = tuple(z for _, z in path[1:-1])
    return assignment, dist - 1
