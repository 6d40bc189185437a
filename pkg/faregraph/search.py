"""
Label-setting shortest path search shared by the routing algorithms

Ties between equally heavy paths are broken by fewer edges, then by the
lexicographic sequence of node keys, so every query has one deterministic answer.
"""

from heapq import heappop, heappush
from itertools import count


def node_key(node):
    """Sort key mixing plain ids and (id, zone) pairs"""
    if isinstance(node, tuple):
        return tuple(str(part) for part in node)
    return (str(node), "")


def dijkstra(source, neighbors, weight, target=None, key=node_key):
    """
    Shortest paths from one source under nonnegative weights

    Args:
        source: Start node
        neighbors: Callable node -> iterable of successor nodes
        weight: Callable (u, v) -> nonnegative number (int or Fraction stay exact)
        target: Stop as soon as this node is settled
        key: Sort key used for the lexicographic tie-break

    Returns:
        dict node -> (distance, path tuple) for every settled node
    """
    c = count()
    fringe = [(0, 0, (key(source),), next(c), (source,))]
    settled = {}
    while fringe:
        dist, hops, keys, _, path = heappop(fringe)
        node = path[-1]
        if node in settled:
            continue
        settled[node] = (dist, path)
        if node == target:
            break
        for nxt in neighbors(node):
            if nxt in settled:
                continue
            heappush(fringe, (dist + weight(node, nxt), hops + 1, keys + (key(nxt),), next(c), path + (nxt,)))
    return settled


def shortest_path(source, target, neighbors, weight, key=node_key):
    """(distance, path) from source to target, or None when unreachable"""
    return dijkstra(source, neighbors, weight, target=target, key=key).get(target)
