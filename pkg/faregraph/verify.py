"""
Verification module
Enumeration checks for the no-stopover and no-elongation properties, the
closed-form conditions that decide them, the brute-force ticket oracle and
the counterexample networks built from a violated condition
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

import networkx as nx

from faregraph.errors import ConfigurationError, ResourceLimitError, UnsupportedInstanceError
from faregraph.fares import Price, TailRule, zsd_threshold
from faregraph.ptn_core import Edge, Node, NodeKind, Ptn, Ticket, Walk, ZoneStructure, to_number

logger = logging.getLogger(__name__)


class PropertyName(str, Enum):
    NO_STOPOVER = "no_stopover"
    NO_ELONGATION = "no_elongation"
    STANDARD_TICKET_OPTIMALITY = "standard_ticket_optimality"


@dataclass(frozen=True)
class EnumBudget:
    """
    Bounds on the universe the checkers enumerate

    "holds" in a report means "holds for every walk with at most max_edges
    edges", using at most max_segments ticket segments, each elongated by at
    most max_elongation_edges edges at either end.
    """

    max_edges: int = 7
    max_segments: int = 3
    max_elongation_edges: int = 2
    simple_paths: bool = False
    elongation_revisits: bool = False
    max_walks: Optional[int] = None

    def __post_init__(self):
        if self.max_edges < 1 or self.max_segments < 1:
            raise ConfigurationError("walk and segment budgets must be positive")
        if self.max_elongation_edges < 0:
            raise ConfigurationError("elongation budget must be nonnegative")
        if self.max_walks is not None and self.max_walks < 1:
            raise ConfigurationError("walk limit must be positive")

    @classmethod
    def from_settings(cls, settings):
        return cls(
            max_edges=settings.budget_edges,
            max_segments=settings.budget_segments,
            max_elongation_edges=settings.budget_elongation,
            max_walks=settings.walk_limit,
        )

    def to_dict(self):
        return {
            "max_edges": self.max_edges,
            "max_segments": self.max_segments,
            "max_elongation_edges": self.max_elongation_edges,
            "simple_paths": self.simple_paths,
            "elongation_revisits": self.elongation_revisits,
            "max_walks": self.max_walks,
        }


@dataclass(frozen=True)
class Counterexample:
    """A walk on which a property fails, with the prices that show it"""

    walk: Walk
    prices: Tuple[Price, ...]
    split_index: Optional[int] = None
    shorter: Optional[Walk] = None
    ticket: Optional[Ticket] = None

    def recheck(self, fs, ptn, zones):
        """Re-price the witness directly; True iff it still violates its inequality"""
        whole = fs.price(ptn, zones, self.walk)
        if self.split_index is not None:
            i = self.split_index
            first = fs.price(ptn, zones, Walk(self.walk.nodes[:i]))
            second = fs.price(ptn, zones, Walk(self.walk.nodes[i - 1:]))
            return whole > first + second
        if self.shorter is not None:
            return fs.price(ptn, zones, self.shorter) > whole
        if self.ticket is not None:
            paid = sum((fs.price(ptn, zones, h) for h in self.ticket.segments), Price.ZERO)
            return paid < whole
        return False

    def to_dict(self):
        data = {"walk": list(self.walk.nodes), "prices": [p.to_json() for p in self.prices]}
        if self.split_index is not None:
            data["split_index"] = self.split_index
        if self.shorter is not None:
            data["shorter"] = list(self.shorter.nodes)
        if self.ticket is not None:
            data["ticket"] = self.ticket.to_dict()
        return data


@dataclass(frozen=True)
class PropertyReport:
    property: PropertyName
    holds: bool
    budget: EnumBudget
    counterexample: Optional[Counterexample] = None
    seed: Optional[int] = None
    walks_checked: int = 0

    def __post_init__(self):
        if self.holds == (self.counterexample is not None):
            raise ValueError("a report has a counterexample exactly when the property fails")

    def to_dict(self):
        return {
            "property": self.property.value,
            "verdict": "PASS" if self.holds else "FAIL",
            "budget": self.budget.to_dict(),
            "seed": self.seed,
            "walks_checked": self.walks_checked,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


@dataclass(frozen=True)
class ConditionResult:
    name: str
    holds: bool
    witness: Optional[Dict[str, int]] = None

    def to_dict(self):
        return {"condition": self.name, "holds": self.holds, "witness": self.witness}


@dataclass(frozen=True)
class ZsdConditionReport:
    threshold: object
    conditions: Tuple[ConditionResult, ...] = field(default_factory=tuple)

    @property
    def holds(self):
        return all(c.holds for c in self.conditions)

    def failed(self):
        return [c for c in self.conditions if not c.holds]

    def to_dict(self):
        threshold = "inf" if self.threshold == math.inf else self.threshold
        return {
            "threshold": threshold,
            "holds": self.holds,
            "conditions": [c.to_dict() for c in self.conditions],
        }


class _Prices:
    """Memoized walk prices for one fare system on one instance"""

    def __init__(self, fs, ptn, zones):
        self.fs, self.ptn, self.zones = fs, ptn, zones
        self._cache = {}

    def __call__(self, nodes):
        cached = self._cache.get(nodes)
        if cached is None:
            cached = self.fs.price(self.ptn, self.zones, Walk(nodes))
            self._cache[nodes] = cached
        return cached


def enumerate_walks(ptn, max_edges, simple=False, start=None):
    """
    All walks with at most max_edges edges as node tuples

    Ordered by number of edges, then lexicographically, so the first
    counterexample a checker reports does not depend on anything but the input.
    """
    layer = [(v,) for v in ([start] if start is not None else ptn.node_ids)]
    for edges in range(max_edges + 1):
        yield from layer
        if edges == max_edges:
            return
        grown = []
        for nodes in layer:
            for nxt in ptn.neighbors(nodes[-1]):
                if simple and nxt in nodes:
                    continue
                grown.append(nodes + (nxt,))
        layer = grown
        if not layer:
            return


def _virtual(ptn, node_id):
    return ptn.is_virtual(node_id)


def check_no_stopover(fs, ptn, zones, budget=None, forbid_virtual_endpoints=False, seed=None):
    """
    Look for a walk that is cheaper when bought in two parts

    Checks p(W) <= p(W1) + p(W2) for every walk within budget and every split
    at an inner node.

    Returns:
        PropertyReport with the first violation in enumeration order
    """
    budget = budget or EnumBudget()
    prices = _Prices(fs, ptn, zones)
    checked = 0
    for nodes in enumerate_walks(ptn, budget.max_edges, budget.simple_paths):
        n = len(nodes)
        if n < 3:
            continue
        if forbid_virtual_endpoints and (_virtual(ptn, nodes[0]) or _virtual(ptn, nodes[-1])):
            continue
        checked += 1
        whole = prices(nodes)
        for i in range(2, n):
            if forbid_virtual_endpoints and _virtual(ptn, nodes[i - 1]):
                continue
            first, second = prices(nodes[:i]), prices(nodes[i - 1:])
            if whole > first + second:
                witness = Counterexample(Walk(nodes), (whole, first, second), split_index=i)
                logger.debug("No-stopover violated on %s at %d", witness.walk, i)
                return PropertyReport(PropertyName.NO_STOPOVER, False, budget, witness, seed, checked)
    return PropertyReport(PropertyName.NO_STOPOVER, True, budget, None, seed, checked)


def check_no_elongation(fs, ptn, zones, budget=None, forbid_virtual_endpoints=False, seed=None):
    """
    Look for a walk that is cheaper than the walk one node shorter

    Both truncations are tested: dropping the last node (the prefix) and
    dropping the first node (the prefix of the reversed walk).
    """
    budget = budget or EnumBudget()
    prices = _Prices(fs, ptn, zones)
    checked = 0
    for nodes in enumerate_walks(ptn, budget.max_edges, budget.simple_paths):
        if len(nodes) < 2:
            continue
        if forbid_virtual_endpoints and (_virtual(ptn, nodes[0]) or _virtual(ptn, nodes[-1])):
            continue
        checked += 1
        whole = prices(nodes)
        for shorter in (nodes[:-1], nodes[1:]):
            if forbid_virtual_endpoints and (_virtual(ptn, shorter[0]) or _virtual(ptn, shorter[-1])):
                continue
            part = prices(shorter)
            if part > whole:
                witness = Counterexample(Walk(nodes), (whole, part), shorter=Walk(shorter))
                return PropertyReport(PropertyName.NO_ELONGATION, False, budget, witness, seed, checked)
    return PropertyReport(PropertyName.NO_ELONGATION, True, budget, None, seed, checked)


class _TicketSearch:
    """Cheapest ticket for a fixed traveled walk within an EnumBudget"""

    def __init__(self, fs, ptn, zones, budget, forbid_virtual_endpoints=False):
        self.ptn = ptn
        self.budget = budget
        self.forbid = forbid_virtual_endpoints
        self.prices = _Prices(fs, ptn, zones)
        self._covers = {}
        self._extensions = {}

    def extensions(self, origin):
        """Walks leaving origin with at most max_elongation_edges edges, origin excluded"""
        cached = self._extensions.get(origin)
        if cached is None:
            cached = [
                nodes[1:]
                for nodes in enumerate_walks(self.ptn, self.budget.max_elongation_edges, start=origin)
            ]
            self._extensions[origin] = cached
        return cached

    def _allowed(self, part, before, after):
        if self.budget.elongation_revisits:
            return True
        added = before + after
        return len(set(added)) == len(added) and not set(added) & set(part)

    def cover(self, part):
        """(price, segment) of the cheapest segment containing part contiguously"""
        cached = self._covers.get(part)
        if cached is not None:
            return cached
        best = None
        for back in self.extensions(part[0]):
            before = back[::-1]
            for after in self.extensions(part[-1]):
                if not self._allowed(part, before, after):
                    continue
                segment = before + part + after
                if self.forbid and (self.ptn.is_virtual(segment[0]) or self.ptn.is_virtual(segment[-1])):
                    continue
                amount = self.prices(segment)
                if best is None or amount < best[0]:
                    best = (amount, segment)
        if best is None:
            best = (Price.INFINITY, part)
        self._covers[part] = best
        return best

    def best_ticket(self, nodes):
        """
        Split the walk into at most max_segments parts and cover each part

        Returns:
            (Ticket, Price)
        """
        n = len(nodes)
        if n == 1:
            amount, segment = self.cover(nodes)
            return Ticket((Walk(segment),), ((0, 0),), Walk(nodes)), amount

        # best[c][b]: cheapest cover of nodes[0..b] by c parts, with back pointers
        best = [{0: (Price.ZERO, None)}]
        for c in range(1, self.budget.max_segments + 1):
            layer = {}
            for b in range(1, n):
                if self.forbid and b < n - 1 and self.ptn.is_virtual(nodes[b]):
                    continue
                for a, (paid, _) in best[c - 1].items():
                    if a >= b:
                        continue
                    amount = paid + self.cover(nodes[a:b + 1])[0]
                    if b not in layer or amount < layer[b][0]:
                        layer[b] = (amount, a)
            best.append(layer)

        chosen = None
        for c in range(1, self.budget.max_segments + 1):
            if n - 1 in best[c] and (chosen is None or best[c][n - 1][0] < best[chosen][n - 1][0]):
                chosen = c
        ranges = []
        b, c = n - 1, chosen
        while c > 0:
            a = best[c][b][1]
            ranges.append((a, b))
            b, c = a, c - 1
        ranges.reverse()
        segments = tuple(Walk(self.cover(nodes[a:b + 1])[1]) for a, b in ranges)
        return Ticket(segments, tuple(ranges), Walk(nodes)), best[chosen][n - 1][0]


def cheapest_ticket_for_walk(fs, ptn, zones, w, budget=None, forbid_virtual_endpoints=False):
    """
    Cheapest ticket for one traveled walk within the budget

    Returns:
        (Ticket, Price)
    """
    search = _TicketSearch(fs, ptn, zones, budget or EnumBudget(), forbid_virtual_endpoints)
    return search.best_ticket(w.nodes)


def brute_force_cheapest_ticket(fs, ptn, zones, x, y, budget=None, forbid_virtual_endpoints=False):
    """
    Cheapest ticket from x to y over every walk, split and elongation within budget

    Raises:
        ResourceLimitError: more walks than budget.max_walks, or no x-y walk
            within budget.max_edges; incumbent is the best (Ticket, Price) so far
    """
    budget = budget or EnumBudget()
    search = _TicketSearch(fs, ptn, zones, budget, forbid_virtual_endpoints)
    best = None
    walks = 0
    for nodes in enumerate_walks(ptn, budget.max_edges, budget.simple_paths, start=x):
        if nodes[-1] != y:
            continue
        walks += 1
        if budget.max_walks is not None and walks > budget.max_walks:
            raise ResourceLimitError(f"ticket oracle exceeded {budget.max_walks} walks", incumbent=best)
        ticket, amount = search.best_ticket(nodes)
        if best is None or amount < best[1]:
            best = (ticket, amount)
    if best is None:
        raise ResourceLimitError(f"no {x}-{y} walk within {budget.max_edges} edges", incumbent=None)
    logger.debug("Ticket oracle %s -> %s: %d walks, best %s", x, y, walks, best[1])
    return best


def check_standard_ticket_optimality(fs, ptn, zones, budget=None, forbid_virtual_endpoints=False, seed=None):
    """Look for a walk whose standard ticket is beaten by some other ticket"""
    budget = budget or EnumBudget()
    search = _TicketSearch(fs, ptn, zones, budget, forbid_virtual_endpoints)
    checked = 0
    for nodes in enumerate_walks(ptn, budget.max_edges, budget.simple_paths):
        if forbid_virtual_endpoints and (_virtual(ptn, nodes[0]) or _virtual(ptn, nodes[-1])):
            continue
        checked += 1
        standard = search.prices(nodes)
        ticket, amount = search.best_ticket(nodes)
        if amount < standard:
            witness = Counterexample(Walk(nodes), (standard, amount), ticket=ticket)
            return PropertyReport(PropertyName.STANDARD_TICKET_OPTIMALITY, False, budget, witness, seed, checked)
    return PropertyReport(PropertyName.STANDARD_TICKET_OPTIMALITY, True, budget, None, seed, checked)


def _horizon(prices, k_max):
    return prices.horizon() if k_max is None else k_max


def condition_eq2(prices, k_max=None):
    """P(k) <= P(i) + P(k - i + 1) for 3 <= k <= k_max and 2 <= i <= (k + 1) // 2"""
    k_max = _horizon(prices, k_max)
    if k_max < 3:
        raise ConfigurationError("the border condition needs k_max >= 3")
    for k in range(3, k_max + 1):
        for i in range(2, (k + 1) // 2 + 1):
            if prices(k) > prices(i) + prices(k - i + 1):
                return ConditionResult("eq2", False, {"k": k, "i": i})
    return ConditionResult("eq2", True)


def condition_increasing(prices, k_max=None):
    k_max = _horizon(prices, k_max)
    for k in range(1, k_max):
        if prices(k) > prices(k + 1):
            return ConditionResult("increasing", False, {"k": k})
    return ConditionResult("increasing", True)


def condition_subadditive(prices, k_max=None):
    """P(k1 + k2) <= P(k1) + P(k2) for k1 + k2 <= k_max"""
    k_max = _horizon(prices, k_max)
    for total in range(2, k_max + 1):
        for k1 in range(1, total // 2 + 1):
            k2 = total - k1
            if prices(total) > prices(k1) + prices(k2):
                return ConditionResult("subadditive", False, {"k1": k1, "k2": k2})
    return ConditionResult("subadditive", True)


def condition_metropolitan(prices, metropolitan_price, d, k_max=None):
    """P(d + k) <= P_M + P(k + 1) for 1 <= k <= k_max"""
    if d < 1:
        raise ConfigurationError("metropolitan distance must be at least 1")
    k_max = _horizon(prices, k_max)
    metropolitan_price = to_number(metropolitan_price)
    for k in range(1, k_max + 1):
        if prices(d + k) > metropolitan_price + prices(k + 1):
            return ConditionResult("metropolitan", False, {"d": d, "k": k})
    return ConditionResult("metropolitan", True)


def condition_no_elongation_metropolitan(prices, metropolitan_price):
    """P_M <= P(2)"""
    holds = to_number(metropolitan_price) <= prices(2)
    return ConditionResult("metropolitan_no_elongation", holds, None if holds else {"k": 2})


def condition_zsd(prices, short_price, max_stations=None, k_max=None):
    """
    The four conditions under which a ZSD tariff has the no-stopover property

    K is the threshold with P(K) <= P_S < P(K + 1). The conditions:
    1. the border condition on P;
    2. P(k) <= 2 P_S for k >= 2K + 1;
    3. P(k) <= P(i) + P_S for k >= K + 1 and 1 <= i <= k - K;
    4. when more than one station is allowed: P_S <= P(i) + P(k - i + 1)
       for K + 1 <= k <= 2K - 1 and k - K + 1 <= i <= K.

    Without k_max the check runs far enough along the tail to find the first
    failure of every condition.

    Returns:
        ZsdConditionReport
    """
    short_price = to_number(short_price)
    threshold = zsd_threshold(prices, short_price)
    if k_max is None:
        k_max = _zsd_horizon(prices, short_price, threshold)
    elif threshold != math.inf:
        k_max = max(k_max, 2 * threshold + 2)
    border = condition_eq2(prices, max(k_max, 3))
    results = [ConditionResult("zsd_1", border.holds, border.witness)]

    second = ConditionResult("zsd_2", True)
    third = ConditionResult("zsd_3", True)
    fourth = ConditionResult("zsd_4", True)
    if threshold != math.inf:
        K = threshold
        for k in range(2 * K + 1, k_max + 1):
            if prices(k) > 2 * short_price:
                second = ConditionResult("zsd_2", False, {"k": k})
                break
        third = _pair_result("zsd_3", next(_zsd_failures(3, prices, short_price, K, k_max), None))
        if max_stations is None or max_stations > 1:
            fourth = _pair_result("zsd_4", next(_zsd_failures(4, prices, short_price, K, k_max), None))
    results.extend([second, third, fourth])
    return ZsdConditionReport(threshold, tuple(results))


def _pair_result(name, pair):
    if pair is None:
        return ConditionResult(name, True)
    k, i = pair
    return ConditionResult(name, False, {"k": k, "i": i})


def _zsd_failures(condition, prices, short_price, K, k_max):
    """(k, i) pairs violating short-distance condition 3 or 4, by increasing k then i"""
    if condition == 3:
        pairs = ((k, i) for k in range(K + 1, k_max + 1) for i in range(1, k - K + 1))
        return ((k, i) for k, i in pairs if prices(k) > prices(i) + short_price)
    # empty for K < 2
    pairs = ((k, i) for k in range(K + 1, 2 * K) for i in range(k - K + 1, K + 1))
    return ((k, i) for k, i in pairs if short_price > prices(i) + prices(k - i + 1))


def _first_above(prices, bound):
    """Smallest k >= len(table) with P(k) > bound on an increasing affine tail"""
    m = len(prices.table)
    if prices(m) > bound:
        return m
    return m + math.floor((bound - prices(m)) / Fraction(prices.slope)) + 1


def _zsd_horizon(prices, short_price, threshold):
    """
    Zone counts the short-distance conditions have to look at

    A constant tail repeats every pattern within the exhaustive horizon and
    2K + 2. A growing affine tail always breaks conditions 2 and 3; the first
    break lies no later than where P passes 2 P_S and P(1) + P_S.
    """
    k_max = max(prices.horizon(), prices.exhaustive_horizon())
    if threshold == math.inf:
        return k_max
    k_max = max(k_max, 2 * threshold + 2)
    if prices.tail is TailRule.AFFINE and prices.slope > 0:
        for bound in (2 * short_price, prices(1) + short_price):
            k_max = max(k_max, _first_above(prices, bound))
    return k_max


def _chain(zone_lists, lengths=None, virtual=()):
    """Path PTN x1..xn whose i-th node gets zone_lists[i]"""
    ids = [f"x{i}" for i in range(1, len(zone_lists) + 1)]
    nodes = [Node(v, NodeKind.VIRTUAL if i in virtual else NodeKind.STATION) for i, v in enumerate(ids)]
    lengths = lengths or [1] * (len(ids) - 1)
    edges = [Edge(a, b, length) for a, b, length in zip(ids, ids[1:], lengths)]
    assignment = {v: set(zs) for v, zs in zip(ids, zone_lists)}
    return Ptn(nodes, edges), assignment


def _zone_chain(count, metropolitan_spur=False):
    ptn, assignment = _chain([{f"Z{i}"} for i in range(1, count + 1)])
    if not metropolitan_spur:
        return ptn, ZoneStructure(assignment)
    # station m in the only metropolitan zone, hanging off x1
    spur = Ptn(list(ptn.nodes) + [Node("m")], list(ptn.edges) + [Edge("x1", "m")])
    assignment["m"] = {"M"}
    return spur, ZoneStructure(assignment, metropolitan=["M"])


def _metropolitan_chain(d, k):
    ptn, assignment = _chain([{f"Z{i}"} for i in range(1, d + k + 1)])
    return ptn, ZoneStructure(assignment, metropolitan=[f"Z{i}" for i in range(1, d + 1)])


def _overlap_chain(k1, k2):
    zone_lists = [{f"L{i}"} for i in range(1, k1 + 1)]
    zone_lists.append({f"L{k1}", "R1"})
    zone_lists.extend({f"R{j}"} for j in range(1, k2 + 1))
    ptn, assignment = _chain(zone_lists)
    return ptn, ZoneStructure(assignment)


def _leg(first_zone, zone_count, edges):
    """Zone indices of the nodes of one leg: step through zone_count zones, then stay"""
    return [first_zone + min(j, zone_count - 1) for j in range(edges + 1)]


def _two_leg_gadget(a, b, edges1, edges2, length1, length2):
    """
    x1 -- x2 -- x3 where the first leg visits a zones and the second b zones

    The legs share the zone of their middle station; inner nodes are virtual.
    """
    leg1 = _leg(1, a, edges1)
    leg2 = _leg(a, b, edges2)
    indices = leg1 + leg2[1:]
    lengths = [Fraction(length1) / edges1] * edges1 + [Fraction(length2) / edges2] * edges2
    inner = set(range(1, edges1)) | set(range(edges1 + 1, edges1 + edges2))
    ptn, assignment = _chain([{f"Z{i}"} for i in indices], lengths, inner)
    return ptn, ZoneStructure(assignment)


def _fewest_edges(zone_count):
    """A leg through zone_count zones needs this many edges"""
    return max(zone_count - 1, 1)


def _zsd_splits(witness, prices, short_price, threshold):
    """Candidate (a, b) zone counts of the two legs, most promising first"""
    condition, k = witness["condition"], witness["k"]
    if condition == 1:
        yield witness["i"], k - witness["i"] + 1
    elif condition == 2:
        # balanced legs need the fewest stations each
        for a in sorted(range(1, k + 1), key=lambda a: (abs(2 * a - k - 1), a)):
            yield a, k - a + 1
    else:
        yield witness["i"], k - witness["i"] + 1
        k_max = _zsd_horizon(prices, short_price, threshold)
        for total, i in _zsd_failures(condition, prices, short_price, threshold, k_max):
            yield i, total - i + 1


def _zsd_plan(condition, a, b, S, L, K):
    """
    Edge counts and leg lengths that make the split (a, b) a violation

    Returns:
        (edges1, edges2, length1, length2), or None when the station bound
        leaves no room for the legs
    """
    e1, e2 = _fewest_edges(a), _fewest_edges(b)

    def fits(edges):
        return S is None or edges <= S

    if condition == 1:
        # nothing is short, the zone prices decide
        if L is not None:
            return e1, e2, L + 1, L + 1
        return max(e1, S + 1), max(e2, S + 1), 1, 1
    if condition == 2:
        # both legs at most P_S, the whole walk too long for a short ticket
        if any(z > K and not fits(e) for z, e in ((a, e1), (b, e2))):
            return None
        if L is not None:
            return e1, e2, L, L
        edges = [S if z > K else max(e, S + 1) for z, e in ((a, e1), (b, e2))]
        return edges[0], edges[1], 1, 1
    if condition == 3:
        # only the second leg is short
        if not fits(e2):
            return None
        if L is not None:
            return e1, e2, L + 1, L
        return max(e1, S + 1), e2, 1, 1
    # condition 4: the whole walk is short
    if not fits(e1 + e2):
        return None
    half = Fraction(L) / 2 if L is not None else 1
    return e1, e2, half, half


def _zsd_gadget(witness, prices, short_price, max_stations, max_length):
    condition = witness.get("condition")
    if condition not in (1, 2, 3, 4):
        raise UnsupportedInstanceError(f"unknown short-distance condition {condition!r}")
    if max_stations is None and max_length is None:
        raise ConfigurationError("short-distance tariff needs a station or a length bound")
    threshold = zsd_threshold(prices, short_price)
    for a, b in _zsd_splits(witness, prices, short_price, threshold):
        plan = _zsd_plan(condition, a, b, max_stations, max_length, threshold)
        if plan is not None:
            return _two_leg_gadget(a, b, *plan)
    raise UnsupportedInstanceError("station bound too small to place the zones of the counterexample")


def gadget_from_violation(kind, witness, **params):
    """
    Counterexample network for a violated condition

    Args:
        kind: "eq2", "no_double", "metropolitan", "zoa_subadd" or "zsd_cond"
        witness: Witness of the violated condition (k, i, d, k1, k2, condition)
        **params: For "eq2" metropolitan_spur=True adds a metropolitan station
            so metropolitan tariffs can price the chain; for "metropolitan" the
            distance d when the witness lacks it;
            for "zsd_cond" the fare parameters prices, short_price,
            max_stations and max_length

    Returns:
        (Ptn, ZoneStructure) on which check_no_stopover finds a violation
    """
    if kind in ("eq2", "no_double"):
        return _zone_chain(witness["k"], params.get("metropolitan_spur", False))
    if kind == "metropolitan":
        d = witness.get("d", params.get("d"))
        return _metropolitan_chain(d, witness["k"])
    if kind == "zoa_subadd":
        return _overlap_chain(witness["k1"], witness["k2"])
    if kind == "zsd_cond":
        max_length = params.get("max_length")
        if max_length is not None:
            max_length = to_number(max_length)
        short_price = to_number(params["short_price"])
        return _zsd_gadget(witness, params["prices"], short_price, params.get("max_stations"), max_length)
    raise UnsupportedInstanceError(f"unknown gadget kind {kind!r}")


def brute_force_mcsip(inst):
    """
    Fewest colors on a simple x-y path, by enumeration

    Returns:
        (number of colors, node path), or (None, None) when y is unreachable
    """
    graph = nx.Graph()
    graph.add_nodes_from(inst.nodes)
    color = {}
    for u, v, c in inst.edges:
        graph.add_edge(u, v)
        color[frozenset((u, v))] = c
    best = (None, None)
    for path in nx.all_simple_paths(graph, inst.source, inst.target):
        used = len({color[frozenset(e)] for e in zip(path, path[1:])})
        if best[0] is None or used < best[0]:
            best = (used, tuple(path))
    return best
