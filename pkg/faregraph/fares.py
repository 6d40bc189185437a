"""
Fares module
Price functions and the fare systems that map a walk to a price
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Tuple

from faregraph.errors import ConfigurationError
from faregraph.ptn_core import (
    Number,
    beeline_distance,
    require_walk,
    station_count,
    to_number,
    walk_length,
)

logger = logging.getLogger(__name__)


def format_number(value):
    """Decimal literal for a number; non-terminating fractions print as p/q"""
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return repr(value)
    value = to_number(value)
    if isinstance(value, int):
        return str(value)
    denominator = value.denominator
    while denominator % 2 == 0:
        denominator //= 2
    while denominator % 5 == 0:
        denominator //= 5
    if denominator == 1:
        text = format(Decimal(value.numerator) / Decimal(value.denominator), "f")
        return text.rstrip("0").rstrip(".") if "." in text else text
    return f"{value.numerator}/{value.denominator}"


@total_ordering
class Price:
    """Nonnegative price on the extended reals; Price.INFINITY absorbs addition"""

    __slots__ = ("_amount",)

    def __init__(self, amount=None):
        """
        Args:
            amount: Nonnegative number, or None for the infinite price
        """
        if amount is not None:
            if isinstance(amount, Price):
                amount = amount._amount
            elif isinstance(amount, float):
                if math.isinf(amount):
                    amount = None
            else:
                amount = to_number(amount)
            if amount is not None and amount < 0:
                raise ConfigurationError(f"negative price {amount}")
        object.__setattr__(self, "_amount", amount)

    def __setattr__(self, name, value):
        raise AttributeError("Price is immutable")

    @classmethod
    def of(cls, amount):
        return amount if isinstance(amount, Price) else cls(amount)

    @property
    def is_infinite(self):
        return self._amount is None

    @property
    def amount(self):
        """The finite amount, or math.inf"""
        return math.inf if self._amount is None else self._amount

    def __add__(self, other):
        other = Price.of(other)
        if self.is_infinite or other.is_infinite:
            return Price.INFINITY
        return Price(self._amount + other._amount)

    __radd__ = __add__

    def __eq__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = Price(other)
        if not isinstance(other, Price):
            return NotImplemented
        return self.amount == other.amount

    def __lt__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = Price(other)
        if not isinstance(other, Price):
            return NotImplemented
        return self.amount < other.amount

    def __hash__(self):
        return hash(self.amount)

    def __repr__(self):
        return f"Price({self})"

    def __str__(self):
        return "inf" if self.is_infinite else format_number(self._amount)

    def to_json(self):
        if self.is_infinite:
            return "inf"
        amount = self._amount
        if isinstance(amount, int):
            return amount
        return format_number(amount)


Price.INFINITY = Price(None)
Price.ZERO = Price(0)


class TailRule(str, Enum):
    CONSTANT = "constant"
    AFFINE = "affine"


@dataclass(frozen=True)
class PriceFunction:
    """
    Zone price P(k) for k >= 1: a finite table P(1..m) plus a tail rule

    P(0) is 0. Beyond the table the constant tail repeats P(m); the affine
    tail continues with P(m) + (k - m) * slope.
    """

    table: Tuple[Number, ...]
    tail: TailRule = TailRule.CONSTANT
    slope: Number = 0

    def __post_init__(self):
        table = tuple(to_number(p) for p in self.table)
        if not table:
            raise ConfigurationError("price table is empty")
        if any(p < 0 for p in table):
            raise ConfigurationError("price table has negative entries")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "tail", TailRule(self.tail))
        slope = to_number(self.slope)
        if slope < 0:
            raise ConfigurationError("tail slope must be nonnegative")
        if self.tail is TailRule.CONSTANT and slope != 0:
            raise ConfigurationError("a constant tail has no slope")
        object.__setattr__(self, "slope", slope)

    @classmethod
    def linear(cls, length=6):
        """P(k) = k"""
        return cls(tuple(range(1, length + 1)), TailRule.AFFINE, 1)

    @classmethod
    def affine(cls, base, per_zone, length=6):
        """P(k) = base + k * per_zone"""
        base, per_zone = to_number(base), to_number(per_zone)
        return cls(tuple(base + k * per_zone for k in range(1, length + 1)), TailRule.AFFINE, per_zone)

    @classmethod
    def constant(cls, value):
        return cls((value,))

    def __call__(self, k):
        if k < 0:
            raise ValueError(f"zone count must be nonnegative, got {k}")
        if k == 0:
            return 0
        m = len(self.table)
        if k <= m:
            return self.table[k - 1]
        if self.tail is TailRule.CONSTANT:
            return self.table[-1]
        return self.table[-1] + (k - m) * self.slope

    def horizon(self):
        """Default horizon k_max for condition checks: table length + 3"""
        return len(self.table) + 3

    def exhaustive_horizon(self):
        """
        Horizon from which the conditions repeat along the tail

        On a constant or affine tail every inequality used here between
        P(a), P(b) and P(a + b) or P(a + b - 1) only depends on which operands
        lie in the table, and every such pattern occurs for k <= 2m + 1.
        """
        return 2 * len(self.table) + 1

    def _span(self, k_max):
        return max(k_max or self.horizon(), self.exhaustive_horizon())

    def is_increasing(self, k_max=None):
        """P(k) <= P(k+1) for all k; the tail is increasing by construction"""
        limit = max(k_max or self.horizon(), len(self.table) + 1)
        return all(self(k) <= self(k + 1) for k in range(1, limit))

    def is_strictly_increasing(self, k_max=None):
        limit = max(k_max or self.horizon(), len(self.table) + 1)
        return all(self(k) < self(k + 1) for k in range(1, limit))

    def is_subadditive(self, k_max=None):
        """P(a + b) <= P(a) + P(b) for all a, b >= 1"""
        limit = self._span(k_max)
        return all(
            self(a + b) <= self(a) + self(b)
            for a in range(1, limit)
            for b in range(1, limit - a + 1)
        )

    def is_border_subadditive(self, k_max=None):
        """P(k) <= P(i) + P(k - i + 1), i.e. the zone border price P~ is subadditive"""
        return self.border_price_function().is_subadditive(k_max)

    def border_price_function(self):
        """P~(k) = P(k + 1), the price per number of crossed zone borders"""
        m = len(self.table)
        if m == 1:
            return PriceFunction((self(2),), self.tail, self.slope)
        return PriceFunction(self.table[1:], self.tail, self.slope)

    def to_dict(self):
        data = {"prices": [_json_number(p) for p in self.table], "tail": self.tail.value}
        if self.tail is TailRule.AFFINE:
            data["slope"] = _json_number(self.slope)
        return data


def _json_number(value):
    value = to_number(value)
    return value if isinstance(value, int) else format_number(value)


def _bound_to_json(bound):
    return "inf" if bound is None else _json_number(bound)


class FareSystem(ABC):
    """A tariff assigning a price to every walk"""

    name = "fare"
    needs_zones = False

    @abstractmethod
    def price(self, ptn, zones, w):
        """Price of a walk that is already known to be valid"""

    def price_with_provenance(self, ptn, zones, w):
        return self.price(ptn, zones, w), self.name

    @abstractmethod
    def to_dict(self):
        """Fare block as written to instance files"""

    def _zones(self, zones):
        if zones is None:
            raise ConfigurationError(f"{self.name} needs a zone structure")
        return zones


@dataclass(frozen=True)
class DistanceTariff(FareSystem):
    base: Number = 0
    per_km: Number = 1
    name = "distance"

    def __post_init__(self):
        _check_nonnegative(self, "base", "per_km")

    def price(self, ptn, zones, w):
        return Price(self.base + self.per_km * walk_length(ptn, w))

    def to_dict(self):
        return {"type": self.name, "base": _json_number(self.base), "per_km": _json_number(self.per_km)}


@dataclass(frozen=True)
class BeelineTariff(FareSystem):
    base: Number = 0
    per_km: Number = 1
    name = "beeline"

    def __post_init__(self):
        _check_nonnegative(self, "base", "per_km")

    def price(self, ptn, zones, w):
        distance = beeline_distance(ptn, w)
        if distance == 0:
            return Price(self.base)
        return Price(self.base + float(self.per_km) * distance)

    def to_dict(self):
        return {"type": self.name, "base": _json_number(self.base), "per_km": _json_number(self.per_km)}


@dataclass(frozen=True)
class FlatTariff(FareSystem):
    amount: Number = 1
    name = "flat"

    def __post_init__(self):
        _check_nonnegative(self, "amount")

    def price(self, ptn, zones, w):
        return Price(self.amount)

    def to_dict(self):
        return {"type": self.name, "price": _json_number(self.amount)}


@dataclass(frozen=True)
class BasicZoneTariff(FareSystem):
    prices: PriceFunction
    name = "basic_zone"
    needs_zones = True

    def price(self, ptn, zones, w):
        return Price(self.prices(zone_count_basic(ptn, self._zones(zones), w)))

    def to_dict(self):
        return {"type": self.name, **self.prices.to_dict()}


@dataclass(frozen=True)
class MetropolitanZoneTariff(FareSystem):
    prices: PriceFunction
    metropolitan_price: Number
    name = "metropolitan"
    needs_zones = True

    def __post_init__(self):
        _check_nonnegative(self, "metropolitan_price")

    def price(self, ptn, zones, w):
        return price_metropolitan(self.prices, self.metropolitan_price, ptn, self._zones(zones), w)

    def to_dict(self):
        return {
            "type": self.name,
            **self.prices.to_dict(),
            "metropolitan_price": _json_number(self.metropolitan_price),
        }


@dataclass(frozen=True)
class OverlapZoneTariff(FareSystem):
    prices: PriceFunction
    name = "overlap_zone"
    needs_zones = True

    def price(self, ptn, zones, w):
        return Price(self.prices(zone_count_zoa(ptn, self._zones(zones), w)))

    def to_dict(self):
        return {"type": self.name, **self.prices.to_dict()}


@dataclass(frozen=True)
class NoDoubleCountingZoneTariff(FareSystem):
    prices: PriceFunction
    name = "no_double_counting"
    needs_zones = True

    def price(self, ptn, zones, w):
        return Price(self.prices(zone_count_no_double(ptn, self._zones(zones), w)))

    def to_dict(self):
        return {"type": self.name, **self.prices.to_dict()}


@dataclass(frozen=True)
class ShortDistanceTariff(FareSystem):
    """P_S for walks with at most max_stations edges and length at most max_length, else infinite"""

    amount: Number
    max_stations: Optional[int] = None
    max_length: Optional[Number] = None
    name = "short_distance"

    def __post_init__(self):
        _check_nonnegative(self, "amount")
        if self.max_stations is None and self.max_length is None:
            raise ConfigurationError("short-distance tariff needs a station or a length bound")
        if self.max_stations is not None and self.max_stations < 0:
            raise ConfigurationError("max_stations must be nonnegative")
        if self.max_length is not None:
            length = to_number(self.max_length)
            if length <= 0:
                raise ConfigurationError("max_length must be positive")
            object.__setattr__(self, "max_length", length)

    def price(self, ptn, zones, w):
        return price_short_distance(self.amount, self.max_stations, self.max_length, ptn, w)

    def is_short(self, ptn, w):
        return is_short_distance(self.max_stations, self.max_length, ptn, w)

    def to_dict(self):
        return {
            "type": self.name,
            "price": _json_number(self.amount),
            "max_stations": _bound_to_json(self.max_stations),
            "max_length": _bound_to_json(self.max_length),
        }


@dataclass(frozen=True)
class CombinedFareSystem(FareSystem):
    """Passengers pay the cheaper of the two children; ties go to the left child"""

    left: FareSystem
    right: FareSystem
    name = "combined"

    @property
    def needs_zones(self):
        return self.left.needs_zones or self.right.needs_zones

    def price(self, ptn, zones, w):
        return self.price_with_provenance(ptn, zones, w)[0]

    def price_with_provenance(self, ptn, zones, w):
        left = self.left.price_with_provenance(ptn, zones, w)
        right = self.right.price_with_provenance(ptn, zones, w)
        return right if right[0] < left[0] else left

    def to_dict(self):
        return {"type": self.name, "left": self.left.to_dict(), "right": self.right.to_dict()}


def bounded_distance(base, per_km, cap):
    """Distance tariff whose price never exceeds a flat cap"""
    return CombinedFareSystem(DistanceTariff(base, per_km), FlatTariff(cap))


def zsd(prices, short_price, max_stations=None, max_length=None):
    """Basic zone tariff combined with a short-distance tariff"""
    return CombinedFareSystem(
        BasicZoneTariff(prices),
        ShortDistanceTariff(short_price, max_stations, max_length),
    )


def zsd_parts(fs):
    """(BasicZoneTariff, ShortDistanceTariff) if fs is a ZSD combination, else None"""
    if not isinstance(fs, CombinedFareSystem):
        return None
    left, right = fs.left, fs.right
    if isinstance(left, BasicZoneTariff) and isinstance(right, ShortDistanceTariff):
        return left, right
    if isinstance(right, BasicZoneTariff) and isinstance(left, ShortDistanceTariff):
        return right, left
    return None


def _check_nonnegative(obj, *names):
    for name in names:
        value = to_number(getattr(obj, name))
        if value < 0:
            raise ConfigurationError(f"{name} must be nonnegative, got {value}")
        object.__setattr__(obj, name, value)


def price(fs, ptn, zones, w):
    """
    Price of a walk under a fare system

    Args:
        fs: FareSystem
        ptn: Ptn
        zones: ZoneStructure, or None for fare systems without zones
        w: Walk

    Returns:
        Price
    """
    require_walk(ptn, w)
    return fs.price(ptn, zones, w)


def price_with_provenance(fs, ptn, zones, w):
    """(Price, name of the variant that priced the walk)"""
    require_walk(ptn, w)
    return fs.price_with_provenance(ptn, zones, w)


def ticket_price(fs, ptn, zones, ticket):
    """Sum of the segment prices"""
    return sum((price(fs, ptn, zones, h) for h in ticket.segments), Price.ZERO)


def zone_border_weight(zones, u, v):
    """b(u, v) on a partition: 0 inside a zone, 1 across a border"""
    return 0 if zones.zone_of(u) == zones.zone_of(v) else 1


def zone_count_basic(ptn, zones, w):
    """1 + number of zone borders crossed, counted with multiplicity"""
    zones.require_partition("basic zone count")
    return 1 + sum(zone_border_weight(zones, a, b) for a, b in w.edges)


def price_metropolitan(prices, metropolitan_price, ptn, zones, w):
    zones.require_partition("metropolitan zone tariff")
    metro = zones.require_metropolitan()
    if all(zones.zone_of(v) in metro for v in w):
        return Price(metropolitan_price)
    return Price(prices(zone_count_basic(ptn, zones, w)))


def zone_count_zoa(ptn, zones, w):
    """Zone count with overlap areas, using the cheapest per-visit assignment"""
    from faregraph.overlaps import minimal_assignment

    return minimal_assignment(ptn, zones, w)[1]


def zone_count_no_double(ptn, zones, w):
    """Number of different zones visited"""
    zones.require_partition("no-double-counting zone count")
    return len({zones.zone_of(v) for v in w})


def is_short_distance(max_stations, max_length, ptn, w):
    if max_stations is not None and station_count(w) > max_stations:
        return False
    if max_length is not None and walk_length(ptn, w) > max_length:
        return False
    return True


def price_short_distance(short_price, max_stations, max_length, ptn, w):
    if is_short_distance(max_stations, max_length, ptn, w):
        return Price(short_price)
    return Price.INFINITY


def zsd_threshold(prices, short_price):
    """
    K with P(K) <= P_S < P(K + 1), where P(0) = 0

    Returns:
        int, or math.inf when P never exceeds P_S
    """
    if not prices.is_increasing():
        raise ConfigurationError("the short-distance threshold needs an increasing price function")
    short_price = to_number(short_price)
    m = len(prices.table)
    k = 0
    while k <= m and prices(k + 1) <= short_price:
        k += 1
    if k <= m:
        return k
    # beyond the table: constant tail never grows, affine tail grows by slope
    if prices.slope == 0:
        return math.inf
    return m + math.floor((short_price - prices.table[-1]) / Fraction(prices.slope))


def price_zsd(prices, short_price, max_stations, max_length, ptn, zones, w):
    """ZSD price in the threshold form: P_S only pays off above K zones"""
    zones.require_partition("zone tariff with short-distance tickets")
    z = zone_count_basic(ptn, zones, w)
    if z > zsd_threshold(prices, short_price) and is_short_distance(max_stations, max_length, ptn, w):
        return Price(short_price)
    return Price(prices(z))
