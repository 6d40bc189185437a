"""
faregraph
Zone-based fare systems on public transport networks: pricing, cheapest
paths and tickets, and checks for the no-stopover and no-elongation properties
"""

from faregraph.errors import FareGraphError
from faregraph.fares import Price, PriceFunction, price, ticket_price
from faregraph.ptn_core import Edge, Node, Ptn, Ticket, Walk, ZoneStructure
from faregraph.routing import cheapest_path, cheapest_standard_ticket

__all__ = [
    "Edge",
    "FareGraphError",
    "Node",
    "Price",
    "PriceFunction",
    "Ptn",
    "Ticket",
    "Walk",
    "ZoneStructure",
    "cheapest_path",
    "cheapest_standard_ticket",
    "price",
    "ticket_price",
]
