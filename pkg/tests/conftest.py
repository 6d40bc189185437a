import os
import random
from pathlib import Path

import hypothesis
import pytest

from faregraph.instance import load_instance, load_mcsip
from faregraph.ptn_core import Edge, Node, Ptn, ZoneStructure

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=25, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name):
    return FIXTURES / f"{name}.json"


@pytest.fixture
def load():
    """Load a golden instance by file stem"""
    return lambda name: load_instance(fixture_path(name))


@pytest.fixture
def load_colored():
    return lambda name: load_mcsip(fixture_path(name))


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def triangle():
    """x1 - x2 - x3 - x1 with unit lengths"""
    nodes = [Node("x1"), Node("x2"), Node("x3")]
    edges = [Edge("x1", "x2"), Edge("x2", "x3"), Edge("x3", "x1")]
    return Ptn(nodes, edges)


@pytest.fixture
def triangle_zones():
    return ZoneStructure({"x1": {"A"}, "x2": {"A"}, "x3": {"B"}})
