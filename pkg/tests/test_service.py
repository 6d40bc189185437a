import json
from pathlib import Path

import pytest

from faregraph.config import Settings
from faregraph.service import create_app

FIXTURES = Path(__file__).parent / "fixtures"


def _document(name):
    return json.loads((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))


@pytest.fixture
def client():
    app = create_app(Settings(budget_edges=4, service_name="fare-service-test", service_port=9010))
    app.config["TESTING"] = True
    return app.test_client()


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.get_json() == {"service": "fare-service-test", "status": "healthy", "port": 9010}


def test_price(client):
    body = {"instance": _document("example_network"), "walk": ["x1", "x2", "x3", "x7", "x6"]}
    response = client.post("/price", json=body)
    assert response.status_code == 200
    assert response.get_json() == {
        "walk": ["x1", "x2", "x3", "x7", "x6"],
        "price": 3,
        "provenance": "basic_zone",
    }


def test_price_overlap_assignment(client):
    body = {"instance": _document("overlap_zones"), "walk": ["x1", "x2", "x5"]}
    data = client.post("/price", json=body).get_json()
    assert data["assignment"] == ["L", "L", "R"]
    assert data["zone_count"] == 2


@pytest.mark.parametrize(
    "walk, status",
    [(["x1", "x6"], 422), (["x1", "nowhere"], 404)],
)
def test_price_bad_walks(client, walk, status):
    response = client.post("/price", json={"instance": _document("example_network"), "walk": walk})
    assert response.status_code == status
    assert "error" in response.get_json()


def test_price_needs_walk(client):
    response = client.post("/price", json={"instance": _document("example_network")})
    assert response.status_code == 400
    assert "walk" in response.get_json()["error"]


@pytest.mark.parametrize("path", ["/price", "/route", "/audit", "/reduce"])
def test_missing_body(client, path):
    response = client.post(path)
    assert response.status_code == 400
    assert response.get_json() == {"error": "Missing request body"}


def test_route(client):
    body = {"instance": _document("example_network"), "from": "x1", "to": "x6"}
    data = client.post("/route", json=body).get_json()
    assert data["route"]["walk"] == ["x1", "x2", "x3", "x5", "x6"]
    assert data["route"]["price"] == 3
    assert "ticket" not in data


def test_route_with_ticket(client):
    body = {"instance": _document("metropolitan_chain"), "from": "x1", "to": "x6", "ticket": True}
    data = client.post("/route", json=body).get_json()
    assert data["route"]["price"] == 6
    assert data["ticket"]["price"] == 4


def test_route_errors(client):
    response = client.post("/route", json={"instance": _document("example_network"), "from": "x1"})
    assert response.status_code == 400
    response = client.post("/route", json={"instance": _document("example_network"), "from": "x1", "to": "x0"})
    assert response.status_code == 404


def test_route_rejects_malformed_instance(client):
    response = client.post("/route", json={"instance": {"ptn": {}}, "from": "a", "to": "b"})
    assert response.status_code == 400


def test_audit(client):
    data = client.post("/audit", json={"instance": _document("zone_chain")}).get_json()
    assert data["instance"] == "zone-chain"
    assert [p["verdict"] for p in data["properties"]] == ["PASS", "PASS"]
    assert data["properties"][0]["budget"]["max_edges"] == 4
    assert data["conditions"][0] == {"condition": "eq2", "holds": True, "witness": None}


def test_audit_budget_overrides(client):
    body = {"instance": _document("zone_chain"), "budget": {"max_edges": 2, "max_segments": 2}}
    data = client.post("/audit", json=body).get_json()
    budget = data["properties"][0]["budget"]
    assert (budget["max_edges"], budget["max_segments"]) == (2, 2)


def test_audit_bad_budget(client):
    body = {"instance": _document("zone_chain"), "budget": {"max_edges": 0}}
    response = client.post("/audit", json=body)
    assert response.status_code == 422


def test_reduce(client):
    data = client.post("/reduce", json={"mcsip": _document("mcsip_single_edge")}).get_json()
    assert data["K"] == 2
    assert data["instance"]["fare"]["type"] == "no_double_counting"


def test_reduce_bad_instance(client):
    response = client.post("/reduce", json={"mcsip": {"nodes": ["s"], "edges": []}})
    assert response.status_code == 400
