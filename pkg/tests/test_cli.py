import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from faregraph.cli import main
from faregraph.instance import load_instance


runner = CliRunner()
FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name):
    return FIXTURES / f"{name}.json"


def invoke(*args):
    return runner.invoke(main, [str(a) for a in args])


def test_help_lists_commands():
    result = invoke("--help")
    assert result.exit_code == 0
    for command in ("price", "route", "audit", "reduce", "generate"):
        assert command in result.output


def test_price_query_walk():
    result = invoke("price", fixture_path("example_network"))
    assert result.exit_code == 0
    assert "walk: (x1, x2, x3, x7, x6)" in result.stdout
    assert "price: 3 (basic_zone)" in result.stdout


def test_price_given_walk_as_json():
    result = invoke("--json", "price", fixture_path("example_network"), "x1", "x2")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report == {"walk": ["x1", "x2"], "price": 1, "provenance": "basic_zone"}


def test_price_lifts_walks_through_empty_zones():
    result = invoke("--json", "price", fixture_path("empty_zone_edge"), "x1", "x3")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert len(report["walk"]) == 3
    assert report["price"] == 3


def test_price_reports_zone_assignment():
    result = invoke("price", fixture_path("overlap_zones"))
    assert result.exit_code == 0
    assert "zones: (L, L, L, R, R, R) (2)" in result.stdout


def test_price_without_walk_is_a_usage_error():
    result = invoke("price", fixture_path("metropolitan_ring"))
    assert result.exit_code == 2
    assert "no walk given" in result.output


def test_price_invalid_walk():
    result = invoke("price", fixture_path("example_network"), "x1", "x6")
    assert result.exit_code == 3
    assert "Error:" in result.output


def test_route_query_endpoints():
    result = invoke("route", fixture_path("example_network"))
    assert result.exit_code == 0
    assert "path: (x1, x2, x3, x5, x6)" in result.stdout
    assert "price: 3 (basic_zone)" in result.stdout


def test_route_unknown_endpoint():
    result = invoke("route", fixture_path("example_network"), "x1", "nowhere")
    assert result.exit_code == 3
    assert "Error:" in result.output


def test_route_ticket_is_standard_when_properties_hold():
    result = invoke("--budget-edges", 3, "route", fixture_path("example_network"), "--ticket")
    assert result.exit_code == 0
    assert "ticket (standard): price 3" in result.stdout
    assert "  segment (x1, x2, x3, x5, x6)" in result.stdout


def test_route_ticket_comes_from_oracle_when_stopover_pays():
    result = invoke("--json", "--budget-edges", 5, "route", fixture_path("metropolitan_chain"), "--ticket")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["route"]["price"] == 6
    assert report["ticket"]["price"] == 4
    assert report["ticket"]["source"].startswith("oracle")
    assert len(report["ticket"]["segments"]) == 2


def test_audit_text():
    result = invoke("audit", fixture_path("zone_chain"))
    assert result.exit_code == 0
    assert "no_stopover: PASS" in result.stdout
    assert "no_elongation: PASS" in result.stdout
    assert "condition eq2: holds" in result.stdout


def test_audit_metropolitan_failure_as_json():
    result = invoke("--json", "--budget-edges", 5, "audit", fixture_path("metropolitan_chain"))
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["fare"] == "metropolitan"
    verdicts = {p["property"]: p["verdict"] for p in report["properties"]}
    assert verdicts["no_stopover"] == "FAIL"
    assert report["diagnostics"]["d_max"] == 5
    failing = {c["condition"]: c for c in report["conditions"] if not c["holds"]}
    assert failing["metropolitan"]["witness"] == {"d": 5, "k": 1}
    gadget = failing["metropolitan"]["gadget"]
    assert gadget["kind"] == "metropolitan"
    assert gadget["no_stopover"]["verdict"] == "FAIL"


def test_audit_seed_is_recorded():
    result = invoke("--json", "--seed", 11, "audit", fixture_path("zone_chain"))
    report = json.loads(result.stdout)
    assert {p["seed"] for p in report["properties"]} == {11}


def test_reduce_prints_instance():
    result = invoke("reduce", fixture_path("mcsip_single_edge"))
    assert result.exit_code == 0
    first, rest = result.stdout.split("\n", 1)
    assert first == "K: 2"
    assert json.loads(rest)["query"]["max_zones"] == 2


def test_reduce_writes_output(tmp_path):
    target = tmp_path / "reduced.json"
    result = invoke("reduce", fixture_path("mcsip_single_edge"), "--output", target)
    assert result.exit_code == 0
    assert result.stdout.strip() == "K: 2"
    document = load_instance(target)
    assert document.query.max_zones == 2
    assert len(document.ptn.nodes) == 3


def test_parse_error_exit_code(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"ptn": ', encoding="utf-8")
    result = invoke("price", broken, "a")
    assert result.exit_code == 2
    assert "Error:" in result.output


def test_bad_budget_is_a_configuration_error():
    result = invoke("--budget-edges", 0, "audit", fixture_path("zone_chain"))
    assert result.exit_code == 3
    assert "budget_edges must be positive" in result.output


@pytest.mark.parametrize("env, expected", [({"FAREGRAPH_SEED": "5"}, 5), ({}, 0)])
def test_seed_from_environment(monkeypatch, env, expected):
    monkeypatch.delenv("FAREGRAPH_SEED", raising=False)
    for key, value in env.items():
        monkeypatch.setenv(key, value)
    result = invoke("--json", "audit", fixture_path("zone_chain"))
    report = json.loads(result.stdout)
    assert report["properties"][0]["seed"] == expected


def test_generate_is_reproducible():
    first = invoke("--seed", 3, "generate", "--nodes", 5)
    second = invoke("--seed", 3, "generate", "--nodes", 5)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    document = json.loads(first.stdout)
    assert document["name"] == "random-basic_zone-3"
    assert len(document["ptn"]["nodes"]) == 5
    assert document["fare"]["type"] == "basic_zone"
    assert document["query"]["from"] != document["query"]["to"]


def test_generated_instance_can_be_routed(tmp_path):
    target = tmp_path / "random.json"
    result = invoke("--seed", 8, "generate", "--fare", "overlap_zone", "--output", target)
    assert result.exit_code == 0
    assert "wrote random-overlap_zone-8" in result.stdout
    routed = invoke("route", target)
    assert routed.exit_code == 0
    assert routed.stdout.startswith("path: (")


def test_generate_rejects_unknown_fare():
    result = invoke("generate", "--fare", "spiral")
    assert result.exit_code == 2
