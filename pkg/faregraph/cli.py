"""
Command-line interface
price, route, audit, reduce and generate on single-file instances. The *_report
functions build the JSON-ready results shared with the HTTP service.
"""

import functools
import json
import logging
import sys
from dataclasses import replace

import click

from faregraph.config import configure_logging, get_settings
from faregraph.errors import FareGraphError, UnsupportedInstanceError
from faregraph.fares import (
    BasicZoneTariff,
    MetropolitanZoneTariff,
    NoDoubleCountingZoneTariff,
    OverlapZoneTariff,
    price_with_provenance,
    zsd_parts,
)
from faregraph.generators import GENERATED_FARES, PRICE_FAMILIES, random_document, rng_for
from faregraph.instance import dump_instance, load_instance, load_mcsip, network_dict, reduced_document
from faregraph.overlaps import minimal_assignment
from faregraph.ptn_core import Walk, disconnected_zones, lift_walk, validate_walk
from faregraph.routing import cheapest_path, compute_d_max
from faregraph.verify import (
    EnumBudget,
    brute_force_cheapest_ticket,
    check_no_elongation,
    check_no_stopover,
    condition_eq2,
    condition_increasing,
    condition_metropolitan,
    condition_no_elongation_metropolitan,
    condition_subadditive,
    condition_zsd,
    gadget_from_violation,
)

logger = logging.getLogger(__name__)

ORACLE_SOURCE = "oracle (budget-bounded)"


def resolve_walk(document, nodes):
    """
    Walk on the expanded PTN for a node list given by the user

    A walk over the network as written is lifted through the virtual nodes of
    subdivided edges; a walk that already names virtual nodes is used as is.
    """
    w = Walk(tuple(nodes))
    if document.ptn is not document.base_ptn and all(v in document.base_ptn for v in w):
        if validate_walk(document.base_ptn, w):
            return lift_walk(document.ptn, w)
    return w


def price_report(document, nodes):
    w = resolve_walk(document, nodes)
    amount, provenance = price_with_provenance(document.fare, document.ptn, document.zones, w)
    report = {"walk": list(w.nodes), "price": amount.to_json(), "provenance": provenance}
    if isinstance(document.fare, OverlapZoneTariff):
        assignment, z = minimal_assignment(document.ptn, document.zones, w)
        report["assignment"] = list(assignment)
        report["zone_count"] = z
    return report


def route_report(document, x, y, settings, ticket=False):
    """
    Cheapest path; with ticket=True the cheapest ticket

    The standard ticket of the cheapest path is a cheapest ticket when both
    no-stopover and no-elongation hold. Otherwise the ticket comes from the
    budget-bounded oracle.
    """
    fs, ptn, zones = document.fare, document.ptn, document.zones
    route = cheapest_path(
        fs, ptn, zones, x, y,
        compact=settings.compact,
        forbid_virtual_endpoints=settings.forbid_virtual_endpoints,
        state_limit=settings.state_limit,
    )
    report = {"route": route.to_dict()}
    if not ticket:
        return report

    budget = EnumBudget.from_settings(settings)
    forbid = settings.forbid_virtual_endpoints
    stopover = check_no_stopover(fs, ptn, zones, budget, forbid, settings.seed)
    elongation = check_no_elongation(fs, ptn, zones, budget, forbid, settings.seed)
    if stopover.holds and elongation.holds:
        best, amount, source = route.ticket(), route.price, "standard"
    else:
        logger.debug("Properties fail on %s; asking the ticket oracle", document.name)
        best, amount = brute_force_cheapest_ticket(fs, ptn, zones, x, y, budget, forbid)
        source = ORACLE_SOURCE
    report["ticket"] = {**best.to_dict(), "price": amount.to_json(), "source": source}
    return report


def _gadget_report(fs, kind, witness, budget, **params):
    try:
        ptn, zones = gadget_from_violation(kind, witness, **params)
    except UnsupportedInstanceError as e:
        return {"kind": kind, "error": str(e)}
    # gadgets are chains; their violating walk is the whole chain
    chain_budget = replace(budget, max_edges=max(budget.max_edges, len(ptn.edges)), simple_paths=True)
    violation = check_no_stopover(fs, ptn, zones, chain_budget)
    return {
        "kind": kind,
        **network_dict(ptn, zones),
        "no_stopover": violation.to_dict(),
    }


def _conditions(document, budget):
    """Closed-form conditions for the fare system, with a gadget per failure"""
    fs, ptn, zones = document.fare, document.ptn, document.zones
    conditions, diagnostics = [], {}

    def add(result, kind=None, **params):
        entry = result.to_dict()
        if not result.holds and kind is not None:
            entry["gadget"] = _gadget_report(fs, kind, result.witness, budget, **params)
        conditions.append(entry)

    if isinstance(fs, (BasicZoneTariff, NoDoubleCountingZoneTariff)):
        kind = "eq2" if isinstance(fs, BasicZoneTariff) else "no_double"
        add(condition_eq2(fs.prices, max(fs.prices.horizon(), 3)), kind)
    elif isinstance(fs, MetropolitanZoneTariff):
        add(condition_eq2(fs.prices, max(fs.prices.horizon(), 3)), "eq2", metropolitan_spur=True)
        add(condition_no_elongation_metropolitan(fs.prices, fs.metropolitan_price))
        try:
            d_max = compute_d_max(ptn, zones)
        except FareGraphError as e:
            diagnostics["d_max_error"] = str(e)
        else:
            diagnostics["d_max"] = d_max
            add(condition_metropolitan(fs.prices, fs.metropolitan_price, d_max), "metropolitan")
    elif isinstance(fs, OverlapZoneTariff):
        add(condition_increasing(fs.prices))
        add(condition_subadditive(fs.prices), "zoa_subadd")
    elif zsd_parts(fs) is not None:
        zone_fs, short_fs = zsd_parts(fs)
        try:
            report = condition_zsd(zone_fs.prices, short_fs.amount, short_fs.max_stations)
        except FareGraphError as e:
            diagnostics["threshold_error"] = str(e)
        else:
            threshold = report.to_dict()["threshold"]
            diagnostics["threshold"] = threshold
            for result in report.conditions:
                witness = result.witness
                if witness is not None:
                    witness = {**witness, "condition": int(result.name.rsplit("_", 1)[1])}
                entry = result.to_dict()
                entry["witness"] = witness
                if not result.holds:
                    entry["gadget"] = _gadget_report(
                        fs, "zsd_cond", witness, budget,
                        prices=zone_fs.prices,
                        short_price=short_fs.amount,
                        max_stations=short_fs.max_stations,
                        max_length=short_fs.max_length,
                    )
                conditions.append(entry)

    if zones is not None and zones.is_partition:
        diagnostics["disconnected_zones"] = disconnected_zones(ptn, zones)
    return conditions, diagnostics


def audit_report(document, settings):
    budget = EnumBudget.from_settings(settings)
    fs, ptn, zones = document.fare, document.ptn, document.zones
    forbid = settings.forbid_virtual_endpoints
    reports = [
        check_no_stopover(fs, ptn, zones, budget, forbid, settings.seed),
        check_no_elongation(fs, ptn, zones, budget, forbid, settings.seed),
    ]
    conditions, diagnostics = _conditions(document, budget)
    return {
        "instance": document.name,
        "fare": fs.name,
        "properties": [r.to_dict() for r in reports],
        "conditions": conditions,
        "diagnostics": diagnostics,
    }


def reduce_report(inst):
    document, max_zones = reduced_document(inst)
    return {"K": max_zones, "instance": document.to_dict()}


def handle_errors(command):
    """Map faregraph errors to their exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except FareGraphError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)

    return wrapper


def _emit(ctx, report, text_lines):
    if ctx.obj["json"]:
        click.echo(json.dumps(report, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


def _walk_text(nodes):
    return "(" + ", ".join(nodes) + ")"


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Print structured JSON instead of text.")
@click.option("--budget-edges", type=int, help="Longest walk the property checks enumerate.")
@click.option("--budget-segments", type=int, help="Most segments a ticket may have.")
@click.option("--seed", type=int, help="Seed recorded in every report.")
@click.option("--compact", is_flag=True, help="Compact overlaps-resolved graph.")
@click.option("--forbid-virtual-endpoints", is_flag=True, help="No ticket may start or end at a virtual node.")
@click.pass_context
def main(ctx, as_json, budget_edges, budget_segments, seed, compact, forbid_virtual_endpoints):
    """Price walks and find cheapest tickets in zone-based fare systems."""
    ctx.ensure_object(dict)
    try:
        settings = get_settings(
            budget_edges=budget_edges,
            budget_segments=budget_segments,
            seed=seed,
            compact=compact or None,
            forbid_virtual_endpoints=forbid_virtual_endpoints or None,
        )
    except FareGraphError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    configure_logging(settings)
    ctx.obj["settings"] = settings
    ctx.obj["json"] = as_json


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("walk", nargs=-1)
@click.pass_context
@handle_errors
def price(ctx, instance, walk):
    """Price WALK (node ids) in INSTANCE; defaults to the walk in the query section."""
    document = load_instance(instance)
    nodes = walk or (document.query.walk.nodes if document.query.walk is not None else ())
    if not nodes:
        raise click.UsageError("no walk given and the instance has no query walk")
    report = price_report(document, nodes)
    lines = [f"walk: {_walk_text(report['walk'])}", f"price: {report['price']} ({report['provenance']})"]
    if "assignment" in report:
        lines.append(f"zones: {_walk_text(report['assignment'])} ({report['zone_count']})")
    _emit(ctx, report, lines)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("source", required=False)
@click.argument("target", required=False)
@click.option("--ticket", is_flag=True, help="Find a cheapest ticket, not only a cheapest path.")
@click.pass_context
@handle_errors
def route(ctx, instance, source, target, ticket):
    """Cheapest path from SOURCE to TARGET; defaults to the query section."""
    document = load_instance(instance)
    source = source or document.query.source
    target = target or document.query.target
    if source is None or target is None:
        raise click.UsageError("no endpoints given and the instance has no query")
    report = route_report(document, source, target, ctx.obj["settings"], ticket)
    found = report["route"]
    lines = [f"path: {_walk_text(found['walk'])}", f"price: {found['price']} ({found['provenance']})"]
    if "assignment" in found:
        lines.append(f"zones: {_walk_text(found['assignment'])}")
    if "ticket" in report:
        bought = report["ticket"]
        lines.append(f"ticket ({bought['source']}): price {bought['price']}")
        lines.extend(f"  segment {_walk_text(h)}" for h in bought["segments"])
    _emit(ctx, report, lines)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@handle_errors
def audit(ctx, instance):
    """Check no-stopover and no-elongation, and evaluate the matching conditions."""
    document = load_instance(instance)
    report = audit_report(document, ctx.obj["settings"])
    lines = []
    for prop in report["properties"]:
        line = f"{prop['property']}: {prop['verdict']}"
        if prop["counterexample"] is not None:
            witness = prop["counterexample"]
            prices = ", ".join(str(p) for p in witness["prices"])
            line += f" on {_walk_text(witness['walk'])} [{prices}]"
        lines.append(line)
    for condition in report["conditions"]:
        line = f"condition {condition['condition']}: {'holds' if condition['holds'] else 'fails'}"
        if condition["witness"]:
            line += f" {condition['witness']}"
        lines.append(line)
        gadget = condition.get("gadget")
        if gadget is not None:
            if "error" in gadget:
                lines.append(f"  gadget: {gadget['error']}")
            else:
                found = gadget["no_stopover"]["counterexample"]
                where = _walk_text(found["walk"]) if found else "none within budget"
                lines.append(f"  gadget {gadget['kind']}: no_stopover violation {where}")
    for name, value in report["diagnostics"].items():
        lines.append(f"{name}: {value}")
    _emit(ctx, report, lines)


@main.command()
@click.argument("mcsip", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(dir_okay=False, writable=True), help="Write the reduced instance here.")
@click.pass_context
@handle_errors
def reduce(ctx, mcsip, output):
    """Reduce a minimum-color path instance to a minimum-zone instance."""
    report = reduce_report(load_mcsip(mcsip))
    text = json.dumps(report["instance"], indent=2)
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    if ctx.obj["json"]:
        click.echo(json.dumps(report, indent=2))
        return
    click.echo(f"K: {report['K']}")
    if not output:
        click.echo(text)


@main.command()
@click.option("--nodes", type=click.IntRange(min=2), default=6, show_default=True, help="Number of stations.")
@click.option("--zones", "n_zones", type=click.IntRange(min=1), default=3, show_default=True, help="Number of zones.")
@click.option("--fare", type=click.Choice(GENERATED_FARES), default="basic_zone", show_default=True)
@click.option("--family", type=click.Choice(PRICE_FAMILIES), default="monotone", show_default=True,
              help="Zone price family.")
@click.option("--extra-edges", type=click.IntRange(min=0), default=2, show_default=True,
              help="Edges added to the random spanning tree.")
@click.option("--output", type=click.Path(dir_okay=False, writable=True), help="Write the instance here.")
@click.pass_context
@handle_errors
def generate(ctx, nodes, n_zones, fare, family, extra_edges, output):
    """Draw a random instance from the seed."""
    seed = ctx.obj["settings"].seed
    document = random_document(
        rng_for(seed), nodes, n_zones, fare, family, extra_edges, name=f"random-{fare}-{seed}"
    )
    text = dump_instance(document, output)
    logger.debug("Generated %s with seed %s", document.name, seed)
    if output:
        click.echo(f"wrote {document.name} to {output}")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
