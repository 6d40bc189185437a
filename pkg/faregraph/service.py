"""
Fare Service
HTTP surface for pricing walks, cheapest routes, property audits and reductions
"""

import logging
import time

from flask import Flask, g, jsonify, request
from flask_cors import CORS

from faregraph.cli import audit_report, price_report, reduce_report, route_report
from faregraph.config import configure_logging, get_settings
from faregraph.errors import FareGraphError, InstanceParseError
from faregraph.instance import parse_instance, parse_mcsip

logger = logging.getLogger(__name__)


def _body():
    data = request.get_json(silent=True)
    if not data:
        return None
    return data


def _error(e):
    return jsonify({"error": str(e)}), e.http_status


def create_app(settings=None):
    """
    Build the Flask app

    Args:
        settings: Settings; read from the environment when omitted

    Returns:
        Flask app
    """
    settings = settings or get_settings()
    app = Flask(__name__)
    CORS(app)
    app.config["FAREGRAPH_SETTINGS"] = settings

    @app.route("/health", methods=["GET"])
    def health_check():
        """Health check endpoint"""
        return jsonify({
            "service": settings.service_name,
            "status": "healthy",
            "port": settings.service_port,
        })

    @app.route("/price", methods=["POST"])
    def price_walk():
        """Price one walk of the posted instance"""
        data = _body()
        if data is None:
            return jsonify({"error": "Missing request body"}), 400
        try:
            if "walk" not in data:
                raise InstanceParseError("missing field 'walk'")
            document = parse_instance(data.get("instance") or {})
            return jsonify(price_report(document, data["walk"])), 200
        except FareGraphError as e:
            return _error(e)
        except Exception:
            logger.exception("Price error")
            return jsonify({"error": "Failed to price walk"}), 500

    @app.route("/route", methods=["POST"])
    def cheapest_route():
        """Cheapest path, and with ticket=true a cheapest ticket"""
        data = _body()
        if data is None:
            return jsonify({"error": "Missing request body"}), 400
        try:
            if "from" not in data or "to" not in data:
                raise InstanceParseError("route needs 'from' and 'to'")
            document = parse_instance(data.get("instance") or {})
            report = route_report(document, data["from"], data["to"], settings, bool(data.get("ticket")))
            return jsonify(report), 200
        except FareGraphError as e:
            return _error(e)
        except Exception:
            logger.exception("Route error")
            return jsonify({"error": "Failed to compute route"}), 500

    @app.route("/audit", methods=["POST"])
    def audit_instance():
        """Property reports and condition evaluations"""
        data = _body()
        if data is None:
            return jsonify({"error": "Missing request body"}), 400
        try:
            budget = data.get("budget") or {}
            audit_settings = settings.with_overrides(
                budget_edges=budget.get("max_edges"),
                budget_segments=budget.get("max_segments"),
                budget_elongation=budget.get("max_elongation_edges"),
                walk_limit=budget.get("max_walks"),
            )
            document = parse_instance(data.get("instance") or {})
            return jsonify(audit_report(document, audit_settings)), 200
        except FareGraphError as e:
            return _error(e)
        except Exception:
            logger.exception("Audit error")
            return jsonify({"error": "Failed to audit instance"}), 500

    @app.route("/reduce", methods=["POST"])
    def reduce_mcsip():
        """Minimum-zone instance for a minimum-color path instance"""
        data = _body()
        if data is None:
            return jsonify({"error": "Missing request body"}), 400
        try:
            return jsonify(reduce_report(parse_mcsip(data.get("mcsip") or {}))), 200
        except FareGraphError as e:
            return _error(e)
        except Exception:
            logger.exception("Reduce error")
            return jsonify({"error": "Failed to reduce instance"}), 500

    @app.before_request
    def log_request():
        """Log all incoming requests"""
        g.start_time = time.time()
        logger.info("📥 %s %s from %s", request.method, request.path, request.remote_addr)

    @app.after_request
    def log_response(response):
        """Log response time"""
        if hasattr(g, "start_time"):
            duration = time.time() - g.start_time
            logger.info("📤 %s %s -> %s (%.3fs)", request.method, request.path, response.status_code, duration)
        return response

    return app


app = create_app()


if __name__ == "__main__":
    service_settings = app.config["FAREGRAPH_SETTINGS"]
    configure_logging(service_settings)
    logger.info("🚀 Starting %s on port %d", service_settings.service_name, service_settings.service_port)
    app.run(debug=True, host="0.0.0.0", port=service_settings.service_port)
