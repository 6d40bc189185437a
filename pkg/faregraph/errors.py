"""
Error hierarchy for faregraph
Each error knows the CLI exit code and the HTTP status it maps to
"""


class FareGraphError(Exception):
    """Base class for every error raised by faregraph"""

    exit_code = 1
    http_status = 500


class InstanceParseError(FareGraphError, ValueError):
    """Malformed instance or MCSiP document"""

    exit_code = 2
    http_status = 400


class InvalidReferenceError(FareGraphError, KeyError):
    """Unknown node, edge or zone id"""

    exit_code = 3
    http_status = 404

    def __str__(self):
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class InvalidWalkError(FareGraphError, ValueError):
    """Walk does not follow PTN edges, or bad subwalk/concat arguments"""

    exit_code = 3
    http_status = 422


class InvalidQueryError(FareGraphError, ValueError):
    """Query preconditions violated"""

    exit_code = 3
    http_status = 422


class ConfigurationError(FareGraphError, ValueError):
    """Zone structure, fare parameters or settings unusable for the request"""

    exit_code = 3
    http_status = 422


class UnsupportedInstanceError(FareGraphError):
    """The requested routine does not apply to this instance"""

    exit_code = 3
    http_status = 422


class ResourceLimitError(FareGraphError):
    """A search budget ran out before the answer was proven"""

    exit_code = 4
    http_status = 503

    def __init__(self, message, incumbent=None):
        """
        Args:
            message: What ran out
            incumbent: Best result found before the budget was exhausted, or None
        """
        super().__init__(message)
        self.incumbent = incumbent
