"""Exception hierarchy shared across the solvers and the CLI."""


class PowallocError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PowallocError):
    """A network model violates one of its invariants."""


class ZeroRateError(PowallocError):
    """A latency was requested for a link with zero capacity."""


class MissingRatesError(PowallocError):
    """The latency solver needs ``min_rates`` but the model has none."""


class NumericalFailure(PowallocError):
    """An iterative routine stalled past its iteration cap."""


class NonConvergence(PowallocError):
    """An optimizer hit its iteration budget before reaching tolerance."""


class InfeasibleRegionError(PowallocError):
    """Extra constraints handed to a subproblem define an empty region."""


class QuadratureFailure(PowallocError):
    """Adaptive quadrature could not meet the requested tolerance."""


class GridTooLargeError(PowallocError):
    """A brute-force grid would exceed the enumeration guard."""


class NoFeasibleGridPointError(PowallocError):
    """No point of the search grid satisfies the rate floors."""


class IterationCapError(PowallocError):
    """The fixed-point iteration hit its cap without a verdict."""


class ConfigError(PowallocError):
    """A scenario config failed to parse or validate.

    ``path`` points at the offending field, e.g. ``"gain[0][1]"``.
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnitError(ConfigError):
    """A config declared an unsupported physical unit."""
