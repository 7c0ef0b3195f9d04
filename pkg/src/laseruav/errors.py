"""Exception hierarchy shared by the analytic, simulation and CLI layers."""


class LaserUavError(Exception):
    """Base class for all errors raised by :mod:`laseruav`."""


class DomainError(LaserUavError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(LaserUavError, ValueError):
    """A scenario or simulation configuration is malformed or violates an invariant.

    ``key`` and ``line`` identify the offending entry when the error comes
    from a config file.
    """

    def __init__(self, message, key=None, line=None):
        self.reason = message
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NumericalError(LaserUavError, ArithmeticError):
    """A numerical procedure (quadrature, root bracketing) failed."""


class QuadratureError(NumericalError):
    """Adaptive quadrature hit its subdivision limit before meeting tolerance."""

    def __init__(self, estimate, residual, subdivisions):
        self.estimate = estimate
        self.residual = residual
        self.subdivisions = subdivisions
        super().__init__(
            f"quadrature did not converge after {subdivisions} subdivisions "
            f"(best estimate {estimate!r}, residual {residual:.3e})"
        )


class BracketError(NumericalError):
    """Bisection could not bracket the requested root."""


class UncoverableError(LaserUavError):
    """The scenario cannot reach the requested coverage at any LBD density."""
