"""Error hierarchy. Every error carries the exit code the CLI returns for it."""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_RESONANCE = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5


class HypersyncError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_FAILURE


class ConfigError(HypersyncError):
    """Invalid experiment configuration."""

    exit_code = EXIT_CONFIG


class HypergraphError(HypersyncError, ValueError):
    """Invalid size, degenerate or duplicate simplex, malformed hypergraph file."""

    exit_code = EXIT_CONFIG


class ParameterError(HypersyncError, ValueError):
    """Parameters outside their admissible range."""

    exit_code = EXIT_CONFIG


class DimensionError(HypersyncError, ValueError):
    """State or frequency vector length does not match the node count."""

    exit_code = EXIT_CONFIG


class EmptyWindowError(HypersyncError, ValueError):
    """No samples fall inside the requested averaging window."""

    exit_code = EXIT_CONFIG


class ResonanceError(HypersyncError):
    """A frequency combination used as a denominator is below tolerance."""

    exit_code = EXIT_RESONANCE

    def __init__(self, message: str, simplex: tuple = (), combination: float = 0.0):
        super().__init__(message)
        self.simplex = simplex
        self.combination = combination


class DivergenceError(HypersyncError):
    """The integrated state became non-finite."""

    exit_code = EXIT_DIVERGENCE

    def __init__(self, message: str, t: float = float("nan")):
        super().__init__(message)
        self.t = t


class NumericalError(HypersyncError):
    """Eigensolver failure or residual above tolerance."""

    exit_code = EXIT_DIVERGENCE


class ActionDomainError(HypersyncError, ValueError):
    """An action variable is non-positive."""

    exit_code = EXIT_DIVERGENCE


class OutputError(HypersyncError):
    """Output directory or file could not be written."""

    exit_code = EXIT_IO
