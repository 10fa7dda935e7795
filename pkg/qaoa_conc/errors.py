"""Error categories shared by all modules.

Each class subclasses the builtin a plain function would raise, so callers
that catch ``ValueError`` / ``RuntimeError`` keep working.  The CLI maps the
category to an exit status.
"""


class ConfigError(ValueError):
    """Bad configuration value or unknown configuration field."""

    category = 'config'


class ParameterError(ValueError):
    """Invalid operation argument (parity, range, dimension mismatch)."""

    category = 'parameter'


class UndefinedRatioError(ParameterError):
    """A ratio or fraction with a zero denominator."""

    category = 'undefined'


class GenerationError(RuntimeError):
    """A rejection sampler ran out of attempts.

    ``histogram`` maps each observed value (e.g. MaxCut) to its count.
    """

    category = 'generation'

    def __init__(self, message, histogram=None):
        super().__init__(message)
        self.histogram = dict(histogram or {})


class ResourceCapError(RuntimeError):
    """Problem size above a configured simulator or brute-force cap."""

    category = 'resource'


class DegenerateVarianceError(ValueError):
    """Per-clause variance is zero, so the correlation is undefined."""

    category = 'degenerate'


class SearchAbortError(RuntimeError):
    """The objective returned a non-finite value during a local search."""

    category = 'search'
