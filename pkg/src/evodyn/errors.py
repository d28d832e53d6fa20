"""Exception types shared across the package."""


class EvodynError(ValueError):
    """Base class for all errors raised by this package."""


class DomainError(EvodynError):
    """An input lies outside the mathematical domain of an operation."""


class EvaluationError(EvodynError):
    """A fitness or incentive evaluation produced NaN or infinity."""


class GeometryError(EvodynError):
    """A metric is singular or produces invalid coefficients."""


class UnsupportedKindError(EvodynError):
    """The requested operation is not defined for this kind."""


class ConfigError(EvodynError):
    """A scenario configuration failed schema validation.

    Carries the offending field paths so the CLI can report them.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
