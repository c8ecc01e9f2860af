"""Exception types shared across the package."""


class SpaceMismatchError(ValueError):
    """Two elements from different spaces were combined."""


class DomainError(ValueError):
    """An operator was applied outside its declared domain."""


class UnknownFunctionError(KeyError):
    """A catalog function name was not recognized."""


class ScheduleValidationError(ValueError):
    """A driver was started with schedules that fail their hypotheses."""

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or report.summary())


class DivergenceError(RuntimeError):
    """An iteration produced non-finite or runaway iterates."""


class ConfigError(ValueError):
    """A run configuration file could not be parsed or is inconsistent."""
