"""Exception types shared across the laboratory."""


class InvalidInputError(ValueError):
    """An operation precondition was violated (bad grid, range, or parameter)."""


class AdmissibilityViolation(RuntimeError):
    """A speed sample left the attached strict-hyperbolicity range [mu1, mu2]."""


class IntegrationFailure(RuntimeError):
    """The ODE integration produced a non-finite state.

    Carries the last time at which the state was still finite.
    """

    def __init__(self, message: str, last_good_time: float):
        super().__init__(f"{message} (last good time t={last_good_time!r})")
        self.last_good_time = last_good_time


class UnsupportedComparison(ValueError):
    """embedding_check received a scale kind it does not know."""


class ConfigError(ValueError):
    """A config file failed validation. line_no is 1-based, 0 for file-level errors."""

    def __init__(self, message: str, line_no: int = 0):
        prefix = f"line {line_no}: " if line_no else ""
        super().__init__(prefix + message)
        self.line_no = line_no
