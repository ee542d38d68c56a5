class MonoHazardError(ValueError):
    """Base class for input errors raised by this package."""


class TiesError(MonoHazardError):
    """The sample contains tied observations and jittering was not requested."""


class BudgetError(MonoHazardError):
    """A simulation budget is too small to produce the requested estimates."""


class ModelError(MonoHazardError):
    """A null model violates the conditions needed for calibration."""
