"""Exception hierarchy shared by every tabsynth package."""


class SynthError(Exception):
    """Base class for tabsynth errors."""


class ValidationError(SynthError, ValueError):
    """An input or parameter violated a documented precondition."""


class UndefinedMetricError(SynthError):
    """A conditional metric has an empty conditioning set."""

    def __init__(self, metric: str, detail: str = ""):
        self.metric = metric
        message = f"{metric} is undefined"
        if detail:
            message += f": {detail}"
        super().__init__(message)
