from __future__ import annotations

__all__ = (
    "RerouteError",
    "ContractViolation",
    "EmptyRegionError",
    "SamplingExhaustedError",
    "ScenarioError",
)


class RerouteError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(RerouteError, ValueError):
    """Raised when an operation is called with arguments that break its pre-conditions."""


class EmptyRegionError(RerouteError):
    """Raised when sampling from an informed region whose cost bound does not exceed the focal distance."""


class SamplingExhaustedError(RerouteError):
    """Raised when rejection sampling runs out of draws before finding an admissible sample."""


class ScenarioError(RerouteError, ValueError):
    """Raised when a scenario file cannot be parsed or fails validation.

    Attributes
    ----------
    source : str
        The file the scenario was read from.
    field : str
        The dotted path of the offending field.
    line : int | None
        The 1-based line of the offending field, if known.
    """

    def __init__(self, message: str, *, source: str = "<scenario>", field: str = "", line: int | None = None) -> None:
        self.source: str = source
        self.field: str = field
        self.line: int | None = line
        self.message: str = message
        super().__init__(str(self))

    def __str__(self) -> str:
        location = self.source if self.line is None else f"{self.source}:{self.line}"
        if self.field:
            return f"{location}: {self.field}: {self.message}"
        return f"{location}: {self.message}"
