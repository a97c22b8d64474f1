import math
from collections.abc import Sequence
from enum import Enum

from .metrics import AggregateTable, ModeAggregate

__all__ = ("render_summary",)


_ANSI_ESCAPE = "\033[0;"
_ANSI_RESET = f"{_ANSI_ESCAPE}0m"

_LABEL_WIDTH = 26
_COLUMN_WIDTH = 20


class _AnsiColour(Enum):
    """The colours used when rendering for a terminal."""

    RED = "31"
    GREEN = "32"
    WHITE = "37"


def _with_formatting(text: str, colour: _AnsiColour | None = None, bold: bool = False, *, enabled: bool = True) -> str:
    """Formats text with ANSI escape codes.

    Parameters
    ----------
    text : str
        The text to format.
    colour : _AnsiColour, optional
        The colour of the text.
    bold : bool, optional
        Whether the text should be bold.
    enabled : bool, optional
        Whether to format at all; plain text is returned otherwise.

    Returns
    -------
    str
        The formatted text.
    """
    if not enabled:
        return text.rstrip()

    codes = []
    if colour is not None:
        codes.append(colour.value)
    if bold:
        codes.append("1")

    return f"{_ANSI_ESCAPE}{";".join(codes)}m{text.rstrip()}{_ANSI_RESET}"


def _number(value: float, scale: float = 1.0, digits: int = 3) -> str:
    if math.isnan(value):
        return "n/a"
    return f"{value * scale:.{digits}f}"


def _row(label: str, values: Sequence[str]) -> str:
    return f"{label:<{_LABEL_WIDTH}}" + "".join(f"{value:>{_COLUMN_WIDTH}}" for value in values)


def _delta_colour(aggregate: ModeAggregate) -> _AnsiColour | None:
    if aggregate.count == 0:
        return None
    return _AnsiColour.GREEN if aggregate.mean_delta >= 0 else _AnsiColour.RED


def render_summary(name: str, table: AggregateTable, *, skipped: Sequence[int] = (), colour: bool = False) -> str:
    """Renders the per-mode summary of a protocol run as a fixed-width table.

    Parameters
    ----------
    name : str
        The scenario name, used as the title.
    table : AggregateTable
        The summary to render.
    skipped : Sequence[int], optional
        The trials that were skipped, listed under the table.
    colour : bool, optional
        Whether to format the table for a terminal, by default False.

    Returns
    -------
    str
        The rendered table, newline terminated.
    """
    avoidance, optimization = table
    lines = [
        _with_formatting(f"Results of {name}", _AnsiColour.WHITE, bold=True, enabled=colour),
        _with_formatting(_row("", ("Obstacle avoidance", "Path optimization")), _AnsiColour.WHITE, bold=True, enabled=colour),
        f"{"mean(delta) (%)":<{_LABEL_WIDTH}}"
        + "".join(
            _with_formatting(f"{_number(aggregate.mean_delta):>{_COLUMN_WIDTH}}", _delta_colour(aggregate), enabled=colour)
            for aggregate in table
        ),
        _row("std. deviation(delta) (%)", (_number(avoidance.std_delta), _number(optimization.std_delta))),
        _row("mean(time) (ms)", (_number(avoidance.mean_time, 1000), _number(optimization.mean_time, 1000))),
        _row("std. deviation(time) (ms)", (_number(avoidance.std_time, 1000), _number(optimization.std_time, 1000))),
        _row("number of re-plans", (str(avoidance.count), str(optimization.count))),
    ]
    if skipped:
        lines.append(f"skipped trials: {", ".join(str(trial) for trial in skipped)}")
    return "\n".join(lines) + "\n"
