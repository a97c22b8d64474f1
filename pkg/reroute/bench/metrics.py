from __future__ import annotations

import json
import math
from collections.abc import Iterable
from typing import NamedTuple, TextIO

import numpy as np

from ..errors import ContractViolation
from ..executor import EpisodeLog, EventKind
from ..replanner import BudgetMode

__all__ = (
    "quality_index",
    "MetricsRecord",
    "records_from_log",
    "ModeAggregate",
    "AggregateTable",
    "write_records",
    "read_records",
)


def quality_index(current_length: float, new_length: float) -> float:
    """Returns the relative length variation of a re-plan, in percent.

    Positive values mean the new path is shorter.

    Raises
    ------
    ContractViolation
        A length is not finite, or the current length is not positive.
    """
    if not (math.isfinite(current_length) and math.isfinite(new_length)):
        raise ContractViolation("The quality index needs finite lengths.")
    if current_length <= 0:
        raise ContractViolation(f"The current length must be positive, got {current_length}.")
    return 100.0 * (current_length - new_length) / current_length


class MetricsRecord(NamedTuple):
    """One accepted re-plan.

    Attributes
    ----------
    trial : int
        The trial the re-plan belongs to.
    mode : BudgetMode
        Whether the re-plan avoided an obstacle or optimized a free path.
    delta : float
        The quality index, in percent.
    replan_time : float
        The metered re-planning time, in seconds.
    timestamp : float
        The episode time the re-plan was accepted, in seconds.
    current_length : float
        The length of the path being replaced, from the robot to the goal.
    new_length : float
        The length of the accepted path.
    """

    trial: int
    mode: BudgetMode
    delta: float
    replan_time: float
    timestamp: float
    current_length: float
    new_length: float

    def to_json(self) -> str:
        """Returns the record as one JSON line, without the newline."""
        return json.dumps(self._asdict() | {"mode": str(self.mode)}, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> MetricsRecord:
        """Parses a line written by :meth:`to_json`."""
        data = json.loads(line)
        return cls(
            trial=int(data["trial"]),
            mode=BudgetMode(data["mode"]),
            delta=float(data["delta"]),
            replan_time=float(data["replan_time"]),
            timestamp=float(data["timestamp"]),
            current_length=float(data["current_length"]),
            new_length=float(data["new_length"]),
        )


def records_from_log(log: EpisodeLog) -> list[MetricsRecord]:
    """Returns one record per accepted re-plan of an episode."""
    records = []
    for event in log.of_kind(EventKind.REPLAN_DONE):
        if not event.data["accepted"]:
            continue
        current_length = float(event.data["current_length"])
        new_length = float(event.data["new_length"])
        records.append(
            MetricsRecord(
                trial=log.trial,
                mode=BudgetMode(event.data["mode"]),
                delta=quality_index(current_length, new_length),
                replan_time=float(event.data["elapsed"]),
                timestamp=event.time,
                current_length=current_length,
                new_length=new_length,
            )
        )
    return records


class ModeAggregate(NamedTuple):
    """Summary statistics of the re-plans of one mode.

    Standard deviations use the sample convention and are NaN with fewer than two records.

    Attributes
    ----------
    mode : BudgetMode
        The re-planning mode.
    count : int
        The number of records.
    mean_delta : float
        The mean quality index, in percent.
    std_delta : float
        The standard deviation of the quality index, in percent.
    mean_time : float
        The mean re-planning time, in seconds.
    std_time : float
        The standard deviation of the re-planning time, in seconds.
    """

    mode: BudgetMode
    count: int
    mean_delta: float
    std_delta: float
    mean_time: float
    std_time: float

    @classmethod
    def of(cls, mode: BudgetMode, records: Iterable[MetricsRecord]) -> ModeAggregate:
        """Aggregates the records of ``mode``."""
        selected = [record for record in records if record.mode is mode]
        if not selected:
            return cls(mode, 0, math.nan, math.nan, math.nan, math.nan)
        deltas = np.fromiter((record.delta for record in selected), dtype=np.float64)
        times = np.fromiter((record.replan_time for record in selected), dtype=np.float64)

        def std(values: np.ndarray) -> float:
            return float(np.std(values, ddof=1)) if values.size > 1 else math.nan

        return cls(mode, len(selected), float(np.mean(deltas)), std(deltas), float(np.mean(times)), std(times))


class AggregateTable(NamedTuple):
    """The per-mode summary of a protocol run.

    Attributes
    ----------
    avoidance : ModeAggregate
        Re-plans made while the current path was obstructed.
    optimization : ModeAggregate
        Re-plans made to shorten a free current path.
    """

    avoidance: ModeAggregate
    optimization: ModeAggregate

    @classmethod
    def from_records(cls, records: Iterable[MetricsRecord]) -> AggregateTable:
        """Aggregates a record stream."""
        records = list(records)
        return cls(ModeAggregate.of(BudgetMode.AVOIDANCE, records), ModeAggregate.of(BudgetMode.OPTIMIZATION, records))

    @property
    def total(self) -> int:
        """int: The number of records aggregated."""
        return self.avoidance.count + self.optimization.count


def write_records(records: Iterable[MetricsRecord], stream: TextIO) -> None:
    """Writes records as JSON lines."""
    for record in records:
        stream.write(record.to_json() + "\n")


def read_records(stream: TextIO) -> list[MetricsRecord]:
    """Reads records written by :func:`write_records`."""
    return [MetricsRecord.from_json(line) for line in stream if line.strip()]
