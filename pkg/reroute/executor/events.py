from __future__ import annotations

import json
import logging
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, NamedTuple, TextIO

from ..cspace import Box
from ..errors import ContractViolation
from ..paths import Path

__all__ = (
    "EventKind",
    "EpisodeEvent",
    "EpisodeLog",
    "box_to_data",
    "box_from_data",
)


_log = logging.getLogger(__name__)


class EventKind(StrEnum):
    """The kinds of episode event."""

    EPISODE_START = "episode-start"
    REPLAN_START = "replan-start"
    REPLAN_DONE = "replan-done"
    SWAP = "swap"
    COLLISION_DETECTED = "collision-detected"
    SAFETY_STOP = "safety-stop"
    RESUME = "resume"
    GOAL_REACHED = "goal-reached"
    SPAWN = "spawn"
    BUDGET_CHANGE = "budget-change"
    TIMEOUT = "timeout"
    EPISODE_END = "episode-end"


class EpisodeEvent(NamedTuple):
    """Something that happened during an episode.

    Attributes
    ----------
    kind : EventKind
        What happened.
    time : float
        The episode time, in seconds.
    data : dict[str, Any]
        Kind-specific JSON-compatible fields.
    """

    kind: EventKind
    time: float
    data: dict[str, Any]

    def to_json(self) -> str:
        """Returns the event as one JSON line, without the newline."""
        return json.dumps({"kind": str(self.kind), "time": self.time, **self.data}, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> EpisodeEvent:
        """Parses a line written by :meth:`to_json`."""
        record = json.loads(line)
        kind = EventKind(record.pop("kind"))
        time = float(record.pop("time"))
        return cls(kind, time, record)


def box_to_data(box: Box) -> dict[str, Any]:
    """Returns the JSON fields describing a box."""
    return {"center": list(box.center), "half_extents": list(box.half_extents), "spawn_time": box.spawn_time}


def box_from_data(data: dict[str, Any]) -> Box:
    """Builds a box from :func:`box_to_data` fields."""
    return Box(center=tuple(data["center"]), half_extents=tuple(data["half_extents"]), spawn_time=data.get("spawn_time"))


@dataclass(slots=True)
class EpisodeLog:
    """Everything recorded during one episode.

    Attributes
    ----------
    trial : int
        The trial the episode belongs to.
    initial_paths : list[Path]
        The path set the episode started with.
    static_boxes : list[Box]
        The obstacles present from the start.
    events : list[EpisodeEvent]
        The events, in the order they happened.
    states : list[tuple[float, tuple[float, ...]]]
        The robot configuration at every execution tick.
    """

    trial: int = 0
    initial_paths: list[Path] = field(default_factory=list)
    static_boxes: list[Box] = field(default_factory=list)
    events: list[EpisodeEvent] = field(default_factory=list)
    states: list[tuple[float, tuple[float, ...]]] = field(default_factory=list)

    def record(self, kind: EventKind, time: float, **data: Any) -> EpisodeEvent:
        """Appends an event."""
        event = EpisodeEvent(kind, time, data)
        self.events.append(event)
        _log.debug("t=%.3f %s %s", time, kind, {k: v for k, v in data.items() if k != "waypoints"})
        return event

    def of_kind(self, *kinds: EventKind) -> Iterator[EpisodeEvent]:
        """Iterates over the events of the given kinds."""
        return (event for event in self.events if event.kind in kinds)

    # region: Summary

    @property
    def reached_goal(self) -> bool:
        """bool: Whether the robot reached the goal."""
        return any(True for _ in self.of_kind(EventKind.GOAL_REACHED))

    @property
    def end_time(self) -> float:
        """float: The time of the last recorded state."""
        return self.states[-1][0] if self.states else 0.0

    @property
    def spawned_boxes(self) -> list[Box]:
        """list[Box]: The obstacles spawned during the episode."""
        return [box_from_data(event.data["box"]) for event in self.of_kind(EventKind.SPAWN)]

    @property
    def accepted_paths(self) -> list[Path]:
        """list[Path]: Every re-planned path the robot switched to, in order."""
        return [Path(event.data["waypoints"]) for event in self.of_kind(EventKind.SWAP)]

    @property
    def safety_stops(self) -> int:
        """int: The number of safety stops issued."""
        return sum(1 for _ in self.of_kind(EventKind.SAFETY_STOP))

    # endregion

    # region: Serialization

    def write_jsonl(self, stream: TextIO) -> None:
        """Writes the log as JSON lines: a start record, the events, and an end record with the states."""
        start = EpisodeEvent(
            EventKind.EPISODE_START,
            0.0,
            {
                "trial": self.trial,
                "paths": [path.waypoints.tolist() for path in self.initial_paths],
                "boxes": [box_to_data(box) for box in self.static_boxes],
            },
        )
        stream.write(start.to_json() + "\n")
        for event in self.events:
            stream.write(event.to_json() + "\n")
        end = EpisodeEvent(EventKind.EPISODE_END, self.end_time, {"states": [[t, list(q)] for t, q in self.states]})
        stream.write(end.to_json() + "\n")

    @classmethod
    def read_jsonl(cls, stream: TextIO) -> EpisodeLog:
        """Reads a log written by :meth:`write_jsonl`.

        Raises
        ------
        ContractViolation
            The stream does not start with an episode start record.
        """
        log = cls()
        started = False
        for number, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                event = EpisodeEvent.from_json(line)
            except (ValueError, KeyError) as e:
                raise ContractViolation(f"Line {number} of the episode log is not an event: {e}") from e
            if event.kind is EventKind.EPISODE_START:
                log.trial = int(event.data["trial"])
                log.initial_paths = [Path(waypoints) for waypoints in event.data["paths"]]
                log.static_boxes = [box_from_data(box) for box in event.data["boxes"]]
                started = True
            elif event.kind is EventKind.EPISODE_END:
                log.states = [(float(t), tuple(q)) for t, q in event.data["states"]]
            else:
                log.events.append(event)
        if not started:
            raise ContractViolation("The episode log has no start record.")
        return log

    # endregion
