from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum, StrEnum
from pathlib import Path as FilePath
from typing import Any, NotRequired, TypedDict

import numpy as np
import yaml

from ..cspace import Box, Capsule, CollisionChecker, CollisionWorld, Configuration, RobotKind, RobotModel, as_configuration
from ..errors import ContractViolation, ScenarioError
from ..executor import ClockMode, EpisodeSettings
from ..paths import EPS_MERGE
from ..planners import DEFAULT_MAX_ITERATIONS, DEFAULT_REJECTION_BUDGET, DEFAULT_STEP, ConnectorKind, ConnectorSettings, SamplingBounds
from ..replanner import TimeBudget

__all__ = (
    "BoxData",
    "CapsuleData",
    "JointData",
    "RobotData",
    "SpaceData",
    "BudgetData",
    "ExecutionData",
    "TimingData",
    "PlannerData",
    "SpawnData",
    "SpawnScheduleData",
    "ScenarioData",
    "Placement",
    "SpawnSpec",
    "PlanningSpec",
    "Scenario",
    "load_scenario",
    "parse_scenario",
)


_log = logging.getLogger(__name__)


DEFAULT_REDUCED_TIME = 0.05
DEFAULT_RELAXED_TIME = 0.1
DEFAULT_SPAWN_LEAD = 0.15
DEFAULT_INITIAL_TIME = 1.0
DEFAULT_OPTIMIZATION_TIME = 0.5


# region: Raw scenario data


class BoxData(TypedDict):
    center: list[float]
    size: list[float]


class CapsuleData(TypedDict):
    start: list[float]
    end: list[float]
    radius: float


class JointData(TypedDict):
    axis: list[float]
    offset: list[float]
    capsule: CapsuleData
    limits: list[float]


class RobotData(TypedDict):
    kind: str
    base: NotRequired[list[float]]
    joints: NotRequired[list[JointData]]


class SpaceData(TypedDict):
    lower: list[float]
    upper: list[float]


class BudgetData(TypedDict):
    reduced_time: float
    relaxed_time: float


class ExecutionData(TypedDict, total=False):
    speed: float
    execution_rate: float
    collision_rate: float
    replan_period: float
    time_limit: float
    goal_tolerance: float
    resolution: float


class TimingData(TypedDict, total=False):
    check_cost: float
    iteration_cost: float


class PlannerData(TypedDict, total=False):
    connector: str
    step: float
    max_iterations: int
    rejection_budget: int
    shortcut_attempts: int
    merge_threshold: float
    initial_time: float
    optimization_time: float


class SpawnData(TypedDict):
    time: float
    side: float
    placement: str
    center: NotRequired[list[float]]


class SpawnScheduleData(TypedDict, total=False):
    occupied_edge: str
    spawn_lead: float
    schedule: list[SpawnData]


class ScenarioData(TypedDict):
    name: str
    seed: NotRequired[int]
    trials: NotRequired[int]
    paths: NotRequired[int]
    space: NotRequired[SpaceData]
    robot: RobotData
    start: list[float]
    goal: list[float]
    obstacles: NotRequired[list[BoxData]]
    budget: NotRequired[BudgetData]
    execution: NotRequired[ExecutionData]
    timing: NotRequired[TimingData]
    planner: NotRequired[PlannerData]
    spawns: NotRequired[SpawnScheduleData]


# endregion

# region: Scenario types


class Placement(StrEnum):
    """Where a spawned cube is put."""

    RANDOM_EDGE = "random-edge"
    OCCUPIED_EDGE = "occupied-edge"
    FIXED = "fixed"


@dataclass(frozen=True, slots=True)
class SpawnSpec:
    """One entry of the spawn schedule.

    Attributes
    ----------
    time : float
        When the cube appears, in seconds.
    side : float
        The cube side, in metres.
    placement : Placement
        How the cube centre is chosen.
    center : tuple[float, float, float] | None
        The centre of a fixed cube.
    """

    time: float
    side: float
    placement: Placement
    center: tuple[float, float, float] | None = None


@dataclass(frozen=True, slots=True)
class PlanningSpec:
    """How the initial path set is computed.

    Attributes
    ----------
    initial_time : float
        The metered time allowed for finding each path.
    optimization_time : float
        The metered time allowed for optimizing each path.
    """

    initial_time: float = DEFAULT_INITIAL_TIME
    optimization_time: float = DEFAULT_OPTIMIZATION_TIME


@dataclass(frozen=True, slots=True)
class Scenario:
    """A validated experiment description.

    Attributes
    ----------
    name : str
        The scenario name.
    source : str
        Where the scenario was read from.
    seed : int
        The base seed; trial ``k`` uses the stream spawned for it.
    trials : int
        The number of trials.
    path_count : int
        The number of pre-computed paths.
    robot : RobotModel
        The robot geometry.
    bounds : SamplingBounds
        The admissible configurations.
    start : tuple[float, ...]
        The start configuration.
    goal : tuple[float, ...]
        The goal configuration.
    static_boxes : tuple[Box, ...]
        Obstacles present from the start.
    budget : TimeBudget
        The re-planning budgets.
    settings : EpisodeSettings
        The episode parameters.
    planning : PlanningSpec
        How the initial path set is computed.
    spawns : tuple[SpawnSpec, ...]
        The spawn schedule, ordered by time.
    occupied_edge_auto : bool
        Whether one random-edge spawn per trial is turned into an occupied-edge spawn.
    spawn_lead : float
        How far ahead of the robot occupied-edge cubes are placed, in configuration-space units.
    """

    name: str
    source: str
    seed: int
    trials: int
    path_count: int
    robot: RobotModel
    bounds: SamplingBounds
    start: tuple[float, ...]
    goal: tuple[float, ...]
    static_boxes: tuple[Box, ...]
    budget: TimeBudget
    settings: EpisodeSettings
    planning: PlanningSpec
    spawns: tuple[SpawnSpec, ...]
    occupied_edge_auto: bool
    spawn_lead: float

    @property
    def dimension(self) -> int:
        """int: The configuration-space dimension."""
        return self.robot.dimension

    @property
    def world(self) -> CollisionWorld:
        """CollisionWorld: The static obstacles."""
        return CollisionWorld(static_boxes=self.static_boxes)

    @property
    def start_config(self) -> Configuration:
        """Configuration: The start as an array."""
        return as_configuration(self.start)

    @property
    def goal_config(self) -> Configuration:
        """Configuration: The goal as an array."""
        return as_configuration(self.goal)

    def with_overrides(self, *, seed: int | None = None, trials: int | None = None, clock_mode: ClockMode | None = None) -> Scenario:
        """Returns the scenario with command-line overrides applied."""
        scenario = self
        if seed is not None:
            scenario = dataclasses.replace(scenario, seed=seed)
        if trials is not None:
            if trials < 0:
                raise ScenarioError("must not be negative", source=self.source, field="trials")
            scenario = dataclasses.replace(scenario, trials=trials)
        if clock_mode is not None:
            scenario = dataclasses.replace(scenario, settings=dataclasses.replace(scenario.settings, clock_mode=clock_mode))
        return scenario

    def describe(self) -> str:
        """Returns a short human-readable summary."""
        kind = "point robot" if self.robot.is_point else f"{self.dimension}-joint chain"
        return "\n".join(
            (
                f"{self.name} ({self.source})",
                f"  {kind}, {len(self.static_boxes)} static obstacles, {len(self.spawns)} spawns",
                f"  {self.path_count} paths, {self.trials} trials, seed {self.seed}",
                f"  budgets {self.budget.reduced_time * 1000:g}/{self.budget.relaxed_time * 1000:g} ms, "
                f"loops {self.settings.execution_rate:g}/{self.settings.collision_rate:g} Hz, speed {self.settings.speed:g}",
                f"  time limit {self.settings.time_limit:g} s, connector {self.settings.connector.kind}",
            )
        )


# endregion

# region: Parsing


class _Reader:
    """Reads typed fields out of a parsed document, reporting errors with their line."""

    def __init__(self, root: yaml.Node | None, source: str) -> None:
        self._root = root
        self.source = source

    def line_of(self, field: str) -> int | None:
        node = self._root
        line = None if node is None else node.start_mark.line + 1
        for part in field.split(".") if field else ():
            if isinstance(node, yaml.MappingNode):
                node = next((value for key, value in node.value if key.value == part), None)
            elif isinstance(node, yaml.SequenceNode) and part.isdigit() and int(part) < len(node.value):
                node = node.value[int(part)]
            else:
                node = None
            if node is None:
                break
            line = node.start_mark.line + 1
        return line

    def error(self, field: str, message: str) -> ScenarioError:
        return ScenarioError(message, source=self.source, field=field, line=self.line_of(field))

    def number(self, value: Any, field: str, *, positive: bool = False, minimum: float | None = None) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise self.error(field, f"expected a finite number, got {value!r}")
        if positive and value <= 0:
            raise self.error(field, f"must be positive, got {value!r}")
        if minimum is not None and value < minimum:
            raise self.error(field, f"must be at least {minimum:g}, got {value!r}")
        return float(value)

    def integer(self, value: Any, field: str, *, minimum: int = 0) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(field, f"expected an integer, got {value!r}")
        if value < minimum:
            raise self.error(field, f"must be at least {minimum}, got {value!r}")
        return value

    def vector(self, value: Any, field: str, length: int | None = None) -> tuple[float, ...]:
        if not isinstance(value, list):
            raise self.error(field, f"expected a list of numbers, got {value!r}")
        if length is not None and len(value) != length:
            raise self.error(field, f"expected {length} values, got {len(value)}")
        return tuple(self.number(v, f"{field}.{i}") for i, v in enumerate(value))

    def mapping(self, value: Any, field: str) -> Mapping[str, Any]:
        if value is None:
            return {}
        if not isinstance(value, Mapping):
            raise self.error(field, f"expected a mapping, got {type(value).__name__}")
        return value

    def choice[E: Enum](self, value: Any, field: str, enum: type[E]) -> E:
        try:
            return enum(value)
        except ValueError:
            options = ", ".join(member.value for member in enum)
            raise self.error(field, f"expected one of {options}, got {value!r}") from None


def _parse_robot(reader: _Reader, data: Mapping[str, Any]) -> RobotModel:
    kind = reader.choice(data.get("kind"), "robot.kind", RobotKind)
    if kind is RobotKind.POINT:
        return RobotModel.point()

    joints = data.get("joints")
    if not isinstance(joints, list) or not joints:
        raise reader.error("robot.joints", "a serial chain needs at least one joint")

    axes, offsets, capsules, lower, upper = [], [], [], [], []
    for index, raw in enumerate(joints):
        field = f"robot.joints.{index}"
        joint: JointData = reader.mapping(raw, field)  # type: ignore[assignment]
        axes.append(reader.vector(joint.get("axis"), f"{field}.axis", 3))
        offsets.append(reader.vector(joint.get("offset"), f"{field}.offset", 3))
        capsule: CapsuleData = reader.mapping(joint.get("capsule"), f"{field}.capsule")  # type: ignore[assignment]
        capsules.append(
            Capsule(
                start=reader.vector(capsule.get("start"), f"{field}.capsule.start", 3),  # type: ignore[arg-type]
                end=reader.vector(capsule.get("end"), f"{field}.capsule.end", 3),  # type: ignore[arg-type]
                radius=reader.number(capsule.get("radius"), f"{field}.capsule.radius", positive=True),
            )
        )
        lo, hi = reader.vector(joint.get("limits"), f"{field}.limits", 2)
        lower.append(lo)
        upper.append(hi)

    try:
        return RobotModel(
            kind=kind,
            dimension=len(joints),
            joint_axes=tuple(axes),  # type: ignore[arg-type]
            link_offsets=tuple(offsets),  # type: ignore[arg-type]
            capsules=tuple(capsules),
            joint_lower=tuple(lower),
            joint_upper=tuple(upper),
            base=reader.vector(data.get("base", [0.0, 0.0, 0.0]), "robot.base", 3),  # type: ignore[arg-type]
        )
    except ContractViolation as e:
        raise reader.error("robot", str(e)) from None


def _parse_boxes(reader: _Reader, data: Any) -> tuple[Box, ...]:
    if data is None:
        return ()
    if not isinstance(data, list):
        raise reader.error("obstacles", "expected a list of boxes")
    boxes = []
    for index, raw in enumerate(data):
        field = f"obstacles.{index}"
        box: BoxData = reader.mapping(raw, field)  # type: ignore[assignment]
        center = reader.vector(box.get("center"), f"{field}.center", 3)
        size = reader.vector(box.get("size"), f"{field}.size", 3)
        if min(size) <= 0:
            raise reader.error(f"{field}.size", "box sides must be positive")
        boxes.append(Box(center=center, half_extents=tuple(s / 2 for s in size)))  # type: ignore[arg-type]
    return tuple(boxes)


def _parse_spawns(reader: _Reader, data: Mapping[str, Any], time_limit: float) -> tuple[tuple[SpawnSpec, ...], bool, float]:
    occupied = data.get("occupied_edge", "none")
    if occupied not in ("auto", "none"):
        raise reader.error("spawns.occupied_edge", f"expected auto or none, got {occupied!r}")
    lead = reader.number(data.get("spawn_lead", DEFAULT_SPAWN_LEAD), "spawns.spawn_lead", minimum=0.0)

    schedule = data.get("schedule", [])
    if not isinstance(schedule, list):
        raise reader.error("spawns.schedule", "expected a list of spawns")
    specs = []
    for index, raw in enumerate(schedule):
        field = f"spawns.schedule.{index}"
        spawn: SpawnData = reader.mapping(raw, field)  # type: ignore[assignment]
        time = reader.number(spawn.get("time"), f"{field}.time", minimum=0.0)
        if time > time_limit:
            raise reader.error(f"{field}.time", f"spawn time {time:g} s is after the episode time limit of {time_limit:g} s")
        side = reader.number(spawn.get("side"), f"{field}.side", positive=True)
        placement = reader.choice(spawn.get("placement", Placement.RANDOM_EDGE), f"{field}.placement", Placement)
        center = None
        if placement is Placement.FIXED:
            center = reader.vector(spawn.get("center"), f"{field}.center", 3)
        elif "center" in spawn:
            raise reader.error(f"{field}.center", "only fixed spawns take a centre")
        specs.append(SpawnSpec(time, side, placement, center))  # type: ignore[arg-type]

    if occupied == "auto" and not any(spec.placement is Placement.RANDOM_EDGE for spec in specs):
        raise reader.error("spawns.occupied_edge", "auto needs at least one random-edge spawn to convert")
    return tuple(sorted(specs, key=lambda spec: spec.time)), occupied == "auto", lead


def _parse_budget(reader: _Reader, data: Mapping[str, Any]) -> TimeBudget:
    if "reduced_time" not in data or "relaxed_time" not in data:
        _log.warning(
            "%s: budget not fully specified, using the default %g/%g ms",
            reader.source,
            DEFAULT_REDUCED_TIME * 1000,
            DEFAULT_RELAXED_TIME * 1000,
        )
    reduced = reader.number(data.get("reduced_time", DEFAULT_REDUCED_TIME), "budget.reduced_time", positive=True)
    relaxed = reader.number(data.get("relaxed_time", DEFAULT_RELAXED_TIME), "budget.relaxed_time", positive=True)
    try:
        return TimeBudget(reduced, relaxed)
    except ContractViolation as e:
        raise reader.error("budget", str(e)) from None


def _parse_settings(
    reader: _Reader, robot: RobotModel, bounds: SamplingBounds, budget: TimeBudget, data: Mapping[str, Any]
) -> EpisodeSettings:
    execution: ExecutionData = reader.mapping(data.get("execution"), "execution")  # type: ignore[assignment]
    timing: TimingData = reader.mapping(data.get("timing"), "timing")  # type: ignore[assignment]
    planner: PlannerData = reader.mapping(data.get("planner"), "planner")  # type: ignore[assignment]
    defaults = EpisodeSettings(robot=robot, bounds=bounds, budget=budget)

    def number(section: Mapping[str, Any], name: str, prefix: str, *, positive: bool = True) -> float:
        default = getattr(defaults, name)
        return reader.number(section.get(name, default), f"{prefix}.{name}", positive=positive, minimum=None if positive else 0.0)

    connector = ConnectorSettings(
        reader.choice(planner.get("connector", ConnectorKind.RRT_CONNECT), "planner.connector", ConnectorKind),
        step=reader.number(planner.get("step", DEFAULT_STEP), "planner.step", positive=True),
        max_iterations=reader.integer(planner.get("max_iterations", DEFAULT_MAX_ITERATIONS), "planner.max_iterations", minimum=1),
        rejection_budget=reader.integer(planner.get("rejection_budget", DEFAULT_REJECTION_BUDGET), "planner.rejection_budget", minimum=1),
        shortcut_attempts=reader.integer(planner.get("shortcut_attempts", 20), "planner.shortcut_attempts"),
    )
    return EpisodeSettings(
        robot=robot,
        bounds=bounds,
        budget=budget,
        speed=number(execution, "speed", "execution"),
        execution_rate=number(execution, "execution_rate", "execution"),
        collision_rate=number(execution, "collision_rate", "execution"),
        replan_period=number(execution, "replan_period", "execution"),
        time_limit=number(execution, "time_limit", "execution"),
        goal_tolerance=number(execution, "goal_tolerance", "execution"),
        resolution=number(execution, "resolution", "execution"),
        merge_threshold=reader.number(planner.get("merge_threshold", EPS_MERGE), "planner.merge_threshold", minimum=0.0),
        connector=connector,
        check_cost=number(timing, "check_cost", "timing", positive=False),
        iteration_cost=number(timing, "iteration_cost", "timing", positive=False),
    )


def _check_endpoint(
    reader: _Reader, name: str, q: tuple[float, ...], robot: RobotModel, bounds: SamplingBounds, checker: CollisionChecker
) -> None:
    config = np.asarray(q)
    try:
        robot.validate(config)
    except ContractViolation as e:
        raise reader.error(name, str(e)) from None
    if not bounds.contains(config):
        raise reader.error(name, "lies outside the space bounds")
    if not checker.config_free(config):
        raise reader.error(name, "is in collision with a static obstacle")


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Parses and validates a scenario document.

    Parameters
    ----------
    text : str
        The YAML document.
    source : str, optional
        The name reported in errors, by default ``"<scenario>"``.

    Returns
    -------
    Scenario
        The validated scenario.

    Raises
    ------
    ScenarioError
        The document cannot be parsed or fails validation.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = None if mark is None else mark.line + 1
        raise ScenarioError(f"invalid YAML: {getattr(e, 'problem', e)}", source=source, line=line) from None

    reader = _Reader(root, source)
    data: ScenarioData = reader.mapping(raw, "")  # type: ignore[assignment]

    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise reader.error("name", "expected a non-empty string")

    robot = _parse_robot(reader, reader.mapping(data.get("robot"), "robot"))
    if "space" in data:
        space: SpaceData = reader.mapping(data["space"], "space")  # type: ignore[assignment]
        try:
            bounds = SamplingBounds(
                reader.vector(space.get("lower"), "space.lower", robot.dimension),
                reader.vector(space.get("upper"), "space.upper", robot.dimension),
            )
        except ContractViolation as e:
            raise reader.error("space", str(e)) from None
    elif robot.is_point:
        raise reader.error("space", "a point robot needs explicit space bounds")
    else:
        bounds = SamplingBounds.for_robot(robot)

    static_boxes = _parse_boxes(reader, data.get("obstacles"))
    budget = _parse_budget(reader, reader.mapping(data.get("budget"), "budget"))
    settings = _parse_settings(reader, robot, bounds, budget, data)

    start = reader.vector(data.get("start"), "start", robot.dimension)
    goal = reader.vector(data.get("goal"), "goal", robot.dimension)
    checker = CollisionChecker(CollisionWorld(static_boxes=static_boxes).snapshot(0.0), robot, settings.resolution)
    _check_endpoint(reader, "start", start, robot, bounds, checker)
    _check_endpoint(reader, "goal", goal, robot, bounds, checker)

    planner = reader.mapping(data.get("planner"), "planner")
    planning = PlanningSpec(
        initial_time=reader.number(planner.get("initial_time", DEFAULT_INITIAL_TIME), "planner.initial_time", positive=True),
        optimization_time=reader.number(
            planner.get("optimization_time", DEFAULT_OPTIMIZATION_TIME), "planner.optimization_time", minimum=0.0
        ),
    )
    spawns, occupied_edge_auto, spawn_lead = _parse_spawns(reader, reader.mapping(data.get("spawns"), "spawns"), settings.time_limit)

    return Scenario(
        name=name,
        source=source,
        seed=reader.integer(data.get("seed", 0), "seed"),
        trials=reader.integer(data.get("trials", 30), "trials"),
        path_count=reader.integer(data.get("paths", 4), "paths", minimum=2),
        robot=robot,
        bounds=bounds,
        start=start,
        goal=goal,
        static_boxes=static_boxes,
        budget=budget,
        settings=settings,
        planning=planning,
        spawns=spawns,
        occupied_edge_auto=occupied_edge_auto,
        spawn_lead=spawn_lead,
    )


def load_scenario(path: str | FilePath) -> Scenario:
    """Reads and validates a scenario file.

    Raises
    ------
    ScenarioError
        The file is missing, cannot be parsed, or fails validation.
    """
    path = FilePath(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read the file: {e.strerror}", source=str(path)) from None
    return parse_scenario(text, source=str(path))


# endregion
