from __future__ import annotations

import logging
from os import environ
from pathlib import Path

__all__ = ("Configuration",)


_TRUTHY = {"1", "true", "yes", "on"}
_FALSY = {"0", "false", "no", "off", ""}


def _get_bool(name: str, default: bool) -> bool:
    value = environ.get(name)
    if value is None:
        return default
    if value.lower() in _TRUTHY:
        return True
    if value.lower() in _FALSY:
        return False
    raise ValueError(f"{name} must be a boolean flag, got {value!r}.")


class Configuration:
    """Process-level settings shared by the command line and the services."""

    @property
    def log_level(self) -> int:
        """int: The root logging level."""
        name = environ.get("REROUTE_LOG_LEVEL", "INFO").upper()
        level = logging.getLevelNamesMapping().get(name)
        if level is None:
            raise ValueError(f"REROUTE_LOG_LEVEL is not a logging level: {name!r}.")
        return level

    @property
    def output_dir(self) -> Path:
        """Path: The directory protocol outputs are written under when ``--out`` is not given."""
        return Path(environ.get("REROUTE_OUTPUT_DIR", "out"))

    @property
    def scenario_dir(self) -> Path:
        """Path: The directory bare scenario names are resolved against."""
        return Path(environ.get("REROUTE_SCENARIO_DIR", "scenarios"))

    @property
    def seed(self) -> int | None:
        """int | None: A seed overriding the scenario seed, if set."""
        value = environ.get("REROUTE_SEED")
        if value is None:
            return None
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"REROUTE_SEED must be an integer, got {value!r}.") from None

    @property
    def wall_clock(self) -> bool:
        """bool: Whether episodes run against the wall clock instead of the simulated clock."""
        return _get_bool("REROUTE_WALL_CLOCK", False)

    def resolve_scenario(self, name: str | Path) -> Path:
        """Resolves a scenario argument to a file.

        Parameters
        ----------
        name : str | Path
            A path, or the bare name of a shipped scenario (``scene3d``).

        Returns
        -------
        Path
            The scenario file.
        """
        path = Path(name)
        if path.exists() or path.suffix:
            return path
        return self.scenario_dir / f"{path.name}.yaml"
