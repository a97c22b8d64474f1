from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path as FilePath

import numpy as np

from ..cspace import Box
from ..executor import EpisodeLog
from ..paths import dump_path

__all__ = (
    "INITIAL_PATH_PATTERN",
    "REPLANNED_PATH_PATTERN",
    "OBSTACLES_FILE",
    "TRAVERSED_FILE",
    "export_episode",
)


_log = logging.getLogger(__name__)


INITIAL_PATH_PATTERN = "initial-{index}.txt"
REPLANNED_PATH_PATTERN = "replanned-{index:03d}.txt"
OBSTACLES_FILE = "obstacles.txt"
TRAVERSED_FILE = "traversed.txt"


def _write_boxes(boxes: Sequence[Box], path: FilePath) -> None:
    rows = np.array(
        [(*box.center, *(2 * h for h in box.half_extents), np.nan if box.spawn_time is None else box.spawn_time) for box in boxes],
        dtype=np.float64,
    ).reshape(-1, 7)
    np.savetxt(path, rows, fmt="%.17g", header="cx cy cz sx sy sz spawn_time (nan for static boxes)")


def export_episode(log: EpisodeLog, out_dir: FilePath) -> list[FilePath]:
    """Writes plot-ready text dumps of an episode.

    One file per initial path and per accepted re-planned path, one with the obstacles and
    their spawn times, and one with the traversed configurations when the log has any.

    Parameters
    ----------
    log : EpisodeLog
        The episode.
    out_dir : FilePath
        The directory to write to; created if needed.

    Returns
    -------
    list[FilePath]
        The files written.

    Raises
    ------
    OSError
        A file could not be written.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[FilePath] = []

    for index, path in enumerate(log.initial_paths):
        target = out_dir / INITIAL_PATH_PATTERN.format(index=index)
        with target.open("w", encoding="utf-8") as f:
            dump_path(path, f)
        written.append(target)

    for index, path in enumerate(log.accepted_paths):
        target = out_dir / REPLANNED_PATH_PATTERN.format(index=index)
        with target.open("w", encoding="utf-8") as f:
            dump_path(path, f)
        written.append(target)

    target = out_dir / OBSTACLES_FILE
    _write_boxes([*log.static_boxes, *log.spawned_boxes], target)
    written.append(target)

    if log.states:
        target = out_dir / TRAVERSED_FILE
        rows = np.array([(t, *q) for t, q in log.states], dtype=np.float64)
        np.savetxt(target, rows, fmt="%.17g", header="time followed by the configuration")
        written.append(target)

    _log.debug("Exported %d files to %s", len(written), out_dir)
    return written
