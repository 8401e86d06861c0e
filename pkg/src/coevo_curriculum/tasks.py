"""Task genomes, the normalized task domain, and grid discretization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BLOCK_SIZE = 4  # per-agent [start_x, start_y, goal_x, goal_y]
UNIT_DIAMETER = math.sqrt(2.0)  # diagonal of the unit square each agent lives in
DEFAULT_DISTANCE_THRESHOLD = 0.01 * UNIT_DIAMETER


def _as_blocks(array) -> np.ndarray:
    out = np.ascontiguousarray(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class TaskGenome:
    """Per-agent [start, goal] coordinate blocks in normalized [0, 1] units.

    ``blocks`` has shape (n_agents, 4) with rows [sx, sy, gx, gy].
    Construction checks shape and finiteness only; out-of-range components
    are representable so that evolved children exist before repair, and
    ``clip_to_domain`` restores validity.
    """

    blocks: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_blocks(np.atleast_2d(self.blocks))
        if arr.ndim != 2 or arr.shape[1] != BLOCK_SIZE:
            raise ValueError(f"genome blocks must have shape (n, {BLOCK_SIZE}), got {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("genome needs at least one agent block")
        if not np.isfinite(arr).all():
            raise ValueError("genome components must be finite")
        object.__setattr__(self, "blocks", arr)

    @property
    def n_agents(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def in_domain(self) -> bool:
        return bool((self.blocks >= 0.0).all() and (self.blocks <= 1.0).all())

    def starts(self) -> np.ndarray:
        return self.blocks[:, :2]

    def goals(self) -> np.ndarray:
        return self.blocks[:, 2:]

    def as_vector(self) -> np.ndarray:
        """Flat 4n copy used for prototype distances and snapshots."""
        return self.blocks.reshape(-1).copy()

    @classmethod
    def from_vector(cls, vector, n_agents: int) -> "TaskGenome":
        arr = np.asarray(vector, dtype=float).reshape(n_agents, BLOCK_SIZE)
        return cls(arr)


@dataclass(frozen=True)
class TaskDomain:
    """Normalized unit-box task space tied to a W x W grid.

    ``distance_threshold`` bounds the mean start-goal distance of freshly
    initialized tasks; the default is one percent of the unit-square
    diagonal.
    """

    n_agents: int
    grid_width: int
    distance_threshold: float = DEFAULT_DISTANCE_THRESHOLD

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError("domain needs at least one agent")
        if self.grid_width < 2:
            raise ValueError("grid width must be at least 2")
        if not 0.0 < self.distance_threshold <= UNIT_DIAMETER:
            raise ValueError("distance threshold must lie in (0, sqrt(2)]")


def start_goal_distance(genome: TaskGenome) -> float:
    """Mean Euclidean start-goal distance across agent blocks."""
    deltas = genome.goals() - genome.starts()
    return float(np.sqrt((deltas * deltas).sum(axis=1)).mean())


def clip_to_domain(genome: TaskGenome) -> TaskGenome:
    """Clamp every component into [0, 1]; in-domain genomes pass through unchanged."""
    if genome.in_domain:
        return genome
    return TaskGenome(np.clip(genome.blocks, 0.0, 1.0))


def discretize(genome: TaskGenome, domain: TaskDomain) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Map a valid genome onto grid cells: floor(c * W), clamped to [0, W-1].

    Returns one ((start_x, start_y), (goal_x, goal_y)) cell pair per agent.
    """
    width = domain.grid_width
    cells = np.floor(genome.blocks * width).astype(int)
    np.clip(cells, 0, width - 1, out=cells)
    return [((int(row[0]), int(row[1])), (int(row[2]), int(row[3]))) for row in cells]


def opposite_corner_target(n_agents: int) -> TaskGenome:
    """Hardest default instance: distinct corner starts, opposite-corner goals."""
    corners = [(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)]
    blocks = []
    for j in range(n_agents):
        cx, cy = corners[j % len(corners)]
        blocks.append((cx, cy, 1.0 - cx, 1.0 - cy))
    return TaskGenome(np.array(blocks, dtype=float))
