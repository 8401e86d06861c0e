"""Task fitness from measured success rates, plus the nearest-prototype estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FITNESS_MODES = ("sigmoid", "linear")


@dataclass(frozen=True)
class FitnessParams:
    """Shape of the difficulty-to-fitness mapping.

    The sigmoid form peaks at success rate 0.5 so moderately hard tasks
    score highest.  ``literal_sign`` flips the exponent sign, which instead
    rewards the extremes; it exists for comparison runs only.
    """

    gain: float = 2.0
    mode: str = "sigmoid"
    linear_slope: float = 1.0
    literal_sign: bool = False

    def __post_init__(self) -> None:
        if self.mode not in FITNESS_MODES:
            raise ValueError(f"fitness mode must be one of {FITNESS_MODES}, got {self.mode!r}")
        if self.gain <= 0.0:
            raise ValueError("gain must be positive")
        if self.linear_slope <= 0.0:
            raise ValueError("linear slope must be positive")

    def evaluate(self, success_rate: float) -> float:
        if self.mode == "linear":
            return linear_fitness(success_rate, self)
        return sigmoid_fitness(success_rate, self)


def _check_rate(success_rate: float) -> None:
    if not 0.0 <= success_rate <= 1.0:
        raise ValueError(f"success rate must lie in [0, 1], got {success_rate}")


def sigmoid_fitness(success_rate: float, params: FitnessParams) -> float:
    """Fitness 1 / (1 + exp(gain * |r - 0.5|)), maximal (0.5) at r = 0.5."""
    _check_rate(success_rate)
    gap = abs(success_rate - 0.5)
    exponent = -params.gain * gap if params.literal_sign else params.gain * gap
    return 1.0 / (1.0 + math.exp(exponent))


def linear_fitness(success_rate: float, params: FitnessParams) -> float:
    """Ablation shape -slope * |r - 0.5|: same peak location, no saturation."""
    _check_rate(success_rate)
    return -params.linear_slope * abs(success_rate - 0.5)


@dataclass(frozen=True, eq=False)
class PrototypeSet:
    """Measured (genome vector, fitness) pairs serving as KNN anchors."""

    vectors: np.ndarray
    fitnesses: np.ndarray

    def __post_init__(self) -> None:
        vecs = np.ascontiguousarray(self.vectors, dtype=float)
        fits = np.ascontiguousarray(self.fitnesses, dtype=float)
        if vecs.ndim != 2:
            raise ValueError(f"prototype vectors must be 2-d, got shape {vecs.shape}")
        if fits.ndim != 1 or fits.shape[0] != vecs.shape[0]:
            raise ValueError("prototype fitnesses must align with vectors")
        if not np.isfinite(vecs).all() or not np.isfinite(fits).all():
            raise ValueError("prototypes must be finite")
        vecs.setflags(write=False)
        fits.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "fitnesses", fits)

    def __len__(self) -> int:
        return int(self.vectors.shape[0])


def knn_estimate(query, prototypes: PrototypeSet, k: int) -> float:
    """Mean fitness of the k prototypes closest to ``query`` in Euclidean distance.

    Distance ties resolve toward the lowest prototype index.
    """
    count = len(prototypes)
    if count == 0:
        raise ValueError("prototype set is empty")
    if not 1 <= k <= count:
        raise ValueError(f"k must lie in [1, {count}], got {k}")
    vector = np.asarray(query, dtype=float).reshape(-1)
    if vector.shape[0] != prototypes.vectors.shape[1]:
        raise ValueError("query dimension does not match prototypes")
    diffs = prototypes.vectors - vector
    squared = (diffs * diffs).sum(axis=1)
    order = np.argsort(squared, kind="stable")
    total = 0.0
    for idx in order[:k]:
        total += float(prototypes.fitnesses[idx])
    return total / k
