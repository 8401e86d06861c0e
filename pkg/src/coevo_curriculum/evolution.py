"""Curriculum population lifecycle: init, pairing, crossover, mutation, selection."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .fitness import PrototypeSet, knn_estimate
from .tasks import BLOCK_SIZE, TaskDomain, TaskGenome, clip_to_domain

ORIGIN_INIT = "init"
ORIGIN_CROSS = "cross"
ORIGIN_MUTATE = "mutate"

# Call counts per evolution operation; mode audits assert the vanilla
# baseline never touches any of these.
OP_COUNTS: Counter = Counter()


def reset_op_counts() -> None:
    OP_COUNTS.clear()


def op_counts() -> dict[str, int]:
    return dict(OP_COUNTS)


@dataclass(eq=False)
class TaskRecord:
    """One task with its latest measurement.

    ``r`` is non-None only while the record holds a success rate measured in
    the current epoch; ``f`` is then fitness(r), otherwise a nearest-prototype
    estimate (or None before the first assignment).
    """

    genome: TaskGenome
    r: float | None = None
    f: float | None = None
    epoch_born: int = 0
    origin: str = ORIGIN_INIT

    def clone(self, clear_measurement: bool = False) -> "TaskRecord":
        r = None if clear_measurement else self.r
        return TaskRecord(self.genome, r, self.f, self.epoch_born, self.origin)


@dataclass
class Population:
    """Active generation plus an archive of every earlier record, by generation."""

    active: list[TaskRecord]
    archive: dict[int, list[TaskRecord]] = field(default_factory=dict)
    epoch: int = 0

    def archive_size(self) -> int:
        return sum(len(bucket) for bucket in self.archive.values())

    def archived_records(self) -> list[TaskRecord]:
        """Archive pooled across generations, in stable (generation, insertion) order."""
        pooled: list[TaskRecord] = []
        for epoch in sorted(self.archive):
            pooled.extend(self.archive[epoch])
        return pooled

    def move_to_archive(self, records: list[TaskRecord]) -> None:
        """Retire records from the active generation into the current-epoch bucket."""
        if not records:
            return
        active_ids = {id(rec) for rec in self.active}
        for rec in records:
            if id(rec) not in active_ids:
                raise ValueError("can only retire records that are currently active")
        doomed = {id(rec) for rec in records}
        bucket = self.archive.setdefault(self.epoch, [])
        bucket.extend(rec for rec in self.active if id(rec) in doomed)
        self.active = [rec for rec in self.active if id(rec) not in doomed]


@dataclass(frozen=True)
class EvolutionParams:
    population_size: int = 64
    batch_size: int = 16
    new_fraction: float = 0.7
    knn_k: int = 4
    mutation_scale: float = 0.15
    deletion_band: tuple[float, float] = (0.02, 0.98)
    adaptive_mutation: bool = True

    def __post_init__(self) -> None:
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population size must be even and at least 2")
        if not 1 <= self.batch_size <= self.population_size:
            raise ValueError("batch size must lie in [1, population_size]")
        if not 0.0 <= self.new_fraction <= 1.0:
            raise ValueError("new fraction must lie in [0, 1]")
        if not 1 <= self.knn_k <= self.batch_size:
            raise ValueError("knn_k must lie in [1, batch_size]")
        if self.mutation_scale < 0.0:
            raise ValueError("mutation scale cannot be negative")
        low, high = self.deletion_band
        if not 0.0 <= low < high <= 1.0:
            raise ValueError("deletion band must satisfy 0 <= low < high <= 1")


def init_population(domain: TaskDomain, population_size: int,
                    rng: np.random.Generator) -> Population:
    """Fresh generation of near-trivial tasks.

    Starts are uniform over the unit square; each goal is uniform inside the
    disk of radius ``domain.distance_threshold`` around its start, clamped to
    the box.  Clamping projects onto a convex set containing the start, so
    the mean start-goal distance stays strictly below the threshold.
    """
    OP_COUNTS["init_population"] += 1
    if population_size < 2 or population_size % 2:
        raise ValueError("population size must be even and at least 2")
    records = []
    for _ in range(population_size):
        blocks = np.empty((domain.n_agents, BLOCK_SIZE), dtype=float)
        for j in range(domain.n_agents):
            start = rng.random(2)
            radius = domain.distance_threshold * math.sqrt(rng.random())
            angle = 2.0 * math.pi * rng.random()
            goal = start + radius * np.array([math.cos(angle), math.sin(angle)])
            blocks[j, :2] = start
            blocks[j, 2:] = goal
        genome = clip_to_domain(TaskGenome(blocks))
        records.append(TaskRecord(genome, epoch_born=0, origin=ORIGIN_INIT))
    return Population(active=records)


def pair_generation(records: list[TaskRecord],
                    rng: np.random.Generator) -> list[tuple[TaskRecord, TaskRecord]]:
    """Shuffle and split into halves; pair i-th of each half."""
    OP_COUNTS["pair_generation"] += 1
    if len(records) % 2:
        raise ValueError("cannot pair an odd number of records")
    order = rng.permutation(len(records))
    shuffled = [records[int(i)] for i in order]
    half = len(shuffled) // 2
    return list(zip(shuffled[:half], shuffled[half:]))


def crossover_step(fitness_a: float, fitness_b: float, f_min: float, f_max: float) -> float:
    """|fa - fb| / (f_max - f_min); zero when the generation's fitness range collapses."""
    OP_COUNTS["crossover_step"] += 1
    if f_max == f_min:
        return 0.0
    return abs(fitness_a - fitness_b) / (f_max - f_min)


def sample_direction(task_a: TaskGenome, task_b: TaskGenome,
                     rng: np.random.Generator) -> np.ndarray:
    """Per-agent direction blocks: a fair coin per agent picks zero or (a - b)."""
    OP_COUNTS["sample_direction"] += 1
    if task_a.n_agents != task_b.n_agents:
        raise ValueError("parents must have the same number of agents")
    direction = np.zeros((task_a.n_agents, BLOCK_SIZE), dtype=float)
    for j in range(task_a.n_agents):
        if rng.random() >= 0.5:
            direction[j] = task_a.blocks[j] - task_b.blocks[j]
    return direction


def _shift(genome: TaskGenome, step: float, direction: np.ndarray) -> TaskGenome:
    # Copy the parent and touch only agents with a live direction, so gated-off
    # blocks stay bit-identical.
    blocks = genome.blocks.copy()
    if step != 0.0:
        moved = np.any(direction != 0.0, axis=1)
        if moved.any():
            blocks[moved] = np.clip(blocks[moved] + step * direction[moved], 0.0, 1.0)
    return TaskGenome(blocks)


def crossover(pair: tuple[TaskRecord, TaskRecord], f_min: float, f_max: float,
              rng: np.random.Generator) -> tuple[TaskGenome, TaskGenome]:
    """Two children shifted by the same step * direction, clamped into the box."""
    OP_COUNTS["crossover"] += 1
    rec_a, rec_b = pair
    if rec_a.f is None or rec_b.f is None:
        raise ValueError("crossover requires assigned fitness on both parents")
    step = crossover_step(rec_a.f, rec_b.f, f_min, f_max)
    direction = sample_direction(rec_a.genome, rec_b.genome, rng)
    return _shift(rec_a.genome, step, direction), _shift(rec_b.genome, step, direction)


def mutate(pair: tuple[TaskRecord, TaskRecord], f_min: float, f_max: float,
           params: EvolutionParams, rng: np.random.Generator) -> TaskGenome:
    """Perturb the first parent: each agent block gets, with probability 0.5,
    uniform noise from [-scale, scale]^4, then clamps into the box.

    With adaptive mutation the scale follows the pair's crossover step, so a
    collapsed fitness range freezes mutation too.
    """
    OP_COUNTS["mutate"] += 1
    rec_a, rec_b = pair
    if rec_a.f is None or rec_b.f is None:
        raise ValueError("mutation requires assigned fitness on both parents")
    if params.adaptive_mutation:
        scale = params.mutation_scale * crossover_step(rec_a.f, rec_b.f, f_min, f_max)
    else:
        scale = params.mutation_scale
    blocks = rec_a.genome.blocks.copy()
    for j in range(blocks.shape[0]):
        if rng.random() >= 0.5:
            delta = rng.uniform(-scale, scale, BLOCK_SIZE)
            blocks[j] = np.clip(blocks[j] + delta, 0.0, 1.0)
    return TaskGenome(blocks)


def delete_bad_tasks(records: list[TaskRecord],
                     band: tuple[float, float]) -> tuple[list[TaskRecord], list[TaskRecord]]:
    """Split measured records into (kept, removed) by the success-rate band.

    Removed means retired to the archive, not discarded; callers apply the
    move so no record is ever lost.
    """
    OP_COUNTS["delete_bad_tasks"] += 1
    low, high = band
    kept: list[TaskRecord] = []
    removed: list[TaskRecord] = []
    for rec in records:
        if rec.r is None:
            raise ValueError("deletion needs a measured success rate on every record")
        if rec.r < low or rec.r > high:
            removed.append(rec)
        else:
            kept.append(rec)
    return kept, removed


def assign_population_fitness(active: list[TaskRecord], trained: PrototypeSet, k: int) -> None:
    """Give every unmeasured active record the mean fitness of its k nearest
    trained prototypes; records measured this epoch keep their own fitness."""
    OP_COUNTS["assign_population_fitness"] += 1
    for rec in active:
        if rec.r is None:
            rec.f = knn_estimate(rec.genome.as_vector(), trained, k)


def evolve_generation(pop: Population, params: EvolutionParams,
                      rng: np.random.Generator) -> Population:
    """Produce the next generation and retire the current one to the archive.

    Each pair yields either a crossover child pair (coin > 0.5) or one
    mutation child.  The next generation keeps children first, then the
    fittest parents as fresh unmeasured copies, to exactly population_size.
    """
    OP_COUNTS["evolve_generation"] += 1
    active = pop.active
    if not active:
        # Every task left the difficulty band at once.  Rather than dying out,
        # breed from fresh copies of the latest archived generation.
        if not pop.archive:
            raise ValueError("cannot evolve an empty population with an empty archive")
        latest = pop.archive[max(pop.archive)]
        active = [rec.clone(clear_measurement=True) for rec in latest]
    if any(rec.f is None for rec in active):
        raise ValueError("every active record needs fitness before evolving")

    fitness_values = [rec.f for rec in active]
    f_min = min(fitness_values)
    f_max = max(fitness_values)

    # Mid-epoch deletions can leave an odd count; sideline one record from
    # pairing, it stays a refill candidate.
    if len(active) % 2:
        order = rng.permutation(len(active))
        pool = [active[int(i)] for i in order[:-1]]
    else:
        pool = active
    pairs = pair_generation(pool, rng) if len(pool) >= 2 else []

    next_epoch = pop.epoch + 1
    children: list[TaskRecord] = []
    for pair in pairs:
        if rng.random() > 0.5:
            child_a, child_b = crossover(pair, f_min, f_max, rng)
            children.append(TaskRecord(child_a, epoch_born=next_epoch, origin=ORIGIN_CROSS))
            children.append(TaskRecord(child_b, epoch_born=next_epoch, origin=ORIGIN_CROSS))
        else:
            child = mutate(pair, f_min, f_max, params, rng)
            children.append(TaskRecord(child, epoch_born=next_epoch, origin=ORIGIN_MUTATE))

    next_active = children[:params.population_size]
    if len(next_active) < params.population_size:
        ranked = sorted(active, key=lambda rec: -rec.f)
        for rec in ranked:
            if len(next_active) == params.population_size:
                break
            next_active.append(rec.clone(clear_measurement=True))
        # Only reachable after extreme mid-epoch deletion: recycle candidates.
        while len(next_active) < params.population_size:
            for rec in children + ranked:
                if len(next_active) == params.population_size:
                    break
                next_active.append(rec.clone(clear_measurement=True))

    archive = dict(pop.archive)
    bucket = list(archive.get(pop.epoch, []))
    # pop.active, not the breeding stock: rebreeding clones never started life
    # as real generation members, their originals are archived already.
    bucket.extend(pop.active)
    archive[pop.epoch] = bucket
    return Population(active=next_active, archive=archive, epoch=next_epoch)


def soft_select(pop: Population, params: EvolutionParams,
                rng: np.random.Generator) -> list[TaskRecord]:
    """Training batch: round(batch_size * new_fraction) tasks sampled uniformly
    from the active generation, the rest uniformly from the pooled archive.

    Archive shortfall (including the first epoch's empty archive) is covered
    from the active generation.
    """
    OP_COUNTS["soft_select"] += 1
    if not pop.active:
        raise ValueError("cannot select from an empty population")
    if params.batch_size > len(pop.active):
        raise ValueError("batch size exceeds the active generation")
    n_new = int(round(params.batch_size * params.new_fraction))
    n_old = params.batch_size - n_new
    old_pool = pop.archived_records()
    if len(old_pool) < n_old:
        n_old = len(old_pool)
        n_new = params.batch_size - n_old
    batch: list[TaskRecord] = []
    new_indices = rng.choice(len(pop.active), size=n_new, replace=False)
    batch.extend(pop.active[int(i)] for i in new_indices)
    if n_old:
        old_indices = rng.choice(len(old_pool), size=n_old, replace=False)
        batch.extend(old_pool[int(i)] for i in old_indices)
    return batch
