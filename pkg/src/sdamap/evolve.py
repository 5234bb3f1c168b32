"""Steady-state evolutionary search over automaton genomes.

Each mating event samples seven distinct population members; the two
fittest cross over, their children take a random number of mutations
each, replace the two least fit of the sample in place, and are scored
immediately. One seeded random stream drives a whole run, so a run is a
pure function of its configuration and seed.
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from sdamap.kernel import Evaluator
from sdamap.mapgen import BuilderConfig, centered_rect
from sdamap.sda import SdaGenome, mutate, random_genome, two_point_crossover

TOURNAMENT_SIZE = 7

RUNS_CSV_HEADER = ["experiment", "run", "seed", "best_fitness", "rooms_placed", "area", "bbox_area"]
SUMMARY_CSV_HEADER = ["experiment", "min", "q1", "median", "q3", "max"]


@dataclass(frozen=True)
class EaConfig:
    """Search parameters. max_mutations is the MNM knob: each child gets
    a mutation count drawn uniformly from 1..max_mutations."""

    population_size: int = 32
    max_mutations: int = 1
    num_states: int = 12
    mating_events: int = 10_000
    builder: BuilderConfig = field(default_factory=BuilderConfig)

    def __post_init__(self) -> None:
        if self.population_size < TOURNAMENT_SIZE:
            raise ValueError(
                f"population must hold a {TOURNAMENT_SIZE}-way tournament, "
                f"got {self.population_size}"
            )
        if self.max_mutations < 1:
            raise ValueError("max_mutations must be at least 1")
        if self.num_states < 1:
            raise ValueError("num_states must be at least 1")
        if self.mating_events < 0:
            raise ValueError("mating_events cannot be negative")


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run: champion genome plus its map statistics."""

    seed: int
    best_genome: SdaGenome
    best_fitness: float
    fitness_trace: tuple[tuple[int, float], ...]
    rooms_placed: int
    area: int
    bbox_area: int


def tournament_event(population, fitnesses, rng, config, score):
    """One steady-state update in place. Returns the two replaced slots.

    Ranking is by fitness descending with ties broken toward the lower
    population index, so the same sample always picks the same parents
    and the same casualties. The worst slot takes the first child.
    """
    picks = rng.sample(range(len(population)), TOURNAMENT_SIZE)
    ranked = sorted(picks, key=lambda i: (-fitnesses[i], i))
    c1, c2 = two_point_crossover(population[ranked[0]], population[ranked[1]], rng)
    for _ in range(rng.randint(1, config.max_mutations)):
        c1 = mutate(c1, rng)
    for _ in range(rng.randint(1, config.max_mutations)):
        c2 = mutate(c2, rng)
    w1, w2 = ranked[-1], ranked[-2]
    population[w1] = c1
    fitnesses[w1] = score(c1)
    population[w2] = c2
    fitnesses[w2] = score(c2)
    return w1, w2


def run_ea(config: EaConfig, seed: int) -> RunResult:
    """Run the full search for one seed and return the champion."""
    rng = random.Random(seed)
    evaluator = Evaluator(config.builder)

    def score(genome):
        return evaluator.stats(genome).fitness

    population = [random_genome(config.num_states, rng) for _ in range(config.population_size)]
    fitnesses = [score(g) for g in population]
    best_slot = min(range(len(population)), key=lambda i: (-fitnesses[i], i))
    best_genome = population[best_slot]
    best_fitness = fitnesses[best_slot]
    trace = [(0, best_fitness)]
    for event in range(1, config.mating_events + 1):
        for slot in tournament_event(population, fitnesses, rng, config, score):
            if fitnesses[slot] > best_fitness:
                best_fitness = fitnesses[slot]
                best_genome = population[slot]
        if best_fitness > trace[-1][1]:
            trace.append((event, best_fitness))
    stats = evaluator.stats(best_genome)
    return RunResult(
        seed=seed,
        best_genome=best_genome,
        best_fitness=best_fitness,
        fitness_trace=tuple(trace),
        rooms_placed=stats.rooms,
        area=stats.area,
        bbox_area=stats.bbox_area,
    )


STANDARD_POPS = (10, 32, 100, 320, 1000)
STANDARD_MNMS = (1, 3, 5)
RRH_STATE_SWEEP = (4, 8, 12, 16, 20)


def experiment_config(exp_id: int) -> EaConfig:
    """Return the stock configuration for experiment ids 1..23.

    1..15 sweep population {10, 32, 100, 320, 1000} against MNM
    {1, 3, 5} at 12 states on the plain selector. 16 repeats 32/1 with
    the recent-room window on; 17..21 sweep the state count
    {4, 8, 12, 16, 20} with the window on; 22 is the long large-grid
    run (16 states, 100k events, 120x120, 800 rooms); 23 swaps in a
    40x2 start room.
    """
    if not 1 <= exp_id <= 23:
        raise ValueError(f"experiment id must be 1..23, got {exp_id}")
    if exp_id <= 15:
        return EaConfig(
            population_size=STANDARD_POPS[(exp_id - 1) % 5],
            max_mutations=STANDARD_MNMS[(exp_id - 1) // 5],
        )
    if exp_id == 16:
        return EaConfig(builder=BuilderConfig(rrh_enabled=True))
    if exp_id <= 21:
        return EaConfig(
            num_states=RRH_STATE_SWEEP[exp_id - 17],
            builder=BuilderConfig(rrh_enabled=True),
        )
    if exp_id == 22:
        return EaConfig(
            num_states=16,
            mating_events=100_000,
            builder=BuilderConfig(width=120, height=120, max_rooms=800, rrh_enabled=True),
        )
    return EaConfig(
        num_states=16,
        builder=BuilderConfig(rrh_enabled=True, initial_rooms=(centered_rect(80, 80, 40, 2),)),
    )


def run_seeds(master_seed: int, runs: int) -> tuple[int, ...]:
    """Derive per-run seeds: drawn up front from one generator seeded with
    the master seed, so run k's seed never depends on how runs execute."""
    rng = random.Random(master_seed)
    return tuple(rng.getrandbits(64) for _ in range(runs))


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    config: EaConfig
    master_seed: int
    runs: tuple[RunResult, ...]

    def best_fitnesses(self) -> list[float]:
        return [r.best_fitness for r in self.runs]

    def summary(self) -> tuple[float, float, float, float, float]:
        """min, q1, median, q3, max of the per-run best fitness
        (linear-interpolation percentiles)."""
        q = np.percentile(self.best_fitnesses(), (0, 25, 50, 75, 100))
        return tuple(float(v) for v in q)


def _one_run(args):
    config, seed = args
    return run_ea(config, seed)


def run_experiment(
    config: EaConfig,
    runs: int = 30,
    master_seed: int = 1,
    name: str = "custom",
    jobs: int = 1,
) -> ExperimentResult:
    """Execute independent runs and collect them in run order.

    Results are keyed to pre-drawn seeds, so any jobs count produces
    byte-identical downstream artifacts.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seeds = run_seeds(master_seed, runs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = tuple(pool.map(_one_run, [(config, s) for s in seeds]))
    else:
        results = tuple(run_ea(config, s) for s in seeds)
    return ExperimentResult(name=name, config=config, master_seed=master_seed, runs=results)


def write_runs_csv(path, result: ExperimentResult) -> None:
    """One row per run: experiment, run, seed, best_fitness, rooms_placed,
    area, bbox_area."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUNS_CSV_HEADER)
        for i, r in enumerate(result.runs):
            writer.writerow(
                [result.name, i, r.seed, repr(r.best_fitness), r.rooms_placed, r.area, r.bbox_area]
            )


def write_summary_csv(path, results) -> None:
    """One row per experiment: experiment, min, q1, median, q3, max."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_CSV_HEADER)
        for result in results:
            writer.writerow([result.name] + [repr(v) for v in result.summary()])
