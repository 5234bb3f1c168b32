"""Acceptance gate: one test per shipping criterion, at stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion; a failing criterion fails its test. Expensive artifacts
(the 100-map determinism corpus, the reduced evolution studies) are
computed once and shared across criteria.
"""

from __future__ import annotations

import random
import time

import numpy as np

from oracles import (
    all_rooms_connected,
    bbox_by_scan,
    check_placement_invariants,
    ring_mask,
)
from sdamap.evolve import EaConfig, run_ea, run_experiment
from sdamap.kernel import Evaluator
from sdamap.mapgen import (
    PROPOSAL_BITS,
    PROPOSAL_BITS_RRH,
    BuilderConfig,
    build_map,
)
from sdamap.sda import SdaGenome, SdaStream, StateRecord, random_genome
from sdamap.textio import render_map_text

_cache: dict = {}


def corpus():
    """100 random 12-state genomes and their default-config maps, built twice."""
    if "corpus" not in _cache:
        genomes = [random_genome(12, random.Random(seed)) for seed in range(100)]
        cfg = BuilderConfig()
        first = [build_map(g, cfg) for g in genomes]
        second = [build_map(g, cfg) for g in genomes]
        _cache["corpus"] = (genomes, cfg, first, second)
    return _cache["corpus"]


REDUCED_RUNS = 10
REDUCED_EVENTS = 2000
_STUDY_CONFIGS = {
    "plain32": EaConfig(population_size=32, max_mutations=1, num_states=12,
                        mating_events=REDUCED_EVENTS),
    "plain10": EaConfig(population_size=10, max_mutations=1, num_states=12,
                        mating_events=REDUCED_EVENTS),
    "rrh32": EaConfig(population_size=32, max_mutations=1, num_states=12,
                      mating_events=REDUCED_EVENTS,
                      builder=BuilderConfig(rrh_enabled=True)),
    "rrh_s4": EaConfig(population_size=32, max_mutations=1, num_states=4,
                       mating_events=REDUCED_EVENTS,
                       builder=BuilderConfig(rrh_enabled=True)),
    "rrh_s16": EaConfig(population_size=32, max_mutations=1, num_states=16,
                        mating_events=REDUCED_EVENTS,
                        builder=BuilderConfig(rrh_enabled=True)),
}


def study(key):
    """Reduced evolution study, 10 runs at master seed 1; cached with its
    wall-clock cost."""
    if key not in _cache:
        t0 = time.perf_counter()
        result = run_experiment(_STUDY_CONFIGS[key], runs=REDUCED_RUNS, master_seed=1, name=key)
        _cache[key] = result
        _cache[f"time:{key}"] = time.perf_counter() - t0
    return _cache[key]


def median_best(key):
    return float(np.median(study(key).best_fitnesses()))


def test_criterion_1_documented_determinism():
    genomes, _, first, second = corpus()
    for a, b in zip(first, second):
        assert render_map_text(a) == render_map_text(b)
    for g in genomes:
        s1, s2 = SdaStream(g), SdaStream(g)
        assert [s1.next_bit() for _ in range(10_000)] == [s2.next_bit() for _ in range(10_000)]
    print("\ncriterion 1: PASS - 100 genomes build byte-identical dumps twice; "
          "paired streams agree on 10k bits")


def test_criterion_2_stream_oracle_and_connectivity():
    # Hand-simulated two-state machine: state 0 emits "0" and always
    # hops to state 1, which emits "1" and always hops back; seeded
    # with "0" the output alternates 0,1,0,1,... forever.
    flip = SdaGenome("0", (StateRecord("0", 1, 1), StateRecord("1", 0, 0)))
    queue, state, expect = [0], 0, []
    for _ in range(64):
        bit = queue.pop(0)
        state = (flip.states[state].next_on_0, flip.states[state].next_on_1)[bit]
        queue.extend(int(c) for c in flip.states[state].emission)
        expect.append(bit)
    s = SdaStream(flip)
    got = [s.next_bit() for _ in range(64)]
    assert got == expect
    assert got == [0, 1] * 32

    _, _, first, _ = corpus()
    for level in first:
        assert all_rooms_connected(level)
    print("criterion 2: PASS - 64-bit hand-simulated oracle matches; "
          "100 random maps flood-fill connected")


def test_criterion_3_fitness_exactness():
    level = build_map(random_genome(12, random.Random(0)), BuilderConfig(max_rooms=1))
    assert level.fitness() == 16.0

    # fully packed bounding boxes must score exactly their area
    packed = 0
    for w, h in ((1, 1), (2, 2), (3, 2), (2, 7), (4, 4), (5, 3), (9, 2), (6, 6),
                 (11, 3), (1, 13), (16, 1), (8, 5)):
        cfg = BuilderConfig(width=w + 4, height=h + 4, max_rooms=1,
                            initial_rooms=((2, 2, w, h),))
        assert build_map(random_genome(4, random.Random(1)), cfg).fitness() == float(w * h)
        packed += 1
    # packed boxes tiled from several rooms
    tilings = [
        ((0, 0, 3, 4), (3, 0, 2, 4)),
        ((0, 0, 5, 2), (0, 2, 5, 3)),
        ((0, 0, 4, 4), (4, 0, 4, 4)),
        ((0, 0, 2, 2), (2, 0, 2, 2), (0, 2, 2, 2), (2, 2, 2, 2)),
        ((0, 0, 6, 1), (0, 1, 6, 1), (0, 2, 6, 2)),
        ((0, 0, 1, 5), (1, 0, 2, 5), (3, 0, 3, 5)),
        ((0, 0, 8, 3), (8, 0, 1, 3)),
        ((0, 0, 3, 3), (3, 0, 3, 3), (0, 3, 6, 3)),
    ]
    for rooms in tilings:
        area = sum(w * h for _, _, w, h in rooms)
        cfg = BuilderConfig(width=20, height=20, max_rooms=len(rooms), initial_rooms=rooms)
        assert build_map(random_genome(4, random.Random(2)), cfg).fitness() == float(area)
        packed += 1
    assert packed == 20
    print("criterion 3: PASS - start-only map scores exactly 16; "
          "20 packed boxes score exactly their area")


def test_criterion_4_placement_invariants():
    # reduced proposal budget keeps the 2,000-build sweep near a minute;
    # the invariants checked are budget-independent
    plain = BuilderConfig(proposal_budget=1200)
    masked = BuilderConfig(proposal_budget=1200, forbidden_mask=ring_mask(80, 80, 10))
    for seed in range(1000):
        g = random_genome(12, random.Random(1000 + seed))
        for cfg in (plain, masked):
            level = build_map(g, cfg)
            check_placement_invariants(level, cfg)
            assert level.bounding_box() == bbox_by_scan(level)
    print("criterion 4: PASS - zero violations over 1,000 genomes, "
          "with and without masks")


def test_criterion_5_recent_room_window_uplift():
    plain, windowed = median_best("plain32"), median_best("rrh32")
    elapsed = _cache["time:plain32"] + _cache["time:rrh32"]
    assert elapsed < 600, f"criterion 5 budget blown: {elapsed:.0f}s"
    assert windowed >= 1.2 * plain, f"uplift {windowed / plain:.3f} below 1.2"
    print(f"criterion 5: PASS - recent-room window median {windowed:.0f} vs {plain:.0f} "
          f"(x{windowed / plain:.2f} >= 1.2) in {elapsed:.0f}s")


def test_criterion_6_population_size_ordering():
    small, standard = median_best("plain10"), median_best("plain32")
    assert small < standard, f"pop 10 median {small:.1f} not below pop 32 {standard:.1f}"
    print(f"criterion 6: PASS - pop 10 median {small:.0f} < pop 32 median {standard:.0f}")


def test_criterion_7_state_count_ordering():
    few, many = median_best("rrh_s4"), median_best("rrh_s16")
    assert few < many, f"4-state median {few:.1f} not below 16-state {many:.1f}"
    print(f"criterion 7: PASS - 4-state median {few:.0f} < 16-state median {many:.0f}")


def test_criterion_8_large_arena_long_run():
    cfg = EaConfig(
        population_size=32,
        max_mutations=1,
        num_states=16,
        mating_events=10_000,
        builder=BuilderConfig(width=120, height=120, max_rooms=800, rrh_enabled=True),
    )
    t0 = time.perf_counter()
    result = run_ea(cfg, seed=1)
    elapsed = time.perf_counter() - t0
    _cache["long_run"] = result
    assert elapsed < 300, f"criterion 8 budget blown: {elapsed:.0f}s"

    level = build_map(result.best_genome, cfg.builder)
    again = build_map(result.best_genome, cfg.builder)
    assert render_map_text(level) == render_map_text(again)
    assert level.fitness() == result.best_fitness
    check_placement_invariants(level, cfg.builder)
    assert all_rooms_connected(level)
    assert len(level.rooms) <= 800
    print(f"criterion 8: PASS - 120x120/800-room/10k-event run in {elapsed:.0f}s; "
          f"replay exact, invariants hold ({len(level.rooms)} rooms, "
          f"fitness {result.best_fitness:.0f})")


def test_criterion_9_bit_budget():
    _, _, first, _ = corpus()
    for level in first:
        assert level.bits_consumed == PROPOSAL_BITS * level.proposed
    windowed = BuilderConfig(width=40, height=40, proposal_budget=150, rrh_enabled=True)
    for seed in range(100):
        level = build_map(random_genome(12, random.Random(seed)), windowed)
        assert level.bits_consumed == PROPOSAL_BITS_RRH * level.proposed
    print("criterion 9: PASS - exactly 20 bits per proposal "
          "(16 with the recent-room window) on 100 genomes each")


def test_criterion_10_trace_monotonicity():
    runs = [run for key in _STUDY_CONFIGS for run in study(key).runs]
    runs.append(_cache.get("long_run") or run_ea(
        EaConfig(population_size=8, mating_events=50,
                 builder=BuilderConfig(width=40, height=40, max_rooms=30,
                                       proposal_budget=200)), seed=3))
    for run in runs:
        trace = run.fitness_trace
        assert trace[0][0] == 0
        assert all(a[0] < b[0] for a, b in zip(trace, trace[1:]))
        assert all(a[1] <= b[1] for a, b in zip(trace, trace[1:]))
        assert trace[-1][1] == run.best_fitness
    print(f"criterion 10: PASS - {len(runs)} fitness traces are non-decreasing "
          "and anchored at event 0")
