"""Self-driving bit automata: genomes, streams, and variation operators.

A genome is a finite list of states. Each state carries a short emission
string (one or two bits) and one transition target per input bit. The
automaton drives itself: emitted bits are queued and later consumed as
its own input, so a genome unrolls into an unbounded bit stream with no
external input at all.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

MAX_INT_BITS = 16
EMISSION_LENGTHS = (1, 2)


def _check_emission(bits: str) -> None:
    if len(bits) not in EMISSION_LENGTHS or any(c not in "01" for c in bits):
        raise ValueError(f"emission must be 1 or 2 bits of 0/1, got {bits!r}")


@dataclass(frozen=True)
class StateRecord:
    """One automaton state: emission bits plus a transition per input bit."""

    emission: str
    next_on_0: int
    next_on_1: int


@dataclass(frozen=True)
class SdaGenome:
    """Immutable automaton genome.

    ``initial_emission`` seeds the queue before any transition fires and
    rides with state 0 during crossover.
    """

    initial_emission: str
    states: tuple[StateRecord, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("genome needs at least one state")
        _check_emission(self.initial_emission)
        n = len(self.states)
        for i, s in enumerate(self.states):
            _check_emission(s.emission)
            for t in (s.next_on_0, s.next_on_1):
                if not 0 <= t < n:
                    raise ValueError(f"state {i}: transition target {t} out of range 0..{n - 1}")

    @property
    def num_states(self) -> int:
        return len(self.states)


class SdaStream:
    """Incremental bit stream produced by a genome driving itself.

    The queue starts out holding the initial emission. Each ``next_bit``
    pops one bit, feeds it to the current state's transition, queues the
    entered state's emission, and returns the popped bit. The queue can
    never run dry: every consumed bit queues at least one fresh bit.
    """

    __slots__ = (
        "_emissions",
        "_next0",
        "_next1",
        "_queue",
        "current_state",
        "emitted_count",
        "consumed_count",
    )

    def __init__(self, genome: SdaGenome):
        self._emissions = tuple(tuple(int(c) for c in s.emission) for s in genome.states)
        self._next0 = tuple(s.next_on_0 for s in genome.states)
        self._next1 = tuple(s.next_on_1 for s in genome.states)
        self._queue = deque(int(c) for c in genome.initial_emission)
        self.current_state = 0
        self.emitted_count = len(self._queue)
        self.consumed_count = 0

    def queue_length(self) -> int:
        return len(self._queue)

    def next_bit(self) -> int:
        b = self._queue.popleft()
        s = self._next1[self.current_state] if b else self._next0[self.current_state]
        self.current_state = s
        e = self._emissions[s]
        self._queue.extend(e)
        self.emitted_count += len(e)
        self.consumed_count += 1
        return b

    def next_int(self, k: int) -> int:
        """Consume k bits (most significant first) and fold them into an int."""
        if not 1 <= k <= MAX_INT_BITS:
            raise ValueError(f"bit count must be in 1..{MAX_INT_BITS}, got {k}")
        v = 0
        for _ in range(k):
            v = (v << 1) | self.next_bit()
        return v


def random_emission(rng: random.Random) -> str:
    """Fresh emission: length uniform on {1, 2}, bits uniform."""
    length = rng.randint(1, 2)
    return "".join("1" if rng.randint(0, 1) else "0" for _ in range(length))


def random_genome(num_states: int, rng: random.Random) -> SdaGenome:
    """Uniform random genome.

    Draw order is fixed for reproducibility: initial emission first, then
    for each state its emission, next_on_0, next_on_1.
    """
    if num_states < 1:
        raise ValueError(f"num_states must be at least 1, got {num_states}")
    init = random_emission(rng)
    states = []
    for _ in range(num_states):
        emission = random_emission(rng)
        n0 = rng.randrange(num_states)
        n1 = rng.randrange(num_states)
        states.append(StateRecord(emission, n0, n1))
    return SdaGenome(init, tuple(states))


def two_point_crossover(
    a: SdaGenome, b: SdaGenome, rng: random.Random
) -> tuple[SdaGenome, SdaGenome]:
    """Swap the state segment between two cuts drawn uniformly in [0, n].

    Cuts may coincide, in which case the children are copies of the
    parents. The initial emission is exchanged exactly when the swapped
    segment contains state 0.
    """
    if a.num_states != b.num_states:
        raise ValueError("parents must have the same number of states")
    n = a.num_states
    c1 = rng.randint(0, n)
    c2 = rng.randint(0, n)
    lo, hi = min(c1, c2), max(c1, c2)
    sa, sb = list(a.states), list(b.states)
    sa[lo:hi], sb[lo:hi] = sb[lo:hi], sa[lo:hi]
    ia, ib = a.initial_emission, b.initial_emission
    if lo == 0 and hi > 0:
        ia, ib = ib, ia
    return SdaGenome(ia, tuple(sa)), SdaGenome(ib, tuple(sb))


def mutate(g: SdaGenome, rng: random.Random) -> SdaGenome:
    """Rewrite one locus drawn uniformly from the 3n+1 mutable loci.

    Loci 0..n-1 are the state emissions, loci n..3n-1 are the transitions
    (two per state, next_on_0 first), locus 3n is the initial emission.
    Rewrites draw fresh values, so the result may equal the input.
    """
    n = g.num_states
    locus = rng.randrange(3 * n + 1)
    if locus < n:
        s = g.states[locus]
        states = list(g.states)
        states[locus] = StateRecord(random_emission(rng), s.next_on_0, s.next_on_1)
        return SdaGenome(g.initial_emission, tuple(states))
    if locus < 3 * n:
        i, which = divmod(locus - n, 2)
        target = rng.randrange(n)
        s = g.states[i]
        states = list(g.states)
        if which == 0:
            states[i] = StateRecord(s.emission, target, s.next_on_1)
        else:
            states[i] = StateRecord(s.emission, s.next_on_0, target)
        return SdaGenome(g.initial_emission, tuple(states))
    return SdaGenome(random_emission(rng), g.states)
