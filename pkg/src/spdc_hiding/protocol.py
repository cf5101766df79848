"""Hiding protocol: heralded pairs, parity encoding, sharing and decoding."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import gba
from .fock import FockState, path_modes, reduced_density, vacuum
from .gba import DEFAULT_CIRCUIT, ClickPattern, GbaCircuit
from .states import (
    GbaClass,
    SourceParams,
    class_probabilities,
    s1_weight,
    spdc_double_pass,
    theta,
    two_photon_sector_state,
)

HIDER_PATHS = (1, 3)
SHARED_PATHS = (2, 4)
ALICE_PATH, BOB_PATH = SHARED_PATHS


@dataclass(frozen=True)
class PairRecord:
    klass: GbaClass
    click: ClickPattern
    pair_state: FockState
    pulses_consumed: int
    s1_weight: float

    def __post_init__(self):
        if self.pair_state.photon_numbers() != {2}:
            raise ValueError("a heralded pair must carry exactly two photons")
        if {m.path for m in self.pair_state.modes()} - set(SHARED_PATHS):
            raise ValueError("pair state must live on the shared paths")


@dataclass(frozen=True)
class NoHerald:
    pulses_consumed: int
    detected: int


def _check_params(params: SourceParams):
    if params.truncation_order != 2:
        raise ValueError("the protocol model keeps exactly the terms up to two pairs")


@lru_cache(maxsize=None)
def _sector_model(params: SourceParams):
    probs = spdc_double_pass(params).event_probabilities()
    sectors = (vacuum(), two_photon_sector_state(), theta(normalize=True))
    return tuple(probs[k] for k in range(3)), sectors


def herald_probability(params: SourceParams) -> float:
    """Per-pulse probability of a four-photon event, i.e. of a herald."""
    _check_params(params)
    return _sector_model(params)[0][2]


def _record(outcome, posterior: FockState, pulses: int) -> PairRecord:
    return PairRecord(
        outcome.klass, outcome.pattern, posterior, pulses, s1_weight(posterior, *SHARED_PATHS)
    )


def generate_pair(
    params: SourceParams, rng: np.random.Generator, circuit: GbaCircuit = DEFAULT_CIRCUIT
) -> PairRecord | NoHerald:
    """One pump pulse, routed through the hider's analyzer on paths (1, 3)."""
    _check_params(params)
    probs, sectors = _sector_model(params)
    k = int(rng.choice(3, p=probs))
    if k == 0:
        return NoHerald(1, 0)
    outcome, posterior = gba.measure(sectors[k], HIDER_PATHS, rng, circuit)
    if not outcome.heralded:
        return NoHerald(1, outcome.pattern.total)
    return _record(outcome, posterior, 1)


def herald_pair(
    params: SourceParams, rng: np.random.Generator, circuit: GbaCircuit = DEFAULT_CIRCUIT
) -> PairRecord:
    """Next heralded pair, skipping the non-heralding pulses in one geometric draw.

    Vacuum and single-pair pulses never put two photons into the analyzer,
    so the waiting time to a herald is geometric in the four-photon
    probability and only the four-photon state needs simulating.
    """
    pulses = int(rng.geometric(herald_probability(params)))
    outcome, posterior = gba.measure(theta(normalize=True), HIDER_PATHS, rng, circuit)
    return _record(outcome, posterior, pulses)


@dataclass(frozen=True)
class SourceStats:
    heralds: int
    class_counts: tuple
    s1_hits: int
    pulses_total: int

    @property
    def pairs_drawn(self) -> int:
        return self.heralds

    @property
    def s1_fraction_estimate(self) -> float:
        return self.s1_hits / self.heralds

    def class_fractions(self) -> list[float]:
        return [c / self.heralds for c in self.class_counts]


def source_statistics(
    params: SourceParams, events: int, rng: np.random.Generator, circuit: GbaCircuit = DEFAULT_CIRCUIT
) -> SourceStats:
    """Class law, sector-probe S1 fraction and pulse cost over ``events`` heralds."""
    counts = Counter()
    s1_hits = pulses = 0
    for _ in range(events):
        rec = herald_pair(params, rng, circuit)
        counts[rec.klass] += 1
        s1_hits += rng.random() < rec.s1_weight
        pulses += rec.pulses_consumed
    return SourceStats(events, tuple(counts.get(k, 0) for k in GbaClass), int(s1_hits), pulses)


def sample_source_labels(params: SourceParams, events: int, rng: np.random.Generator) -> tuple[Counter, int]:
    """Label-resolved view of heralded events: ideal basis measurement of paths (1, 3).

    Returns label counts and the pulses consumed.
    """
    p4 = herald_probability(params)
    pulses = int(rng.geometric(p4, size=events).sum())
    counts: Counter = Counter()
    state = theta(normalize=True)
    for _ in range(events):
        label, _ = gba.measure_label(state, HIDER_PATHS, rng)
        counts[label] += 1
    return counts, pulses


@dataclass(frozen=True)
class HidingInstance:
    secret: int
    pairs: tuple
    discarded: tuple = ()

    def __post_init__(self):
        if self.secret not in (0, 1):
            raise ValueError("secret must be a bit")
        if not self.pairs:
            raise ValueError("a hiding instance needs at least one pair")
        if class1_parity(self.pairs) != self.secret:
            raise ValueError("class-1 parity does not match the secret")

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def drawn(self) -> tuple:
        return self.discarded + self.pairs


def class1_parity(pairs) -> int:
    return sum(1 for r in pairs if r.klass is GbaClass.CLASS1) % 2


def encode(
    secret: int,
    n: int,
    params: SourceParams,
    rng: np.random.Generator,
    circuit: GbaCircuit = DEFAULT_CIRCUIT,
) -> HidingInstance:
    """Draw n heralded pairs; keep the tuple only if its class-1 parity equals the secret."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if secret not in (0, 1):
        raise ValueError("secret must be a bit")
    discarded: list = []
    while True:
        pairs = tuple(herald_pair(params, rng, circuit) for _ in range(n))
        if class1_parity(pairs) == secret:
            return HidingInstance(secret, pairs, tuple(discarded))
        discarded.extend(pairs)


class _Link:
    """Joint photon states shared by both holders; stands in for entanglement."""

    __slots__ = ("states",)

    def __init__(self, states):
        self.states = tuple(states)


@dataclass(frozen=True)
class Share:
    holder: str
    path: int
    link: _Link = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.link.states)

    def local_density(self, k: int):
        """What this holder alone can see of pair ``k``."""
        return reduced_density(self.link.states[k], path_modes(self.path))


def distribute(instance: HidingInstance) -> tuple[Share, Share]:
    """Path-2 photons to Alice, path-4 photons to Bob."""
    link = _Link(r.pair_state for r in instance.pairs)
    return Share("alice", ALICE_PATH, link), Share("bob", BOB_PATH, link)


def rejoin(alice: Share, bob: Share) -> tuple[FockState, ...]:
    if alice is None or bob is None or alice.link is not bob.link:
        raise ValueError("quantum channel required")
    return alice.link.states


def decode(
    alice: Share | None,
    bob: Share | None,
    rng: np.random.Generator,
    circuit: GbaCircuit = DEFAULT_CIRCUIT,
) -> int:
    """Bring both halves together, run each pair through the analyzer, return class-1 parity."""
    counts = decode_counts(alice, bob, rng, circuit)
    return counts[GbaClass.CLASS1] % 2


def decode_counts(alice, bob, rng, circuit: GbaCircuit = DEFAULT_CIRCUIT) -> Counter:
    states = rejoin(alice, bob)
    counts: Counter = Counter({k: 0 for k in GbaClass})
    for state in states:
        outcome, _ = gba.measure(state, SHARED_PATHS, rng, circuit)
        counts[outcome.klass] += 1
    return counts


@dataclass(frozen=True)
class SessionStats:
    n: int
    secret: int
    decoded_bit: int
    pulses_total: int
    pairs_drawn: int
    pairs_rejected: int
    class_histogram: tuple
    s1_hits: int

    @property
    def s1_fraction_estimate(self) -> float:
        return self.s1_hits / self.pairs_drawn

    @property
    def success(self) -> bool:
        return self.decoded_bit == self.secret


def run_session(
    n: int,
    secret: int,
    params: SourceParams,
    rng: np.random.Generator,
    circuit: GbaCircuit = DEFAULT_CIRCUIT,
) -> SessionStats:
    """Encode, distribute, decode. Every drawn pair also gets a sector probe.

    The probe is a simulation-side photon-number filter on a copy of each
    pair (one photon per path or not); it feeds the S1-fraction estimate
    and does not disturb the shared states.
    """
    instance = encode(secret, n, params, rng, circuit)
    alice, bob = distribute(instance)
    decoded = decode(alice, bob, rng, circuit)
    drawn = instance.drawn
    hist = Counter(r.klass for r in drawn)
    probes = rng.random(len(drawn))
    s1_hits = int(sum(u < r.s1_weight for u, r in zip(probes, drawn)))
    return SessionStats(
        n=n,
        secret=secret,
        decoded_bit=decoded,
        pulses_total=sum(r.pulses_consumed for r in drawn),
        pairs_drawn=len(drawn),
        pairs_rejected=len(instance.discarded),
        class_histogram=tuple(hist.get(k, 0) for k in GbaClass),
        s1_hits=s1_hits,
    )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial generator: SeedSequence(seed) spawned at child index ``trial``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


@dataclass
class SessionSummary:
    n: int
    secret: int
    p: float
    seed: int
    trials: int = 0
    successes: int = 0
    pulses_total: int = 0
    pairs_drawn: int = 0
    pairs_rejected: int = 0
    class_histogram: list = field(default_factory=lambda: [0, 0, 0])
    s1_hits: int = 0
    per_trial: list = field(default_factory=list)

    def add(self, stats: SessionStats, keep: bool = False) -> None:
        self.trials += 1
        self.successes += stats.success
        self.pulses_total += stats.pulses_total
        self.pairs_drawn += stats.pairs_drawn
        self.pairs_rejected += stats.pairs_rejected
        self.class_histogram = [a + b for a, b in zip(self.class_histogram, stats.class_histogram)]
        self.s1_hits += stats.s1_hits
        if keep:
            self.per_trial.append(stats)

    def merge(self, other: "SessionSummary") -> "SessionSummary":
        if (self.n, self.secret, self.p, self.seed) != (other.n, other.secret, other.p, other.seed):
            raise ValueError("cannot merge summaries of different configurations")
        out = SessionSummary(self.n, self.secret, self.p, self.seed)
        for attr in ("trials", "successes", "pulses_total", "pairs_drawn", "pairs_rejected", "s1_hits"):
            setattr(out, attr, getattr(self, attr) + getattr(other, attr))
        out.class_histogram = [a + b for a, b in zip(self.class_histogram, other.class_histogram)]
        out.per_trial = self.per_trial + other.per_trial
        return out

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    @property
    def s1_fraction_estimate(self) -> float:
        return self.s1_hits / self.pairs_drawn

    @property
    def pulses_mean(self) -> float:
        """Mean pump pulses per heralded pair."""
        return self.pulses_total / self.pairs_drawn

    def class_fractions(self) -> list[float]:
        return [c / self.pairs_drawn for c in self.class_histogram]


def run_sessions(
    n: int,
    secret: int,
    p: float,
    trials: int,
    seed: int,
    circuit: GbaCircuit = DEFAULT_CIRCUIT,
    keep_trials: bool = False,
    start: int = 0,
) -> SessionSummary:
    """Independent sessions ``start .. start+trials-1``, each on its own derived generator."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    params = SourceParams(p)
    summary = SessionSummary(n, secret, p, seed)
    for t in range(start, start + trials):
        summary.add(run_session(n, secret, params, trial_rng(seed, t), circuit), keep=keep_trials)
    return summary


def encoded_class_law(secret: int, n: int) -> dict[tuple, float]:
    """Exact law of class tuples after parity-conditioned rejection sampling."""
    probs = {k: float(v) for k, v in class_probabilities().items()}
    law = {}
    for combo in itertools.product(GbaClass, repeat=n):
        if sum(c is GbaClass.CLASS1 for c in combo) % 2 == secret:
            law[combo] = float(np.prod([probs[c] for c in combo]))
    total = sum(law.values())
    return {k: w / total for k, w in law.items()}

