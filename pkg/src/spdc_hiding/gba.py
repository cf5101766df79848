"""Generalized Bell analyzer: linear-optics model and click classification.

The analyzer acts in place on the four modes of its two input paths
``(i, j)``: after the optics, path ``i`` is output arm ``u`` and path ``j``
is arm ``d``. Detectors are ideal and photon-number resolving.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .fock import (
    FockState,
    Mode,
    ModeMap,
    Pol,
    apply_mode_map,
    partial_inner,
    path_modes,
    photon_number,
    split_occupation,
)
from .states import BellLabel, GbaClass, bell

ARMS = ("u", "d")


class Combiner(Enum):
    POLARIZING = "pbs"
    BALANCED = "bs"


class PlatePlacement(Enum):
    OUTPUT_ARMS = "output"
    INPUT_PATHS = "input"
    NONE = "none"


@dataclass(frozen=True)
class Conventions:
    """Sign and phase choices.

    ``plate_sign`` s gives plates h -> (h + s v)/sqrt2, v -> (-s h + v)/sqrt2;
    ``bs_phase`` is the reflection phase of the balanced splitter.
    """

    plate_sign: float = -1.0
    bs_phase: complex = 1j


@dataclass(frozen=True)
class GbaCircuit:
    combiner: Combiner = Combiner.POLARIZING
    plate_placement: PlatePlacement = PlatePlacement.OUTPUT_ARMS
    conventions: Conventions = field(default_factory=Conventions)

    def __str__(self) -> str:
        c = self.conventions
        extra = f", bs_phase={c.bs_phase}" if self.combiner is Combiner.BALANCED else ""
        return f"{self.combiner.value}+plates@{self.plate_placement.value} (plate_sign={c.plate_sign:+g}{extra})"


DEFAULT_CIRCUIT = GbaCircuit()


def _plate_block(sign: float) -> np.ndarray:
    # columns are images of (h, v)
    return np.array([[1, -sign], [sign, 1]], dtype=complex) / math.sqrt(2)


def _combiner_matrix(config: GbaCircuit) -> np.ndarray:
    # mode order: (i,H), (i,V), (j,H), (j,V) == (u,H), (u,V), (d,H), (d,V)
    mat = np.zeros((4, 4), dtype=complex)
    if config.combiner is Combiner.POLARIZING:
        mat[0, 0] = 1  # h_i transmits to u
        mat[2, 2] = 1  # h_j transmits to d
        mat[3, 1] = 1  # v_i reflects to d
        mat[1, 3] = 1  # v_j reflects to u
    else:
        r = config.conventions.bs_phase
        # columns (path i, path j) -> rows (arm u, arm d), polarization untouched
        block = np.array([[1, r], [r, 1]]) if r == 1j else np.array([[1, 1], [1, -1]])
        for pol in (0, 1):
            for out_arm in (0, 1):
                for in_arm in (0, 1):
                    mat[2 * out_arm + pol, 2 * in_arm + pol] = block[out_arm, in_arm] / math.sqrt(2)
    return mat


def circuit_matrix(config: GbaCircuit) -> np.ndarray:
    """4x4 matrix[out, in] of the analyzer optics."""
    plates = np.zeros((4, 4), dtype=complex)
    plates[:2, :2] = plates[2:, 2:] = _plate_block(config.conventions.plate_sign)
    comb = _combiner_matrix(config)
    if config.plate_placement is PlatePlacement.OUTPUT_ARMS:
        return plates @ comb
    if config.plate_placement is PlatePlacement.INPUT_PATHS:
        return comb @ plates
    return comb


def build_circuit(config: GbaCircuit = DEFAULT_CIRCUIT, paths: tuple[int, int] = (1, 3)) -> ModeMap:
    """Unitary ModeMap of the analyzer on ``paths``; ValueError if the conventions are not unitary."""
    i, j = paths
    if i == j:
        raise ValueError("analyzer needs two distinct input paths")
    mat = circuit_matrix(config)
    modes = (Mode(i, Pol.H), Mode(i, Pol.V), Mode(j, Pol.H), Mode(j, Pol.V))
    try:
        return ModeMap(modes, mat, unitary=True)
    except ValueError as exc:
        raise ValueError(f"non-unitary analyzer conventions: {config}") from exc


@dataclass(frozen=True)
class ClickPattern:
    """Photon counts per detector ``(arm, pol)``, zero counts omitted."""

    counts: tuple = ()

    @classmethod
    def of(cls, counts: Mapping[tuple[str, str], int] | Iterable[tuple[str, str]]) -> "ClickPattern":
        if isinstance(counts, Mapping):
            items = counts.items()
        else:
            tally: dict = {}
            for det in counts:
                tally[det] = tally.get(det, 0) + 1
            items = tally.items()
        for (arm, pol), n in items:
            if arm not in ARMS or pol not in ("H", "V"):
                raise ValueError(f"unknown detector {(arm, pol)}")
        return cls(tuple(sorted((det, n) for det, n in items if n)))

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)

    def as_dict(self) -> dict:
        return dict(self.counts)

    def __str__(self) -> str:
        parts = []
        for (arm, pol), n in self.counts:
            parts.append(f"D_{pol}^{arm}" + (f"×{n}" if n > 1 else ""))
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class GbaOutcome:
    """Class is ``None`` when the analyzer did not see exactly two photons."""

    klass: GbaClass | None
    pattern: ClickPattern

    @property
    def heralded(self) -> bool:
        return self.klass is not None


def classify(pattern: ClickPattern) -> GbaClass:
    if pattern.total != 2:
        raise ValueError(f"not a heralded pair event: {pattern.total} photons detected")
    counts = pattern.as_dict()
    arms = {arm for arm, _ in counts}
    if arms != {"u", "d"}:
        return GbaClass.CLASS3
    pol_u = next(pol for (arm, pol) in counts if arm == "u")
    pol_d = next(pol for (arm, pol) in counts if arm == "d")
    return GbaClass.CLASS1 if pol_u == pol_d else GbaClass.CLASS2


def _pattern_of(occ, paths: tuple[int, int]) -> ClickPattern:
    arm = {paths[0]: "u", paths[1]: "d"}
    return ClickPattern.of({(arm[m.path], m.pol.name): n for m, n in occ})


@dataclass(frozen=True)
class Branch:
    outcome: GbaOutcome
    probability: float
    posterior: FockState


@dataclass(frozen=True)
class _Table:
    branches: tuple
    cumulative: tuple

    def sample(self, rng: np.random.Generator) -> Branch:
        k = bisect.bisect_right(self.cumulative, rng.random() * self.cumulative[-1])
        return self.branches[min(k, len(self.branches) - 1)]


@lru_cache(maxsize=4096)
def _click_table(state: FockState, paths: tuple[int, int], config: GbaCircuit) -> _Table:
    if state.is_zero():
        raise ValueError("cannot measure the empty state")
    analyzer = path_modes(*paths)
    mmap = build_circuit(config, paths).extended(state.modes())
    out_state = apply_mode_map(state, mmap)
    grouped: dict = {}
    for key, amp in out_state.items():
        inside, rest = split_occupation(key, analyzer)
        if photon_number(inside) > 4:
            raise ValueError("more than four photons enter the analyzer")
        grouped.setdefault(inside, {})[rest] = amp
    total = out_state.norm_squared()
    branches = []
    for inside in sorted(grouped):
        rest = FockState(grouped[inside])
        prob = rest.norm_squared() / total
        pattern = _pattern_of(inside, paths)
        klass = classify(pattern) if pattern.total == 2 else None
        branches.append(Branch(GbaOutcome(klass, pattern), prob, rest.normalized()))
    return _Table(tuple(branches), tuple(itertools.accumulate(b.probability for b in branches)))


def click_distribution(
    state: FockState, paths: tuple[int, int], config: GbaCircuit = DEFAULT_CIRCUIT
) -> tuple[Branch, ...]:
    """Every click pattern with its Born probability and normalized posterior."""
    return _click_table(state, tuple(paths), config).branches


def class_distribution(
    state: FockState, paths: tuple[int, int], config: GbaCircuit = DEFAULT_CIRCUIT
) -> dict[GbaClass | None, float]:
    out: dict = {}
    for br in click_distribution(state, paths, config):
        out[br.outcome.klass] = out.get(br.outcome.klass, 0.0) + br.probability
    return out


def measure(
    state: FockState,
    paths: tuple[int, int],
    rng: np.random.Generator,
    config: GbaCircuit = DEFAULT_CIRCUIT,
) -> tuple[GbaOutcome, FockState]:
    """Sample one analyzer outcome and the collapsed state of the other modes."""
    branch = _click_table(state, tuple(paths), config).sample(rng)
    return branch.outcome, branch.posterior


@lru_cache(maxsize=4096)
def _label_table(state: FockState, paths: tuple[int, int]) -> _Table:
    if state.is_zero():
        raise ValueError("cannot measure the empty state")
    analyzer = path_modes(*paths)
    total = state.norm_squared()
    branches = []
    for label in BellLabel:
        rest = partial_inner(bell(label, *paths), state, analyzer)
        if rest.is_zero():
            continue
        branches.append((label, rest.norm_squared() / total, rest.normalized()))
    residual = FockState(
        {k: a for k, a in state.items() if photon_number(split_occupation(k, analyzer)[0]) != 2}
    )
    if not residual.is_zero():
        kept = {}
        for k, a in residual.items():
            rest = split_occupation(k, analyzer)[1]
            kept[rest] = kept.get(rest, 0j) + a
        branches.append((None, residual.norm_squared() / total, FockState(kept).normalized()))
    return _Table(tuple(branches), tuple(itertools.accumulate(b[1] for b in branches)))


def label_distribution(state: FockState, paths: tuple[int, int]) -> dict[BellLabel | None, float]:
    """Born probabilities of an ideal projective measurement onto the ten basis states."""
    return {lb: p for lb, p, _ in _label_table(state, tuple(paths)).branches}


def measure_label(
    state: FockState, paths: tuple[int, int], rng: np.random.Generator
) -> tuple[BellLabel | None, FockState]:
    """Ideal label-resolving measurement; ``None`` if the paths do not hold exactly two photons.

    For the residual outcome the returned posterior discards the analyzer
    modes' occupations; it is only meaningful when they are vacuum.
    """
    label, _, posterior = _label_table(state, tuple(paths)).sample(rng)
    return label, posterior


def expected_class(label: BellLabel) -> GbaClass:
    return label.gba_class


def check_configuration(config: GbaCircuit, paths: tuple[int, int] = (1, 3), atol: float = 1e-12) -> bool:
    """True iff all ten basis states land deterministically in their class."""
    try:
        build_circuit(config, paths)
    except ValueError:
        return False
    for label in BellLabel:
        dist = class_distribution(bell(label, *paths), paths, config)
        if abs(dist.get(label.gba_class, 0.0) - 1.0) > atol:
            return False
    return True


def configuration_space() -> list[GbaCircuit]:
    """Finite search space in preference order."""
    configs = []
    for combiner in Combiner:
        for placement in PlatePlacement:
            for sign in (-1.0, 1.0):
                phases = (1j, 1.0) if combiner is Combiner.BALANCED else (1j,)
                for phase in phases:
                    configs.append(GbaCircuit(combiner, placement, Conventions(sign, phase)))
    return configs


def calibrate(candidates: Iterable[GbaCircuit] | None = None) -> GbaCircuit:
    """First configuration reproducing the ten-row class table."""
    for config in candidates if candidates is not None else configuration_space():
        if check_configuration(config):
            return config
    raise RuntimeError("no valid configuration")


@dataclass(frozen=True)
class TableRow:
    label: BellLabel
    expected: GbaClass
    class_probs: dict
    patterns: tuple  # (ClickPattern, probability)

    @property
    def deterministic(self) -> bool:
        return abs(self.class_probs.get(self.expected, 0.0) - 1.0) <= 1e-12


def gba_table(config: GbaCircuit = DEFAULT_CIRCUIT, paths: tuple[int, int] = (1, 3)) -> list[TableRow]:
    rows = []
    for label in BellLabel:
        state = bell(label, *paths)
        branches = click_distribution(state, paths, config)
        rows.append(
            TableRow(
                label,
                label.gba_class,
                class_distribution(state, paths, config),
                tuple((br.outcome.pattern, br.probability) for br in branches),
            )
        )
    return rows
