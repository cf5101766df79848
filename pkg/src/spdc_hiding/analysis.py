"""Distinguishability and information figures for the hiding ensembles.

Exact small-n ensembles are built from the analyzer posteriors; nothing
here optimizes over general LOCC measurements.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import gba
from .fock import (
    DensityMatrix,
    FockState,
    fock_basis,
    inner,
    partial_inner,
    path_modes,
    state_vector,
)
from .protocol import SHARED_PATHS
from .states import BellLabel, GbaClass, bell, theta

MAX_EXACT_N = 3


def _as_distribution(prior) -> np.ndarray:
    if np.isscalar(prior):
        prior = (float(prior), 1.0 - float(prior))
    dist = np.asarray(prior, dtype=float)
    if np.any(dist < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(dist.sum() - 1) > 1e-9:
        raise ValueError(f"distribution sums to {dist.sum()}, not 1")
    return dist


def entropy(dist) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = _as_distribution(dist).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) + 0.0


def binary_entropy(q: float) -> float:
    return entropy((q, 1 - q))


def mutual_information(joint) -> float:
    """I(X:Y) in bits from a joint table ``joint[x][y]`` or a ``{(x, y): p}`` mapping."""
    if isinstance(joint, Mapping):
        xs = sorted({k[0] for k in joint}, key=repr)
        ys = sorted({k[1] for k in joint}, key=repr)
        table = np.array([[joint.get((x, y), 0.0) for y in ys] for x in xs], dtype=float)
    else:
        table = np.asarray(joint, dtype=float)
    _as_distribution(table.ravel())
    return max(0.0, entropy(table.sum(axis=1)) + entropy(table.sum(axis=0)) - entropy(table.ravel()))


def security_bound(m: int, prior=0.5) -> float:
    """H(b1) / 2**(m-1): information bound when m pairs come from the S1 set."""
    if m < 1:
        raise ValueError("bound undefined; no S1 pairs")
    return entropy(prior) / 2 ** (m - 1)


def bound_curve(m_max: int = 20, prior=0.5) -> list[tuple[int, float, float]]:
    """(m, delta, bound) rows for m = 1..m_max."""
    return [(m, 1 / 2 ** (m - 1), security_bound(m, prior)) for m in range(1, m_max + 1)]


def trace_distance(r0: DensityMatrix, r1: DensityMatrix) -> float:
    if r0.basis != r1.basis:
        raise ValueError("density matrices are expressed in different bases")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(r0.matrix - r1.matrix)).sum())


def min_error_probability(r0: DensityMatrix, r1: DensityMatrix, prior=0.5) -> float:
    """Helstrom minimum error for telling r0 from r1 with the given prior."""
    if r0.basis != r1.basis:
        raise ValueError("density matrices are expressed in different bases")
    p0, p1 = _as_distribution(prior)
    gap = np.abs(np.linalg.eigvalsh(p0 * r0.matrix - p1 * r1.matrix)).sum()
    return 0.5 * (1 - float(gap))


def information_ceiling(r0: DensityMatrix, r1: DensityMatrix, prior=0.5) -> float:
    """Upper bound on I(b:M) for any measurement M: H(prior) - 2 P_err(min).

    Follows from h(q) >= 2q on [0, 1/2] applied outcome by outcome.
    """
    return max(0.0, entropy(prior) - 2 * min_error_probability(r0, r1, prior))


# -- hiding ensembles -----------------------------------------------------------------

PAIR_LABELS = tuple(BellLabel)


@functools.lru_cache(maxsize=None)
def pair_fock_basis() -> tuple:
    return tuple(fock_basis(path_modes(*SHARED_PATHS), 2))


@functools.lru_cache(maxsize=None)
def bell_to_fock() -> np.ndarray:
    """Columns are the ten basis states of paths (2, 4) in the two-photon Fock basis."""
    basis = pair_fock_basis()
    return np.column_stack([state_vector(bell(lb, *SHARED_PATHS), basis) for lb in PAIR_LABELS])


def _bell_coefficients(state: FockState) -> np.ndarray:
    return np.array([inner(bell(lb, *SHARED_PATHS), state) for lb in PAIR_LABELS])


@functools.lru_cache(maxsize=None)
def class_blocks() -> dict[GbaClass, np.ndarray]:
    """Per class k, sum over click patterns in k of prob * |posterior><posterior| (Bell basis)."""
    blocks = {k: np.zeros((10, 10), dtype=complex) for k in GbaClass}
    for br in gba.click_distribution(theta(normalize=True), (1, 3)):
        vec = _bell_coefficients(br.posterior)
        blocks[br.outcome.klass] += br.probability * np.outer(vec, vec.conj())
    return blocks


def hiding_density_matrix(b: int, n: int, basis: str = "bell") -> DensityMatrix:
    """Exact state handed to the sharers for secret ``b`` and ``n`` pairs."""
    if n > MAX_EXACT_N:
        raise ValueError(f"n ≤ {MAX_EXACT_N} for exact analysis")
    if n < 1 or b not in (0, 1):
        raise ValueError("need n >= 1 and a bit secret")
    blocks = class_blocks()
    if basis == "fock":
        u = bell_to_fock()
        blocks = {k: u @ blk @ u.conj().T for k, blk in blocks.items()}
        single = pair_fock_basis()
    elif basis == "bell":
        single = PAIR_LABELS
    else:
        raise ValueError(f"unknown basis {basis!r}")
    total = np.zeros((10**n, 10**n), dtype=complex)
    for combo in itertools.product(GbaClass, repeat=n):
        if sum(k is GbaClass.CLASS1 for k in combo) % 2 != b:
            continue
        term = np.ones((1, 1), dtype=complex)
        for k in combo:
            term = np.kron(term, blocks[k])
        total += term
    total /= np.trace(total).real
    keys = tuple(itertools.product(single, repeat=n)) if n > 1 else tuple((s,) for s in single)
    return DensityMatrix(keys, total)


# -- strategies -------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    joint: dict  # (b, transcript) -> probability
    mutual_information: float
    bound: float
    prior: tuple


def _evaluate(name: str, outcome_probs: Sequence[Mapping], prior, bound: float) -> StrategyResult:
    pri = _as_distribution(prior)
    joint = {}
    for b, probs in enumerate(outcome_probs):
        for t, q in probs.items():
            if pri[b] * q > 0:
                joint[(b, t)] = pri[b] * q
    return StrategyResult(name, joint, mutual_information(joint), bound, tuple(pri))


def local_count_strategy(n: int | None = None, prior=0.5, ensembles=None) -> StrategyResult:
    """Both holders count photons per polarization in every pair slot.

    ``ensembles`` is an optional pair of density matrices in a Fock-product
    basis; by default the protocol ensembles for ``n`` pairs are used. The
    transcript is the joint count record, which splits into Alice's and
    Bob's local counts, so the strategy needs no communication at all.
    """
    if ensembles is None:
        if n is None:
            raise ValueError("give n or explicit ensembles")
        ensembles = (hiding_density_matrix(0, n, "fock"), hiding_density_matrix(1, n, "fock"))
    r0, r1 = ensembles
    dists = []
    for rho in (r0, r1):
        pops = np.real(np.diag(rho.matrix))
        dists.append({key: float(p) for key, p in zip(rho.basis, pops) if p > 1e-15})
    return _evaluate("local-count", dists, prior, information_ceiling(r0, r1, prior))


def pure_density(state: FockState, basis: Sequence) -> DensityMatrix:
    vec = state_vector(state.normalized(), basis)
    return DensityMatrix(tuple(basis), np.outer(vec, vec.conj()))


def omega_ensembles() -> tuple[DensityMatrix, DensityMatrix]:
    basis = pair_fock_basis()
    return (
        pure_density(bell(BellLabel.OMEGA_PLUS, *SHARED_PATHS), basis),
        pure_density(bell(BellLabel.OMEGA_MINUS, *SHARED_PATHS), basis),
    )


@dataclass(frozen=True)
class OmegaGuess:
    sign: int
    alice_bit: int
    bob_bit: int

    @property
    def transcript(self) -> tuple[int]:
        """Classical message Alice sends Bob."""
        return (self.alice_bit,)


def _local_pm_basis(path: int) -> tuple[FockState, FockState]:
    """(|hv> + |0>)/sqrt2 and (|hv> - |0>)/sqrt2 on one path."""
    hv = ((path_modes(path)[0], 1), (path_modes(path)[1], 1))
    plus = FockState({hv: 1 / math.sqrt(2), (): 1 / math.sqrt(2)})
    minus = FockState({hv: 1 / math.sqrt(2), (): -1 / math.sqrt(2)})
    return plus, minus


def _local_measure(state: FockState, path: int, rng: np.random.Generator) -> tuple[int, FockState]:
    plus, minus = _local_pm_basis(path)
    modes = path_modes(path)
    branches = [partial_inner(plus, state, modes), partial_inner(minus, state, modes)]
    weights = np.array([br.norm_squared() for br in branches])
    if weights.sum() <= 0:
        # promise violated: nothing of the state lies in span{|0>, |hv>}
        return 0, state
    k = int(rng.random() * weights.sum() >= weights[0])
    rest = branches[k]
    return k, (rest.normalized() if not rest.is_zero() else rest)


def locc_distinguish_omega(state: FockState, rng: np.random.Generator) -> OmegaGuess:
    """One-way LOCC test of Ω+ against Ω- on paths (2, 4).

    Alice measures path 2 in the (|hv> ± |0>)/sqrt2 basis and sends her bit;
    Bob measures path 4 in (|0> ± |hv>)/sqrt2. The guessed sign is the
    product of the two signs. Outside the promise the guess is arbitrary.
    """
    alice_bit, rest = _local_measure(state, SHARED_PATHS[0], rng)
    if rest.is_zero():
        return OmegaGuess(1, alice_bit, 0)
    bob_bit, _ = _local_measure(rest, SHARED_PATHS[1], rng)
    sign = (1 - 2 * alice_bit) * (1 - 2 * bob_bit)
    return OmegaGuess(sign, alice_bit, bob_bit)


def overhead_factor(stats) -> float:
    """Extra pairs needed relative to an all-S1 source: 1 / (S1 fraction)."""
    frac = stats.s1_fraction_estimate
    if getattr(stats, "pairs_drawn", 10**4) < 10**4:
        warnings.warn("overhead estimate from fewer than 1e4 pairs is noisy", stacklevel=2)
    if frac == 0:
        raise ValueError("no S1 pairs observed; overhead undefined")
    return 1.0 / frac


@dataclass(frozen=True)
class AnalysisReport:
    n: int
    prior: float
    trace_distance: float
    min_error: float
    strategies: tuple
    bound_curve: tuple


def analyze(n: int, prior: float = 0.5, m_max: int = 20) -> AnalysisReport:
    r0 = hiding_density_matrix(0, n, "fock")
    r1 = hiding_density_matrix(1, n, "fock")
    local = local_count_strategy(prior=prior, ensembles=(r0, r1))
    return AnalysisReport(
        n=n,
        prior=prior,
        trace_distance=trace_distance(r0, r1),
        min_error=min_error_probability(r0, r1, prior),
        strategies=(local,),
        bound_curve=tuple(bound_curve(m_max, prior)),
    )
