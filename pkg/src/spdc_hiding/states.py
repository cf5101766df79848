"""Named states of the double-pass down-conversion source.

Numeric constructors (``bell``, ``theta``) are built with the Fock-engine
ladder operators; the ``*_poly`` constructors build the same objects in the
exact algebra. The two routes are deliberately independent so that each
checks the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from functools import lru_cache

from . import opalgebra as alg
from .fock import FockState, Mode, create, h, v, vacuum
from .opalgebra import HALF, INV_SQRT2, OperatorPolynomial, RingElement


class BasisSet(Enum):
    S1 = "S1"  # one photon in each path
    S2 = "S2"  # both photons in one path


class GbaClass(IntEnum):
    CLASS1 = 1
    CLASS2 = 2
    CLASS3 = 3


class BellLabel(Enum):
    """The ten two-photon, two-path basis states."""

    PHI_PLUS = "Φ+"
    PHI_MINUS = "Φ-"
    PSI_PLUS = "Ψ+"
    PSI_MINUS = "Ψ-"
    GAMMA_PLUS = "Γ+"
    GAMMA_MINUS = "Γ-"
    UPSILON_PLUS = "Υ+"
    UPSILON_MINUS = "Υ-"
    OMEGA_PLUS = "Ω+"
    OMEGA_MINUS = "Ω-"

    @property
    def sign(self) -> int:
        return 1 if self.name.endswith("PLUS") else -1

    @property
    def family(self) -> str:
        return self.name.rsplit("_", 1)[0]

    @property
    def basis_set(self) -> BasisSet:
        return BasisSet.S1 if self.family in ("PHI", "PSI") else BasisSet.S2

    @property
    def gba_class(self) -> GbaClass:
        if self in (BellLabel.PHI_PLUS, BellLabel.OMEGA_PLUS):
            return GbaClass.CLASS1
        if self in (BellLabel.PHI_MINUS, BellLabel.OMEGA_MINUS):
            return GbaClass.CLASS2
        return GbaClass.CLASS3

    def __str__(self) -> str:
        return self.value


S1_LABELS = tuple(lb for lb in BellLabel if lb.basis_set is BasisSet.S1)
S2_LABELS = tuple(lb for lb in BellLabel if lb.basis_set is BasisSet.S2)


def _bell_terms(label: BellLabel, i: int, j: int) -> tuple[RingElement, list[tuple[Mode, Mode]]]:
    """Overall coefficient and the two creation monomials (second carries the sign)."""
    if i == j:
        raise ValueError("Bell states need two distinct paths")
    fam = label.family
    if fam == "PHI":
        return INV_SQRT2, [(h(i), h(j)), (v(i), v(j))]
    if fam == "PSI":
        return INV_SQRT2, [(h(i), v(j)), (v(i), h(j))]
    if fam == "GAMMA":
        return HALF, [(h(i), h(i)), (v(j), v(j))]
    if fam == "UPSILON":
        return HALF, [(v(i), v(i)), (h(j), h(j))]
    return INV_SQRT2, [(h(i), v(i)), (h(j), v(j))]


def bell_poly(label: BellLabel, i: int, j: int) -> OperatorPolynomial:
    coeff, (first, second) = _bell_terms(label, i, j)
    return OperatorPolynomial({first: coeff, second: coeff * label.sign})


def bell(label: BellLabel, i: int, j: int) -> FockState:
    """Normalized basis state built with ladder operators on the vacuum."""
    coeff, monos = _bell_terms(label, i, j)
    kets = []
    for mono in monos:
        s = vacuum()
        for m in mono:
            s = create(s, m)
        kets.append(s)
    return float(coeff) * (kets[0] + label.sign * kets[1])


def singlet_creation(state: FockState, i: int, j: int) -> FockState:
    """Numeric action of the pair operator (h_i v_j - v_i h_j)/sqrt2."""
    return (create(create(state, h(i)), v(j)) - create(create(state, v(i)), h(j))) / math.sqrt(2)


@dataclass(frozen=True)
class SourceParams:
    """Pair probability per pass and the number of pairs kept in the expansion."""

    p: float
    truncation_order: int = 2

    def __post_init__(self):
        if not 0 < self.p <= 0.1:
            raise ValueError(f"pair probability p must lie in (0, 0.1], got {self.p}")
        if self.truncation_order < 2:
            raise ValueError("truncation must keep at least the two-pair terms")


@dataclass(frozen=True)
class SectorExpansion:
    """Unnormalized source state grouped by number of pairs.

    The state is ``sum_k weights[k] * sectors[k] |vac>``; ``weights[k]`` is
    ``p**(k/2)`` and ``sectors[k]`` is exact.
    """

    weights: dict
    sectors: dict

    def norms_squared(self) -> dict[int, RingElement]:
        return {k: alg.exact_norm_squared(poly) for k, poly in self.sectors.items()}

    def event_probabilities(self) -> dict[int, float]:
        """Probability that a pulse yields k pairs, after normalizing the truncated state."""
        raw = {k: self.weights[k] ** 2 * float(n2) for k, n2 in self.norms_squared().items()}
        total = sum(raw.values())
        return {k: r / total for k, r in raw.items()}


def _single_pass_sectors(i: int, j: int, order: int) -> dict[int, OperatorPolynomial]:
    a = alg.singlet_op(i, j)
    return {k: alg.scale(a**k, Fraction(1, math.factorial(k))) for k in range(order + 1)}


def spdc_single_pass(params: SourceParams, i: int, j: int) -> SectorExpansion:
    """Truncated pass ``1 + sqrt(p) a + (sqrt(p) a)^2/2 + ...`` on paths (i, j)."""
    sectors = _single_pass_sectors(i, j, params.truncation_order)
    weights = {k: params.p ** (k / 2) for k in sectors}
    return SectorExpansion(weights, sectors)


def spdc_double_pass(params: SourceParams) -> SectorExpansion:
    """Product of the (1,2) and (3,4) passes regrouped by total pair number."""
    order = params.truncation_order
    first = _single_pass_sectors(1, 2, order)
    second = _single_pass_sectors(3, 4, order)
    sectors = {}
    for k in range(order + 1):
        poly = alg.zero()
        for k1 in range(k + 1):
            poly = poly + alg.poly_mul(first[k1], second[k - k1])
        sectors[k] = poly
    weights = {k: params.p ** (k / 2) for k in sectors}
    return SectorExpansion(weights, sectors)


def theta_poly() -> OperatorPolynomial:
    """a12 a34 + a12^2/2 + a34^2/2, the four-photon component."""
    a12, a34 = alg.singlet_op(1, 2), alg.singlet_op(3, 4)
    return a12 * a34 + alg.scale(a12 * a12, HALF) + alg.scale(a34 * a34, HALF)


@lru_cache(maxsize=None)
def _theta_numeric() -> FockState:
    vac = vacuum()
    both = singlet_creation(singlet_creation(vac, 3, 4), 1, 2)
    first = singlet_creation(singlet_creation(vac, 1, 2), 1, 2)
    second = singlet_creation(singlet_creation(vac, 3, 4), 3, 4)
    return both + 0.5 * first + 0.5 * second


def theta(normalize: bool = False) -> FockState:
    """The four-photon state; unnormalized (norm^2 = 5/2) unless asked."""
    state = _theta_numeric()
    return _theta_normalized() if normalize else state


@lru_cache(maxsize=None)
def _theta_normalized() -> FockState:
    return _theta_numeric().normalized()


@lru_cache(maxsize=None)
def two_photon_sector_state() -> FockState:
    """Normalized (a12 + a34)|vac>, the single-pair output of the double pass."""
    vac = vacuum()
    return (singlet_creation(vac, 1, 2) + singlet_creation(vac, 3, 4)).normalized()


# Right-hand side of the ten-term decomposition of theta into (1,3) x (2,4) products.
DECOMPOSITION: tuple[tuple[int, BellLabel, BellLabel], ...] = (
    (+1, BellLabel.PHI_PLUS, BellLabel.PHI_PLUS),
    (-1, BellLabel.PHI_MINUS, BellLabel.PHI_MINUS),
    (-1, BellLabel.PSI_PLUS, BellLabel.PSI_PLUS),
    (+1, BellLabel.PSI_MINUS, BellLabel.PSI_MINUS),
    (+1, BellLabel.GAMMA_PLUS, BellLabel.UPSILON_PLUS),
    (+1, BellLabel.GAMMA_MINUS, BellLabel.UPSILON_MINUS),
    (+1, BellLabel.UPSILON_PLUS, BellLabel.GAMMA_PLUS),
    (+1, BellLabel.UPSILON_MINUS, BellLabel.GAMMA_MINUS),
    (-1, BellLabel.OMEGA_PLUS, BellLabel.OMEGA_PLUS),
    (-1, BellLabel.OMEGA_MINUS, BellLabel.OMEGA_MINUS),
)


def decomposition_rhs_poly(terms=DECOMPOSITION) -> OperatorPolynomial:
    total = alg.zero()
    for sign, left, right in terms:
        total = total + alg.scale(alg.poly_mul(bell_poly(left, 1, 3), bell_poly(right, 2, 4)), sign)
    return total


def verify_decomposition(terms=DECOMPOSITION) -> RingElement:
    """Exact constant ``c`` with ``theta_poly() == c * rhs``; ValueError if none."""
    return alg.proportionality(theta_poly(), decomposition_rhs_poly(terms))


@lru_cache(maxsize=None)
def label_probabilities() -> dict[BellLabel, Fraction]:
    """Exact probability of each (1,3) label when normalized theta is measured label by label."""
    c = verify_decomposition()
    norm2 = alg.exact_norm_squared(theta_poly())
    probs = {}
    for sign, left, _ in DECOMPOSITION:
        p = (c * sign) * (c * sign) / norm2
        if not p.is_rational():
            raise ArithmeticError(f"irrational probability for {left}")
        probs[left] = probs.get(left, Fraction(0)) + p.a
    return probs


def class_probabilities() -> dict[GbaClass, Fraction]:
    out = {k: Fraction(0) for k in GbaClass}
    for label, p in label_probabilities().items():
        out[label.gba_class] += p
    return out


def s1_weight(state: FockState, i: int, j: int) -> float:
    """Fraction of the norm with exactly one photon in path ``i`` and one in ``j``."""
    total = state.norm_squared()
    if total == 0:
        raise ValueError("zero state has no sector weights")
    inside = 0.0
    for key, amp in state.items():
        per_path = {}
        for m, n in key:
            per_path[m.path] = per_path.get(m.path, 0) + n
        if per_path.get(i, 0) == 1 and per_path.get(j, 0) == 1:
            inside += abs(amp) ** 2
    return inside / total
