"""Exact identity checks run by ``spdc-hiding verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gba
from . import opalgebra as alg
from .analysis import hiding_density_matrix, security_bound, trace_distance
from .fock import FockState, inner
from .states import (
    DECOMPOSITION,
    S1_LABELS,
    S2_LABELS,
    BellLabel,
    bell,
    bell_poly,
    label_probabilities,
    theta,
    theta_poly,
    two_photon_sector_state,
    verify_decomposition,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def sector_click_totals(state: FockState, paths=(1, 3)) -> set[int]:
    """Detected photon totals over every ket of ``state`` sent alone through the analyzer."""
    totals = set()
    for key, _ in state.items():
        for br in gba.click_distribution(FockState({key: 1.0}), paths):
            if br.probability > 0:
                totals.add(br.outcome.pattern.total)
    return totals


def check_decomposition() -> CheckResult:
    c = verify_decomposition()
    flipped = list(DECOMPOSITION)
    sign, a, b = flipped[8]
    flipped[8] = (-sign, a, b)
    try:
        verify_decomposition(tuple(flipped))
        control = "sign mutation NOT rejected"
        ok = False
    except ValueError:
        control = "sign mutation rejected"
        ok = True
    return CheckResult("pair decomposition", ok and c == alg.HALF, f"theta = {c}·RHS; {control}")


def check_bases(atol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for labels in (S1_LABELS, S2_LABELS):
        states = [bell(lb, 1, 3) for lb in labels]
        gram = np.array([[inner(a, b) for b in states] for a in states])
        worst = max(worst, float(np.abs(gram - np.eye(len(states))).max()))
    return CheckResult("basis completeness", worst <= atol, f"max |G - 1| = {worst:.2e}")


def check_gba_table() -> CheckResult:
    rows = gba.gba_table()
    bad = [str(r.label) for r in rows if not r.deterministic]
    return CheckResult("GBA class table", not bad, "all ten rows deterministic" if not bad else f"failing: {bad}")


def check_heralding() -> CheckResult:
    two = sector_click_totals(two_photon_sector_state())
    four = sector_click_totals(theta())
    ok = two == {1} and four == {2}
    return CheckResult("heralding soundness", ok, f"two-photon sector clicks {sorted(two)}, four-photon {sorted(four)}")


def check_oracle(atol: float = 1e-12) -> CheckResult:
    worst = 0.0
    pairs = [(theta(), theta_poly()), (two_photon_sector_state() * np.sqrt(2), alg.singlet_op(1, 2) + alg.singlet_op(3, 4))]
    pairs += [(bell(lb, i, j), bell_poly(lb, i, j)) for lb in BellLabel for i, j in ((1, 3), (2, 4))]
    for numeric, poly in pairs:
        exact = alg.apply_to_vacuum(poly)
        keys = set(numeric.amplitudes) | set(exact.amplitudes)
        worst = max(worst, max(abs(numeric.amplitudes.get(k, 0) - exact.amplitudes.get(k, 0)) for k in keys))
    n2 = alg.exact_norm_squared(theta_poly())
    two_pair = alg.exact_norm_squared(alg.scale(alg.singlet_op(1, 2) ** 2, alg.HALF))
    ok = worst <= atol and n2 == alg.RingElement(Fraction(5, 2)) and two_pair == alg.RingElement(Fraction(3, 4))
    return CheckResult("oracle agreement", ok, f"max ket deviation {worst:.2e}; <Θ|Θ> = {n2}; two-pair norm² = {two_pair}")


def check_label_law() -> CheckResult:
    probs = label_probabilities()
    s1 = sum(p for lb, p in probs.items() if lb in S1_LABELS)
    ok = all(p == Fraction(1, 10) for p in probs.values()) and s1 == Fraction(2, 5)
    return CheckResult("label probabilities", ok, f"each label 1/10, S1 total {s1}")


def check_bound() -> CheckResult:
    ok = all(security_bound(m) == 2.0 ** (1 - m) for m in range(1, 21))
    ok &= all(security_bound(m + 1) * 2 == security_bound(m) for m in range(1, 20))
    return CheckResult("security bound", ok, "H(b1)/2^(m-1) = 2^(1-m) for m = 1..20")


def check_orthogonality() -> CheckResult:
    details = []
    ok = True
    for n in (1, 2):
        r0, r1 = hiding_density_matrix(0, n), hiding_density_matrix(1, n)
        overlap = float(np.abs(r0.matrix @ r1.matrix).max())
        d = trace_distance(r0, r1)
        ok &= overlap <= 1e-10 and abs(d - 1) <= 1e-10
        details.append(f"n={n}: |ρ0ρ1| ≤ {overlap:.1e}, D = {d:.12f}")
    return CheckResult("ensemble orthogonality", ok, "; ".join(details))


CHECKS = (
    check_decomposition,
    check_bases,
    check_gba_table,
    check_heralding,
    check_oracle,
    check_label_law,
    check_bound,
    check_orthogonality,
)


def run_identity_suite() -> list[CheckResult]:
    return [check() for check in CHECKS]
