import math
import warnings
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdc_hiding import analysis as an
from spdc_hiding.fock import DensityMatrix
from spdc_hiding.states import BellLabel, bell


def test_entropy_basics():
    assert an.entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert an.entropy([1.0, 0.0]) == 0.0
    assert an.entropy([0.25] * 4) == pytest.approx(2.0)
    assert an.binary_entropy(0.25) == pytest.approx(0.8112781244591328)
    with pytest.raises(ValueError):
        an.entropy([0.5, 0.6])


def test_mutual_information_bsc():
    joint = [[3 / 8, 1 / 8], [1 / 8, 3 / 8]]
    closed_form = 1 - (-0.25 * math.log2(0.25) - 0.75 * math.log2(0.75))
    assert an.mutual_information(joint) == pytest.approx(closed_form, abs=1e-12)
    mapping = {(0, "a"): 3 / 8, (0, "b"): 1 / 8, (1, "a"): 1 / 8, (1, "b"): 3 / 8}
    assert an.mutual_information(mapping) == pytest.approx(closed_form, abs=1e-12)
    assert an.mutual_information([[0.25, 0.25], [0.25, 0.25]]) == 0.0


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda x: sum(x) > 1e-3))
def test_mutual_information_bounded_by_marginals(w):
    joint = np.array(w).reshape(2, 2) / sum(w)
    mi = an.mutual_information(joint)
    assert -1e-12 <= mi <= min(an.entropy(joint.sum(0)), an.entropy(joint.sum(1))) + 1e-12


def test_security_bound_values():
    assert an.security_bound(1) == 1.0
    assert an.security_bound(10) == pytest.approx(1 / 512)
    assert an.security_bound(11) == 2.0**-10
    assert an.security_bound(5, prior=(1.0, 0.0)) == 0.0
    assert an.security_bound(3, prior=0.25) == pytest.approx(an.binary_entropy(0.25) / 4)
    with pytest.raises(ValueError, match="bound undefined; no S1 pairs"):
        an.security_bound(0)
    curve = an.bound_curve(20)
    assert [row[0] for row in curve] == list(range(1, 21))
    assert all(row[2] == 2.0 ** (1 - row[0]) for row in curve)


def _dm(diag):
    return DensityMatrix(tuple(range(len(diag))), np.diag(np.asarray(diag, dtype=complex)))


def test_trace_distance_cases():
    a, b = _dm([1, 0]), _dm([0, 1])
    assert an.trace_distance(a, a) == pytest.approx(0.0)
    assert an.trace_distance(a, b) == pytest.approx(1.0)
    plus = DensityMatrix((0, 1), np.full((2, 2), 0.5, dtype=complex))
    assert an.trace_distance(a, plus) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        an.trace_distance(a, DensityMatrix(("x", "y"), np.eye(2) / 2))


def test_ceiling_is_not_one_minus_binary_entropy():
    # D = 1/2 with diagonal states: the Helstrom measurement already yields 1/2 bit
    r0, r1 = _dm([0.5, 0.5, 0]), _dm([0, 0.5, 0.5])
    pe = an.min_error_probability(r0, r1)
    assert pe == pytest.approx(0.25)
    achieved = an.local_count_strategy(ensembles=(r0, r1)).mutual_information
    assert achieved == pytest.approx(0.5)
    assert achieved > 1 - an.binary_entropy(pe)
    assert achieved <= an.information_ceiling(r0, r1) + 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_hiding_density_matrices(n):
    r0, r1 = an.hiding_density_matrix(0, n), an.hiding_density_matrix(1, n)
    assert np.trace(r0.matrix).real == pytest.approx(1.0)
    assert np.abs(r0.matrix @ r1.matrix).max() <= 1e-10
    assert an.trace_distance(r0, r1) == pytest.approx(1.0, abs=1e-10)


def test_n1_ensembles_by_hand():
    r1 = an.hiding_density_matrix(1, 1)
    r0 = an.hiding_density_matrix(0, 1)
    pops1 = {key[0]: p for key, p in r1.populations().items() if p > 1e-12}
    assert pops1 == pytest.approx({BellLabel.PHI_PLUS: 0.5, BellLabel.OMEGA_PLUS: 0.5})
    pops0 = {key[0]: p for key, p in r0.populations().items() if p > 1e-12}
    assert pops0 == pytest.approx({lb: 1 / 8 for lb in BellLabel if lb.gba_class.value != 1})
    assert np.allclose(r1.matrix, np.diag(np.diag(r1.matrix)), atol=1e-12)


def test_fock_and_bell_bases_agree():
    rb, rf = an.hiding_density_matrix(1, 1, "bell"), an.hiding_density_matrix(1, 1, "fock")
    assert np.allclose(np.sort(rb.eigenvalues()), np.sort(rf.eigenvalues()), atol=1e-12)


def test_exact_analysis_limit():
    with pytest.raises(ValueError, match="n ≤ 3 for exact analysis"):
        an.hiding_density_matrix(0, 4)
    with pytest.raises(ValueError):
        an.hiding_density_matrix(2, 1)


def test_local_count_n1_closed_form():
    # four overlapping outcomes (1/16 vs 1/4) and six outcomes seen only for b = 0
    expected = 4 * (1 / 32 * math.log2(2 / 5) + 1 / 8 * math.log2(8 / 5)) + 6 / 16
    res = an.local_count_strategy(1)
    assert res.mutual_information == pytest.approx(expected, abs=1e-12)
    assert res.mutual_information <= res.bound + 1e-12


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("prior", [0.5, 0.3])
def test_local_count_within_limits(n, prior):
    res = an.local_count_strategy(n, prior=prior)
    assert res.mutual_information <= an.entropy(prior) + 1e-12
    assert res.mutual_information <= res.bound + 1e-12
    assert sum(res.joint.values()) == pytest.approx(1.0)


def test_local_count_degenerate_prior():
    assert an.local_count_strategy(1, prior=1.0).mutual_information == 0.0


def test_local_count_needs_input():
    with pytest.raises(ValueError):
        an.local_count_strategy()


def test_local_count_blind_to_omega_sign():
    res = an.local_count_strategy(ensembles=an.omega_ensembles())
    assert res.mutual_information == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("label, sign", [(BellLabel.OMEGA_PLUS, 1), (BellLabel.OMEGA_MINUS, -1)])
def test_locc_distinguishes_omega(label, sign, rng):
    state = bell(label, 2, 4)
    for _ in range(1000):
        guess = an.locc_distinguish_omega(state, rng)
        assert guess.sign == sign
        assert len(guess.transcript) == 1


def test_overhead_factor():
    assert an.overhead_factor(SimpleNamespace(s1_fraction_estimate=0.4, pairs_drawn=10**5)) == pytest.approx(2.5)
    with pytest.warns(UserWarning):
        an.overhead_factor(SimpleNamespace(s1_fraction_estimate=0.5, pairs_drawn=10))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError):
            an.overhead_factor(SimpleNamespace(s1_fraction_estimate=0.0, pairs_drawn=10**5))


def test_analyze_report():
    rep = an.analyze(1)
    assert rep.trace_distance == pytest.approx(1.0, abs=1e-10)
    assert rep.min_error == pytest.approx(0.0, abs=1e-10)
    assert len(rep.bound_curve) == 20
