
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdc_hiding import gba
from spdc_hiding import protocol as pr
from spdc_hiding.states import GbaClass, SourceParams, two_photon_sector_state


def test_two_photon_sector_never_heralds():
    dist = gba.class_distribution(two_photon_sector_state(), pr.HIDER_PATHS)
    assert set(dist) == {None}


def test_herald_probability_closed_form():
    p = 0.01
    assert pr.herald_probability(SourceParams(p)) == pytest.approx(2.5 * p**2 / (1 + 2 * p + 2.5 * p**2), rel=1e-12)
    with pytest.raises(ValueError):
        pr.herald_probability(SourceParams(p, truncation_order=3))


def test_per_pulse_herald_rate(rng):
    params = SourceParams(0.1)
    pulses = 20000
    heralds = sum(isinstance(pr.generate_pair(params, rng), pr.PairRecord) for _ in range(pulses))
    expected = pr.herald_probability(params) * pulses
    assert abs(heralds - expected) < 5 * np.sqrt(expected)


def test_mean_pulses_per_herald(rng):
    params = SourceParams(0.01)
    stats = pr.source_statistics(params, 10000, rng)
    assert stats.pulses_total / stats.heralds == pytest.approx(1 / pr.herald_probability(params), rel=0.05)


def test_pair_record_validation():
    with pytest.raises(ValueError):
        pr.PairRecord(GbaClass.CLASS1, None, two_photon_sector_state(), 1, 0.0)


def test_encode_n1_secret1_is_class1(rng):
    params = SourceParams(0.01)
    for _ in range(200):
        inst = pr.encode(1, 1, params, rng)
        assert inst.pairs[0].klass is GbaClass.CLASS1


def test_encode_n1_secret0_class_law(rng):
    params = SourceParams(0.01)
    trials = 4000
    n2 = sum(pr.encode(0, 1, params, rng).pairs[0].klass is GbaClass.CLASS2 for _ in range(trials))
    assert n2 / trials == pytest.approx(0.25, abs=0.025)


def test_encoded_class_law_exact():
    law = pr.encoded_class_law(1, 1)
    assert law == {(GbaClass.CLASS1,): pytest.approx(1.0)}
    law0 = pr.encoded_class_law(0, 2)
    # classes 2/3 have weight 4/5; (1,1) contributes 1/25 against 16/25
    assert law0[(GbaClass.CLASS1, GbaClass.CLASS1)] == pytest.approx((1 / 25) / (17 / 25))
    assert sum(law0.values()) == pytest.approx(1.0)


def test_encode_n2_secret1(rng):
    params = SourceParams(0.01)
    for _ in range(200):
        inst = pr.encode(1, 2, params, rng)
        assert sum(r.klass is GbaClass.CLASS1 for r in inst.pairs) == 1


def test_encode_validation(rng):
    params = SourceParams(0.01)
    with pytest.raises(ValueError):
        pr.encode(2, 1, params, rng)
    with pytest.raises(ValueError):
        pr.encode(0, 0, params, rng)


def test_alice_sees_maximally_mixed_half(rng):
    params = SourceParams(0.01)
    inst = pr.encode(1, 1, params, rng)
    alice, bob = pr.distribute(inst)
    rho = alice.local_density(0)
    # Φ+ and Ω+ components together put weight 1/4 on each of four local kets
    pops = sorted(rho.populations().values(), reverse=True)
    assert pops[:4] == pytest.approx([0.25] * 4, abs=1e-12)
    assert rho.purity() == pytest.approx(0.25, abs=1e-12)


def test_shares_carry_the_shared_paths(rng):
    inst = pr.encode(0, 3, SourceParams(0.01), rng)
    alice, bob = pr.distribute(inst)
    assert (alice.path, bob.path) == pr.SHARED_PATHS
    assert alice.n == bob.n == 3
    for rec in inst.pairs:
        assert rec.pair_state.photon_numbers() == {2}
        assert {m.path for m in rec.pair_state.modes()} <= set(pr.SHARED_PATHS)
    assert pr.rejoin(alice, bob) == tuple(r.pair_state for r in inst.pairs)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
@pytest.mark.parametrize("secret", [0, 1])
def test_decode_recovers_secret(n, secret, rng):
    params = SourceParams(0.01)
    for _ in range(20):
        inst = pr.encode(secret, n, params, rng)
        alice, bob = pr.distribute(inst)
        assert pr.decode(alice, bob, rng) == secret


def test_decoder_classes_match_hider_classes(rng):
    inst = pr.encode(1, 6, SourceParams(0.01), rng)
    alice, bob = pr.distribute(inst)
    counts = pr.decode_counts(alice, bob, rng)
    hider = {k: sum(r.klass is k for r in inst.pairs) for k in GbaClass}
    assert dict(counts) == hider


def test_missing_share(rng):
    inst = pr.encode(0, 1, SourceParams(0.01), rng)
    alice, _ = pr.distribute(inst)
    with pytest.raises(ValueError, match="quantum channel required"):
        pr.decode(alice, None, rng)
    _, other_bob = pr.distribute(pr.encode(0, 1, SourceParams(0.01), rng))
    with pytest.raises(ValueError, match="quantum channel required"):
        pr.decode(alice, other_bob, rng)


def test_run_sessions_deterministic():
    a = pr.run_sessions(4, 1, 0.01, 30, seed=7, keep_trials=True)
    b = pr.run_sessions(4, 1, 0.01, 30, seed=7, keep_trials=True)
    assert a == b
    c = pr.run_sessions(4, 1, 0.01, 30, seed=8)
    assert c.pulses_total != a.pulses_total


def test_merge_matches_single_run():
    whole = pr.run_sessions(2, 0, 0.01, 40, seed=3)
    first = pr.run_sessions(2, 0, 0.01, 15, seed=3)
    second = pr.run_sessions(2, 0, 0.01, 25, seed=3, start=15)
    assert first.merge(second) == whole
    assert second.merge(first) == whole
    with pytest.raises(ValueError):
        whole.merge(pr.run_sessions(2, 1, 0.01, 1, seed=3))


def test_trial_streams_are_independent():
    draws = [pr.trial_rng(0, t).random() for t in range(5)]
    assert len(set(draws)) == 5
    assert pr.trial_rng(0, 3).random() == draws[3]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 1), st.integers(0, 2**32 - 1))
def test_parity_invariant(n, secret, seed):
    inst = pr.encode(secret, n, SourceParams(0.05), np.random.default_rng(seed))
    assert pr.class1_parity(inst.pairs) == secret
    assert inst.n == n
    assert len(inst.drawn) % n == 0


def test_session_stats_bookkeeping():
    s = pr.run_sessions(3, 0, 0.01, 50, seed=11)
    assert s.success_rate == 1.0
    assert sum(s.class_histogram) == s.pairs_drawn
    assert s.pairs_drawn == 3 * 50 + s.pairs_rejected
    assert 0 <= s.s1_fraction_estimate <= 1
    assert sum(s.class_fractions()) == pytest.approx(1.0)
