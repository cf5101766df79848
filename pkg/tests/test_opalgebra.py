from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdc_hiding import opalgebra as alg
from spdc_hiding.fock import h, inner, v
from spdc_hiding.opalgebra import INV_SQRT2, ONE, OperatorPolynomial, RingElement
from spdc_hiding.states import BellLabel, bell, theta, theta_poly

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)
ring = st.builds(RingElement, fractions, fractions)


@settings(max_examples=200)
@given(ring, ring, ring)
def test_ring_axioms_exact(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == alg.ZERO
    if x:
        assert x * x.inverse() == ONE


def test_inverse_sqrt2_embedding():
    assert INV_SQRT2 * INV_SQRT2 == RingElement(Fraction(1, 2))
    assert alg.SQRT2 * INV_SQRT2 == ONE
    assert float(INV_SQRT2) == pytest.approx(2**-0.5)


def test_ring_rejects_floats():
    with pytest.raises(TypeError):
        RingElement.lift(0.5)


def test_singlet_op_terms():
    a = alg.singlet_op(1, 2)
    assert dict(a.terms) == {
        (h(1), v(2)): RingElement(0, Fraction(1, 2)),
        (v(1), h(2)): RingElement(0, Fraction(-1, 2)),
    }
    assert (alg.singlet_op(1, 2) + alg.singlet_op(2, 1)).is_zero()
    assert alg.exact_norm_squared(a) == ONE
    with pytest.raises(ValueError, match="degenerate singlet"):
        alg.singlet_op(3, 3)


def test_poly_mul_hand_expansion():
    got = alg.poly_mul(alg.singlet_op(1, 2), alg.singlet_op(3, 4))
    half = RingElement(Fraction(1, 2))
    expected = OperatorPolynomial(
        {
            (h(1), v(2), h(3), v(4)): half,
            (h(1), v(2), v(3), h(4)): -half,
            (v(1), h(2), h(3), v(4)): -half,
            (v(1), h(2), v(3), h(4)): half,
        }
    )
    assert got == expected
    assert len(got) == 4


def _small_poly(draw_coeffs, modes):
    return OperatorPolynomial({mono: c for mono, c in zip(modes, draw_coeffs)})


monos = [(), (h(1),), (v(1),), (h(1), h(2)), (v(2),), (h(1), v(1))]


@settings(max_examples=100)
@given(st.lists(ring, min_size=6, max_size=6), st.lists(ring, min_size=6, max_size=6), st.lists(ring, min_size=6, max_size=6))
def test_polynomial_ring_laws(a, b, c):
    p, q, r = (_small_poly(x, monos) for x in (a, b, c))
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * alg.unit() == p
    assert alg.canonical(alg.canonical(p)) == alg.canonical(p)


def test_apply_to_vacuum_singlet_is_psi_minus():
    assert alg.apply_to_vacuum(alg.singlet_op(1, 2)).allclose(bell(BellLabel.PSI_MINUS, 1, 2))
    assert alg.apply_to_vacuum(alg.zero()).is_zero()


def test_theta_norm_exact_and_numeric():
    n2 = alg.exact_norm_squared(theta_poly())
    assert n2 == RingElement(Fraction(5, 2))
    assert inner(theta(), theta()).real == pytest.approx(2.5, rel=1e-12)


def test_float_and_exact_norms_agree():
    for poly in (theta_poly(), alg.singlet_op(1, 2) ** 2, alg.singlet_op(1, 2) + alg.singlet_op(3, 4)):
        exact = float(alg.exact_norm_squared(poly))
        assert alg.apply_to_vacuum(poly).norm_squared() == pytest.approx(exact, rel=1e-12)


def test_poly_equal():
    p = alg.singlet_op(1, 2)
    assert alg.poly_equal(p, p)
    assert not alg.poly_equal(p, alg.singlet_op(3, 4))


def test_pretty_printer():
    got = str(alg.poly_mul(alg.singlet_op(1, 2), alg.singlet_op(3, 4)))
    assert got == "1/2·h1v2h3v4 − 1/2·h1v2v3h4 − 1/2·v1h2h3v4 + 1/2·v1h2v3h4"
    assert str(alg.singlet_op(1, 2)) == "√2/2·h1v2 − √2/2·v1h2"
    assert str(alg.unit()) == "1"
    assert str(alg.zero()) == "0"


def test_proportionality():
    p = alg.singlet_op(1, 2)
    assert alg.proportionality(alg.scale(p, INV_SQRT2), p) == INV_SQRT2
    with pytest.raises(ValueError, match="not proportional"):
        alg.proportionality(p, alg.singlet_op(1, 2) + alg.creation(h(5)))
