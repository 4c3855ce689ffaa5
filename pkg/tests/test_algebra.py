"""Ring laws and grading bookkeeping of the exact polynomial algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadosc import ExpSum, GradedPoly, grad_dot, laplacian

coeffs = st.fractions(
    min_value=Fraction(-6), max_value=Fraction(6), max_denominator=8
).filter(bool)
keys = st.tuples(
    st.integers(0, 2), st.integers(-3, 1), st.integers(0, 4), st.integers(0, 4)
)
polys = st.dictionaries(keys, coeffs, max_size=5).map(
    lambda d: GradedPoly(d, "mu")
)


@given(polys, polys)
def test_addition_commutes(p, q):
    assert p + q == q + p


@given(polys, polys, polys)
def test_addition_associates(p, q, r):
    assert (p + q) + r == p + (q + r)


@given(polys)
def test_zero_and_negation(p):
    zero = GradedPoly.zero("mu")
    assert p + zero == p
    assert p - p == zero
    assert -(-p) == p


@given(polys, polys)
def test_multiplication_commutes(p, q):
    assert p.mul(q) == q.mul(p)


@given(polys, polys, polys)
def test_multiplication_associates(p, q, r):
    assert p.mul(q).mul(r) == p.mul(q.mul(r))


@given(polys, polys, polys)
def test_distributive_law(p, q, r):
    assert p.mul(q + r) == p.mul(q) + p.mul(r)


@given(polys)
def test_one_is_identity(p):
    assert p.mul(GradedPoly.const(1, "mu")) == p


@given(polys, polys)
def test_truncated_product_agrees_with_full(p, q):
    cap = 2
    full = p.mul(q)
    capped = p.mul(q, max_ep=cap)
    assert capped == full.truncate_ep(cap)


@given(polys, polys)
def test_derivative_product_rule(p, q):
    pq = p.mul(q)
    for var in ("x", "y"):
        assert pq.diff(var) == p.diff(var).mul(q) + p.mul(q.diff(var))


@given(polys)
def test_laplacian_is_sum_of_second_derivatives(p):
    assert laplacian(p) == p.diff("x").diff("x") + p.diff("y").diff("y")


@given(polys, polys)
def test_gradient_dot_symmetry(p, q):
    assert grad_dot(p, q) == grad_dot(q, p)


@given(polys)
def test_constant_split_partitions(p):
    assert p.constant_part() + p.drop_constant() == p
    assert p.constant_part().degree() == 0


@given(polys, st.integers(0, 2))
def test_truncation_idempotent(p, cap):
    t = p.truncate_ep(cap)
    assert t.truncate_ep(cap) == t
    assert t.max_ep() <= cap


@given(polys)
def test_shift_roundtrip(p):
    assert p.shift(ep=1, gp=-2).shift(ep=-1, gp=2) == p


@given(polys)
def test_regrade_roundtrip(p):
    assert p.regrade("eps").regrade("mu") == p
    assert p.regrade("lambda").regrade("mu") == p


@given(polys)
def test_regrade_moves_g_power_by_parameter_order(p):
    moved = p.regrade("eps")
    for (ep, gp, i, j), c in p.terms.items():
        assert moved.terms[(ep, gp - 2 * ep, i, j)] == c


def test_regrade_rejects_unknown_flavor():
    with pytest.raises(KeyError):
        GradedPoly.mono(1, i=2).with_param("mu").regrade("nu")


def test_parameter_mixing_rejected():
    p = GradedPoly.mono(1, i=2, param="mu")
    q = GradedPoly.mono(1, j=2, param="eps")
    with pytest.raises(ValueError):
        p + q
    with pytest.raises(ValueError):
        p.mul(q)


def test_untagged_operand_adopts_parameter():
    p = GradedPoly.mono(1, i=2, param="mu")
    q = GradedPoly.mono(1, j=2)
    assert (p + q).param == "mu"


@given(polys, st.integers(0, 3), st.integers(0, 3))
def test_coefficient_extraction(p, i, j):
    c = p.coefficient(i, j)
    for (ep, gp, ci, cj), v in c.terms.items():
        assert (ci, cj) == (0, 0)
        assert p.terms[(ep, gp, i, j)] == v


@given(polys, polys)
def test_evaluation_is_a_ring_morphism(p, q):
    point = (2.0, 0.5, 0.7, -1.3)
    lhs = p.mul(q).evaluate(*point)
    rhs = p.evaluate(*point) * q.evaluate(*point)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_substitution_matches_composition():
    p = GradedPoly.mono(1, i=2) + GradedPoly.mono(Fraction(1, 3), i=1, j=1)
    px = GradedPoly.mono(1, i=1) + GradedPoly.mono(1, i=0, j=2, ep=1)
    py = GradedPoly.variable("y")
    composed = p.subs(px, py)
    for pt in [(1.0, 0.5, 0.3, 0.9), (1.0, 0.2, -1.1, 0.4)]:
        g, mu, x, y = pt
        inner_x = px.evaluate(g, mu, x, y)
        want = inner_x**2 + inner_x * y / 3
        assert composed.evaluate(g, mu, x, y) == pytest.approx(want, rel=1e-12)


def test_string_form_is_order_independent():
    a = GradedPoly({(0, 0, 2, 0): Fraction(1), (1, -1, 0, 2): Fraction(-2, 3)}, "mu")
    b = GradedPoly({(1, -1, 0, 2): Fraction(-2, 3), (0, 0, 2, 0): Fraction(1)}, "mu")
    assert str(a) == str(b)
    assert a.sorted_terms() == sorted(a.terms.items())


def test_power_matches_repeated_multiplication():
    p = GradedPoly.mono(1, i=1) + GradedPoly.mono(2, j=1, ep=1, param="mu")
    assert p**3 == p.mul(p).mul(p)
    assert p**0 == GradedPoly.const(1, "mu")


# ------------------------------------------------------------ flow-time sums


def exp_sum(b=Fraction(2)) -> ExpSum:
    return ExpSum(
        {
            (0, 0, 1, 0, 1, 0): Fraction(1),
            (1, 0, 1, 2, 1, 2): Fraction(1, 12),
        },
        b,
        "mu",
    )


def test_exp_sum_time_derivative():
    z = exp_sum()
    dz = z.ddt()
    # d/dt of amp * e^((k + l b) t) multiplies by k + l b
    assert dz.terms[(0, 0, 1, 0, 1, 0)] == 1
    assert dz.terms[(1, 0, 1, 2, 1, 2)] == Fraction(1, 12) * (1 + 2 * Fraction(2))


def test_exp_sum_product_rule():
    z = exp_sum()
    w = z.mul(z)
    assert w.ddt() == z.ddt().mul(z) + z.mul(z.ddt())


def test_exp_sum_mismatched_frequency_rejected():
    with pytest.raises(ValueError):
        exp_sum(Fraction(2)) + exp_sum(Fraction(3))


def test_exp_sum_constant_split():
    z = exp_sum() + ExpSum({(0, -1, 0, 0, 0, 0): Fraction(5)}, Fraction(2), "mu")
    const = z.constant_part()
    assert set(const.terms) == {(0, -1, 0, 0, 0, 0)}
    assert z.drop_constant() + const == z


def test_exp_sum_order_slice():
    z = exp_sum()
    assert set(z.at_ep(1).terms) == {(1, 0, 1, 2, 1, 2)}
    assert z.truncate_ep(0) == z.at_ep(0)
