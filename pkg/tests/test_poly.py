"""Polynomial arithmetic, ordering, parsing and structural maps."""

import random

import pytest

from hklab.errors import (
    ParseError,
    PreconditionError,
    RingMismatchError,
    SingularMatrixError,
)
from hklab.field import FieldSpec
from hklab.poly import (
    MonomialOrder,
    PolyRing,
    Substitution,
    bracket_power,
    drop_variable,
    frobenius_power,
    homogeneous_component,
    homogeneous_components,
    lift_variable,
    linear_change,
    parse_poly,
    substitute,
)

F2 = FieldSpec(2)
F5 = FieldSpec(5)
F7 = FieldSpec(7)
F4 = FieldSpec(2, 2, (1, 1, 1))
F9 = FieldSpec(3, 2, (1, 0, 1))

R5 = PolyRing(F5, ("x", "y", "z"))
R4 = PolyRing(F4, ("x", "y"))


def random_poly(rng, ring, max_terms=6, max_exp=4):
    terms = {}
    for _ in range(rng.randrange(max_terms + 1)):
        mono = tuple(rng.randrange(max_exp + 1) for _ in range(ring.n))
        terms[mono] = ring.field.element(rng.randrange(ring.field.size))
    return ring.build(terms)


# ---------------------------------------------------------------------------
# basic arithmetic


def test_build_drops_zeros():
    f = R5.build({(1, 0, 0): 0, (0, 1, 0): 3})
    assert list(f.terms) == [(0, 1, 0)]


def test_add_cancels():
    x = R5.variable("x")
    assert (x + 4 * x).is_zero()


def test_known_product():
    x, y, _ = R5.variables()
    f = (x + y) * (x - y)
    assert f == x * x - y * y


def test_pow_matches_repeated_product():
    x, y, _ = R5.variables()
    f = x + 2 * y + 1
    assert f ** 3 == f * f * f
    assert f ** 0 == R5.one()


def test_scalar_ops():
    x = R5.variable("x")
    assert 2 * x + x == 3 * x
    assert x - x == 0
    assert (x + 1) * 0 == R5.zero()


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        R5.variable("x") + R4.variable("x")


def test_arithmetic_axioms_random():
    rng = random.Random(11)
    for _ in range(40):
        f = random_poly(rng, R5)
        g = random_poly(rng, R5)
        h = random_poly(rng, R5)
        assert f + g == g + f
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h
        assert (f * g) * h == f * (g * h)


# ---------------------------------------------------------------------------
# monomial order


def test_degrevlex_known_chain():
    order = R5.order
    x2 = (2, 0, 0)
    xy = (1, 1, 0)
    y2 = (0, 2, 0)
    xz = (1, 0, 1)
    yz = (0, 1, 1)
    z2 = (0, 0, 2)
    chain = [x2, xy, y2, xz, yz, z2]
    for a, b in zip(chain, chain[1:]):
        assert order.greater(a, b)


def test_lex_order():
    ring = R5.with_order(MonomialOrder.lex(3))
    assert ring.order.greater((1, 0, 0), (0, 5, 5))
    f = ring.parse("x + y^5")
    assert f.leading_monomial() == (1, 0, 0)


def test_order_with_priority():
    # z most significant
    ring = R5.with_order(MonomialOrder.lex(3, (2, 1, 0)))
    f = ring.parse("x^4 + z")
    assert f.leading_monomial() == (0, 0, 1)


def test_leading_term_degrevlex():
    f = R5.parse("x*y + z^2 + x^2")
    assert f.leading_monomial() == (2, 0, 0)
    assert f.total_degree() == 2


def test_order_of_vanishing():
    f = R5.parse("x^2 + y^3")
    assert f.order_of_vanishing() == 2
    assert R5.zero().order_of_vanishing() is None


# ---------------------------------------------------------------------------
# parsing and printing


def test_parse_known():
    f = R5.parse("2*x^2 + 3*y - 1")
    assert f.coefficient((2, 0, 0)) == F5.from_int(2)
    assert f.coefficient((0, 1, 0)) == F5.from_int(3)
    assert f.constant_term() == F5.from_int(4)


def test_parse_parentheses():
    assert R5.parse("(x + y)^2") == R5.parse("x^2 + 2*x*y + y^2")
    assert R5.parse("-(x - y)") == R5.parse("y - x")


def test_parse_generator():
    f = R4.parse("t*x + t^2")
    assert f.coefficient((1, 0)) == F4.generator()
    assert f.constant_term() == F4.generator() ** 2


def test_parse_error_offsets():
    with pytest.raises(ParseError) as info:
        R5.parse("x^")
    assert info.value.offset == 2
    with pytest.raises(ParseError) as info:
        R5.parse("2x")
    assert info.value.offset == 1
    with pytest.raises(ParseError) as info:
        R5.parse("x + w")
    assert info.value.offset == 4
    with pytest.raises(ParseError) as info:
        R5.parse("(x + y")
    assert info.value.offset == 6
    with pytest.raises(ParseError) as info:
        R5.parse("x + $")
    assert info.value.offset == 4


def test_parse_no_implicit_multiplication():
    with pytest.raises(ParseError):
        R5.parse("x y")


def test_str_zero_and_constant():
    assert str(R5.zero()) == "0"
    assert str(R5.constant(3)) == "3"


def test_str_parse_roundtrip_random():
    rng = random.Random(23)
    for ring in (R5, R4, PolyRing(F9, ("u", "v"))):
        for _ in range(100):
            f = random_poly(rng, ring)
            assert parse_poly(str(f), ring) == f


# ---------------------------------------------------------------------------
# Frobenius and bracket powers


def test_frobenius_power_matches_naive():
    rng = random.Random(31)
    cases = [(R5, 1), (R4, 1), (R4, 2), (PolyRing(F2, ("x", "y", "z")), 2)]
    count = 0
    for ring, e in cases:
        for _ in range(13):
            f = random_poly(rng, ring, max_terms=4, max_exp=2)
            q = ring.field.p ** e
            assert frobenius_power(f, e) == f ** q
            count += 1
    assert count >= 50


def test_frobenius_is_cheap_on_sparse_input():
    f = R5.parse("x^1000 + y")
    g = frobenius_power(f, 3)
    assert g.coefficient((125000, 0, 0)) == F5.one()
    assert len(g.terms) == 2


def test_bracket_power_validates_q():
    gens = [R5.parse("x + y")]
    assert bracket_power(gens, 25)[0] == R5.parse("x^25 + y^25")
    with pytest.raises(PreconditionError):
        bracket_power(gens, 10)
    with pytest.raises(PreconditionError):
        bracket_power(gens, 0)


# ---------------------------------------------------------------------------
# substitution and friends


def test_substitute_known():
    f = R5.parse("x^2 + y")
    x, y, z = R5.variables()
    g = substitute(f, [y + z, z * z, z])
    assert g == R5.parse("(y + z)^2 + z^2")


def test_substitute_is_ring_hom():
    rng = random.Random(41)
    images = [random_poly(rng, R5, max_terms=3, max_exp=2) for _ in range(3)]
    for _ in range(20):
        f = random_poly(rng, R5, max_terms=4, max_exp=3)
        g = random_poly(rng, R5, max_terms=4, max_exp=3)
        sf = substitute(f, images)
        sg = substitute(g, images)
        assert substitute(f + g, images) == sf + sg
        assert substitute(f * g, images) == sf * sg


def test_substitution_container():
    x, y, z = R5.variables()
    s = Substitution(R5, [x + y * y, y, z])
    assert s.is_local()
    assert not Substitution(R5, [x + 1, y, z]).is_local()
    m = s.linear_matrix()
    assert m[0][0] == F5.one() and m[0][1].is_zero()


def test_linear_change_known():
    f = R5.parse("x^2")
    g = linear_change(f, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    assert g == R5.parse("x^2 + 2*x*y + y^2")


def test_linear_change_singular():
    with pytest.raises(SingularMatrixError):
        linear_change(R5.parse("x"), [[1, 1, 0], [1, 1, 0], [0, 0, 1]])


def test_homogeneous_components():
    f = R5.parse("x^2 + x*y + z + 4")
    comps = homogeneous_components(f)
    assert sorted(comps) == [0, 1, 2]
    assert comps[2] == R5.parse("x^2 + x*y")
    assert homogeneous_component(f, 1) == R5.parse("z")
    assert homogeneous_component(f, 5).is_zero()
    total = R5.zero()
    for g in comps.values():
        total = total + g
    assert total == f


def test_drop_and_lift_variable():
    f = R5.parse("x^2 + z^3")
    g = drop_variable(f, 1)
    assert g.ring.names == ("x", "z")
    assert g.total_degree() == 3
    assert lift_variable(g, R5, 1) == f
    with pytest.raises(PreconditionError):
        drop_variable(R5.parse("y"), 1)


def test_ring_validation():
    with pytest.raises(PreconditionError):
        PolyRing(F5, ("x", "x"))
    with pytest.raises(PreconditionError):
        PolyRing(F4, ("x", "t"))
