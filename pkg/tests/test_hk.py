"""Hilbert-Kunz colengths, reports, estimates, families, Monsky reference."""

import itertools
import json
from fractions import Fraction

import pytest

from hklab.errors import (
    NotMPrimaryError,
    PreconditionError,
    UnsupportedCharacteristicError,
)
from hklab.field import FieldSpec
from hklab.hk import (
    FamilyScanResult,
    HKReport,
    LocalRingPresentation,
    family_scan,
    hk_colength,
    hk_estimate,
    hk_function,
    monsky_reference,
)
from hklab.poly import PolyRing, parse_poly
from hklab.series import parse_series

F2 = FieldSpec(2)
F4 = FieldSpec(2, 2, (1, 1, 1))
F5 = FieldSpec(5)
F8 = FieldSpec(2, 3)

Rxy2 = PolyRing(F2, ("x", "y"))
Rxy5 = PolyRing(F5, ("x", "y"))
Rxyz5 = PolyRing(F5, ("x", "y", "z"))


def sympy_colength(gens_txt, names, p, q):
    """Independent recount: sympy basis plus box enumeration."""
    import sympy

    syms = sympy.symbols(names)
    exprs = [sympy.sympify(t, dict(zip(names, syms))) for t in gens_txt]
    exprs += [s ** q for s in syms]
    G = sympy.groebner(exprs, *syms, modulus=p, order="grevlex")
    leads = [tuple(sympy.Poly(g, *syms).LT(order="grevlex")[0]) for g in G.exprs]
    count = 0
    for mono in itertools.product(range(q), repeat=len(names)):
        if not any(all(m >= l for m, l in zip(mono, lead)) for lead in leads):
            count += 1
    return count


# ---------------------------------------------------------------------------
# presentations


def test_presentation_computes_dimension():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    assert P.dimension == 1
    assert P.truncation is None


def test_presentation_regular_ring():
    P = LocalRingPresentation(Rxy2, [])
    assert P.dimension == 2


def test_presentation_rejects_units():
    with pytest.raises(PreconditionError):
        LocalRingPresentation(Rxy2, [parse_poly("1 + x", Rxy2)])


def test_presentation_dimension_expectation():
    with pytest.raises(PreconditionError):
        LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)], expect_dimension=2)


def test_presentation_records_series_truncation():
    P = LocalRingPresentation(Rxy5, [parse_series("x^2 + y^2@6", Rxy5)])
    assert P.truncation == 6


# ---------------------------------------------------------------------------
# colengths


def test_hyperbola_colength():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    assert hk_colength(P, None, 4) == 7


def test_three_variable_quadric_colength():
    P = LocalRingPresentation(Rxyz5, [parse_poly("x^2 + y^2 + z^2", Rxyz5)])
    assert hk_colength(P, None, 5) == 37


def test_colength_matches_independent_recount():
    P = LocalRingPresentation(Rxyz5, [parse_poly("x^2 + y^2 + z^2", Rxyz5)])
    assert hk_colength(P, None, 5) == sympy_colength(
        ["x**2 + y**2 + z**2"], ("x", "y", "z"), 5, 5
    )


def test_determinantal_colength():
    R6 = PolyRing(F2, ("x", "y", "z", "u", "v", "w"))
    gens = [parse_poly(s, R6) for s in ("x*v - u*y", "y*w - v*z", "x*w - u*z")]
    P = LocalRingPresentation(R6, gens)
    assert P.dimension == 4
    assert hk_colength(P, None, 2) == 23


def test_colength_rejects_bad_q():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    with pytest.raises(PreconditionError):
        hk_colength(P, None, 6)
    with pytest.raises(PreconditionError):
        hk_colength(P, None, 1)


def test_colength_rejects_non_primary_ideal():
    P = LocalRingPresentation(Rxy2, [])
    with pytest.raises(NotMPrimaryError):
        hk_colength(P, [parse_poly("x", Rxy2)], 2)


def test_colength_rejects_unit_ideal_generator():
    P = LocalRingPresentation(Rxy2, [])
    with pytest.raises(PreconditionError):
        hk_colength(P, [parse_poly("1 + x", Rxy2)], 2)


def test_colength_unit_scaling_invariance():
    f = parse_poly("x^2 + y^2 + z^2", Rxyz5)
    P1 = LocalRingPresentation(Rxyz5, [f])
    P2 = LocalRingPresentation(Rxyz5, [3 * f])
    assert hk_colength(P1, None, 5) == hk_colength(P2, None, 5)


def test_colength_linear_change_invariance():
    from hklab.poly import linear_change

    f = parse_poly("x^2 + y^2 + z^2", Rxyz5)
    M = [
        [F5.from_int(1), F5.from_int(1), F5.from_int(0)],
        [F5.from_int(0), F5.from_int(1), F5.from_int(0)],
        [F5.from_int(2), F5.from_int(0), F5.from_int(1)],
    ]
    g = linear_change(f, M)
    P1 = LocalRingPresentation(Rxyz5, [f])
    P2 = LocalRingPresentation(Rxyz5, [g])
    for q in (5, 25):
        assert hk_colength(P1, None, q) == hk_colength(P2, None, q)


# ---------------------------------------------------------------------------
# reports and estimates


def test_hyperbola_report_rows():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    rep = hk_function(P, None, 3)
    assert [(r["e"], r["q"], r["colength"]) for r in rep.rows] == [
        (1, 2, 3),
        (2, 4, 7),
        (3, 8, 15),
    ]
    assert [r["f_e"] for r in rep.rows] == [1.5, 1.75, 1.875]
    assert all(r["exact"] for r in rep.rows)


def test_estimate_recovers_exact_model():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    rep = hk_function(P, None, 5)
    assert abs(rep.estimate - 2.0) <= 1e-9
    assert rep.uncertainty >= 0


def test_regular_ring_rows_are_one():
    P = LocalRingPresentation(Rxy2, [])
    rep = hk_function(P, None, 3)
    assert all(r["f_e"] == 1.0 for r in rep.rows)
    assert abs(rep.estimate - 1.0) <= 1e-9


def test_estimate_needs_three_rows():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    rep = hk_function(P, None, 2)
    assert rep.estimate is None
    with pytest.raises(PreconditionError):
        hk_estimate(rep)


def test_truncated_rows_flagged():
    P = LocalRingPresentation(Rxy5, [parse_series("x^2 + y^2@6", Rxy5)])
    rep = hk_function(P, None, 2)
    assert [r["exact"] for r in rep.rows] == [False, False]
    P12 = LocalRingPresentation(Rxy5, [parse_series("x^2 + y^2@12", Rxy5)])
    rep12 = hk_function(P12, None, 2)
    assert [r["exact"] for r in rep12.rows] == [True, False]


def test_truncation_window_preserves_colength():
    exact = LocalRingPresentation(Rxy5, [parse_poly("x^2 + y^2", Rxy5)])
    clipped = LocalRingPresentation(Rxy5, [parse_series("x^2 + y^2 + x^9@12", Rxy5)])
    assert hk_colength(exact, None, 5) == hk_colength(clipped, None, 5)


def test_report_csv_shape():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    rep = hk_function(P, None, 2)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "e,q,colength,f_e,exact"
    assert lines[1] == "1,2,3,1.5,true"


def test_report_json_round_trip():
    P = LocalRingPresentation(Rxy2, [parse_poly("x*y", Rxy2)])
    rep = hk_function(P, None, 3)
    data = json.loads(json.dumps(rep.to_json(), sort_keys=True))
    assert data["dimension"] == 1
    assert data["rows"][1]["colength"] == 7
    assert data["estimate"] == rep.estimate


def test_parameter_ideal_dominates_maximal_ideal():
    f = parse_poly("x^2 + y^2 + z^2", Rxyz5)
    P = LocalRingPresentation(Rxyz5, [f])
    params = [parse_poly("x + y", Rxyz5), parse_poly("z", Rxyz5), parse_poly("y^2", Rxyz5)]
    for q in (5, 25):
        assert hk_colength(P, params, q) >= hk_colength(P, None, q)


# ---------------------------------------------------------------------------
# family scans


def test_family_alpha_zero_row_is_base():
    f = parse_poly("x^2 + y^2", Rxy5)
    g = parse_poly("y^2", Rxy5)
    res = family_scan(f, g, e_max=2)
    base = hk_function(LocalRingPresentation(Rxy5, [f]), None, 2)
    assert res.alphas[0].is_zero()
    assert [r["colength"] for r in res.reports[0].rows] == [
        r["colength"] for r in base.rows
    ]
    for row in res.table:
        if row["alpha"] == "0":
            assert row["leq"]


def test_family_default_alphas_small_field():
    R4 = PolyRing(F4, ("x", "y"))
    f = parse_poly("x^2 + y^3", R4)
    g = parse_poly("y^3", R4)
    res = family_scan(f, g, e_max=1)
    assert len(res.alphas) == 4


def test_family_validations():
    f = parse_poly("x^2 + y^2", Rxy5)
    with pytest.raises(PreconditionError):
        family_scan(f, Rxy5.zero())
    with pytest.raises(PreconditionError):
        family_scan(f, parse_poly("1 + y", Rxy5))
    with pytest.raises(PreconditionError):
        family_scan(f, parse_poly("2*x^2 + 2*y^2", Rxy5))


def test_family_table_and_csv():
    f = parse_poly("x^2 + y^2", Rxy5)
    g = parse_poly("y^2", Rxy5)
    res = family_scan(f, g, alphas=[F5.from_int(1)], e_max=2)
    assert len(res.table) == 4
    lines = res.to_csv().splitlines()
    assert lines[0] == "alpha,e,q,colength,base_colength,leq"
    data = res.to_json()
    assert data["f"] == "x^2 + y^2"
    assert len(data["reports"]) == 2


def test_family_degenerate_fiber_detected():
    f = parse_poly("x^2 + y^2", Rxy5)
    g = parse_poly("y^2", Rxy5)
    res = family_scan(f, g, e_max=2)
    dense = res.dense_subset()
    assert len(dense) == 4
    assert all(str(a) != "4" for a in dense)


# ---------------------------------------------------------------------------
# the Monsky reference oracle


def test_monsky_reference_unit():
    assert monsky_reference(F4.one()) == Fraction(49, 16)


def test_monsky_reference_generator_of_f4():
    assert monsky_reference(F4.element(2)) == Fraction(769, 256)


def test_monsky_reference_f8_degrees():
    values = {monsky_reference(F8.element(i)) for i in range(1, 8)}
    assert values == {
        Fraction(49, 16),
        Fraction(3) + Fraction(1, 4 ** 3),
        Fraction(3) + Fraction(1, 4 ** 6),
    }


def test_monsky_reference_zero_undefined():
    assert monsky_reference(F4.zero()) is None


def test_monsky_reference_odd_characteristic():
    with pytest.raises(UnsupportedCharacteristicError):
        monsky_reference(F5.one())
