"""Degree-reduction pipeline: drop, prepare, reduce, eliminate, scan."""

import json
import random

import pytest

from hklab.errors import (
    NotAUnitError,
    PreconditionError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)
from hklab.field import FieldSpec
from hklab.groebner import buchberger, is_regular_sequence
from hklab.poly import PolyRing, parse_poly, poly_str
from hklab.reduce import (
    CIPresentation,
    ConjectureScanReport,
    ReductionTrace,
    ci_to_hypersurface,
    conjecture_scan,
    drop_regular_generators,
    eliminate_linear_variable,
    prepare_distinguished,
    reduce_pair,
)
from hklab.series import parse_series

F5 = FieldSpec(5)
F7 = FieldSpec(7)
Rxy5 = PolyRing(F5, ("x", "y"))
Rxyz5 = PolyRing(F5, ("x", "y", "z"))
Rxyzw5 = PolyRing(F5, ("x", "y", "z", "w"))


def series(text, ring):
    return parse_series(text, ring)


def basis_strings(gens, ring):
    return [poly_str(b) for b in buchberger(gens, ring=ring).basis]


# ---------------------------------------------------------------------------
# presentations


def test_presentation_dimension():
    P = CIPresentation(Rxyz5, [parse_poly("x^2 + y^3", Rxyz5)])
    assert P.dimension == 2
    assert P.precision == 12


def test_presentation_rejects_non_regular_sequence():
    with pytest.raises(PreconditionError):
        CIPresentation(Rxy5, [parse_poly("x", Rxy5), parse_poly("x*y", Rxy5)])


def test_presentation_rejects_units_and_zero():
    with pytest.raises(PreconditionError):
        CIPresentation(Rxy5, [parse_poly("1 + x", Rxy5)])
    with pytest.raises(PreconditionError):
        CIPresentation(Rxy5, [Rxy5.zero()])


def test_presentation_empty_is_the_regular_ring():
    P = CIPresentation(Rxyz5, [])
    assert P.dimension == 3


# ---------------------------------------------------------------------------
# dropping regular generators


def test_drop_single_solve():
    P = CIPresentation(
        Rxyzw5, [parse_poly("x + y^2", Rxyzw5), parse_poly("z^2 + w^3", Rxyzw5)]
    )
    Q, trace = drop_regular_generators(P)
    assert Q.ring.names == ("y", "z", "w")
    assert len(Q.generators) == 1
    assert Q.generators[0] == series("z^2 + w^3@12", Q.ring)
    assert [s["tag"] for s in trace.steps] == ["drop-regular-generator"]
    assert trace.verify_replay()


def test_drop_leaves_singular_generators_alone():
    P = CIPresentation(Rxy5, [parse_poly("x^2 + y^3", Rxy5)])
    Q, trace = drop_regular_generators(P)
    assert trace.steps == []
    assert Q.generators[0] == series("x^2 + y^3@12", Rxy5)


def test_drop_chain_to_regular_ring():
    P = CIPresentation(
        Rxyz5, [parse_poly("x + y", Rxyz5), parse_poly("y + z^2", Rxyz5)]
    )
    Q, trace = drop_regular_generators(P)
    assert Q.generators == []
    assert Q.ring.names == ("z",)
    assert trace.flags == ["regular"]
    assert len(trace.steps) == 2
    assert trace.verify_replay()


def test_drop_substitutes_into_the_rest():
    P = CIPresentation(
        Rxyz5, [parse_poly("x + y^2", Rxyz5), parse_poly("x^2 + z^3", Rxyz5)]
    )
    Q, trace = drop_regular_generators(P)
    assert Q.ring.names == ("y", "z")
    assert Q.generators[0] == series("y^4 + z^3@12", Q.ring)


# ---------------------------------------------------------------------------
# preparing distinguished generators


def test_prepare_already_distinguished():
    P = CIPresentation(
        Rxyz5, [parse_poly("x^2 + y^3", Rxyz5), parse_poly("x^2 + z^3", Rxyz5)]
    )
    Q, trace = prepare_distinguished(P, seed=0)
    assert [s["tag"] for s in trace.steps] == ["weierstrass", "weierstrass"]
    assert Q.generators[0] == series("x^2 + y^3@12", Rxyz5)
    assert Q.generators[1] == series("x^2 + z^3@12", Rxyz5)


def test_prepare_needs_a_linear_change():
    P = CIPresentation(Rxy5, [parse_poly("y^2", Rxy5)])
    Q, trace = prepare_distinguished(P, seed=0)
    tags = [s["tag"] for s in trace.steps]
    assert tags[0] == "linear-change"
    assert tags[1:] == ["weierstrass"]
    g = Q.generators[0]
    assert g.order() == 2
    assert not g.coefficient((2, 0)).is_zero()
    assert trace.verify_replay()


def test_prepare_rejects_regular_generators():
    P = CIPresentation(Rxy5, [parse_poly("x + y^2", Rxy5)])
    with pytest.raises(PreconditionError):
        prepare_distinguished(P, seed=0)


def test_prepare_rejects_empty():
    with pytest.raises(PreconditionError):
        prepare_distinguished(CIPresentation(Rxy5, []), seed=0)


# ---------------------------------------------------------------------------
# the pair descent


def test_reduce_pair_worked_example():
    ctx = CIPresentation(Rxyz5, [])
    f = series("x^2 + y^3@12", Rxyz5)
    g = series("x^2 + z^3@12", Rxyz5)
    fp, gp, trace = reduce_pair(f, g, ctx, seed=0)
    assert [s["tag"] for s in trace.steps] == ["alpha-step", "add-linear-term"]
    assert gp == series("x^2 + z^3@12", Rxyz5)
    assert trace.steps[-1]["a"] == 3
    assert fp == series("3*x + y^3 + 4*z^3@10", Rxyz5)
    assert trace.verify_replay()


def test_reduce_pair_alpha_preserves_the_ideal():
    ctx = CIPresentation(Rxyz5, [])
    f = series("x^2 + y^3@12", Rxyz5)
    g = series("x^2 + z^3@12", Rxyz5)
    _fp, _gp, trace = reduce_pair(f, g, ctx, seed=0)
    step = trace.steps[0]
    before = [parse_series(t, Rxyz5).to_polynomial() for t in step["before"]["generators"]]
    after = [parse_series(t, Rxyz5).to_polynomial() for t in step["after"]["generators"]]
    assert basis_strings(before, Rxyz5) == basis_strings(after, Rxyz5)


def test_reduce_pair_already_terminal():
    ctx = CIPresentation(Rxy5, [])
    f = series("x + y^2@12", Rxy5)
    g = series("x^3 + y^2*x + y^3@12", Rxy5)
    fp, gp, trace = reduce_pair(f, g, ctx, seed=0)
    assert trace.steps == []
    assert fp == f
    assert gp == g


def test_reduce_pair_beta_route():
    ctx = CIPresentation(Rxy5, [])
    f = series("x^5 + y*x^2 + y^7@12", Rxy5)
    g = series("x^3 + y^2@12", Rxy5)
    fp, gp, trace = reduce_pair(f, g, ctx, seed=0)
    tags = [s["tag"] for s in trace.steps]
    assert tags == ["alpha-step", "beta-step", "alpha-step", "add-linear-term"]
    assert trace.steps[-1]["x1_free_within_precision"]
    assert not fp.coefficient((1, 0)).is_zero()
    assert trace.verify_replay()


def test_reduce_pair_degree_sum_strictly_decreases():
    ctx = CIPresentation(Rxy5, [])
    f = series("x^5 + y*x^2 + y^7@12", Rxy5)
    g = series("x^3 + y^2@12", Rxy5)
    _fp, _gp, trace = reduce_pair(f, g, ctx, seed=0)

    def degree_sum(snap, ring):
        total = 0
        for text in snap["generators"]:
            s = parse_series(text, ring)
            total += max([m[0] for m in s.terms] or [0])
        return total

    for step in trace.steps:
        if step["tag"] == "alpha-step":
            assert degree_sum(step["after"], Rxy5) < degree_sum(step["before"], Rxy5)


def test_reduce_pair_rejects_bad_inputs():
    ctx = CIPresentation(Rxy5, [])
    with pytest.raises(PreconditionError):
        reduce_pair(
            series("y*x^2 + y^3@12", Rxy5), series("x^2 + y^3@12", Rxy5), ctx
        )
    with pytest.raises(PreconditionError):
        reduce_pair(series("x^2@12", Rxy5), series("x^2@12", Rxy5), ctx)
    other = CIPresentation(Rxyz5, [])
    with pytest.raises(RingMismatchError):
        reduce_pair(series("x^2 + y^3@12", Rxy5), series("x^2@12", Rxy5), other)


def test_reduce_pair_random_alpha_steps_preserve_ideals():
    rng = random.Random(11)
    done = 0
    while done < 6:
        a = rng.randrange(2, 4)
        b = rng.randrange(2, 4)
        f = series("x^%d + %d*y^%d@20" % (a, rng.randrange(1, 5), rng.randrange(2, 4)), Rxy5)
        g = series("x^%d + %d*y^%d@20" % (b, rng.randrange(1, 5), rng.randrange(2, 4)), Rxy5)
        if not is_regular_sequence([], [f.to_polynomial(), g.to_polynomial()]):
            continue
        try:
            _fp, _gp, trace = reduce_pair(f, g, CIPresentation(Rxy5, []), seed=done)
        except PreconditionError:
            continue
        for step in trace.steps:
            if step["tag"] != "alpha-step":
                continue
            before = [
                parse_series(t, Rxy5).to_polynomial()
                for t in step["before"]["generators"]
            ]
            after = [
                parse_series(t, Rxy5).to_polynomial()
                for t in step["after"]["generators"]
            ]
            if any(sum(m) >= 14 for h in before + after for m in h.terms):
                continue
            assert basis_strings(before, Rxy5) == basis_strings(after, Rxy5)
        assert trace.verify_replay()
        done += 1


# ---------------------------------------------------------------------------
# eliminating the linear variable


def test_eliminate_substitutes_the_square():
    f = series("x + y^2@12", Rxyz5)
    g = series("x^2 + z^3@12", Rxyz5)
    out = eliminate_linear_variable(f, [g])
    assert out[0] == series("y^4 + z^3@11", out[0].ring)
    assert out[0].ring.names == ("y", "z")


def test_eliminate_plain_variable():
    f = series("x@12", Rxyz5)
    g = series("x*y + z^2@12", Rxyz5)
    out = eliminate_linear_variable(f, [g])
    assert out[0] == series("z^2@11", out[0].ring)


def test_eliminate_worked_example():
    f = series("3*x + y^3 - z^3@12", Rxyz5)
    g = series("x^2 + z^3@12", Rxyz5)
    out = eliminate_linear_variable(f, [g])
    expected = series("4*y^6 + 2*y^3*z^3 + 4*z^6 + z^3@11", out[0].ring)
    assert out[0] == expected


def test_eliminate_rejects_non_unit_and_non_linear():
    with pytest.raises(NotAUnitError):
        eliminate_linear_variable(
            series("y*x + z^2@12", Rxyz5), [series("z^2@12", Rxyz5)]
        )
    with pytest.raises(PreconditionError):
        eliminate_linear_variable(
            series("x^2 + y^3@12", Rxyz5), [series("z^2@12", Rxyz5)]
        )


# ---------------------------------------------------------------------------
# the full pipeline


def test_pipeline_single_generator_passthrough():
    P = CIPresentation(Rxy5, [parse_poly("x^2 + y^3", Rxy5)])
    F, trace = ci_to_hypersurface(P, seed=0)
    assert F == series("x^2 + y^3@12", Rxy5)
    assert trace.steps == []
    assert trace.flags == []


def test_pipeline_drop_only():
    P = CIPresentation(
        Rxyzw5, [parse_poly("x + y^2", Rxyzw5), parse_poly("z^2 + w^3", Rxyzw5)]
    )
    F, trace = ci_to_hypersurface(P, seed=0)
    assert F == series("z^2 + w^3@12", F.ring)
    assert F.ring.names == ("y", "z", "w")
    assert [s["tag"] for s in trace.steps] == ["drop-regular-generator"]


def test_pipeline_worked_example():
    P = CIPresentation(
        Rxyzw5,
        [series("x^2 + y^3@12", Rxyzw5), series("x^2 + z^3@12", Rxyzw5)],
    )
    F, trace = ci_to_hypersurface(P, seed=0)
    assert F.ring.names == ("y", "z", "w")
    assert F == series("4*y^6 + 2*y^3*z^3 + 4*z^6 + z^3@9", F.ring)
    assert F.order() == 3
    assert trace.flags == []
    assert trace.verify_replay()


def test_pipeline_flags_secretly_regular_input():
    P = CIPresentation(
        Rxyz5, [parse_poly("x + y", Rxyz5), parse_poly("y + z^2", Rxyz5)]
    )
    F, trace = ci_to_hypersurface(P, seed=0)
    assert F is None
    assert "regular" in trace.flags


def test_pipeline_audit_rows_hold():
    P = CIPresentation(
        Rxyzw5,
        [series("x^2 + y^3@12", Rxyzw5), series("x^2 + z^3@12", Rxyzw5)],
    )
    _F, trace = ci_to_hypersurface(P, seed=0, audit=True, e_max=2)
    assert trace.audits
    for block in trace.audits:
        assert block["rows"]
        for row in block["rows"]:
            assert row["f_after"] <= row["f_before"] + 1e-9
            assert row["leq"]


def test_pipeline_trace_json_round_trip():
    P = CIPresentation(
        Rxyzw5,
        [series("x^2 + y^3@12", Rxyzw5), series("x^2 + z^3@12", Rxyzw5)],
    )
    _F, trace = ci_to_hypersurface(P, seed=0)
    data = json.loads(json.dumps(trace.to_json(), sort_keys=True))
    back = ReductionTrace.from_json(data)
    assert back.verify_replay()
    assert back.final == trace.final


def test_pipeline_describe_mentions_every_step():
    P = CIPresentation(
        Rxyzw5,
        [series("x^2 + y^3@12", Rxyzw5), series("x^2 + z^3@12", Rxyzw5)],
    )
    _F, trace = ci_to_hypersurface(P, seed=0)
    text = trace.describe()
    assert len(text.splitlines()) == 2 * len(trace.steps)


def test_pipeline_random_codimension_two():
    R = PolyRing(F7, ("x", "y", "z"))
    rng = random.Random(3)
    done = 0
    while done < 4:
        f = parse_poly(
            "x^2 + %d*y^%d + %d*z^2" % (
                rng.randrange(1, 7), rng.randrange(2, 4), rng.randrange(1, 7)
            ),
            R,
        )
        g = parse_poly(
            "x^2 + %d*z^%d + %d*y^3" % (
                rng.randrange(1, 7), rng.randrange(2, 4), rng.randrange(1, 7)
            ),
            R,
        )
        if not is_regular_sequence([], [f, g]):
            continue
        P = CIPresentation(R, [f, g])
        F, trace = ci_to_hypersurface(P, seed=done)
        assert trace.verify_replay()
        if F is not None and "regular" not in trace.flags:
            assert F.order() >= 2
            assert F.ring.n == 2
        done += 1


# ---------------------------------------------------------------------------
# the conjecture scan


def test_scan_rejects_characteristic_two():
    with pytest.raises(UnsupportedCharacteristicError):
        conjecture_scan(2, FieldSpec(2), count=1)


def test_scan_rejects_short_reports():
    with pytest.raises(PreconditionError):
        conjecture_scan(1, F5, count=1, e_max=2)


def test_scan_quadric_row_is_exact_equality():
    report = conjecture_scan(1, F5, count=2, seed=0)
    assert report.rows[0]["estimate"] == report.quadric_estimate
    assert report.rows[0]["pass"]


def test_scan_dimension_one_samples_dominate():
    report = conjecture_scan(1, F5, count=4, seed=1)
    assert len(report.rows) == 5
    assert report.all_pass()


def test_scan_is_deterministic():
    a = conjecture_scan(1, F5, count=3, seed=7)
    b = conjecture_scan(1, F5, count=3, seed=7)
    assert [r["f"] for r in a.rows] == [r["f"] for r in b.rows]


def test_scan_serialization():
    report = conjecture_scan(1, F5, count=2, seed=0)
    lines = report.to_csv().splitlines()
    assert lines[0] == "index,f,estimate,uncertainty,pass"
    assert len(lines) == 4
    data = json.loads(json.dumps(report.to_json(), sort_keys=True))
    assert data["dimension"] == 1
    assert data["quadric_estimate"] == report.quadric_estimate
    assert len(data["rows"]) == 3
