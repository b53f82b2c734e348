"""Reduction of complete intersections to hypersurfaces by degree descent."""

import random

from .errors import (
    InternalCheckError,
    NotAUnitError,
    PreconditionError,
    RetryExhaustedError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)
from .field import FieldSpec
from .groebner import buchberger, is_regular_sequence, krull_dimension
from .hk import LocalRingPresentation, hk_function
from .poly import MonomialOrder, PolyRing, linear_change, poly_str
from .series import (
    TruncatedSeries,
    compose_series,
    parse_series,
    ts_inverse,
    weierstrass_prepare,
)

DEFAULT_PRECISION = 12
CHANGE_ATTEMPTS = 64
AUDIT_SLACK = 1e-9


def _as_series(g, precision):
    if isinstance(g, TruncatedSeries):
        return g
    return TruncatedSeries.from_polynomial(g, precision)


def _variable_monomial(ring, i, e=1):
    return tuple(e if j == i else 0 for j in range(ring.n))


def _x1_degree(f):
    """Largest X1 exponent among stored terms (0 when X1-free)."""
    deg = 0
    for m in f.terms:
        if m[0] > deg:
            deg = m[0]
    return deg


def _x1_layer(f, degree, shift=0):
    """The X1^degree layer of f, with the X1 power lowered to shift."""
    prec = f.precision - (degree - shift)
    if prec < 3:
        raise PreconditionError("series precision exhausted during reduction")
    out = {}
    for m, c in f.terms.items():
        if m[0] == degree:
            out[(shift,) + m[1:]] = c
    return TruncatedSeries(f.ring, out, prec)


def _unit_top(f, degree):
    """Whether the X1^degree coefficient of f has a unit constant part."""
    return not f.coefficient(_variable_monomial(f.ring, 0, degree)).is_zero()


def _alpha(target, source):
    """Cancel the top X1 layer of target against source's unit top."""
    dt, ds = _x1_degree(target), _x1_degree(source)
    if dt < ds:
        raise PreconditionError("cancellation needs deg(target) >= deg(source)")
    u = _x1_layer(source, ds)
    if u.constant_term().is_zero():
        raise NotAUnitError("cancellation against a non-unit top coefficient")
    vshift = _x1_layer(target, dt, dt - ds)
    out = target - vshift * ts_inverse(u) * source
    if out.is_zero():
        raise InternalCheckError("cancellation annihilated a generator")
    if _x1_degree(out) >= dt:
        raise InternalCheckError("cancellation failed to lower the X1 degree")
    return out


def _add_power(f, a, degree):
    """f plus a*X1^degree."""
    bump = TruncatedSeries(
        f.ring, {_variable_monomial(f.ring, 0, degree): a}, f.precision
    )
    return f + bump


def _snapshot(gens, ring):
    return {"variables": list(ring.names), "generators": [str(g) for g in gens]}


def _parse_snapshot(snap, field, order_kind):
    names = tuple(snap["variables"])
    ring = PolyRing(field, names, MonomialOrder(order_kind, range(len(names))))
    return [parse_series(text, ring) for text in snap["generators"]], ring


def _apply_step(gens, ring, step):
    """One recorded step applied to a generator list; returns (gens, ring)."""
    gens = list(gens)
    tag = step["tag"]
    if tag == "linear-change":
        field = ring.field
        M = [[field.element(c) for c in row] for row in step["matrix"]]
        out = []
        for g in gens:
            moved = linear_change(g.to_polynomial(), M)
            out.append(TruncatedSeries(ring, moved.terms, g.precision))
        return out, ring
    if tag == "weierstrass":
        i = step["target"]
        gens[i] = weierstrass_prepare(gens[i], step["variable"]).distinguished()
        return gens, ring
    if tag == "alpha-step":
        gens[step["target"]] = _alpha(gens[step["target"]], gens[step["source"]])
        return gens, ring
    if tag in ("beta-step", "add-linear-term"):
        a = ring.field.element(step["a"])
        degree = step["degree"] if tag == "beta-step" else 1
        gens[step["target"]] = _add_power(gens[step["target"]], a, degree)
        return gens, ring
    if tag == "drop-regular-generator":
        i, var = step["target"], step["variable"]
        prepared = weierstrass_prepare(gens[i], var)
        if prepared.degree != 1:
            raise InternalCheckError("recorded pivot is not linear in its variable")
        images = [ring.variable(j) for j in range(ring.n)]
        images[var] = -prepared.coeffs[0]
        rest = [
            compose_series(g, images).drop_variable(var)
            for j, g in enumerate(gens)
            if j != i
        ]
        return rest, ring.without_variable(var)
    if tag == "eliminate-variable":
        i = step["target"]
        f = gens[i]
        if _x1_degree(f) != 1:
            raise PreconditionError("the pivot is not linear in X1")
        u = _x1_layer(f, 1)
        if u.constant_term().is_zero():
            raise NotAUnitError("the X1 coefficient of the pivot is not a unit")
        images = [ring.variable(j) for j in range(ring.n)]
        images[0] = -(ts_inverse(u) * _x1_layer(f, 0))
        rest = [
            compose_series(g, images).drop_variable(0)
            for j, g in enumerate(gens)
            if j != i
        ]
        return rest, ring.without_variable(0)
    raise PreconditionError("unknown trace step tag %r" % (tag,))


class CIPresentation:
    """A local complete intersection k[[x]]/(f_1..f_e) with checked regularity."""

    __slots__ = ("ring", "generators", "precision", "regular_sequence")

    def __init__(self, ring, generators, precision=None, check=True):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            if g.is_zero():
                raise PreconditionError("zero generator in a presentation")
            if not g.constant_term().is_zero():
                raise PreconditionError("generator with a unit part")
            gens.append(g)
        if precision is None:
            precs = [g.precision for g in gens if isinstance(g, TruncatedSeries)]
            precision = min(precs) if precs else DEFAULT_PRECISION
        self.ring = ring
        self.generators = [_as_series(g, precision) for g in gens]
        self.precision = precision
        if check and gens:
            lifts = [g.to_polynomial() for g in self.generators]
            if not is_regular_sequence([], lifts):
                raise PreconditionError("generators are not a regular sequence")
        self.regular_sequence = bool(check)

    @property
    def dimension(self):
        return self.ring.n - len(self.generators)

    def __repr__(self):
        return "CIPresentation(%d generators in %d variables)" % (
            len(self.generators),
            self.ring.n,
        )


class ReductionTrace:
    """Replayable record of reduction steps with generator snapshots."""

    __slots__ = ("field", "order_kind", "initial", "steps", "final", "flags",
                 "audits", "seed")

    def __init__(self, ring, generators, seed=None):
        self.field = ring.field
        self.order_kind = ring.order.kind
        self.initial = _snapshot(generators, ring)
        self.steps = []
        self.flags = []
        self.audits = []
        self.final = None
        self.seed = seed

    def record(self, step, before, after):
        entry = dict(step)
        entry["before"] = before
        entry["after"] = after
        self.steps.append(entry)

    def flag(self, text):
        if text not in self.flags:
            self.flags.append(text)

    def finish(self, gens, ring):
        self.final = _snapshot(gens, ring)

    def replay(self):
        """Re-run the recorded steps from the initial snapshot."""
        gens, ring = _parse_snapshot(self.initial, self.field, self.order_kind)
        for step in self.steps:
            gens, ring = _apply_step(gens, ring, step)
        return gens, ring

    def verify_replay(self):
        """True when a replay reproduces the recorded final snapshot exactly."""
        if self.final is None:
            return False
        gens, ring = self.replay()
        return _snapshot(gens, ring) == self.final

    def describe(self):
        """Human-readable step log."""
        lines = []
        for i, step in enumerate(self.steps, 1):
            tag = step["tag"]
            if tag == "alpha-step":
                text = "cancel the top X1 power of generator %d against %d" % (
                    step["target"],
                    step["source"],
                )
            elif tag == "beta-step":
                text = "perturb generator %d by %s*X1^%d" % (
                    step["target"],
                    step["a"],
                    step["degree"],
                )
            elif tag == "add-linear-term":
                text = "add %s*X1 to the X1-free generator %d" % (
                    step["a"],
                    step["target"],
                )
            elif tag == "weierstrass":
                text = "replace generator %d by its distinguished part" % step["target"]
            elif tag == "linear-change":
                text = "apply the linear change %s" % (step["matrix"],)
            elif tag == "drop-regular-generator":
                text = "solve generator %d for variable %d and substitute" % (
                    step["target"],
                    step["variable"],
                )
            elif tag == "eliminate-variable":
                text = "eliminate X1 through the linear generator %d" % step["target"]
            else:
                text = tag
            lines.append("%2d. [%s] %s" % (i, tag, text))
            lines.append("      -> %s" % "; ".join(step["after"]["generators"]))
        return "\n".join(lines)

    def to_json(self):
        return {
            "field": {
                "p": self.field.p,
                "m": self.field.m,
                "modulus": list(self.field.modulus) if self.field.modulus else None,
            },
            "order": self.order_kind,
            "seed": self.seed,
            "initial": {
                "variables": list(self.initial["variables"]),
                "generators": list(self.initial["generators"]),
            },
            "steps": [
                {
                    k: (dict(v) if isinstance(v, dict) else v)
                    for k, v in step.items()
                }
                for step in self.steps
            ],
            "flags": list(self.flags),
            "audits": [
                {"stage": a["stage"], "rows": [dict(r) for r in a["rows"]]}
                for a in self.audits
            ],
            "final": None
            if self.final is None
            else {
                "variables": list(self.final["variables"]),
                "generators": list(self.final["generators"]),
            },
        }

    @classmethod
    def from_json(cls, data):
        info = data["field"]
        modulus = info.get("modulus")
        field = FieldSpec(
            info["p"], info["m"], tuple(modulus) if modulus else None
        )
        trace = object.__new__(cls)
        trace.field = field
        trace.order_kind = data.get("order", "degrevlex")
        trace.initial = data["initial"]
        trace.steps = [dict(s) for s in data["steps"]]
        trace.flags = list(data.get("flags", []))
        trace.audits = [dict(a) for a in data.get("audits", [])]
        trace.final = data.get("final")
        trace.seed = data.get("seed")
        return trace


def _record_and_apply(gens, ring, step, trace):
    before = _snapshot(gens, ring)
    gens, ring = _apply_step(gens, ring, step)
    trace.record(step, before, _snapshot(gens, ring))
    return gens, ring


# ---------------------------------------------------------------------------
# stage 1: generators with a unit linear term define regular hypersurfaces


def _drop_regular_inner(gens, ring, trace):
    while True:
        found = None
        for gi, g in enumerate(gens):
            for var in range(ring.n):
                if not g.coefficient(_variable_monomial(ring, var)).is_zero():
                    found = (gi, var)
                    break
            if found:
                break
        if found is None:
            return gens, ring
        step = {
            "tag": "drop-regular-generator",
            "target": found[0],
            "variable": found[1],
        }
        gens, ring = _record_and_apply(gens, ring, step, trace)


def drop_regular_generators(P):
    """Eliminate generators that are regular parameters, shrinking the ring."""
    gens, ring = list(P.generators), P.ring
    trace = ReductionTrace(ring, gens)
    gens, ring = _drop_regular_inner(gens, ring, trace)
    if not gens:
        trace.flag("regular")
    trace.finish(gens, ring)
    return CIPresentation(ring, gens, check=True), trace


# ---------------------------------------------------------------------------
# stage 2: expose the X1 order of every generator and prepare


def _x1_ready(g):
    order = g.order()
    return order is not None and not g.coefficient(
        _variable_monomial(g.ring, 0, order)
    ).is_zero()


def _random_change(ring, rng):
    """A random unipotent times permutation matrix over the ring's field."""
    n, field = ring.n, ring.field
    perm = list(range(n))
    rng.shuffle(perm)
    P = [
        [field.one() if j == perm[i] else field.zero() for j in range(n)]
        for i in range(n)
    ]
    U = [
        [field.one() if i == j else field.zero() for j in range(n)]
        for i in range(n)
    ]
    for i in range(n):
        for j in range(i + 1, n):
            U[i][j] = field.element(rng.randrange(field.size))
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = field.zero()
            for k in range(n):
                acc = acc + U[i][k] * P[k][j]
            row.append(acc)
        M.append(row)
    return M


def _prepare_inner(gens, ring, trace, rng):
    for g in gens:
        order = g.order()
        if order is None or order < 2:
            raise PreconditionError(
                "a generator is regular or vanishes; drop it before preparing"
            )
    if not all(_x1_ready(g) for g in gens):
        matrix = None
        for _ in range(CHANGE_ATTEMPTS):
            M = _random_change(ring, rng)
            moved = [
                TruncatedSeries(
                    ring, linear_change(g.to_polynomial(), M).terms, g.precision
                )
                for g in gens
            ]
            if all(_x1_ready(g) for g in moved):
                matrix = M
                break
        if matrix is None:
            bad = next(g for g in gens if not _x1_ready(g))
            raise RetryExhaustedError(
                "no linear change among %d samples exposed the X1 order of %s"
                % (CHANGE_ATTEMPTS, bad)
            )
        step = {
            "tag": "linear-change",
            "matrix": [[c.i for c in row] for row in matrix],
        }
        gens, ring = _record_and_apply(gens, ring, step, trace)
    for i in range(len(gens)):
        step = {"tag": "weierstrass", "target": i, "variable": 0}
        gens, ring = _record_and_apply(gens, ring, step, trace)
    return gens, ring


def prepare_distinguished(P, seed=0):
    """Linear change plus Weierstrass: every generator distinguished in X1."""
    gens, ring = list(P.generators), P.ring
    if not gens:
        raise PreconditionError("nothing to prepare in an empty presentation")
    trace = ReductionTrace(ring, gens, seed)
    gens, ring = _prepare_inner(gens, ring, trace, random.Random(seed))
    trace.finish(gens, ring)
    return CIPresentation(ring, gens, check=True), trace


# ---------------------------------------------------------------------------
# stage 3: descend the X1 degrees of a pair of distinguished polynomials


def _check_distinguished(f):
    t = _x1_degree(f)
    if t < 1:
        raise PreconditionError("a distinguished polynomial has X1 degree >= 1")
    top = _x1_layer(f, t)
    if list(top.terms) != [f.ring.zero_mono()]:
        raise PreconditionError("the top X1 coefficient is not a constant unit")
    for j in range(t):
        if not f.coefficient(_variable_monomial(f.ring, 0, j)).is_zero():
            raise PreconditionError(
                "a lower X1 coefficient has a unit part; not distinguished"
            )
    return t


def _pair_regular(context, base_dim, pair):
    lifts = [g.to_polynomial() for g in pair]
    d = krull_dimension(buchberger(context + lifts, ring=lifts[0].ring))
    return d == base_dim - len(pair)


def _sample_unit_addition(gens, ring, context, base_dim, target, degree, rng,
                          trace, tag, flags=None):
    field = ring.field
    pool = list(range(1, field.size))
    rng.shuffle(pool)
    pool = pool[:CHANGE_ATTEMPTS]
    for idx in pool:
        candidate = _add_power(gens[target], field.element(idx), degree)
        pair = [candidate if j == target else g for j, g in enumerate(gens[:2])]
        if _pair_regular(context, base_dim, pair):
            step = {"tag": tag, "a": idx, "target": target}
            if tag == "beta-step":
                step["degree"] = degree
            if flags:
                step.update(flags)
            return _record_and_apply(gens, ring, step, trace)
    raise RetryExhaustedError(
        "no unit multiple kept the sequence regular (%d candidates tried)"
        % len(pool)
    )


def _reduce_pair_inner(gens, ring, trace, rng, context, base_dim):
    rounds = _x1_degree(gens[0]) + _x1_degree(gens[1]) + 2
    for _ in range(rounds):
        t0, t1 = _x1_degree(gens[0]), _x1_degree(gens[1])
        if t0 == 0 or t1 == 0:
            free = 0 if t0 == 0 else 1
            gens, ring = _sample_unit_addition(
                gens, ring, context, base_dim, free, 1, rng, trace,
                "add-linear-term", {"x1_free_within_precision": True},
            )
            return gens, ring, free
        if min(t0, t1) == 1:
            lin = 0 if t0 == 1 else 1
            if not _unit_top(gens[lin], 1):
                gens, ring = _sample_unit_addition(
                    gens, ring, context, base_dim, lin, 1, rng, trace,
                    "beta-step",
                )
            return gens, ring, lin
        if t0 < t1:
            candidates = [0]
        elif t1 < t0:
            candidates = [1]
        else:
            candidates = [1, 0]
        source = next(
            (i for i in candidates if _unit_top(gens[i], _x1_degree(gens[i]))),
            None,
        )
        if source is None:
            source = candidates[0]
            if not _unit_top(gens[1 - source], _x1_degree(gens[1 - source])):
                raise InternalCheckError("both top X1 coefficients degenerate")
            gens, ring = _sample_unit_addition(
                gens, ring, context, base_dim, source, _x1_degree(gens[source]),
                rng, trace, "beta-step",
            )
        target = 1 - source
        step = {"tag": "alpha-step", "target": target, "source": source}
        gens, ring = _record_and_apply(gens, ring, step, trace)
        if not _pair_regular(context, base_dim, gens[:2]):
            raise InternalCheckError(
                "regular sequence lost after an ideal-preserving step"
            )
    raise InternalCheckError("X1 degree descent failed to terminate")


def reduce_pair(f, g, tilde_R, seed=0):
    """Descend the X1 degrees of a distinguished pair until one is linear.

    Returns (fprime, gprime, trace) with fprime of the form u'*X1 + v'
    for a unit u'.
    """
    ring = tilde_R.ring
    if f.ring != ring or g.ring != ring:
        raise RingMismatchError("pair and context from different rings")
    f = _as_series(f, tilde_R.precision)
    g = _as_series(g, tilde_R.precision)
    _check_distinguished(f)
    _check_distinguished(g)
    context = [c.to_polynomial() for c in tilde_R.generators]
    if context:
        base_dim = krull_dimension(buchberger(context, ring=ring))
    else:
        base_dim = ring.n
    if not _pair_regular(context, base_dim, [f, g]):
        raise PreconditionError("the pair is not a regular sequence in context")
    trace = ReductionTrace(ring, [f, g], seed)
    gens, ring, pivot = _reduce_pair_inner(
        [f, g], ring, trace, random.Random(seed), context, base_dim
    )
    trace.finish(gens, ring)
    return gens[pivot], gens[1 - pivot], trace


# ---------------------------------------------------------------------------
# stage 4: substitute the linear variable away


def eliminate_linear_variable(fprime, others, precision=None):
    """Substitute X1 = -v'/u' from fprime = u'*X1 + v' into the others."""
    if precision is None:
        precision = (
            fprime.precision
            if isinstance(fprime, TruncatedSeries)
            else DEFAULT_PRECISION
        )
    gens = [_as_series(fprime, precision)] + [
        _as_series(g, precision) for g in others
    ]
    step = {"tag": "eliminate-variable", "target": 0}
    gens, _ring = _apply_step(gens, fprime.ring, step)
    return gens


# ---------------------------------------------------------------------------
# the full pipeline


def _audit_rows(before_gens, before_ring, after_gens, after_ring, e_max):
    rb = hk_function(LocalRingPresentation(before_ring, before_gens), None, e_max)
    ra = hk_function(LocalRingPresentation(after_ring, after_gens), None, e_max)
    rows = []
    for b, a in zip(rb.rows, ra.rows):
        rows.append(
            {
                "e": b["e"],
                "q": b["q"],
                "f_before": b["f_e"],
                "f_after": a["f_e"],
                "leq": a["f_e"] <= b["f_e"] + AUDIT_SLACK,
            }
        )
    return rows


def ci_to_hypersurface(P, seed=0, audit=False, e_max=3):
    """Chain of eliminations carrying a complete intersection to one equation.

    Returns (F, trace) where F presents the hypersurface; F is None and the
    trace is flagged "regular" when every generator was eliminated.
    """
    gens, ring = list(P.generators), P.ring
    trace = ReductionTrace(ring, gens, seed)
    rng = random.Random(seed)
    while len(gens) > 1:
        gens, ring = _drop_regular_inner(gens, ring, trace)
        if len(gens) <= 1:
            break
        gens, ring = _prepare_inner(gens, ring, trace, rng)
        context = [c.to_polynomial() for c in gens[2:]]
        if context:
            base_dim = krull_dimension(buchberger(context, ring=ring))
        else:
            base_dim = ring.n
        before_gens, before_ring = list(gens), ring
        gens, ring, pivot = _reduce_pair_inner(
            gens, ring, trace, rng, context, base_dim
        )
        step = {"tag": "eliminate-variable", "target": pivot}
        gens, ring = _record_and_apply(gens, ring, step, trace)
        for g in gens:
            if g.is_zero():
                raise PreconditionError(
                    "a generator vanished within precision; raise the precision"
                )
        if audit:
            trace.audits.append(
                {
                    "stage": len(trace.steps),
                    "rows": _audit_rows(
                        before_gens, before_ring, gens, ring, e_max
                    ),
                }
            )
    if not gens:
        trace.flag("regular")
        trace.finish(gens, ring)
        return None, trace
    final = gens[0]
    order = final.order()
    if order is None or order < 2:
        trace.flag("regular")
    trace.finish(gens, ring)
    return final, trace


# ---------------------------------------------------------------------------
# the empirical lower-bound scan against the diagonal quadric


class ConjectureScanReport:
    """Per-sample estimates compared against the diagonal quadric's."""

    __slots__ = ("dimension", "field", "quadric_estimate", "tolerance", "rows",
                 "seed")

    def __init__(self, dimension, field, quadric_estimate, tolerance, rows, seed):
        self.dimension = dimension
        self.field = field
        self.quadric_estimate = quadric_estimate
        self.tolerance = tolerance
        self.rows = list(rows)
        self.seed = seed

    def all_pass(self):
        return all(r["pass"] for r in self.rows)

    def to_csv(self):
        lines = ["index,f,estimate,uncertainty,pass"]
        for r in self.rows:
            lines.append(
                "%d,%s,%r,%r,%s"
                % (
                    r["index"],
                    r["f"],
                    r["estimate"],
                    r["uncertainty"],
                    "true" if r["pass"] else "false",
                )
            )
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {
            "dimension": self.dimension,
            "field": {
                "p": self.field.p,
                "m": self.field.m,
                "modulus": list(self.field.modulus) if self.field.modulus else None,
            },
            "quadric_estimate": self.quadric_estimate,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "rows": [dict(r) for r in self.rows],
        }


def _random_singular_hypersurface(ring, rng):
    """A random series of order >= 2 with small support."""
    field = ring.field
    while True:
        terms = {}
        for _ in range(rng.randrange(2, 5)):
            degree = rng.randrange(2, 4)
            mono = [0] * ring.n
            for _ in range(degree):
                mono[rng.randrange(ring.n)] += 1
            terms[tuple(mono)] = field.element(rng.randrange(1, field.size))
        f = ring.build(terms)
        if not f.is_zero():
            return f


def conjecture_scan(d, field, count=10, seed=0, e_max=3, tolerance=0.02):
    """Estimate e_HK for random singular hypersurfaces of dimension d and
    compare each against the diagonal quadric's estimate."""
    if field.p == 2:
        raise UnsupportedCharacteristicError(
            "the quadric comparison needs odd characteristic"
        )
    if e_max < 3:
        raise PreconditionError("the comparison needs at least three rows")
    ring = PolyRing(field, tuple("x%d" % i for i in range(d + 1)))
    quadric = ring.build(
        {_variable_monomial(ring, i, 2): field.one() for i in range(d + 1)}
    )
    base = hk_function(LocalRingPresentation(ring, [quadric]), None, e_max)
    rng = random.Random(seed)
    rows = []
    samples = [quadric] + [
        _random_singular_hypersurface(ring, rng) for _ in range(count)
    ]
    for index, f in enumerate(samples):
        if index == 0:
            report = base
        else:
            report = hk_function(LocalRingPresentation(ring, [f]), None, e_max)
        rows.append(
            {
                "index": index,
                "f": poly_str(f),
                "estimate": report.estimate,
                "uncertainty": report.uncertainty,
                "pass": report.estimate >= base.estimate - tolerance,
            }
        )
    return ConjectureScanReport(d, field, base.estimate, tolerance, rows, seed)
