"""Hilbert-Kunz functions, multiplicity estimates and family scans."""

import random
import time
from fractions import Fraction

from .errors import (
    NotMPrimaryError,
    PreconditionError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)
from .field import artin_schreier_solve, element_degree, element_str, extend_field
from .groebner import buchberger, colength, krull_dimension, leading_staircase
from .poly import Polynomial, bracket_power, poly_str
from .series import TruncatedSeries


def _power_exponent(q, p):
    """e with q = p^e, or None."""
    if q < p:
        return None
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return e if q == 1 else None


class LocalRingPresentation:
    """The local ring k[[x_1..x_n]]/J given by polynomial generators of J.

    Generators may be polynomials or truncated series; series record the
    weakest precision so reports can flag which rows are exact.  The
    dimension is always computed from a basis of J, never asserted.
    """

    __slots__ = ("ring", "generators", "dimension", "truncation")

    def __init__(self, ring, generators, expect_dimension=None):
        gens = []
        truncation = None
        for g in generators:
            if isinstance(g, TruncatedSeries):
                prec = g.precision
                truncation = prec if truncation is None else min(truncation, prec)
                g = g.to_polynomial()
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            if not g.constant_term().is_zero():
                raise PreconditionError(
                    "generator %s has a unit part" % poly_str(g)
                )
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = gens
        self.truncation = truncation
        self.dimension = krull_dimension(buchberger(gens, ring=ring))
        if expect_dimension is not None and expect_dimension != self.dimension:
            raise PreconditionError(
                "computed dimension %d, expected %d"
                % (self.dimension, expect_dimension)
            )

    def maximal_ideal(self):
        """Generators of m = (x_1..x_n)."""
        return self.ring.variables()

    def __repr__(self):
        return "LocalRingPresentation(%d gens, dim %d)" % (
            len(self.generators),
            self.dimension,
        )


class HKReport:
    """Rows of the Hilbert-Kunz function plus the extrapolated limit."""

    __slots__ = ("presentation", "ideal", "rows", "estimate", "uncertainty")

    def __init__(self, presentation, ideal, rows):
        self.presentation = presentation
        self.ideal = list(ideal)
        self.rows = list(rows)
        self.estimate = None
        self.uncertainty = None

    def to_csv(self):
        lines = ["e,q,colength,f_e,exact"]
        for row in self.rows:
            lines.append(
                "%d,%d,%d,%r,%s"
                % (
                    row["e"],
                    row["q"],
                    row["colength"],
                    row["f_e"],
                    "true" if row["exact"] else "false",
                )
            )
        return "\n".join(lines) + "\n"

    def to_json(self):
        field = self.presentation.ring.field
        return {
            "field": {
                "p": field.p,
                "m": field.m,
                "modulus": list(field.modulus) if field.modulus else None,
            },
            "variables": list(self.presentation.ring.names),
            "ideal": [poly_str(g) for g in self.presentation.generators],
            "frobenius_ideal": [poly_str(g) for g in self.ideal],
            "dimension": self.presentation.dimension,
            "truncation": self.presentation.truncation,
            "rows": [dict(row) for row in self.rows],
            "estimate": self.estimate,
            "uncertainty": self.uncertainty,
        }


def bracket_staircase(P, I=None, q=None):
    """Validated staircase of J plus the bracket power of I."""
    if I is None:
        I = P.maximal_ideal()
    if q is None:
        raise PreconditionError("q must be given")
    p = P.ring.field.p
    if _power_exponent(q, p) is None:
        raise PreconditionError("q = %r is not a positive power of %d" % (q, p))
    gens = list(I)
    for g in gens:
        if g.ring != P.ring:
            raise RingMismatchError("ideal generator from a different ring")
        if not g.constant_term().is_zero():
            raise PreconditionError("ideal generator %s is a unit" % poly_str(g))
    return leading_staircase(P.generators + bracket_power(gens, q), ring=P.ring)


def hk_colength(P, I=None, q=None):
    """lambda(R/I^[q]): standard monomials of J plus the bracket power of I."""
    st = bracket_staircase(P, I, q)
    lam = colength(st)
    if lam is None:
        raise NotMPrimaryError(
            "the ideal is not m-primary modulo J (infinite colength)"
        )
    return lam


def hk_function(P, I=None, e_max=3):
    """HKReport with one row per e = 1..e_max: f_e = lambda / q^dim."""
    if e_max < 1:
        raise PreconditionError("e_max must be at least 1")
    if I is None:
        I = P.maximal_ideal()
    p = P.ring.field.p
    n = P.ring.n
    rows = []
    for e in range(1, e_max + 1):
        q = p ** e
        started = time.perf_counter()
        lam = hk_colength(P, I, q)
        seconds = time.perf_counter() - started
        exact = P.truncation is None or P.truncation > n * (q - 1)
        rows.append(
            {
                "e": e,
                "q": q,
                "colength": lam,
                "f_e": lam / q ** P.dimension,
                "exact": exact,
                "seconds": seconds,
            }
        )
    report = HKReport(P, I, rows)
    if len(rows) >= 3:
        report.estimate, report.uncertainty = hk_estimate(report)
    return report


def hk_estimate(report):
    """Extrapolate e_HK as the intercept of f_e = a + b/q, last three rows.

    Colengths of the rings in scope differ from e_HK * q^d by lower-order
    terms, so the 1/q model captures the leading correction; the
    uncertainty keeps the distance from the last row and the fit residual.
    """
    rows = report.rows
    if len(rows) < 3:
        raise PreconditionError("the estimate needs at least three rows")
    tail = rows[-3:]
    us = [1.0 / row["q"] for row in tail]
    ys = [row["f_e"] for row in tail]
    su = sum(us)
    sy = sum(ys)
    suu = sum(u * u for u in us)
    suy = sum(u * y for u, y in zip(us, ys))
    den = 3 * suu - su * su
    b = (3 * suy - su * sy) / den
    a = (sy - b * su) / 3
    residual = max(abs(y - a - b * u) for u, y in zip(us, ys))
    uncertainty = max(abs(ys[-1] - a), residual)
    return a, uncertainty


class FamilyScanResult:
    """Per-fiber reports for f + alpha*g and the colength comparison table."""

    __slots__ = ("f", "g", "alphas", "reports", "table", "seed")

    def __init__(self, f, g, alphas, reports, table, seed):
        self.f = f
        self.g = g
        self.alphas = list(alphas)
        self.reports = list(reports)
        self.table = list(table)
        self.seed = seed

    def dense_subset(self):
        """The alphas whose colength stays at or below the base at e_max."""
        last_e = max(row["e"] for row in self.table) if self.table else 0
        good = []
        for alpha, report in zip(self.alphas, self.reports):
            rows = [
                r
                for r in self.table
                if r["alpha"] == element_str(alpha) and r["e"] == last_e
            ]
            if rows and all(r["leq"] for r in rows):
                good.append(alpha)
        return good

    def to_csv(self):
        lines = ["alpha,e,q,colength,base_colength,leq"]
        for row in self.table:
            lines.append(
                "%s,%d,%d,%d,%d,%s"
                % (
                    row["alpha"],
                    row["e"],
                    row["q"],
                    row["colength"],
                    row["base_colength"],
                    "true" if row["leq"] else "false",
                )
            )
        return "\n".join(lines) + "\n"

    def to_json(self):
        field = self.f.ring.field
        return {
            "field": {
                "p": field.p,
                "m": field.m,
                "modulus": list(field.modulus) if field.modulus else None,
            },
            "variables": list(self.f.ring.names),
            "f": poly_str(self.f),
            "g": poly_str(self.g),
            "seed": self.seed,
            "alphas": [element_str(a) for a in self.alphas],
            "table": [dict(r) for r in self.table],
            "reports": [r.to_json() for r in self.reports],
        }


def family_scan(f, g, alphas=None, e_max=3, seed=0):
    """Compare the fibers k[x]/(f + alpha*g) against the base k[x]/(f)."""
    ring = f.ring
    field = ring.field
    if g.ring != ring:
        raise RingMismatchError("f and g from different rings")
    if g.is_zero():
        raise PreconditionError("g must be nonzero")
    if not g.constant_term().is_zero():
        raise PreconditionError("g must vanish at the origin")
    if not f.is_zero():
        lead = next(iter(f.terms))
        c = g.terms.get(lead)
        if c is not None and g == f * (c / f.terms[lead]):
            raise PreconditionError("g is a scalar multiple of f")
    if alphas is None:
        if field.m <= 4:
            alphas = [field.element(i) for i in range(1, field.size)]
        else:
            rng = random.Random(seed)
            alphas = [
                field.element(i) for i in sorted(rng.sample(range(1, field.size), 16))
            ]
    alphas = [a for a in alphas if not a.is_zero()]
    alphas.insert(0, field.zero())

    reports = []
    for alpha in alphas:
        fiber = f + alpha * g
        P = LocalRingPresentation(ring, [fiber])
        reports.append(hk_function(P, None, e_max))
    base_rows = reports[0].rows
    table = []
    for alpha, report in zip(alphas, reports):
        for row, base in zip(report.rows, base_rows):
            table.append(
                {
                    "alpha": element_str(alpha),
                    "e": row["e"],
                    "q": row["q"],
                    "colength": row["colength"],
                    "base_colength": base["colength"],
                    "leq": row["colength"] <= base["colength"],
                }
            )
    return FamilyScanResult(f, g, alphas, reports, table, seed)


def monsky_reference(alpha):
    """The exact limit 3 + 4^(-m) for the quartic family fiber at alpha.

    m is the degree over F_2 of a solution of beta^2 + beta = alpha; the
    solver extends the field when no solution exists in alpha's own field.
    Returns None at alpha = 0, where the closed form does not apply.
    """
    if alpha.spec.p != 2:
        raise UnsupportedCharacteristicError(
            "the quartic family reference needs characteristic 2"
        )
    if alpha.is_zero():
        return None
    beta = artin_schreier_solve(alpha)
    if beta is None:
        big, embed = extend_field(alpha.spec, 2)
        beta = artin_schreier_solve(embed(alpha))
    m = element_degree(beta)
    return Fraction(3) + Fraction(1, 4 ** m)
