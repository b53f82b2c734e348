"""Truncated multivariate power series and hypersurface diagonalization.

A TruncatedSeries keeps exactly the coefficients of total degree below
its precision N, so a value is an element of k[x_1..x_n]/m^N and every
operation is plain arithmetic in that quotient ring.  On top of the
arithmetic live unit inversion, square and k-th roots, Weierstrass
preparation, completion of the square in one variable, and the full
diagonalization of a hypersurface whose quadratic part is nondegenerate,
with every change of variables collected into a replayable certificate.
"""

from __future__ import annotations

import math

from .errors import (
    InternalCheckError,
    NeedsFieldExtension,
    NotAUnitError,
    NotPreparableError,
    ParseError,
    PreconditionError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)
from .field import FieldElement, FieldSpec, extend_field, ff_kth_root, ff_sqrt
from .poly import (
    PolyRing,
    Polynomial,
    Substitution,
    matrix_inverse,
    matrix_is_invertible,
    parse_poly,
    poly_str,
)


class TruncatedSeries:
    """A power series known modulo the ideal of total degree >= precision."""

    __slots__ = ("ring", "terms", "precision")

    def __init__(self, ring, terms, precision):
        if precision < 3:
            raise PreconditionError("series precision must be at least 3")
        clean = {}
        for mono, c in terms.items():
            if isinstance(c, int):
                c = ring.field.from_int(c)
            if c.spec != ring.field:
                raise RingMismatchError("coefficient from the wrong field")
            if len(mono) != ring.n or any(e < 0 for e in mono):
                raise PreconditionError("bad exponent vector %r" % (mono,))
            if sum(mono) < precision and not c.is_zero():
                clean[tuple(mono)] = c
        self.ring = ring
        self.terms = clean
        self.precision = precision

    @classmethod
    def from_polynomial(cls, f, precision):
        return cls(f.ring, f.terms, precision)

    def to_polynomial(self):
        """The stored terms as an exact polynomial (the truncation itself)."""
        return Polynomial(self.ring, dict(self.terms))

    def truncate(self, precision):
        """The same value at a lower (never higher) precision."""
        if precision > self.precision:
            raise PreconditionError("cannot raise precision of a truncation")
        return TruncatedSeries(self.ring, self.terms, precision)

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get(self.ring.zero_mono(), self.ring.field.zero())

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), self.ring.field.zero())

    def order(self):
        """Least total degree of a term, or None for the zero truncation."""
        if not self.terms:
            return None
        return min(sum(m) for m in self.terms)

    def _parts(self):
        """Terms split by total degree: a list of dicts, index = degree."""
        parts = [dict() for _ in range(self.precision)]
        for m, c in self.terms.items():
            parts[sum(m)][m] = c
        return parts

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.ring != self.ring:
                raise RingMismatchError("series from different rings")
            return other
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError("series and polynomial rings differ")
            return TruncatedSeries(self.ring, other.terms, self.precision)
        if isinstance(other, (int, FieldElement)):
            c = other if isinstance(other, FieldElement) else self.ring.field.from_int(other)
            return TruncatedSeries(self.ring, {self.ring.zero_mono(): c}, self.precision)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self.precision, other.precision)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return TruncatedSeries(self.ring, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(
            self.ring, {m: -c for m, c in self.terms.items()}, self.precision
        )

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self.precision, other.precision)
        out = {}
        rows = [(m, sum(m), c) for m, c in other.terms.items()]
        for ma, ca in self.terms.items():
            da = sum(ma)
            for mb, db, cb in rows:
                if da + db >= prec:
                    continue
                m = tuple(x + y for x, y in zip(ma, mb))
                c = ca * cb
                s = out.get(m)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        return TruncatedSeries(self.ring, out, prec)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise PreconditionError("series exponent must be a nonnegative integer")
        acc = TruncatedSeries(
            self.ring, {self.ring.zero_mono(): self.ring.field.one()}, self.precision
        )
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        """Agreement of all coefficients below the smaller precision."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self.precision, other.precision)
        a = {m: c for m, c in self.terms.items() if sum(m) < prec}
        b = {m: c for m, c in other.terms.items() if sum(m) < prec}
        return a == b

    __hash__ = None

    def __str__(self):
        return "%s@%d" % (poly_str(self.to_polynomial()), self.precision)

    def __repr__(self):
        return "TruncatedSeries(%s)" % self

    def map_coefficients(self, target_ring, embed):
        """Transport into target_ring (same variables) through embed."""
        if target_ring.names != self.ring.names:
            raise RingMismatchError("target ring has different variables")
        return TruncatedSeries(
            target_ring, {m: embed(c) for m, c in self.terms.items()}, self.precision
        )

    def drop_variable(self, i):
        """Rewrite in the ring without variable i; must not involve it."""
        small = self.ring.without_variable(i)
        out = {}
        for mono, c in self.terms.items():
            if mono[i]:
                raise PreconditionError(
                    "series still involves %s" % self.ring.names[i]
                )
            out[mono[:i] + mono[i + 1 :]] = c
        return TruncatedSeries(small, out, self.precision)


def parse_series(text, ring, default_precision=12):
    """Parse 'expr@N' (or a bare expression at the default precision)."""
    body, sep, tail = text.rpartition("@")
    if sep:
        tail = tail.strip()
        if not tail.isdigit():
            raise ParseError(
                "precision annotation must be a positive integer", offset=len(body) + 1
            )
        precision = int(tail)
    else:
        body = text
        precision = default_precision
    f = parse_poly(body, ring)
    return TruncatedSeries(ring, f.terms, precision)


def ts_arith(a, b, op):
    """Dispatch {add, sub, mul} at the smaller of the two precisions."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PreconditionError("unknown series operation %r" % (op,))


def _mul_part_into(acc, part_a, part_b, sign):
    """acc += sign * part_a * part_b for homogeneous term dicts."""
    for ma, ca in part_a.items():
        for mb, cb in part_b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            c = ca * cb
            if sign < 0:
                c = -c
            s = acc.get(m)
            s = c if s is None else s + c
            if s.is_zero():
                acc.pop(m, None)
            else:
                acc[m] = s


def ts_inverse(f):
    """Multiplicative inverse modulo the precision ideal, degree by degree."""
    c0 = f.constant_term()
    if c0.is_zero():
        raise NotAUnitError("series has zero constant term")
    ring, prec = f.ring, f.precision
    inv0 = c0.inverse()
    fparts = f._parts()
    gparts = [{ring.zero_mono(): inv0}]
    for d in range(1, prec):
        acc = {}
        for e in range(1, d + 1):
            if fparts[e]:
                _mul_part_into(acc, fparts[e], gparts[d - e], -1)
        gparts.append({m: inv0 * c for m, c in acc.items()})
    terms = {}
    for part in gparts:
        terms.update(part)
    out = TruncatedSeries(ring, terms, prec)
    if not (out * f == 1):
        raise InternalCheckError("inverse failed to verify")  # pragma: no cover
    return out


def ts_sqrt(f):
    """A square root modulo the precision ideal; odd characteristic only."""
    ring, prec = f.ring, f.precision
    if ring.field.p == 2:
        raise UnsupportedCharacteristicError("series square roots require odd characteristic")
    c0 = f.constant_term()
    if c0.is_zero():
        raise NotAUnitError("series has zero constant term")
    g0 = ff_sqrt(c0)
    if g0 is None:
        raise NeedsFieldExtension(
            "constant term %r is not a square in the coefficient field" % (c0,), 2
        )
    fparts = f._parts()
    lead_inv = (g0 + g0).inverse()
    gparts = [{ring.zero_mono(): g0}]
    for d in range(1, prec):
        acc = dict(fparts[d])
        for e in range(1, d):
            _mul_part_into(acc, gparts[e], gparts[d - e], -1)
        gparts.append(
            {m: c * lead_inv for m, c in acc.items() if not c.is_zero()}
        )
    terms = {}
    for part in gparts:
        terms.update(part)
    out = TruncatedSeries(ring, terms, prec)
    if not (out * out == f):
        raise InternalCheckError("square root failed to verify")  # pragma: no cover
    return out


def ts_kth_root(f, k):
    """A k-th root modulo the precision ideal; k must be coprime to p."""
    if not isinstance(k, int) or k < 1:
        raise PreconditionError("root exponent must be a positive integer")
    if k == 1:
        return f
    ring, prec = f.ring, f.precision
    if math.gcd(k, ring.field.p) != 1:
        raise UnsupportedCharacteristicError(
            "k must be coprime to the characteristic; got k=%d, p=%d"
            % (k, ring.field.p)
        )
    c0 = f.constant_term()
    if c0.is_zero():
        raise NotAUnitError("series has zero constant term")
    g0 = ff_kth_root(c0, k)
    if g0 is None:
        raise NeedsFieldExtension(
            "constant term %r has no %d-th root in the coefficient field" % (c0, k), k
        )
    fparts = f._parts()
    lead_inv = (ring.field.from_int(k) * g0 ** (k - 1)).inverse()
    g = TruncatedSeries(ring, {ring.zero_mono(): g0}, prec)
    for d in range(1, prec):
        defect = dict(fparts[d])
        for m, c in (g ** k)._parts()[d].items():
            s = defect.get(m)
            s = -c if s is None else s - c
            if s.is_zero():
                defect.pop(m, None)
            else:
                defect[m] = s
        if defect:
            step = {m: c * lead_inv for m, c in defect.items()}
            g = g + TruncatedSeries(ring, step, prec)
    if not (g ** k == f):
        raise InternalCheckError("k-th root failed to verify")  # pragma: no cover
    return g


# ---------------------------------------------------------------------------
# Weierstrass preparation


def _split_at(f, var, n):
    """f = low + x_var^n * high with deg_var(low) < n; returns (low, high)."""
    low, high = {}, {}
    for m, c in f.terms.items():
        e = m[var]
        if e < n:
            low[m] = c
        else:
            high[m[:var] + (e - n,) + m[var + 1 :]] = c
    return (
        TruncatedSeries(f.ring, low, f.precision),
        TruncatedSeries(f.ring, high, f.precision),
    )


def _weierstrass_divide(g, f, var, n):
    """q, r with g = q*f + r and deg_var(r) < n, modulo the precision ideal.

    f must split as low + x_var^n * U with U a unit and the low part's
    coefficients in the maximal ideal of the other-variable subring; the
    remainder of each round then gains one order in those variables, so
    the loop ends within the precision.
    """
    prec = min(g.precision, f.precision)
    g = g.truncate(prec)
    f = f.truncate(prec)
    _, unit = _split_at(f, var, n)
    unit_inv = ts_inverse(unit)
    q = TruncatedSeries(f.ring, {}, prec)
    r = TruncatedSeries(f.ring, {}, prec)
    rem = g
    for _ in range(prec + 1):
        if rem.is_zero():
            return q, r
        low, high = _split_at(rem, var, n)
        dq = unit_inv * high
        q = q + dq
        r = r + low
        rem = rem - low - dq * f
    raise InternalCheckError("weierstrass division did not converge")


class PreparedForm:
    """Weierstrass factorization f = unit * distinguished in one variable."""

    __slots__ = ("var", "degree", "unit", "coeffs")

    def __init__(self, var, degree, unit, coeffs):
        self.var = var
        self.degree = degree
        self.unit = unit
        self.coeffs = list(coeffs)

    def distinguished(self):
        """x_var^degree plus the lower coefficient terms, as one series."""
        ring = self.unit.ring
        mono = [0] * ring.n
        mono[self.var] = self.degree
        out = TruncatedSeries(
            ring, {tuple(mono): ring.field.one()}, self.unit.precision
        )
        xvar = TruncatedSeries(
            ring,
            {tuple(1 if j == self.var else 0 for j in range(ring.n)): ring.field.one()},
            self.unit.precision,
        )
        for i, a in enumerate(self.coeffs):
            out = out + a * xvar ** i
        return out

    def __repr__(self):
        return "PreparedForm(var=%d, degree=%d)" % (self.var, self.degree)


def weierstrass_prepare(f, var):
    """Factor f as unit * (monic distinguished polynomial in x_var).

    The distinguished degree is the least n whose pure-power coefficient
    x_var^n appears with a nonzero constant coefficient; the unit and the
    lower coefficients are found by successive approximation and the
    product is re-checked against f before returning.
    """
    ring, prec = f.ring, f.precision
    if not 0 <= var < ring.n:
        raise PreconditionError("no variable with index %d" % var)
    n = None
    for e in range(prec):
        mono = tuple(e if j == var else 0 for j in range(ring.n))
        if not f.coefficient(mono).is_zero():
            n = e
            break
    if n is None:
        raise NotPreparableError(
            "no coefficient of %s is a unit within precision %d"
            % (ring.names[var], prec)
        )
    mono = [0] * ring.n
    mono[var] = n
    power = TruncatedSeries(ring, {tuple(mono): ring.field.one()}, prec)
    q, r = _weierstrass_divide(power, f, var, n)
    unit = ts_inverse(q)
    coeffs = []
    for i in range(n):
        sel = {}
        for m, c in r.terms.items():
            if m[var] == i:
                sel[m[:var] + (0,) + m[var + 1 :]] = -c
        a = TruncatedSeries(ring, sel, prec)
        if not a.constant_term().is_zero():
            raise InternalCheckError(
                "distinguished coefficient has a unit part"
            )  # pragma: no cover
        coeffs.append(a)
    form = PreparedForm(var, n, unit, coeffs)
    if not (unit * form.distinguished() == f):
        raise InternalCheckError("prepared form failed to verify")  # pragma: no cover
    return form


# ---------------------------------------------------------------------------
# completing the square


def quadric_complete(F, i):
    """Rewrite F as v*(x_i + a)^2 + (other squares) + G1.

    F must look like x_i^2 + (a sum of distinct other squares) + G where,
    splitting F by x_i-degree, the x_i coefficient lies in m^2 and the
    x_i-free part deviates from its squares only in degree >= 3.  Returns
    (v, a, G1) with v a unit, a and G1 supported on the other variables
    in degrees >= 2 and >= 3.
    """
    ring, prec = F.ring, F.precision
    if ring.field.p == 2:
        raise UnsupportedCharacteristicError("completing the square requires odd characteristic")
    if not 0 <= i < ring.n:
        raise PreconditionError("no variable with index %d" % i)
    pure = [0] * ring.n
    pure[i] = 2
    if ring.field.from_int(1) != F.coefficient(tuple(pure)):
        raise PreconditionError(
            "coefficient of %s^2 must be 1" % ring.names[i]
        )
    c1 = {}
    c0 = {}
    vterms = {}
    for m, c in F.terms.items():
        e = m[i]
        base = m[:i] + (0,) + m[i + 1 :]
        if e == 0:
            c0[base] = c
        elif e == 1:
            c1[base] = c
        else:
            vterms[m[:i] + (e - 2,) + m[i + 1 :]] = c
    for m in c1:
        if sum(m) < 2:
            raise PreconditionError(
                "coefficient of %s is not in the square of the maximal ideal"
                % ring.names[i]
            )
    squares = {}
    for m, c in c0.items():
        d = sum(m)
        if d >= 3:
            continue
        if d == 2 and max(m) == 2 and c == ring.field.one():
            squares[m] = c
            continue
        raise PreconditionError(
            "the %s-free part must be a sum of distinct squares plus degree"
            " >= 3 terms" % ring.names[i]
        )
    v = TruncatedSeries(ring, vterms, prec)
    c1s = TruncatedSeries(ring, c1, prec)
    deviation = TruncatedSeries(
        ring, {m: c for m, c in c0.items() if m not in squares}, prec
    )
    half = ring.field.from_int(2).inverse()
    a = half * ts_inverse(v) * c1s
    g1 = deviation - v * a * a
    xi = TruncatedSeries(
        ring,
        {tuple(1 if j == i else 0 for j in range(ring.n)): ring.field.one()},
        prec,
    )
    rebuilt = v * (xi + a) ** 2 + TruncatedSeries(ring, squares, prec) + g1
    if not (rebuilt == F):
        raise InternalCheckError("completed square failed to verify")  # pragma: no cover
    return v, a, g1


# ---------------------------------------------------------------------------
# substitution plumbing shared by the diagonalization


def compose_series(f, images):
    """f with each variable replaced by its image series.

    Images may be TruncatedSeries or Polynomial, one per variable; the
    result precision is the smallest precision in sight.
    """
    ring = f.ring
    if len(images) != ring.n:
        raise PreconditionError("need one image per variable")
    prec = f.precision
    fixed = []
    for img in images:
        if isinstance(img, Polynomial):
            img = TruncatedSeries(img.ring, img.terms, f.precision)
        fixed.append(img)
        prec = min(prec, img.precision)
    target = fixed[0].ring if fixed else ring
    for img in fixed:
        if img.ring != target:
            raise RingMismatchError("images from different rings")
    if target.field != ring.field:
        raise RingMismatchError("images over a different field")
    one = TruncatedSeries(target, {target.zero_mono(): target.field.one()}, prec)
    caches = [{0: one} for _ in range(ring.n)]

    def power(j, e):
        cache = caches[j]
        if e in cache:
            return cache[e]
        half = power(j, e // 2)
        out = half * half
        if e % 2:
            out = out * fixed[j]
        cache[e] = out
        return out

    acc = TruncatedSeries(target, {}, prec)
    for mono, c in f.terms.items():
        term = TruncatedSeries(target, {target.zero_mono(): c}, prec)
        for j, e in enumerate(mono):
            if e:
                term = term * power(j, e)
        acc = acc + term
    return acc


def _variable_series(ring, i, prec):
    mono = tuple(1 if j == i else 0 for j in range(ring.n))
    return TruncatedSeries(ring, {mono: ring.field.one()}, prec)


def _identity_images(ring, prec):
    return [_variable_series(ring, i, prec) for i in range(ring.n)]


def _images_of(phi, ring, prec):
    """Normalize a substitution argument to a list of TruncatedSeries."""
    if isinstance(phi, Substitution):
        images = phi.images
    else:
        images = list(phi)
    out = []
    for img in images:
        if isinstance(img, Polynomial):
            img = TruncatedSeries(img.ring, img.terms, prec)
        if not isinstance(img, TruncatedSeries):
            raise PreconditionError("substitution images must be series or polynomials")
        out.append(img)
    if len(out) != ring.n:
        raise PreconditionError("need one image per variable")
    return out


def _linear_part(images, ring):
    """Matrix of degree-1 coefficients, rows indexed by source variable."""
    rows = []
    for img in images:
        row = []
        for j in range(ring.n):
            mono = tuple(1 if t == j else 0 for t in range(ring.n))
            row.append(img.coefficient(mono))
        rows.append(row)
    return rows


def _compose_images(phi, psi):
    """The substitution sending x_i to phi_i evaluated at psi."""
    return [compose_series(img, psi) for img in phi]


def _invert_images(images, ring, prec):
    """Inverse of a local substitution modulo the precision ideal.

    Newton refinement from the inverted linear part; each round gains at
    least one order, so failure to settle within the precision is a bug.
    """
    for img in images:
        if not img.constant_term().is_zero():
            raise PreconditionError("substitution is not local")
    lin = _linear_part(images, ring)
    inv = matrix_inverse(ring.field, lin)
    psi = []
    for i in range(ring.n):
        terms = {}
        for j in range(ring.n):
            if not inv[i][j].is_zero():
                mono = tuple(1 if t == j else 0 for t in range(ring.n))
                terms[mono] = inv[i][j]
        psi.append(TruncatedSeries(ring, terms, prec))
    for _ in range(prec + 1):
        errs = []
        all_zero = True
        for i in range(ring.n):
            err = compose_series(images[i], psi) - _variable_series(ring, i, prec)
            errs.append(err)
            all_zero = all_zero and err.is_zero()
        if all_zero:
            return psi
        for i in range(ring.n):
            delta = TruncatedSeries(ring, {}, prec)
            for j in range(ring.n):
                if not inv[i][j].is_zero():
                    delta = delta + inv[i][j] * errs[j]
            psi[i] = psi[i] - delta
    raise InternalCheckError("substitution inversion did not converge")


def verify_substitution(F, phi, target):
    """True when F after the substitution matches target below precision."""
    ring = F.ring
    images = _images_of(phi, ring, F.precision)
    for img in images:
        if not img.constant_term().is_zero():
            raise PreconditionError("substitution is not local")
    if not matrix_is_invertible(ring.field, _linear_part(images, ring)):
        raise PreconditionError("substitution has a singular linear part")
    return compose_series(F, images) == target


# ---------------------------------------------------------------------------
# diagonalizing the quadratic part


def _fixed_nonsquare(field):
    """The first non-square unit in index order; fields of odd size only."""
    for idx in range(1, field.size):
        c = field.element(idx)
        if ff_sqrt(c) is None:
            return c
    raise PreconditionError("every element is a square here")  # pragma: no cover


def _quadratic_matrix(F):
    """Symmetric matrix of the degree-2 part, off-diagonals halved."""
    ring = F.ring
    n = ring.n
    half = ring.field.from_int(2).inverse()
    rows = [[ring.field.zero() for _ in range(n)] for _ in range(n)]
    for m, c in F.terms.items():
        if sum(m) != 2:
            continue
        nz = [j for j, e in enumerate(m) if e]
        if len(nz) == 1:
            rows[nz[0]][nz[0]] = c
        else:
            i, j = nz
            rows[i][j] = c * half
            rows[j][i] = c * half
    return rows


def diagonalize_quadratic_part(F, extend=False):
    """A linear change M and rank marker l with F o M diagonal in degree 2.

    After the change the quadratic part is sum c_i x_i^2 for i <= l with
    each c_i either 1 or one fixed non-square; l = -1 means the quadratic
    part vanishes.  With extend=True a quadratic field extension is taken
    when non-squares remain, so every c_i becomes 1.
    """
    ring = F.ring
    if ring.field.p == 2:
        raise UnsupportedCharacteristicError("diagonalization requires odd characteristic")
    n = ring.n
    field = ring.field
    A = _quadratic_matrix(F)
    M = [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]

    def col_add(dst, src, factor):
        for r in range(n):
            A[r][dst] = A[r][dst] + factor * A[r][src]
        for r in range(n):
            A[dst][r] = A[dst][r] + factor * A[src][r]
        for r in range(n):
            M[r][dst] = M[r][dst] + factor * M[r][src]

    def col_swap(a, b):
        for r in range(n):
            A[r][a], A[r][b] = A[r][b], A[r][a]
        A[a], A[b] = A[b], A[a]
        for r in range(n):
            M[r][a], M[r][b] = M[r][b], M[r][a]

    def col_scale(dst, factor):
        for r in range(n):
            A[r][dst] = A[r][dst] * factor
        for r in range(n):
            A[dst][r] = A[dst][r] * factor
        for r in range(n):
            M[r][dst] = M[r][dst] * factor

    rank = n
    for t in range(n):
        piv = None
        for s in range(t, n):
            if not A[s][s].is_zero():
                piv = s
                break
        if piv is None:
            pair = None
            for r in range(t, n):
                for s in range(r + 1, n):
                    if not A[r][s].is_zero():
                        pair = (r, s)
                        break
                if pair:
                    break
            if pair is None:
                rank = t
                break
            r, s = pair
            col_add(r, s, field.one())
            piv = r
        if piv != t:
            col_swap(t, piv)
        d = A[t][t]
        for s in range(t + 1, n):
            if not A[t][s].is_zero():
                col_add(s, t, -(A[t][s] / d))

    needs_extension = False
    for t in range(rank):
        d = A[t][t]
        w = ff_sqrt(d)
        if w is not None:
            col_scale(t, w.inverse())
        else:
            ns = _fixed_nonsquare(field)
            w = ff_sqrt(d / ns)
            col_scale(t, w.inverse())
            needs_extension = True

    if needs_extension and extend:
        big, embed = extend_field(field, 2)
        ring2 = PolyRing(big, ring.names, ring.order)
        return diagonalize_quadratic_part(F.map_coefficients(ring2, embed), extend=True)

    images = []
    for i in range(n):
        terms = {}
        for j in range(n):
            if not M[i][j].is_zero():
                mono = tuple(1 if t == j else 0 for t in range(n))
                terms[mono] = M[i][j]
        images.append(Polynomial(ring, terms))
    return Substitution(ring, images), rank - 1


# ---------------------------------------------------------------------------
# the full hypersurface diagonalization


SUM_OF_SQUARES = "sum-of-squares"
SQUARES_PLUS_CUBE = "squares-plus-cube"
DEGENERATE = "degenerate"


class DiagonalizationCertificate:
    """A verified change of variables onto a diagonal normal form."""

    __slots__ = ("ring", "precision", "images", "tag", "normal_form", "residual", "extensions")

    def __init__(self, ring, precision, images, tag, normal_form, residual, extensions):
        self.ring = ring
        self.precision = precision
        self.images = list(images)
        self.tag = tag
        self.normal_form = normal_form
        self.residual = residual
        self.extensions = list(extensions)

    def substitution(self):
        """The change of variables as a polynomial Substitution."""
        return Substitution(self.ring, [img.to_polynomial() for img in self.images])

    def verify(self, F):
        """Replay the substitution against F over the certificate's ring.

        When the certificate records field extensions, F is first mapped
        along the same (deterministic) extension chain.
        """
        if F.ring != self.ring:
            mapped = F
            for ext in self.extensions:
                if mapped.ring.field.size == self.ring.field.size:
                    break
                big, embed = extend_field(mapped.ring.field, ext["degree"])
                mapped = mapped.map_coefficients(PolyRing(big, self.ring.names), embed)
            if mapped.ring != self.ring:
                raise RingMismatchError(
                    "certificate was issued over a different ring; map F first"
                )
            F = mapped
        return verify_substitution(F, self.images, self.normal_form)

    def to_json(self):
        """A JSON-ready dict; coefficients are element indexes."""
        field = self.ring.field
        modulus = list(field.modulus) if field.modulus is not None else None

        def dump(ts):
            return [[list(m), c.i] for m, c in sorted(ts.terms.items())]

        return {
            "field": {"p": field.p, "m": field.m, "modulus": modulus},
            "variables": list(self.ring.names),
            "precision": self.precision,
            "tag": self.tag,
            "images": [dump(img) for img in self.images],
            "normal_form": dump(self.normal_form),
            "residual": dump(self.residual),
            "extensions": self.extensions,
        }

    @classmethod
    def from_json(cls, data):
        modulus = data["field"]["modulus"]
        spec = FieldSpec(
            data["field"]["p"],
            data["field"]["m"],
            tuple(modulus) if modulus is not None else None,
        )
        ring = PolyRing(spec, data["variables"])
        prec = data["precision"]

        def load(rows):
            return TruncatedSeries(
                ring, {tuple(m): spec.element(ci) for m, ci in rows}, prec
            )

        return cls(
            ring,
            prec,
            [load(rows) for rows in data["images"]],
            data["tag"],
            load(data["normal_form"]),
            load(data["residual"]),
            [dict(e) for e in data["extensions"]],
        )

    def __repr__(self):
        return "DiagonalizationCertificate(tag=%r, precision=%d)" % (
            self.tag,
            self.precision,
        )


def _sum_of_squares(ring, prec, count):
    terms = {}
    for i in range(count):
        mono = tuple(2 if j == i else 0 for j in range(ring.n))
        terms[mono] = ring.field.one()
    return TruncatedSeries(ring, terms, prec)


def _divide_pure_power(f, var, k):
    """f / x_var^k when every term allows it; precision drops by k."""
    out = {}
    for m, c in f.terms.items():
        if m[var] < k:
            return None
        out[m[:var] + (m[var] - k,) + m[var + 1 :]] = c
    return TruncatedSeries(f.ring, out, f.precision - k)


def diagonalize_hypersurface(F, target=SUM_OF_SQUARES, extend=True):
    """Diagonalize F onto the requested normal form, with certificate.

    The substitution composes the linear change of the quadratic part,
    one completed square per variable (inverted shift maps), and final
    unit root rescalings.  Rank shortfalls downgrade the tag to
    degenerate, keeping the partial form actually reached; missing field
    roots either raise or, with extend=True, rebuild over a recorded
    quadratic or cubic extension.
    """
    if target not in (SUM_OF_SQUARES, SQUARES_PLUS_CUBE):
        raise PreconditionError("unknown normal form target %r" % (target,))
    ring = F.ring
    if ring.field.p == 2:
        raise UnsupportedCharacteristicError("diagonalization requires odd characteristic")
    if target == SQUARES_PLUS_CUBE and ring.field.p == 3:
        raise UnsupportedCharacteristicError("the cube target requires characteristic away from 3")
    if target == SQUARES_PLUS_CUBE and F.precision < 6:
        raise PreconditionError("the cube target needs precision at least 6")
    ord_f = F.order()
    if ord_f is None or ord_f < 2:
        raise PreconditionError("F must lie in the square of the maximal ideal")
    extensions = []
    while True:
        try:
            return _diagonalize_once(F, target, extensions)
        except NeedsFieldExtension as exc:
            if not extend:
                raise
            big, embed = extend_field(F.ring.field, exc.degree)
            ring2 = PolyRing(big, F.ring.names, F.ring.order)
            extensions.append(
                {"degree": exc.degree, "p": big.p, "m": big.m, "modulus": list(big.modulus)}
            )
            F = F.map_coefficients(ring2, embed)


def _diagonalize_once(F, target, extensions):
    ring, prec = F.ring, F.precision
    n = ring.n
    M, l = diagonalize_quadratic_part(F)
    rank = l + 1
    current = compose_series(F, M.images)
    for t in range(rank):
        mono = tuple(2 if j == t else 0 for j in range(n))
        if current.coefficient(mono) != ring.field.one():
            raise NeedsFieldExtension(
                "diagonal quadratic coefficients include a non-square", 2
            )
    phi = _images_of(M, ring, prec)

    # Peel off one completed square per stage without substituting, so
    # each residue stays inside the cube of the ideal of later variables.
    needed = n if target == SUM_OF_SQUARES else n - 1
    parts = []
    for i in range(min(rank, needed)):
        v, a, _g1 = quadric_complete(current, i)
        shifted = _variable_series(ring, i, prec) + a
        parts.append((v, a))
        current = current - v * shifted * shifted

    completed = len(parts)
    shift = _identity_images(ring, prec)
    for i, (_v, a) in enumerate(parts):
        shift[i] = _variable_series(ring, i, prec) + a
    psi = _invert_images(shift, ring, prec)
    units = [compose_series(v, psi) for v, _a in parts]
    leftover = compose_series(current, psi)
    phi = _compose_images(phi, psi)

    tag = target
    roots = list(units)
    cube_root = None
    if target == SUM_OF_SQUARES:
        if rank < n or not leftover.is_zero():
            tag = DEGENERATE
    else:
        cube = _divide_pure_power(leftover, n - 1, 3) if not leftover.is_zero() else None
        if rank != n - 1 or cube is None:
            tag = DEGENERATE
        elif cube.constant_term().is_zero():
            tag = DEGENERATE
        else:
            c0 = cube.constant_term()
            if ff_kth_root(c0, 3) is None:
                raise NeedsFieldExtension(
                    "cube coefficient %r has no cube root in the field" % (c0,), 3
                )
            cube_root = ts_kth_root(cube, 3)

    scale = _identity_images(ring, prec)
    for i, u in enumerate(roots):
        scale[i] = ts_sqrt(u) * _variable_series(ring, i, prec)
    if cube_root is not None:
        scale[n - 1] = cube_root * _variable_series(ring, n - 1, prec)
    rho = _invert_images(scale, ring, prec)
    phi = _compose_images(phi, rho)

    achieved = compose_series(F, phi)
    if tag == SUM_OF_SQUARES:
        normal = _sum_of_squares(ring, achieved.precision, n)
    elif tag == SQUARES_PLUS_CUBE:
        normal = _sum_of_squares(ring, achieved.precision, n - 1)
        mono = tuple(3 if j == n - 1 else 0 for j in range(n))
        normal = normal + TruncatedSeries(ring, {mono: ring.field.one()}, achieved.precision)
    else:
        normal = achieved
    residual = achieved - normal
    if tag != DEGENERATE and not residual.is_zero():
        raise InternalCheckError("diagonalization residual is nonzero below precision")
    if not verify_substitution(F, phi, normal):
        raise InternalCheckError("certificate failed its own verification")  # pragma: no cover
    return DiagonalizationCertificate(
        ring, achieved.precision, phi, tag, normal, residual, extensions
    )
