"""Sparse multivariate polynomials over a finite field.

Monomials are plain exponent tuples, one slot per ring variable, and a
polynomial is a dict from monomial to nonzero coefficient.  Term order is
a property of the ring (graded reverse lexicographic by default, plain
lexicographic available), not of the polynomial, and only matters when a
leading term or a sorted listing is requested.

The expression language accepted by parse_poly: decimal integers, the
field generator name, variable names, +, -, *, ^ and parentheses.  There
is no implicit multiplication; "2x" is an error with the byte offset of
the offending token.
"""

from __future__ import annotations

from .errors import (
    FieldMismatchError,
    KernelCapacityError,
    ParseError,
    PreconditionError,
    RingMismatchError,
    SingularMatrixError,
)
from .field import FieldElement, FieldSpec, element_str

_EXP_LIMIT = 1 << 40


# ---------------------------------------------------------------------------
# monomial helpers (exponent tuples)


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    """True when a divides b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a, b):
    """a / b; requires divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_degree(a):
    return sum(a)


class MonomialOrder:
    """A monomial order: kind 'degrevlex' or 'lex' plus a variable priority.

    priority lists variable indices from most to least significant; the
    default is the ring's own order of declaration.
    """

    __slots__ = ("kind", "priority")

    def __init__(self, kind, priority):
        if kind not in ("degrevlex", "lex"):
            raise PreconditionError("unknown monomial order %r" % (kind,))
        self.kind = kind
        self.priority = tuple(priority)

    @classmethod
    def degrevlex(cls, n, priority=None):
        return cls("degrevlex", priority if priority is not None else range(n))

    @classmethod
    def lex(cls, n, priority=None):
        return cls("lex", priority if priority is not None else range(n))

    def key(self, mono):
        """Sort key: bigger key means bigger monomial."""
        if self.kind == "degrevlex":
            return (
                sum(mono),
                tuple(-mono[i] for i in reversed(self.priority)),
            )
        return tuple(mono[i] for i in self.priority)

    def greater(self, a, b):
        return self.key(a) > self.key(b)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.priority == other.priority
        )

    def __hash__(self):
        return hash((self.kind, self.priority))

    def __repr__(self):
        return "MonomialOrder(%r, %r)" % (self.kind, self.priority)


class PolyRing:
    """A polynomial ring handle: field, named variables, active order."""

    __slots__ = ("field", "names", "order")

    def __init__(self, field, names, order=None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PreconditionError("duplicate variable names")
        if field.m > 1 and field.gen_name in names:
            raise PreconditionError(
                "variable %r collides with the field generator" % (field.gen_name,)
            )
        for nm in names:
            if not nm.isidentifier():
                raise PreconditionError("bad variable name %r" % (nm,))
        self.field = field
        self.names = names
        self.order = order if order is not None else MonomialOrder.degrevlex(len(names))
        if len(self.order.priority) != len(names) or set(self.order.priority) != set(
            range(len(names))
        ):
            raise PreconditionError("order priority does not match the variables")

    @property
    def n(self):
        return len(self.names)

    def zero_mono(self):
        return (0,) * self.n

    def build(self, terms):
        """Polynomial from a mono -> coefficient mapping; zeros dropped."""
        clean = {}
        for mono, c in terms.items():
            if isinstance(c, int):
                c = self.field.from_int(c)
            if c.spec != self.field:
                raise FieldMismatchError("coefficient from the wrong field")
            if len(mono) != self.n or any(e < 0 for e in mono):
                raise PreconditionError("bad exponent vector %r" % (mono,))
            if not c.is_zero():
                clean[tuple(mono)] = c
        return Polynomial(self, clean)

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, c):
        if isinstance(c, int):
            c = self.field.from_int(c)
        if c.is_zero():
            return self.zero()
        return Polynomial(self, {self.zero_mono(): c})

    def variable(self, i):
        if isinstance(i, str):
            i = self.names.index(i)
        mono = [0] * self.n
        mono[i] = 1
        return Polynomial(self, {tuple(mono): self.field.one()})

    def variables(self):
        return [self.variable(i) for i in range(self.n)]

    def parse(self, text):
        return parse_poly(text, self)

    def with_order(self, order):
        return PolyRing(self.field, self.names, order)

    def without_variable(self, i):
        names = self.names[:i] + self.names[i + 1 :]
        kind = self.order.kind
        # priorities re-pack around the removed slot
        prio = [j - (j > i) for j in self.order.priority if j != i]
        return PolyRing(self.field, names, MonomialOrder(kind, prio))

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.names == other.names
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.field, self.names, self.order))

    def __repr__(self):
        return "PolyRing(%r, %s)" % (self.field, ",".join(self.names))


class Polynomial:
    """Immutable-by-convention sparse polynomial; do not mutate .terms."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- queries ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get(self.ring.zero_mono(), self.ring.field.zero())

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), self.ring.field.zero())

    def total_degree(self):
        """Largest term degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def order_of_vanishing(self):
        """Smallest term degree; None for the zero polynomial."""
        return min((sum(m) for m in self.terms), default=None)

    def sorted_terms(self):
        """Terms from greatest to least in the ring's order."""
        key = self.ring.order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_monomial(self):
        if not self.terms:
            raise PreconditionError("zero polynomial has no leading term")
        key = self.ring.order.key
        return max(self.terms, key=key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self):
        if not self.terms:
            return self
        inv = self.leading_coefficient().inverse()
        return Polynomial(self.ring, {m: c * inv for m, c in self.terms.items()})

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError("polynomials from different rings")
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            cur = out.get(m)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            c = other if isinstance(other, FieldElement) else self.ring.field.from_int(other)
            if c.is_zero():
                return self.ring.zero()
            return Polynomial(self.ring, {m: x * c for m, x in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                cur = out.get(m)
                s = c if cur is None else cur + c
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise PreconditionError("negative polynomial power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- identity -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return "<%s>" % poly_str(self)


# ---------------------------------------------------------------------------
# printing


def _coeff_str(c):
    s = element_str(c)
    if "+" in s or "-" in s or "*" in s or "^" in s:
        return "(%s)" % s
    return s


def _mono_str(ring, mono):
    parts = []
    for i, e in enumerate(mono):
        if e == 0:
            continue
        if e == 1:
            parts.append(ring.names[i])
        else:
            parts.append("%s^%d" % (ring.names[i], e))
    return "*".join(parts)


def poly_str(f):
    """Canonical text form; parses back to an equal polynomial."""
    if f.is_zero():
        return "0"
    parts = []
    one = f.ring.field.one()
    for mono, c in f.sorted_terms():
        ms = _mono_str(f.ring, mono)
        if not ms:
            parts.append(_coeff_str(c))
        elif c == one:
            parts.append(ms)
        else:
            parts.append("%s*%s" % (_coeff_str(c), ms))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# parsing


class _Token:
    __slots__ = ("kind", "value", "offset")

    def __init__(self, kind, value, offset):
        self.kind = kind
        self.value = value
        self.offset = offset


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*^()":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError("unexpected character %r" % ch, offset=i)
    tokens.append(_Token("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, ring):
        self.tokens = tokens
        self.pos = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expr(self):
        t = self.peek()
        if t.kind == "-":
            self.take()
            acc = -self.term()
        else:
            acc = self.term()
        while True:
            t = self.peek()
            if t.kind == "+":
                self.take()
                acc = acc + self.term()
            elif t.kind == "-":
                self.take()
                acc = acc - self.term()
            else:
                return acc

    def term(self):
        acc = self.factor()
        while self.peek().kind == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        t = self.peek()
        if t.kind == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek().kind == "^":
            self.take()
            e = self.peek()
            if e.kind != "int":
                raise ParseError("exponent must be a nonnegative integer", offset=e.offset)
            self.take()
            if e.value > _EXP_LIMIT:
                raise KernelCapacityError("exponent %d too large" % e.value)
            return base ** e.value
        return base

    def atom(self):
        t = self.take()
        ring = self.ring
        if t.kind == "int":
            return ring.constant(t.value)
        if t.kind == "ident":
            if t.value in ring.names:
                return ring.variable(t.value)
            if ring.field.m > 1 and t.value == ring.field.gen_name:
                return ring.constant(ring.field.generator())
            raise ParseError("unknown identifier %r" % t.value, offset=t.offset)
        if t.kind == "(":
            inner = self.expr()
            closing = self.take()
            if closing.kind != ")":
                raise ParseError("expected ')'", offset=closing.offset)
            return inner
        raise ParseError("expected a value", offset=t.offset)


def parse_poly(text, ring):
    """Parse the expression language into a Polynomial over ring."""
    parser = _Parser(_tokenize(text), ring)
    result = parser.expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError("trailing input", offset=tail.offset)
    return result


# ---------------------------------------------------------------------------
# structural operations


def frobenius_power(f, e):
    """f^(p^e) computed termwise: coefficients to the p^e, exponents scaled.

    Costs one pass over the terms, never a repeated product.
    """
    if e < 0:
        raise PreconditionError("Frobenius power needs e >= 0")
    if e == 0:
        return f
    q = f.ring.field.p ** e
    out = {}
    for mono, c in f.terms.items():
        if any(x * q > _EXP_LIMIT for x in mono):
            raise KernelCapacityError("exponent overflow in Frobenius power")
        cc = c
        for _ in range(e):
            cc = cc.frobenius()
        out[tuple(x * q for x in mono)] = cc
    return Polynomial(f.ring, out)


def bracket_power(gens, q):
    """Generators raised to the q-th Frobenius power; q must be a power of p."""
    gens = list(gens)
    if not gens:
        return []
    p = gens[0].ring.field.p
    e = 0
    qq = q
    while qq > 1 and qq % p == 0:
        qq //= p
        e += 1
    if qq != 1 or q < 1:
        raise PreconditionError("q = %r is not a power of p = %d" % (q, p))
    return [frobenius_power(g, e) for g in gens]


def homogeneous_component(f, d):
    return Polynomial(f.ring, {m: c for m, c in f.terms.items() if sum(m) == d})


def homogeneous_components(f):
    """Dict degree -> component, zero components omitted."""
    out = {}
    for m, c in f.terms.items():
        out.setdefault(sum(m), {})[m] = c
    return {d: Polynomial(f.ring, t) for d, t in sorted(out.items())}


def substitute(f, images):
    """Evaluate f at the given polynomial images, one per variable."""
    ring = f.ring
    if len(images) != ring.n:
        raise PreconditionError("need one image per variable")
    for g in images:
        if g.ring != images[0].ring:
            raise RingMismatchError("images from different rings")
    target = images[0].ring if images else ring
    if target.field != ring.field:
        raise FieldMismatchError("images over a different field")
    caches = [{0: target.one()} for _ in range(ring.n)]

    def power(i, e):
        cache = caches[i]
        if e in cache:
            return cache[e]
        half = power(i, e // 2)
        out = half * half
        if e % 2:
            out = out * images[i]
        cache[e] = out
        return out

    acc = target.zero()
    for mono, c in f.terms.items():
        term = target.constant(c)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        acc = acc + term
    return acc


class Substitution:
    """A named tuple of images, one per source ring variable.

    Local means every image has zero constant term, which is what keeps a
    substitution meaningful on power series.
    """

    __slots__ = ("ring", "images")

    def __init__(self, ring, images):
        images = list(images)
        if len(images) != ring.n:
            raise PreconditionError("need one image per variable")
        self.ring = ring
        self.images = images

    def is_local(self):
        return all(img.constant_term().is_zero() for img in self.images)

    def linear_matrix(self):
        """Matrix of degree-1 coefficients: rows indexed by source variable."""
        n = self.ring.n
        rows = []
        for img in self.images:
            row = []
            for j in range(n):
                mono = [0] * n
                mono[j] = 1
                row.append(img.coefficient(tuple(mono)))
            rows.append(row)
        return rows

    def apply(self, f):
        return substitute(f, self.images)


def matrix_is_invertible(field, rows):
    """Gaussian elimination rank check over the field."""
    n = len(rows)
    m = [list(r) for r in rows]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return False
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return True


def matrix_inverse(field, rows):
    """Inverse matrix over the field, or SingularMatrixError."""
    n = len(rows)
    m = [list(r) + [field.one() if i == j else field.zero() for j in range(n)]
         for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def linear_change(f, matrix):
    """Apply the invertible linear change x_i -> sum_j matrix[i][j] x_j."""
    ring = f.ring
    n = ring.n
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise PreconditionError("matrix shape does not match the ring")
    rows = [
        [c if isinstance(c, FieldElement) else ring.field.from_int(c) for c in row]
        for row in matrix
    ]
    if not matrix_is_invertible(ring.field, rows):
        raise SingularMatrixError("linear change matrix is singular")
    images = []
    for row in rows:
        img = ring.zero()
        for j, c in enumerate(row):
            if not c.is_zero():
                img = img + ring.variable(j) * c
        images.append(img)
    return substitute(f, images)


def drop_variable(f, i):
    """Rewrite f in the ring without variable i; f must not involve it."""
    ring = f.ring
    small = ring.without_variable(i)
    out = {}
    for mono, c in f.terms.items():
        if mono[i]:
            raise PreconditionError(
                "polynomial still involves %s" % ring.names[i]
            )
        out[mono[:i] + mono[i + 1 :]] = c
    return Polynomial(small, out)


def lift_variable(f, ring, i):
    """Rewrite f (over ring-without-i) back in ring, variable i unused."""
    out = {}
    for mono, c in f.terms.items():
        out[mono[:i] + (0,) + mono[i:]] = c
    return Polynomial(ring, out)


def map_coefficients(f, target_ring, embed):
    """Push f into target_ring by mapping each coefficient through embed."""
    if target_ring.names != f.ring.names:
        raise RingMismatchError("target ring has different variables")
    return Polynomial(target_ring, {m: embed(c) for m, c in f.terms.items()})
