"""Arithmetic in GF(p) and GF(p^m).

An element of GF(p^m) = GF(p)[g]/(modulus) is stored by its index, the
integer sum(c_i * p**i) over its coordinate vector (c_0, ..., c_{m-1}) in
the power basis 1, g, g^2, ...  Small fields (size <= 256, which covers
every field the experiments touch) precompute flat addition and
multiplication tables so that the polynomial kernels can fold coefficient
arithmetic into list lookups.  Larger fields fall back to per-call
polynomial arithmetic modulo the modulus.

Root extraction returns None when no root exists in the field; callers
that can work over an extension build one with extend_field.  Whenever a
root set has more than one member the lexicographically smallest
coordinate vector is returned, so results are reproducible.
"""

from __future__ import annotations

from .errors import (
    FieldMismatchError,
    PreconditionError,
    UnsupportedCharacteristicError,
)

_TABLE_LIMIT = 256


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# univariate polynomials over GF(p), used for moduli and the big-field path;
# coefficient lists are little endian with no trailing zeros


def _utrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _uadd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return _utrim(out)


def _uscale(a, c, p):
    return _utrim([(x * c) % p for x in a])


def _umul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _utrim(out)


def _umod(a, f, p):
    # f must be monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - df
            for i in range(df + 1):
                a[shift + i] = (a[shift + i] - c * f[i]) % p
        a.pop()
    return _utrim(a)


def _ugcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        bm = _uscale(b, pow(b[-1], p - 2, p), p)
        a, b = b, _umod(a, bm, p)
    if a:
        a = _uscale(a, pow(a[-1], p - 2, p), p)
    return a


def _upow_x(e, f, p):
    """x**e modulo the monic polynomial f."""
    result = [1]
    base = _umod([0, 1], f, p)
    while e:
        if e & 1:
            result = _umod(_umul(result, base, p), f, p)
        e >>= 1
        base = _umod(_umul(base, base, p), f, p)
    return result


def _is_irreducible(f, p):
    """Monic f of degree m >= 1 is irreducible over GF(p).

    Uses the standard criterion: x^(p^m) == x mod f, and for every prime
    divisor l of m the gcd of x^(p^(m/l)) - x with f is 1.
    """
    m = len(f) - 1
    if m == 1:
        return True
    xq = _upow_x(p ** m, f, p)
    if _utrim(_uadd(xq, _uscale([0, 1], p - 1, p), p)):
        return False
    mm = m
    primes = []
    d = 2
    while d * d <= mm:
        if mm % d == 0:
            primes.append(d)
            while mm % d == 0:
                mm //= d
        d += 1
    if mm > 1:
        primes.append(mm)
    for l in primes:
        g = _uadd(_upow_x(p ** (m // l), f, p), _uscale([0, 1], p - 1, p), p)
        if _ugcd(g, f, p) != [1]:
            return False
    return True


def find_irreducible(p, m, seed=0):
    """Monic irreducible polynomial of degree m over GF(p), as a coefficient
    tuple (c_0, ..., c_{m-1}, 1).

    Candidates are scanned in a fixed cyclic order starting at an offset
    derived from the seed, so the result is reproducible; seed 0 starts at
    the all-zero tail and therefore returns the least candidate.
    """
    if not _is_prime(p):
        raise PreconditionError("characteristic %r is not prime" % (p,))
    if m < 1:
        raise PreconditionError("degree must be positive")
    if m == 1:
        return (0, 1)
    total = p ** m
    start = 0
    if seed:
        import random

        start = random.Random(seed).randrange(total)
    for k in range(total):
        idx = (start + k) % total
        coeffs = []
        v = idx
        for _ in range(m):
            coeffs.append(v % p)
            v //= p
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise PreconditionError("no irreducible polynomial found")  # pragma: no cover


class FieldSpec:
    """A concrete finite field GF(p^m) with a named generator.

    For m == 1 the modulus is omitted and elements are plain residues.
    Specs compare equal when (p, m, modulus) agree, so elements built by
    independent constructions interoperate.
    """

    __slots__ = (
        "p",
        "m",
        "modulus",
        "gen_name",
        "size",
        "_add",
        "_mul",
        "_neg",
        "_inv",
        "_frob",
        "_exp",
        "_log",
        "_elems",
    )

    def __init__(self, p, m=1, modulus=None, gen_name="t", seed=0):
        if not _is_prime(p):
            raise PreconditionError("characteristic %r is not prime" % (p,))
        if m < 1:
            raise PreconditionError("extension degree must be positive")
        if m == 1:
            if modulus is not None:
                raise PreconditionError("prime fields take no modulus")
        else:
            if modulus is None:
                modulus = find_irreducible(p, m, seed)
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise PreconditionError("modulus must be monic of degree m")
            if not _is_irreducible(list(modulus), p):
                raise PreconditionError("modulus is reducible")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.gen_name = gen_name
        self.size = p ** m
        self._add = None
        self._mul = None
        self._neg = None
        self._inv = None
        self._frob = None
        self._exp = None
        self._log = None
        self._elems = None
        if self.size <= _TABLE_LIMIT:
            self._build_tables()

    # -- construction of the lookup tables ----------------------------------

    def _raw_mul(self, a, b):
        p, m = self.p, self.m
        if m == 1:
            return (a * b) % p
        pa = self.coeffs_of(a)
        pb = self.coeffs_of(b)
        prod = _umod(_umul(list(pa), list(pb), p), list(self.modulus), p)
        return self._index_of(prod)

    def _build_tables(self):
        p, size = self.p, self.size
        # discrete log tables from a multiplicative generator
        exp = None
        for cand in range(1, size):
            seen = [0] * size
            powers = [1]
            cur = 1
            ok = True
            for _ in range(size - 2):
                cur = self._raw_mul(cur, cand)
                if seen[cur] or cur == 1:
                    ok = False
                    break
                seen[cur] = 1
                powers.append(cur)
            if ok and self._raw_mul(cur, cand) == 1:
                exp = powers
                break
        if exp is None:  # pragma: no cover
            raise PreconditionError("no multiplicative generator found")
        log = [0] * size
        for k, v in enumerate(exp):
            log[v] = k
        self._exp = exp
        self._log = log
        order = size - 1
        mul = [0] * (size * size)
        for a in range(1, size):
            la = log[a]
            row = a * size
            for b in range(1, size):
                mul[row + b] = exp[(la + log[b]) % order]
        self._mul = mul
        add = [0] * (size * size)
        digits = [self.coeffs_of(a) for a in range(size)]
        for a in range(size):
            da = digits[a]
            row = a * size
            for b in range(size):
                db = digits[b]
                add[row + b] = self._index_of(
                    [(x + y) % p for x, y in zip(da, db)]
                )
        self._add = add
        self._neg = [self._index_of([(-c) % p for c in digits[a]]) for a in range(size)]
        inv = [0] * size
        for a in range(1, size):
            inv[a] = exp[(order - log[a]) % order]
        self._inv = inv
        frob = [0] * size
        for a in range(1, size):
            frob[a] = exp[(log[a] * p) % order]
        self._frob = frob
        self._elems = [FieldElement(self, i) for i in range(size)]

    # -- index <-> coordinates ----------------------------------------------

    def coeffs_of(self, index):
        p, m = self.p, self.m
        out = []
        for _ in range(m):
            out.append(index % p)
            index //= p
        return tuple(out)

    def _index_of(self, coeffs):
        idx = 0
        for c in reversed(list(coeffs)):
            idx = idx * self.p + (c % self.p)
        return idx

    # -- index arithmetic ----------------------------------------------------

    def add_i(self, a, b):
        if self._add is not None:
            return self._add[a * self.size + b]
        ca, cb = self.coeffs_of(a), self.coeffs_of(b)
        return self._index_of([(x + y) % self.p for x, y in zip(ca, cb)])

    def neg_i(self, a):
        if self._neg is not None:
            return self._neg[a]
        return self._index_of([(-c) % self.p for c in self.coeffs_of(a)])

    def sub_i(self, a, b):
        return self.add_i(a, self.neg_i(b))

    def mul_i(self, a, b):
        if self._mul is not None:
            return self._mul[a * self.size + b]
        return self._raw_mul(a, b)

    def inv_i(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        if self._inv is not None:
            return self._inv[a]
        return self.pow_i(a, self.size - 2)

    def pow_i(self, a, e):
        if e < 0:
            a = self.inv_i(a)
            e = -e
        result = 1 if self.m == 1 else self._index_of([1] + [0] * (self.m - 1))
        base = a
        while e:
            if e & 1:
                result = self.mul_i(result, base)
            e >>= 1
            base = self.mul_i(base, base)
        return result

    def frob_i(self, a):
        if self._frob is not None:
            return self._frob[a]
        return self.pow_i(a, self.p)

    # -- public element constructors ----------------------------------------

    def element(self, index):
        index %= self.size
        if self._elems is not None:
            return self._elems[index]
        return FieldElement(self, index)

    def from_int(self, n):
        return self.element(n % self.p)

    def from_coeffs(self, coeffs):
        if len(coeffs) > self.m:
            raise PreconditionError("too many coordinates for this field")
        coeffs = list(coeffs) + [0] * (self.m - len(coeffs))
        return self.element(self._index_of(coeffs))

    def zero(self):
        return self.element(0)

    def one(self):
        return self.from_int(1)

    def generator(self):
        if self.m == 1:
            raise PreconditionError("prime field has no extension generator")
        return self.from_coeffs([0, 1])

    def elements(self):
        return (self.element(i) for i in range(self.size))

    # -- identity ------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return "GF(%d)" % self.p
        return "GF(%d^%d; %s)" % (self.p, self.m, _modulus_str(self))


def _modulus_str(spec):
    parts = []
    for e in range(spec.m, -1, -1):
        c = spec.modulus[e]
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
        else:
            head = "" if c == 1 else "%d*" % c
            parts.append("%s%s^%d" % (head, spec.gen_name, e) if e > 1 else "%s%s" % (head, spec.gen_name))
    return "+".join(parts) if parts else "0"


class FieldElement:
    """Immutable element of a FieldSpec; arithmetic via operators."""

    __slots__ = ("spec", "i")

    def __init__(self, spec, i):
        self.spec = spec
        self.i = i

    # -- helpers -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(
                    "elements of %r and %r cannot be combined" % (self.spec, other.spec)
                )
            return other
        if isinstance(other, int):
            return self.spec.from_int(other)
        return None

    @property
    def coeffs(self):
        return self.spec.coeffs_of(self.i)

    def is_zero(self):
        return self.i == 0

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.spec.element(self.spec.add_i(self.i, o.i))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.spec.element(self.spec.sub_i(self.i, o.i))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.spec.element(self.spec.sub_i(o.i, self.i))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.spec.element(self.spec.mul_i(self.i, o.i))

    __rmul__ = __mul__

    def __neg__(self):
        return self.spec.element(self.spec.neg_i(self.i))

    def __pow__(self, e):
        return self.spec.element(self.spec.pow_i(self.i, e))

    def inverse(self):
        return self.spec.element(self.spec.inv_i(self.i))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def frobenius(self):
        """The p-th power of this element."""
        return self.spec.element(self.spec.frob_i(self.i))

    # -- identity -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.i == other.i
        if isinstance(other, int):
            return self == self.spec.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.p, self.spec.m, self.i))

    def __bool__(self):
        return self.i != 0

    def __repr__(self):
        return element_str(self)


def element_str(a):
    """Canonical text form: decimal residue for prime fields, a polynomial
    in the generator name otherwise."""
    spec = a.spec
    if spec.m == 1:
        return str(a.i)
    coeffs = a.coeffs
    parts = []
    for e in range(spec.m - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(spec.gen_name if c == 1 else "%d*%s" % (c, spec.gen_name))
        else:
            head = "" if c == 1 else "%d*" % c
            parts.append("%s%s^%d" % (head, spec.gen_name, e))
    return "+".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# roots


def _canonical(candidates):
    return min(candidates, key=lambda x: x.coeffs)


def ff_sqrt(a):
    """Square root of a, or None when a is a non-square.

    Characteristic 2 is rejected (every element is a square there and the
    Artin-Schreier machinery is the right tool instead).  Of the two roots
    the one with lexicographically smaller coordinates is returned.
    """
    spec = a.spec
    if spec.p == 2:
        raise UnsupportedCharacteristicError("square roots here require odd characteristic")
    if a.is_zero():
        return a
    q = spec.size
    if a ** ((q - 1) // 2) != spec.one():
        return None
    if q % 4 == 3:
        r = a ** ((q + 1) // 4)
        return _canonical([r, -r])
    # Tonelli-Shanks in the cyclic unit group, deterministic non-residue scan
    s, t = 0, q - 1
    while t % 2 == 0:
        t //= 2
        s += 1
    minus_one = -spec.one()
    z = None
    for idx in range(1, q):
        c = spec.element(idx)
        if c ** ((q - 1) // 2) == minus_one:
            z = c
            break
    m = s
    c = z ** t
    r = a ** ((t + 1) // 2)
    u = a ** t
    while u != spec.one():
        k = 0
        w = u
        while w != spec.one():
            w = w * w
            k += 1
        b = c ** (2 ** (m - k - 1))
        m = k
        c = b * b
        u = u * c
        r = r * b
    return _canonical([r, -r])


def ff_kth_root(a, k):
    """Some k-th root of a, or None when none exists in the field.

    Requires gcd(k, p) == 1; the Frobenius makes p-th roots a different
    (always solvable) problem.  When gcd(k, size - 1) == 1 the root is the
    single power a^(k^-1 mod size-1); otherwise the small unit group is
    scanned and the canonical root returned.
    """
    spec = a.spec
    if k < 1:
        raise PreconditionError("root exponent must be positive")
    import math

    if math.gcd(k, spec.p) != 1:
        raise UnsupportedCharacteristicError(
            "k must be coprime to the characteristic; got k=%d, p=%d" % (k, spec.p)
        )
    if a.is_zero():
        return a
    order = spec.size - 1
    g = math.gcd(k, order)
    if g == 1:
        return a ** pow(k, -1, order)
    if a ** (order // g) != spec.one():
        return None
    roots = [x for x in spec.elements() if x ** k == a]
    return _canonical(roots) if roots else None


def element_degree(a):
    """Degree of a over the prime field: the size of its Frobenius orbit."""
    b = a.frobenius()
    d = 1
    while b != a:
        b = b.frobenius()
        d += 1
    return d


def artin_schreier_solve(alpha):
    """A solution b of b^2 + b = alpha over GF(2^m), or None when there is
    none in this field.

    The map b -> b^2 + b is linear over GF(2), so this is an m x m linear
    solve; the kernel is {0, 1}, and of the two solutions the one with
    lexicographically smaller coordinates is returned.
    """
    spec = alpha.spec
    if spec.p != 2:
        raise UnsupportedCharacteristicError("Artin-Schreier solve requires characteristic 2")
    m = spec.m
    cols = []
    for j in range(m):
        b = spec.from_coeffs([0] * j + [1])
        cols.append((b * b + b).coeffs)
    # solve M x = alpha over GF(2) by Gaussian elimination on the augmented rows
    rows = []
    target = alpha.coeffs
    for i in range(m):
        rows.append([cols[j][i] for j in range(m)] + [target[i]])
    pivots = []
    r = 0
    for c in range(m):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        for i in range(m):
            if i != r and rows[i][c]:
                rows[i] = [(x + y) % 2 for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if rows[i][m]:
            return None
    sol = [0] * m
    for i, c in enumerate(pivots):
        sol[c] = rows[i][m]
    beta = spec.from_coeffs(sol)
    return _canonical([beta, beta + spec.one()])


def extend_field(spec, k, seed=0):
    """Build GF(p^(m*k)) containing spec, returning (new_spec, embed).

    embed maps old elements into the new field through a root of the old
    modulus found by a deterministic scan.
    """
    if k < 1:
        raise PreconditionError("extension degree must be positive")
    p, m = spec.p, spec.m
    big = FieldSpec(p, m * k, find_irreducible(p, m * k, seed), gen_name=spec.gen_name, seed=seed)
    if m == 1:

        def embed(a):
            if a.spec != spec:
                raise FieldMismatchError("element does not belong to the base field")
            return big.from_int(a.i)

        return big, embed
    root = None
    for cand in big.elements():
        acc = big.zero()
        for c in reversed(spec.modulus):
            acc = acc * cand + big.from_int(c)
        if acc.is_zero():
            root = cand
            break
    if root is None:  # pragma: no cover
        raise PreconditionError("modulus has no root in the extension")
    powers = [big.one()]
    for _ in range(m - 1):
        powers.append(powers[-1] * root)

    def embed(a):
        if a.spec != spec:
            raise FieldMismatchError("element does not belong to the base field")
        acc = big.zero()
        for c, pw in zip(a.coeffs, powers):
            if c:
                acc = acc + big.from_int(c) * pw
        return acc

    return big, embed
