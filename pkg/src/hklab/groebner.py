"""Reduced Groebner bases over finite fields, plus staircase combinatorics.

The engine packs each exponent vector into a single integer so that
comparing two packed keys with < is exactly the ring's monomial order,
multiplying monomials is integer addition (plus a constant offset for
degrevlex), and divisibility is one masked subtraction against guard
bits.  Polynomial tails are dicts from packed key to a coefficient index
into flat field tables, which keeps the Buchberger inner loop on machine
integers only.

Two further structures carry the load on m-primary ideals with large
bracket powers, where bases reach tens of thousands of elements:

- a dominance grid per ring arity answers "which basis lead divides this
  monomial" in near-constant time instead of a linear scan;
- new critical pairs are pruned at creation in Gebauer-Moeller style
  (keep one pair per minimal lcm, drop coprime-lead pairs), vectorized
  over a packed array of leads when the key width permits.

Colength of the leading-term staircase is computed by divide and conquer
on a pivot variable (ideal-plus-power against ideal-quotient), memoized,
with closed forms for boxes, two-variable staircases and small mixed
sets.  Counts routinely reach 10^8 and are never enumerated.
"""

from __future__ import annotations

from heapq import heapify, heappop, heappush
from itertools import combinations

import numpy as np

from .errors import (
    KernelCapacityError,
    PreconditionError,
    ResourceError,
    RingMismatchError,
)
from .poly import Polynomial, PolyRing

_FIELD_TABLE_LIMIT = 2048
_MAT_INLINE = 64
_INF = 1 << 62
_table_cache = {}


def _field_tables(spec):
    """Flat add/mul/neg/inv tables indexed by element index."""
    if spec._add is not None:
        return spec._add, spec._mul, spec._neg, spec._inv
    cached = _table_cache.get(spec)
    if cached is not None:
        return cached
    size = spec.size
    if size > _FIELD_TABLE_LIMIT:
        raise ResourceError("field of size %d is too large for the basis engine" % size)
    add = [0] * (size * size)
    mul = [0] * (size * size)
    for a in range(size):
        row = a * size
        for b in range(size):
            add[row + b] = spec.add_i(a, b)
            mul[row + b] = spec.mul_i(a, b)
    neg = [spec.neg_i(a) for a in range(size)]
    inv = [0] + [spec.inv_i(a) for a in range(1, size)]
    tables = (add, mul, neg, inv)
    _table_cache[spec] = tables
    return tables


class _Kernel:
    """Packed-monomial arithmetic for one ring at one degree capacity."""

    __slots__ = ("ring", "n", "cap", "W", "M", "drl", "CMASK", "G", "KQ", "UNIT",
                 "_slot", "_degshift")

    def __init__(self, ring, cap):
        n = ring.n
        self.ring = ring
        self.n = n
        self.cap = cap
        W = cap.bit_length() + 1
        self.W = W
        self.M = (1 << W) - 1
        self.drl = ring.order.kind == "degrevlex"
        pri = ring.order.priority
        slot = [0] * n
        if self.drl:
            # slot s holds cap - exponent of pri[s]; total degree on top.
            # Integer < on keys is then exactly degrevlex.
            for s in range(n):
                slot[pri[s]] = s
            self._degshift = n * W
            kq = 0
            for s in range(n):
                kq |= cap << (s * W)
            self.KQ = kq
        else:
            # slot s holds the exponent of pri[n-1-s]; plain lex compare.
            for s in range(n):
                slot[pri[n - 1 - s]] = s
            self._degshift = 0
            self.KQ = 0
        self._slot = slot
        vmask = (1 << (W - 1)) - 1
        cm = 0
        g = 0
        for s in range(n):
            cm |= vmask << (s * W)
            g |= 1 << (s * W + W - 1)
        self.CMASK = cm
        self.G = g
        self.UNIT = self.KQ

    def encode(self, mono):
        cap = self.cap
        W = self.W
        slot = self._slot
        ky = 0
        if self.drl:
            deg = 0
            for v, e in enumerate(mono):
                deg += e
                ky |= (cap - e) << (slot[v] * W)
            if deg > cap:
                raise KernelCapacityError("monomial degree %d exceeds capacity" % deg)
            return ky | (deg << self._degshift)
        for v, e in enumerate(mono):
            if e > cap:
                raise KernelCapacityError("exponent %d exceeds capacity" % e)
            ky |= e << (slot[v] * W)
        return ky

    def decode(self, ky):
        W = self.W
        M = self.M
        cap = self.cap
        slot = self._slot
        if self.drl:
            return tuple(cap - ((ky >> (slot[v] * W)) & M) for v in range(self.n))
        return tuple((ky >> (slot[v] * W)) & M for v in range(self.n))

    def degree(self, ky):
        if self.drl:
            return ky >> self._degshift
        return sum(self.decode(ky))

    def lcm(self, a, b):
        W = self.W
        M = self.M
        ky = 0
        if self.drl:
            # max of exponents = min of complements
            deg = 0
            cap = self.cap
            for s in range(self.n):
                fa = (a >> (s * W)) & M
                fb = (b >> (s * W)) & M
                f = fa if fa < fb else fb
                deg += cap - f
                ky |= f << (s * W)
            return ky | (deg << self._degshift)
        for s in range(self.n):
            fa = (a >> (s * W)) & M
            fb = (b >> (s * W)) & M
            ky |= (fa if fa > fb else fb) << (s * W)
        return ky

    def vector_ok(self):
        """True when packed keys and their lcm degrees fit numpy int64."""
        return self.drl and self.n * self.W + (self.n * self.cap).bit_length() <= 62


class _LeadIndex:
    """Near-constant-time divisor lookup over the current lead set.

    Dominance queries run against dense minimum grids over the trailing
    variables: a single grid for up to three variables, one grid per
    first-exponent class for four.  Five or more variables fall back to
    a linear scan, which only occurs at the small sizes those rings are
    used at.  Grids store, per cell, the least last-variable exponent of
    any lead dominated by the cell, plus the index of one such lead.
    """

    __slots__ = ("n", "entries", "grid", "gidx", "classes", "ckeys", "best")

    def __init__(self, n):
        self.n = n
        self.entries = []
        self.grid = None
        self.gidx = None
        self.classes = {}
        self.ckeys = []
        self.best = None

    # grids are (rows, cols) int64 arrays; _grow keeps them just large enough

    @staticmethod
    def _grow2(grid, gidx, rows, cols):
        g = np.full((rows, cols), _INF, dtype=np.int64)
        x = np.full((rows, cols), -1, dtype=np.int64)
        if grid is not None:
            r, c = grid.shape
            g[:r, :c] = grid
            x[:r, :c] = gidx
            if c < cols:
                g[:r, c:] = grid[:, c - 1 : c]
                x[:r, c:] = gidx[:, c - 1 : c]
            if r < rows:
                g[r:, :] = g[r - 1 : r, :]
                x[r:, :] = x[r - 1 : r, :]
        return g, x

    @staticmethod
    def _grow1(grid, gidx, size):
        g = np.full(size, _INF, dtype=np.int64)
        x = np.full(size, -1, dtype=np.int64)
        if grid is not None:
            s = grid.size
            g[:s] = grid
            x[:s] = gidx
            g[s:] = grid[s - 1]
            x[s:] = gidx[s - 1]
        return g, x

    def _add2(self, holder, a, b, v, idx):
        grid, gidx = holder
        if grid is None or a >= grid.shape[0] or b >= grid.shape[1]:
            rows = max(a + 9, grid.shape[0] if grid is not None else 0)
            cols = max(b + 9, grid.shape[1] if grid is not None else 0)
            grid, gidx = self._grow2(grid, gidx, rows, cols)
            holder[0] = grid
            holder[1] = gidx
        sub = grid[a:, b:]
        mask = sub > v
        gidx[a:, b:][mask] = idx
        sub[mask] = v

    def add(self, exps, idx):
        n = self.n
        if n >= 5:
            self.entries.append((exps, idx))
            return
        if n == 1:
            if self.best is None or exps[0] < self.best[0]:
                self.best = (exps[0], idx)
            return
        if n == 2:
            a, v = exps
            if self.grid is None or a >= self.grid.size:
                self.grid, self.gidx = self._grow1(self.grid, self.gidx, a + 9)
            sub = self.grid[a:]
            mask = sub > v
            self.gidx[a:][mask] = idx
            sub[mask] = v
            return
        if n == 3:
            holder = [self.grid, self.gidx]
            self._add2(holder, exps[0], exps[1], exps[2], idx)
            self.grid, self.gidx = holder
            return
        holder = self.classes.get(exps[0])
        if holder is None:
            holder = [None, None]
            self.classes[exps[0]] = holder
            self.ckeys = sorted(self.classes)
        self._add2(holder, exps[1], exps[2], exps[3], idx)

    def find(self, exps):
        n = self.n
        if n >= 5:
            for le, idx in self.entries:
                ok = True
                for a, b in zip(le, exps):
                    if a > b:
                        ok = False
                        break
                if ok:
                    return idx
            return -1
        if n == 1:
            b = self.best
            if b is not None and b[0] <= exps[0]:
                return b[1]
            return -1
        if n == 2:
            g = self.grid
            if g is None:
                return -1
            a = exps[0]
            s = g.size
            if a >= s:
                a = s - 1
            if g[a] <= exps[1]:
                return int(self.gidx[a])
            return -1
        if n == 3:
            g = self.grid
            if g is None:
                return -1
            a, b, c = exps
            r, co = g.shape
            if a >= r:
                a = r - 1
            if b >= co:
                b = co - 1
            if g[a, b] <= c:
                return int(self.gidx[a, b])
            return -1
        e0, a, b, c = exps
        for key in self.ckeys:
            if key > e0:
                break
            g, gx = self.classes[key]
            if g is None:
                continue
            r, co = g.shape
            aa = a if a < r else r - 1
            bb = b if b < co else co - 1
            if g[aa, bb] <= c:
                return int(gx[aa, bb])
        return -1


class _Engine:
    """A growing reducer set with indexed divisor lookup and full normal form.

    Tails longer than a few dozen terms are stored packed (numpy keys plus
    coefficient bytes) and materialized to python lists only when first
    used as a reducer, so large bases stay compact.
    """

    __slots__ = ("k", "ADD", "MUL", "NEG", "INV", "SZ",
                 "leads", "nkt", "ncf", "mats", "index")

    def __init__(self, kernel, field):
        self.k = kernel
        self.ADD, self.MUL, self.NEG, self.INV = _field_tables(field)
        self.SZ = field.size
        self.leads = []
        self.nkt = []
        self.ncf = []
        self.mats = []
        self.index = _LeadIndex(kernel.n)

    def add(self, lead_ky, ntail):
        i = len(self.leads)
        self.leads.append(lead_ky)
        if len(ntail) < _MAT_INLINE:
            self.mats.append(ntail)
            self.nkt.append(None)
            self.ncf.append(None)
        else:
            self.mats.append(None)
            self.nkt.append(np.array([t for t, _ in ntail], dtype=np.int64))
            if self.SZ <= 256:
                self.ncf.append(bytes(c for _, c in ntail))
            else:
                self.ncf.append([c for _, c in ntail])
        self.index.add(self.k.decode(lead_ky), i)

    def mat(self, i):
        m = self.mats[i]
        if m is None:
            m = list(zip(self.nkt[i].tolist(), self.ncf[i]))
            self.mats[i] = m
        return m

    def find(self, ky):
        return self.index.find(self.k.decode(ky))

    def tail_len(self, i):
        m = self.mats[i]
        return len(m) if m is not None else len(self.ncf[i])

    def normal_form(self, fd):
        """Full normal form of a packed term dict; consumes fd."""
        if not fd:
            return {}
        heap = [-ky for ky in fd]
        heapify(heap)
        out = {}
        find = self.find
        leads = self.leads
        mats = self.mats
        ADD = self.ADD
        MUL = self.MUL
        SZ = self.SZ
        lex_guard = 0 if self.k.drl else self.k.G
        get = fd.get
        pop = fd.pop
        while heap:
            ky = -heappop(heap)
            c = pop(ky, 0)
            if not c:
                continue
            i = find(ky)
            if i < 0:
                out[ky] = c
                continue
            sh = ky - leads[i]
            crow = c * SZ
            m = mats[i]
            if m is None:
                m = self.mat(i)
            for t, tc in m:
                nky = t + sh
                if nky & lex_guard:
                    raise KernelCapacityError("monomial overflow during reduction")
                nc = MUL[crow + tc]
                cur = get(nky)
                if cur is None:
                    fd[nky] = nc
                    heappush(heap, -nky)
                else:
                    s = ADD[cur * SZ + nc]
                    if s:
                        fd[nky] = s
                    else:
                        del fd[nky]
        return out


def _monic_ntail(h, eng):
    """Split a nonzero packed dict into (lead key, negated monic tail)."""
    lead = max(h)
    lc = h[lead]
    NEG = eng.NEG
    SZ = eng.SZ
    if lc == 1:
        ntail = [(t, NEG[c]) for t, c in h.items() if t != lead]
    else:
        MUL = eng.MUL
        inv = eng.INV[lc]
        ntail = [(t, NEG[MUL[c * SZ + inv]]) for t, c in h.items() if t != lead]
    ntail.sort(reverse=True)
    return lead, ntail


class _PairQueue:
    """Critical pairs pruned at creation: one pair per minimal lcm, no
    coprime-lead pairs.  Survivors are processed by ascending lcm."""

    __slots__ = ("kern", "heap", "use_np", "leads_np", "count")

    def __init__(self, kern):
        self.kern = kern
        self.heap = []
        self.use_np = kern.vector_ok()
        self.leads_np = np.zeros(256, dtype=np.int64) if self.use_np else None
        self.count = 0

    def _record(self, lt, t):
        if not self.use_np:
            return
        if t >= self.leads_np.size:
            bigger = np.zeros(self.leads_np.size * 2, dtype=np.int64)
            bigger[:t] = self.leads_np[:t]
            self.leads_np = bigger
        self.leads_np[t] = lt

    def push_pairs(self, leads, lt):
        """Create pruned pairs of the new element (index len(leads)) against
        all current leads, then record the new lead."""
        kern = self.kern
        t = self.count
        self.count = t + 1
        m = len(leads)
        if m != t:
            raise PreconditionError("pair queue out of step with the basis")
        if m == 0:
            self._record(lt, t)
            return
        G = kern.G
        CM = kern.CMASK
        KQ = kern.KQ
        survivors = []
        if self.use_np and m >= 48:
            L = self.leads_np[:m]
            W = kern.W
            M = kern.M
            cap = kern.cap
            n = kern.n
            acc = np.zeros(m, dtype=np.int64)
            degs = np.full(m, n * cap, dtype=np.int64)
            for s in range(n):
                fa = (L >> (s * W)) & M
                fb = (lt >> (s * W)) & M
                mn = np.minimum(fa, fb)
                acc |= mn << (s * W)
                degs -= mn
            acc |= degs << (n * W)
            cands = acc
            while True:
                pos = int(np.argmin(cands))
                val = int(cands[pos])
                if val >= _INF:
                    break
                survivors.append((val, pos))
                prep = (val & CM) | G
                cands[((prep - (cands & CM)) & G) == G] = _INF
        else:
            cands = [kern.lcm(li, lt) for li in leads]
            remaining = m
            while remaining:
                val = None
                pos = -1
                for i in range(m):
                    v = cands[i]
                    if v is not None and (val is None or v < val):
                        val = v
                        pos = i
                if pos < 0:
                    break
                survivors.append((val, pos))
                prep = (val & CM) | G
                remaining = 0
                for i in range(m):
                    v = cands[i]
                    if v is None:
                        continue
                    if ((prep - (v & CM)) & G) == G:
                        cands[i] = None
                    else:
                        remaining += 1
        for val, i in survivors:
            if val == leads[i] + lt - KQ:
                continue
            heappush(self.heap, (val, i, t))
        self._record(lt, t)

    def pop(self):
        return heappop(self.heap)

    def __bool__(self):
        return bool(self.heap)


def _accumulate(fd, ky, c, ADD, SZ):
    cur = fd.get(ky)
    if cur is None:
        fd[ky] = c
    else:
        s = ADD[cur * SZ + c]
        if s:
            fd[ky] = s
        else:
            del fd[ky]


def _gb_core(ring, polys, cap, materialize):
    """One Buchberger run; returns a GroebnerBasis or a bare Staircase."""
    kern = _Kernel(ring, cap)
    eng = _Engine(kern, ring.field)
    ADD = eng.ADD
    NEG = eng.NEG
    SZ = eng.SZ
    queue = _PairQueue(kern)
    unit = [False]

    # For homogeneous input under a graded order, pairs are popped by
    # ascending degree, and a pair whose lcm degree exceeds every possible
    # minimal-generator degree of the final lead ideal reduces to zero.
    # Any intermediate staircase bounds that by max standard degree + 1,
    # and the pure-power leads alone give a cheaper (weaker) bound.
    homog = kern.drl and all(
        len({sum(m) for m in f.terms}) == 1 for f in polys
    )
    pure_min = [0] * kern.n
    pure_seen = 0
    cheap_bound = [None]
    sharp_bound = [None, -1]

    def insert(h):
        nonlocal pure_seen
        lead, ntail = _monic_ntail(h, eng)
        if lead == kern.UNIT:
            unit[0] = True
            return
        queue.push_pairs(eng.leads, lead)
        eng.add(lead, ntail)
        if homog:
            exps = kern.decode(lead)
            nz = [v for v in range(kern.n) if exps[v]]
            if len(nz) == 1:
                v = nz[0]
                if not pure_min[v]:
                    pure_seen += 1
                    pure_min[v] = exps[v]
                elif exps[v] < pure_min[v]:
                    pure_min[v] = exps[v]
                if pure_seen == kern.n:
                    cheap_bound[0] = sum(pure_min) - kern.n + 1

    for f in polys:
        fd = {}
        for mono, c in f.terms.items():
            fd[kern.encode(mono)] = c.i
        h = eng.normal_form(fd)
        if h:
            insert(h)
            if unit[0]:
                return _unit_result(ring, materialize)

    def degree_bound():
        if sharp_bound[1] != len(eng.leads):
            st = Staircase(kern.n, [kern.decode(l) for l in eng.leads])
            msd = st.max_standard_degree()
            sharp_bound[0] = None if msd is None else msd + 1
            sharp_bound[1] = len(eng.leads)
        return sharp_bound[0]

    lex_guard = 0 if kern.drl else kern.G
    while queue:
        lky, i, j = queue.pop()
        if kern.drl:
            d = lky >> kern._degshift
            if homog:
                if cheap_bound[0] is not None and d > cheap_bound[0]:
                    continue
                sb = sharp_bound[0]
                if sb is not None and d > sb:
                    continue
                if d > cap:
                    sb = degree_bound()
                    if sb is not None and d > sb:
                        continue
                    raise KernelCapacityError("pair degree exceeds capacity")
            elif d > cap:
                raise KernelCapacityError("pair degree exceeds capacity")
        li = eng.leads[i]
        lj = eng.leads[j]
        fd = {}
        shi = lky - li
        shj = lky - lj
        for t, tc in eng.mat(i):
            nky = t + shi
            if nky & lex_guard:
                raise KernelCapacityError("monomial overflow in S-polynomial")
            _accumulate(fd, nky, NEG[tc], ADD, SZ)
        for t, tc in eng.mat(j):
            nky = t + shj
            if nky & lex_guard:
                raise KernelCapacityError("monomial overflow in S-polynomial")
            _accumulate(fd, nky, tc, ADD, SZ)
        h = eng.normal_form(fd)
        if h:
            insert(h)
            if unit[0]:
                return _unit_result(ring, materialize)

    # minimal generators: walk leads in ascending order, keeping those not
    # divisible by an earlier-kept lead (divisors always compare smaller)
    order = sorted(range(len(eng.leads)), key=lambda i: eng.leads[i])
    minidx = _LeadIndex(kern.n)
    kept = []
    for i in order:
        exps = kern.decode(eng.leads[i])
        if minidx.find(exps) < 0:
            minidx.add(exps, i)
            kept.append(i)

    if not materialize:
        return Staircase(
            kern.n, [kern.decode(eng.leads[i]) for i in kept], assume_minimal=True
        )

    # tail interreduction: one normal-form pass gives the reduced basis
    eng2 = _Engine(kern, ring.field)
    for i in kept:
        eng2.add(eng.leads[i], eng.mat(i))
    final = []
    for i in kept:
        fd = {t: NEG[tc] for t, tc in eng.mat(i)}
        final.append((eng.leads[i], eng2.normal_form(fd)))
    final.sort(key=lambda lt: lt[0], reverse=True)

    field = ring.field
    out = []
    for lead, tail in final:
        terms = {kern.decode(lead): field.element(1)}
        for t, c in tail.items():
            terms[kern.decode(t)] = field.element(c)
        out.append(Polynomial(ring, terms))
    return GroebnerBasis(ring, out)


def _unit_result(ring, materialize):
    if materialize:
        return GroebnerBasis(ring, [ring.one()])
    return Staircase(ring.n, [(0,) * ring.n], assume_minimal=True)


class Staircase:
    """Antichain of minimal monomial generators of a leading-term ideal."""

    __slots__ = ("n", "gens", "_count")

    def __init__(self, n, gens, assume_minimal=False):
        self.n = n
        if assume_minimal:
            self.gens = tuple(sorted(tuple(m) for m in gens))
        else:
            self.gens = _minimalize(tuple(m) for m in gens)
        self._count = False

    def is_cofinite(self):
        """True when every variable has a pure power in the staircase."""
        seen = [False] * self.n
        for g in self.gens:
            nz = [v for v in range(self.n) if g[v]]
            if len(nz) == 1:
                seen[nz[0]] = True
            elif not nz:
                return True
        return all(seen)

    def colength(self):
        """Number of standard monomials, or None when infinite."""
        if self._count is False:
            self._count = self._compute()
        return self._count

    def max_standard_degree(self):
        """Largest total degree of a standard monomial; None when infinite.

        Every minimal generator of any larger monomial ideal refining this
        staircase has degree at most this value plus one, which bounds how
        far a graded basis computation must look.
        """
        if not self.gens:
            return None
        if self.gens[0] == (0,) * self.n:
            return -1
        if not self.is_cofinite():
            return None
        return _max_standard(self.gens, self.n)

    def _compute(self):
        if not self.gens:
            return None
        if self.gens[0] == (0,) * self.n:
            return 0
        if not self.is_cofinite():
            return None
        return _count_standard(self.gens, self.n)

    def __repr__(self):
        return "Staircase(%d, %d gens)" % (self.n, len(self.gens))


class GroebnerBasis:
    """A reduced Groebner basis together with its ring and order."""

    __slots__ = ("ring", "basis", "_stair", "_nf_state")

    def __init__(self, ring, basis):
        self.ring = ring
        self.basis = basis
        self._stair = None
        self._nf_state = None

    @property
    def order(self):
        return self.ring.order

    @property
    def staircase(self):
        if self._stair is None:
            self._stair = Staircase(
                self.ring.n,
                [g.leading_monomial() for g in self.basis],
                assume_minimal=True,
            )
        return self._stair

    def contains(self, f):
        return normal_form(f, self).is_zero()

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __repr__(self):
        return "GroebnerBasis(%d elements over %r)" % (len(self.basis), self.ring)


def _prepare_gens(gens, order, ring):
    polys = list(gens)
    for f in polys:
        if ring is None:
            ring = f.ring
        elif f.ring != ring:
            raise RingMismatchError("generators from different rings")
    if ring is None:
        raise PreconditionError("empty generator list needs an explicit ring")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        polys = [Polynomial(ring, f.terms) for f in polys]
    return ring, [f for f in polys if not f.is_zero()]


def _run_engine(ring, polys, materialize):
    cap = 2 * max(f.total_degree() for f in polys) + 8
    for _ in range(10):
        try:
            return _gb_core(ring, polys, cap, materialize)
        except KernelCapacityError:
            cap *= 2
    raise ResourceError("basis computation exceeded the monomial capacity")


def buchberger(gens, order=None, ring=None):
    """Reduced Groebner basis of the ideal generated by gens.

    Deterministic; the zero ideal yields an empty basis.  An explicit ring
    is only needed when gens is empty.
    """
    ring, polys = _prepare_gens(gens, order, ring)
    if not polys:
        return GroebnerBasis(ring, [])
    return _run_engine(ring, polys, True)


def leading_staircase(gens, order=None, ring=None):
    """Staircase of the ideal's leading terms, skipping basis materialization.

    Same engine run as buchberger, but only the minimal leading monomials
    are kept; use for colength queries on large bracket-power ideals.
    """
    ring, polys = _prepare_gens(gens, order, ring)
    if not polys:
        return Staircase(ring.n, [], assume_minimal=True)
    return _run_engine(ring, polys, False)


def normal_form(f, G):
    """Remainder of f under multivariate division by the basis G."""
    if f.ring != G.ring:
        raise RingMismatchError("polynomial and basis from different rings")
    if f.is_zero() or not G.basis:
        return f
    need = max(f.total_degree(), max(g.total_degree() for g in G.basis))
    state = G._nf_state
    for _ in range(10):
        if state is None or state[0].cap < need:
            kern = _Kernel(G.ring, 4 * need + 16)
            eng = _Engine(kern, G.ring.field)
            for g in G.basis:
                fd = {kern.encode(m): c.i for m, c in g.terms.items()}
                lead, ntail = _monic_ntail(fd, eng)
                eng.add(lead, ntail)
            state = (kern, eng)
            G._nf_state = state
        kern, eng = state
        try:
            fd = {kern.encode(m): c.i for m, c in f.terms.items()}
            out = eng.normal_form(fd)
        except KernelCapacityError:
            need *= 4
            state = None
            continue
        field = G.ring.field
        return Polynomial(
            G.ring, {kern.decode(t): field.element(c) for t, c in out.items()}
        )
    raise ResourceError("normal form exceeded the monomial capacity")


def ideal_member(f, G):
    """True iff f lies in the ideal with Groebner basis G."""
    return normal_form(f, G).is_zero()


def colength(G):
    """Count of standard monomials of G's staircase; None when infinite.

    Accepts a GroebnerBasis or a Staircase.
    """
    st = G.staircase if isinstance(G, GroebnerBasis) else G
    return st.colength()


def krull_dimension(G):
    """Krull dimension of the quotient by G's ideal.

    Maximum size of a variable subset touching no staircase generator's
    support; n for the zero ideal, -1 for the unit ideal.  Accepts a
    GroebnerBasis; for a bare Staircase pass the ambient arity implicitly.
    """
    if isinstance(G, GroebnerBasis):
        n = G.ring.n
        if not G.basis:
            return n
        gens = G.staircase.gens
    else:
        n = G.n
        gens = G.gens
        if not gens:
            return n
    supports = {frozenset(v for v in range(n) if m[v]) for m in gens}
    if frozenset() in supports:
        return -1
    for size in range(n, -1, -1):
        for S in combinations(range(n), size):
            sset = frozenset(S)
            if all(not sup <= sset for sup in supports):
                return size
    return -1


def is_regular_sequence(base, seq):
    """Dimension-drop test: seq cuts dim by one per element modulo base.

    Equivalent to regularity over the Cohen-Macaulay quotients this
    library works with.
    """
    base = list(base)
    seq = list(seq)
    if not seq:
        return True
    ring = (base + seq)[0].ring
    if base:
        d0 = krull_dimension(buchberger(base, ring=ring))
    else:
        d0 = ring.n
    d1 = krull_dimension(buchberger(base + seq, ring=ring))
    return d1 == d0 - len(seq)


# ---------------------------------------------------------------------------
# antichain minimalization


class _PrefixMin:
    """Fenwick tree for prefix minima over a fixed index range."""

    __slots__ = ("t",)

    def __init__(self, size):
        self.t = [_INF] * (size + 1)

    def update(self, i, v):
        t = self.t
        i += 1
        while i < len(t):
            if t[i] > v:
                t[i] = v
            i += i & -i

    def query(self, i):
        t = self.t
        i += 1
        r = _INF
        while i > 0:
            if t[i] < r:
                r = t[i]
            i -= i & -i
        return r


class _PrefixMin2:
    """Two-level Fenwick tree for prefix minima over (i, j) pairs."""

    __slots__ = ("size1", "rows")

    def __init__(self, size0, size1):
        self.size1 = size1
        self.rows = [None] * (size0 + 1)

    def update(self, i, j, v):
        rows = self.rows
        i += 1
        while i < len(rows):
            row = rows[i]
            if row is None:
                row = _PrefixMin(self.size1)
                rows[i] = row
            row.update(j, v)
            i += i & -i

    def query(self, i, j):
        rows = self.rows
        i += 1
        r = _INF
        while i > 0:
            row = rows[i]
            if row is not None:
                v = row.query(j)
                if v < r:
                    r = v
            i -= i & -i
        return r


def _rank(values):
    """Map each value to its index in the sorted set of distinct values."""
    distinct = sorted(set(values))
    pos = {v: i for i, v in enumerate(distinct)}
    return [pos[v] for v in values], len(distinct)


def _antichain_sweep(cands, n):
    """Minimal elements of a deduplicated sorted candidate list.

    Candidates arrive sorted ascending by (degree, tuple), so any divisor
    precedes its multiples; a single sweep with a prefix-minimum structure
    over the leading coordinates then detects domination in O(log) time.
    Coordinates constant across all candidates are ignored.
    """
    varying = [v for v in range(n) if any(c[v] != cands[0][v] for c in cands)]
    m = len(varying)
    if m == 0:
        return [cands[0]]
    if m == 1:
        v = varying[0]
        best = min(cands, key=lambda c: c[v])
        return [best]
    proj = [tuple(c[v] for v in varying) for c in cands]
    order = sorted(range(len(cands)), key=lambda i: proj[i])
    kept = []
    if m == 2:
        low = _INF
        for i in order:
            p = proj[i]
            if p[1] >= low:
                continue
            low = p[1]
            kept.append(cands[i])
    elif m == 3:
        r1, k1 = _rank([p[1] for p in proj])
        fen = _PrefixMin(k1)
        for i in order:
            p = proj[i]
            if fen.query(r1[i]) <= p[2]:
                continue
            fen.update(r1[i], p[2])
            kept.append(cands[i])
    elif m == 4:
        r1, k1 = _rank([p[1] for p in proj])
        r2, k2 = _rank([p[2] for p in proj])
        fen = _PrefixMin2(k1, k2)
        for i in order:
            p = proj[i]
            if fen.query(r1[i], r2[i]) <= p[3]:
                continue
            fen.update(r1[i], r2[i], p[3])
            kept.append(cands[i])
    else:
        for i in order:
            p = proj[i]
            ok = True
            for k in kept:
                kp = tuple(k[v] for v in varying)
                if all(x <= y for x, y in zip(kp, p)):
                    ok = False
                    break
            if ok:
                kept.append(cands[i])
    return kept


def _minimalize(monos):
    """Sorted antichain: drop every monomial divisible by another."""
    cands = sorted(set(monos), key=lambda mo: (sum(mo), mo))
    if not cands:
        return ()
    n = len(cands[0])
    if len(cands) <= 24:
        kept = []
        for mo in cands:
            ok = True
            for k in kept:
                if all(x <= y for x, y in zip(k, mo)):
                    ok = False
                    break
            if ok:
                kept.append(mo)
        return tuple(sorted(kept))
    return tuple(sorted(_antichain_sweep(cands, n)))


# ---------------------------------------------------------------------------
# staircase counting


def _analyze(gens, n):
    """Split an antichain into pure powers per variable and mixed monomials."""
    pure = [0] * n
    mixed = []
    for g in gens:
        nz = [v for v in range(n) if g[v]]
        if len(nz) == 1:
            pure[nz[0]] = g[nz[0]]
        else:
            mixed.append(g)
    return pure, mixed


def _closed_form(gens, n):
    """Exact count for the easy shapes; None when a split is needed."""
    pure, mixed = _analyze(gens, n)
    if not mixed:
        total = 1
        for a in pure:
            total *= a
        return total
    eff = set()
    for g in mixed:
        for v in range(n):
            if g[v]:
                eff.add(v)
    if len(eff) == 2:
        u, v = sorted(eff)
        box = 1
        for w in range(n):
            if w != u and w != v:
                box *= pure[w]
        stairs = sorted((g[u], g[v]) for g in mixed)
        au = pure[u]
        total = stairs[0][0] * pure[v]
        for t, (su, sv) in enumerate(stairs):
            nxt = stairs[t + 1][0] if t + 1 < len(stairs) else au
            total += (nxt - su) * sv
        return box * total
    if len(mixed) <= 8:
        k = len(mixed)
        total = 0
        for mask in range(1 << k):
            lcm = [0] * n
            bits = 0
            mm = mask
            t = 0
            while mm:
                if mm & 1:
                    bits += 1
                    g = mixed[t]
                    for v in range(n):
                        if g[v] > lcm[v]:
                            lcm[v] = g[v]
                mm >>= 1
                t += 1
            term = 1
            for v in range(n):
                d = pure[v] - lcm[v]
                if d <= 0:
                    term = 0
                    break
                term *= d
            total += -term if bits & 1 else term
        return total
    return None


def _split(gens, n):
    """Pivot split: (gens + x_i^s, gens : x_i^s, s), both minimal antichains."""
    pure, mixed = _analyze(gens, n)
    counts = [0] * n
    for g in mixed:
        for v in range(n):
            if g[v]:
                counts[v] += 1
    i = counts.index(max(counts))
    exps = sorted(g[i] for g in mixed if g[i])
    s = exps[len(exps) // 2]
    piv = tuple(s if v == i else 0 for v in range(n))
    ga = tuple(sorted([g for g in gens if g[i] < s] + [piv]))
    gb = _minimalize(
        g[:i] + (max(g[i] - s, 0),) + g[i + 1 :] if g[i] else g for g in gens
    )
    return ga, gb, s


def _count_standard(gens, n):
    """Standard-monomial count of a cofinite minimal staircase."""
    memo = {}
    splits = {}
    stack = [gens]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        val = _closed_form(cur, n)
        if val is not None:
            memo[cur] = val
            stack.pop()
            continue
        pair = splits.get(cur)
        if pair is None:
            pair = _split(cur, n)
            splits[cur] = pair
        a, b, _ = pair
        va = memo.get(a)
        vb = memo.get(b)
        if va is not None and vb is not None:
            memo[cur] = va + vb
            stack.pop()
        else:
            if va is None:
                stack.append(a)
            if vb is None:
                stack.append(b)
    return memo[gens]


def _max_closed(gens, n):
    """Largest standard-monomial degree for the easy shapes; None otherwise."""
    pure, mixed = _analyze(gens, n)
    if not mixed:
        return sum(a - 1 for a in pure)
    eff = set()
    for g in mixed:
        for v in range(n):
            if g[v]:
                eff.add(v)
    if len(eff) == 2:
        u, v = sorted(eff)
        rest = sum(pure[w] - 1 for w in range(n) if w != u and w != v)
        stairs = sorted((g[u], g[v]) for g in mixed)
        au = pure[u]
        best = stairs[0][0] + pure[v] - 2
        for t, (su, sv) in enumerate(stairs):
            nxt = stairs[t + 1][0] if t + 1 < len(stairs) else au
            cand = nxt + sv - 2
            if cand > best:
                best = cand
        return rest + best
    return None


def _max_standard(gens, n):
    """Largest standard-monomial degree of a cofinite minimal staircase.

    Same pivot recursion as the count: monomials below the pivot power
    follow the augmented staircase, the rest are the pivot power times a
    standard monomial of the quotient staircase.
    """
    memo = {}
    splits = {}
    stack = [gens]
    zero = (0,) * n
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        if cur[0] == zero:
            memo[cur] = -1
            stack.pop()
            continue
        val = _max_closed(cur, n)
        if val is not None:
            memo[cur] = val
            stack.pop()
            continue
        trip = splits.get(cur)
        if trip is None:
            trip = _split(cur, n)
            splits[cur] = trip
        a, b, s = trip
        va = memo.get(a)
        vb = memo.get(b)
        if va is not None and vb is not None:
            best = va
            if vb >= 0 and s + vb > best:
                best = s + vb
            memo[cur] = best
            stack.pop()
        else:
            if va is None:
                stack.append(a)
            if vb is None:
                stack.append(b)
    return memo[gens]
