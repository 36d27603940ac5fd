"""Exact arithmetic helpers: the coefficient field Q(w) and sparse polynomials.

The coefficient field is Q adjoined a primitive cube root of unity w, with
w^2 = -1 - w.  Polynomials over it are stored as a pair of sympy sparse
polynomials over QQ (the "1" part and the "w" part); almost all data in
practice has a zero w-part, which keeps gcd and multiplication in the fast
rational path.  The algebraic-field ring is only consulted for gcds of
genuinely mixed polynomials.
"""

from __future__ import annotations

from functools import lru_cache

from sympy import I, Rational, sqrt
from sympy.polys.domains import QQ
from sympy.polys.rings import ring as _sympy_ring

OMEGA_EXPR = Rational(-1, 2) + sqrt(3) * I / 2


class QOmega:
    """Element a + b*w of Q(w), with a, b rational (sympy QQ ground type)."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=None):
        self.a = QQ.convert(a)
        self.b = QQ.zero if b is None else QQ.convert(b)

    # -- constructors ----------------------------------------------------
    @staticmethod
    def zero():
        return _ZERO

    @staticmethod
    def one():
        return _ONE

    @staticmethod
    def omega():
        return _OMEGA

    # -- predicates ------------------------------------------------------
    def is_zero(self):
        return not self.a and not self.b

    def is_one(self):
        return self.a == QQ.one and not self.b

    def is_rational(self):
        return not self.b

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        return QOmega(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return QOmega(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return QOmega(-self.a, -self.b)

    def __mul__(self, other):
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        # (a1 + b1 w)(a2 + b2 w), w^2 = -1 - w
        return QOmega(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 - b1 * b2)

    def conj(self):
        # w -> w^2 = -1 - w
        return QOmega(self.a - self.b, -self.b)

    def norm(self):
        return self.a * self.a - self.a * self.b + self.b * self.b

    def inv(self):
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(w)")
        c = self.conj()
        return QOmega(c.a / n, c.b / n)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out = _ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, QOmega) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*w" if self.b != QQ.one else "w"
        return f"{self.a}+{self.b}*w"

    def key(self):
        return (str(self.a), str(self.b))


_ZERO = QOmega(0)
_ONE = QOmega(1)
_OMEGA = QOmega(0, 1)

#: the six roots of unity of Q(w): (+/-1) * w^j
UNITS = tuple(
    QOmega(s, 0) * _OMEGA**j for s in (1, -1) for j in range(3)
)


def unit_from_str(text):
    """Parse unit strings used in tower descriptions: 1, -1, w, w^2, -w, -w^2."""
    t = text.strip().replace(" ", "")
    table = {
        "1": _ONE, "-1": -_ONE,
        "w": _OMEGA, "-w": -_OMEGA,
        "w^2": _OMEGA * _OMEGA, "-w^2": -(_OMEGA * _OMEGA),
        "w2": _OMEGA * _OMEGA, "-w2": -(_OMEGA * _OMEGA),
    }
    if t not in table:
        raise ValueError(f"not a recognized root-of-unity scale: {text!r}")
    return table[t]


@lru_cache(maxsize=None)
def rational_ring(names):
    """The shared sparse QQ-ring on the given variable names."""
    R = _sympy_ring(" ".join(names), QQ)[0]
    return R


@lru_cache(maxsize=None)
def algebraic_ring(names):
    """Companion ring over QQ(w), used only for mixed-coefficient gcds."""
    dom = QQ.algebraic_field(OMEGA_EXPR)
    R = _sympy_ring(" ".join(names), dom)[0]
    return R


class CPoly:
    """Polynomial over Q(w): pair (pa, pb) of QQ-ring polynomials, pa + w*pb."""

    __slots__ = ("ring", "pa", "pb")

    def __init__(self, ring_, pa, pb=None):
        self.ring = ring_
        self.pa = pa
        self.pb = pb if (pb is not None and pb) else None

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, ring_):
        return cls(ring_, ring_.zero)

    @classmethod
    def one(cls, ring_):
        return cls(ring_, ring_.one)

    @classmethod
    def const(cls, ring_, c: QOmega):
        pa = ring_.ground_new(c.a) if c.a else ring_.zero
        pb = ring_.ground_new(c.b) if c.b else None
        return cls(ring_, pa, pb)

    @classmethod
    def variable(cls, ring_, index):
        return cls(ring_, ring_.gens[index])

    @classmethod
    def from_terms(cls, ring_, terms):
        da, db = {}, {}
        for mon, c in terms.items():
            if c.a:
                da[mon] = da.get(mon, QQ.zero) + c.a
            if c.b:
                db[mon] = db.get(mon, QQ.zero) + c.b
        pa = ring_.from_dict({m: v for m, v in da.items() if v})
        db = {m: v for m, v in db.items() if v}
        pb = ring_.from_dict(db) if db else None
        return cls(ring_, pa, pb)

    def terms(self):
        out = {}
        for mon, c in self.pa.terms():
            out[mon] = QOmega(c, 0)
        if self.pb is not None:
            for mon, c in self.pb.terms():
                prev = out.get(mon, _ZERO)
                out[mon] = QOmega(prev.a, prev.b + c)
        return out

    # -- predicates ------------------------------------------------------
    def is_zero(self):
        return (not self.pa) and self.pb is None

    def is_rational(self):
        return self.pb is None

    def is_ground(self):
        ok_a = (not self.pa) or self.pa.is_ground
        ok_b = self.pb is None or self.pb.is_ground
        return ok_a and ok_b

    def is_monomial(self):
        n = len(self.pa.terms()) if self.pa else 0
        n += len(self.pb.terms()) if self.pb is not None else 0
        if n != 1:
            return False
        return self.pb is None or not self.pa

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        pb = None
        if self.pb is not None or other.pb is not None:
            pb = (self.pb or self.ring.zero) + (other.pb or self.ring.zero)
        return CPoly(self.ring, self.pa + other.pa, pb)

    def __sub__(self, other):
        pb = None
        if self.pb is not None or other.pb is not None:
            pb = (self.pb or self.ring.zero) - (other.pb or self.ring.zero)
        return CPoly(self.ring, self.pa - other.pa, pb)

    def __neg__(self):
        return CPoly(self.ring, -self.pa, -self.pb if self.pb is not None else None)

    def __mul__(self, other):
        a1, b1, a2, b2 = self.pa, self.pb, other.pa, other.pb
        if b1 is None and b2 is None:
            return CPoly(self.ring, a1 * a2)
        z = self.ring.zero
        b1 = b1 if b1 is not None else z
        b2 = b2 if b2 is not None else z
        return CPoly(self.ring, a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 - b1 * b2)

    def mul_scalar(self, c: QOmega):
        return self * CPoly.const(self.ring, c)

    def __pow__(self, k):
        out = CPoly.one(self.ring)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return (
            isinstance(other, CPoly)
            and self.pa == other.pa
            and (self.pb or self.ring.zero) == (other.pb or self.ring.zero)
        )

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (
            tuple(sorted(self.pa.terms())) if self.pa else (),
            tuple(sorted(self.pb.terms())) if self.pb is not None else (),
        )

    # -- structure -------------------------------------------------------
    def degree_in(self, index):
        """Maximal exponent of variable `index` (0 for the zero polynomial)."""
        d = 0
        for mon in self.pa.monoms():
            d = max(d, mon[index])
        if self.pb is not None:
            for mon in self.pb.monoms():
                d = max(d, mon[index])
        return d

    def min_degrees(self):
        n = self.ring.ngens
        mins = None
        for p in (self.pa, self.pb):
            if p is None or not p:
                continue
            for mon in p.monoms():
                if mins is None:
                    mins = list(mon)
                else:
                    mins = [min(a, b) for a, b in zip(mins, mon)]
        return tuple(mins) if mins is not None else (0,) * n

    def shift_down(self, shifts):
        """Divide by the monomial with the given exponent vector (must divide)."""
        def move(p):
            if p is None:
                return None
            return self.ring.from_dict(
                {tuple(e - s for e, s in zip(mon, shifts)): c for mon, c in p.terms()}
            )
        return CPoly(self.ring, move(self.pa) or self.ring.zero, move(self.pb))

    def leading(self):
        """(monomial, QOmega coefficient) for the lex-leading monomial."""
        if self.is_zero():
            raise ValueError("leading term of zero")
        order = self.ring.order
        best = None
        for p in (self.pa, self.pb):
            if p is None or not p:
                continue
            m = p.LM
            if best is None or order(m) > order(best):
                best = m
        ca = self.pa.get(best, QQ.zero) if self.pa else QQ.zero
        cb = self.pb.get(best, QQ.zero) if self.pb is not None else QQ.zero
        return best, QOmega(ca, cb)

    def subs_zero(self, index):
        """Substitute 0 for the variable at `index`."""
        def cut(p):
            if p is None:
                return None
            d = {m: c for m, c in p.terms() if m[index] == 0}
            return self.ring.from_dict(d) if d else self.ring.zero
        pa = cut(self.pa)
        pb = cut(self.pb)
        return CPoly(self.ring, pa if pa is not None else self.ring.zero,
                     pb if (pb is not None and pb) else None)

    def to_algebraic(self):
        RW = algebraic_ring(tuple(self.ring.symbols[i].name for i in range(self.ring.ngens)))
        dom = RW.domain
        one_anp = dom.one
        mod = one_anp.mod
        from sympy.polys.polyclasses import ANP
        d = {}
        for mon, c in self.terms().items():
            d[mon] = ANP([c.b, c.a], mod, QQ)
        return RW.from_dict(d)

    @classmethod
    def from_algebraic(cls, ring_, poly):
        terms = {}
        for mon, c in poly.terms():
            lst = c.to_list()
            if len(lst) == 0:
                continue
            if len(lst) == 1:
                terms[mon] = QOmega(lst[0], 0)
            else:
                terms[mon] = QOmega(lst[1], lst[0])
        return cls.from_terms(ring_, terms)

    def __repr__(self):
        if self.pb is None:
            return str(self.pa)
        return f"({self.pa}) + w*({self.pb})"


def cancel_pair(num: CPoly, den: CPoly):
    """Reduce num/den to canonical form: coprime, monic denominator (lex LC 1)."""
    ring_ = num.ring
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return CPoly.zero(ring_), CPoly.one(ring_)

    # strip the common monomial content
    mn, md = num.min_degrees(), den.min_degrees()
    common = tuple(min(a, b) for a, b in zip(mn, md))
    if any(common):
        num = num.shift_down(common)
        den = den.shift_down(common)

    if not num.is_ground() and not den.is_ground():
        cn = _scalar_core(num)
        cd = _scalar_core(den)
        if cn is not None and cd is not None:
            g = cn[1].gcd(cd[1])
            if not g.is_ground:
                num = _with_scalar(ring_, cn[0], cn[1].quo(g))
                den = _with_scalar(ring_, cd[0], cd[1].quo(g))
        else:
            num, den = _algebraic_cancel(num, den)

    # normalize: denominator leading coefficient -> 1
    _, lc = den.leading()
    if not lc.is_one():
        inv = lc.inv()
        num = num.mul_scalar(inv)
        den = den.mul_scalar(inv)
    return num, den


def _scalar_core(p: CPoly):
    """Write p = c * q with c in Q(w) and q rational, when possible.

    Covers the common case of rational polynomials twisted by a root of unity,
    keeping gcds in the fast rational path.
    """
    if p.pb is None:
        return (QOmega.one(), p.pa)
    if not p.pa:
        return (QOmega.omega(), p.pb)
    ta = dict(p.pa.terms())
    tb = dict(p.pb.terms())
    if set(ta) != set(tb):
        return None
    mon0 = next(iter(ta))
    q = tb[mon0] / ta[mon0]
    for mon, ca in ta.items():
        if tb[mon] != q * ca:
            return None
    return (QOmega(1, q), p.pa)


def _with_scalar(ring_, c: QOmega, q):
    return CPoly(ring_, q.mul_ground(c.a) if c.a else ring_.zero,
                 q.mul_ground(c.b) if c.b else None)


def _algebraic_cancel(num: CPoly, den: CPoly):
    ring_ = num.ring
    an, ad = num.to_algebraic(), den.to_algebraic()
    g = an.gcd(ad)
    if g.is_ground:
        return num, den
    return (
        CPoly.from_algebraic(ring_, an.quo(g)),
        CPoly.from_algebraic(ring_, ad.quo(g)),
    )


# ---------------------------------------------------------------------------
# n-th power detection
# ---------------------------------------------------------------------------

def _rational_nth_root(q, n):
    """Exact n-th root of a QQ element, or None."""
    if not q:
        return QQ.zero
    num, den = QQ.numer(q), QQ.denom(q)
    neg = num < 0
    if neg and n % 2 == 0:
        return None
    rn = _int_nth_root(abs(int(num)), n)
    rd = _int_nth_root(int(den), n)
    if rn is None or rd is None:
        return None
    r = QQ(rn, rd)
    return -r if neg else r


def _int_nth_root(m, n):
    if m == 0:
        return 0
    lo, hi = 0, 1
    while hi**n < m:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**n < m:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**n == m else None


def qomega_nth_roots(c: QOmega, n):
    """One n-th root of c in Q(w), or None if none exists (n in 1..6)."""
    if n == 1:
        return c
    if c.is_zero():
        return _ZERO
    if n == 2:
        return _qomega_sqrt(c)
    if n == 3:
        return _qomega_cbrt(c)
    if n == 4:
        s = _qomega_sqrt(c)
        return _qomega_sqrt(s) if s is not None else None
    if n == 6:
        s = _qomega_sqrt(c)
        if s is None:
            return None
        r = _qomega_cbrt(s)
        if r is not None:
            return r
        return _qomega_cbrt(-s)
    raise ValueError(f"unsupported root order {n}")


def _qomega_sqrt(c: QOmega):
    a, b = c.a, c.b
    if not b:
        r = _rational_nth_root(a, 2)
        if r is not None:
            return QOmega(r, 0)
        # (x + yw)^2 with y = 2x: -3x^2 = a
        r = _rational_nth_root(a / QQ(-3), 2)
        if r is not None:
            return QOmega(r, 2 * r)
        return None
    # 3 y^4 + (4a - 2b) y^2 - b^2 = 0
    A, B, C = QQ(3), 4 * a - 2 * b, -b * b
    disc = B * B - 4 * A * C
    sd = _rational_nth_root(disc, 2)
    if sd is None:
        return None
    for sgn in (1, -1):
        t = (-B + sgn * sd) / (2 * A)  # candidate y^2
        if t < 0:
            continue
        y = _rational_nth_root(t, 2)
        if y is None or not y:
            continue
        x = (b + y * y) / (2 * y)
        cand = QOmega(x, y)
        if cand * cand == c:
            return cand
    return None


def _qomega_cbrt(c: QOmega):
    a, b = c.a, c.b
    if not b:
        # rational-target candidates: y=0 (x^3=a); x=y gives (x+xw)^3 = -x^3
        r = _rational_nth_root(a, 3)
        if r is not None:
            return QOmega(r, 0)
        r = _rational_nth_root(-a, 3)
        if r is not None:
            return QOmega(r, r)
        return None
    # b != 0: y = t x with b t^3 + (3a - 3b) t^2 - 3a t + b = 0
    from sympy import Poly, Symbol
    t = Symbol("t")
    poly = Poly([b, 3 * a - 3 * b, -3 * a, b], t, domain="QQ")
    for root, _ in poly.ground_roots().items():
        tq = QQ.convert(root)
        den = 3 * tq * (QQ.one - tq)
        if not den:
            continue
        x3 = b / den
        x = _rational_nth_root(x3, 3)
        if x is None:
            continue
        cand = QOmega(x, tq * x)
        if cand * cand * cand == c:
            return cand
    # x = 0 branch: (yw)^3 = y^3 -> b must be 0; handled above
    return None


def poly_nth_root(p: CPoly, n):
    """An n-th root of p in Q(w)[vars], or None.

    Uses squarefree multiplicities (valid over any characteristic-0 field) and
    an exact constant root in Q(w).
    """
    if p.is_zero():
        return CPoly.zero(p.ring)
    mins = p.min_degrees()
    if any(e % n for e in mins):
        return None
    core = p.shift_down(mins)
    if core.is_ground():
        root_cp = CPoly.one(p.ring)
    elif core.is_rational():
        _, factors = core.pa.sqf_list()
        root = p.ring.one
        for f, m in factors:
            if m % n:
                return None
            root *= f ** (m // n)
        root_cp = CPoly(p.ring, root)
    else:
        ap = core.to_algebraic()
        _, factors = ap.sqf_list()
        root = ap.ring.one
        for f, m in factors:
            if m % n:
                return None
            root *= f ** (m // n)
        root_cp = CPoly.from_algebraic(p.ring, root)
    c_rel = _ground_ratio(core, root_cp**n)
    if c_rel is None:
        return None
    root_c = qomega_nth_roots(c_rel, n)
    if root_c is None:
        return None
    cand = root_cp.mul_scalar(root_c)
    if any(mins):
        cand = cand * CPoly.from_terms(p.ring, {tuple(e // n for e in mins): _ONE})
    return cand if cand**n == p else None


def _ground_ratio(p: CPoly, q: CPoly):
    """Constant c with p = c*q, or None (assumes p, q proportional candidates)."""
    m, cq = q.leading()
    terms = p.terms()
    if m not in terms:
        return None
    return terms[m] * cq.inv()
