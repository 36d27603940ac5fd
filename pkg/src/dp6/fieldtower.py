"""Rational-function field towers with explicit finite Galois actions.

A tower is F = Q(w)(x_1, ..., x_n) together with a finite group of
automorphisms, each acting by a variable permutation composed with scaling
by roots of unity.  The base field k is the fixed field of the group.
Radical extensions E = k(r) (r^n = a, a in k*) are supported, with composite
Galois groups realized as pairs (action on F, action on r).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import hexagon
from ._ratfunc import (
    CPoly,
    QOmega,
    UNITS,
    cancel_pair,
    poly_nth_root,
    qomega_nth_roots,
    rational_ring,
)


class DomainMismatchError(ValueError):
    """Element and automorphism (or two elements) live in different fields."""


class TowerError(ValueError):
    pass


class UnsupportedCompositeError(ValueError):
    """E/F intersection pattern outside {k, quadratic subfield, E inside F}."""


class CertificateError(ValueError):
    """A supplied norm certificate failed exact verification."""


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

class FieldElement:
    """Canonical fraction num/den of Q(w)-polynomials in a tower's variables."""

    __slots__ = ("tower", "num", "den")

    def __init__(self, tower, num: CPoly, den: CPoly, _canonical=False):
        self.tower = tower
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = cancel_pair(num, den)

    # -- helpers ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.tower is not self.tower:
                raise DomainMismatchError("elements of different towers")
            return other
        if isinstance(other, int):
            return self.tower.const(QOmega(other))
        if hasattr(other, "digits"):
            return None  # radical element: let its reflected operator handle it
        raise DomainMismatchError(f"cannot coerce {other!r}")

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def is_constant(self):
        return self.num.is_ground() and self.den.is_ground()

    def is_monomial_quotient(self):
        return self.num.is_monomial() and self.den.is_monomial()

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElement(self.tower, -self.num, self.den, _canonical=True)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError
        return FieldElement(self.tower, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError
        return FieldElement(self.tower, self.den, self.num)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        return FieldElement(self.tower, self.num**k, self.den**k)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            if isinstance(other, int):
                other = self.tower.const(QOmega(other))
            else:
                return NotImplemented
        # canonical representation makes this literal
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num.key(), self.den.key()))

    def key(self):
        return (self.num.key(), self.den.key())

    def degree_in(self, var_name):
        i = self.tower.var_index(var_name)
        return self.num.degree_in(i) - self.den.degree_in(i)

    def nth_root(self, n):
        """Exact n-th root in F, or None."""
        rn = poly_nth_root(self.num, n)
        if rn is None:
            return None
        rd = poly_nth_root(self.den, n)
        if rd is None:
            return None
        return FieldElement(self.tower, rn, rd)

    def __repr__(self):
        if self.den == CPoly.one(self.tower.ring):
            return f"{self.num}"
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

class VarAutomorphism:
    """x_i -> scal[i] * x_{perm[i]}, scalars roots of unity in Q(w)."""

    __slots__ = ("perm", "scal")

    def __init__(self, perm, scal):
        self.perm = tuple(perm)
        self.scal = tuple(scal)
        if len(self.perm) != len(self.scal):
            raise ValueError("perm/scal length mismatch")

    @classmethod
    def identity(cls, n):
        return cls(range(n), (QOmega.one(),) * n)

    def is_identity(self):
        return all(p == i for i, p in enumerate(self.perm)) and all(
            s.is_one() for s in self.scal
        )

    def __mul__(self, other):
        """(self*other)(x) = self(other(x))."""
        n = len(self.perm)
        perm = [0] * n
        scal = [None] * n
        for i in range(n):
            j = other.perm[i]
            perm[i] = self.perm[j]
            scal[i] = other.scal[i] * self.scal[j]
        return VarAutomorphism(perm, scal)

    def inverse(self):
        n = len(self.perm)
        perm = [0] * n
        scal = [None] * n
        for i in range(n):
            perm[self.perm[i]] = i
            scal[self.perm[i]] = self.scal[i].inv()
        return VarAutomorphism(perm, scal)

    def order(self):
        u = self
        for k in range(1, 13):
            if u.is_identity():
                return k
            u = u * self
        raise TowerError("automorphism order exceeds 12")

    def __eq__(self, other):
        return (
            isinstance(other, VarAutomorphism)
            and self.perm == other.perm
            and self.scal == other.scal
        )

    def __hash__(self):
        return hash((self.perm, tuple(s.key() for s in self.scal)))

    def key(self):
        return (self.perm, tuple(s.key() for s in self.scal))

    def __repr__(self):
        return f"VarAut(perm={self.perm}, scal={[str(s) for s in self.scal]})"


def _apply_varaut_poly(u: VarAutomorphism, p: CPoly) -> CPoly:
    out = {}
    n = len(u.perm)
    for mon, c in p.terms().items():
        new = [0] * n
        factor = QOmega.one()
        for i, e in enumerate(mon):
            if e:
                new[u.perm[i]] += e
                factor = factor * (u.scal[i] ** e)
        key = tuple(new)
        prev = out.get(key)
        val = factor * c
        out[key] = val if prev is None else prev + val
    return CPoly.from_terms(p.ring, out)


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

_PRESENTATIONS = {
    "Z6": {"gens": {"g": 3, "h": 2}, "relations": [("gh", "hg")]},
    "S3": {"gens": {"g": 3, "f": 2}, "relations": [("fgf", "gg")]},
    "D6": {
        "gens": {"g": 3, "h": 2, "f": 2},
        "relations": [("gh", "hg"), ("hf", "fh"), ("fgf", "gg")],
    },
}

DEFAULT_EMBEDDING = {
    "g": hexagon.ROT3,
    "h": hexagon.CENTRAL,
    "f": hexagon.REFLECT_F,
}


class GaloisTower:
    """Q(w)(x_1..x_n) with a finite group of monomial automorphisms.

    Generators are named g, h, f (a subset, per the group type); the embedding
    into the hexagon symmetry group D6 is stored explicitly and never inferred.
    """

    def __init__(self, variables, generators, embedding=None, name=None):
        self.variables = tuple(variables)
        self.name = name or "F"
        self.ring = rational_ring(self.variables)
        self.generators = dict(generators)
        for gname, u in self.generators.items():
            if len(u.perm) != len(self.variables):
                raise TowerError(f"generator {gname} has wrong arity")
        self.embedding = dict(embedding) if embedding else {
            n: DEFAULT_EMBEDDING[n] for n in self.generators
        }
        self._check_presentation()
        self.elements, self.words = self._closure()
        self.embed_map = self._extend_embedding()
        self.gtype = self._derive_gtype()

    # -- group structure ---------------------------------------------------
    def _check_presentation(self):
        gens = self.generators
        names = set(gens)
        if names == {"g", "h"}:
            pres = _PRESENTATIONS["Z6"]
        elif names == {"g", "f"}:
            pres = _PRESENTATIONS["S3"]
        elif names == {"g", "h", "f"}:
            pres = _PRESENTATIONS["D6"]
        else:
            raise TowerError(f"unsupported generator set {sorted(names)}")
        for gname, order in pres["gens"].items():
            u = gens[gname]
            if u.is_identity() or u.order() != order:
                raise TowerError(f"generator {gname} must have order {order}")
        for lhs, rhs in pres["relations"]:
            ul = _word_product(gens, lhs)
            ur = _word_product(gens, rhs)
            if ul != ur:
                raise TowerError(f"presentation relation {lhs} = {rhs} fails")

    def _closure(self):
        idn = VarAutomorphism.identity(len(self.variables))
        words = {idn: ()}
        queue = [idn]
        while queue:
            u = queue.pop()
            for gname, gen in self.generators.items():
                v = gen * u
                if v not in words:
                    words[v] = (gname,) + words[u]
                    queue.append(v)
            if len(words) > 12:
                raise TowerError("group larger than D6")
        return list(words), words

    def _extend_embedding(self):
        out = {}
        for u, word in self.words.items():
            p = hexagon.IDENTITY
            for gname in word:
                p = hexagon.compose(p, self.embedding[gname])
            out[u] = p
        if len(set(out.values())) != len(out):
            raise TowerError("embedding into D6 is not injective")
        return out

    def _derive_gtype(self):
        names = set(self.generators)
        if names == {"g", "h"}:
            return "Z6"
        if names == {"g", "f"}:
            return "S3"
        return "D6"

    def element_named(self, word):
        """Group element for a word like "g", "gh", "gf", "s"."""
        if word == "s":
            word = "hf"
        u = VarAutomorphism.identity(len(self.variables))
        for ch in word:
            if ch == "1":
                continue
            if ch not in self.generators:
                raise TowerError(f"unknown generator {ch!r} in {word!r}")
            u = u * self.generators[ch]
        return u

    def subgroup(self, words):
        """Subgroup generated by the given words, as a frozenset of elements."""
        gens = [self.element_named(w) for w in words]
        idn = VarAutomorphism.identity(len(self.variables))
        out = {idn}
        queue = [idn]
        while queue:
            u = queue.pop()
            for gen in gens:
                v = gen * u
                if v not in out:
                    out.add(v)
                    queue.append(v)
        return frozenset(out)

    # -- elements ----------------------------------------------------------
    def var_index(self, name):
        return self.variables.index(name)

    def var(self, name):
        return FieldElement(
            self, CPoly.variable(self.ring, self.var_index(name)), CPoly.one(self.ring)
        )

    def const(self, c: QOmega):
        return FieldElement(self, CPoly.const(self.ring, c), CPoly.one(self.ring))

    def one(self):
        return self.const(QOmega.one())

    def zero(self):
        return self.const(QOmega.zero())

    def omega(self):
        return self.const(QOmega.omega())

    def monomial(self, exponents, coeff=None):
        """Laurent monomial; exponents may be negative."""
        num = {}
        den = {}
        for i, e in enumerate(exponents):
            if e > 0:
                num[i] = e
            elif e < 0:
                den[i] = -e
        n = len(self.variables)
        num_mon = tuple(num.get(i, 0) for i in range(n))
        den_mon = tuple(den.get(i, 0) for i in range(n))
        c = coeff if coeff is not None else QOmega.one()
        return FieldElement(
            self,
            CPoly.from_terms(self.ring, {num_mon: c}),
            CPoly.from_terms(self.ring, {den_mon: QOmega.one()}),
        )

    def in_base_field(self, x):
        """True iff x is fixed by the whole group (x in k)."""
        return is_fixed(x, self.generators.values())

    def key(self):
        emb = tuple(sorted((n, self.embed_map[self.element_named(n)]) for n in self.generators))
        gens = tuple(sorted((n, u.key()) for n, u in self.generators.items()))
        return (self.variables, gens, emb)

    def field_key(self):
        """Presentation-independent identity of (F, Gal(F/k)) as a field pair."""
        return (self.variables, tuple(sorted(u.key() for u in self.elements)))

    def __repr__(self):
        return f"GaloisTower({self.name}: {self.gtype} on {self.variables})"


def _word_product(gens, word):
    u = None
    for ch in word:
        v = gens[ch]
        u = v if u is None else u * v
    return u


# ---------------------------------------------------------------------------
# apply / norm / fixedness
# ---------------------------------------------------------------------------

def apply(u, x):
    """Galois action u(x); a field homomorphism.

    u may be a VarAutomorphism (acting on tower elements) or a
    CompositeElement (acting on radical-extension elements or, by restriction,
    on tower elements).
    """
    if isinstance(u, CompositeElement):
        if isinstance(x, RadElement):
            if x.comp is not u.comp:
                raise DomainMismatchError("element of a different composite field")
            digits = []
            z = QOmega.one()
            for d in x.digits:
                digits.append(apply(u.uf, d) * d.tower.const(z))
                z = z * u.zeta
            return RadElement(x.comp, digits)
        if isinstance(x, FieldElement):
            return apply(u.uf, x)
        raise DomainMismatchError(f"cannot apply composite element to {x!r}")
    if isinstance(u, VarAutomorphism):
        if isinstance(x, FieldElement):
            if len(u.perm) != len(x.tower.variables):
                raise DomainMismatchError("automorphism arity mismatch")
            return FieldElement(
                x.tower, _apply_varaut_poly(u, x.num), _apply_varaut_poly(u, x.den)
            )
        raise DomainMismatchError(f"cannot apply tower automorphism to {x!r}")
    raise DomainMismatchError(f"not an automorphism: {u!r}")


def element_order(u):
    if isinstance(u, CompositeElement):
        n = 1
        v = u
        while not v.is_identity():
            v = v * u
            n += 1
            if n > 36:
                raise TowerError("order exceeds 36")
        return n
    return u.order()


def norm(u, x):
    """Norm of x under the cyclic group generated by u: prod of u^k(x)."""
    n = element_order(u)
    out = x
    y = x
    for _ in range(n - 1):
        y = apply(u, y)
        out = out * y
    return out


def is_fixed(x, autos):
    return all(apply(u, x) == x for u in autos)


# ---------------------------------------------------------------------------
# radical extensions and composites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionDescriptor:
    """One of: subfield-of-F, kummer-cubic, quadratic, kummer-cubic-with-conjugation.

    The radical kinds adjoin r with r^n = a, a in k*; the Galois generators act
    by w: r -> w*r and t: r -> -r (Kummer convention).
    """

    kind: str
    tower: GaloisTower
    radicand: FieldElement | None = None
    fixing: frozenset | None = None
    name: str = "E"

    KINDS = ("subfield", "kummer-cubic", "quadratic", "kummer-cubic-with-conjugation")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise TowerError(f"unknown extension kind {self.kind!r}")
        if self.kind == "subfield":
            if self.fixing is None:
                raise TowerError("subfield extension needs a fixing subgroup")
            group = set(self.tower.elements)
            if not set(self.fixing) <= group:
                raise TowerError("fixing set is not inside the tower group")
            # subgroup check
            for a, b in itertools.product(self.fixing, repeat=2):
                if a * b not in self.fixing:
                    raise TowerError("fixing set is not a subgroup")
        else:
            a = self.radicand
            if a is None or a.is_zero():
                raise TowerError("radical extension needs a nonzero radicand")
            if not self.tower.in_base_field(a):
                raise TowerError("radicand is not fixed by the tower group")

    @property
    def degree(self):
        if self.kind == "subfield":
            return len(self.tower.elements) // len(self.fixing)
        return {"kummer-cubic": 3, "quadratic": 2, "kummer-cubic-with-conjugation": 6}[
            self.kind
        ]

    def genuineness_errors(self):
        """Reasons the extension would collapse to a smaller degree."""
        errs = []
        if self.kind == "kummer-cubic" and _root_in_base(self.tower, self.radicand, 3):
            errs.append("radicand is a cube in k")
        if self.kind == "quadratic" and _root_in_base(self.tower, self.radicand, 2):
            errs.append("radicand is a square in k")
        if self.kind == "kummer-cubic-with-conjugation":
            if _root_in_base(self.tower, self.radicand, 2):
                errs.append("radicand is a square in k")
            if _root_in_base(self.tower, self.radicand, 3):
                errs.append("radicand is a cube in k")
        return errs

    def fixing_subgroup_in_F(self):
        """For E inside F: the subgroup of Gal(F/k) fixing E pointwise, or None."""
        if self.kind == "subfield":
            return self.fixing
        root = self.radicand.nth_root(self.degree)
        if root is None:
            return None
        return frozenset(u for u in self.tower.elements if apply(u, root) == root)

    def same_field(self, other):
        """Tri-valued field equality with another descriptor (True/False/None).

        Radicand comparisons use Kummer theory: k(a^(1/n)) = k(b^(1/n)) iff
        a/b^j is an n-th power in k for some j coprime to n.  Root detection in
        the ambient rational-function field is exact, so radical-vs-radical
        comparisons always decide.
        """
        if self.tower is not other.tower:
            if self.tower.field_key() != other.tower.field_key():
                return None
        if self.kind != other.kind:
            if self.degree != other.degree:
                return False
            return None
        if self.kind == "subfield":
            return frozenset(u.key() for u in self.fixing) == frozenset(
                u.key() for u in other.fixing)
        n = self.degree
        other_rad = other.radicand
        if other_rad.tower is not self.tower:
            # same underlying field presented through another tower object
            other_rad = FieldElement(self.tower, other_rad.num, other_rad.den,
                                     _canonical=True)
        for j in range(1, n):
            if _gcd(j, n) != 1:
                continue
            ratio = self.radicand / (other_rad**j)
            root = ratio.nth_root(n)
            if root is None:
                continue
            # n-th roots differ by roots of unity, all of which lie in k
            for unit in UNITS:
                if is_fixed(root * self.tower.const(unit),
                            self.tower.generators.values()):
                    return True
        return False

    def key(self):
        if self.kind == "subfield":
            return ("sub", self.tower.key(), tuple(sorted(u.key() for u in self.fixing)))
        return (self.kind, self.tower.key(), self.radicand.key())


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _root_in_base(tower, a, n):
    root = a.nth_root(n)
    if root is None:
        return False
    for unit in UNITS:
        if is_fixed(root * tower.const(unit), tower.generators.values()):
            return True
    return False


class CompositeElement:
    """Element of Gal(FE/k): a pair (tower automorphism, action r -> zeta*r)."""

    __slots__ = ("comp", "uf", "zeta")

    def __init__(self, comp, uf: VarAutomorphism, zeta: QOmega):
        self.comp = comp
        self.uf = uf
        self.zeta = zeta

    def __mul__(self, other):
        return CompositeElement(self.comp, self.uf * other.uf, self.zeta * other.zeta)

    def is_identity(self):
        return self.uf.is_identity() and self.zeta.is_one()

    def inverse(self):
        return CompositeElement(self.comp, self.uf.inverse(), self.zeta.inv())

    def order(self):
        return element_order(self)

    def __eq__(self, other):
        return (
            isinstance(other, CompositeElement)
            and self.uf == other.uf
            and self.zeta == other.zeta
        )

    def __hash__(self):
        return hash((self.uf, self.zeta))

    def key(self):
        return (self.uf.key(), self.zeta.key())

    def __repr__(self):
        return f"CompositeElement({self.uf!r}, r->{self.zeta}*r)"


class RadElement:
    """Element of FE = F[r]/(r^m - red), as a digit vector over F."""

    __slots__ = ("comp", "digits")

    def __init__(self, comp, digits):
        self.comp = comp
        digits = list(digits)
        while len(digits) < comp.rdeg:
            digits.append(comp.tower.zero())
        if len(digits) != comp.rdeg:
            raise DomainMismatchError("digit vector has wrong length")
        self.digits = tuple(digits)

    def reduce(self):
        return self

    def is_zero(self):
        return all(d.is_zero() for d in self.digits)

    def in_tower(self):
        return all(d.is_zero() for d in self.digits[1:])

    def as_tower_element(self):
        if not self.in_tower():
            raise DomainMismatchError("element genuinely involves the radical")
        return self.digits[0]

    def _coerce(self, other):
        if isinstance(other, RadElement):
            if other.comp is not self.comp:
                raise DomainMismatchError("different composite fields")
            return other
        if isinstance(other, FieldElement):
            return self.comp.embed(other)
        if isinstance(other, int):
            return self.comp.embed(self.comp.tower.const(QOmega(other)))
        raise DomainMismatchError(f"cannot coerce {other!r}")

    def __add__(self, other):
        o = self._coerce(other)
        return RadElement(self.comp, [a + b for a, b in zip(self.digits, o.digits)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return RadElement(self.comp, [a - b for a, b in zip(self.digits, o.digits)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return RadElement(self.comp, [-a for a in self.digits])

    def __mul__(self, other):
        o = self._coerce(other)
        m = self.comp.rdeg
        red = self.comp.reduction
        out = [self.comp.tower.zero() for _ in range(m)]
        for i, a in enumerate(self.digits):
            if a.is_zero():
                continue
            for j, b in enumerate(o.digits):
                if b.is_zero():
                    continue
                k = i + j
                term = a * b
                if k >= m:
                    k -= m
                    term = term * red
                out[k] = out[k] + term
        return RadElement(self.comp, out)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError
        m = self.comp.rdeg
        nz = [i for i, d in enumerate(self.digits) if not d.is_zero()]
        if len(nz) == 1:
            i = nz[0]
            c = self.digits[i]
            if i == 0:
                return self.comp.embed(c.inv())
            # (c r^i)^-1 = r^(m-i) / (c * red)
            digits = [self.comp.tower.zero()] * m
            digits[m - i] = (c * self.comp.reduction).inv()
            return RadElement(self.comp, digits)
        # general: solve (self * x) = 1 as a linear system over F
        cols = []
        for j in range(m):
            basis = [self.comp.tower.zero()] * m
            basis[j] = self.comp.tower.one()
            col = self * RadElement(self.comp, basis)
            cols.append(list(col.digits))
        mat = [[cols[j][i] for j in range(m)] for i in range(m)]
        rhs = [self.comp.tower.one()] + [self.comp.tower.zero()] * (m - 1)
        sol = _solve_linear(mat, rhs)
        return RadElement(self.comp, sol)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out = self.comp.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except DomainMismatchError:
            return NotImplemented
        return self.digits == o.digits

    def __hash__(self):
        return hash(tuple(d.key() for d in self.digits))

    def key(self):
        return tuple(d.key() for d in self.digits)

    def __repr__(self):
        parts = []
        for i, d in enumerate(self.digits):
            if d.is_zero():
                continue
            parts.append(f"({d})" + ("" if i == 0 else f"*r^{i}" if i > 1 else "*r"))
        return " + ".join(parts) if parts else "0"


def _solve_linear(mat, rhs):
    """Gaussian elimination over a field of FieldElements."""
    m = len(mat)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(m):
        piv = next((r for r in range(col, m) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular system (zero divisor?)")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inv()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[i][m] for i in range(m)]


class CompositeField:
    """FE for a tower F and a radical extension E (E not inside F)."""

    def __init__(self, tower, ext, rdeg, reduction, intersection):
        self.tower = tower
        self.ext = ext
        self.rdeg = rdeg  # [FE : F]
        self.reduction = reduction  # r^rdeg = reduction, an element of F
        self.intersection = intersection  # "k" or ("quadratic", q)

    def embed(self, x: FieldElement):
        if x.tower is not self.tower:
            raise DomainMismatchError("element of a different tower")
        return RadElement(self, [x] + [self.tower.zero()] * (self.rdeg - 1))

    def r(self):
        digits = [self.tower.zero()] * self.rdeg
        digits[1] = self.tower.one()
        return RadElement(self, digits)

    def one(self):
        return self.embed(self.tower.one())

    def zero(self):
        return self.embed(self.tower.zero())

    def element(self, uf, zeta):
        return CompositeElement(self, uf, zeta)


@dataclass
class CompositeGroup:
    """Gal(FE/k) presented by named generator pairs, per the composite lemma."""

    tower: GaloisTower
    ext: ExtensionDescriptor
    comp: CompositeField | None  # None when E is inside F
    generators: dict
    elements: list
    intersection: str  # "k", "quadratic", or "contained"
    intersection_q: FieldElement | None = None

    @property
    def order(self):
        return len(self.elements)

    def f_part(self, u):
        if isinstance(u, CompositeElement):
            return u.uf
        return u

    def fixes_E(self, u):
        """Whether the group element restricts to the identity on E."""
        if self.intersection == "contained":
            fix = self.ext.fixing_subgroup_in_F()
            return u in fix
        if not u.zeta.is_one():
            return False
        if self.intersection == "quadratic":
            return apply(u.uf, self.intersection_q) == self.intersection_q
        return True


def composite_group(tower: GaloisTower, ext: ExtensionDescriptor) -> CompositeGroup:
    """Galois group of the composite FE over k.

    Supported intersection patterns: E inside F, E meet F = k, and E meet F a
    quadratic subfield of F (only for the degree-6 radical kind).
    """
    if ext.tower is not tower:
        raise DomainMismatchError("extension over a different tower")
    errs = ext.genuineness_errors()
    if errs:
        raise UnsupportedCompositeError("; ".join(errs))

    if ext.kind == "subfield":
        gens = {n: u for n, u in tower.generators.items()}
        return CompositeGroup(tower, ext, None, gens, list(tower.elements), "contained")

    a = ext.radicand
    n = ext.degree
    root = a.nth_root(n)
    root_in_F = root is not None
    if root_in_F:
        # E embeds into F: the composite is F itself
        gens = {gname: u for gname, u in tower.generators.items()}
        return CompositeGroup(tower, ext, None, gens, list(tower.elements), "contained")

    if ext.kind == "kummer-cubic":
        comp = CompositeField(tower, ext, 3, a, "k")
        zetas = [QOmega.one(), QOmega.omega(), QOmega.omega() ** 2]
        elements = [
            comp.element(u, z) for u in tower.elements for z in zetas
        ]
        gens = {gname: comp.element(u, QOmega.one()) for gname, u in tower.generators.items()}
        gens["w"] = comp.element(VarAutomorphism.identity(len(tower.variables)), QOmega.omega())
        return CompositeGroup(tower, ext, comp, gens, elements, "k")

    if ext.kind == "quadratic":
        comp = CompositeField(tower, ext, 2, a, "k")
        zetas = [QOmega.one(), -QOmega.one()]
        elements = [comp.element(u, z) for u in tower.elements for z in zetas]
        gens = {gname: comp.element(u, QOmega.one()) for gname, u in tower.generators.items()}
        gens["t"] = comp.element(VarAutomorphism.identity(len(tower.variables)), -QOmega.one())
        return CompositeGroup(tower, ext, comp, gens, elements, "k")

    # kummer-cubic-with-conjugation, r^6 = a
    q = a.nth_root(2)
    croot = a.nth_root(3)
    if croot is not None and q is None:
        raise UnsupportedCompositeError(
            "E meet F would be a cubic subfield; not supported"
        )
    if q is None:
        comp = CompositeField(tower, ext, 6, a, "k")
        zetas = [u for u in UNITS]
        elements = [comp.element(u, z) for u in tower.elements for z in zetas]
        gens = {gname: comp.element(u, QOmega.one()) for gname, u in tower.generators.items()}
        idv = VarAutomorphism.identity(len(tower.variables))
        gens["w"] = comp.element(idv, QOmega.omega())
        gens["t"] = comp.element(idv, -QOmega.one())
        return CompositeGroup(tower, ext, comp, gens, elements, "k")

    # quadratic intersection: identify r^3 with the square root q of a in F
    comp = CompositeField(tower, ext, 3, q, "quadratic")
    elements = []
    for u in tower.elements:
        sign = _as_qomega(apply(u, q) / q)
        for zeta in UNITS:
            if zeta**3 == sign:
                elements.append(comp.element(u, zeta))
    gens = {}
    idv = VarAutomorphism.identity(len(tower.variables))
    for gname, u in tower.generators.items():
        sign = _as_qomega(apply(u, q) / q)
        gens[gname] = comp.element(u, QOmega.one() if sign.is_one() else -QOmega.one())
    gens["w"] = comp.element(idv, QOmega.omega())
    return CompositeGroup(tower, ext, comp, gens, elements, "quadratic",
                          intersection_q=q)


def _as_qomega(x: FieldElement) -> QOmega:
    if not x.is_constant():
        raise TowerError("expected a constant")
    terms = x.num.terms()
    zero = tuple([0] * x.tower.ring.ngens)
    cn = terms.get(zero, QOmega.zero())
    cd = x.den.terms().get(zero)
    return cn * cd.inv()


# ---------------------------------------------------------------------------
# the three-valued norm-class oracle
# ---------------------------------------------------------------------------

IS_NORM = "IsNorm"
NOT_NORM = "NotNorm"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ClassFact:
    """Verdict on `subject in Norm_u`, with machine-checkable provenance."""

    subject_key: tuple
    generator_key: tuple
    verdict: str
    provenance: str
    detail: tuple = ()
    witness: object = field(default=None, compare=False, repr=False)

    @property
    def assumed(self):
        return self.provenance == "assumed"


class FactRegistry:
    """Per-session store of norm-class facts; proven facts are never overridden."""

    def __init__(self):
        self._facts = {}
        self.used_assumed = []

    @staticmethod
    def _key(x, u):
        return (x.key(), u.key())

    def record(self, x, u, fact: ClassFact):
        key = self._key(x, u)
        prior = self._facts.get(key)
        if prior is not None and not prior.assumed:
            if fact.assumed:
                return prior
            if prior.verdict != fact.verdict:
                raise TowerError(
                    f"contradictory norm-class verdicts for {key}: "
                    f"{prior.verdict} vs {fact.verdict}"
                )
            return prior
        self._facts[key] = fact
        return fact

    def lookup(self, x, u):
        return self._facts.get(self._key(x, u))

    def assume(self, x, u, verdict, note=""):
        fact = ClassFact(x.key(), u.key(), verdict, "assumed", (note,))
        return self.record(x, u, fact)

    def note_assumed_use(self, fact):
        if fact.assumed and fact not in self.used_assumed:
            self.used_assumed.append(fact)


def _norm_n(uf, x, n):
    """Product of uf^k(x) for k < n (n need not be the order of uf)."""
    out = x
    y = x
    for _ in range(n - 1):
        y = apply(uf, y)
        out = out * y
    return out


def norm_class(x: FieldElement, u, cert=None, registry: FactRegistry | None = None,
               strict=False):
    """Three-valued membership of x in Norm_u(F*) (or the composite analogue).

    IsNorm requires an exact certificate (supplied, or found for monomial
    data); NotNorm requires a valuation or quadratic-residue proof; otherwise
    Unknown, possibly upgraded by a user-assumed fact (flagged).
    """
    if x.is_zero():
        raise TowerError("norm class of zero is undefined")
    n = element_order(u)

    if cert is not None:
        val = norm(u, cert)
        ok = (val == x) if not isinstance(val, RadElement) else (val == x)
        if not ok:
            raise CertificateError("certificate does not have the stated norm")
        fact = ClassFact(x.key(), u.key(), IS_NORM, "certificate", (str(cert),),
                         witness=cert)
        return registry.record(x, u, fact) if registry else fact

    if registry is not None:
        prior = registry.lookup(x, u)
        if prior is not None and not prior.assumed:
            return prior

    if x.is_one():
        one = x.tower.one()
        fact = ClassFact(x.key(), u.key(), IS_NORM, "certificate", ("1",),
                         witness=one)
        return registry.record(x, u, fact) if registry else fact

    # monomial certificate search
    found = _monomial_norm_preimage(x, u, n)
    if found is not None:
        fact = ClassFact(x.key(), u.key(), IS_NORM, "certificate", (str(found),),
                         witness=found)
        return registry.record(x, u, fact) if registry else fact

    # valuation proof on a distinguished variable
    tower = x.tower
    group = list(tower.elements)
    for i, vname in enumerate(tower.variables):
        if not _degree_preserved(group, i):
            continue
        d = x.num.degree_in(i) - x.den.degree_in(i)
        if d % n != 0:
            fact = ClassFact(
                x.key(), u.key(), NOT_NORM, "valuation-proof", (vname, d % n)
            )
            return registry.record(x, u, fact) if registry else fact

    # quadratic residue proof
    if n == 2:
        uf = u.uf if isinstance(u, CompositeElement) else u
        for i in range(len(tower.variables)):
            if not _flips_only(uf, i):
                continue
            verdict = _residue_test(x, i)
            if verdict is False:
                fact = ClassFact(
                    x.key(), u.key(), NOT_NORM, "residue-proof", (tower.variables[i],)
                )
                return registry.record(x, u, fact) if registry else fact

    if registry is not None and not strict:
        prior = registry.lookup(x, u)
        if prior is not None:
            registry.note_assumed_use(prior)
            return prior
    return ClassFact(x.key(), u.key(), UNKNOWN, "none")


def _degree_preserved(group, index):
    return all(g.perm[index] == index for g in group)


def _flips_only(uf: VarAutomorphism, index):
    """u(v) = -v for this variable and u fixes every other variable."""
    if uf.perm[index] != index or uf.scal[index] != -QOmega.one():
        return False
    for j, (p, s) in enumerate(zip(uf.perm, uf.scal)):
        if j == index:
            continue
        if p != j or not s.is_one():
            return False
    return True


def _residue_test(x: FieldElement, index):
    """False if x cannot be a Norm_u for the order-2 flip at `index`."""
    d1 = min((m[index] for m in x.num.terms()), default=0)
    d2 = min((m[index] for m in x.den.terms()), default=0)
    m = d1 - d2
    if m % 2 != 0:
        return False
    shift_n = [0] * x.num.ring.ngens
    shift_n[index] = d1
    shift_d = [0] * x.den.ring.ngens
    shift_d[index] = d2
    num0 = x.num.shift_down(tuple(shift_n)).subs_zero(index)
    den0 = x.den.shift_down(tuple(shift_d)).subs_zero(index)
    # required square: (-1)^(m/2) * num0/den0
    target = num0 * den0
    if (m // 2) % 2 != 0:
        target = -target
    return poly_nth_root(target, 2) is not None


def _monomial_norm_preimage(x: FieldElement, u, n):
    """A monomial mu with Norm_u(mu) == x, when x is a monomial; else None."""
    if not x.is_monomial_quotient():
        return None
    tower = x.tower
    uf = u.uf if isinstance(u, CompositeElement) else u
    nvars = len(tower.variables)
    (num_mon, _), (den_mon, _) = _only_term(x.num), _only_term(x.den)
    e = [a - b for a, b in zip(num_mon, den_mon)]
    orbits = _perm_orbits(uf.perm, nvars)
    totals = []
    for orb in orbits:
        if len({e[i] for i in orb}) != 1:
            return None
        total = e[orb[0]] * len(orb)
        if total % n:
            return None
        totals.append(total // n)
    # concentrate each orbit's exponent at each position in turn; within-orbit
    # redistribution only changes the norm by a root of unity
    positions = [list(range(len(orb))) for orb in orbits]
    seen = set()
    for placement in itertools.product(*positions):
        d = [0] * nvars
        for orb, pos, tot in zip(orbits, placement, totals):
            d[orb[pos]] = tot
        d = tuple(d)
        if d in seen:
            continue
        seen.add(d)
        mu = tower.monomial(d)
        nm = _norm_n(uf, mu, n)
        ratio = x / nm
        if not ratio.is_constant():
            continue
        c = _as_qomega(ratio)
        k = qomega_nth_roots(c, n)
        if k is None:
            continue
        cand = mu * tower.const(k)
        if isinstance(u, CompositeElement):
            if norm(u, u.comp.embed(cand)) == u.comp.embed(x):
                return cand
        elif norm(uf, cand) == x:
            return cand
    return None


def _only_term(p: CPoly):
    terms = p.terms()
    if len(terms) != 1:
        raise TowerError("not a monomial")
    ((mon, c),) = terms.items()
    return mon, c


def _perm_orbits(perm, n):
    seen = set()
    orbits = []
    for i in range(n):
        if i in seen:
            continue
        orb = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            orb.append(j)
            seen.add(j)
            j = perm[j]
        orbits.append(orb)
    return orbits


# ---------------------------------------------------------------------------
# Hilbert 90 witnesses for monomial data
# ---------------------------------------------------------------------------

def hilbert90_witness(lam: FieldElement, u):
    """mu with lam = mu / u(mu), for monomial-quotient lam of u-norm 1.

    Returns None (Unknown) for non-monomial input; raises if the norm-1
    precondition fails.
    """
    if not norm(u, lam).is_one():
        raise TowerError("hilbert90_witness requires norm 1")
    if not lam.is_monomial_quotient():
        return None
    tower = lam.tower
    uf = u.uf if isinstance(u, CompositeElement) else u
    nvars = len(tower.variables)
    (num_mon, _), (den_mon, _) = _only_term(lam.num), _only_term(lam.den)
    e = [a - b for a, b in zip(num_mon, den_mon)]
    orbits = _perm_orbits(uf.perm, nvars)
    d = [0] * nvars
    for orb in orbits:
        # walk the orbit: d_i - d_{perm^-1(i)} = e_i
        if sum(e[i] for i in orb) != 0:
            return None
        acc = 0
        order_cycle = [orb[0]]
        j = uf.perm[orb[0]]
        while j != orb[0]:
            order_cycle.append(j)
            j = uf.perm[j]
        for idx in range(1, len(order_cycle)):
            acc += e[order_cycle[idx]]
            d[order_cycle[idx]] = acc
    n_ord = uf.order()
    # adjust constants by shifting whole orbits (changes the quotient by a unit);
    # start from the shift that clears negative exponents
    base_shifts = [max(0, -min(d[i] for i in orb)) for orb in orbits]
    shift_sets = [[b + k for k in range(n_ord)] for b in base_shifts]
    for shifts in itertools.product(*shift_sets):
        dd = list(d)
        for orb, sh in zip(orbits, shifts):
            for i in orb:
                dd[i] += sh
        mu = tower.monomial(dd)
        if mu / apply(uf, mu) == lam:
            return mu
    return None
