"""Sextic del Pezzo surfaces of Picard rank 1 as twisted toric data.

A surface is a tower together with twist parameters (xi and, for the Z6/D6
types, rho) satisfying the displayed coefficient conditions; the cocycle
sending each Galois generator to a twisted automorphism is materialized and
verified on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import hexagon
from .fieldtower import (
    FactRegistry,
    FieldElement,
    GaloisTower,
    IS_NORM,
    NOT_NORM,
    TowerError,
    UNKNOWN,
    apply,
    is_fixed,
    norm,
    norm_class,
)


class SurfaceConditionError(ValueError):
    """A twist-parameter condition fails; the message names the identity."""


class TwistedAutomorphism:
    """Automorphism ((l1, l2), delta) of the split surface, delta in D6."""

    __slots__ = ("t1", "t2", "perm")

    def __init__(self, t1: FieldElement, t2: FieldElement, perm):
        self.t1 = t1
        self.t2 = t2
        self.perm = tuple(perm)

    @classmethod
    def identity(cls, tower):
        one = tower.one()
        return cls(one, one, hexagon.IDENTITY)

    @classmethod
    def toric(cls, t1, t2):
        return cls(t1, t2, hexagon.IDENTITY)

    def is_identity(self):
        return self.t1.is_one() and self.t2.is_one() and self.perm == hexagon.IDENTITY

    def torus_image(self, pair):
        """Action of the dihedral part on a torus pair."""
        m = hexagon.torus_matrix(self.perm)
        a, b = pair
        return (
            a ** m[0][0] * b ** m[0][1],
            a ** m[1][0] * b ** m[1][1],
        )

    def __mul__(self, other):
        u1, u2 = self.torus_image((other.t1, other.t2))
        return TwistedAutomorphism(
            self.t1 * u1, self.t2 * u2, hexagon.compose(self.perm, other.perm)
        )

    def inverse(self):
        pinv = hexagon.invert(self.perm)
        m = hexagon.torus_matrix(pinv)
        a = self.t1 ** m[0][0] * self.t2 ** m[0][1]
        b = self.t1 ** m[1][0] * self.t2 ** m[1][1]
        return TwistedAutomorphism(a.inv(), b.inv(), pinv)

    def galois(self, u):
        return TwistedAutomorphism(apply(u, self.t1), apply(u, self.t2), self.perm)

    def __eq__(self, other):
        return (
            isinstance(other, TwistedAutomorphism)
            and self.perm == other.perm
            and self.t1 == other.t1
            and self.t2 == other.t2
        )

    def __hash__(self):
        return hash((self.t1, self.t2, self.perm))

    def __repr__(self):
        return f"(({self.t1}, {self.t2}), {hexagon.perm_name(self.perm)})"


# ---------------------------------------------------------------------------
# class handles and Severi-Brauer data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassHandle:
    """A Severi-Brauer or conic class, carried as data.

    Either an explicit field element with its norm-generator word, or an
    opaque transported class identified only by its key.
    """

    key: tuple
    element: FieldElement | None = None
    gen_word: str = ""
    status: str = UNKNOWN
    assumed: bool = False

    @classmethod
    def trivial(cls):
        return cls(key=("trivial",), status=IS_NORM)

    @classmethod
    def explicit(cls, element, gen_word, fact):
        return cls(
            key=("elt", element.key(), gen_word),
            element=element,
            gen_word=gen_word,
            status=fact.verdict,
            assumed=fact.assumed,
        )

    def is_trivial(self):
        return self.status == IS_NORM

    def same_class(self, other):
        """Tri-valued data-level equality of classes."""
        if self.key == other.key:
            return True
        if self.is_trivial() and other.is_trivial():
            return True
        if self.is_trivial() != other.is_trivial() and UNKNOWN not in (
            self.status, other.status
        ):
            return False
        return None


@dataclass
class SeveriBrauerData:
    """Derived classification payload: fields, class pair, conic triple, flags."""

    f_key: tuple
    f_label: str
    K: object           # ExtensionDescriptor or opaque field tag
    L: object | None
    L_i: tuple = ()
    sb_pair: tuple = ()          # (ClassHandle, ClassHandle) for {xi, xi^-1}
    conic: ClassHandle | None = None
    k_trivial: str = UNKNOWN     # IS_NORM / NOT_NORM / UNKNOWN of xi
    l_trivial: str = UNKNOWN
    assumed_facts: tuple = ()

    @property
    def am_K(self):
        if self.k_trivial == IS_NORM:
            return "0"
        if self.k_trivial == NOT_NORM:
            return "Z/3"
        return "unknown"

    @property
    def am_L(self):
        if self.L is None:
            return "-"
        if self.l_trivial == IS_NORM:
            return "0"
        if self.l_trivial == NOT_NORM:
            return "(Z/2)^2"
        return "unknown"

    def key(self):
        def fkey(x):
            if x is None:
                return None
            return x.key() if hasattr(x, "key") else x
        sb = frozenset(h.key + (h.status,) for h in self.sb_pair) if self.sb_pair else None
        conic = (self.conic.key, self.conic.status) if self.conic else None
        return (self.f_key, fkey(self.K), sb, fkey(self.L), conic)


# ---------------------------------------------------------------------------
# the surface spec
# ---------------------------------------------------------------------------

@dataclass
class SurfaceSpec:
    gtype: str
    tower: GaloisTower
    xi: FieldElement
    rho: FieldElement | None
    registry: FactRegistry = field(default_factory=FactRegistry)
    name: str = "S"
    cocycle: dict = field(default_factory=dict)
    sbdata: SeveriBrauerData | None = None

    def gen(self, word):
        return self.tower.element_named(word)

    def alpha(self, u):
        """Cocycle value on an arbitrary group element."""
        if u in self.cocycle:
            return self.cocycle[u]
        word = self.tower.words[u]
        if not word:
            val = TwistedAutomorphism.identity(self.tower)
        else:
            head, rest_word = word[0], word[1:]
            rest = self.tower.element_named("".join(rest_word)) if rest_word else None
            a_head = self.cocycle[self.tower.generators[head]]
            if rest is None:
                val = a_head
            else:
                val = a_head * self.alpha(rest).galois(self.tower.generators[head])
        self.cocycle[u] = val
        return val

    def key(self):
        return (self.gtype, self.tower.key(), self.xi.key(),
                self.rho.key() if self.rho is not None else None)


def make_surface(gtype, tower, xi, rho=None, registry=None, name="S"):
    """Validate the twist parameters exactly and materialize the cocycle."""
    if tower.gtype != gtype:
        raise SurfaceConditionError(
            f"tower group is {tower.gtype}, surface type is {gtype}"
        )
    if xi.is_zero() or (rho is not None and rho.is_zero()):
        raise SurfaceConditionError("twist parameters must be nonzero")
    g = tower.element_named("g")
    if gtype == "Z6":
        if rho is None:
            raise SurfaceConditionError("Z6 surfaces need the parameter rho")
        h = tower.element_named("h")
        if not is_fixed(xi, [g]):
            raise SurfaceConditionError("condition fails: xi in F^g")
        if not is_fixed(rho, [h]):
            raise SurfaceConditionError("condition fails: rho in F^h")
        if not (norm(h, xi) * norm(g, rho)).is_one():
            raise SurfaceConditionError(
                "condition fails: Norm_h(xi) * Norm_g(rho) = 1"
            )
    elif gtype == "S3":
        if rho is not None:
            raise SurfaceConditionError("S3 surfaces carry no parameter rho")
        if not tower.in_base_field(xi):
            raise SurfaceConditionError("condition fails: xi in k*")
    elif gtype == "D6":
        if rho is None:
            raise SurfaceConditionError("D6 surfaces need the parameter rho")
        h = tower.element_named("h")
        f = tower.element_named("f")
        if not is_fixed(xi, [g, f]):
            raise SurfaceConditionError("condition fails: xi in F^<g,f>")
        if not is_fixed(rho, [h]):
            raise SurfaceConditionError("condition fails: rho in F^h")
        if not (norm(h, xi) * norm(g, rho)).is_one():
            raise SurfaceConditionError(
                "condition fails: Norm_h(xi) * Norm_g(rho) = 1"
            )
        if not (apply(g, rho) * norm(f, rho) * norm(h, xi)).is_one():
            raise SurfaceConditionError(
                "condition fails: g(rho) * Norm_f(rho) * Norm_h(xi) = 1"
            )
    else:
        raise SurfaceConditionError(f"unknown surface type {gtype!r}")

    spec = SurfaceSpec(gtype, tower, xi, rho, registry or FactRegistry(), name)
    spec.cocycle = _base_cocycle(spec)
    verify_cocycle(spec)
    spec.sbdata = severi_brauer_data(spec)
    return spec


def _base_cocycle(spec):
    tower = spec.tower
    xi_inv = spec.xi.inv()
    emb = {n: tower.embedding[n] for n in tower.generators}
    out = {}
    g = tower.generators["g"]
    out[g] = TwistedAutomorphism(xi_inv, xi_inv, emb["g"])
    if spec.gtype in ("Z6", "D6"):
        h = tower.generators["h"]
        rho = spec.rho
        out[h] = TwistedAutomorphism(rho, rho * apply(g, rho), emb["h"])
    if spec.gtype in ("S3", "D6"):
        f = tower.generators["f"]
        out[f] = TwistedAutomorphism(xi_inv, xi_inv, emb["f"])
    return out


def cocycle_assignments(spec: SurfaceSpec):
    """Generator -> twisted automorphism, after full cocycle verification."""
    verify_cocycle(spec)
    return {name: spec.alpha(u) for name, u in spec.tower.generators.items()}


def verify_cocycle(spec: SurfaceSpec):
    """Check alpha_{uv} = alpha_u * u(alpha_v) for every pair of elements."""
    tower = spec.tower
    for u in tower.elements:
        au = spec.alpha(u)
        for v in tower.elements:
            av = spec.alpha(v)
            lhs = spec.alpha(u * v)
            rhs = au * av.galois(u)
            if lhs != rhs:
                raise SurfaceConditionError(
                    f"cocycle identity fails at ({tower.words[u]}, {tower.words[v]})"
                )
    return True


def are_cohomologous(s1: SurfaceSpec, s2: SurfaceSpec, beta: TwistedAutomorphism):
    """Whether beta realizes alpha'_u = beta * alpha_u * u(beta^-1) on generators."""
    if s1.tower is not s2.tower or s1.gtype != s2.gtype:
        return False
    for name, u in s1.tower.generators.items():
        lhs = s2.alpha(u)
        rhs = beta * s1.alpha(u) * beta.inverse().galois(u)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Severi-Brauer data extraction
# ---------------------------------------------------------------------------

def _subfield_fixing(tower, fixing, name):
    from .fieldtower import ExtensionDescriptor

    return ExtensionDescriptor("subfield", tower, fixing=frozenset(fixing), name=name)


def k_fixing_subgroup(tower):
    """Elements whose hexagon action preserves the triple {E1,E2,E3} setwise."""
    return frozenset(
        u for u in tower.elements
        if {tower.embed_map[u][i] for i in (0, 1, 2)} == {0, 1, 2}
    )


def central_element(tower):
    """The preimage of the central symmetry of the hexagon, if present."""
    for u in tower.elements:
        if tower.embed_map[u] == hexagon.CENTRAL:
            return u
    return None


def l_fixing_subgroup(tower):
    h = central_element(tower)
    if h is None:
        return None
    idn = tower.element_named("1")
    return frozenset([idn, h])


def severi_brauer_data(spec: SurfaceSpec) -> SeveriBrauerData:
    tower = spec.tower
    g = tower.element_named("g")
    xi_fact = norm_class(spec.xi, g, registry=spec.registry)
    spec.registry.note_assumed_use(xi_fact)
    xi_inv_handle = ClassHandle.explicit(spec.xi.inv(), "g", xi_fact)
    xi_handle = ClassHandle.explicit(spec.xi, "g", xi_fact)

    K = _subfield_fixing(tower, k_fixing_subgroup(tower), "K")
    L = None
    L_i = ()
    if spec.gtype in ("Z6", "D6"):
        L = _subfield_fixing(tower, l_fixing_subgroup(tower), "L")
    if spec.gtype == "D6":
        h = central_element(tower)
        idn = tower.element_named("1")
        kleins = []
        for u in tower.elements:
            perm = tower.embed_map[u]
            # triple-swapping reflections f_i: involutions, not central
            if u == h or u == idn:
                continue
            if (u * u) == idn and {perm[i] for i in (0, 1, 2)} == {3, 4, 5}:
                kleins.append(frozenset([idn, h, u, h * u]))
        seen = []
        for v in kleins:
            if v not in seen:
                seen.append(v)
        L_i = tuple(
            _subfield_fixing(tower, v, f"L{i+1}") for i, v in enumerate(seen)
        )

    conic = None
    l_trivial = UNKNOWN
    assumed = []
    if spec.gtype in ("Z6", "D6"):
        h = tower.element_named("h")
        conic_fact = norm_class(spec.rho, h, registry=spec.registry)
        spec.registry.note_assumed_use(conic_fact)
        conic = ClassHandle.explicit(spec.rho, "h", conic_fact)
        l_trivial = conic_fact.verdict
        if conic_fact.assumed:
            assumed.append(conic_fact)
    else:
        l_trivial = IS_NORM  # no involution-surface side for S3

    if xi_fact.assumed:
        assumed.append(xi_fact)

    return SeveriBrauerData(
        f_key=tower.key(),
        f_label=tower.name,
        K=K,
        L=L,
        L_i=L_i,
        sb_pair=(xi_handle, xi_inv_handle),
        conic=conic,
        k_trivial=xi_fact.verdict,
        l_trivial=l_trivial,
        assumed_facts=tuple(assumed),
    )


def sb_class_equivalent(a: FieldElement, b: FieldElement, u, registry=None):
    """Tri-valued: are the classes of a and b equal modulo Norm_u."""
    if a.is_zero() or b.is_zero():
        raise TowerError("classes of zero are undefined")
    return norm_class(b / a, u, registry=registry)


# ---------------------------------------------------------------------------
# index and isomorphism
# ---------------------------------------------------------------------------

def index(spec: SurfaceSpec):
    """{1,2,3,6,Unknown}: gcd of closed-point degrees, from triviality flags."""
    data = spec.sbdata
    k, l = data.k_trivial, data.l_trivial
    if spec.gtype == "S3":
        if k == IS_NORM:
            return 1
        if k == NOT_NORM:
            return 3
        return UNKNOWN
    if UNKNOWN in (k, l):
        return UNKNOWN
    if k == IS_NORM and l == IS_NORM:
        return 1
    if k == IS_NORM:
        return 2
    if l == IS_NORM:
        return 3
    return 6


@dataclass
class IsoResult:
    verdict: str  # "Yes" / "No" / "Unknown"
    moves: tuple = ()
    witnesses: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.verdict == "Yes"


def is_isomorphic(s1: SurfaceSpec, s2: SurfaceSpec) -> IsoResult:
    """Decide isomorphism via the equivalence moves and the norm oracle."""
    if s1.tower.key() != s2.tower.key():
        return IsoResult("No", reason="different splitting field or embedding")
    if s1.gtype != s2.gtype:
        return IsoResult("No", reason="different Galois type")
    tower = s1.tower
    g = tower.element_named("g")
    inversions = (1, -1)
    if s1.gtype == "Z6":
        rotations = (0, 1, 2)
    elif s1.gtype == "S3":
        rotations = (0,)
    else:
        rotations = (0, 1, 2)

    saw_unknown = False
    first_no = None
    for eps in inversions:
        xi_c = s1.xi if eps == 1 else s1.xi.inv()
        fact_xi = sb_class_equivalent(xi_c, s2.xi, g, registry=s1.registry)
        if fact_xi.verdict == UNKNOWN:
            saw_unknown = True
        for t in rotations:
            moves = []
            if eps == -1:
                moves.append("invert")
            if t:
                moves.append(f"rotate-rho^{t}")
            if s1.gtype == "S3":
                if fact_xi.verdict == IS_NORM:
                    return IsoResult(
                        "Yes", tuple(moves + ["norm-twist"]), (fact_xi,)
                    )
                if fact_xi.verdict == NOT_NORM:
                    first_no = first_no or "SB classes differ over K"
                continue
            h = tower.element_named("h")
            rho_c = s1.rho if eps == 1 else s1.rho.inv()
            for _ in range(t):
                rho_c = apply(g, rho_c)
            fact_rho = sb_class_equivalent(rho_c, s2.rho, h, registry=s1.registry)
            if fact_xi.verdict == IS_NORM and fact_rho.verdict == IS_NORM:
                return IsoResult(
                    "Yes", tuple(moves + ["norm-twist"]), (fact_xi, fact_rho)
                )
            if fact_rho.verdict == UNKNOWN:
                saw_unknown = True
            if fact_xi.verdict == NOT_NORM:
                first_no = first_no or "SB classes differ over K"
            elif fact_rho.verdict == NOT_NORM:
                first_no = first_no or "conic classes differ over L"
    if saw_unknown:
        return IsoResult("Unknown", reason="norm oracle undecided")
    return IsoResult("No", reason=first_no or "Severi-Brauer data differ")


def equivalence_move(spec: SurfaceSpec, move, element=None):
    """Apply one generator move of the equivalence relation; returns a new spec."""
    tower = spec.tower
    g = tower.element_named("g")
    if move == "invert":
        xi = spec.xi.inv()
        rho = spec.rho.inv() if spec.rho is not None else None
        return make_surface(spec.gtype, tower, xi, rho, spec.registry,
                            name=spec.name + "'")
    if move == "rotate":
        if spec.gtype != "Z6":
            raise SurfaceConditionError("rho-rotation is a Z6 move")
        return make_surface(spec.gtype, tower, spec.xi, apply(g, spec.rho),
                            spec.registry, name=spec.name + "'")
    if move == "twist":
        lam = element
        if lam is None or lam.is_zero():
            raise SurfaceConditionError("norm twist needs a nonzero element")
        if spec.gtype == "Z6":
            h = tower.element_named("h")
            xi = spec.xi * norm(g, lam.inv())
            rho = spec.rho * norm(h, lam)
            return make_surface("Z6", tower, xi, rho, spec.registry,
                                name=spec.name + "'")
        if spec.gtype == "S3":
            f = tower.element_named("f")
            if not is_fixed(lam, [f]):
                raise SurfaceConditionError("S3 twist element must lie in F^f")
            return make_surface("S3", tower, spec.xi * norm(g, lam), None,
                                spec.registry, name=spec.name + "'")
        gf = tower.element_named("gf")
        if not is_fixed(lam, [gf]):
            raise SurfaceConditionError("D6 twist element must lie in F^gf")
        h = tower.element_named("h")
        xi = spec.xi * norm(g, lam.inv())
        rho = spec.rho * norm(h, lam)
        return make_surface("D6", tower, xi, rho, spec.registry,
                            name=spec.name + "'")
    raise SurfaceConditionError(f"unknown move {move!r}")


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

def is_automorphism(spec: SurfaceSpec, psi: TwistedAutomorphism):
    """Exact membership test: u(psi) = alpha_u^-1 * psi * alpha_u for all u."""
    for name, u in spec.tower.generators.items():
        au = spec.alpha(u)
        if psi.galois(u) != au.inverse() * psi * au:
            return False
    return True


def automorphism_description(spec: SurfaceSpec):
    """Structural descriptor of Aut_k(S) per the membership theorem."""
    data = spec.sbdata
    k, l = data.k_trivial, data.l_trivial
    if spec.gtype == "S3":
        return "T2"
    if spec.gtype == "Z6":
        if k == IS_NORM and l == IS_NORM:
            return "rational: full automorphism group not classified here"
        if k == IS_NORM:
            return "T1 x <alpha_h>"
        if l == IS_NORM:
            return "T1 x <alpha_g>"
        if UNKNOWN in (k, l):
            return "conditional: T1, extended by alpha_h/alpha_g if a class is trivial"
        return "T1"
    if k == IS_NORM and l == IS_NORM:
        return "rational: full automorphism group not classified here"
    if k == IS_NORM:
        return "T3 x <alpha_h>"
    if k == UNKNOWN:
        return "conditional: T3, extended by alpha_h if the SB class is trivial"
    return "T3"


def torus_member(spec: SurfaceSpec, lam: FieldElement):
    """The toric automorphism with first coordinate lam, per the gtype shape."""
    tower = spec.tower
    g = tower.element_named("g")
    if spec.gtype == "Z6":
        return TwistedAutomorphism.toric(lam, lam * apply(g, lam))
    f = tower.element_named("f")
    return TwistedAutomorphism.toric(lam, apply(f, lam.inv()))
