"""Surface construction, cocycles, equivalence moves, automorphisms."""

import random

import pytest

from dp6 import hexagon
from dp6._ratfunc import QOmega
from dp6.fieldtower import FactRegistry, apply, is_fixed, norm
from dp6.surface import (
    SurfaceConditionError,
    TwistedAutomorphism,
    are_cohomologous,
    automorphism_description,
    cocycle_assignments,
    equivalence_move,
    index,
    is_automorphism,
    is_isomorphic,
    make_surface,
    sb_class_equivalent,
    severi_brauer_data,
    torus_member,
    verify_cocycle,
)


def rand_monomial(tower, rng, bound=2):
    exps = [rng.randint(-bound, bound) for _ in tower.variables]
    return tower.monomial(exps)


def random_valid_params(gtype, tower, rng):
    """Monomial parameter sets satisfying the displayed conditions."""
    g = tower.element_named("g")
    if gtype == "S3":
        # xi in k*: a norm of a random monomial down to k
        m = rand_monomial(tower, rng)
        xi = tower.one()
        for u in tower.elements:
            xi = xi * apply(u, m)
        return (xi, None) if not xi.is_zero() else (tower.one(), None)
    h = tower.element_named("h")
    mu = rand_monomial(tower, rng)
    xi = norm(g, mu)
    rho = norm(h, mu.inv())
    if gtype == "Z6":
        # extra twists that stay inside the conditions
        c = rand_monomial(tower, rng)
        c_g = tower.one()
        for u in (tower.element_named("1"), g, g * g):
            c_g = c_g * apply(u, c)  # g-invariant monomial
        xi = xi * (c_g / apply(h, c_g))
        return xi, rho
    # D6: norm twists with mu fixed by gf preserve the conditions
    gf = tower.element_named("gf")
    lam = rand_monomial(tower, rng)
    lam = lam * apply(gf, lam)
    return norm(g, lam.inv()), norm(h, lam)


@pytest.mark.parametrize("gtype", ["Z6", "S3", "D6"])
def test_cocycle_soundness_random(gtype, s3_tower, z6_tower, d6_tower):
    tower = {"Z6": z6_tower, "S3": s3_tower, "D6": d6_tower}[gtype]
    rng = random.Random(7)
    for _ in range(25):
        xi, rho = random_valid_params(gtype, tower, rng)
        spec = make_surface(gtype, tower, xi, rho)
        assert verify_cocycle(spec)


def test_make_surface_rejections(z6_tower, s3_tower, d6_tower):
    x1, x2, y = (z6_tower.var(v) for v in ("x1", "x2", "y"))
    with pytest.raises(SurfaceConditionError, match="Norm_h"):
        make_surface("Z6", z6_tower, x1 * x2 * z6_tower.var("x3"), x1 / x2)
    with pytest.raises(SurfaceConditionError, match="xi in F\\^g"):
        make_surface("Z6", z6_tower, x1, z6_tower.one())
    with pytest.raises(SurfaceConditionError, match="rho in F\\^h"):
        make_surface("Z6", z6_tower, z6_tower.one(), y)
    with pytest.raises(SurfaceConditionError, match="xi in k"):
        make_surface("S3", s3_tower, s3_tower.var("t1"))
    X1, X3, Y = (d6_tower.var(v) for v in ("x1", "x3", "y"))
    with pytest.raises(SurfaceConditionError, match="g\\(rho\\)"):
        make_surface("D6", d6_tower, d6_tower.one(), X1 / d6_tower.var("x2"))


def test_cocycle_values(s3_example, z6_hex):
    cm = cocycle_assignments(s3_example)
    xi_inv = s3_example.xi.inv()
    assert cm["g"].t1 == xi_inv and cm["g"].t2 == xi_inv
    assert cm["f"].t1 == xi_inv
    g3 = s3_example.alpha(s3_example.tower.element_named("1"))
    assert g3.is_identity()
    # trivial parameters give the identity-torus cocycle
    triv = make_surface("S3", s3_example.tower, s3_example.tower.one())
    for a in cocycle_assignments(triv).values():
        assert a.t1.is_one() and a.t2.is_one()


def test_alpha_s_formula(d6_index2):
    # alpha_s = alpha_h h(alpha_f) = ((rho h(xi), rho g(rho) h(xi)), eps(hf))
    tower = d6_index2.tower
    g = tower.element_named("g")
    h = tower.element_named("h")
    rho, xi = d6_index2.rho, d6_index2.xi
    als = d6_index2.alpha(tower.element_named("hf"))
    hxi = apply(h, xi)
    assert als.t1 == rho * hxi
    assert als.t2 == rho * apply(g, rho) * hxi
    assert als.perm == hexagon.REFLECT_S


def test_are_cohomologous_examples(z6_hex):
    tower = z6_hex.tower
    g = tower.element_named("g")
    h = tower.element_named("h")
    x1, x3 = tower.var("x1"), tower.var("x3")
    beta = TwistedAutomorphism(tower.one(), tower.one(), tower.embedding["h"])
    inv = equivalence_move(z6_hex, "invert")
    assert are_cohomologous(z6_hex, inv, beta)
    lam = x1 / x3
    beta2 = TwistedAutomorphism(lam, lam * apply(g, lam), hexagon.IDENTITY)
    twisted = equivalence_move(z6_hex, "twist", element=lam)
    assert are_cohomologous(z6_hex, twisted, beta2)
    assert are_cohomologous(z6_hex, z6_hex, TwistedAutomorphism.identity(tower))
    assert not are_cohomologous(z6_hex, twisted, beta)


@pytest.mark.parametrize("gtype,moves", [
    ("Z6", ["invert", "rotate", "twist"]),
    ("S3", ["invert", "twist"]),
    ("D6", ["invert", "twist"]),
])
def test_equivalence_moves_and_invariance(gtype, moves, z6_hex, s3_example,
                                          d6_index2):
    spec = {"Z6": z6_hex, "S3": s3_example, "D6": d6_index2}[gtype]
    tower = spec.tower
    rng = random.Random(11)
    for move in moves:
        if move == "twist":
            if gtype == "Z6":
                lam = tower.monomial([1, 0, -1, 2])
            elif gtype == "S3":
                f = tower.element_named("f")
                m = rand_monomial(tower, rng)
                lam = m * apply(f, m)
            else:
                gf = tower.element_named("gf")
                m = rand_monomial(tower, rng)
                lam = m * apply(gf, m)
            moved = equivalence_move(spec, move, element=lam)
        else:
            moved = equivalence_move(spec, move)
        res = is_isomorphic(spec, moved)
        assert res.verdict == "Yes", (gtype, move, res.reason)
        assert res.moves, "one-move witness expected"
        assert index(moved) == index(spec)
        assert moved.sbdata.am_K == spec.sbdata.am_K
        assert moved.sbdata.am_L == spec.sbdata.am_L


def test_iso_reflexive_symmetric(s3_example, z6_hex):
    for spec in (s3_example, z6_hex):
        assert is_isomorphic(spec, spec).verdict == "Yes"
    m = equivalence_move(z6_hex, "rotate")
    assert is_isomorphic(z6_hex, m).verdict == "Yes"
    assert is_isomorphic(m, z6_hex).verdict == "Yes"


def test_iso_distinguishes(s3_example, z6_hex, z6_index6):
    res = is_isomorphic(s3_example, z6_hex)
    assert res.verdict == "No"  # different towers entirely
    # same tower, both classes proven different: 1 vs non-norm xi
    triv = make_surface("Z6", z6_hex.tower, z6_hex.tower.one(),
                        z6_hex.tower.one())
    res2 = is_isomorphic(z6_index6, triv)
    assert res2.verdict in ("No", "Unknown")


def test_severi_brauer_data(s3_example, z6_hex, d6_index2):
    d = severi_brauer_data(s3_example)
    assert d.L is None and d.am_K == "Z/3" and d.am_L == "-"
    dz = z6_hex.sbdata
    assert dz.am_K == "0" and dz.am_L == "(Z/2)^2"
    assert dz.K.degree == 2 and dz.L.degree == 3
    dd = d6_index2.sbdata
    assert dd.K.degree == 2 and dd.L.degree == 6
    assert len(dd.L_i) == 3
    for li in dd.L_i:
        assert li.degree == 3


def test_conic_triple_coherence(z6_hex):
    # proving one ratio an h-norm makes the whole triple equivalent: data rule
    tower = z6_hex.tower
    g = tower.element_named("g")
    h = tower.element_named("h")
    rho = z6_hex.rho
    fact = sb_class_equivalent(rho, apply(g, rho), h)
    # for rho = x1/x2 the ratio g(rho)/rho = x1 x3 / x2^2... is not obviously
    # a norm; whichever verdict, it must be consistent for both rotations
    fact2 = sb_class_equivalent(rho, apply(g * g, rho), h)
    if fact.verdict == "IsNorm":
        assert fact2.verdict != "NotNorm"


def test_index_values(s3_example, z6_hex, z6_index6, z6_index3, d6_index2):
    assert index(s3_example) == 3
    assert index(z6_hex) == 2
    assert index(z6_index6) == 6
    assert index(z6_index3) == 3
    assert index(d6_index2) == 2
    rational = make_surface("S3", s3_example.tower,
                            norm(s3_example.tower.element_named("g"),
                                 s3_example.tower.var("t1")))
    assert index(rational) == 1


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

def t1_member(tower, rng):
    g = tower.element_named("g")
    h = tower.element_named("h")
    v = rand_monomial(tower, rng)
    w = v / apply(g, v)
    return w / apply(h, w)


def t23_member(tower, rng):
    g = tower.element_named("g")
    gf = tower.element_named("gf")
    c = rand_monomial(tower, rng)
    if "h" in tower.generators:
        h = tower.element_named("h")
        c = c / apply(h, c)
    w = c / apply(g, c)
    return w * apply(gf, w)


@pytest.mark.parametrize("gtype", ["Z6", "S3", "D6"])
def test_torus_membership(gtype, z6_hex, s3_example, d6_index2):
    spec = {"Z6": z6_hex, "S3": s3_example, "D6": d6_index2}[gtype]
    tower = spec.tower
    g = tower.element_named("g")
    rng = random.Random(3)
    for _ in range(20):
        if gtype == "Z6":
            lam = t1_member(tower, rng)
            h = tower.element_named("h")
            assert norm(g, lam).is_one() and norm(h, lam).is_one()
        else:
            lam = t23_member(tower, rng)
            assert norm(g, lam).is_one()
            assert is_fixed(lam, [tower.element_named("gf")])
        psi = torus_member(spec, lam)
        assert is_automorphism(spec, psi)
    for _ in range(20):
        lam = rand_monomial(tower, rng)
        if norm(g, lam).is_one():
            continue
        psi = torus_member(spec, lam)
        assert not is_automorphism(spec, psi)


def test_alpha_h_cases(z6_hex, z6_index6, d6_index2, d6_index3):
    # alpha_h is an automorphism exactly when xi is trivial
    for spec, expect in ((z6_hex, True), (z6_index6, False),
                         (d6_index2, True), (d6_index3, False)):
        ah = spec.alpha(spec.tower.element_named("h"))
        assert is_automorphism(spec, ah) is expect


def test_alpha_g_case_z6_rho_trivial(z6_index3):
    ag = z6_index3.alpha(z6_index3.tower.element_named("g"))
    assert is_automorphism(z6_index3, ag)


def test_automorphism_closure(z6_hex):
    rng = random.Random(5)
    tower = z6_hex.tower
    for _ in range(10):
        a = torus_member(z6_hex, t1_member(tower, rng))
        b = torus_member(z6_hex, t1_member(tower, rng))
        assert is_automorphism(z6_hex, a * b)


def test_descriptors(z6_hex, z6_index6, z6_index3, s3_example, d6_index2,
                     d6_index3):
    assert automorphism_description(z6_hex) == "T1 x <alpha_h>"
    assert automorphism_description(z6_index6) == "T1"
    assert automorphism_description(z6_index3) == "T1 x <alpha_g>"
    assert automorphism_description(s3_example) == "T2"
    assert automorphism_description(d6_index2) == "T3 x <alpha_h>"
    assert automorphism_description(d6_index3) == "T3"
