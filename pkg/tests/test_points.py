"""Closed-point validation, general position, constructions, twisted orbits."""

import pytest

from dp6.fieldtower import ExtensionDescriptor, apply, norm
from dp6.points import (
    ClosedPointSpec,
    PointCaseError,
    PointValidationError,
    component_permutations,
    components,
    composite_for,
    construct_2point,
    construct_3point,
    general_position,
    twisted_apply,
    twisted_orbit,
    validate_point,
)
from dp6.surface import make_surface


def test_example_points_validate(s3_example, example_points):
    for p in example_points:
        assert validate_point(s3_example, p)
        assert general_position(s3_example, p)
        comps = components(s3_example, p)
        assert len(comps) == 3


def test_example_point_conditions(s3_example, example_points):
    # lambda in (FE*)^gf with Norm_g(lambda) = xi^-1 = s^-1
    tower = s3_example.tower
    p = example_points[1]
    cg = composite_for(tower, p.ext)
    g = cg.generators["g"]
    f = cg.generators["f"]
    lam = p.lam1
    gf_img = apply(g, apply(f, lam))
    assert gf_img == lam
    assert norm(g, lam) == cg.comp.embed(s3_example.xi.inv())


def test_extension_distinctness(s3_tower, example_points):
    exts = [p.ext for p in example_points]
    for i in range(4):
        assert exts[i].same_field(exts[i]) is True
        for j in range(i + 1, 4):
            assert exts[i].same_field(exts[j]) is False


def test_z6_2point(z6_hex):
    pts = construct_2point(z6_hex)
    assert len(pts) == 1
    p = pts[0]
    assert p.lam1.is_one()
    assert validate_point(z6_hex, p)
    assert general_position(z6_hex, p)
    comps = components(z6_hex, p)
    assert len(comps) == 2
    # the second component is alpha_h h of the first
    h = z6_hex.tower.element_named("h")
    img = twisted_apply(z6_hex, h, comps[0])
    assert img in [tuple(c) for c in comps] or any(
        img[0] == c[0] and img[1] == c[1] for c in comps
    )


def test_s3_has_no_2points(s3_example):
    with pytest.raises(PointCaseError, match="no 2-points"):
        construct_2point(s3_example)
    K = ExtensionDescriptor("subfield", s3_example.tower,
                            fixing=s3_example.tower.subgroup(["g"]), name="K")
    p = ClosedPointSpec(2, K, s3_example.tower.one(), s3_example.tower.one())
    with pytest.raises(PointCaseError):
        validate_point(s3_example, p)


def test_d6_2points(d6_index2):
    pts = construct_2point(d6_index2)
    fields = {p.ext.name for p in pts}
    assert fields == {"F^<g,f>", "K"}
    for p in pts:
        assert validate_point(d6_index2, p)
        assert general_position(d6_index2, p)
    # lambda = g(rho^-1) over K, per the existence recipe
    pk = [p for p in pts if p.ext.name == "K"][0]
    g = d6_index2.tower.element_named("g")
    assert pk.lam1 == apply(g, d6_index2.rho.inv())


def test_d6_no_2point_over_gh(d6_index2):
    tower = d6_index2.tower
    E = ExtensionDescriptor("subfield", tower, fixing=tower.subgroup(["g", "h"]),
                            name="Egh")
    p = ClosedPointSpec(2, E, tower.one(), tower.one())
    with pytest.raises(PointCaseError, match="F\\^<g,h>"):
        validate_point(d6_index2, p)


def test_construct_3point_all_types(s3_example, z6_index3, d6_index3):
    for spec in (s3_example, z6_index3, d6_index3):
        p = construct_3point(spec)
        assert validate_point(spec, p)
        assert general_position(spec, p)


def test_construct_3point_needs_index3(z6_hex, z6_index6):
    with pytest.raises(PointCaseError):
        construct_3point(z6_hex)
    with pytest.raises(PointCaseError):
        construct_3point(z6_index6)


def test_construct_2point_needs_index2(z6_index3, z6_index6):
    with pytest.raises(PointCaseError):
        construct_2point(z6_index3)
    with pytest.raises(PointCaseError):
        construct_2point(z6_index6)


def test_z6_3point_orbit_structure(z6_index3):
    # validated 3-points split over F: orbit size 3 under alpha_g o g and each
    # component fixed by alpha_h o h
    p = construct_3point(z6_index3)
    comps, perms = component_permutations(z6_index3, p)
    assert len(comps) == 3
    tower = z6_index3.tower
    g, h = tower.element_named("g"), tower.element_named("h")
    assert sorted(perms[g]) == [0, 1, 2] and perms[g] != (0, 1, 2)
    assert perms[h] == (0, 1, 2)
    for c in comps:
        img = twisted_apply(z6_index3, h, c)
        assert img[0] == c[0] and img[1] == c[1]


def test_twisted_orbit_generic_size(s3_example):
    tower = s3_example.tower
    t1 = tower.var("t1")
    orb = twisted_orbit(s3_example, (t1, t1 + 1),
                        [tower.element_named(w) for w in ("1", "g", "gg")])
    assert len(orb) == 3


def test_twisted_orbit_rejects_zero(s3_example):
    tower = s3_example.tower
    with pytest.raises(PointValidationError, match="torus chart"):
        twisted_orbit(s3_example, (tower.zero(), tower.one()), tower.elements)


def test_d6_proof_surface_orbit(d6_tower):
    # the rational-point argument's surface: rho0 = Norm_h(delta), xi0 = 1
    x1, x2, x3 = (d6_tower.var(v) for v in ("x1", "x2", "x3"))
    delta = x1 * x2 / (x3 * x3)
    h = d6_tower.element_named("h")
    g = d6_tower.element_named("g")
    rho0 = norm(h, delta)
    s0 = make_surface("D6", d6_tower, d6_tower.one(), rho0)
    orb = twisted_orbit(s0, (d6_tower.one(), d6_tower.one()), d6_tower.elements)
    assert len(orb) == 2
    expected = (norm(h, delta), norm(h, delta * apply(g, delta)))
    keys = {(c[0].key(), c[1].key()) for c in orb}
    assert (expected[0].key(), expected[1].key()) in keys


def test_invalid_s3_point_fails(s3_example):
    tower = s3_example.tower
    t1, t2, t3, s = (tower.var(v) for v in ("t1", "t2", "t3", "s"))
    E = ExtensionDescriptor("kummer-cubic", tower,
                            radicand=s * (t1 + 5) * (t2 + 5) * (t3 + 5))
    cg = composite_for(tower, E)
    bad = cg.comp.r()
    lam2 = bad * apply(cg.generators["g"], bad)
    p = ClosedPointSpec(3, E, bad, lam2)
    with pytest.raises(PointValidationError):
        validate_point(s3_example, p)


def test_general_position_failure_modes(s3_example):
    # lambda in F^gf fails general position for F-split 3-points
    tower = s3_example.tower
    t1, t2, t3, s = (tower.var(v) for v in ("t1", "t2", "t3", "s"))
    gf = tower.element_named("gf")
    f = tower.element_named("f")
    lam = t1 * t2  # fixed by gf = (12)
    assert apply(gf, lam) == lam
    E = ExtensionDescriptor("subfield", tower,
                            fixing=frozenset([tower.element_named("1")]),
                            name="F")
    lam2 = apply(f, lam.inv()) * s3_example.xi.inv()
    p = ClosedPointSpec(3, E, lam, lam2)
    if validate_point(s3_example, p):
        assert not general_position(s3_example, p)


def test_degree4_declared_flag(s3_example):
    p = ClosedPointSpec(4, None, None, None, general_position_declared=True)
    assert validate_point(s3_example, p)
    assert general_position(s3_example, p)
    q = ClosedPointSpec(4, None, None, None)
    with pytest.raises(PointValidationError):
        validate_point(s3_example, q)
