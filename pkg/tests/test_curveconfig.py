"""Lattice enumeration, intersection graphs, and the induced Sigma' actions.

The expected (new group, kernel H) cells below are the full case analysis of
the new-splitting-field propositions and both link tables; the lattice route
must reproduce every cell.
"""

import itertools

import pytest

from dp6 import hexagon
from dp6.curveconfig import (
    NEW_HEX,
    SIGMA_PRIME,
    CurveConfig,
    config,
    hexagon_action,
    induced_sigma_prime_action,
    intersection,
    invariant_picard_rank,
    minus_one_classes,
    propagate_pair,
)
from dp6.sarkisov import classify_perm_group


def test_enumeration_counts():
    assert len(minus_one_classes(3)) == 6
    assert len(minus_one_classes(5)) == 16
    assert len(minus_one_classes(6)) == 27


@pytest.mark.parametrize("n,count,regular", [(3, 6, 2), (5, 16, 5), (6, 27, 10)])
def test_regularity(n, count, regular):
    cfg = CurveConfig.build(n)
    assert len(cfg.labels) == count
    assert set(cfg.neighbor_counts().values()) == {regular}


def test_intersection_values():
    cfg = config(3)
    e1, f1, f3 = cfg.labels["E1"], cfg.labels["F1"], cfg.labels["F3"]
    assert intersection(e1, e1) == -1
    assert intersection(e1, f1) == 0
    assert intersection(e1, f3) == 1  # e1 . l12
    for c in cfg.labels.values():
        assert c.self_intersection() == -1
        assert c.anticanonical_degree() == 1


def test_hexagon_cycle_matches_lattice():
    cfg = config(3)
    for i, lab in enumerate(hexagon.CYCLE):
        nxt = hexagon.CYCLE[(i + 1) % 6]
        assert cfg.adjacent(lab, nxt)


def test_3link_hexagon_corollary():
    cfg = config(6)
    ring = SIGMA_PRIME[3]
    for a in ring:
        assert sum(1 for b in ring if b != a and cfg.adjacent(a, b)) == 2
        for c in ("C1", "C2", "C3"):
            assert not cfg.adjacent(a, c)


def test_new_hexagon_relabelings_are_consistent():
    for d in (2, 3):
        cfg = config(3 + d)
        mapping = NEW_HEX[d]
        base = config(3)
        for a, b in itertools.combinations(hexagon.LABELS, 2):
            assert base.adjacent(a, b) == cfg.adjacent(mapping[a], mapping[b])


def test_hexagon_action_and_ranks(s3_tower, z6_tower):
    act = hexagon_action(s3_tower)
    assert act["g"]["E1"] == "E2" and act["g"]["F3"] == "F1"
    assert act["f"]["E1"] == "F1" and act["f"]["E2"] == "F3"
    actz = hexagon_action(z6_tower)
    assert actz["h"]["E1"] == "F1" and actz["h"]["E2"] == "F2"
    # invariant ranks: trivial -> 4; <g> -> 2; full Z6 -> 1
    assert invariant_picard_rank([]) == 4
    assert invariant_picard_rank([actz["g"]]) == 2
    assert invariant_picard_rank([actz["g"], actz["h"]]) == 1
    assert invariant_picard_rank([act["g"], act["f"]]) == 1


def test_inconsistent_action_is_an_error():
    # a reflection with a 3-cycle on components breaks incidence
    with pytest.raises(ValueError):
        induced_sigma_prime_action(
            2, [("bad", hexagon.ROT3, (0, 0))]
        )


# ---------------------------------------------------------------------------
# exhaustive case tables
# ---------------------------------------------------------------------------

ID2 = (0, 1)
SW2 = (1, 0)
ID3 = (0, 1, 2)
CY3 = (1, 2, 0)
TR3 = (0, 2, 1)

G = hexagon.ROT3
H = hexagon.CENTRAL
F = hexagon.REFLECT_F
S = hexagon.REFLECT_S
I6 = hexagon.IDENTITY


def _pairs(*items):
    return frozenset(items)


def _group_structure(act):
    perms = set()
    for hp, cp in act.group_pairs:
        _, newhex = propagate_pair(act.d, hp, cp)
        perms.add(newhex)
    return classify_perm_group(perms)


# every case of the 2-point and 3-point splitting-field propositions and of
# the two link tables: (label, d, generators, expected kernel, expected group)
CASES = [
    # --- d = 2, E inside F
    ("Z6 d2 E=K", 2,
     [("g", G, ID2), ("h", H, SW2)],
     _pairs((I6, ID2)), "Z6"),
    ("D6 d2 E=K (f swaps)", 2,
     [("g", G, ID2), ("h", H, SW2), ("f", F, SW2)],
     _pairs((I6, ID2)), "D6"),
    ("D6 d2 E=F^<g,f> (f fixes)", 2,
     [("g", G, ID2), ("h", H, SW2), ("f", F, ID2)],
     _pairs((I6, ID2)), "D6"),
    # --- d = 2, E cap F = k: H = <h>
    ("Z6 d2 independent", 2,
     [("g", G, ID2), ("h", H, ID2), ("t", I6, SW2)],
     _pairs((I6, ID2), (H, ID2)), "Z6"),
    ("D6 d2 independent", 2,
     [("g", G, ID2), ("h", H, ID2), ("f", F, ID2), ("t", I6, SW2)],
     _pairs((I6, ID2), (H, ID2)), "D6"),
    # --- d = 3, E inside F: H = {id}
    ("Z6 d3 E=L", 3,
     [("g", G, CY3), ("h", H, ID3)],
     _pairs((I6, ID3)), "Z6"),
    ("S3 d3 E=F", 3,
     [("g", G, CY3), ("f", F, TR3)],
     _pairs((I6, ID3)), "S3"),
    ("D6 d3 E=F^h", 3,
     [("g", G, CY3), ("h", H, ID3), ("f", F, TR3)],
     _pairs((I6, ID3)), "D6"),
    # --- d = 3, E cap F = k, Gal(E) = Z/3 (table row 1)
    ("Z6 d3 indep Z3", 3,
     [("g", G, ID3), ("h", H, ID3), ("w", I6, CY3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "Z6"),
    ("S3 d3 indep Z3", 3,
     [("g", G, ID3), ("f", F, ID3), ("w", I6, CY3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "Z6"),
    ("D6 d3 indep Z3", 3,
     [("g", G, ID3), ("h", H, ID3), ("f", F, ID3), ("w", I6, CY3)],
     _pairs(*[(p, ID3) for p in
              (I6, G, hexagon.compose(G, G), S, hexagon.compose(G, S),
               hexagon.compose(hexagon.compose(G, G), S))]), "Z6"),
    # --- d = 3, E cap F = k, Gal(E) = S3 (table row 2)
    ("Z6 d3 indep S3", 3,
     [("g", G, ID3), ("h", H, ID3), ("w", I6, CY3), ("t", I6, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "D6"),
    ("S3 d3 indep S3", 3,
     [("g", G, ID3), ("f", F, ID3), ("w", I6, CY3), ("t", I6, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "D6"),
    ("D6 d3 indep S3", 3,
     [("g", G, ID3), ("h", H, ID3), ("f", F, ID3), ("w", I6, CY3),
      ("t", I6, TR3)],
     _pairs(*[(p, ID3) for p in
              (I6, G, hexagon.compose(G, G), S, hexagon.compose(G, S),
               hexagon.compose(hexagon.compose(G, G), S))]), "D6"),
    # --- d = 3, quadratic intersection (the other table): Gal(E) = S3
    ("Z6 d3 quad", 3,
     [("g", G, ID3), ("w", I6, CY3), ("ht", H, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "S3"),
    ("S3 d3 quad", 3,
     [("g", G, ID3), ("w", I6, CY3), ("ft", F, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "S3"),
    ("D6 d3 quad u=h", 3,
     [("g", G, ID3), ("w", I6, CY3), ("h", H, ID3), ("ft", F, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "D6"),
    ("D6 d3 quad u=f", 3,
     [("g", G, ID3), ("w", I6, CY3), ("f", F, ID3), ("ht", H, TR3)],
     _pairs((I6, ID3), (G, ID3), (hexagon.compose(G, G), ID3)), "D6"),
    ("D6 d3 quad u=s", 3,
     [("g", G, ID3), ("w", I6, CY3), ("s", S, ID3), ("ht", H, TR3)],
     _pairs(*[(p, ID3) for p in
              (I6, G, hexagon.compose(G, G), S, hexagon.compose(G, S),
               hexagon.compose(hexagon.compose(G, G), S))]), "S3"),
]


@pytest.mark.parametrize("label,d,gens,kernel,group", CASES,
                         ids=[c[0] for c in CASES])
def test_case_tables(label, d, gens, kernel, group):
    act = induced_sigma_prime_action(d, gens)
    assert act.kernel_pairs == kernel, f"{label}: kernel mismatch"
    assert _group_structure(act) == group, f"{label}: group mismatch"


def test_actions_preserve_relations_and_adjacency():
    gens = [("g", G, CY3), ("h", H, ID3), ("f", F, TR3)]
    act = induced_sigma_prime_action(3, gens)
    cfg = act.config
    for key, perm in act.full_action.items():
        for a, b in itertools.combinations(sorted(cfg.labels), 2):
            assert cfg.adjacent(a, b) == cfg.adjacent(perm[a], perm[b])
    # the relabeled hexagon action also preserves adjacency
    for key, perm in act.new_hexagon_action.items():
        assert hexagon.preserves_adjacency(perm)


def test_dump_format(s3_tower):
    cfg = config(3)
    act = hexagon_action(s3_tower)
    text = cfg.dump(act)
    lines = text.strip().split("\n")
    assert "E1 -- F2" in lines
    assert "# action g: E1 -> E2" in lines
