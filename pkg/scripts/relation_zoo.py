#!/usr/bin/env python3
"""Instantiate the generator relations and watch the quotient map kill them.

Runs the six-term elementary relation between 2-links on a Z6 surface of
index 2 (xi = 1, rho = x1/x2) and prints the image of the word with and
without the Geiser pairings, then the inverse-pair relations on the index-3
example graph.

Usage: python scripts/relation_zoo.py
"""

import sys

from dp6._ratfunc import QOmega
from dp6.birgroup import (
    check_relation,
    explore_graph,
    hexagonal_graph,
    psi_image,
    word_to_generators,
)
from dp6.fieldtower import (
    ExtensionDescriptor,
    GaloisTower,
    VarAutomorphism,
    apply,
)
from dp6.points import ClosedPointSpec
from dp6.surface import make_surface


def main():
    one = QOmega.one()
    g = VarAutomorphism([1, 2, 0, 3], [one] * 4)
    h = VarAutomorphism([0, 1, 2, 3], [one] * 3 + [-one])
    tower = GaloisTower(["x1", "x2", "x3", "y"], {"g": g, "h": h}, name="FZ")
    x1, x2, x3 = (tower.var(v) for v in ("x1", "x2", "x3"))
    spec = make_surface("Z6", tower, tower.one(), x1 / x2, name="SZ")

    K = ExtensionDescriptor("subfield", tower, fixing=tower.subgroup(["g"]),
                            name="K")
    p = ClosedPointSpec(2, K, tower.one(), tower.one(), name="p")
    lam = x1 * x2 / (x3 * x3)
    q = ClosedPointSpec(2, K, lam, lam * apply(tower.element_named("g"), lam),
                        name="q")

    graph, recs = hexagonal_graph(spec, p, q)
    word = word_to_generators(graph, recs)
    print("six-term relation word:", word)
    print("data-level identity:", check_relation(
        graph, word, relation_meta=("hexagonal", recs)))
    print("psi image (with pairings):", psi_image(graph, word))

    unpaired = explore_graph(spec, [p, q], depth=1)
    for rec in recs:
        unpaired.add_edge(rec)
    print("psi image (pairings withheld):",
          psi_image(unpaired, word_to_generators(unpaired, recs)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
