"""Scenario files: JSON descriptions of towers, surfaces, points, and commands.

Polynomials are written in infix notation over the declared variables, with
`w` reserved for the primitive cube root of unity and `r` for the radical of
the extension in scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ._ratfunc import QOmega, unit_from_str
from .fieldtower import (
    CompositeGroup,
    ExtensionDescriptor,
    FactRegistry,
    FieldElement,
    GaloisTower,
    VarAutomorphism,
    apply,
)
from .points import ClosedPointSpec, composite_for
from .surface import SurfaceSpec, make_surface
from . import hexagon


class ScenarioError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------

class _Tokens:
    def __init__(self, text):
        self.toks = self._lex(text)
        self.pos = 0

    @staticmethod
    def _lex(text):
        out = []
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                out.append(("int", int(text[i:j])))
                i = j
            elif c.isalpha() or c == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                out.append(("name", text[i:j]))
                i = j
            elif text.startswith("**", i):
                out.append(("op", "^"))
                i += 2
            elif c in "+-*/^()":
                out.append(("op", c))
                i += 1
            else:
                raise ScenarioError(f"unexpected character {c!r} in expression")
        return out

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok


def parse_element(text, tower: GaloisTower, composite=None):
    """Parse an infix expression into a field (or radical-field) element."""
    toks = _Tokens(str(text))
    value = _parse_sum(toks, tower, composite)
    if toks.peek() != (None, None):
        raise ScenarioError(f"trailing input in expression {text!r}")
    return value


def _parse_sum(toks, tower, comp):
    value = _parse_product(toks, tower, comp)
    while toks.peek() == ("op", "+") or toks.peek() == ("op", "-"):
        _, op = toks.next()
        rhs = _parse_product(toks, tower, comp)
        value = value + rhs if op == "+" else value - rhs
    return value


def _parse_product(toks, tower, comp):
    value = _parse_power(toks, tower, comp)
    while toks.peek() in (("op", "*"), ("op", "/")):
        _, op = toks.next()
        rhs = _parse_power(toks, tower, comp)
        value = value * rhs if op == "*" else value / rhs
    return value


def _parse_power(toks, tower, comp):
    base = _parse_atom(toks, tower, comp)
    if toks.peek() == ("op", "^"):
        toks.next()
        sign = 1
        if toks.peek() == ("op", "-"):
            toks.next()
            sign = -1
        kind, val = toks.next()
        if kind != "int":
            raise ScenarioError("exponent must be an integer")
        return base ** (sign * val)
    return base


def _parse_atom(toks, tower, comp):
    kind, val = toks.next()
    if kind == "op" and val == "-":
        return -_parse_atom(toks, tower, comp)
    if kind == "op" and val == "(":
        inner = _parse_sum(toks, tower, comp)
        if toks.next() != ("op", ")"):
            raise ScenarioError("missing closing parenthesis")
        return inner
    if kind == "int":
        return tower.const(QOmega(val))
    if kind == "name":
        if val == "w":
            return tower.const(QOmega.omega())
        if val == "r":
            if comp is None:
                raise ScenarioError("`r` used outside a radical extension")
            return comp.r()
        if val in tower.variables:
            return tower.var(val)
        raise ScenarioError(f"unknown symbol {val!r}")
    raise ScenarioError(f"unexpected token {val!r}")


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    name: str
    towers: dict
    extensions: dict
    surfaces: dict
    points: dict
    registry: FactRegistry
    commands: list
    raw: dict = field(default_factory=dict)


def _build_tower(name, node):
    variables = node["variables"]
    gens = {}
    for gname, desc in node["generators"].items():
        perm = list(range(len(variables)))
        for a, b in desc.get("perm", {}).items():
            perm[variables.index(a)] = variables.index(b)
        scal = [QOmega.one()] * len(variables)
        for a, u in desc.get("scale", {}).items():
            scal[variables.index(a)] = unit_from_str(u)
        gens[gname] = VarAutomorphism(perm, scal)
    embedding = None
    if "embedding" in node:
        named = {"rot3": hexagon.ROT3, "central": hexagon.CENTRAL,
                 "reflect-f": hexagon.REFLECT_F, "reflect-s": hexagon.REFLECT_S}
        embedding = {g: named[v] for g, v in node["embedding"].items()}
    return GaloisTower(variables, gens, embedding, name=name)


def _build_extension(name, node, towers):
    tower = towers[node["tower"]]
    kind = node["kind"]
    if kind == "subfield":
        fixing = tower.subgroup(node["fixing"])
        return ExtensionDescriptor("subfield", tower, fixing=fixing, name=name)
    radicand = parse_element(node["radicand"], tower)
    return ExtensionDescriptor(kind, tower, radicand=radicand, name=name)


def _build_point(name, node, scenario):
    spec = scenario.surfaces[node["surface"]]
    degree = int(node["degree"])
    if degree == 4:
        return ClosedPointSpec(4, None, None, None, name=name,
                               general_position_declared=bool(
                                   node.get("general_position", False)))
    ext = scenario.extensions[node["extension"]]
    cg = composite_for(spec.tower, ext)
    comp = cg.comp
    lam1 = parse_element(node["lambda1"], spec.tower, comp)
    if "lambda2" in node:
        lam2 = parse_element(node["lambda2"], spec.tower, comp)
    else:
        rule = node.get("lambda2_rule", "g-orbit")
        gel = cg.generators["g"]
        if rule == "g-orbit":
            lam2 = lam1 * apply(gel, lam1)
        elif rule == "f-form":
            f = cg.generators["f"]
            xi = spec.xi if comp is None else comp.embed(spec.xi)
            lam2 = apply(f, lam1 ** -1) * xi ** -1
        else:
            raise ScenarioError(f"unknown lambda2 rule {rule!r}")
    return ClosedPointSpec(degree, ext, lam1, lam2, name=name)


def load_scenario(path_or_dict):
    if isinstance(path_or_dict, dict):
        raw = path_or_dict
    else:
        with open(path_or_dict, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    registry = FactRegistry()
    towers = {}
    for name in sorted(raw.get("towers", {})):
        towers[name] = _build_tower(name, raw["towers"][name])
    extensions = {}
    scen = Scenario(
        name=raw.get("name", "scenario"),
        towers=towers,
        extensions=extensions,
        surfaces={},
        points={},
        registry=registry,
        commands=list(raw.get("commands", [])),
        raw=raw,
    )
    for name in sorted(raw.get("extensions", {})):
        extensions[name] = _build_extension(name, raw["extensions"][name], towers)
    for fact in raw.get("facts", []):
        tower = towers[fact["tower"]]
        elem = parse_element(fact["element"], tower)
        gen = tower.element_named(fact["generator"])
        if "certificate" in fact:
            from .fieldtower import norm_class

            cert = parse_element(fact["certificate"], tower)
            norm_class(elem, gen, cert=cert, registry=registry)
        else:
            registry.assume(elem, gen, fact["verdict"], note=fact.get("note", ""))
    for name in sorted(raw.get("surfaces", {})):
        node = raw["surfaces"][name]
        tower = towers[node["tower"]]
        xi = parse_element(node["xi"], tower)
        rho = parse_element(node["rho"], tower) if node.get("rho") is not None \
            else None
        scen.surfaces[name] = make_surface(
            node["gtype"], tower, xi, rho, registry, name=name
        )
    for name in sorted(raw.get("points", {})):
        scen.points[name] = _build_point(name, raw["points"][name], scen)
    return scen
