"""Abelian quotient singularities C^n/G: quotient fans, ages, junior elements, crepant divisors."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from . import config
from .birational import (
    KSign,
    RefinementMap,
    interior_walls,
    strict_transform,
    wall_analysis,
    WallReport,
)
from .errors import KequivError
from .lattice import coordinates, hermite_normal_form, inverse, primitivize
from .toric import DiscrepancyWitness, Fan, ToricPair, low_discrepancy_points, terminal_check

Element = tuple[Fraction, ...]


@dataclass(frozen=True)
class AbelianGroupData:
    """Diagonal group generated by diag(exp(2 pi i a_k / r)) for each (r, (a_1..a_n))."""

    n: int
    generators: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        gens = []
        for order, weights in self.generators:
            order = int(order)
            if order <= 0:
                raise KequivError("bad_group", "generator order must be positive")
            weights = tuple(int(w) % order for w in weights)
            if len(weights) != self.n:
                raise KequivError("bad_group", f"weight vector length {len(weights)} differs from dimension {self.n}")
            gens.append((order, weights))
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def cyclic(cls, order: int, weights: Sequence[int]) -> "AbelianGroupData":
        return cls(len(weights), ((order, tuple(weights)),))

    def generator_elements(self) -> list[Element]:
        return [tuple(Fraction(w, r) for w in ws) for r, ws in self.generators]

    def elements(self) -> list[Element]:
        """All group elements as exponent vectors in [0, 1)^n, sorted."""
        cap = config.group_order_cap()
        identity = tuple(Fraction(0) for _ in range(self.n))
        seen = {identity}
        queue = deque([identity])
        gens = self.generator_elements()
        while queue:
            g = queue.popleft()
            for h in gens:
                p = tuple((x + y) % 1 for x, y in zip(g, h))
                if p not in seen:
                    seen.add(p)
                    if len(seen) > cap:
                        raise KequivError("group_order_cap", "group order cap exceeded", cap=cap)
                    queue.append(p)
        return sorted(seen)

    def order(self) -> int:
        return len(self.elements())

    def in_sl(self) -> bool:
        return all(sum(ws) % r == 0 for r, ws in self.generators)


@dataclass(frozen=True)
class AgeEntry:
    element: Element
    age: Fraction


def age(element: Element) -> Fraction:
    return sum(element, Fraction(0))


def age_spectrum(group: AbelianGroupData) -> list[AgeEntry]:
    return [AgeEntry(g, age(g)) for g in group.elements()]


def junior_count(group: AbelianGroupData) -> int:
    return sum(1 for e in age_spectrum(group) if e.age == 1)


def overlattice_basis(group: AbelianGroupData) -> list[list[Fraction]]:
    """Rows form a basis of N' = Z^n + sum Z (1/r) w, canonical through Hermite normal form."""
    n = group.n
    big = 1
    for r, _ in group.generators:
        big = lcm(big, r)
    gens = [[big if i == j else 0 for j in range(n)] for i in range(n)]
    gens += [[(big // r) * w for w in ws] for r, ws in group.generators]
    hnf = hermite_normal_form(gens)
    return [[Fraction(x, big) for x in row] for row in hnf]


def to_overlattice(basis: Sequence[Sequence[Fraction]], v: Sequence) -> tuple[int, ...]:
    """Coordinates of an ambient vector v in N' with respect to ``basis``."""
    inv = inverse(basis)
    n = len(basis)
    out = [sum(Fraction(v[i]) * inv[i][j] for i in range(n)) for j in range(n)]
    if any(x.denominator != 1 for x in out):
        raise KequivError("not_in_lattice", "vector is not in the overlattice", vector=[str(x) for x in v])
    return tuple(int(x) for x in out)


def quotient_fan(group: AbelianGroupData) -> ToricPair:
    """The orthant cone in N', rays written in the Hermite basis of N'.

    A coordinate axis fixed by quasi-reflections of order m has e_i = m * (primitive
    ray) in N'; that ray receives the standard coefficient 1 - 1/m.
    """
    basis = overlattice_basis(group)
    rays, coeffs = [], {}
    for i in range(group.n):
        e = [1 if j == i else 0 for j in range(group.n)]
        v = to_overlattice(basis, e)
        m = 0
        for x in v:
            m = gcd(m, x)
        rays.append(primitivize(v))
        if m > 1:
            coeffs[i] = 1 - Fraction(1, m)
    fan = Fan.from_rays(rays, [tuple(range(group.n))], rank=group.n)
    return ToricPair(fan, coeffs, "Y")


def crepant_rays(pair: ToricPair) -> list[tuple[int, ...]]:
    return [w.point for w in low_discrepancy_points(pair, Fraction(1)) if w.log_discrepancy == 1]


@dataclass(frozen=True)
class MinimalModelReport:
    terminal: bool
    terminal_witnesses: tuple[DiscrepancyWitness, ...]
    contracted_walls: tuple[WallReport, ...]

    @property
    def violating_walls(self) -> tuple[WallReport, ...]:
        return tuple(w for w in self.contracted_walls if w.k_sign is KSign.K_NEGATIVE)

    @property
    def ok(self) -> bool:
        return self.terminal and not self.violating_walls

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "terminal": self.terminal,
            "terminal_witnesses": [
                {"point": list(w.point), "log_discrepancy": str(w.log_discrepancy)} for w in self.terminal_witnesses
            ],
            "contracted_walls": [w.to_dict() for w in self.contracted_walls],
            "violating_walls": [list(w.wall) for w in self.violating_walls],
        }


def _contracted(refinement: RefinementMap, wall: Sequence[int]) -> bool:
    """A wall's curve is contracted iff the wall lies in the interior of a target cone."""
    source, target = refinement.source, refinement.target
    rays = source.cone_rays(wall)
    for tcone in target.cones:
        trays = target.cone_rays(tcone)
        coords = [coordinates(trays, r) for r in rays]
        if any(c is None or any(x < 0 for x in c) for c in coords):
            continue
        support = {k for c in coords for k, x in enumerate(c) if x}
        return len(support) == len(tcone) and len(tcone) == target.rank
    return False


def minimal_model_check(pair: ToricPair, model: ToricPair, refinement: RefinementMap) -> MinimalModelReport:
    """Terminality of the model plus relative nefness of K over the pair's fan."""
    if refinement.source != model.fan or refinement.target != pair.fan:
        raise KequivError("not_a_refinement", "refinement must map the model's fan onto the pair's fan")
    problems = refinement.check()
    if problems:
        raise KequivError("not_a_refinement", "model does not refine the pair", violations=problems)
    terminal, witnesses = terminal_check(model)
    walls = []
    for wall in interior_walls(model.fan):
        if _contracted(refinement, wall):
            walls.append(wall_analysis(model, wall))
    return MinimalModelReport(terminal, tuple(witnesses), tuple(walls))


def model_pair(pair: ToricPair, refinement: RefinementMap) -> ToricPair:
    """The model with the strict transform of the boundary and no exceptional part."""
    return strict_transform(pair, refinement)
