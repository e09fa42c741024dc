"""Simplicial fans, boundary-decorated toric pairs and their log discrepancy function.

For a pair (X, B) with B = sum b_i D_i the log discrepancy function ``phi`` is
the function, linear on each cone, with phi(v_i) = 1 - b_i on the ray
generators.  The divisor attached to a primitive lattice point v has log
discrepancy phi(v); terminal/klt are read off from its values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import config
from .errors import KequivError
from .lattice import (
    Vector,
    box_points,
    contains,
    coordinates,
    cone_intersection_rays,
    is_independent,
    is_primitive,
    smith_normal_form,
)


@dataclass(frozen=True)
class Fan:
    """Rays (primitive, pairwise distinct) plus maximal cones as sorted index tuples."""

    rank: int
    rays: tuple[Vector, ...]
    cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "cones", tuple(sorted({tuple(sorted(set(c))) for c in self.cones})))

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], cones: Iterable[Iterable[int]], rank: int | None = None) -> "Fan":
        rays = [tuple(r) for r in rays]
        if rank is None:
            rank = len(rays[0]) if rays else 0
        return cls(rank, tuple(rays), tuple(tuple(c) for c in cones))

    def cone_rays(self, cone: Sequence[int]) -> list[Vector]:
        return [self.rays[i] for i in cone]

    def ray_index(self, v: Sequence[int]) -> int | None:
        return self._index.get(tuple(v))

    @cached_property
    def _index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.rays)}

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Every cone of the fan (faces of maximal cones, origin included)."""
        out = set()
        for c in self.cones:
            for k in range(len(c) + 1):
                out.update(combinations(c, k))
        return tuple(sorted(out, key=lambda f: (len(f), f)))

    @cached_property
    def dimension(self) -> int:
        return max((len(c) for c in self.cones), default=0)

    def is_pure(self) -> bool:
        return all(len(c) == self.dimension for c in self.cones)

    def cones_containing(self, face: Iterable[int]) -> list[int]:
        face = set(face)
        return [i for i, c in enumerate(self.cones) if face <= set(c)]

    def locate(self, v: Sequence) -> tuple[int, tuple[Fraction, ...]] | None:
        """Index of the first maximal cone containing v and v's coefficients there."""
        for i, c in enumerate(self.cones):
            coeffs = coordinates(self.cone_rays(c), v)
            if coeffs is not None and all(x >= 0 for x in coeffs):
                return i, coeffs
        return None

    def to_vectors(self) -> tuple[frozenset, ...]:
        """Cones as sets of ray vectors: a labelling-free description for comparisons."""
        return tuple(sorted((frozenset(self.cone_rays(c)) for c in self.cones), key=lambda s: sorted(s)))

    def same_as(self, other: "Fan") -> bool:
        return self.rank == other.rank and set(self.to_vectors()) == set(other.to_vectors())


@dataclass(frozen=True)
class ToricPair:
    """A fan with rational boundary coefficients b < 1 (absent key means b = 0).

    The keys of ``coefficients`` form the boundary index set used for strata,
    so an explicit ``0`` is not the same bookkeeping as an absent key.
    """

    fan: Fan
    coefficients: Mapping[int, Fraction] = field(default_factory=dict, hash=False)
    label: str = ""

    def __post_init__(self):
        coeffs = {int(k): Fraction(v) for k, v in dict(self.coefficients).items()}
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))

    def b(self, i: int) -> Fraction:
        return self.coefficients.get(i, Fraction(0))

    def weight(self, i: int) -> Fraction:
        """phi on the i-th ray generator."""
        return 1 - self.b(i)

    @property
    def boundary(self) -> frozenset[int]:
        return frozenset(self.coefficients)

    def with_label(self, label: str) -> "ToricPair":
        return ToricPair(self.fan, self.coefficients, label)


@dataclass(frozen=True)
class DiscrepancyWitness:
    point: Vector
    log_discrepancy: Fraction

    @property
    def discrepancy(self) -> Fraction:
        return self.log_discrepancy - 1


# ---------------------------------------------------------------------------
# validation


def validate_fan(fan: Fan) -> list[str]:
    out = []
    n = fan.rank
    for i, r in enumerate(fan.rays):
        if len(r) != n:
            out.append(f"ray {i}: length {len(r)} differs from rank {n}")
        elif not any(r):
            out.append(f"ray {i}: zero vector")
        elif not is_primitive(r):
            out.append(f"ray {i}: not primitive")
    if len(set(fan.rays)) != len(fan.rays):
        out.append("rays are not pairwise distinct")
    if out:
        return out
    used = set()
    for c in fan.cones:
        if any(i < 0 or i >= len(fan.rays) for i in c):
            out.append(f"cone {list(c)}: ray index out of range")
            continue
        used.update(c)
        if not is_independent(fan.cone_rays(c)):
            out.append(f"cone {list(c)}: non-simplicial")
    for i in range(len(fan.rays)):
        if i not in used:
            out.append(f"ray {i}: not in any maximal cone")
    if out:
        return out
    for a, b in combinations(fan.cones, 2):
        if set(a) <= set(b) or set(b) <= set(a):
            out.append(f"cones {list(a)} and {list(b)}: cone not maximal")
            continue
        meet = cone_intersection_rays(fan.cone_rays(a), fan.cone_rays(b))
        shared = sorted(fan.rays[i] for i in set(a) & set(b))
        if meet != shared:
            out.append(f"cones {list(a)} and {list(b)}: fan condition violated")
    return out


def validate_pair(pair: ToricPair) -> list[str]:
    out = validate_fan(pair.fan)
    for k, b in pair.coefficients.items():
        if k < 0 or k >= len(pair.fan.rays):
            out.append(f"coefficient key {k}: not a valid ray index")
        elif b >= 1:
            out.append(f"ray {k}: coefficient not < 1 ({b})")
    return out


def require_valid(pair: ToricPair) -> None:
    problems = validate_pair(pair)
    if problems:
        raise KequivError("invalid_pair", "invalid toric pair", violations=problems)


# ---------------------------------------------------------------------------
# predicates


def is_smooth(fan: Fan) -> tuple[bool, list[tuple[int, ...]]]:
    bad = []
    for c in fan.cones:
        diag, _, _ = smith_normal_form(fan.cone_rays(c), fan.rank) if c else ([], None, None)
        if any(d != 1 for d in diag):
            bad.append(c)
    return not bad, bad


def evaluate_phi(pair: ToricPair, v: Sequence) -> Fraction:
    hit = pair.fan.locate(v)
    if hit is None:
        raise KequivError("outside_support", "point not in fan support", point=list(v))
    i, coeffs = hit
    cone = pair.fan.cones[i]
    return sum((c * pair.weight(j) for c, j in zip(coeffs, cone)), Fraction(0))


def klt_check(pair: ToricPair) -> bool:
    # simplicial and b < 1 make phi positive off the origin; checked on generators
    return all(pair.weight(i) > 0 for i in range(len(pair.fan.rays)))


def is_standard(b: Fraction) -> bool:
    b = Fraction(b)
    if b >= 1:
        return False
    m = 1 / (1 - b)
    return m.denominator == 1 and m >= 1


def standard_coefficients_check(pair: ToricPair) -> tuple[bool, list[int]]:
    bad = [i for i, b in pair.coefficients.items() if b != 0 and not is_standard(b)]
    return not bad, bad


def standard_multiplier(b: Fraction) -> int:
    """The n with b = 1 - 1/n."""
    if not is_standard(b):
        raise KequivError("non_standard", f"coefficient {b} is not of the form 1 - 1/n")
    return int(1 / (1 - Fraction(b)))


def low_discrepancy_points(pair: ToricPair, bound: Fraction) -> list[DiscrepancyWitness]:
    """Primitive non-ray lattice points of the support with phi <= bound, sorted.

    Every lattice point of a simplicial cone is a box point plus a nonnegative
    integer combination of the generators; phi is positive on generators, so
    the search below is finite.
    """
    fan = pair.fan
    if not klt_check(pair):
        raise KequivError("not_klt", "phi must be positive on every ray for enumeration")
    cap = config.enumeration_cap()
    rays = set(fan.rays)
    found: dict[Vector, Fraction] = {}
    for cone in fan.cones:
        gens = fan.cone_rays(cone)
        weights = [pair.weight(i) for i in cone]
        examined = 0
        for point, coeffs in box_points(gens):
            base = sum((c * w for c, w in zip(coeffs, weights)), Fraction(0))
            if base > bound:
                continue
            stack = [(0, list(point), base)]
            while stack:
                start, p, val = stack.pop()
                examined += 1
                if examined > cap:
                    raise KequivError("enumeration_cap", "lattice point enumeration cap exceeded", cap=cap)
                tp = tuple(p)
                if any(tp) and tp not in rays and is_primitive(tp):
                    found[tp] = val
                for j in range(start, len(gens)):
                    nv = val + weights[j]
                    if nv <= bound:
                        stack.append((j, [a + b for a, b in zip(p, gens[j])], nv))
    return [DiscrepancyWitness(p, found[p]) for p in sorted(found)]


def terminal_check(pair: ToricPair) -> tuple[bool, list[DiscrepancyWitness]]:
    witnesses = low_discrepancy_points(pair, Fraction(1))
    return not witnesses, witnesses


def lattice_points_in_box(pair: ToricPair, bound: Fraction) -> list[DiscrepancyWitness]:
    """Brute-force twin of ``low_discrepancy_points`` by bounding-box scan."""
    from itertools import product

    fan = pair.fan
    n = fan.rank
    found = {}
    rays = set(fan.rays)
    for cone in fan.cones:
        gens = fan.cone_rays(cone)
        corners = [tuple(0 for _ in range(n))]
        for i, g in zip(cone, gens):
            corners.append(tuple(Fraction(x) * bound / pair.weight(i) for x in g))
        lo = [min(c[j] for c in corners) for j in range(n)]
        hi = [max(c[j] for c in corners) for j in range(n)]
        ranges = [range(int(_floor(l)) - 1, int(_ceil(h)) + 2) for l, h in zip(lo, hi)]
        for p in product(*ranges):
            if not any(p) or p in rays or not is_primitive(p):
                continue
            if contains(gens, p):
                val = evaluate_phi(pair, p)
                if val <= bound:
                    found[p] = val
    return [DiscrepancyWitness(p, found[p]) for p in sorted(found)]


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def stack_rays(pair: ToricPair) -> list[Vector]:
    """Generators of the associated smooth stack: ray i scaled by n_i where b_i = 1 - 1/n_i."""
    out = []
    for i, r in enumerate(pair.fan.rays):
        m = standard_multiplier(pair.b(i))
        out.append(tuple(m * x for x in r))
    return out


def phi_on_cone(pair: ToricPair, cone: Sequence[int], v: Sequence) -> Fraction | None:
    coeffs = coordinates(pair.fan.cone_rays(cone), v)
    if coeffs is None or any(c < 0 for c in coeffs):
        return None
    return sum((c * pair.weight(i) for c, i in zip(coeffs, cone)), Fraction(0))


