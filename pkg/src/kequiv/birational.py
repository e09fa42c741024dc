"""Refinements, pullbacks of K + B, K-comparison, blow-ups, resolutions and flips."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from . import config
from .errors import KequivError
from .lattice import (
    Vector,
    box_points,
    circuit_relation,
    combine,
    cone_intersection_rays,
    coordinates,
    determinant,
    kernel,
    matrix_rank,
    multiplicity,
    primitive_direction,
    rref,
)
from .toric import Fan, ToricPair, evaluate_phi, is_smooth, phi_on_cone, validate_fan


@dataclass(frozen=True)
class RefinementMap:
    """A toric birational morphism source -> target given by a subdivision.

    ``assignment[i]`` is the index of a target maximal cone containing the
    i-th source maximal cone.
    """

    source: Fan
    target: Fan
    assignment: tuple[int, ...]

    def check(self) -> list[str]:
        out = []
        if len(self.assignment) != len(self.source.cones):
            return ["assignment length differs from the number of source cones"]
        per_target: dict[int, Fraction] = {}
        for i, (cone, t) in enumerate(zip(self.source.cones, self.assignment)):
            rays = self.source.cone_rays(cone)
            trays = self.target.cone_rays(self.target.cones[t])
            coords = [coordinates(trays, r) for r in rays]
            if any(c is None or any(x < 0 for x in c) for c in coords):
                out.append(f"source cone {list(cone)} is not inside target cone {t}")
                continue
            per_target[t] = per_target.get(t, Fraction(0)) + _relative_volume(coords)
        for t in range(len(self.target.cones)):
            if per_target.get(t, Fraction(0)) != 1:
                out.append(f"target cone {t}: covered volume {per_target.get(t, 0)} != 1")
        return out


def _relative_volume(coords: Sequence[Sequence[Fraction]]) -> Fraction:
    """Volume of a subcone cut by the hyperplane where the target's coordinates sum to 1,
    normalized so that the target cone itself has volume 1."""
    if not coords:
        return Fraction(1)
    height = Fraction(1)
    for c in coords:
        height *= sum(c)
    return abs(determinant(coords)) / height


def identity_map(fan: Fan) -> RefinementMap:
    return RefinementMap(fan, fan, tuple(range(len(fan.cones))))


def assign_by_containment(source: Fan, target: Fan) -> RefinementMap:
    assignment = []
    for cone in source.cones:
        rays = source.cone_rays(cone)
        for t, tcone in enumerate(target.cones):
            trays = target.cone_rays(tcone)
            if all(_inside(trays, r) for r in rays):
                assignment.append(t)
                break
        else:
            raise KequivError("not_a_refinement", "source cone is not contained in any target cone", cone=list(cone))
    return RefinementMap(source, target, tuple(assignment))


def _inside(rays, v) -> bool:
    c = coordinates(rays, v)
    return c is not None and all(x >= 0 for x in c)


# ---------------------------------------------------------------------------
# triangulating intersections


def _span_coordinates(rays: tuple[Vector, ...]):
    """Coordinates of every ray in a basis chosen among the rays."""
    n = len(rays[0])
    _, piv = rref([[r[j] for r in rays] for j in range(n)], len(rays))
    basis = [rays[i] for i in piv]
    return [coordinates(basis, r) for r in rays], len(basis)


def _facets(rays: tuple[Vector, ...]) -> list[frozenset]:
    coords, d = _span_coordinates(rays)
    found = set()
    for subset in combinations(range(len(rays)), d - 1):
        sub = [coords[i] for i in subset]
        if matrix_rank(sub) != d - 1:
            continue
        normal = kernel(sub, d)[0] if d > 1 else [Fraction(1)]
        vals = [sum(a * b for a, b in zip(normal, c)) for c in coords]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            found.add(frozenset(r for r, v in zip(rays, vals) if v == 0))
    return sorted(found, key=lambda f: sorted(f))


@lru_cache(maxsize=4096)
def pulling_triangulation(rays: frozenset) -> tuple[tuple[Vector, ...], ...]:
    """Pulling triangulation of cone(rays) using no new rays.

    Rays are pulled in lexicographic order, so triangulations of cones sharing
    a face restrict to the same triangulation of that face.
    """
    ordered = tuple(sorted(rays))
    d = matrix_rank(ordered)
    if len(ordered) == d:
        return (ordered,)
    apex = ordered[0]
    out = []
    for facet in _facets(ordered):
        if apex in facet:
            continue
        for simplex in pulling_triangulation(facet):
            out.append(tuple(sorted(simplex + (apex,))))
    return tuple(sorted(out))


def common_refinement(fan_a: Fan, fan_b: Fan) -> tuple[Fan, RefinementMap, RefinementMap]:
    if fan_a.rank != fan_b.rank:
        raise KequivError("rank_mismatch", "fans live in lattices of different rank")
    if not (fan_a.is_pure() and fan_b.is_pure()) or fan_a.dimension != fan_b.dimension:
        raise KequivError("unequal_support", "fans are not birational models of the same support")
    d = fan_a.dimension
    pieces = []  # (simplex, i, j)
    cover_a = [Fraction(0)] * len(fan_a.cones)
    cover_b = [Fraction(0)] * len(fan_b.cones)
    for i, ca in enumerate(fan_a.cones):
        ra = fan_a.cone_rays(ca)
        for j, cb in enumerate(fan_b.cones):
            rb = fan_b.cone_rays(cb)
            meet = cone_intersection_rays(ra, rb)
            if len(meet) < d or matrix_rank(meet) < d:
                continue
            for simplex in pulling_triangulation(frozenset(meet)):
                pieces.append((simplex, i, j))
                cover_a[i] += _relative_volume([coordinates(ra, r) for r in simplex])
                cover_b[j] += _relative_volume([coordinates(rb, r) for r in simplex])
    if any(c != 1 for c in cover_a) or any(c != 1 for c in cover_b):
        raise KequivError("unequal_support", "fans are not birational models of the same support")
    rays = sorted({r for simplex, _, _ in pieces for r in simplex})
    index = {r: k for k, r in enumerate(rays)}
    by_cone = {}
    for simplex, i, j in pieces:
        by_cone.setdefault(tuple(sorted(index[r] for r in simplex)), (i, j))
    fan = Fan(fan_a.rank, tuple(rays), tuple(by_cone))
    map_a = RefinementMap(fan, fan_a, tuple(by_cone[c][0] for c in fan.cones))
    map_b = RefinementMap(fan, fan_b, tuple(by_cone[c][1] for c in fan.cones))
    return fan, map_a, map_b


# ---------------------------------------------------------------------------
# pullback and comparison


def pullback_boundary(pair: ToricPair, refinement: RefinementMap) -> ToricPair:
    """The pair (Y, B_Y) with f^*(K + B) = K_Y + B_Y; every coefficient is listed."""
    if refinement.target != pair.fan:
        raise KequivError("precondition", "refinement target is not the pair's fan")
    source = refinement.source
    coeffs = {}
    for cone, t in zip(source.cones, refinement.assignment):
        tcone = pair.fan.cones[t]
        for i in cone:
            if i not in coeffs:
                val = phi_on_cone(pair, tcone, source.rays[i])
                if val is None:
                    raise KequivError("precondition", "source ray outside its assigned target cone")
                coeffs[i] = 1 - val
    return ToricPair(source, coeffs, pair.label)


class Verdict(str, enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    FIRST_GE = "FIRST_GE"
    FIRST_LE = "FIRST_LE"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class KComparison:
    """``differences`` holds phi_B(v) - phi_A(v) for every ray v of the refinement.

    FIRST_GE means g^*(K_A + B_A) - h^*(K_B + B_B) is effective, i.e. all
    differences are >= 0.
    """

    verdict: Verdict
    refinement: Fan
    differences: tuple[tuple[Vector, Fraction], ...]

    def difference_at(self, v: Sequence[int]) -> Fraction:
        return dict(self.differences)[tuple(v)]


def classify(differences: Sequence[Fraction]) -> Verdict:
    if all(d == 0 for d in differences):
        return Verdict.EQUIVALENT
    if all(d >= 0 for d in differences):
        return Verdict.FIRST_GE
    if all(d <= 0 for d in differences):
        return Verdict.FIRST_LE
    return Verdict.INCOMPARABLE


def k_compare(pair_a: ToricPair, pair_b: ToricPair) -> KComparison:
    fan, map_a, map_b = common_refinement(pair_a.fan, pair_b.fan)
    phi_a = _phi_on_rays(pair_a, map_a)
    phi_b = _phi_on_rays(pair_b, map_b)
    diffs = tuple((fan.rays[i], phi_b[i] - phi_a[i]) for i in range(len(fan.rays)))
    return KComparison(classify([d for _, d in diffs]), fan, diffs)


def _phi_on_rays(pair: ToricPair, refinement: RefinementMap) -> dict[int, Fraction]:
    pulled = pullback_boundary(pair, refinement)
    return {i: 1 - b for i, b in pulled.coefficients.items()}


# ---------------------------------------------------------------------------
# subdivisions


def _stellar_fan(fan: Fan, point: Sequence) -> tuple[Fan, tuple[int, ...]]:
    """Star subdivision of ``fan`` at the ray through ``point``; the new ray is appended."""
    v = primitive_direction(point)
    if fan.ray_index(v) is not None:
        return fan, tuple(range(len(fan.cones)))
    hit = fan.locate(v)
    if hit is None:
        raise KequivError("outside_support", "point not in fan support", point=list(point))
    i, coeffs = hit
    tau = {j for j, c in zip(fan.cones[i], coeffs) if c > 0}
    new = len(fan.rays)
    cones, parents = [], []
    for k, cone in enumerate(fan.cones):
        if tau <= set(cone):
            for j in sorted(tau):
                cones.append(tuple(sorted((set(cone) - {j}) | {new})))
                parents.append(k)
        else:
            cones.append(cone)
            parents.append(k)
    out = Fan(fan.rank, fan.rays + (v,), tuple(cones))
    lookup = dict(zip((tuple(sorted(c)) for c in cones), parents))
    return out, tuple(lookup[c] for c in out.cones)


def stellar_subdivision(pair: ToricPair, point: Sequence) -> tuple[ToricPair, RefinementMap]:
    fan, assignment = _stellar_fan(pair.fan, point)
    ref = RefinementMap(fan, pair.fan, assignment)
    return pullback_boundary(pair, ref), ref


def _center_cone(fan: Fan, center: Sequence[int]) -> tuple[int, ...]:
    center = tuple(sorted(set(int(i) for i in center)))
    if not center or any(i < 0 or i >= len(fan.rays) for i in center) or not fan.cones_containing(center):
        raise KequivError("not_a_stratum", "center is not a stratum", center=list(center))
    return center


def star_subdivision(pair: ToricPair, center: Sequence[int]) -> tuple[ToricPair, RefinementMap]:
    """Blow up the orbit closure of the cone spanned by ``center``.

    The exceptional ray is the primitive vector on sum of the center's
    generators; on a smooth star its coefficient is sum(b_i) - c + 1.
    """
    center = _center_cone(pair.fan, center)
    point = combine([1] * len(center), pair.fan.cone_rays(center))
    return stellar_subdivision(pair, point)


def permissible_check(pair: ToricPair, center: Sequence[int]) -> bool:
    try:
        center = _center_cone(pair.fan, center)
    except KequivError:
        return False
    fan = pair.fan
    return all(multiplicity(fan.cone_rays(fan.cones[k])) == 1 for k in fan.cones_containing(center))


STRATEGIES = ("min-phi", "max-mult")


def resolve(pair: ToricPair, strategy: str = "min-phi", max_steps: int | None = None) -> tuple[ToricPair, RefinementMap]:
    """Star-subdivide at box points until every cone is unimodular.

    ``min-phi`` inserts the box point of least log discrepancy over all
    singular cones; ``max-mult`` inserts the lexicographically least box
    point of a cone of largest multiplicity. Ties break lexicographically.
    """
    if strategy not in STRATEGIES:
        raise KequivError("bad_strategy", f"unknown resolution strategy {strategy!r}")
    cap = config.resolve_step_cap() if max_steps is None else max_steps
    fan = pair.fan
    steps = 0
    while True:
        smooth, bad = is_smooth(fan)
        if smooth:
            break
        if steps >= cap:
            raise KequivError("iteration_cap", "resolution iteration cap exceeded", cap=cap)
        if strategy == "min-phi":
            best = None
            for cone in bad:
                for p, _ in box_points(fan.cone_rays(cone)):
                    if any(p):
                        p = primitive_direction(p)
                        key = (evaluate_phi(pair, p), p)
                        if best is None or key < best:
                            best = key
            point = best[1]
        else:
            cone = max(bad, key=lambda c: (multiplicity(fan.cone_rays(c)), [tuple(-x for x in r) for r in sorted(fan.cone_rays(c))]))
            point = min(primitive_direction(p) for p, _ in box_points(fan.cone_rays(cone)) if any(p))
        fan, _ = _stellar_fan(fan, point)
        steps += 1
    if steps == 0:
        ref = identity_map(pair.fan)
    else:
        ref = assign_by_containment(fan, pair.fan)
    return pullback_boundary(pair, ref), ref


def strict_transform(pair: ToricPair, refinement: RefinementMap) -> ToricPair:
    """Carry coefficients to surviving rays; exceptional rays get no coefficient."""
    coeffs = {}
    for k, b in pair.coefficients.items():
        j = refinement.source.ray_index(pair.fan.rays[k])
        if j is not None:
            coeffs[j] = b
    return ToricPair(refinement.source, coeffs, pair.label)


# ---------------------------------------------------------------------------
# walls


class Contraction(str, enum.Enum):
    FIBER_TYPE = "FIBER_TYPE"
    DIVISORIAL = "DIVISORIAL"
    FLIPPING = "FLIPPING"


class KSign(str, enum.Enum):
    K_NEGATIVE = "K_NEGATIVE"
    K_TRIVIAL = "K_TRIVIAL"
    K_POSITIVE = "K_POSITIVE"


@dataclass(frozen=True)
class WallReport:
    """``relation`` is aligned with ``circuit`` and positive on the two adjacent rays.

    ``k_degree`` = sum a_i (1 - b_i); positive means K + B is negative on the
    curve of the wall.
    """

    wall: tuple[int, ...]
    adjacent_rays: tuple[int, int]
    circuit: tuple[int, ...]
    relation: tuple[int, ...]
    k_degree: Fraction
    classification: Contraction
    k_sign: KSign

    def coefficient(self, ray: int) -> int:
        return self.relation[self.circuit.index(ray)]

    def to_dict(self) -> dict:
        return {
            "wall": list(self.wall),
            "adjacent_rays": list(self.adjacent_rays),
            "circuit": list(self.circuit),
            "relation": list(self.relation),
            "k_degree": str(self.k_degree),
            "classification": self.classification.value,
            "k_sign": self.k_sign.value,
        }


def interior_walls(fan: Fan) -> list[tuple[int, ...]]:
    count: dict[tuple[int, ...], int] = {}
    for cone in fan.cones:
        for face in combinations(cone, len(cone) - 1):
            count[face] = count.get(face, 0) + 1
    return sorted(f for f, c in count.items() if c == 2)


def wall_analysis(pair: ToricPair, wall: Sequence[int]) -> WallReport:
    wall = tuple(sorted(set(int(i) for i in wall)))
    fan = pair.fan
    adjacent = [c for c in fan.cones if set(wall) <= set(c) and len(c) == len(wall) + 1]
    if len(adjacent) != 2:
        raise KequivError("not_interior_wall", "not an interior wall", wall=list(wall))
    (a,) = set(adjacent[0]) - set(wall)
    (b,) = set(adjacent[1]) - set(wall)
    circuit = tuple(sorted(wall + (a, b)))
    relation = circuit_relation(fan.cone_rays(circuit))
    if relation[circuit.index(a)] < 0:
        relation = tuple(-x for x in relation)
    k_degree = sum((x * pair.weight(i) for x, i in zip(relation, circuit)), Fraction(0))
    negatives = sum(1 for x in relation if x < 0)
    if negatives == 0:
        kind = Contraction.FIBER_TYPE
    elif negatives == 1:
        kind = Contraction.DIVISORIAL
    else:
        kind = Contraction.FLIPPING
    sign = KSign.K_NEGATIVE if k_degree > 0 else KSign.K_TRIVIAL if k_degree == 0 else KSign.K_POSITIVE
    return WallReport(wall, (min(a, b), max(a, b)), circuit, relation, k_degree, kind, sign)


def perform_flip(pair: ToricPair, wall: Sequence[int]) -> ToricPair:
    """Replace the triangulation of the wall's circuit by the opposite one."""
    report = wall_analysis(pair, wall)
    if report.classification is not Contraction.FLIPPING:
        raise KequivError(
            "classification_mismatch", f"wall is {report.classification.value}, not FLIPPING", wall=list(report.wall)
        )
    circuit = set(report.circuit)
    positive = [i for i, x in zip(report.circuit, report.relation) if x > 0]
    negative = [i for i, x in zip(report.circuit, report.relation) if x < 0]
    old = {tuple(sorted(circuit - {p})) for p in positive}
    present = set(pair.fan.cones)
    if not old <= present:
        raise KequivError("non_local_flip", "flipped model is not a fan: circuit star is not fully present")
    new = {tuple(sorted(circuit - {q})) for q in negative}
    cones = [c for c in pair.fan.cones if c not in old] + sorted(new)
    fan = Fan(pair.fan.rank, pair.fan.rays, tuple(cones))
    problems = validate_fan(fan)
    if problems:
        raise KequivError("non_local_flip", "flipped model is not a fan", violations=problems)
    label = pair.label + "+" if pair.label else ""
    return ToricPair(fan, pair.coefficients, label)


def reverse_wall(report: WallReport) -> tuple[int, ...]:
    """The wall of the flipped fan whose flip undoes ``report``'s flip."""
    negative = [i for i, x in zip(report.circuit, report.relation) if x < 0]
    return tuple(sorted(set(report.circuit) - set(negative[:2])))
