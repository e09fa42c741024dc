"""Rank ledger for semi-orthogonal decompositions attached to toric birational maps.

No triangulated category is built.  The categorical rank of a pair is the sum
of the multiplicities of the maximal cones of its associated smooth stack
(ray i rescaled by n_i where b_i = 1 - 1/n_i).  Each report decides which
side embeds from the K-comparison verdict and recovers the number of
orthogonal pieces from rank additivity, failing loudly if that does not
divide evenly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .birational import (
    RefinementMap,
    Verdict,
    k_compare,
    perform_flip,
    wall_analysis,
)
from .errors import KequivError
from .lattice import Vector, matrix_rank, multiplicity, primitive_direction, project_to_quotient
from .toric import Fan, ToricPair, require_valid, stack_rays, standard_coefficients_check, validate_fan

CASES = ("A", "B", "C", "MORI_FIBER", "COEFF_CHANGE")


def _tilde(name: str) -> str:
    return name + "\u0303"


@dataclass(frozen=True)
class BaseDescriptor:
    """The stratum an orthogonal piece lives over, kept symbolic with its rank."""

    name: str
    stratum: tuple[Vector, ...]
    rank: int

    def to_dict(self) -> dict:
        return {"name": self.name, "rank": self.rank, "stratum": [list(v) for v in self.stratum]}


@dataclass(frozen=True)
class SODReport:
    case_label: str
    host_side: str
    embedded_side: str
    host_rank: int
    embedded_rank: int
    pieces: tuple[tuple[BaseDescriptor, int], ...] = field(default_factory=tuple)
    verdict: str | None = None

    @property
    def piece_ranks(self) -> tuple[int, ...]:
        return tuple(base.rank for base, _ in self.pieces)

    def additive(self) -> bool:
        return self.host_rank == self.embedded_rank + sum(self.piece_ranks)

    def to_dict(self) -> dict:
        return {
            "case": self.case_label,
            "host": self.host_side,
            "embedded": self.embedded_side,
            "pieces": [{"base": b.to_dict(), "twist": t} for b, t in self.pieces],
            "rank_equation": {
                "host": self.host_rank,
                "embedded": self.embedded_rank,
                "pieces": list(self.piece_ranks),
            },
            "verdict": self.verdict,
            "display": self.display(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def display(self) -> str:
        host = f"D({_tilde(self.host_side)})"
        embedded = f"Φ(D({_tilde(self.embedded_side)}))"
        if self.case_label == "B":
            return f"{host} ≃ {embedded}"
        parts = [f"Ψ(D({b.name}))⊗L_{t}" for b, t in self.pieces]
        return f"{host} = ⟨" + ", ".join(parts + [embedded]) + "⟩"


# ---------------------------------------------------------------------------
# ranks


def _require_standard(pair: ToricPair) -> None:
    ok, bad = standard_coefficients_check(pair)
    if not ok:
        raise KequivError("non_standard", "coefficients are not of the form 1 - 1/n", rays=bad)


def categorical_rank(pair: ToricPair) -> int:
    _require_standard(pair)
    scaled = stack_rays(pair)
    return sum(multiplicity([scaled[i] for i in cone]) for cone in pair.fan.cones)


def stratum_rank(pair: ToricPair, span: Sequence[Sequence[int]], cones: Sequence[Sequence[int]]) -> int:
    """Rank of the stack over the orbit closure of ``span``, seen from ``cones``.

    ``span`` must be linearly independent.  The stack rays of each cone are
    projected to N / (N cap span); distinct projected cones contribute their
    multiplicities.
    """
    _require_standard(pair)
    project = project_to_quotient(span, pair.fan.rank)
    scaled = stack_rays(pair)
    seen: dict[frozenset, int] = {}
    for cone in cones:
        images = [project(scaled[i]) for i in cone]
        images = frozenset(v for v in images if any(v))
        if images not in seen:
            seen[images] = multiplicity(sorted(images))
    return sum(seen.values())


def _pieces(host: int, embedded: int, base: BaseDescriptor, start: int = 1) -> tuple[tuple[BaseDescriptor, int], ...]:
    gap = host - embedded
    if gap < 0 or base.rank <= 0 or gap % base.rank:
        raise KequivError(
            "rank_accounting",
            "rank accounting inconsistent",
            host=host,
            embedded=embedded,
            base_rank=base.rank,
        )
    return tuple((base, start + k) for k in range(gap // base.rank))


def _oriented(verdict: Verdict, x_name: str, y_name: str, rank_x: int, rank_y: int, base: BaseDescriptor) -> SODReport:
    if verdict is Verdict.EQUIVALENT:
        if rank_x != rank_y:
            raise KequivError("rank_accounting", "rank accounting inconsistent", host=rank_x, embedded=rank_y)
        return SODReport("B", x_name, y_name, rank_x, rank_y, (), verdict.value)
    if verdict is Verdict.FIRST_GE:
        return SODReport("A", x_name, y_name, rank_x, rank_y, _pieces(rank_x, rank_y, base), verdict.value)
    if verdict is Verdict.FIRST_LE:
        return SODReport("C", y_name, x_name, rank_y, rank_x, _pieces(rank_y, rank_x, base), verdict.value)
    raise KequivError("incomparable", "the two pairs are not K-comparable; no decomposition is predicted")


def _name(pair: ToricPair, default: str) -> str:
    return pair.label or default


# ---------------------------------------------------------------------------
# reports


def sod_divisorial(pair_x: ToricPair, pair_y: ToricPair, contraction: RefinementMap) -> SODReport:
    """X -> Y contracting exactly one ray; pieces live over the image F of the exceptional divisor."""
    require_valid(pair_x)
    require_valid(pair_y)
    if contraction.source != pair_x.fan or contraction.target != pair_y.fan:
        raise KequivError("precondition", "contraction must map the fan of X onto the fan of Y")
    problems = contraction.check()
    if problems:
        raise KequivError("not_a_refinement", "contraction is not a subdivision", violations=problems)
    fx, fy = pair_x.fan, pair_y.fan
    new = [i for i, r in enumerate(fx.rays) if fy.ray_index(r) is None]
    lost = [r for r in fy.rays if fx.ray_index(r) is None]
    if len(new) != 1 or lost:
        raise KequivError("not_divisorial", "contraction does not contract exactly one ray", exceptional=len(new))
    for j, r in enumerate(fy.rays):
        if pair_y.b(j) != pair_x.b(fx.ray_index(r)):
            raise KequivError("precondition", "coefficients of Y are not the push-forward of those of X", ray=list(r))
    (e,) = new
    hit = fy.locate(fx.rays[e])
    center = tuple(i for i, c in zip(fy.cones[hit[0]], hit[1]) if c > 0)
    span = fy.cone_rays(center)
    star = [c for c in fy.cones if set(center) <= set(c)]
    base = BaseDescriptor(_tilde("F"), tuple(span), stratum_rank(pair_y, span, star))
    verdict = k_compare(pair_x, pair_y).verdict
    return _oriented(verdict, _name(pair_x, "X"), _name(pair_y, "Y"), categorical_rank(pair_x), categorical_rank(pair_y), base)


def sod_flip(pair_x: ToricPair, pair_y: ToricPair, wall: Sequence[int]) -> SODReport:
    """X and Y related by the flip at ``wall``; pieces live over the flipping locus F."""
    require_valid(pair_x)
    require_valid(pair_y)
    report = wall_analysis(pair_x, wall)
    flipped = perform_flip(pair_x, wall)
    if not flipped.fan.same_as(pair_y.fan):
        raise KequivError("not_related", "pairs are not related by the flip at this wall", wall=list(report.wall))
    fx = pair_x.fan
    for j, r in enumerate(pair_y.fan.rays):
        if pair_y.b(j) != pair_x.b(fx.ray_index(r)):
            raise KequivError("precondition", "the two sides carry different boundaries", ray=list(r))
    span = fx.cone_rays(tuple(sorted(report.wall + (report.adjacent_rays[0],))))
    circuit = set(report.circuit)
    positive = {i for i, a in zip(report.circuit, report.relation) if a > 0}
    star = [c for c in fx.cones if any(circuit - {p} <= set(c) for p in positive)]
    base = BaseDescriptor(_tilde("F"), tuple(fx.rays[i] for i in report.circuit), stratum_rank(pair_x, span, star))
    verdict = k_compare(pair_x, pair_y).verdict
    return _oriented(verdict, _name(pair_x, "X"), _name(pair_y, "Y"), categorical_rank(pair_x), categorical_rank(pair_y), base)


def sod_coefficient_change(pair_b: ToricPair, pair_c: ToricPair) -> SODReport:
    """Same fan, boundary lowered along one ray E; pieces live over E."""
    require_valid(pair_b)
    require_valid(pair_c)
    if not pair_b.fan.same_as(pair_c.fan) or pair_b.fan.rays != pair_c.fan.rays:
        raise KequivError("precondition", "coefficient change requires the same fan")
    changed = [i for i in range(len(pair_b.fan.rays)) if pair_b.b(i) != pair_c.b(i)]
    if len(changed) != 1:
        raise KequivError("precondition", "pairs must differ on exactly one ray", differing=len(changed))
    (e,) = changed
    if not pair_c.b(e) < pair_b.b(e):
        raise KequivError("precondition", "the second pair's coefficient must be strictly smaller")
    fan = pair_b.fan
    span = [fan.rays[e]]
    star = [c for c in fan.cones if e in c]
    base = BaseDescriptor(_tilde("E"), tuple(span), stratum_rank(pair_c, span, star))
    host, embedded = categorical_rank(pair_b), categorical_rank(pair_c)
    return SODReport(
        "COEFF_CHANGE",
        _name(pair_b, "X"),
        _name(pair_c, "Y"),
        host,
        embedded,
        _pieces(host, embedded, base),
        Verdict.FIRST_LE.value,
    )


def projected_fan(fan: Fan, projection: Sequence[Sequence[int]]) -> Fan:
    """The fan of image cones under a surjective lattice map (rows = target coordinates)."""
    m = len(projection)
    if m and any(len(row) != fan.rank for row in projection):
        raise KequivError("bad_projection", "projection matrix has the wrong number of columns")
    if m and matrix_rank(projection) != m:
        raise KequivError("bad_projection", "projection is not surjective")

    def image(v):
        return tuple(sum(row[k] * v[k] for k in range(fan.rank)) for row in projection)

    rays: list[Vector] = []
    index: dict[Vector, int] = {}
    cone_sets = []
    for cone in fan.cones:
        s = set()
        for i in cone:
            w = image(fan.rays[i])
            if any(w):
                w = primitive_direction(w)
                if w not in index:
                    index[w] = len(rays)
                    rays.append(w)
                s.add(index[w])
        cone_sets.append(frozenset(s))
    order = sorted(range(len(rays)), key=lambda i: rays[i])
    relabel = {old: new for new, old in enumerate(order)}
    rays = [rays[i] for i in order]
    cone_sets = [frozenset(relabel[i] for i in s) for s in cone_sets]
    maximal = {s for s in cone_sets if not any(s < t for t in cone_sets)}
    out = Fan(m, tuple(rays), tuple(tuple(sorted(s)) for s in maximal))
    problems = validate_fan(out)
    if problems:
        raise KequivError("not_a_fibration", "image cones do not form a fan", violations=problems)
    return out


def sod_mori_fiber(pair_x: ToricPair, projection: Sequence[Sequence[int]]) -> SODReport:
    """X -> Y of fiber type: D(X~) is built from rank(X~)/rank(Y~) twisted copies of D(Y~).

    The last copy is reported as the embedded side and the remaining copies as
    pieces with twists 1 .. n-1.
    """
    require_valid(pair_x)
    fan_y = projected_fan(pair_x.fan, projection)
    pair_y = ToricPair(fan_y, {}, "Y")
    host = categorical_rank(pair_x)
    base_rank = categorical_rank(pair_y)
    if host % base_rank:
        raise KequivError("rank_accounting", "rank accounting inconsistent", host=host, base_rank=base_rank)
    base = BaseDescriptor(_tilde("Y"), tuple(fan_y.rays), base_rank)
    pieces = _pieces(host, base_rank, base)
    return SODReport("MORI_FIBER", _name(pair_x, "X"), "Y", host, base_rank, pieces, None)
