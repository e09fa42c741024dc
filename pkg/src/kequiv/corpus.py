"""Built-in example pairs.

flip-r-s
    Rank n = r + s + 1 with rays u_0..u_r, w_0..w_s satisfying
    u_0 + ... + u_r = w_0 + ... + w_s.  Take u_i = e_i and w_j = e_{r+j} for
    i, j >= 1, w_0 = e_n, and u_0 = -(e_1 + ... + e_r) + (e_{r+1} + ... + e_n).
    X is triangulated by the cones missing one u_i, Y by the cones missing
    one w_j.  Near the flipped locus X is the total space of O(-1)^{s+1} over
    P^r, and the wall has K-degree r - s.  r = s = 1 is the Atiyah flop.

quot-n-r
    Y = C^n / Z_r acting with weights (1, ..., 1); X is the weighted blow-up
    at (1/r)(1, ..., 1), i.e. the total space of O(-r) over P^{n-1}.

francia
    X is the total space of O(-1) + O(-2) over P^2.  The three rays of P^2
    are lifted to rank 4 as (1,0,1,2), (0,1,0,0), (-1,-1,0,0); the fibre rays
    are e_3 and e_4, so u_0 + u_1 + u_2 = f_1 + 2 f_2.  X+ is its flop.
"""

from __future__ import annotations

from fractions import Fraction

from .birational import perform_flip, stellar_subdivision, strict_transform
from .mckay import AbelianGroupData, overlattice_basis, quotient_fan, to_overlattice
from .toric import Fan, ToricPair

NAMES = ("francia", "atiyah", "flip-r-s", "quot-n-r")


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def flip_rs(r: int, s: int) -> tuple[ToricPair, ToricPair]:
    if r < 1 or s < 1:
        raise ValueError("flip-r-s needs r >= 1 and s >= 1")
    n = r + s + 1
    u0 = tuple(-1 if i < r else 1 for i in range(n))
    us = [u0] + [_unit(n, i) for i in range(r)]
    ws = [_unit(n, n - 1)] + [_unit(n, r + j) for j in range(s)]
    rays = us + ws
    circuit = set(range(len(rays)))
    x_cones = [tuple(sorted(circuit - {i})) for i in range(r + 1)]
    y_cones = [tuple(sorted(circuit - {r + 1 + j})) for j in range(s + 1)]
    x = ToricPair(Fan.from_rays(rays, x_cones), {}, "X")
    y = ToricPair(Fan.from_rays(rays, y_cones), {}, "Y")
    return x, y


def atiyah() -> tuple[ToricPair, ToricPair]:
    return flip_rs(1, 1)


def quot_n_r(n: int, r: int) -> tuple[ToricPair, ToricPair]:
    """(X, Y) with X -> Y the blow-up of the quotient point."""
    group = AbelianGroupData.cyclic(r, [1] * n)
    y = quotient_fan(group)
    point = to_overlattice(overlattice_basis(group), [Fraction(1, r)] * n)
    _, ref = stellar_subdivision(y, point)
    x = strict_transform(y, ref).with_label("X")
    return x, y


def francia() -> tuple[ToricPair, ToricPair]:
    rays = [(1, 0, 1, 2), (0, 1, 0, 0), (-1, -1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    cones = [(1, 2, 3, 4), (0, 2, 3, 4), (0, 1, 3, 4)]
    x = ToricPair(Fan.from_rays(rays, cones), {}, "X")
    xplus = perform_flip(x, (2, 3, 4))
    return x, xplus


def build(name: str, **params) -> tuple[ToricPair, ToricPair]:
    if name == "francia":
        return francia()
    if name == "atiyah":
        return atiyah()
    if name == "flip-r-s":
        return flip_rs(int(params.get("r") or 1), int(params.get("s") or 1))
    if name == "quot-n-r":
        return quot_n_r(int(params.get("n") or 2), int(params.get("r") or 2))
    raise ValueError(f"unknown example {name!r}")
