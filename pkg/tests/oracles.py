"""Independent reference computations used to pin derived values.

None of these reuse the package's algorithms: Smith invariants come from
determinantal divisors, kernels from sympy, indices from coset counting.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd

import sympy


def _laplace_det(m: list[list[int]]) -> int:
    if len(m) == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * _laplace_det([row[:j] + row[j + 1 :] for row in m[1:]]) for j in range(len(m)) if m[0][j]
    )


def determinantal_invariants(matrix: list[list[int]]) -> list[int]:
    """Smith diagonal via d_k = D_k / D_{k-1}, D_k = gcd of all k x k minors."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, _laplace_det([[matrix[i][j] for j in cols] for i in rows]))
        if g == 0:
            out.extend([0] * (min(m, n) - k + 1))
            break
        out.append(g // prev)
        prev = g
    return out


def kernel_relation(vectors: list[list[int]]) -> tuple[int, ...] | None:
    """Integral content-1 generator of the 1-dim kernel, first nonzero entry positive."""
    mat = sympy.Matrix(vectors).T
    null = mat.nullspace()
    if len(null) != 1:
        return None
    v = null[0]
    den = sympy.ilcm(*[sympy.Rational(x).q for x in v])
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def coset_count(rays: list[tuple[int, ...]]) -> int:
    """Number of lattice points in the half-open parallelepiped of a full-rank cone."""
    n = len(rays)
    mat = sympy.Matrix(rays).T
    inv = mat.inv()
    lo = [min(0, *[sum(r[i] for r, use in zip(rays, mask) if use) for mask in product((0, 1), repeat=n)]) for i in range(n)]
    hi = [max(0, *[sum(r[i] for r, use in zip(rays, mask) if use) for mask in product((0, 1), repeat=n)]) for i in range(n)]
    count = 0
    for p in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        c = inv * sympy.Matrix(p)
        if all(0 <= x < 1 for x in c):
            count += 1
    return count


def brute_force_group(n: int, generators) -> set[tuple[Fraction, ...]]:
    """All products g_1^k_1 ... g_m^k_m with 0 <= k_i < r_i."""
    out = set()
    ranges = [range(r) for r, _ in generators]
    for ks in product(*ranges):
        out.add(tuple(sum((Fraction(k * w[i], r) for k, (r, w) in zip(ks, generators)), Fraction(0)) % 1 for i in range(n)))
    return out


def torus_orbit_class_coefficients(n_cones_by_dim: dict[int, int], rank: int) -> list[int]:
    """Expand sum_k c_k (L-1)^(rank-k) into coefficients of L, highest degree first."""
    L = sympy.Symbol("L")
    expr = sum(c * (L - 1) ** (rank - k) for k, c in n_cones_by_dim.items())
    poly = sympy.Poly(sympy.expand(expr), L)
    return [int(c) for c in poly.all_coeffs()]
