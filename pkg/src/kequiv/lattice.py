"""Exact integer/rational linear algebra and simplicial cone primitives.

Vectors are plain tuples of ``int`` (lattice points) or ``Fraction``
(rational points). Nothing here uses floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import KequivError

Vector = tuple[int, ...]
QVector = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# vectors


def primitivize(v: Iterable[int]) -> Vector:
    v = tuple(int(x) for x in v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise KequivError("zero_vector", "zero vector has no primitive representative")
    return tuple(x // g for x in v)


def primitive_direction(v: Iterable) -> Vector:
    """Primitive lattice vector on the ray through a nonzero rational point."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    return primitivize(int(x * den) for x in v)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def is_integral(v: Iterable) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def combine(coeffs: Sequence, vectors: Sequence[Sequence]) -> tuple:
    """Return sum(c_i * v_i); ``Fraction`` entries collapse to ``int`` when integral."""
    if not vectors:
        return ()
    n = len(vectors[0])
    out = [Fraction(0)] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for j in range(n):
                out[j] += c * v[j]
    return tuple(int(x) if x.denominator == 1 else x for x in out)


# ---------------------------------------------------------------------------
# Gaussian elimination over Q


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and the pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def matrix_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def kernel(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0} over Q."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def determinant(rows: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise KequivError("singular_matrix", "matrix is not invertible")
    return [row[n:] for row in red]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def smith_normal_form(matrix: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(diagonal, U, V)`` with ``U @ M @ V`` diagonal and d_i | d_{i+1}.

    ``U`` and ``V`` are unimodular integer matrices. The diagonal has
    ``min(rows, cols)`` nonnegative entries.
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        clean = False
            if not clean:
                # bring the smallest remainder of row/column t into the pivot
                cands = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cands)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    diagonal = [a[i][i] for i in range(min(m, n))]
    return diagonal, u, v


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form: the nonzero rows, echelon, positive pivots,
    entries above each pivot reduced into [0, pivot)."""
    a = [[int(x) for x in r] for r in rows]
    if not a:
        return []
    n = len(a[0])
    r = 0
    for c in range(n):
        if r == len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r]]


# ---------------------------------------------------------------------------
# simplicial cones given by their generators


@lru_cache(maxsize=1 << 16)
def _coordinate_system(rays: tuple[Vector, ...]):
    """Pivot columns and inverse so that coords(v) = v[pivots] @ inverse."""
    if not rays:
        return (), ()
    n = len(rays[0])
    _, pivots = rref(rays, n)
    if len(pivots) < len(rays):
        return None
    sub = [[r[c] for c in pivots] for r in rays]
    return tuple(pivots), tuple(tuple(row) for row in inverse(sub))


def coordinates(rays: Sequence[Sequence[int]], v: Sequence) -> QVector | None:
    """Coefficients c with sum c_i r_i = v for independent rays; ``None`` if v is
    outside their span. Raises on dependent rays."""
    rays = tuple(tuple(r) for r in rays)
    system = _coordinate_system(rays)
    if system is None:
        raise KequivError("non_simplicial", "non-simplicial cone", rays=rays)
    pivots, inv = system
    if not rays:
        return () if all(x == 0 for x in v) else None
    k = len(rays)
    vp = [Fraction(v[c]) for c in pivots]
    coeffs = tuple(sum(vp[i] * inv[i][j] for i in range(k)) for j in range(k))
    for j in range(len(v)):
        if sum(coeffs[i] * rays[i][j] for i in range(k)) != v[j]:
            return None
    return coeffs


def is_independent(rays: Sequence[Sequence[int]]) -> bool:
    if not rays:
        return True
    return _coordinate_system(tuple(tuple(r) for r in rays)) is not None


def multiplicity(rays: Sequence[Sequence[int]]) -> int:
    """Index of the group generated by the rays inside the saturated lattice of their span."""
    if not rays:
        return 1
    diag, _, _ = smith_normal_form(rays)
    if any(d == 0 for d in diag) or len(diag) < len(rays):
        raise KequivError("non_simplicial", "non-simplicial cone", rays=[list(r) for r in rays])
    out = 1
    for d in diag:
        out *= d
    return out


def contains(rays: Sequence[Sequence[int]], v: Sequence) -> bool:
    c = coordinates(rays, v)
    return c is not None and all(x >= 0 for x in c)


def saturation_basis(rays: Sequence[Sequence[int]], n: int):
    """Return ``(diag, W)``: W is unimodular and its first k rows span the
    saturated lattice of span(rays); d_i * W_i generate the ray lattice."""
    diag, _, v = smith_normal_form(rays, n)
    w = [[int(x) for x in row] for row in inverse(v)] if n else []
    return diag, w


def box_points(rays: Sequence[Sequence[int]]) -> list[tuple[Vector, QVector]]:
    """Lattice points sum c_i r_i with every c_i in [0, 1), with their coefficients.

    The count equals ``multiplicity(rays)``; the origin is included.
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        return [((), ())]
    n = len(rays[0])
    k = len(rays)
    diag, w = saturation_basis(rays, n)
    if any(d == 0 for d in diag[:k]):
        raise KequivError("non_simplicial", "non-simplicial cone", rays=[list(r) for r in rays])
    out = {}
    for x in product(*(range(d) for d in diag[:k])):
        p = [0] * n
        for xi, row in zip(x, w):
            if xi:
                for j in range(n):
                    p[j] += xi * row[j]
        c = coordinates(rays, p)
        frac = tuple(ci - (ci.numerator // ci.denominator) for ci in c)
        point = combine(frac, rays)
        point = tuple(int(t) for t in point) if point else tuple([0] * n)
        out[point] = frac
    return sorted(out.items())


def project_to_quotient(tau_rays: Sequence[Sequence[int]], n: int):
    """Linear map N -> N / (N cap span(tau)) as a function on integer vectors."""
    k = len(tau_rays)
    if k == 0:
        return lambda x: tuple(int(t) for t in x)
    _, _, v = smith_normal_form(tau_rays, n)

    def project(x):
        y = [sum(int(x[i]) * v[i][j] for i in range(n)) for j in range(n)]
        return tuple(y[k:])

    return project


# ---------------------------------------------------------------------------
# cone intersection by double description


def _h_representation(rays: Sequence[Vector], n: int):
    """Equations (==0) and inequalities (>=0) for the cone on independent rays."""
    rays = tuple(tuple(r) for r in rays)
    system = _coordinate_system(rays)
    if system is None:
        raise KequivError("non_simplicial", "non-simplicial cone", rays=[list(r) for r in rays])
    pivots, inv = system
    k = len(rays)
    # coefficient functionals: c_j(x) = sum_i x[pivots[i]] * inv[i][j]
    ineqs = []
    for j in range(k):
        f = [Fraction(0)] * n
        for i in range(k):
            f[pivots[i]] += inv[i][j]
        ineqs.append(f)
    # x - sum_j c_j(x) r_j == 0 on the span
    eqs = []
    for row in range(n):
        f = [Fraction(int(row == col)) for col in range(n)]
        for j in range(k):
            if rays[j][row]:
                for col in range(n):
                    f[col] -= rays[j][row] * ineqs[j][col]
        if any(f):
            eqs.append(f)
    return eqs, ineqs


def _scale_int(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    w = [int(x * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return tuple(x // g for x in w) if g else tuple(w)


def _double_description(k: int, equations, inequalities) -> list[tuple[int, ...]]:
    """Extreme rays of {lam >= 0 in Q^k : E lam = 0, H lam >= 0}."""
    rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    tight = [frozenset(("orth", j) for j in range(k) if j != i) for i in range(k)]
    constraints = [("eq", i, h) for i, h in enumerate(equations)] + [
        ("ge", i, h) for i, h in enumerate(inequalities)
    ]
    for kind, idx, h in constraints:
        tag = (kind, idx)
        vals = [sum(hj * rj for hj, rj in zip(h, r)) for r in rays]
        pos = [i for i, x in enumerate(vals) if x > 0]
        neg = [i for i, x in enumerate(vals) if x < 0]
        zero = [i for i, x in enumerate(vals) if x == 0]
        new_rays, new_tight = [], []
        keep = zero + (pos if kind == "ge" else [])
        for i in keep:
            new_rays.append(rays[i])
            new_tight.append(tight[i] | {tag} if i in zero else tight[i])
        for i in pos:
            for j in neg:
                common = tight[i] & tight[j]
                if any(common <= tight[t] for t in range(len(rays)) if t != i and t != j):
                    continue
                comb = [vals[i] * b - vals[j] * a for a, b in zip(rays[i], rays[j])]
                new_rays.append(_scale_int(comb))
                new_tight.append(common | {tag})
        seen = {}
        for r, t in zip(new_rays, new_tight):
            if any(r):
                seen.setdefault(r, t)
        rays, tight = list(seen), list(seen.values())
    return rays


def cone_intersection_rays(rays_a: Sequence[Vector], rays_b: Sequence[Vector]) -> list[Vector]:
    """Primitive extreme rays of cone(rays_a) cap cone(rays_b), sorted."""
    rays_a = [tuple(r) for r in rays_a]
    rays_b = [tuple(r) for r in rays_b]
    if not rays_a or not rays_b:
        return []
    n = len(rays_a[0])
    if len(rays_b[0]) != n:
        raise KequivError("rank_mismatch", "cones live in lattices of different rank")
    if not is_independent(rays_a):
        raise KequivError("non_simplicial", "non-simplicial cone", rays=rays_a)
    eqs_b, ineqs_b = _h_representation(rays_b, n)
    k = len(rays_a)

    # pull B's constraints back along lam -> sum lam_i a_i
    def pull(f):
        return [sum(f[c] * a[c] for c in range(n)) for a in rays_a]

    lam_rays = _double_description(k, [pull(f) for f in eqs_b], [pull(f) for f in ineqs_b])
    out = {primitivize(combine(lam, rays_a)) for lam in lam_rays}
    return sorted(out)


def circuit_relation(vectors: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """The unique integral relation sum a_i v_i = 0 with content 1, first nonzero a_i > 0."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        raise KequivError("not_a_circuit", "not a circuit")
    n = len(vectors[0])
    rows = [[v[j] for v in vectors] for j in range(n)]
    ker = kernel(rows, len(vectors))
    if len(ker) != 1:
        raise KequivError("not_a_circuit", "not a circuit", kernel_dimension=len(ker))
    rel = _scale_int(ker[0])
    first = next(x for x in rel if x)
    if first < 0:
        rel = tuple(-x for x in rel)
    return rel


# ---------------------------------------------------------------------------
# fan-level wrappers (a fan is anything with ``.rays``)


def cone_rays(fan, cone: Sequence[int]) -> list[Vector]:
    return [fan.rays[i] for i in cone]


def cone_multiplicity(fan, cone: Sequence[int]) -> int:
    return multiplicity(cone_rays(fan, cone))


def cone_contains(fan, cone: Sequence[int], v: Sequence) -> bool:
    return contains(cone_rays(fan, cone), v)


def cone_intersection(fan_a, cone_a: Sequence[int], fan_b, cone_b: Sequence[int]) -> list[Vector]:
    if fan_a.rank != fan_b.rank:
        raise KequivError("rank_mismatch", "cones live in lattices of different rank")
    return cone_intersection_rays(cone_rays(fan_a, cone_a), cone_rays(fan_b, cone_b))
