"""Property checks over seeded random inputs."""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from kequiv.birational import Verdict, k_compare, permissible_check, star_subdivision
from kequiv.corpus import atiyah, flip_rs
from kequiv.grothendieck import L, class_of_fan, projective_space_class, stringy_invariant
from kequiv.lattice import combine, determinant, mat_mul, primitivize, smith_normal_form
from kequiv.mckay import AbelianGroupData, age
from kequiv.sod import categorical_rank
from kequiv.toric import ToricPair, evaluate_phi, klt_check

from generators import random_face, random_smooth_pair
from oracles import determinantal_invariants

SETTINGS = settings(max_examples=40, deadline=None)
seeds = st.integers(0, 10**9)
small_int = st.integers(-6, 6)


@SETTINGS
@given(st.lists(small_int, min_size=1, max_size=5).filter(any))
def test_primitivize(v):
    p = primitivize(v)
    assert primitivize(p) == p
    k = next(a // b for a, b in zip(v, p) if b)
    assert tuple(k * x for x in p) == tuple(v) and k > 0


@SETTINGS
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_smith_normal_form_identities(m, n, data):
    matrix = [data.draw(st.lists(small_int, min_size=n, max_size=n)) for _ in range(m)]
    diag, u, v = smith_normal_form(matrix)
    product = mat_mul(mat_mul(u, matrix), v)
    for i in range(m):
        for j in range(n):
            assert product[i][j] == (diag[i] if i == j else 0)
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else b % a == 0
    assert diag == determinantal_invariants(matrix)


def _cone_point(rng, pair, scale=3):
    cone = rng.choice(pair.fan.cones)
    coeffs = [rng.randint(0, scale) for _ in cone]
    return cone, coeffs, combine(coeffs, pair.fan.cone_rays(cone))


@SETTINGS
@given(seeds)
def test_phi_is_linear_on_cones(seed):
    rng = random.Random(seed)
    pair = random_smooth_pair(rng)
    cone, coeffs, v = _cone_point(rng, pair)
    expected = sum((c * (1 - pair.b(i)) for c, i in zip(coeffs, cone)), Fraction(0))
    assert evaluate_phi(pair, v) == expected
    k = rng.randint(1, 4)
    assert evaluate_phi(pair, tuple(k * x for x in v)) == k * expected


@SETTINGS
@given(seeds)
def test_blowup_preserves_phi_and_k(seed):
    rng = random.Random(seed)
    pair = random_smooth_pair(rng, max_rank=3)
    if pair.fan.dimension < 2:
        return
    center = random_face(rng, pair.fan, 2)
    assert permissible_check(pair, center)
    blown, _ = star_subdivision(pair, center)
    for _ in range(5):
        _, _, v = _cone_point(rng, pair)
        assert evaluate_phi(blown, v) == evaluate_phi(pair, v)
    assert k_compare(pair, blown).verdict is Verdict.EQUIVALENT


@SETTINGS
@given(seeds)
def test_k_compare_swaps_verdict(seed):
    rng = random.Random(seed)
    pair = random_smooth_pair(rng, max_rank=3)
    other = ToricPair(pair.fan, {i: rng.choice([Fraction(0), Fraction(1, 2), Fraction(-1)]) for i in range(len(pair.fan.rays))})
    forward, backward = k_compare(pair, other), k_compare(other, pair)
    swap = {Verdict.FIRST_GE: Verdict.FIRST_LE, Verdict.FIRST_LE: Verdict.FIRST_GE}
    assert backward.verdict is swap.get(forward.verdict, forward.verdict)
    assert sorted(-d for _, d in forward.differences) == sorted(d for _, d in backward.differences)


@SETTINGS
@given(seeds)
def test_smooth_pairs_with_small_coefficients_are_klt(seed):
    assert klt_check(random_smooth_pair(random.Random(seed)))


@SETTINGS
@given(seeds)
def test_scissor_relation_for_blowups(seed):
    # [Bl_Z X] = [X] + [Z]([P^(c-1)] - 1), with [Z] summed over the orbits in the star of the centre
    rng = random.Random(seed)
    pair = random_smooth_pair(rng, max_rank=4, blowups=1)
    if pair.fan.dimension < 2:
        return
    center = random_face(rng, pair.fan, 2)
    blown, _ = star_subdivision(pair, center)
    n = pair.fan.rank
    z = sum(((L - 1) ** (n - len(f)) for f in pair.fan.faces if set(center) <= set(f)), L * 0)
    expected = class_of_fan(pair.fan) + z * (projective_space_class(len(center) - 1) - 1)
    assert class_of_fan(blown.fan) == expected


def test_flops_preserve_stringy_and_rank():
    pairs = [atiyah()] + [flip_rs(r, r) for r in (1, 2, 3)]
    for x, y in pairs:
        assert stringy_invariant(x) == stringy_invariant(y)
        assert categorical_rank(x) == categorical_rank(y)


@SETTINGS
@given(st.integers(2, 12), st.lists(st.integers(0, 11), min_size=2, max_size=4))
def test_age_of_inverse(order, weights):
    group = AbelianGroupData.cyclic(order, weights)
    for g in group.elements():
        inverse = tuple((-x) % 1 for x in g)
        assert age(g) + age(inverse) == sum(1 for x in g if x)
