from fractions import Fraction

import pytest

from kequiv.birational import Verdict, k_compare, resolve, stellar_subdivision
from kequiv.errors import KequivError
from kequiv.lattice import multiplicity
from kequiv.mckay import (
    AbelianGroupData,
    age_spectrum,
    crepant_rays,
    junior_count,
    minimal_model_check,
    model_pair,
    overlattice_basis,
    quotient_fan,
    to_overlattice,
)
from kequiv.birational import identity_map
from kequiv.sod import categorical_rank
from kequiv.toric import Fan, ToricPair

from oracles import brute_force_group

Z2_11 = AbelianGroupData.cyclic(2, [1, 1])
Z3_111 = AbelianGroupData.cyclic(3, [1, 1, 1])
Z2_111 = AbelianGroupData.cyclic(2, [1, 1, 1])
TRIVIAL = AbelianGroupData(2, ())


def test_quotient_fans():
    pair = quotient_fan(Z2_11)
    assert multiplicity(pair.fan.cone_rays(pair.fan.cones[0])) == 2 and pair.coefficients == {}
    pair = quotient_fan(TRIVIAL)
    assert pair.fan.rays == ((1, 0), (0, 1)) and pair.coefficients == {}
    pair = quotient_fan(AbelianGroupData.cyclic(2, [1, 0]))
    assert multiplicity(pair.fan.cone_rays(pair.fan.cones[0])) == 1
    assert pair.coefficients == {0: Fraction(1, 2)}


def test_ages():
    assert sorted(e.age for e in age_spectrum(Z3_111)) == [0, 1, 2]
    assert [e.age for e in age_spectrum(TRIVIAL)] == [0]
    assert sorted(e.age for e in age_spectrum(Z2_11)) == [0, 1]


def test_junior_counts():
    assert junior_count(Z2_11) == 1
    assert junior_count(Z3_111) == 1
    assert junior_count(TRIVIAL) == 0


def test_crepant_rays():
    pair = quotient_fan(Z2_11)
    point = to_overlattice(overlattice_basis(Z2_11), [Fraction(1, 2)] * 2)
    assert crepant_rays(pair) == [point]
    assert crepant_rays(ToricPair(Fan.from_rays([(1, 0), (0, 1)], [(0, 1)]))) == []
    assert crepant_rays(quotient_fan(Z2_111)) == []


def test_group_order_cap(monkeypatch):
    monkeypatch.setenv("KEQUIV_GROUP_ORDER_CAP", "5")
    with pytest.raises(KequivError, match="group order cap"):
        AbelianGroupData.cyclic(7, [1, 6]).elements()


@pytest.mark.parametrize(
    "group",
    [Z2_11, Z3_111, AbelianGroupData(3, ((2, (1, 1, 0)), (2, (0, 1, 1)))), AbelianGroupData(2, ((4, (1, 3)), (2, (1, 1))))],
)
def test_elements_match_brute_force(group):
    assert set(group.elements()) == brute_force_group(group.n, group.generators)


def test_age_inverse_identity():
    group = AbelianGroupData(3, ((6, (1, 2, 3)),))
    elements = group.elements()
    for g in elements:
        inv = tuple((-x) % 1 for x in g)
        assert inv in elements
        assert sum(g) + sum(inv) == sum(1 for x in g if x)


def test_minimal_model_a1():
    y = quotient_fan(Z2_11)
    _, ref = resolve(y)
    report = minimal_model_check(y, model_pair(y, ref), ref)
    assert report.ok and report.terminal
    assert [w.k_sign.value for w in report.contracted_walls] == ["K_TRIVIAL"]


def test_minimal_model_identity():
    pair = ToricPair(Fan.from_rays([(1, 0), (0, 1)], [(0, 1)]))
    assert minimal_model_check(pair, pair, identity_map(pair.fan)).ok


def test_minimal_model_z2_111_reports_negative_walls():
    y = quotient_fan(Z2_111)
    point = to_overlattice(overlattice_basis(Z2_111), [Fraction(1, 2)] * 3)
    _, ref = stellar_subdivision(y, point)
    report = minimal_model_check(y, model_pair(y, ref), ref)
    assert report.terminal
    assert len(report.contracted_walls) == 3
    assert all(w.k_sign.value == "K_NEGATIVE" for w in report.contracted_walls)
    assert not report.ok


def test_minimal_model_not_refinement():
    y = quotient_fan(Z2_11)
    other = ToricPair(Fan.from_rays([(1, 0), (0, 1)], [(0, 1)]))
    with pytest.raises(KequivError):
        minimal_model_check(y, other, identity_map(other.fan))


@pytest.mark.parametrize("group", [Z2_11, Z3_111, Z2_111, AbelianGroupData.cyclic(5, [1, 2, 2])])
def test_resolution_never_lowers_k(group):
    y = quotient_fan(group)
    resolved, ref = resolve(y)
    x = model_pair(y, ref)
    assert k_compare(y, x).verdict in (Verdict.FIRST_LE, Verdict.EQUIVALENT)


def test_rank_with_quasi_reflections():
    group = AbelianGroupData(2, ((2, (1, 0)), (2, (1, 1))))
    assert group.order() == 4
    assert categorical_rank(quotient_fan(group)) == 4
