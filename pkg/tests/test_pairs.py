import pytest

from motsheaf import fixtures as fx
from motsheaf.pairs import (
    FlatnessRequired,
    MixedModels,
    NotOverBase,
    PairMap,
    SimplicialPairOverBase,
    base_change_check,
    has_base_change,
    product_pair,
    pullback_pair,
    relative_sheaf,
    type1_restriction,
)
from motsheaf.sheaves import constant_sheaf, sheaf_cohomology, sheaves_match
from motsheaf.simplicial import SimplicialComplex, SimplicialMap, relative_cohomology


def over_point(K, sub=None, degree=0):
    return fx.pair(SimplicialMap.constant(K, fx.point()), sub, degree)


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_stalk_over_point_is_relative_cohomology(degree):
    D, B = fx.disk(), fx.disk_boundary()
    F = relative_sheaf(over_point(D, B, degree))
    assert F.stalks[("p",)].invariants() == relative_cohomology(D, B, degree).invariants()


def test_identity_pair_is_constant():
    C = fx.circle()
    assert sheaves_match(relative_sheaf(fx.absolute(C)), constant_sheaf(C))


def test_torus_projection_stalks():
    T, p1, _ = fx.torus()
    for i in (0, 1):
        F = relative_sheaf(fx.pair(p1, None, i))
        assert all(m.invariants() == (1, ()) for m in F.stalks.values())
    assert all(m.is_zero() for m in relative_sheaf(fx.pair(p1, None, 2)).stalks.values())


def test_moebius_local_system():
    f, bd = fx.moebius()
    F = relative_sheaf(fx.pair(f, bd, 1))
    # rank one stalks with monodromy -1, so no global sections and 2-torsion in degree one
    assert sheaf_cohomology(F, 0).is_zero()
    assert sheaf_cohomology(F, 1).invariants() == (0, (2,))


@pytest.mark.parametrize("base", ["Pt", "Circ", "Disk"])
def test_proper_fixtures_have_base_change(base):
    _, pairs = fx.base_fixtures()[base]
    for p in pairs.values():
        assert has_base_change(p)


def test_open_pair_fails_base_change():
    p = fx.open_counterexample()
    assert p.is_open
    assert not has_base_change(p)
    I = p.base
    b = SimplicialMap.inclusion(I.subcomplex([("b",)]), I)
    assert not base_change_check(b, p)


def test_pullback_along_cover():
    g = fx.double_cover()
    q = pullback_pair(g, fx.absolute(fx.circle()))
    assert q.base == g.source
    assert base_change_check(g, fx.absolute(fx.circle()))


def test_product_degrees_and_flatness():
    C = fx.circle()
    a = over_point(C, C.subcomplex([("c0",)]), 1)
    prod = product_pair(a, a)
    assert prod.degree == 2
    assert relative_sheaf(prod).stalks[("p",)].invariants() == (1, ())
    f, bd = fx.moebius()
    m = fx.pair(f.then(SimplicialMap.constant(C, fx.point())), bd, 1)
    with pytest.raises(FlatnessRequired):
        product_pair(m, m)
    with pytest.raises(MixedModels):
        product_pair(fx.open_counterexample(), fx.open_counterexample())


def test_pair_map_checks_base():
    C = fx.circle()
    v = C.subcomplex([("c0",)])
    rel, absolute = fx.absolute(C, 0, v), fx.absolute(C)
    m = PairMap(absolute, rel, SimplicialMap.identity(C))
    phi = type1_restriction(m)
    assert phi.is_natural()
    with pytest.raises(NotOverBase):
        PairMap(rel, absolute, SimplicialMap.identity(C))


def test_degree_must_be_natural():
    with pytest.raises(ValueError):
        SimplicialPairOverBase(SimplicialMap.identity(fx.point()), SimplicialComplex.empty(), -1)
