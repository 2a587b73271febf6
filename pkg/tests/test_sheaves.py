import pytest

from motsheaf import fixtures as fx
from motsheaf.exact import FpModule
from motsheaf.sheaves import (
    CellularSheaf,
    Filtration,
    NotASheaf,
    SheafCategory,
    constant_sheaf,
    derived_pushforward_oracle,
    pullback_sheaf,
    restrict_sheaf,
    sheaf_adapted,
    sheaf_cohomology,
    sheaf_cohomology_all,
    sheaves_match,
    skeletal_filtration,
)
from motsheaf.simplicial import SimplicialMap, relative_cohomology

SPACES = {"circle": fx.circle, "disk": fx.disk, "interval": fx.interval, "hexagon": fx.hexagon}


@pytest.mark.parametrize("name", sorted(SPACES))
def test_constant_sheaf_matches_simplicial_cohomology(name):
    K = SPACES[name]()
    F = constant_sheaf(K)
    for n in range(K.dim + 1):
        assert sheaf_cohomology(F, n).invariants() == relative_cohomology(K, None, n).invariants()


def test_torsion_coefficients():
    C = fx.circle()
    F = constant_sheaf(C, module=FpModule.cyclic(3))
    assert [h.invariants() for h in sheaf_cohomology_all(F)] == [(0, (3,)), (0, (3,))]


def test_relative_cohomology_of_sheaf():
    D, B = fx.disk(), fx.disk_boundary()
    F = constant_sheaf(D)
    assert [sheaf_cohomology(F, n, B).invariants() for n in range(3)] == [(0, ()), (0, ()), (1, ())]


def test_missing_restriction_rejected():
    I = fx.interval()
    Z = FpModule.free(1)
    with pytest.raises(NotASheaf):
        CellularSheaf(I, {s: Z for s in I.simplices}, {})


def test_identity_pushforward():
    C = fx.circle()
    F = constant_sheaf(C)
    g = SimplicialMap.identity(C)
    assert sheaves_match(derived_pushforward_oracle(g, F, 0), F)
    assert SheafCategory(C).is_zero_object(derived_pushforward_oracle(g, F, 1))


@pytest.mark.parametrize("name", sorted(SPACES))
def test_pushforward_to_point_is_cohomology(name):
    K = SPACES[name]()
    P = fx.point()
    F = constant_sheaf(K)
    for j in range(3):
        G = derived_pushforward_oracle(SimplicialMap.constant(K, P), F, j)
        assert G.stalks[("p",)].invariants() == sheaf_cohomology(F, j).invariants()


def test_cover_pushforward_has_rank_two_stalks():
    g = fx.double_cover()
    G = derived_pushforward_oracle(g, constant_sheaf(g.source), 0)
    assert all(m.rank == 2 for m in G.stalks.values())
    # global sections of the pushforward are the sections upstairs
    assert sheaf_cohomology(G, 0).invariants() == (1, ())
    assert sheaf_cohomology(G, 1).invariants() == (1, ())


def test_skeletal_filtration_adapted_to_constant_sheaf():
    D = fx.disk()
    assert sheaf_adapted(constant_sheaf(D), skeletal_filtration(D))
    whole = Filtration((D,))
    assert not sheaf_adapted(constant_sheaf(fx.circle()), Filtration((fx.circle(),)))
    assert sheaf_adapted(constant_sheaf(D), whole)


def test_pullback_and_restriction():
    C = fx.circle()
    v = C.subcomplex([("c0",)])
    F = constant_sheaf(C)
    assert restrict_sheaf(F, v).stalks == {("c0",): FpModule.free(1)}
    G = pullback_sheaf(fx.double_cover(), F)
    assert sheaves_match(G, constant_sheaf(fx.hexagon()))


def test_sheaf_category_kernel():
    C = fx.circle()
    S = SheafCategory(C)
    F = constant_sheaf(C)
    two = S.scale(S.identity(F), 2)
    K, _ = S.kernel(two)
    Q, _ = S.cokernel(two)
    assert S.is_zero_object(K)
    assert [h.invariants() for h in sheaf_cohomology_all(Q)] == [(0, (2,)), (0, (2,))]
