import pytest

from motsheaf import fixtures as fx
from motsheaf.direct_image import (
    AdaptednessViolated,
    DeltaFunctor,
    DirectImage,
    NotARefinement,
    NotExact,
    Refinement,
    UnsupportedMap,
    check_short_exact,
    connecting_delta,
    derived_pushforward,
    factorization_agrees,
    relative_filtration,
    twist_compatible,
)
from motsheaf.motives import DeltaFragment, Localization
from motsheaf.sheaves import Filtration, derived_pushforward_oracle, sheaf_cohomology, skeletal_filtration
from motsheaf.simplicial import SimplicialComplex, SimplicialMap, connecting_map, fibre_product


def to_point(K):
    return SimplicialMap.constant(K, fx.point())


def stalk(direct, x, face=("p",)):
    return direct.category.realize_object(x).stalks[face]


def test_circle_global_sections():
    frag = DeltaFragment(fx.circle())
    frag.add_pair("h", fx.absolute(fx.circle()))
    d = DirectImage(frag, to_point(frag.base))
    K = d.k_complex(frag.motive("h"))
    assert K.d_squared_zero()
    assert [stalk(d, K.cohomology(j)).invariants() for j in range(3)] == [(1, ()), (1, ()), (0, ())]


def test_projection_matches_oracle():
    T, p1, _ = fx.torus()
    frag = DeltaFragment(T)
    frag.add_pair("rel", fx.absolute(T, 0, p1.preimage(fx.circle().subcomplex([("c0",)]))))
    d = DirectImage(frag, p1)
    F = frag.category.realize_object(frag.motive("rel"))
    C = d.target.sheaf_category()
    for j in range(3):
        got = d.category.realize_object(d.r(frag.motive("rel"), j))
        assert C.invariants(got) == C.invariants(derived_pushforward_oracle(p1, F, j))


def test_relative_filtration_steps():
    T, p1, _ = fx.torus()
    filt = relative_filtration(p1)
    assert filt.step(filt.length - 1) == T
    assert all(filt.step(a).is_subcomplex_of(filt.step(a + 1)) for a in range(filt.length - 1))


def test_non_adapted_filtration_rejected():
    C = fx.circle()
    frag = DeltaFragment(C)
    frag.add_pair("h", fx.absolute(C))
    with pytest.raises(AdaptednessViolated):
        DirectImage(frag, to_point(C), Filtration((C,)))


def test_map_must_start_at_base():
    frag = fx.fragment_over("Pt")
    with pytest.raises(UnsupportedMap):
        DirectImage(frag, to_point(fx.circle()))


def test_interval_connecting_map_matches_simplicial():
    frag = fx.interval_sequence()
    I = frag.base
    d, delta = connecting_delta(frag, to_point(I), frag.edge("i"), frag.edge("p"), 0)
    got = d.category.realize(delta).components[("p",)].matrix
    want = connecting_map(I, I.skeleton(0), SimplicialComplex.empty(), 0).matrix
    assert got == want


@pytest.mark.parametrize("build", [fx.interval_sequence, fx.circle_sequence])
def test_long_exact_sequence(build):
    frag = build()
    d = DirectImage(frag, to_point(frag.base))
    D = DeltaFunctor(d, frag.edge("i"), frag.edge("p"))
    assert D.realized_exact()


def test_sequence_must_be_exact():
    frag = fx.circle_sequence()
    d = DirectImage(frag, to_point(frag.base))
    C = frag.category
    assert not check_short_exact(C, C.scale(frag.edge("i"), 2), frag.edge("p"))
    with pytest.raises(NotExact):
        DeltaFunctor(d, C.scale(frag.edge("i"), 2), frag.edge("p"))


def test_fibration_sign_and_chain_map():
    frag = fx.product_fibration()
    d = DirectImage(frag, to_point(frag.base))
    # the connecting edge anticommutes with the K differentials in odd degree
    assert [d.chain_sign(a) for a in range(d.terms.n)] == [1, -1]
    f = frag.edge("c")
    assert d.k_map(f).is_chain_map()
    assert d.category.realize(d.r_map(f, 0)).components[("p",)].matrix.tolist() == [[-1, 1]]


def test_refinement_quasi_isomorphism_and_composition():
    C = fx.circle()
    frag = DeltaFragment(C)
    frag.add_pair("h", fx.absolute(C))
    m = frag.motive("h")
    f1 = skeletal_filtration(C)
    f2 = Filtration((C.subcomplex([("c0",), ("c1",)]), C))
    f3 = Filtration((C.subcomplex([("c0",)]), C))
    R = Refinement(frag, to_point(C), [f1, f2, f3])
    assert R.is_quasi_isomorphism(m, 0, 2)
    a = R.compose(R.chain_map(m, 0, 1), R.chain_map(m, 1, 2))
    b = R.chain_map(m, 0, 2)
    U = R.target.category
    assert all(U.equal(a.component(n), b.component(n)) for n in range(2))
    with pytest.raises(NotARefinement):
        Refinement(frag, to_point(C), [f3, f1])


def test_twist_compatibility():
    frag = fx.circle_sequence()
    loc = Localization(frag)
    lm = loc.localize(frag.motive("rel"))
    assert all(twist_compatible(loc, lm, to_point(frag.base), j) for j in range(3))


def test_factorization_through_torus():
    C = fx.circle()
    frag = DeltaFragment(C)
    frag.add_pair("h", fx.absolute(C))
    T, _, p2 = fibre_product(to_point(C), to_point(C))
    incl = SimplicialMap.build(C, T, {v: (v, "c0") for v in C.vertices})
    assert factorization_agrees(frag, incl, p2, frag.motive("h"), 0)


def test_total_complex_of_restriction():
    frag = fx.circle_sequence()
    d = DirectImage(frag, to_point(frag.base))
    U = frag.category
    total, dc = derived_pushforward(d, [frag.motive("abs"), frag.motive("pt")], [frag.edge("p")])
    assert dc.anticommutes() and dc.d_squared_zero() and total.d_squared_zero()
    # cone of the restriction to a point: reduced cohomology of the circle, shifted
    H = [stalk(d, total.cohomology(n)).invariants() for n in range(3)]
    assert H == [(0, ()), (1, ()), (0, ())]
    assert sheaf_cohomology(U.realize_object(frag.motive("abs")), 1).invariants() == (1, ())
