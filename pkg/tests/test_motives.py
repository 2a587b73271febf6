import pytest

from motsheaf import fixtures as fx
from motsheaf.motives import (
    BaseChangeFailed,
    DeltaFragment,
    Localization,
    LocalizedMorphism,
    NotCellular,
    TensorFunctor,
    change_coefficients,
    inverse_image,
    is_cellular,
    lefschetz_pair,
    loc_hom_equal,
)
from motsheaf.pairs import PairMap, relative_sheaf, type1_restriction
from motsheaf.sheaves import SheafCategory, sheaf_cohomology, sheaves_match
from motsheaf.simplicial import SimplicialMap


def test_vertices_realize_to_relative_sheaves():
    frag = fx.fragment_over("Circ")
    for name, v in frag.vertices.items():
        got = frag.category.realize_object(frag.motive(name))
        assert sheaves_match(got, relative_sheaf(v.pair))


def test_type1_edge_realizes_to_restriction():
    frag = fx.circle_sequence()
    e = frag.edges["i"]
    got = frag.category.realize(frag.edge("i"))
    want = type1_restriction(PairMap(frag.vertices[e.source].pair, frag.vertices[e.target].pair, e.map.g))
    assert SheafCategory(frag.base).equal(got, want)


def test_open_pair_rejected_with_witness():
    frag = DeltaFragment(fx.interval())
    with pytest.raises(BaseChangeFailed) as info:
        frag.add_pair("open", fx.open_counterexample())
    assert info.value.vertex == "open"
    assert info.value.witness == ("b",)


def test_pairs_over_other_base_rejected():
    frag = DeltaFragment(fx.point())
    with pytest.raises(ValueError):
        frag.add_pair("c", fx.absolute(fx.circle()))


def test_connecting_edge_realizes_to_boundary():
    frag = fx.disk_triple()
    d = frag.category.realize(frag.edge("d"))
    assert d.components[("p",)].matrix.tolist() in ([[1]], [[-1]])


def test_change_of_coefficients_kills_torsion():
    frag = fx.fragment_over("Circ")
    q, functor = change_coefficients(frag, "Q")
    F = q.category.realize_object(functor.on_object(frag.motive("moebius-rel")))
    assert sheaf_cohomology(F, 1).is_zero()
    assert sheaf_cohomology(frag.category.realize_object(frag.motive("moebius-rel")), 1).invariants() == (0, (2,))


def test_inverse_image_along_cover():
    frag = fx.circle_sequence()
    out, functor = inverse_image(fx.double_cover(), frag)
    assert out.base == fx.hexagon()
    F = out.category.realize_object(functor.on_object(frag.motive("abs")))
    assert F.base == out.base


def test_tensor_needs_cellular_left_factor():
    frag = fx.fragment_over("Pt")
    assert is_cellular(frag.vertices["circ-rel"].pair)
    assert not is_cellular(frag.vertices["circ-h1"].pair)
    with pytest.raises(NotCellular):
        TensorFunctor(frag.vertices["circ-h1"].pair, frag)


def test_tensor_with_lefschetz_shifts_cohomology():
    frag = fx.fragment_over("Pt")
    T = TensorFunctor(lefschetz_pair(frag.base), frag)
    for name, v in frag.vertices.items():
        F = T.category.realize_object(T.vertex_image(name))
        G = frag.category.realize_object(frag.motive(name))
        assert F.stalks[("p",)].invariants() == G.stalks[("p",)].invariants()


def test_twists_add_and_stabilize():
    frag = fx.circle_sequence()
    loc = Localization(frag)
    m = loc.localize(frag.motive("rel"))
    a = loc.twist(loc.twist(m, 2), -1)
    assert a.weight == loc.twist(m, 1).weight
    st = loc.stabilize(m, 2)
    assert loc.stage_of(st) == 2 and st.weight == 2
    assert loc.equal(m, st)
    assert not loc.equal(m, loc.localize(frag.motive("pt")))


def test_loc_hom_equal_detects_scaling():
    frag = fx.circle_sequence()
    loc = Localization(frag)
    C = frag.category
    f = C.edge("i")
    s = loc.localize(C.source(f))
    t = loc.localize(C.target(f))
    one = LocalizedMorphism(s, t, f)
    two = LocalizedMorphism(s, t, C.scale(f, 2))
    lifted = loc.stabilize_morphism(one, 1)
    assert loc_hom_equal(loc, one, lifted)
    assert not loc_hom_equal(loc, one, two)


def test_unroll_depth_is_recorded():
    frag = DeltaFragment(fx.point(), unroll_depth=3)
    frag.add_pair("u", fx.absolute(fx.point()))
    frag.add_map("id", "u", "u", SimplicialMap.identity(fx.point()))
    q = frag.quiver
    assert q.acyclic
    assert len(q.vertices) == 4
