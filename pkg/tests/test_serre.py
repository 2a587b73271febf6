import pytest

from motsheaf.categories import ModuleCategory
from motsheaf.exact import ExactMatrix, FpModule, ModuleMorphism
from motsheaf.freyd import Representation
from motsheaf.quiver import Quiver, QuiverMorphism
from motsheaf.serre import (
    NoCommonStage,
    NotInvertibleInQuotient,
    SquareDoesNotCommute,
    UniversalCategory,
    colimit_glue,
    induced_exact_functor,
    restrict_representation,
)


def chain_rep(m1, m2, ring="Z"):
    """``a -e-> b -f-> c`` with 1x1 matrices."""
    q = Quiver.build("abc", [("e", "a", "b"), ("f", "b", "c")])
    Z = FpModule.free(1, ring)
    mor = lambda x: ModuleMorphism(Z, Z, ExactMatrix.from_rows([[x]], ring))  # noqa: E731
    return Representation(q, ModuleCategory(ring), {"a": Z, "b": Z, "c": Z}, {"e": mor(m1), "f": mor(m2)})


def test_iso_after_realization_is_iso():
    U = UniversalCategory(chain_rep(1, -1))
    e = U.edge("e")
    assert U.is_iso(e)
    assert not U.freyd.is_iso(e.t)
    inv = U.inverse(e)
    assert U.equal(U.compose(inv, e), U.identity(U.vertex("a")))


def test_zero_realization_is_zero():
    U = UniversalCategory(chain_rep(0, 2))
    assert U.is_zero(U.edge("e"))
    assert not U.freyd.is_zero(U.edge("e").t)
    assert not U.is_zero(U.edge("f"))


def test_multiplication_by_two_not_iso_over_z_but_over_q():
    assert not UniversalCategory(chain_rep(2, 1)).is_iso(UniversalCategory(chain_rep(2, 1)).edge("e"))
    UQ = UniversalCategory(chain_rep(2, 1, "Q"))
    assert UQ.is_iso(UQ.edge("e"))


def test_span_requires_invertible_first_leg():
    U = UniversalCategory(chain_rep(2, 1))
    with pytest.raises(NotInvertibleInQuotient):
        U.span(U.edge("e").t, U.freyd.identity(U.vertex("a").carrier))


def test_span_realizes_through_inverse():
    U = UniversalCategory(chain_rep(-1, 3))
    e = U.edge("e").t
    s = U.invert_kernel_iso(e)
    M = U.target_category
    assert M.equal(U.realize(s), M.inverse(U.realize(U.edge("e"))))


def test_cokernel_of_two():
    U = UniversalCategory(chain_rep(2, 1))
    C, q = U.cokernel(U.edge("e"))
    assert U.target_category.invariants(U.realize_object(C)) == (0, (2,))


def test_glue_stage_choice():
    rep = chain_rep(1, 2)
    G = colimit_glue(rep, ["ab", "abc"])
    U = UniversalCategory(rep)
    assert G.stage_index(U.edge("e")) == 0
    assert G.stage_index(U.edge("f")) == 1
    C, _ = G.cokernel(G.stage(1).edge("f"))
    assert G.stage(1).target_category.invariants(G.stage(1).realize_object(C)) == (0, (2,))


def test_glue_needs_directed_family():
    with pytest.raises(ValueError):
        colimit_glue(chain_rep(1, 1), ["ab", "bc"])
    G = colimit_glue(chain_rep(1, 1), ["a", "ab"])
    with pytest.raises(NoCommonStage):
        G.stage_index(UniversalCategory(chain_rep(1, 1)).vertex("c"))


def test_restriction_functor():
    rep = chain_rep(3, 1)
    small = restrict_representation(rep, "ab")
    Us, U = UniversalCategory(small), UniversalCategory(rep)
    g = QuiverMorphism.inclusion(small.quiver, rep.quiver)
    F = induced_exact_functor(g, Us, U)
    K, _ = Us.cokernel(Us.edge("e"))
    assert U.target_category.invariants(U.realize_object(F.on_object(K))) == (0, (3,))


def test_restriction_needs_commuting_square():
    a, b = chain_rep(3, 1), chain_rep(2, 1)
    g = QuiverMorphism.identity(a.quiver)
    with pytest.raises(SquareDoesNotCommute):
        induced_exact_functor(g, UniversalCategory(a), UniversalCategory(b))
