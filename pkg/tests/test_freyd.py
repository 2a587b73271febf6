import random

import pytest
from hypothesis import given, settings, strategies as st

from motsheaf.categories import ModuleCategory
from motsheaf.exact import ExactMatrix, FpModule, ModuleMorphism
from motsheaf.fixtures import random_representation
from motsheaf.freyd import FreydCategory, NotAMorphism, Representation, extend_representation
from motsheaf.quiver import Quiver


def arrow():
    return Quiver.build("ab", [("e", "a", "b")])


def test_edge_is_neither_mono_nor_epi_in_free_category():
    F = FreydCategory(arrow())
    e = F.edge_morphism("e")
    assert not F.is_zero(e)
    assert not F.is_mono(e) and not F.is_epi(e)
    K, k = F.kernel(e)
    assert F.is_zero(F.compose(e, k))
    assert not F.is_zero_object(K)


def test_scaling_distinguishes_over_z_only_up_to_zero():
    F = FreydCategory(arrow())
    e = F.edge_morphism("e")
    assert not F.equal(F.scale(e, 2), e)
    assert F.equal(F.sub(F.scale(e, 2), e), e)


def test_composition_endpoints_checked():
    F = FreydCategory(arrow())
    e = F.edge_morphism("e")
    with pytest.raises(NotAMorphism):
        F.compose(e, e)


def test_kernel_universal_property():
    F = FreydCategory(arrow())
    e = F.edge_morphism("e")
    K, k = F.kernel(e)
    C, q = F.cokernel(e)
    assert F.equal(F.compose(k, F.lift(k, k)), k)
    assert F.equal(F.compose(F.colift(q, q), q), q)
    assert F.is_mono(k) and F.is_epi(q)


def _rep(matrix, ring="Z"):
    a, b = FpModule.free(len(matrix[0]), ring), FpModule.free(len(matrix), ring)
    f = ModuleMorphism(a, b, ExactMatrix.from_rows(matrix, ring))
    return Representation(arrow(), ModuleCategory(ring), {"a": a, "b": b}, {"e": f})


def test_extension_on_kernel_and_cokernel():
    rep = _rep([[2, 0], [0, 0]])
    F = FreydCategory(rep.quiver)
    ext = extend_representation(rep)
    e = F.edge_morphism("e")
    K, _ = F.kernel(e)
    C, _ = F.cokernel(e)
    assert ext.on_object(K).invariants() == (1, ())
    assert ext.on_object(C).invariants() == (1, (2,))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["Z", "Q"]))
def test_extension_is_exact(seed, ring):
    rep = random_representation(random.Random(seed), ring, max_vertices=3, max_dim=3)
    F = FreydCategory(rep.quiver, ring)
    ext = extend_representation(rep)
    M = rep.category
    for e in rep.quiver.edges:
        f = F.edge_morphism(e.label)
        assert M.equal(ext(f), rep.edge_morphisms[e.label])
        K, k = F.kernel(f)
        C, q = F.cokernel(f)
        assert M.invariants(ext.on_object(K)) == M.invariants(M.kernel(ext(f))[0])
        assert M.invariants(ext.on_object(C)) == M.invariants(M.cokernel(ext(f))[0])
        assert M.is_zero(M.compose(ext(f), ext(k)))
        assert M.is_mono(ext(k)) and M.is_epi(ext(q))
