import pytest

from motsheaf import fixtures as fx
from motsheaf.tensor_quiver import TensorSquare, associativity_relation, unit_pair


@pytest.fixture(scope="module")
def square():
    return TensorSquare(fx.segment_fragment("a", "b"), fx.segment_fragment("x", "y"))


@pytest.mark.parametrize("relation", ["identity_relation", "alpha_involution", "interchange", "unit_relation"])
def test_relations_hold(square, relation):
    results = getattr(square, relation)()
    assert results
    assert all(r.passed for r in results), [r.instance for r in results if not r.passed]


def test_interchange_sign_is_needed(square):
    """Without the Koszul sign the connecting edges fail to interchange."""
    C = square.category
    fl, el = "c", "c"
    a, b = square.left.edges[fl].lower, square.left.edges[fl].upper
    c, d = square.right.edges[el].lower, square.right.edges[el].upper
    lhs = C.compose(square.tensor_id(fl, d), square.id_tensor(a, el))
    rhs = C.compose(square.id_tensor(b, el, "x'"), square.tensor_id(fl, c))
    assert not C.equal(lhs, rhs)
    assert C.equal(lhs, C.neg(rhs))


def test_associator_is_inverse_pair():
    frag = fx.segment_fragment()
    pairs = [v.pair for v in frag.vertices.values()]
    one = unit_pair(frag.base)
    for p in pairs:
        assert associativity_relation(p, pairs[1], one).passed


def test_different_bases_rejected():
    with pytest.raises(ValueError):
        TensorSquare(fx.segment_fragment(), fx.circle_sequence())
