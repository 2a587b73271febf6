from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from motsheaf.exact import (
    NO_SOLUTION,
    ExactMatrix,
    FpModule,
    ModuleMorphism,
    RingMismatch,
    colift_through_epi,
    determinant,
    invariant_factors,
    lift_through_mono,
    module_cokernel,
    module_image,
    module_kernel,
    nullspace,
    smith_normal_form,
    solve_lift,
    tensor_coefficients,
)

entries = st.integers(-3, 3)


@st.composite
def int_matrices(draw, max_dim=4):
    m = draw(st.integers(0, max_dim))
    n = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m))
    return ExactMatrix.from_rows(rows, "Z", ncols=n)


def test_smith_small_example():
    s, u, v = smith_normal_form(ExactMatrix.from_rows([[2, 4], [6, 8]]))
    assert s.diagonal_nonzero() == [2, 4]


def test_rational_smith_diagonal_is_one():
    m = ExactMatrix.from_rows([[2, 4], [6, 8]], "Q")
    assert invariant_factors(m) == [1, 1]


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_smith_decomposition(a):
    s, u, v = smith_normal_form(a)
    assert u @ a @ v == s
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    d = s.diagonal_nonzero()
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    for i in range(s.nrows):
        for j in range(s.ncols):
            if i != j:
                assert s[i, j] == 0


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_invariant_factors_match_sympy(a):
    if a.nrows == 0:
        return
    ref = [int(x) for x in sympy_invariant_factors(Matrix(a.tolist()), domain=ZZ) if x != 0]
    assert invariant_factors(a) == [abs(x) for x in ref]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_nullspace_is_kernel(a):
    ns = nullspace(a)
    assert (a @ ns).is_zero()
    assert ns.ncols == a.ncols - a.rank()


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.lists(entries, min_size=4, max_size=4))
def test_solve_right_consistent(a, xs):
    x = ExactMatrix.from_rows([[c] for c in xs[:a.ncols]], "Z", ncols=1)
    b = a @ x
    sol = solve_lift(a, b)
    assert sol is not NO_SOLUTION
    assert a @ sol == b


def test_solve_detects_divisibility():
    a = ExactMatrix.from_rows([[2]])
    assert solve_lift(a, ExactMatrix.from_rows([[1]])) is NO_SOLUTION
    assert solve_lift(a.to_ring("Q"), ExactMatrix.from_rows([[1]], "Q"))[0, 0] == Fraction(1, 2)


def test_mixed_rings_rejected():
    with pytest.raises(RingMismatch):
        ExactMatrix.identity(2) @ ExactMatrix.identity(2, "Q")


def test_module_invariants():
    m = FpModule(2, ExactMatrix.from_rows([[2, 0], [0, 3]]))
    assert m.invariants() == (0, (6,))
    assert FpModule.from_invariants(1, (2,)).describe() == "Z^1 + Z/2"
    assert tensor_coefficients(FpModule.cyclic(2)).is_zero()


def test_multiplication_by_two():
    Z = FpModule.free(1)
    two = ModuleMorphism(Z, Z, ExactMatrix.from_rows([[2]]))
    K, _ = module_kernel(two)
    C, q = module_cokernel(two)
    assert K.is_zero()
    assert C.invariants() == (0, (2,))
    assert (q @ two).is_zero()


def test_torsion_respects_relations():
    Z2 = FpModule.cyclic(2)
    Z = FpModule.free(1)
    with pytest.raises(ValueError):
        ModuleMorphism(Z2, Z, ExactMatrix.from_rows([[1]]))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_kernel_cokernel_image(data):
    a = data.draw(int_matrices(3))
    src, tgt = FpModule.free(a.ncols), FpModule.free(a.nrows)
    f = ModuleMorphism(src, tgt, a)
    K, k = module_kernel(f)
    C, q = module_cokernel(f)
    im, e, m = module_image(f)
    assert (f @ k).is_zero() and (q @ f).is_zero()
    assert (m @ e).equals(f)
    # rank-nullity over the fraction field
    assert K.rank + im.rank == a.ncols
    assert C.rank + im.rank == a.nrows
    # the kernel embedding is universal for maps into the kernel
    assert lift_through_mono(k, k).equals(ModuleMorphism.identity(K))
    assert colift_through_epi(q, q).equals(ModuleMorphism.identity(C))
