"""Computable abelian categories used as realization targets."""

from __future__ import annotations

from typing import Any, Sequence

from .exact import (
    ExactMatrix,
    FpModule,
    ModuleMorphism,
    coerce,
    colift_through_epi,
    direct_sum_modules,
    lift_through_mono,
    module_cokernel,
    module_kernel,
)


class AbelianCategory:
    """Operation dictionary of an R-linear abelian category.

    Subclasses supply the primitive operations; the derived ones (image,
    monic/epic tests, inverses) are computed from kernels and cokernels.
    """

    ring: str

    # primitives --------------------------------------------------------
    def zero_object(self): raise NotImplementedError
    def identity(self, x): raise NotImplementedError
    def zero_morphism(self, x, y): raise NotImplementedError
    def source(self, f): raise NotImplementedError
    def target(self, f): raise NotImplementedError
    def compose(self, g, f): raise NotImplementedError
    def add(self, f, g): raise NotImplementedError
    def scale(self, f, c): raise NotImplementedError
    def equal(self, f, g) -> bool: raise NotImplementedError
    def is_zero_object(self, x) -> bool: raise NotImplementedError
    def direct_sum(self, objs: Sequence) -> Any: raise NotImplementedError
    def block_morphism(self, sources: Sequence, targets: Sequence, entries) -> Any: raise NotImplementedError
    def kernel(self, f): raise NotImplementedError
    def cokernel(self, f): raise NotImplementedError
    def lift(self, mono, f): raise NotImplementedError
    def colift(self, epi, f): raise NotImplementedError
    def invariants(self, x): raise NotImplementedError
    def morphism_invariants(self, f): raise NotImplementedError

    # derived -----------------------------------------------------------
    def neg(self, f):
        return self.scale(f, -1)

    def sub(self, f, g):
        return self.add(f, self.neg(g))

    def is_zero(self, f) -> bool:
        return self.equal(f, self.zero_morphism(self.source(f), self.target(f)))

    def is_mono(self, f) -> bool:
        return self.is_zero_object(self.kernel(f)[0])

    def is_epi(self, f) -> bool:
        return self.is_zero_object(self.cokernel(f)[0])

    def is_iso(self, f) -> bool:
        return self.is_mono(f) and self.is_epi(f)

    def inverse(self, f):
        return self.lift(f, self.identity(self.target(f)))

    def image(self, f):
        """``(im, epi, mono)`` with ``mono . epi == f``."""
        _, emb = self.kernel(f)
        im, q = self.cokernel(emb)
        return im, q, self.colift(q, f)

    def isomorphic(self, x, y) -> bool:
        return self.invariants(x) == self.invariants(y)

    def direct_sum_object(self, objs):
        return self.direct_sum(objs)[0]


class ModuleCategory(AbelianCategory):
    """Finitely presented modules over Z or Q."""

    def __init__(self, ring: str = "Z"):
        self.ring = ring

    def __repr__(self):
        return f"ModuleCategory({self.ring})"

    def __eq__(self, other):
        return isinstance(other, ModuleCategory) and other.ring == self.ring

    def __hash__(self):
        return hash(("ModuleCategory", self.ring))

    def zero_object(self):
        return FpModule.zero(self.ring)

    def identity(self, x):
        return ModuleMorphism.identity(x)

    def zero_morphism(self, x, y):
        return ModuleMorphism.zero(x, y)

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def compose(self, g, f):
        return g @ f

    def add(self, f, g):
        return f + g

    def scale(self, f, c):
        return f.scale(c)

    def equal(self, f, g):
        return f.equals(g)

    def is_zero_object(self, x):
        return x.is_zero()

    def direct_sum(self, objs):
        objs = list(objs)
        total = direct_sum_modules(objs, self.ring)
        incs, projs, offset = [], [], 0
        z, one = coerce(0, self.ring), coerce(1, self.ring)
        N = total.ngens
        for m in objs:
            n = m.ngens
            unit_n = [tuple(one if k == j else z for k in range(n)) for j in range(n)]
            blank = (z,) * n
            inc = tuple(unit_n[i - offset] if offset <= i < offset + n else blank for i in range(N))
            proj = tuple((z,) * (offset + j) + (one,) + (z,) * (N - offset - j - 1) for j in range(n))
            incs.append(ModuleMorphism(m, total, ExactMatrix(N, n, inc, self.ring), check=False))
            projs.append(ModuleMorphism(total, m, ExactMatrix(n, N, proj, self.ring), check=False))
            offset += n
        return total, incs, projs

    def block_morphism(self, sources, targets, entries):
        src = direct_sum_modules(list(sources), self.ring)
        tgt = direct_sum_modules(list(targets), self.ring)
        z = coerce(0, self.ring)
        offs = [0]
        for s in sources:
            offs.append(offs[-1] + s.ngens)
        rows = []
        for i, t in enumerate(targets):
            block = [[z] * src.ngens for _ in range(t.ngens)]
            for j in range(len(sources)):
                e = entries[i][j]
                if e is None:
                    continue
                for r, line in enumerate(e.matrix.data):
                    block[r][offs[j]:offs[j + 1]] = line
            rows.extend(tuple(r) for r in block)
        mat = ExactMatrix(len(rows), src.ngens, tuple(rows), self.ring)
        return ModuleMorphism(src, tgt, mat, check=False)

    def kernel(self, f):
        return module_kernel(f)

    def cokernel(self, f):
        return module_cokernel(f)

    def lift(self, mono, f):
        return lift_through_mono(mono, f)

    def colift(self, epi, f):
        return colift_through_epi(epi, f)

    def invariants(self, x):
        return x.invariants()

    def morphism_invariants(self, f):
        im = self.image(f)[0]
        return (self.invariants(f.source), self.invariants(f.target), im.invariants(),
                self.kernel(f)[0].invariants(), self.cokernel(f)[0].invariants())

    def describe(self, x):
        return x.describe()


def cohomology_at(C: AbelianCategory, d_in, d_out):
    """``(H, iota, q)``: ``H = im(ker d_out -> coker d_in)`` with ``iota: ker -> X``
    and ``q: ker -> H`` the quotient onto cohomology."""
    _, iota = C.kernel(d_out)
    _, pi = C.cokernel(d_in)
    h, q, _ = C.image(C.compose(pi, iota))
    return h, iota, q


def induced_on_cohomology(C: AbelianCategory, src_data, tgt_data, phi):
    """Map on cohomology induced by a chain map component ``phi``."""
    _, iota_a, q_a = src_data
    _, iota_b, q_b = tgt_data
    k = C.lift(iota_b, C.compose(phi, iota_a))
    return C.colift(q_a, C.compose(q_b, k))
