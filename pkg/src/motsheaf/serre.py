"""The quotient of the free abelian category by the kernel of a realization.

Morphisms are spans ``M <-s- M' -t-> N`` with ``s`` invertible after
realization; they stand for ``t . s^-1``.  Equality, zero tests and
invariants go through the realization, which is faithful on the quotient.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .categories import AbelianCategory
from .freyd import (
    AdelmanMorphism,
    AdelmanObject,
    ExtendedFunctor,
    FreydCategory,
    Representation,
    extend_representation,
)
from .quiver import QuiverMorphism


class NotInvertibleInQuotient(ValueError):
    pass


class SquareDoesNotCommute(ValueError):
    pass


class NoCommonStage(ValueError):
    pass


class DoesNotFactor(ValueError):
    pass


@dataclass(frozen=True)
class QuotientObject:
    carrier: AdelmanObject


@dataclass(frozen=True)
class QuotientMorphism:
    source: QuotientObject
    target: QuotientObject
    s: AdelmanMorphism  # M' -> M, invertible after realization
    t: AdelmanMorphism  # M' -> N
    plain: bool = False  # s is the identity

    def __post_init__(self):
        if self.s.source != self.t.source:
            raise ValueError("span legs must share a source")
        if self.s.target != self.source.carrier or self.t.target != self.target.carrier:
            raise ValueError("span legs do not match the endpoints")


class UniversalCategory(AbelianCategory):
    """``A_R(F)``: Freyd category of the quiver modulo the kernel of ``F~``."""

    def __init__(self, rep: Representation, ring: str | None = None):
        self.rep = rep
        self.quiver = rep.quiver
        self.target_category = rep.category
        self.ring = ring or rep.category.ring
        self.freyd = FreydCategory(rep.quiver, self.ring)
        self.realizer: ExtendedFunctor = extend_representation(rep)
        self._real: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"UniversalCategory({len(self.quiver.vertices)} vertices over {self.target_category!r})"

    # embedding of the free category ------------------------------------
    def obj(self, carrier: AdelmanObject) -> QuotientObject:
        return QuotientObject(carrier)

    def vertex(self, v) -> QuotientObject:
        return QuotientObject(self.freyd.canonical_object(v))

    def plain(self, f: AdelmanMorphism) -> QuotientMorphism:
        return QuotientMorphism(QuotientObject(f.source), QuotientObject(f.target),
                                self.freyd.identity(f.source), f, True)

    def edge(self, label, coeff=1) -> QuotientMorphism:
        return self.plain(self.freyd.edge_morphism(label, coeff))

    def span(self, s: AdelmanMorphism, t: AdelmanMorphism) -> QuotientMorphism:
        if not self.target_category.is_iso(self.realizer(s)):
            raise NotInvertibleInQuotient("first leg does not realize to an isomorphism")
        return QuotientMorphism(QuotientObject(s.target), QuotientObject(t.target), s, t)

    def invert_kernel_iso(self, s: AdelmanMorphism) -> QuotientMorphism:
        """``s^-1`` as the span ``(s, id)``."""
        return self.span(s, self.freyd.identity(s.source))

    # realization -------------------------------------------------------
    def realize_object(self, x: QuotientObject):
        return self.realizer.on_object(x.carrier)

    def realize(self, f: QuotientMorphism):
        with self._lock:
            hit = self._real.get(f)
        if hit is not None:
            return hit
        T = self.target_category
        t = self.realizer(f.t)
        out = t if f.plain else T.compose(t, T.inverse(self.realizer(f.s)))
        with self._lock:
            return self._real.setdefault(f, out)

    __call__ = realize

    # category operations -----------------------------------------------
    def zero_object(self):
        return QuotientObject(self.freyd.zero_object())

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def identity(self, x):
        return self.plain(self.freyd.identity(x.carrier))

    def zero_morphism(self, x, y):
        return self.plain(self.freyd.zero_morphism(x.carrier, y.carrier))

    def _pullback(self, a: AdelmanMorphism, b: AdelmanMorphism):
        """Legs ``(p, q)`` of the pullback of ``a: X -> Z`` and ``b: Y -> Z``."""
        F = self.freyd
        diff = F.block_morphism([a.source, b.source], [a.target], [[a, F.neg(b)]])
        P, emb = F.kernel(diff)
        _, _, projs = F.direct_sum([a.source, b.source])
        return F.compose(projs[0], emb), F.compose(projs[1], emb)

    def _pushout(self, a: AdelmanMorphism, b: AdelmanMorphism):
        """Legs ``(p, q)`` of the pushout of ``a: Z -> X`` and ``b: Z -> Y``."""
        F = self.freyd
        diff = F.block_morphism([a.source], [a.target, b.target], [[a], [F.neg(b)]])
        Q, proj = F.cokernel(diff)
        _, incs, _ = F.direct_sum([a.target, b.target])
        return F.compose(proj, incs[0]), F.compose(proj, incs[1])

    def _common_source(self, f: QuotientMorphism, g: QuotientMorphism):
        """Rewrite two spans out of the same object over one first leg."""
        F = self.freyd
        if f.plain and g.plain:
            return f.s, f.t, g.t
        if f.s == g.s:
            return f.s, f.t, g.t
        if g.plain:
            return f.s, f.t, F.compose(g.t, f.s)
        if f.plain:
            return g.s, F.compose(f.t, g.s), g.t
        p, q = self._pullback(f.s, g.s)
        return F.compose(f.s, p), F.compose(f.t, p), F.compose(g.t, q)

    def compose(self, g, f):
        """``g . f`` for spans."""
        if f.target != g.source:
            raise ValueError("composition endpoint mismatch")
        F = self.freyd
        if g.plain:
            return QuotientMorphism(f.source, g.target, f.s, F.compose(g.t, f.t), f.plain)
        p, q = self._pullback(f.t, g.s)
        return QuotientMorphism(f.source, g.target, F.compose(f.s, p), F.compose(g.t, q))

    def add(self, f, g):
        if (f.source, f.target) != (g.source, g.target):
            raise ValueError("adding morphisms with different endpoints")
        s, tf, tg = self._common_source(f, g)
        return QuotientMorphism(f.source, f.target, s, self.freyd.add(tf, tg), f.plain and g.plain)

    def scale(self, f, c):
        return QuotientMorphism(f.source, f.target, f.s, self.freyd.scale(f.t, c), f.plain)

    def equal(self, f, g) -> bool:
        if (f.source, f.target) != (g.source, g.target):
            raise ValueError("equality test needs equal endpoints")
        return self.target_category.equal(self.realize(f), self.realize(g))

    def is_zero_object(self, x) -> bool:
        return self.target_category.is_zero_object(self.realize_object(x))

    def direct_sum(self, objs):
        objs = list(objs)
        total, incs, projs = self.freyd.direct_sum([o.carrier for o in objs])
        return QuotientObject(total), [self.plain(i) for i in incs], [self.plain(p) for p in projs]

    def block_morphism(self, sources, targets, entries):
        sources, targets = list(sources), list(targets)
        F = self.freyd
        if all(e is None or e.plain for row in entries for e in row):
            grid = [[None if e is None else e.t for e in row] for row in entries]
            return self.plain(F.block_morphism([s.carrier for s in sources], [t.carrier for t in targets], grid))
        src, _, projs = self.direct_sum(sources)
        tgt, incs, _ = self.direct_sum(targets)
        acc = self.zero_morphism(src, tgt)
        for i, row in enumerate(entries):
            for j, e in enumerate(row):
                if e is not None:
                    acc = self.add(acc, self.compose(incs[i], self.compose(e, projs[j])))
        return acc

    def kernel(self, f):
        K, emb = self.freyd.kernel(f.t)
        return QuotientObject(K), self.plain(self.freyd.compose(f.s, emb))

    def cokernel(self, f):
        C, proj = self.freyd.cokernel(f.t)
        return QuotientObject(C), self.plain(proj)

    def lift(self, mono, f):
        """``u`` with ``mono . u == f``."""
        F = self.freyd
        p, q = self._pullback(mono.t, f.t)
        try:
            u = self.span(F.compose(f.s, q), F.compose(mono.s, p))
        except NotInvertibleInQuotient:
            raise DoesNotFactor("morphism does not factor through the monomorphism") from None
        return QuotientMorphism(f.source, mono.source, u.s, u.t)

    def colift(self, epi, f):
        """``u`` with ``u . epi == f``."""
        s, te, tf = self._common_source(epi, f)
        r1, r2 = self._pushout(te, tf)
        if not self.target_category.is_iso(self.realizer(r2)):
            raise DoesNotFactor("morphism does not factor through the epimorphism")
        p1, p2 = self._pullback(r1, r2)
        return QuotientMorphism(epi.target, f.target, p1, p2)

    def invariants(self, x):
        return self.target_category.invariants(self.realize_object(x))

    def morphism_invariants(self, f):
        return self.target_category.morphism_invariants(self.realize(f))

    def describe(self, x):
        return self.target_category.describe(self.realize_object(x))


# ----------------------------------------------------------------------
# functors between quotient categories
# ----------------------------------------------------------------------

def _same_object(T, a, b) -> bool:
    return a == b or T.invariants(a) == T.invariants(b)


def _same_morphism(T, f, g) -> bool:
    if f.source == g.source and f.target == g.target:
        return T.equal(f, g)
    return T.morphism_invariants(f) == T.morphism_invariants(g)


class InducedExactFunctor:
    """``A(F) -> A(F')`` induced by a quiver morphism ``g`` with ``F' . g = F``."""

    def __init__(self, g: QuiverMorphism, source: UniversalCategory, target: UniversalCategory):
        if g.source != source.quiver or g.target != target.quiver:
            raise ValueError("quiver morphism does not match the categories")
        T = target.target_category
        for v in g.source.vertices:
            if not _same_object(T, source.rep.vertex(v), target.rep.vertex(g(v))):
                raise SquareDoesNotCommute(f"vertex {v!r}")
        for e in g.source.edges:
            if not _same_morphism(T, source.rep.edge_morphisms[e.label], target.rep.edge_morphisms[g.emap[e.label]]):
                raise SquareDoesNotCommute(f"edge {e.label!r}")
        self.g, self.source, self.target = g, source, target
        self.carrier_functor = source.freyd.induced_functor(g, target.freyd)

    def on_object(self, x: QuotientObject) -> QuotientObject:
        return QuotientObject(self.carrier_functor.on_object(x.carrier))

    def on_morphism(self, f: QuotientMorphism) -> QuotientMorphism:
        G = self.carrier_functor
        return QuotientMorphism(self.on_object(f.source), self.on_object(f.target),
                                G(f.s), G(f.t), f.plain)

    __call__ = on_morphism


def induced_exact_functor(g: QuiverMorphism, source: UniversalCategory, target: UniversalCategory):
    return InducedExactFunctor(g, source, target)


def restrict_representation(rep: Representation, vertices: Iterable) -> Representation:
    sub = rep.quiver.full_subquiver(vertices)
    return Representation(sub, rep.category,
                          {v: rep.vertex(v) for v in sub.vertices},
                          {e.label: rep.edge_morphisms[e.label] for e in sub.edges})


# ----------------------------------------------------------------------
# gluing along a directed family of full subquivers
# ----------------------------------------------------------------------

def _vertices_of(x) -> set:
    if isinstance(x, QuotientMorphism):
        return _vertices_of(x.s) | _vertices_of(x.t)
    if isinstance(x, QuotientObject):
        x = x.carrier
    if isinstance(x, AdelmanMorphism):
        return _vertices_of(x.source) | _vertices_of(x.target)
    if isinstance(x, AdelmanObject):
        return set(x.a1.vertices) | set(x.a0.vertices) | set(x.am1.vertices)
    raise TypeError(f"cannot locate {type(x).__name__}")


class GluedCategory:
    """Directed union of the quotient categories of the stages.

    Each operation runs in the first stage containing every vertex its
    arguments mention.
    """

    def __init__(self, rep: Representation, stages: Sequence[Iterable]):
        self.rep = rep
        self.stages = [frozenset(s) for s in stages]
        if not self.stages:
            raise ValueError("need at least one stage")
        for a in self.stages:
            for b in self.stages:
                if not any(a | b <= c for c in self.stages):
                    raise ValueError("stage family is not directed")
        self._cats: dict[int, UniversalCategory] = {}

    def stage(self, k: int) -> UniversalCategory:
        if k not in self._cats:
            self._cats[k] = UniversalCategory(restrict_representation(self.rep, self.stages[k]))
        return self._cats[k]

    def stage_index(self, *args) -> int:
        need = set()
        for a in args:
            need |= _vertices_of(a)
        for k, s in enumerate(self.stages):
            if need <= s:
                return k
        raise NoCommonStage(f"no stage contains {sorted(map(str, need))}")

    def category_for(self, *args) -> UniversalCategory:
        return self.stage(self.stage_index(*args))

    def __getattr__(self, name):
        # delegate any category operation to the stage holding its arguments
        if name.startswith("_"):
            raise AttributeError(name)

        def op(*args, **kw):
            located = [a for a in args if isinstance(a, (QuotientObject, QuotientMorphism))]
            cat = self.category_for(*located) if located else self.stage(len(self.stages) - 1)
            return getattr(cat, name)(*args, **kw)
        return op


def colimit_glue(rep: Representation, stages: Sequence[Iterable]) -> GluedCategory:
    return GluedCategory(rep, stages)
