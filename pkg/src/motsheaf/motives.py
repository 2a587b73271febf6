"""Motivic constructible sheaves over a simplicial base.

A fragment is a finite piece of the quiver of pairs over S, oriented the way
cohomology maps go: a map of pairs ``(X, Y) -> (X', Y')`` gives an edge
``(X', Y') -> (X, Y)``, and a chain ``Z <= Y <= X`` gives the connecting edge
``(Y, Z, i) -> (X, Y, i + 1)``.  Its universal category, with the relative
cohomology sheaves as representation, is the category of motives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .freyd import ExtendedFunctor, Representation, extend_representation
from .pairs import (
    PairMap,
    SimplicialPairOverBase,
    base_change_check,
    product_pair,
    pullback_pair,
    relative_sheaf,
    type1_restriction,
    type2_connecting,
)
from .quiver import Edge, Quiver, QuiverMorphism, unroll_loops
from .serre import QuotientMorphism, QuotientObject, UniversalCategory
from .sheaves import (
    CellularSheaf,
    SheafCategory,
    pullback_sheaf,
    pullback_sheaf_morphism,
)
from .simplicial import SimplicialComplex, SimplicialMap, fibre_product


class BaseChangeFailed(ValueError):
    def __init__(self, vertex, witness=None):
        self.vertex, self.witness = vertex, witness
        msg = f"pair {vertex!r} fails the base change check"
        if witness is not None:
            msg += f" at face {witness}"
        super().__init__(msg)


class NotCellular(ValueError):
    pass


class InvalidEdge(ValueError):
    pass


@dataclass(frozen=True)
class DeltaVertex:
    name: Hashable
    pair: SimplicialPairOverBase
    certificate: bool = True


@dataclass(frozen=True)
class Type1Edge:
    """Cohomology edge ``target-pair -> source-pair`` of a map of pairs."""

    label: Hashable
    source: Hashable  # name of the source pair of the geometric map
    target: Hashable
    map: PairMap


@dataclass(frozen=True)
class Type2Edge:
    """Connecting edge ``(Y, Z, i) -> (X, Y, i + 1)``."""

    label: Hashable
    lower: Hashable
    upper: Hashable


def base_change_witness(p: SimplicialPairOverBase, ring: str = "Z"):
    """First face of the base along whose inclusion base change fails, or ``None``."""
    S = p.base
    for sigma in S.sorted_simplices:
        face = S.subcomplex([sigma])
        if not base_change_check(SimplicialMap.inclusion(face, S), p, ring):
            return sigma
    return None


class DeltaFragment:
    """A finite fragment of the quiver of pairs over ``base`` with its motives."""

    def __init__(self, base: SimplicialComplex, ring: str = "Z", unroll_depth: int = 2):
        self.base = base
        self.ring = ring
        self.unroll_depth = unroll_depth
        self.vertices: dict = {}
        self.edges: dict = {}
        self._by_pair: dict = {}
        self._frozen = None

    # declaration -------------------------------------------------------
    def add_pair(self, name, pair: SimplicialPairOverBase, check: bool = True) -> DeltaVertex:
        if self._frozen is not None:
            raise RuntimeError("fragment is already built")
        if pair.base != self.base:
            raise ValueError(f"pair {name!r} lives over a different base")
        if name in self.vertices:
            if self.vertices[name].pair != pair:
                raise ValueError(f"vertex name {name!r} reused for a different pair")
            return self.vertices[name]
        if check:
            w = base_change_witness(pair, self.ring)
            if w is not None:
                raise BaseChangeFailed(name, w)
        v = DeltaVertex(name, pair, True)
        self.vertices[name] = v
        self._by_pair.setdefault(pair, name)
        return v

    def name_of(self, pair: SimplicialPairOverBase):
        return self._by_pair.get(pair)

    def add_map(self, label, source, target, g: SimplicialMap) -> Type1Edge:
        """Type I edge from a map of pairs ``source -> target`` (cohomology goes back)."""
        m = PairMap(self.vertices[source].pair, self.vertices[target].pair, g)
        if m.source.degree != m.target.degree:
            raise InvalidEdge("a map of pairs keeps the degree")
        e = Type1Edge(label, source, target, m)
        self._add_edge(label, e)
        return e

    def add_connecting(self, label, lower, upper) -> Type2Edge:
        lo, up = self.vertices[lower].pair, self.vertices[upper].pair
        if lo.total != up.sub or lo.degree + 1 != up.degree:
            raise InvalidEdge("connecting edge needs (Y, Z, i) and (X, Y, i + 1)")
        if lo.f != up.f.restrict(up.sub):
            raise InvalidEdge("connecting edge needs the restricted structure map")
        e = Type2Edge(label, lower, upper)
        self._add_edge(label, e)
        return e

    def _add_edge(self, label, e):
        if self._frozen is not None:
            raise RuntimeError("fragment is already built")
        if label in self.edges:
            raise ValueError(f"edge label {label!r} reused")
        self.edges[label] = e

    # the quiver and its representation ---------------------------------
    def _edge_ends(self, e):
        if isinstance(e, Type1Edge):
            return e.target, e.source
        return e.lower, e.upper

    def sheaf_category(self) -> SheafCategory:
        return SheafCategory(self.base, self.ring)

    def realize_edge(self, e):
        if isinstance(e, Type1Edge):
            return type1_restriction(e.map, ring=self.ring)
        lo, up = self.vertices[e.lower].pair, self.vertices[e.upper].pair
        return type2_connecting(up.f, up.total, up.sub, lo.sub, lo.degree, self.ring, removed=up.removed)

    def build(self):
        if self._frozen is not None:
            return self._frozen
        q = Quiver(tuple(self.vertices), tuple(Edge(l, *self._edge_ends(e)) for l, e in self.edges.items()))
        if q.acyclic:
            work, proj = q, QuiverMorphism.identity(q)
        else:
            work, proj = unroll_loops(q, self.unroll_depth)
        objs = {v: relative_sheaf(self.vertices[proj(v)].pair, self.ring) for v in work.vertices}
        mors = {e.label: self.realize_edge(self.edges[proj.emap[e.label]]) for e in work.edges}
        rep = Representation(work, self.sheaf_category(), objs, mors)
        self._frozen = (q, work, proj, UniversalCategory(rep, self.ring))
        return self._frozen

    @property
    def quiver(self) -> Quiver:
        return self.build()[1]

    @property
    def category(self) -> UniversalCategory:
        return self.build()[3]

    def key(self, name):
        _, work, _, _ = self.build()
        if work.has_vertex(name):
            return name
        return (name, 0)

    def motive(self, name) -> QuotientObject:
        """``h^i_S(X, Y)`` for the named vertex."""
        return self.category.vertex(self.key(name))

    def edge(self, label, copy: int = 0) -> QuotientMorphism:
        _, work, _, _ = self.build()
        lbl = label if label in work.edge_map else (label, copy)
        return self.category.edge(lbl)

    def restrict(self, names: Iterable) -> "DeltaFragment":
        """Full sub-fragment on the given vertices."""
        names = [n for n in self.vertices if n in set(names)]
        sub = DeltaFragment(self.base, self.ring, self.unroll_depth)
        for n in names:
            sub.vertices[n] = self.vertices[n]
            sub._by_pair.setdefault(self.vertices[n].pair, n)
        for l, e in self.edges.items():
            a, b = self._edge_ends(e)
            if a in sub.vertices and b in sub.vertices:
                sub.edges[l] = e
        return sub

    def same_shape(self, other: "DeltaFragment") -> bool:
        return list(self.vertices) == list(other.vertices) and list(self.edges) == list(other.edges)


def betti_realize(frag: DeltaFragment, x):
    """Betti realization of a motive or a morphism of motives."""
    C = frag.category
    if isinstance(x, QuotientObject):
        return C.realize_object(x)
    return C.realize(x)


# ----------------------------------------------------------------------
# functors between fragments given by a vertex-and-edge-preserving rule
# ----------------------------------------------------------------------

class CarrierFunctor:
    """Exact functor ``A(frag) -> A(frag')`` mapping carriers entrywise."""

    def __init__(self, source: DeltaFragment, target: DeltaFragment, adelman_map):
        self.source, self.target = source, target
        self._map = adelman_map

    def on_object(self, x: QuotientObject) -> QuotientObject:
        return QuotientObject(self._map(x.carrier))

    def on_morphism(self, f: QuotientMorphism) -> QuotientMorphism:
        return QuotientMorphism(self.on_object(f.source), self.on_object(f.target),
                                self._map(f.s), self._map(f.t), f.plain)

    __call__ = on_morphism


def inverse_image(g: SimplicialMap, frag: DeltaFragment, check: bool = True):
    """Pull every pair of ``frag`` back along ``g: T -> S``.

    Returns ``(frag_T, functor)``; the functor acts on motives and morphisms.
    """
    if g.target != frag.base:
        raise ValueError("map must land in the fragment's base")
    out = DeltaFragment(g.source, frag.ring, frag.unroll_depth)
    pulled = {}
    for name, v in frag.vertices.items():
        pulled[name] = pullback_pair(g, v.pair)
        if check and not base_change_check(g, v.pair, frag.ring):
            raise BaseChangeFailed(name)
        out.add_pair(name, pulled[name], check=False)
    for label, e in frag.edges.items():
        if isinstance(e, Type1Edge):
            src, tgt = pulled[e.source], pulled[e.target]
            gm = e.map.g.mapping
            vmap = {(x, t): (gm[x], t) for (x, t) in src.total.vertices}
            out.add_map(label, e.source, e.target, SimplicialMap.build(src.total, tgt.total, vmap))
        else:
            out.add_connecting(label, e.lower, e.upper)
    _check_square(frag, out, lambda F: pullback_sheaf(g, F), lambda phi: pullback_sheaf_morphism(g, phi))
    return out, CarrierFunctor(frag, out, lambda a: a)


def change_coefficients(frag: DeltaFragment, ring: str = "Q"):
    """The same fragment over ``ring``; returns ``(frag', functor)``."""
    out = DeltaFragment(frag.base, ring, frag.unroll_depth)
    for name, v in frag.vertices.items():
        out.add_pair(name, v.pair, check=False)
    for label, e in frag.edges.items():
        out._add_edge(label, e)
    return out, CarrierFunctor(frag, out, lambda a: a.to_ring(ring))


def _check_square(frag: DeltaFragment, out: DeltaFragment, on_obj, on_mor):
    """Vertices and edges of ``out`` realize like the transported realizations of ``frag``."""
    C = out.sheaf_category()
    _, work, proj, cat = frag.build()
    _, work2, proj2, cat2 = out.build()
    for v in work.vertices:
        a = on_obj(cat.rep.vertex(v))
        b = cat2.rep.vertex(v)
        if C.invariants(a) != C.invariants(b):
            from .serre import SquareDoesNotCommute
            raise SquareDoesNotCommute(f"vertex {v!r}")
    for e in work.edges:
        a = on_mor(cat.rep.edge_morphisms[e.label])
        b = cat2.rep.edge_morphisms[e.label]
        if C.morphism_invariants(a) != C.morphism_invariants(b):
            from .serre import SquareDoesNotCommute
            raise SquareDoesNotCommute(f"edge {e.label!r}")


# ----------------------------------------------------------------------
# tensor with a cellular pair
# ----------------------------------------------------------------------

def is_cellular(p: SimplicialPairOverBase, ring: str = "Z") -> bool:
    """Relative cohomology concentrated in the pair's degree, with free stalks."""
    for n in range(p.total.dim + 2):
        F = relative_sheaf(p.with_degree(n), ring)
        if n != p.degree and not all(m.is_zero() for m in F.stalks.values()):
            return False
        if n == p.degree and not all(m.is_free() for m in F.stalks.values()):
            return False
    return True


def declare_tensor_edge(T: DeltaFragment, left: SimplicialPairOverBase, label, e, prod: dict, key):
    """Declare ``id (x) e`` in ``T``; ``prod`` maps vertex names to product pairs
    already declared under ``key("x", name)``.  Returns how to evaluate the edge."""
    if isinstance(e, Type1Edge):
        src, tgt = prod[e.source], prod[e.target]
        gm = e.map.g.mapping
        vmap = {(z, x): (z, gm[x]) for (z, x) in src.total.vertices}
        T.add_map(key("x", label), key("x", e.source), key("x", e.target),
                  SimplicialMap.build(src.total, tgt.total, vmap))
        return ("plain", key("x", label))
    lo, up = prod[e.lower], prod[e.upper]
    # excision pair (W'xA u Z'xB, W'xA u Z'xC) inside Z'xA
    A = up.total
    wa = _left_part(left, A, up)
    big = A.subcomplex(up.sub.simplices | wa.simplices)
    small = A.subcomplex(lo.sub.simplices | wa.simplices)
    exc = SimplicialPairOverBase(up.f.restrict(big), small, lo.degree)
    T.add_pair(key("exc", label), exc, check=False)
    T.add_map(key("exc-map", label), key("x", e.lower), key("exc", label),
              SimplicialMap.build(lo.total, big, {v: v for v in lo.total.vertices}))
    T.add_connecting(key("exc-conn", label), key("exc", label), key("x", e.upper))
    return ("span", key("exc-map", label), key("exc-conn", label))


def edge_value(T: DeltaFragment, how) -> QuotientMorphism:
    kind, *rest = how
    if kind == "plain":
        return T.edge(rest[0])
    return T.category.span(T.edge(rest[0]).t, T.edge(rest[1]).t)


class TensorFunctor:
    """``h^j_S(Z, W) (x) -`` on the motives of a fragment.

    Vertices go to product pairs; a map of pairs goes to ``id x g``; a
    connecting edge goes to the span made of the excision edge and the
    connecting edge of the product triple.
    """

    def __init__(self, left: SimplicialPairOverBase, frag: DeltaFragment, check: bool = True):
        if left.base != frag.base:
            raise ValueError("tensor factors must share a base")
        if check and not is_cellular(left, frag.ring):
            raise NotCellular(f"{left.label()} is not cellular")
        self.left, self.source = left, frag
        self.target = DeltaFragment(frag.base, frag.ring, frag.unroll_depth)
        T = self.target
        prod = {}
        for name, v in frag.vertices.items():
            prod[name] = product_pair(left, v.pair, frag.ring, check_flat=False)
            T.add_pair(("x", name), prod[name], check=False)
        self._edge_values = {label: declare_tensor_edge(T, left, label, e, prod, lambda *k: k)
                             for label, e in frag.edges.items()}
        self._extension: ExtendedFunctor | None = None

    @property
    def category(self) -> UniversalCategory:
        return self.target.category

    def _edge_value(self, label):
        return edge_value(self.target, self._edge_values[label])

    def extension(self) -> ExtendedFunctor:
        if self._extension is None:
            _, work, proj, _ = self.source.build()
            objs = {v: self.target.motive(("x", proj(v))) for v in work.vertices}
            mors = {e.label: self._edge_value(proj.emap[e.label]) for e in work.edges}
            self._extension = extend_representation(Representation(work, self.category, objs, mors))
        return self._extension

    def vertex_image(self, name) -> QuotientObject:
        return self.target.motive(("x", name))

    def on_object(self, x: QuotientObject) -> QuotientObject:
        return self.extension().on_object(x.carrier)

    def on_morphism(self, f: QuotientMorphism):
        ext = self.extension()
        U = self.category
        t = ext(f.t)
        if f.plain:
            return t
        return U.compose(t, U.inverse(ext(f.s)))

    __call__ = on_morphism


def _left_part(left: SimplicialPairOverBase, A: SimplicialComplex, up: SimplicialPairOverBase) -> SimplicialComplex:
    """``W' x A`` inside the staircase product ``Z' x A``."""
    w = left.sub.simplices
    return A.subcomplex([s for s in A.simplices if left.total.simplex(v[0] for v in s) in w])


def tensor(left: SimplicialPairOverBase, frag: DeltaFragment, check: bool = True) -> TensorFunctor:
    return TensorFunctor(left, frag, check)


# ----------------------------------------------------------------------
# the Lefschetz pair and localization
# ----------------------------------------------------------------------

def circle(name: str = "Circ") -> SimplicialComplex:
    return SimplicialComplex.from_facets([("c0", "c1"), ("c1", "c2"), ("c0", "c2")], name=name)


def lefschetz_pair(base: SimplicialComplex) -> SimplicialPairOverBase:
    """``h^1_S(S x Circ, S x {v})``: the desk model of the Lefschetz object."""
    pt = SimplicialComplex.point("*")
    c = circle()
    P, pr_s, pr_c = fibre_product(SimplicialMap.constant(base, pt), SimplicialMap.constant(c, pt))
    sub = pr_c.preimage(c.subcomplex([("c0",)]))
    return SimplicialPairOverBase(pr_s, sub, 1, name="L")


@dataclass(frozen=True)
class LocalizedMotive:
    """``M(w)``, i.e. ``L^-w M``, with ``M`` a motive of ``fragment``."""

    fragment: DeltaFragment = field(compare=False)
    motive: QuotientObject
    weight: int = 0


@dataclass(frozen=True)
class LocalizedMorphism:
    source: LocalizedMotive
    target: LocalizedMotive
    morphism: QuotientMorphism


class Localization:
    """Lefschetz-stabilized motives over one fragment.

    Stage ``k`` is the fragment tensored ``k`` times with the Lefschetz pair;
    ``(M, w)`` at stage ``k`` is identified with ``(L M, w + 1)`` at stage
    ``k + 1``.
    """

    def __init__(self, frag: DeltaFragment):
        self.base_fragment = frag
        self.L = lefschetz_pair(frag.base)
        self._stages = [frag]
        self._functors: list[TensorFunctor] = []

    def stage(self, k: int) -> DeltaFragment:
        while len(self._stages) <= k:
            t = TensorFunctor(self.L, self._stages[-1], check=(len(self._functors) == 0))
            self._functors.append(t)
            self._stages.append(t.target)
        return self._stages[k]

    def functor(self, k: int) -> TensorFunctor:
        """``L (x) -`` from stage ``k`` to stage ``k + 1``."""
        self.stage(k + 1)
        return self._functors[k]

    def stage_of(self, lm: LocalizedMotive) -> int:
        for k, f in enumerate(self._stages):
            if f is lm.fragment:
                return k
        raise ValueError("motive does not belong to this localization")

    def localize(self, m: QuotientObject, stage: int = 0) -> LocalizedMotive:
        return LocalizedMotive(self.stage(stage), m, 0)

    def lefschetz(self, lm: LocalizedMotive) -> LocalizedMotive:
        """``L (x) M`` at the same weight (that is, ``M(w - 1)``)."""
        k = self.stage_of(lm)
        return LocalizedMotive(self.stage(k + 1), self.functor(k).on_object(lm.motive), lm.weight)

    def twist(self, lm: LocalizedMotive, w: int) -> LocalizedMotive:
        return LocalizedMotive(lm.fragment, lm.motive, lm.weight + w)

    def stabilize(self, lm: LocalizedMotive, k: int) -> LocalizedMotive:
        """Apply ``L`` ``k`` times, raising the weight to keep the class."""
        for _ in range(k):
            lm = self.lefschetz(lm)
            lm = LocalizedMotive(lm.fragment, lm.motive, lm.weight + 1)
        return lm

    def stabilize_morphism(self, f: LocalizedMorphism, k: int) -> LocalizedMorphism:
        s, t, m = f.source, f.target, f.morphism
        for _ in range(k):
            j = self.stage_of(s)
            T = self.functor(j)
            m = T.on_morphism(m)
            s = LocalizedMotive(T.target, m.source, s.weight + 1)
            t = LocalizedMotive(T.target, m.target, t.weight + 1)
        return LocalizedMorphism(s, t, m)

    def _common(self, a: LocalizedMotive, b: LocalizedMotive):
        """Bring both to the same weight and the same stage."""
        w = max(a.weight, b.weight)
        a2 = self.stabilize(a, w - a.weight)
        b2 = self.stabilize(b, w - b.weight)
        return a2, b2

    def realize(self, lm: LocalizedMotive) -> CellularSheaf:
        return lm.fragment.category.realize_object(lm.motive)

    def equal(self, a: LocalizedMotive, b: LocalizedMotive) -> bool:
        """Isomorphism of stabilized realizations."""
        a2, b2 = self._common(a, b)
        C = a2.fragment.sheaf_category()
        return C.invariants(self.realize(a2)) == C.invariants(self.realize(b2))

    def hom_equal(self, f: LocalizedMorphism, g: LocalizedMorphism) -> bool:
        w = max(f.source.weight, g.source.weight)
        f2 = self.stabilize_morphism(f, w - f.source.weight)
        g2 = self.stabilize_morphism(g, w - g.source.weight)
        C = f2.source.fragment.sheaf_category()
        rf = f2.source.fragment.category.realize(f2.morphism)
        rg = g2.source.fragment.category.realize(g2.morphism)
        if rf.source != rg.source or rf.target != rg.target:
            return False
        return C.equal(rf, rg)


def loc_hom_equal(loc: Localization, f: LocalizedMorphism, g: LocalizedMorphism) -> bool:
    return loc.hom_equal(f, g)
