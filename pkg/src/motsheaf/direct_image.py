"""Direct images of motives along a map of bases, via filtration complexes.

For a pair ``(f: X -> S, Y, i)`` and a closed filtration ``S_a`` adapted to
it, the complex ``K`` has terms ``h^{i+a}_Q(X_a, Y_a u X_{a-1})`` where
``X_a = f^-1(S_a)``.  The differential is the connecting map of the triple
``Y_{a+1} u X_{a-1} <= Y_{a+1} u X_a <= X_{a+1}`` composed with the inverse of
the excision isomorphism ``(X_a, Y_a u X_{a-1}) ~ (Y_{a+1} u X_a, Y_{a+1} u X_{a-1})``.
Each term is a representation of the fragment's quiver, so it extends
exactly to all motives; ``r^j g_*`` is the cohomology of the extended complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .categories import AbelianCategory, cohomology_at, induced_on_cohomology
from .exact import FpModule, ModuleMorphism
from .freyd import AdelmanObject, Representation, extend_representation
from .motives import DeltaFragment, Type1Edge, Type2Edge, base_change_witness
from .pairs import SimplicialPairOverBase, relative_sheaf
from .serre import QuotientMorphism, QuotientObject, UniversalCategory
from .sheaves import CellularSheaf, Filtration, codim_one_pairs, derived_pushforward_oracle
from .simplicial import SimplicialComplex, SimplicialMap, barycentric_subdivision, subdivide_map


class AdaptednessViolated(ValueError):
    pass


class UnsupportedMap(ValueError):
    pass


class NotARefinement(ValueError):
    pass


class NoCommonAdaptedFiltration(ValueError):
    pass


class NotExact(ValueError):
    pass


# ----------------------------------------------------------------------
# filtrations relative to a map
# ----------------------------------------------------------------------

def relative_filtration(g: SimplicialMap) -> Filtration:
    """``T_a``: faces whose dimension exceeds that of their image by at most ``a``."""
    S = g.source
    rel = {s: len(s) - len(g(s)) for s in S.simplices}
    top = max(rel.values(), default=0)
    return Filtration(tuple(S.subcomplex([s for s in S.simplices if rel[s] <= a]) for a in range(top + 1)))


def _layer_sheaf(F: CellularSheaf, big: SimplicialComplex, small: SimplicialComplex) -> CellularSheaf:
    """``F`` on ``big`` extended by zero from ``big - small``."""
    z = FpModule.zero(F.ring)
    stalks = {s: (z if s in small.simplices else F.stalks[s]) for s in big.simplices}
    res = {}
    for a, b, _ in codim_one_pairs(big):
        if a in small.simplices:
            res[(a, b)] = ModuleMorphism.zero(stalks[a], stalks[b])
        else:
            res[(a, b)] = F.restrictions[(a, b)]
    return CellularSheaf(big, stalks, res, F.ring, check=False)


def adapted_relative(F: CellularSheaf, g: SimplicialMap, filt: Filtration) -> bool:
    """``R^n g_*`` of each filtration layer of ``F`` vanishes for ``n != a``."""
    for a in range(filt.length):
        big, small = filt.step(a), filt.step(a - 1)
        if not big.simplices:
            continue
        layer = _layer_sheaf(F, big, small)
        gb = g.restrict(big)
        for n in range(big.dim + 1):
            if n == a:
                continue
            R = derived_pushforward_oracle(gb, layer, n)
            if not all(m.is_zero() for m in R.stalks.values()):
                return False
    return True


def adapted_check_pair(p: SimplicialPairOverBase, g: SimplicialMap, filt: Filtration, ring: str = "Z") -> bool:
    """All relative cohomology sheaves of the pair are adapted."""
    for n in range(p.total.dim + 1):
        if not adapted_relative(relative_sheaf(p.with_degree(n), ring), g, filt):
            return False
    return True


@dataclass
class AdaptedFragment:
    fragment: DeltaFragment
    filtration: Filtration
    certificates: dict
    excluded: list = field(default_factory=list)


def adapted_fragment(frag: DeltaFragment, filt: Filtration | None = None,
                     g: SimplicialMap | None = None) -> AdaptedFragment:
    """Keep the vertices adapted to ``filt`` (skeletal, over a point, by default)."""
    if g is None:
        g = SimplicialMap.constant(frag.base, SimplicialComplex.point("*"))
    filt = filt or relative_filtration(g)
    certs = {n: adapted_check_pair(v.pair, g, filt, frag.ring) for n, v in frag.vertices.items()}
    keep = [n for n, ok in certs.items() if ok]
    return AdaptedFragment(frag.restrict(keep), filt, certs, [n for n, ok in certs.items() if not ok])


# ----------------------------------------------------------------------
# complexes in an abelian category
# ----------------------------------------------------------------------

@dataclass
class FiltrationComplex:
    """Bounded cochain complex; ``terms[k]`` sits in degree ``offset + k``."""

    category: AbelianCategory
    terms: list
    diffs: list
    offset: int = 0

    def degree_range(self):
        return range(self.offset, self.offset + len(self.terms))

    def term(self, n):
        k = n - self.offset
        if 0 <= k < len(self.terms):
            return self.terms[k]
        return self.category.zero_object()

    def diff(self, n):
        """``d: K^n -> K^{n+1}``."""
        k = n - self.offset
        if 0 <= k < len(self.diffs):
            return self.diffs[k]
        return self.category.zero_morphism(self.term(n), self.term(n + 1))

    def d_squared_zero(self) -> bool:
        C = self.category
        return all(C.is_zero(C.compose(self.diffs[k + 1], self.diffs[k])) for k in range(len(self.diffs) - 1))

    def cohomology_data(self, n):
        return cohomology_at(self.category, self.diff(n - 1), self.diff(n))

    def cohomology(self, n):
        return self.cohomology_data(n)[0]


@dataclass
class ChainMap:
    source: FiltrationComplex
    target: FiltrationComplex
    components: dict  # degree -> morphism

    def component(self, n):
        if n in self.components:
            return self.components[n]
        C = self.source.category
        return C.zero_morphism(self.source.term(n), self.target.term(n))

    def is_chain_map(self) -> bool:
        C = self.source.category
        degs = set(self.source.degree_range()) | set(self.target.degree_range())
        for n in degs:
            lhs = C.compose(self.target.diff(n), self.component(n))
            rhs = C.compose(self.component(n + 1), self.source.diff(n))
            if not C.equal(lhs, rhs):
                return False
        return True

    def on_cohomology(self, n):
        C = self.source.category
        return induced_on_cohomology(C, self.source.cohomology_data(n), self.target.cohomology_data(n),
                                     self.component(n))


@dataclass
class DoubleComplex:
    """``C^{p,a}`` with horizontal maps in ``p`` and vertical maps in ``a``."""

    category: AbelianCategory
    grid: dict            # (p, a) -> object
    horizontal: dict      # (p, a) -> C^{p,a} -> C^{p+1,a}
    vertical: dict        # (p, a) -> C^{p,a} -> C^{p,a+1}, signs already applied

    def _h(self, p, a):
        C = self.category
        return self.horizontal.get((p, a)) or C.zero_morphism(self.obj(p, a), self.obj(p + 1, a))

    def _v(self, p, a):
        C = self.category
        return self.vertical.get((p, a)) or C.zero_morphism(self.obj(p, a), self.obj(p, a + 1))

    def obj(self, p, a):
        return self.grid.get((p, a)) or self.category.zero_object()

    def anticommutes(self) -> bool:
        C = self.category
        for (p, a) in self.grid:
            lhs = C.compose(self._v(p + 1, a), self._h(p, a))
            rhs = C.compose(self._h(p, a + 1), self._v(p, a))
            if not C.is_zero(C.add(lhs, rhs)):
                return False
        return True

    def d_squared_zero(self) -> bool:
        C = self.category
        ok = all(C.is_zero(C.compose(self._h(p + 1, a), self._h(p, a))) for (p, a) in self.grid)
        return ok and all(C.is_zero(C.compose(self._v(p, a + 1), self._v(p, a))) for (p, a) in self.grid)

    def total(self) -> FiltrationComplex:
        C = self.category
        if not self.grid:
            return FiltrationComplex(C, [], [], 0)
        lo = min(p + a for p, a in self.grid)
        hi = max(p + a for p, a in self.grid)
        cells = {n: sorted(k for k in self.grid if sum(k) == n) for n in range(lo, hi + 1)}
        terms = [C.direct_sum_object([self.grid[k] for k in cells[n]]) if cells[n] else C.zero_object()
                 for n in range(lo, hi + 1)]
        diffs = []
        for n in range(lo, hi):
            src, tgt = cells[n], cells[n + 1]
            if not src or not tgt:
                diffs.append(C.zero_morphism(terms[n - lo], terms[n + 1 - lo]))
                continue
            entries = []
            for (q, b) in tgt:
                row = []
                for (p, a) in src:
                    if (q, b) == (p + 1, a):
                        row.append(self._h(p, a))
                    elif (q, b) == (p, a + 1):
                        row.append(self._v(p, a))
                    else:
                        row.append(None)
                entries.append(row)
            diffs.append(C.block_morphism([self.grid[k] for k in src], [self.grid[k] for k in tgt], entries))
        return FiltrationComplex(C, terms, diffs, lo)


# ----------------------------------------------------------------------
# the term-wise representations
# ----------------------------------------------------------------------

class KTerms:
    """Declares the pairs and edges of the filtration complexes of a fragment
    into a fragment over the target base ``Q``."""

    def __init__(self, frag: DeltaFragment, g: SimplicialMap, filt: Filtration, tag="K", check: bool = True):
        if g.source != frag.base:
            raise UnsupportedMap("map must start at the fragment's base")
        self.frag, self.g, self.filt, self.tag = frag, g, filt, tag
        if any(v.pair.is_open for v in frag.vertices.values()):
            raise UnsupportedMap("filtration complexes are built for proper pairs only")
        self.check = check
        if check:
            bad = [n for n, v in frag.vertices.items() if not adapted_check_pair(v.pair, g, filt, frag.ring)]
            if bad:
                raise AdaptednessViolated(f"vertices not adapted to the filtration: {bad}")
        self.n = filt.length
        self._terms: dict = {}

    def levels(self):
        return range(self.n)

    def _pieces(self, pair: SimplicialPairOverBase, a: int):
        X = pair.total
        Xa = X.subcomplex(pair.f.preimage(self.filt.step(a)).simplices)
        Ya = X.subcomplex(Xa.simplices & pair.sub.simplices)
        return Xa, Ya

    def _over_q(self, pair, big: SimplicialComplex, small: SimplicialComplex, degree: int):
        f = pair.f.then(self.g).restrict(big)
        return SimplicialPairOverBase(f, big.subcomplex(small.simplices), degree)

    def term_pair(self, name, a):
        key = (name, a)
        if key not in self._terms:
            p = self.frag.vertices[name].pair
            X = p.total
            Xa, Ya = self._pieces(p, a)
            Xb, _ = self._pieces(p, a - 1)
            self._terms[key] = self._over_q(p, Xa, X.subcomplex(Ya.simplices | Xb.simplices), p.degree + a)
        return self._terms[key]

    def tname(self, *parts):
        return (self.tag,) + parts

    def declare(self, target: DeltaFragment):
        """Add all pairs and edges to ``target``."""
        frag, check = self.frag, self.check
        for name, v in frag.vertices.items():
            p = v.pair
            X = p.total
            for a in self.levels():
                target.add_pair(self.tname("P", name, a), self.term_pair(name, a), check=False)
            for a in range(self.n - 1):
                Xa, _ = self._pieces(p, a)
                Xb, _ = self._pieces(p, a - 1)
                _, Yc = self._pieces(p, a + 1)
                big = X.subcomplex(Yc.simplices | Xa.simplices)
                small = X.subcomplex(Yc.simplices | Xb.simplices)
                exc = self._over_q(p, big, small, p.degree + a)
                target.add_pair(self.tname("E", name, a), exc, check=False)
                target.add_map(self.tname("s", name, a), self.tname("P", name, a), self.tname("E", name, a),
                               SimplicialMap.inclusion(self.term_pair(name, a).total, big))
                target.add_connecting(self.tname("t", name, a), self.tname("E", name, a), self.tname("P", name, a + 1))
        for label, e in frag.edges.items():
            if isinstance(e, Type1Edge):
                for a in self.levels():
                    src, tgt = self.term_pair(e.source, a), self.term_pair(e.target, a)
                    gm = e.map.g.mapping
                    target.add_map(self.tname("I", label, a), self.tname("P", e.source, a),
                                   self.tname("P", e.target, a),
                                   SimplicialMap.build(src.total, tgt.total, {x: gm[x] for x in src.total.vertices}))
            else:
                up = frag.vertices[e.upper].pair
                lo = frag.vertices[e.lower].pair
                X = up.total
                for a in self.levels():
                    Xb, _ = self._pieces(up, a - 1)
                    Ya, Za = self._pieces(lo, a)
                    big = X.subcomplex(Ya.simplices | Xb.simplices)
                    small = X.subcomplex(Za.simplices | Xb.simplices)
                    exc = self._over_q(up, big, small, lo.degree + a)
                    target.add_pair(self.tname("F", label, a), exc, check=False)
                    target.add_map(self.tname("Fs", label, a), self.tname("P", e.lower, a), self.tname("F", label, a),
                                   SimplicialMap.inclusion(self.term_pair(e.lower, a).total, big))
                    target.add_connecting(self.tname("Ft", label, a), self.tname("F", label, a),
                                          self.tname("P", e.upper, a))
        if check:
            for name in target.vertices:
                if name[0] == self.tag:
                    w = base_change_witness(target.vertices[name].pair, target.ring)
                    if w is not None:
                        raise UnsupportedMap(f"term {name} fails base change over the target at {w}")


class DirectImage:
    """``r^j g_*`` on the motives of one fragment, for one adapted filtration."""

    def __init__(self, frag: DeltaFragment, g: SimplicialMap, filt: Filtration | None = None,
                 check: bool = True, target: DeltaFragment | None = None, tag="K"):
        filt = filt if filt is not None else relative_filtration(g)
        self.frag, self.g, self.filt = frag, g, filt
        self.terms = KTerms(frag, g, filt, tag, check)
        own = target is None
        self.target = target if target is not None else DeltaFragment(g.target, frag.ring, frag.unroll_depth)
        if own:
            self.terms.declare(self.target)
        self._phi = None
        self._chain_sign = None

    @property
    def category(self) -> UniversalCategory:
        return self.target.category

    def _edge_span(self, s_label, t_label) -> QuotientMorphism:
        s = self.target.edge(s_label)
        t = self.target.edge(t_label)
        return self.category.span(s.t, t.t)

    def phi(self, a):
        """The extended term functor ``Phi~_a``."""
        if self._phi is None:
            self._phi = {}
        if a not in self._phi:
            T = self.terms
            _, work, proj, _ = self.frag.build()
            objs = {v: self.target.motive(T.tname("P", proj(v), a)) for v in work.vertices}
            mors = {}
            for e in work.edges:
                label = proj.emap[e.label]
                fe = self.frag.edges[label]
                if isinstance(fe, Type1Edge):
                    mors[e.label] = self.target.edge(T.tname("I", label, a))
                else:
                    m = self._edge_span(T.tname("Fs", label, a), T.tname("Ft", label, a))
                    mors[e.label] = self.category.scale(m, self.chain_sign(a))
            self._phi[a] = extend_representation(Representation(work, self.category, objs, mors))
        return self._phi[a]

    def chain_sign(self, a) -> int:
        """Sign making connecting edges commute with the differentials.

        Decided once, on the realization, from the fragment's first connecting edge.
        """
        if self._chain_sign is None:
            self._chain_sign = 1
            for label, e in self.frag.edges.items():
                if isinstance(e, Type2Edge) and self.terms.n > 1:
                    self._chain_sign = self._detect_sign(label, e)
                    break
        return (-1) ** a if self._chain_sign == -1 else 1

    def _detect_sign(self, label, e) -> int:
        C, T = self.category, self.terms
        for a in range(self.terms.n - 1):
            m_a = self._edge_span(T.tname("Fs", label, a), T.tname("Ft", label, a))
            m_b = self._edge_span(T.tname("Fs", label, a + 1), T.tname("Ft", label, a + 1))
            lhs = C.compose(self.vertex_diff(e.upper, a), m_a)
            rhs = C.compose(m_b, self.vertex_diff(e.lower, a))
            if C.is_zero(lhs) and C.is_zero(rhs):
                continue
            if C.equal(lhs, rhs):
                return 1
            if C.equal(lhs, C.neg(rhs)):
                return -1
        return 1

    def vertex_diff(self, name, a) -> QuotientMorphism:
        T = self.terms
        return self._edge_span(T.tname("s", name, a), T.tname("t", name, a))

    def _diff_on(self, x: AdelmanObject, a: int):
        """The differential ``Phi~_a(x) -> Phi~_{a+1}(x)``."""
        C = self.category
        _, _, proj, _ = self.frag.build()
        verts = x.a0.vertices
        blocks = [self.vertex_diff(proj(v), a) for v in verts]
        if len(verts) == 1:
            D = blocks[0]
        else:
            src = [self.phi(a).rep.vertex(v) for v in verts]
            tgt = [self.phi(a + 1).rep.vertex(v) for v in verts]
            D = C.block_morphism(src, tgt, [[blocks[i] if i == j else None for j in range(len(verts))]
                                            for i in range(len(verts))])
        if x.a1.is_zero() and x.am1.is_zero():
            return D
        _, iota_a, q_a = self.phi(a).data(x)
        _, iota_b, q_b = self.phi(a + 1).data(x)
        k = C.lift(iota_b, C.compose(D, iota_a))
        return C.colift(q_a, C.compose(q_b, k))

    def apply(self, a: int, f: QuotientMorphism) -> QuotientMorphism:
        """``Phi~_a`` on a morphism of motives."""
        C = self.category
        ph = self.phi(a)
        t = ph(f.t)
        if f.plain:
            return t
        return C.compose(t, C.inverse(ph(f.s)))

    def k_complex(self, m: QuotientObject) -> FiltrationComplex:
        terms = [self.phi(a).on_object(m.carrier) for a in self.terms.levels()]
        diffs = [self._diff_on(m.carrier, a) for a in range(self.terms.n - 1)]
        return FiltrationComplex(self.category, terms, diffs, 0)

    def k_map(self, f: QuotientMorphism) -> ChainMap:
        src, tgt = self.k_complex(f.source), self.k_complex(f.target)
        return ChainMap(src, tgt, {a: self.apply(a, f) for a in self.terms.levels()})

    def r(self, m: QuotientObject, j: int):
        """``r^j g_*(m)`` as an object of the target category."""
        return self.k_complex(m).cohomology(j)

    def r_map(self, f: QuotientMorphism, j: int):
        return self.k_map(f).on_cohomology(j)

    def realize(self, x):
        C = self.category
        return C.realize_object(x) if isinstance(x, QuotientObject) else C.realize(x)


def r_pushforward(frag: DeltaFragment, g: SimplicialMap, m: QuotientObject, j: int,
                  filt: Filtration | None = None):
    """``r^j g_* m``; returns ``(direct_image, object)``."""
    d = DirectImage(frag, g, filt)
    return d, d.r(m, j)


# ----------------------------------------------------------------------
# refinement of filtrations
# ----------------------------------------------------------------------

class Refinement:
    """Chain maps ``K_{S.}(v) -> K_{S'.}(v)`` between successively finer filtrations.

    All complexes live in one target fragment, so the chain maps compose.
    ``filts[k+1]`` must refine ``filts[k]``.
    """

    def __init__(self, frag: DeltaFragment, g: SimplicialMap, filts: Sequence[Filtration], check: bool = True):
        for coarse, fine in zip(filts, filts[1:]):
            n = max(coarse.length, fine.length)
            if not all(fine.step(a).is_subcomplex_of(coarse.step(a)) for a in range(n)):
                raise NotARefinement("finer filtration must sit inside the coarser one")
        self.frag = frag
        self.target = DeltaFragment(g.target, frag.ring, frag.unroll_depth)
        self.images = [DirectImage(frag, g, f, check, self.target, ("F", k)) for k, f in enumerate(filts)]
        for d in self.images:
            d.terms.declare(self.target)
        for k in range(len(filts)):
            for l in range(k + 1, len(filts)):
                src_t, tgt_t = self.images[l].terms, self.images[k].terms
                for name in frag.vertices:
                    for a in range(min(src_t.n, tgt_t.n)):
                        src, tgt = src_t.term_pair(name, a), tgt_t.term_pair(name, a)
                        self.target.add_map(("ref", k, l, name, a), src_t.tname("P", name, a),
                                            tgt_t.tname("P", name, a), SimplicialMap.inclusion(src.total, tgt.total))

    def chain_map(self, m: QuotientObject, k: int = 0, l: int = 1) -> ChainMap:
        C = self.target.category
        _, _, proj, _ = self.frag.build()
        coarse, fine = self.images[k], self.images[l]
        x = m.carrier
        verts = x.a0.vertices
        comps = {}
        for a in range(min(coarse.terms.n, fine.terms.n)):
            blocks = [self.target.edge(("ref", k, l, proj(v), a)) for v in verts]
            if len(verts) == 1:
                D = blocks[0]
            else:
                D = C.block_morphism([coarse.phi(a).rep.vertex(v) for v in verts],
                                     [fine.phi(a).rep.vertex(v) for v in verts],
                                     [[blocks[i] if i == j else None for j in range(len(verts))]
                                      for i in range(len(verts))])
            if not (x.a1.is_zero() and x.am1.is_zero()):
                _, iota_a, q_a = coarse.phi(a).data(x)
                _, iota_b, q_b = fine.phi(a).data(x)
                kk = C.lift(iota_b, C.compose(D, iota_a))
                D = C.colift(q_a, C.compose(q_b, kk))
            comps[a] = D
        return ChainMap(coarse.k_complex(m), fine.k_complex(m), comps)

    def compose(self, first: ChainMap, second: ChainMap) -> ChainMap:
        C = self.target.category
        degs = set(first.components) | set(second.components)
        return ChainMap(first.source, second.target,
                        {n: C.compose(second.component(n), first.component(n)) for n in degs})

    def is_quasi_isomorphism(self, m: QuotientObject, k: int = 0, l: int = 1) -> bool:
        cm = self.chain_map(m, k, l)
        C = self.target.category
        top = max(self.images[k].terms.n, self.images[l].terms.n)
        return all(C.is_iso(cm.on_cohomology(j)) for j in range(top + 1))


def refine(frag: DeltaFragment, g: SimplicialMap, coarse: Filtration, fine: Filtration) -> Refinement:
    return Refinement(frag, g, [coarse, fine])


def subdivided_pair(p: SimplicialPairOverBase) -> SimplicialPairOverBase:
    """``(sd X -> sd S, sd Y, i)``."""
    f = subdivide_map(p.f)
    sdx = f.source
    sub = sdx.subcomplex([c for c in sdx.simplices if all(r in p.sub.simplices for r in c)]) \
        if p.sub.simplices else SimplicialComplex.empty()
    return SimplicialPairOverBase(f, sub, p.degree, name=f"sd{p.label()}")


def lifted_filtration(filt: Filtration, base: SimplicialComplex) -> Filtration:
    """``sd(S_a)`` inside ``sd S``: refines the skeletal filtration of ``sd S``."""
    sd = barycentric_subdivision(base)
    steps = []
    for a in range(filt.length):
        keep = filt.step(a).simplices
        steps.append(sd.subcomplex([c for c in sd.simplices if all(r in keep for r in c)]))
    return Filtration(tuple(steps))


# ----------------------------------------------------------------------
# connecting maps and derived pushforward
# ----------------------------------------------------------------------

def is_exact_at(C: AbelianCategory, f, g) -> bool:
    """``im f == ker g`` (with ``g . f == 0``)."""
    return C.is_zero(C.compose(g, f)) and C.is_zero_object(cohomology_at(C, f, g)[0])


def check_short_exact(C: AbelianCategory, i, p) -> bool:
    z_a = C.zero_morphism(C.zero_object(), C.source(i))
    z_c = C.zero_morphism(C.target(p), C.zero_object())
    return is_exact_at(C, z_a, i) and is_exact_at(C, i, p) and is_exact_at(C, p, z_c)


def snake_connecting(C: AbelianCategory, KA: FiltrationComplex, KB: FiltrationComplex, KC: FiltrationComplex,
                     iota: ChainMap, pi: ChainMap, j: int):
    """``H^j(C) -> H^{j+1}(A)`` for a short exact sequence of complexes."""
    _, zc, qc = KC.cohomology_data(j)
    _, za, qa = KA.cohomology_data(j + 1)
    pj = pi.component(j)
    # pullback of B^j -> C^j along the cocycles of C
    Bj, Zc = C.source(pj), C.source(zc)
    total, _, projs = C.direct_sum([Bj, Zc])
    diff = C.block_morphism([Bj, Zc], [C.target(pj)], [[pj, C.neg(zc)]])
    _, emb = C.kernel(diff)
    u = C.compose(projs[0], emb)
    w = C.compose(projs[1], emb)
    y = C.lift(iota.component(j + 1), C.compose(KB.diff(j), u))
    r = C.compose(qa, C.lift(za, y))
    return C.colift(C.compose(qc, w), r)


class DeltaFunctor:
    """``r^j g_*`` together with its connecting maps on a short exact sequence."""

    def __init__(self, direct: DirectImage, i: QuotientMorphism, p: QuotientMorphism, check: bool = True):
        self.d = direct
        S = direct.frag.category
        if check and not check_short_exact(S, i, p):
            raise NotExact("sequence is not short exact")
        self.i, self.p = i, p
        self.KA = direct.k_complex(i.source)
        self.KB = direct.k_complex(i.target)
        self.KC = direct.k_complex(p.target)
        self.ki = ChainMap(self.KA, self.KB, {a: direct.apply(a, i) for a in direct.terms.levels()})
        self.kp = ChainMap(self.KB, self.KC, {a: direct.apply(a, p) for a in direct.terms.levels()})

    def delta(self, j: int):
        return snake_connecting(self.d.category, self.KA, self.KB, self.KC, self.ki, self.kp, j)

    def long_sequence(self, top: int | None = None) -> list:
        """``[r^0 A -> r^0 B -> r^0 C -> r^1 A -> ...]`` as a list of morphisms."""
        top = self.d.terms.n if top is None else top
        out = []
        for j in range(top):
            out += [self.ki.on_cohomology(j), self.kp.on_cohomology(j), self.delta(j)]
        return out

    def realized_exact(self, top: int | None = None) -> bool:
        C = self.d.category
        seq = self.long_sequence(top)
        T = C.target_category
        real = [C.realize(m) for m in seq]
        for f, g in zip(real, real[1:]):
            if not T.is_zero(T.compose(g, f)) or not T.is_zero_object(cohomology_at(T, f, g)[0]):
                return False
        first = real[0]
        return T.is_mono(first)


def connecting_delta(frag: DeltaFragment, g: SimplicialMap, i: QuotientMorphism, p: QuotientMorphism, j: int,
                     filt: Filtration | None = None):
    """``r^j g_* C -> r^{j+1} g_* A`` for ``0 -> A -> B -> C -> 0``."""
    try:
        direct = DirectImage(frag, g, filt)
    except AdaptednessViolated as e:
        raise NoCommonAdaptedFiltration(str(e)) from e
    return direct, DeltaFunctor(direct, i, p).delta(j)


def derived_pushforward(direct: DirectImage, terms: Sequence[QuotientObject], diffs: Sequence[QuotientMorphism],
                        offset: int = 0) -> tuple[FiltrationComplex, DoubleComplex]:
    """Total complex of ``Phi~_a`` applied to a bounded complex of motives."""
    C = direct.category
    grid, hor, ver = {}, {}, {}
    for k, m in enumerate(terms):
        p = offset + k
        K = direct.k_complex(m)
        for a in direct.terms.levels():
            grid[(p, a)] = K.term(a)
            if a + 1 < direct.terms.n:
                d = K.diff(a)
                ver[(p, a)] = C.neg(d) if p % 2 else d
        if k < len(diffs):
            for a in direct.terms.levels():
                hor[(p, a)] = direct.apply(a, diffs[k])
    dc = DoubleComplex(C, grid, hor, ver)
    return dc.total(), dc


# ----------------------------------------------------------------------
# compatibility with twists and factorizations
# ----------------------------------------------------------------------

def localized_pushforward(loc, lm, g: SimplicialMap, j: int, filt: Filtration | None = None):
    """``r^j g_*`` on a localized motive: same weight, motive over the target."""
    from .motives import LocalizedMotive
    d = DirectImage(lm.fragment, g, filt)
    return d, LocalizedMotive(d.target, d.r(lm.motive, j), lm.weight)


def twist_compatible(loc, lm, g: SimplicialMap, j: int) -> bool:
    """``r^j g_*(L m)`` and ``L r^j g_*(m)`` have the same realization."""
    from .motives import TensorFunctor, lefschetz_pair
    from .sheaves import SheafCategory
    _, pushed = localized_pushforward(loc, lm, g, j)
    T = TensorFunctor(lefschetz_pair(g.target), pushed.fragment)
    one = T.category.realize_object(T.on_object(pushed.motive))
    _, other = localized_pushforward(loc, loc.lefschetz(lm), g, j)
    two = other.fragment.category.realize_object(other.motive)
    C = SheafCategory(g.target, lm.fragment.ring)
    return C.invariants(one) == C.invariants(two)


def factorization_agrees(frag: DeltaFragment, incl: SimplicialMap, proj: SimplicialMap, m: QuotientObject,
                         j: int) -> bool:
    """``r^j (proj . incl)_* m`` against ``r^j proj_* r^0 incl_* m``, on realizations."""
    from .sheaves import SheafCategory
    direct = DirectImage(frag, incl.then(proj))
    first = DirectImage(frag, incl)
    mid = first.r(m, 0)
    second = DirectImage(first.target, proj)
    a = direct.category.realize_object(direct.r(m, j))
    b = second.category.realize_object(second.r(mid, j))
    C = SheafCategory(proj.target, frag.ring)
    return C.invariants(a) == C.invariants(b)
