"""Simplicial pairs over a base and their relative cohomology sheaves.

The stalk of ``H^i_S(X, Y)`` at a face ``sigma`` of the base is computed on a
small model of the preimage of the open star of ``sigma``:

* proper pairs, ``sigma`` a vertex: the fibre ``f^-1(sigma)`` itself;
* proper pairs, higher faces: the chain complex of faces of X mapping onto
  ``sigma`` (a subdivision of the fibre over an interior point);
* pairs with a removed closed part B: chains of faces of X - B whose image
  contains ``sigma`` (the whole preimage of the open star).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .exact import ModuleMorphism
from .sheaves import (
    CellularSheaf,
    Filtration,
    SheafCategory,
    SheafMorphism,
    codim_one_pairs,
    pullback_sheaf,
    sheaf_adapted,
)
from .simplicial import (
    CochainComplex,
    SimplicialComplex,
    SimplicialMap,
    connecting_map,
    face_order_key,
    fibre_product,
    order_complex,
)


class ChainNotNested(ValueError):
    pass


class NotOverBase(ValueError):
    pass


class FlatnessRequired(ValueError):
    pass


class MixedModels(ValueError):
    pass


@dataclass(frozen=True)
class SimplicialPairOverBase:
    """``(f: X -> S, Y, i)``, optionally with a closed part ``B`` of X removed."""

    f: SimplicialMap
    sub: SimplicialComplex
    degree: int
    removed: SimplicialComplex = field(default_factory=SimplicialComplex.empty)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.sub.is_subcomplex_of(self.total):
            raise ValueError("Y must be a closed subcomplex of X")
        if not self.removed.is_subcomplex_of(self.total):
            raise ValueError("removed part must be a closed subcomplex of X")
        if self.degree < 0:
            raise ValueError("degree must be a natural number")

    @property
    def total(self) -> SimplicialComplex:
        return self.f.source

    @property
    def base(self) -> SimplicialComplex:
        return self.f.target

    @property
    def is_open(self) -> bool:
        return bool(self.removed.simplices)

    def with_degree(self, i: int) -> "SimplicialPairOverBase":
        return SimplicialPairOverBase(self.f, self.sub, i, self.removed, self.name)

    def restrict_total(self, x: SimplicialComplex, y: SimplicialComplex, degree: int) -> "SimplicialPairOverBase":
        """The pair ``(f|_x, y, degree)`` for closed ``y <= x <= X``."""
        return SimplicialPairOverBase(self.f.restrict(x), y, degree, _meet(self.removed, x))

    def label(self) -> str:
        return self.name or f"({self.total.name or 'X'},{self.sub.name or 'Y'},{self.degree})"


def _meet(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    simp = a.simplices & b.simplices
    return SimplicialComplex(tuple(v for v in a.vertices if (v,) in simp), frozenset(simp))


def model_kind(p: SimplicialPairOverBase) -> str:
    return "open" if p.is_open else "proper"


# ----------------------------------------------------------------------
# stalk models
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def stalk_model(f: SimplicialMap, sub: SimplicialComplex, removed: SimplicialComplex, sigma: tuple):
    """``(K, L)``: the model space at ``sigma`` and its part over ``Y``."""
    X = f.source
    if removed.simplices:
        faces = [r for r in X.simplices if set(sigma) <= set(f(r)) and r not in removed.simplices]
        K = order_complex(faces, lambda a, b: set(a) <= set(b), key=face_order_key(X))
        L = K.subcomplex([c for c in K.simplices if all(r in sub.simplices for r in c)])
        return K, L
    if len(sigma) == 1:
        K = X.subcomplex([r for r in X.simplices if f(r) == sigma])
        L = K.subcomplex([r for r in K.simplices if r in sub.simplices])
        return K, L
    faces = [r for r in X.simplices if f(r) == sigma]
    K = order_complex(faces, lambda a, b: set(a) <= set(b), key=face_order_key(X))
    L = K.subcomplex([c for c in K.simplices if all(r in sub.simplices for r in c)])
    return K, L


def _restriction_map(f: SimplicialMap, removed, K_tau: SimplicialComplex, sigma, K_sigma) -> SimplicialMap:
    """Model map ``K_tau -> K_sigma`` for ``sigma < tau``."""
    if removed.simplices:
        return SimplicialMap.inclusion(K_tau, K_sigma)
    over = set(sigma)

    def part(r):
        return tuple(v for v in r if f.mapping[v] in over)

    if len(sigma) == 1:
        return SimplicialMap.build(K_tau, K_sigma, {r: part(r)[-1] for r in K_tau.vertices})
    return SimplicialMap.build(K_tau, K_sigma, {r: part(r) for r in K_tau.vertices})


@lru_cache(maxsize=None)
def _cochains(f, sub, removed, sigma, ring) -> CochainComplex:
    K, L = stalk_model(f, sub, removed, sigma)
    return CochainComplex(K, L, ring)


def relative_sheaf(p: SimplicialPairOverBase, ring: str = "Z") -> CellularSheaf:
    """``H^i_S(X, Y)`` as a cellular sheaf on the base."""
    return _relative_sheaf(p.f, p.sub, p.removed, p.degree, ring)


@lru_cache(maxsize=None)
def _relative_sheaf(f, sub, removed, i, ring) -> CellularSheaf:
    S = f.target
    stalks, res = {}, {}
    for sigma in S.simplices:
        stalks[sigma] = _cochains(f, sub, removed, sigma, ring).cohomology(i).module
    for sigma, tau, _ in codim_one_pairs(S):
        c_s = _cochains(f, sub, removed, sigma, ring)
        c_t = _cochains(f, sub, removed, tau, ring)
        m = _restriction_map(f, removed, c_t.complex, sigma, c_s.complex)
        res[(sigma, tau)] = c_t.induced_map(c_s, m, i)
    return CellularSheaf(S, stalks, res, ring, check=False)


# ----------------------------------------------------------------------
# the two kinds of edges
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PairMap:
    """A map ``g: (X, Y) -> (X', Y')`` commuting with the structure maps."""

    source: SimplicialPairOverBase
    target: SimplicialPairOverBase
    g: SimplicialMap

    def __post_init__(self):
        s, t, g = self.source, self.target, self.g
        if g.source != s.total or g.target != t.total:
            raise NotOverBase("map does not connect the two totals")
        if s.base != t.base:
            raise NotOverBase("pairs live over different bases")
        for v in s.total.vertices:
            if t.f.mapping[g.mapping[v]] != s.f.mapping[v]:
                raise NotOverBase(f"vertex {v!r} is not mapped over the base")
        for r in s.sub.simplices:
            if g(r) not in t.sub.simplices:
                raise NotOverBase("Y is not mapped into Y'")
        for r in s.total.simplices:
            if r not in s.removed.simplices and g(r) in t.removed.simplices:
                raise NotOverBase("the open part is not mapped into the open part")
        if model_kind(s) != model_kind(t):
            raise MixedModels("maps between proper and open pairs are not modelled")


def type1_restriction(m: PairMap, i: int | None = None, ring: str = "Z") -> SheafMorphism:
    """``H^i_S(X', Y') -> H^i_S(X, Y)`` induced by ``g``."""
    i = m.source.degree if i is None else i
    src = relative_sheaf(m.target.with_degree(i), ring)
    tgt = relative_sheaf(m.source.with_degree(i), ring)
    comps = {}
    s, t = m.source, m.target
    for sigma in s.base.simplices:
        c_src = _cochains(t.f, t.sub, t.removed, sigma, ring)
        c_tgt = _cochains(s.f, s.sub, s.removed, sigma, ring)
        K = c_tgt.complex
        if s.is_open or len(sigma) > 1:
            model = SimplicialMap.build(K, c_src.complex, {r: m.g(r) for r in K.vertices})
        else:
            model = SimplicialMap.build(K, c_src.complex, {v: m.g.mapping[v] for v in K.vertices})
        comps[sigma] = c_tgt.induced_map(c_src, model, i)
    return SheafMorphism(src, tgt, comps)


def type2_connecting(f: SimplicialMap, x: SimplicialComplex, y: SimplicialComplex, z: SimplicialComplex,
                     i: int, ring: str = "Z", removed: SimplicialComplex | None = None) -> SheafMorphism:
    """Connecting map ``H^i_S(Y, Z) -> H^{i+1}_S(X, Y)`` for closed ``Z <= Y <= X``."""
    if not (z.is_subcomplex_of(y) and y.is_subcomplex_of(x) and x.is_subcomplex_of(f.source)):
        raise ChainNotNested("need closed Z <= Y <= X")
    removed = removed if removed is not None else SimplicialComplex.empty()
    fx, fy = f.restrict(x), f.restrict(y)
    bx, by = _meet(removed, x), _meet(removed, y)
    src = _relative_sheaf(fy, z, by, i, ring)
    tgt = _relative_sheaf(fx, y, bx, i + 1, ring)
    comps = {}
    for sigma in f.target.simplices:
        Kx, _ = stalk_model(fx, y, bx, sigma)
        Ky, Lz = stalk_model(fy, z, by, sigma)
        # Y's model sits inside X's as the part over Y
        Ly = Kx.subcomplex([c for c in Ky.simplices]) if Ky.simplices else SimplicialComplex.empty()
        Lz = Kx.subcomplex([c for c in Lz.simplices]) if Lz.simplices else SimplicialComplex.empty()
        d = connecting_map(Kx, Ly, Lz, i, ring)
        comps[sigma] = ModuleMorphism(src.stalks[sigma], tgt.stalks[sigma], d.matrix, check=False)
    return SheafMorphism(src, tgt, comps)


# ----------------------------------------------------------------------
# base change and products
# ----------------------------------------------------------------------

def pullback_pair(g: SimplicialMap, p: SimplicialPairOverBase) -> SimplicialPairOverBase:
    """``(X x_S T -> T, Y x_S T, i)`` for ``g: T -> S``."""
    P, pr_x, pr_t = fibre_product(p.f, g)
    sub = pr_x.preimage(p.sub)
    removed = pr_x.preimage(p.removed) if p.is_open else SimplicialComplex.empty()
    return SimplicialPairOverBase(pr_t, sub, p.degree, removed, p.name)


def base_change_check(g: SimplicialMap, p: SimplicialPairOverBase, ring: str = "Z") -> bool:
    """Compare ``g^* H^i_S(X, Y)`` with ``H^i_T`` of the pulled back pair."""
    pulled = pullback_sheaf(g, relative_sheaf(p, ring))
    direct = relative_sheaf(pullback_pair(g, p), ring)
    C = SheafCategory(g.source, ring)
    return C.invariants(pulled) == C.invariants(direct)


def has_base_change(p: SimplicialPairOverBase, ring: str = "Z") -> bool:
    """Base change along every face inclusion of the base (a point or face of S)."""
    S = p.base
    for sigma in S.simplices:
        face = S.subcomplex([sigma])
        if not base_change_check(SimplicialMap.inclusion(face, S), p, ring):
            return False
    return True


def product_pair(p: SimplicialPairOverBase, q: SimplicialPairOverBase, ring: str = "Z",
                 check_flat: bool = True) -> SimplicialPairOverBase:
    """``(X x_S X', Y x_S X' u X x_S Y', i + i')``, staircase-triangulated."""
    if p.base != q.base:
        raise ValueError("pairs must share a base")
    if p.is_open or q.is_open:
        raise MixedModels("products of open pairs are not modelled")
    if check_flat and ring == "Z" and not (_all_free(p) or _all_free(q)):
        raise FlatnessRequired("neither factor has free relative cohomology; Kunneth may fail over Z")
    P, pr1, pr2 = fibre_product(p.f, q.f)
    sub = pr1.preimage(p.sub).union(pr2.preimage(q.sub))
    sub = P.subcomplex(sub.simplices)
    name = f"{p.label()}x{q.label()}"
    return SimplicialPairOverBase(pr1.then(p.f), sub, p.degree + q.degree, name=name)


def _all_free(p: SimplicialPairOverBase) -> bool:
    for n in range(p.total.dim + 1):
        F = relative_sheaf(p.with_degree(n), "Z")
        if not all(m.is_free() for m in F.stalks.values()):
            return False
    return True


def adapted_check(p: SimplicialPairOverBase, filt: Filtration, ring: str = "Z") -> bool:
    return sheaf_adapted(relative_sheaf(p, ring), filt)
