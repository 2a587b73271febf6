"""Finite simplicial complexes, simplicial maps and relative cochains."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .exact import (
    NO_SOLUTION,
    ExactMatrix,
    FpModule,
    ModuleMorphism,
    nullspace,
    simplify,
    solve_right,
)


class NotSimplicial(ValueError):
    pass


class NotASubcomplex(ValueError):
    pass


Simplex = tuple  # vertices in the complex's vertex order


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Complex given by its vertex order and its (face-closed) simplex set.

    The vertex order orients simplices; simplices are tuples listed in it.
    """

    vertices: tuple
    simplices: frozenset
    name: str = field(default="", compare=False)

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable], vertices: Sequence | None = None, name: str = ""):
        facets = [tuple(f) for f in facets]
        if vertices is None:
            seen = []
            for f in facets:
                for v in f:
                    if v not in seen:
                        seen.append(v)
            vertices = seen
        vertices = tuple(vertices)
        pos = {v: k for k, v in enumerate(vertices)}
        faces = set((v,) for v in vertices)
        for f in facets:
            if any(v not in pos for v in f):
                raise NotSimplicial(f"facet {f} uses an undeclared vertex")
            f = tuple(sorted(set(f), key=pos.__getitem__))
            for k in range(1, len(f) + 1):
                faces.update(combinations(f, k))
        return cls(vertices, frozenset(faces), name)

    @classmethod
    def point(cls, v="p", name: str = "Pt"):
        return cls.from_facets([(v,)], name=name)

    @classmethod
    def empty(cls):
        return cls((), frozenset())

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.vertices == other.vertices \
            and self.simplices == other.simplices

    def __hash__(self):
        return hash((self.vertices, self.simplices))

    def __repr__(self):
        tag = self.name or "SimplicialComplex"
        return f"<{tag}: {len(self.vertices)} vertices, dim {self.dim}>"

    @cached_property
    def position(self) -> dict:
        return {v: k for k, v in enumerate(self.vertices)}

    def simplex(self, vs: Iterable) -> Simplex:
        """Normalize a vertex set to an oriented simplex tuple."""
        return tuple(sorted(set(vs), key=self.position.__getitem__))

    def __contains__(self, s) -> bool:
        return tuple(s) in self.simplices

    @cached_property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @cached_property
    def _by_dim(self) -> dict:
        out: dict[int, list] = {}
        for s in self.simplices:
            out.setdefault(len(s) - 1, []).append(s)
        for d in out:
            out[d].sort(key=lambda s: tuple(self.position[v] for v in s))
        return out

    def faces(self, d: int) -> list:
        return list(self._by_dim.get(d, ()))

    @cached_property
    def sorted_simplices(self) -> list:
        return [s for d in range(self.dim + 1) for s in self.faces(d)]

    @cached_property
    def facets(self) -> list:
        out = []
        for s in self.sorted_simplices:
            if not any(len(t) == len(s) + 1 and set(s) <= set(t) for t in self._by_dim.get(len(s), ())):
                out.append(s)
        return out

    def subcomplex(self, simplices: Iterable, name: str = "") -> "SimplicialComplex":
        """Closure of the given simplices, with the ambient vertex order."""
        faces = set()
        for s in simplices:
            s = self.simplex(s)
            if s not in self.simplices:
                raise NotASubcomplex(f"{s} is not a simplex")
            for k in range(1, len(s) + 1):
                faces.update(combinations(s, k))
        verts = tuple(v for v in self.vertices if (v,) in faces)
        return SimplicialComplex(verts, frozenset(faces), name)

    def full_subcomplex(self, vertices: Iterable) -> "SimplicialComplex":
        vs = set(vertices)
        return self.subcomplex([s for s in self.simplices if set(s) <= vs])

    def skeleton(self, d: int) -> "SimplicialComplex":
        return self.subcomplex([s for s in self.simplices if len(s) <= d + 1])

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        verts = self.vertices + tuple(v for v in other.vertices if v not in self.position)
        return SimplicialComplex(verts, self.simplices | other.simplices)

    def reorder(self, key) -> "SimplicialComplex":
        """Same complex with vertices sorted by ``key``."""
        verts = tuple(sorted(self.vertices, key=key))
        pos = {v: k for k, v in enumerate(verts)}
        simp = frozenset(tuple(sorted(s, key=pos.__getitem__)) for s in self.simplices)
        return SimplicialComplex(verts, simp, self.name)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vmap: tuple  # ((v, w), ...)

    def __post_init__(self):
        m = dict(self.vmap)
        for v in self.source.vertices:
            if v not in m:
                raise NotSimplicial(f"vertex {v!r} has no image")
        for s in self.source.simplices:
            img = self.target.simplex(m[v] for v in s)
            if img not in self.target.simplices:
                raise NotSimplicial(f"image of {s} is not a simplex")

    @classmethod
    def build(cls, source, target, vmap: dict) -> "SimplicialMap":
        return cls(source, target, tuple((v, vmap[v]) for v in source.vertices))

    @classmethod
    def identity(cls, k: SimplicialComplex) -> "SimplicialMap":
        return cls.build(k, k, {v: v for v in k.vertices})

    @classmethod
    def constant(cls, k: SimplicialComplex, pt: SimplicialComplex) -> "SimplicialMap":
        (p,) = pt.vertices
        return cls.build(k, pt, {v: p for v in k.vertices})

    @classmethod
    def inclusion(cls, sub: SimplicialComplex, ambient: SimplicialComplex) -> "SimplicialMap":
        return cls.build(sub, ambient, {v: v for v in sub.vertices})

    @cached_property
    def mapping(self) -> dict:
        return dict(self.vmap)

    def __call__(self, s) -> Simplex:
        return self.target.simplex(self.mapping[v] for v in s)

    def then(self, other: "SimplicialMap") -> "SimplicialMap":
        """``other`` after ``self``."""
        return SimplicialMap.build(self.source, other.target,
                                   {v: other.mapping[self.mapping[v]] for v in self.source.vertices})

    def preimage(self, sub: SimplicialComplex) -> SimplicialComplex:
        return self.source.subcomplex([s for s in self.source.simplices if self(s) in sub.simplices])

    def restrict(self, sub: SimplicialComplex) -> "SimplicialMap":
        return SimplicialMap.build(sub, self.target, {v: self.mapping[v] for v in sub.vertices})


def orientation_sign(images: Sequence, order: dict) -> int:
    """Sign of the permutation sorting ``images``; 0 if two coincide."""
    keys = [order[v] for v in images]
    if len(set(keys)) != len(keys):
        return 0
    sign = 1
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            if keys[i] > keys[j]:
                sign = -sign
    return sign


# ----------------------------------------------------------------------
# relative cochain complexes and their cohomology
# ----------------------------------------------------------------------

@dataclass
class CohomologyGroup:
    """``H^n`` as a normalized module plus the cocycles representing its generators."""

    module: FpModule
    representatives: ExactMatrix  # columns: cocycles for the generators
    kernel_basis: ExactMatrix     # columns: basis of the cocycle lattice
    to_module: ExactMatrix        # kernel coordinates -> module generators

    def classify(self, cocycles: ExactMatrix) -> ExactMatrix:
        """Generator coordinates of the classes of the given cocycle columns."""
        if cocycles.ncols == 0 or self.kernel_basis.ncols == 0:
            return ExactMatrix.zeros(self.module.ngens, cocycles.ncols, cocycles.ring)
        x = solve_right(self.kernel_basis, cocycles)
        if x is NO_SOLUTION:
            raise ValueError("columns are not cocycles")
        return self.to_module @ x


class CochainComplex:
    """Cochains of a simplicial pair ``(K, L)``: simplices of K not in L."""

    def __init__(self, complex_: SimplicialComplex, sub: SimplicialComplex | None = None, ring: str = "Z"):
        self.complex = complex_
        self.sub = sub if sub is not None else SimplicialComplex.empty()
        if not self.sub.simplices <= complex_.simplices:
            raise NotASubcomplex("relative part is not a subcomplex")
        self.ring = ring
        self._h: dict = {}

    @cached_property
    def bases(self) -> dict:
        out = {}
        for d in range(-1, self.complex.dim + 2):
            out[d] = [s for s in self.complex.faces(d) if s not in self.sub.simplices]
        return out

    def basis(self, n: int) -> list:
        return self.bases.get(n, [])

    @cached_property
    def index(self) -> dict:
        return {n: {s: k for k, s in enumerate(b)} for n, b in self.bases.items()}

    def differential(self, n: int) -> ExactMatrix:
        """Matrix of ``d: C^n -> C^{n+1}``."""
        src, tgt = self.basis(n), self.basis(n + 1)
        idx = self.index.get(n, {})
        rows = []
        for t in tgt:
            row = [0] * len(src)
            for k in range(len(t)):
                face = t[:k] + t[k + 1:]
                j = idx.get(face)
                if j is not None:
                    row[j] += (-1) ** k
            rows.append(row)
        return ExactMatrix.from_rows(rows, self.ring, ncols=len(src))

    def cohomology(self, n: int) -> CohomologyGroup:
        if n in self._h:
            return self._h[n]
        ring = self.ring
        dn = self.differential(n)
        dprev = self.differential(n - 1)
        dim = len(self.basis(n))
        kb = nullspace(dn) if dim else ExactMatrix.zeros(0, 0, ring)
        k = kb.ncols
        if k and dprev.ncols:
            x = solve_right(kb, dprev)
            rel = x.T
        else:
            rel = ExactMatrix.zeros(0, k, ring)
        raw = FpModule(k, rel)
        small, to, back = simplify(raw)
        reps = kb @ back.matrix if k else ExactMatrix.zeros(dim, small.ngens, ring)
        g = CohomologyGroup(small, reps, kb, to.matrix)
        self._h[n] = g
        return g

    def pullback_matrix(self, other: "CochainComplex", f: SimplicialMap, n: int) -> ExactMatrix:
        """Cochain map ``C^n(other) -> C^n(self)`` induced by ``f: self.complex -> other.complex``."""
        src, tgt = other.basis(n), self.basis(n)
        idx = other.index.get(n, {})
        order = other.complex.position
        rows = []
        for s in tgt:
            row = [0] * len(src)
            imgs = [f.mapping[v] for v in s]
            sign = orientation_sign(imgs, order)
            if sign:
                j = idx.get(other.complex.simplex(imgs))
                if j is not None:
                    row[j] = sign
            rows.append(row)
        return ExactMatrix.from_rows(rows, self.ring, ncols=len(src))

    def induced_map(self, other: "CochainComplex", f: SimplicialMap, n: int) -> ModuleMorphism:
        """``H^n(other) -> H^n(self)`` for ``f`` mapping ``self``'s pair into ``other``'s."""
        h_src, h_tgt = other.cohomology(n), self.cohomology(n)
        m = self.pullback_matrix(other, f, n) @ h_src.representatives
        return ModuleMorphism(h_src.module, h_tgt.module, h_tgt.classify(m), check=False)


def relative_cohomology(k: SimplicialComplex, l: SimplicialComplex | None, n: int, ring: str = "Z") -> FpModule:
    return CochainComplex(k, l, ring).cohomology(n).module


def connecting_map(x: SimplicialComplex, y: SimplicialComplex, z: SimplicialComplex, n: int,
                   ring: str = "Z") -> ModuleMorphism:
    """``H^n(Y, Z) -> H^{n+1}(X, Y)`` for closed ``Z <= Y <= X``."""
    cyz = CochainComplex(y, z, ring)
    cxy = CochainComplex(x, y, ring)
    cxz = CochainComplex(x, z, ring)
    hyz = cyz.cohomology(n)
    hxy = cxy.cohomology(n + 1)
    # extend cocycles on (Y, Z) by zero to (X, Z), apply d, land in C(X, Y)
    reps = hyz.representatives
    ext_rows = []
    idx = cyz.index.get(n, {})
    for s in cxz.basis(n):
        j = idx.get(s)
        ext_rows.append(list(reps.data[j]) if j is not None else [0] * reps.ncols)
    ext = ExactMatrix.from_rows(ext_rows, ring, ncols=reps.ncols)
    dext = cxz.differential(n) @ ext
    sel = [cxz.index[n + 1][s] for s in cxy.basis(n + 1)]
    cocycles = dext.submatrix(rows=sel) if sel else ExactMatrix.zeros(0, reps.ncols, ring)
    return ModuleMorphism(hyz.module, hxy.module, hxy.classify(cocycles), check=False)


# ----------------------------------------------------------------------
# order complexes, subdivision and fibre products
# ----------------------------------------------------------------------

def order_complex(elements: Iterable, leq, key=None, name: str = "") -> SimplicialComplex:
    """Complex of chains of a finite poset."""
    elems = sorted(elements, key=key) if key else list(elements)
    faces = set()

    def grow(chain):
        faces.add(tuple(chain))
        last = chain[-1]
        for e in elems:
            if e != last and leq(last, e) and _after(elems, e, last):
                grow(chain + [e])

    for e in elems:
        grow([e])
    return SimplicialComplex(tuple(elems), frozenset(faces), name)


def _after(elems, e, last) -> bool:
    # chains are listed in the linear extension given by ``elems``
    return elems.index(e) > elems.index(last)


def face_order_key(k: SimplicialComplex):
    return lambda s: (len(s), tuple(k.position[v] for v in s))


def face_poset_complex(k: SimplicialComplex, faces: Iterable | None = None) -> SimplicialComplex:
    """Order complex of (a subset of) the faces of ``k`` under inclusion."""
    faces = k.simplices if faces is None else faces
    return order_complex(faces, lambda a, b: set(a) <= set(b), key=face_order_key(k))


def barycentric_subdivision(k: SimplicialComplex) -> SimplicialComplex:
    out = face_poset_complex(k)
    return SimplicialComplex(out.vertices, out.simplices, f"sd {k.name}".strip())


def last_vertex_map(k: SimplicialComplex) -> SimplicialMap:
    """``sd K -> K`` sending a face to its last vertex."""
    sd = barycentric_subdivision(k)
    return SimplicialMap.build(sd, k, {s: s[-1] for s in sd.vertices})


def subdivide_map(f: SimplicialMap) -> SimplicialMap:
    """``sd X -> sd S`` sending a face to its image face."""
    sx, ss = barycentric_subdivision(f.source), barycentric_subdivision(f.target)
    return SimplicialMap.build(sx, ss, {s: f(s) for s in sx.vertices})


def sorted_by_base(f: SimplicialMap) -> SimplicialComplex:
    """Source of ``f`` reordered so that ``f`` is weakly monotone."""
    pos, own = f.target.position, f.source.position
    return f.source.reorder(lambda v: (pos[f.mapping[v]], own[v]))


def fibre_product(f: SimplicialMap, g: SimplicialMap, name: str = ""):
    """Staircase triangulation of ``X x_S T`` for ``f: X -> S``, ``g: T -> S``.

    Returns ``(P, pr_X, pr_T)``.  Vertex orders are induced from the base, so
    both maps are monotone and the simplicial-set fibre product is an ordered
    simplicial complex.
    """
    if f.target != g.target:
        raise ValueError("maps must share a base")
    X, T = sorted_by_base(f), sorted_by_base(g)
    px, pt = X.position, T.position
    verts = [(x, t) for x in X.vertices for t in T.vertices if f.mapping[x] == g.mapping[t]]
    verts.sort(key=lambda v: (px[v[0]], pt[v[1]]))
    faces = set()

    def grow(chain):
        faces.add(tuple(chain))
        x0, t0 = chain[-1]
        for x, t in verts:
            if (px[x], pt[t]) <= (px[x0], pt[t0]) or px[x] < px[x0] or pt[t] < pt[t0]:
                continue
            xs = X.simplex([c[0] for c in chain] + [x])
            ts = T.simplex([c[1] for c in chain] + [t])
            if xs in X.simplices and ts in T.simplices:
                grow(chain + [(x, t)])

    for v in verts:
        grow([v])
    P = SimplicialComplex(tuple(verts), frozenset(faces), name)
    pr_x = SimplicialMap.build(P, f.source, {v: v[0] for v in verts})
    pr_t = SimplicialMap.build(P, g.source, {v: v[1] for v in verts})
    return P, pr_x, pr_t
