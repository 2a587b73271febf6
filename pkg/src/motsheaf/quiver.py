"""Quivers, paths, the free R-linear path category and its additive closure."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Sequence

from .exact import ExactMatrix, coerce


class CyclicQuiver(ValueError):
    pass


class UnknownVertex(KeyError):
    pass


@dataclass(frozen=True)
class Edge:
    label: Hashable
    source: Hashable
    target: Hashable


def _key(x) -> tuple:
    return (type(x).__name__, str(x))


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    edges: tuple  # of Edge

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        labels = [e.label for e in self.edges]
        if len(set(labels)) != len(labels):
            raise ValueError("edge labels must be unique")
        for e in self.edges:
            if e.source not in vs or e.target not in vs:
                raise UnknownVertex(f"edge {e.label!r} references an unknown vertex")

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable[tuple]) -> "Quiver":
        return cls(tuple(vertices), tuple(Edge(*e) for e in edges))

    @cached_property
    def edge_map(self) -> dict:
        return {e.label: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.source].append(e)
        return out

    @cached_property
    def acyclic(self) -> bool:
        return _topological_order(self) is not None

    def edge(self, label) -> Edge:
        return self.edge_map[label]

    def has_vertex(self, v) -> bool:
        return v in self._vertex_set

    @cached_property
    def _vertex_set(self):
        return frozenset(self.vertices)

    def full_subquiver(self, vertices: Iterable) -> "Quiver":
        keep = set(vertices)
        return Quiver(tuple(v for v in self.vertices if v in keep),
                      tuple(e for e in self.edges if e.source in keep and e.target in keep))

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Edge(e.label, e.target, e.source) for e in self.edges))

    def path_source_target(self, path: tuple, default=None):
        if not path:
            return default, default
        return self.edge(path[0]).source, self.edge(path[-1]).target


def _topological_order(q: Quiver):
    indeg = {v: 0 for v in q.vertices}
    for e in q.edges:
        indeg[e.target] += 1
    ready = [v for v in q.vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for e in q.out_edges.get(v, ()):
            indeg[e.target] -= 1
            if indeg[e.target] == 0:
                ready.append(e.target)
    return order if len(order) == len(q.vertices) else None


def path_key(path: tuple) -> tuple:
    return tuple(_key(x) for x in path)


@lru_cache(maxsize=65536)
def enumerate_paths(q: Quiver, u, v) -> tuple:
    """All directed paths from ``u`` to ``v`` as tuples of edge labels."""
    if not q.acyclic:
        raise CyclicQuiver("path enumeration requires an acyclic quiver")
    if not q.has_vertex(u) or not q.has_vertex(v):
        raise UnknownVertex(f"{u!r} or {v!r}")
    out = []

    def walk(x, acc):
        if x == v:
            out.append(tuple(acc))
        for e in q.out_edges.get(x, ()):
            acc.append(e.label)
            walk(e.target, acc)
            acc.pop()

    walk(u, [])
    return tuple(sorted(out, key=path_key))


@dataclass(frozen=True)
class QuiverMorphism:
    source: Quiver
    target: Quiver
    vertex_map: tuple  # sorted (v, v') pairs
    edge_map: tuple

    def __post_init__(self):
        vm, em = dict(self.vertex_map), dict(self.edge_map)
        for v in self.source.vertices:
            if v not in vm or not self.target.has_vertex(vm[v]):
                raise ValueError(f"vertex {v!r} is not mapped into the target quiver")
        for e in self.source.edges:
            if e.label not in em:
                raise ValueError(f"edge {e.label!r} is not mapped")
            img = self.target.edge(em[e.label])
            if img.source != vm[e.source] or img.target != vm[e.target]:
                raise ValueError(f"edge {e.label!r}: image does not preserve incidence")

    @classmethod
    def build(cls, source: Quiver, target: Quiver, vmap: dict, emap: dict) -> "QuiverMorphism":
        return cls(source, target, tuple(vmap.items()), tuple(emap.items()))

    @classmethod
    def identity(cls, q: Quiver) -> "QuiverMorphism":
        return cls.build(q, q, {v: v for v in q.vertices}, {e.label: e.label for e in q.edges})

    @classmethod
    def inclusion(cls, sub: Quiver, ambient: Quiver) -> "QuiverMorphism":
        return cls.build(sub, ambient, {v: v for v in sub.vertices}, {e.label: e.label for e in sub.edges})

    @cached_property
    def vmap(self) -> dict:
        return dict(self.vertex_map)

    @cached_property
    def emap(self) -> dict:
        return dict(self.edge_map)

    def __call__(self, v):
        return self.vmap[v]

    def map_path(self, path: tuple) -> tuple:
        return tuple(self.emap[e] for e in path)


# ----------------------------------------------------------------------
# free R-linear path category
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PathCombination:
    """R-linear combination of paths from ``source`` to ``target``."""

    source: Hashable
    target: Hashable
    terms: tuple  # ((path, coeff), ...) sorted, coeffs nonzero
    ring: str = "Z"

    @classmethod
    def make(cls, source, target, terms: Iterable[tuple], ring: str = "Z") -> "PathCombination":
        acc: dict = {}
        for path, c in terms:
            c = coerce(c, ring)
            acc[tuple(path)] = acc.get(tuple(path), 0) + c
        items = tuple(sorted(((p, c) for p, c in acc.items() if c != 0), key=lambda t: path_key(t[0])))
        return cls(source, target, items, ring)

    @classmethod
    def zero(cls, source, target, ring="Z"):
        return _zero_combination(source, target, ring)

    @classmethod
    def identity(cls, v, ring="Z"):
        return cls.make(v, v, [((), 1)], ring)

    @classmethod
    def edge(cls, q: Quiver, label, coeff=1, ring="Z"):
        e = q.edge(label)
        return cls.make(e.source, e.target, [((label,), coeff)], ring)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("adding path combinations with different endpoints")
        return PathCombination.make(self.source, self.target, self.terms + other.terms, self.ring)

    def scale(self, c):
        return PathCombination.make(self.source, self.target, [(p, c * x) for p, x in self.terms], self.ring)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def then(self, other: "PathCombination") -> "PathCombination":
        """``other`` after ``self`` (paths concatenated)."""
        if self.target != other.source:
            raise ValueError("path composition endpoint mismatch")
        terms = [(p + q, a * b) for p, a in self.terms for q, b in other.terms]
        return PathCombination.make(self.source, other.target, terms, self.ring)

    def map(self, g: QuiverMorphism) -> "PathCombination":
        return PathCombination.make(g(self.source), g(self.target),
                                    [(g.map_path(p), c) for p, c in self.terms], self.ring)

    def to_ring(self, ring: str) -> "PathCombination":
        if ring == self.ring:
            return self
        return PathCombination.make(self.source, self.target, self.terms, ring)


@lru_cache(maxsize=65536)
def _zero_combination(source, target, ring):
    # immutable, so one shared instance per endpoint pair is fine
    return PathCombination(source, target, (), ring)


@dataclass(frozen=True)
class AdditiveObject:
    vertices: tuple = ()

    def __add__(self, other: "AdditiveObject") -> "AdditiveObject":
        return AdditiveObject(self.vertices + other.vertices)

    def __len__(self):
        return len(self.vertices)

    def is_zero(self) -> bool:
        return not self.vertices

    def map(self, g: QuiverMorphism) -> "AdditiveObject":
        return AdditiveObject(tuple(g(v) for v in self.vertices))


def obj(*vertices) -> AdditiveObject:
    return AdditiveObject(tuple(vertices))


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AdditiveMorphism:
    source: AdditiveObject
    target: AdditiveObject
    entries: tuple  # entries[i][j]: source[j] -> target[i]
    ring: str = "Z"

    def __post_init__(self):
        if len(self.entries) != len(self.target) or any(len(r) != len(self.source) for r in self.entries):
            raise ShapeMismatch("entry matrix does not match source/target lengths")
        for i, row in enumerate(self.entries):
            for j, pc in enumerate(row):
                if pc.source != self.source.vertices[j] or pc.target != self.target.vertices[i]:
                    raise ShapeMismatch(f"entry ({i},{j}) has wrong endpoints")

    @classmethod
    def from_entries(cls, source: AdditiveObject, target: AdditiveObject, entries, ring="Z"):
        rows = []
        for i, t in enumerate(target.vertices):
            row = []
            for j, s in enumerate(source.vertices):
                e = entries[i][j] if entries is not None else None
                if e is None:
                    e = PathCombination.zero(s, t, ring)
                elif e.ring != ring:
                    e = e.to_ring(ring)
                row.append(e)
            rows.append(tuple(row))
        return cls(source, target, tuple(rows), ring)

    @classmethod
    def zero(cls, source, target, ring="Z"):
        return _zero_additive(source, target, ring)

    @classmethod
    def identity(cls, a: AdditiveObject, ring="Z"):
        return _identity_additive(a, ring)

    @classmethod
    def _identity(cls, a: AdditiveObject, ring="Z"):
        return cls.from_entries(a, a, [[PathCombination.identity(v, ring) if i == j else None
                                        for j, _ in enumerate(a.vertices)]
                                       for i, v in enumerate(a.vertices)], ring)

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ShapeMismatch("adding morphisms with different endpoints")
        return AdditiveMorphism(self.source, self.target,
                                tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
                                self.ring)

    def scale(self, c):
        return AdditiveMorphism(self.source, self.target,
                                tuple(tuple(a.scale(c) for a in r) for r in self.entries), self.ring)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return all(pc.is_zero() for r in self.entries for pc in r)

    def map(self, g: QuiverMorphism) -> "AdditiveMorphism":
        return AdditiveMorphism(self.source.map(g), self.target.map(g),
                                tuple(tuple(pc.map(g) for pc in r) for r in self.entries), self.ring)

    def to_ring(self, ring):
        return AdditiveMorphism(self.source, self.target,
                                tuple(tuple(pc.to_ring(ring) for pc in r) for r in self.entries), ring)


@lru_cache(maxsize=16384)
def _zero_additive(source, target, ring):
    return AdditiveMorphism.from_entries(source, target, None, ring)


@lru_cache(maxsize=16384)
def _identity_additive(a, ring):
    return AdditiveMorphism._identity(a, ring)


def compose_additive(f: AdditiveMorphism, g: AdditiveMorphism) -> AdditiveMorphism:
    """``f`` after ``g``."""
    if g.target != f.source:
        raise ShapeMismatch("target of g must equal source of f")
    ring = f.ring
    # only nonzero entries contribute; the matrices here are mostly zero
    g_rows = [[(j, pc) for j, pc in enumerate(row) if pc.terms] for row in g.entries]
    rows = []
    for i, t in enumerate(f.target.vertices):
        acc: dict = {}
        for k, b in enumerate(f.entries[i]):
            if not b.terms:
                continue
            for j, a in g_rows[k]:
                acc.setdefault(j, []).extend((p + q, x * y) for p, x in a.terms for q, y in b.terms)
        rows.append(tuple(PathCombination.make(s, t, acc[j], ring) if j in acc else PathCombination.zero(s, t, ring)
                          for j, s in enumerate(g.source.vertices)))
    return AdditiveMorphism(g.source, f.target, tuple(rows), ring)


def direct_sum_additive(fs: Sequence[AdditiveMorphism], ring="Z") -> AdditiveMorphism:
    src = AdditiveObject(tuple(v for f in fs for v in f.source.vertices))
    tgt = AdditiveObject(tuple(v for f in fs for v in f.target.vertices))
    rows = []
    for bi, f in enumerate(fs):
        for i in range(len(f.target)):
            row = []
            for bj, g in enumerate(fs):
                for j in range(len(g.source)):
                    row.append(f.entries[i][j] if bi == bj else None)
            rows.append(row)
    return AdditiveMorphism.from_entries(src, tgt, rows, ring)


def block_additive(blocks: Sequence[Sequence[AdditiveMorphism]], ring="Z") -> AdditiveMorphism:
    """Assemble a morphism between direct sums from a block grid."""
    src = AdditiveObject(tuple(v for b in blocks[0] for v in b.source.vertices))
    tgt = AdditiveObject(tuple(v for row in blocks for v in row[0].target.vertices))
    rows = []
    for brow in blocks:
        for i in range(len(brow[0].target)):
            rows.append([pc for b in brow for pc in b.entries[i]])
    return AdditiveMorphism.from_entries(src, tgt, rows, ring)


# ----------------------------------------------------------------------
# hom spaces as free modules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HomBasis:
    source: AdditiveObject
    target: AdditiveObject
    basis: tuple  # ((i, j, path), ...)
    ring: str

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def index(self) -> dict:
        return {b: k for k, b in enumerate(self.basis)}

    def coordinates(self, f: AdditiveMorphism) -> list:
        vec = [coerce(0, self.ring)] * self.rank
        for i, row in enumerate(f.entries):
            for j, pc in enumerate(row):
                for p, c in pc.terms:
                    vec[self.index[(i, j, p)]] += c
        return vec

    def element(self, coords: Sequence) -> AdditiveMorphism:
        entries = [[[] for _ in self.source.vertices] for _ in self.target.vertices]
        for (i, j, p), c in zip(self.basis, coords):
            if c:
                entries[i][j].append((p, c))
        return AdditiveMorphism.from_entries(
            self.source, self.target,
            [[PathCombination.make(s, t, entries[i][j], self.ring) for j, s in enumerate(self.source.vertices)]
             for i, t in enumerate(self.target.vertices)], self.ring)


def hom_space(q: Quiver, a: AdditiveObject, b: AdditiveObject, ring: str = "Z") -> HomBasis:
    """Free basis of ``Hom(a, b)`` indexed by (entry position, path)."""
    basis = tuple((i, j, p)
                  for i, t in enumerate(b.vertices)
                  for j, s in enumerate(a.vertices)
                  for p in enumerate_paths(q, s, t))
    return HomBasis(a, b, basis, ring)


def linear_map_matrix(domain: Sequence[HomBasis], codomain: HomBasis, fn) -> ExactMatrix:
    """Matrix (codomain coords x stacked domain coords) of an R-linear map.

    ``fn`` takes one morphism per domain hom space and returns a morphism in
    ``codomain``.
    """
    cols = []
    zeros = [d.element([0] * d.rank) for d in domain]
    for k, d in enumerate(domain):
        for idx in range(d.rank):
            args = list(zeros)
            unit = [0] * d.rank
            unit[idx] = 1
            args[k] = d.element(unit)
            cols.append(codomain.coordinates(fn(*args)))
    if not cols:
        return ExactMatrix.zeros(codomain.rank, 0, codomain.ring)
    return ExactMatrix.from_rows(list(zip(*cols)) if codomain.rank else [], codomain.ring, ncols=len(cols))


# ----------------------------------------------------------------------
# loop unrolling
# ----------------------------------------------------------------------

def _sccs(q: Quiver) -> list[list]:
    index, low, onstack, stack, out = {}, {}, set(), [], []
    counter = [0]

    def strong(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        onstack.add(v)
        for e in q.out_edges.get(v, ()):
            w = e.target
            if w not in index:
                strong(w)
                low[v] = min(low[v], low[w])
            elif w in onstack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                onstack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for v in q.vertices:
        if v not in index:
            strong(v)
    return out


def unroll_loops(q: Quiver, depth: int) -> tuple[Quiver, QuiverMorphism]:
    """Acyclic cover of ``q`` in which every path of length <= depth lifts.

    Vertices on a directed cycle get copies ``(v, 0) .. (v, depth)``; inside a
    strongly connected component, edges that go backwards in the vertex order
    (and loops) raise the copy index by one.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if q.acyclic:
        return q, QuiverMorphism.identity(q)
    comp_of, cyclic = {}, set()
    for comp in _sccs(q):
        for v in comp:
            comp_of[v] = id(comp)
        if len(comp) > 1:
            cyclic.update(comp)
    for e in q.edges:
        if e.source == e.target:
            cyclic.add(e.source)
    position = {v: k for k, v in enumerate(q.vertices)}

    def copies(v):
        return [(v, k) for k in range(depth + 1)] if v in cyclic else [v]

    verts, vmap, edges, emap = [], {}, [], {}
    for v in q.vertices:
        for c in copies(v):
            verts.append(c)
            vmap[c] = v
    for e in q.edges:
        s, t = e.source, e.target
        same = s in cyclic and t in cyclic and comp_of[s] == comp_of[t]
        if same:
            step = 1 if position[t] <= position[s] else 0
            for k in range(depth + 1 - step):
                lbl = (e.label, k)
                edges.append(Edge(lbl, (s, k), (t, k + step)))
                emap[lbl] = e.label
        else:
            tgt = (t, 0) if t in cyclic else t
            for c in copies(s):
                lbl = (e.label, c[1]) if s in cyclic else e.label
                edges.append(Edge(lbl, c, tgt))
                emap[lbl] = e.label
    unrolled = Quiver(tuple(verts), tuple(edges))
    return unrolled, QuiverMorphism.build(unrolled, q, vmap, emap)
