"""Small standard spaces, pairs and fragments used by the verification suites."""

from __future__ import annotations

import random
from functools import lru_cache

from .categories import ModuleCategory
from .exact import ExactMatrix, FpModule, ModuleMorphism, NotWellDefined
from .freyd import Representation
from .motives import DeltaFragment, circle
from .pairs import SimplicialPairOverBase
from .quiver import Quiver
from .simplicial import SimplicialComplex, SimplicialMap, fibre_product


def point() -> SimplicialComplex:
    return SimplicialComplex.point()


def disk() -> SimplicialComplex:
    return SimplicialComplex.from_facets([("a", "b", "c")], name="Disk")


def disk_boundary() -> SimplicialComplex:
    return disk().skeleton(1)


def interval(a="a", b="b") -> SimplicialComplex:
    return SimplicialComplex.from_facets([(a, b)], name="I")


def hexagon() -> SimplicialComplex:
    vs = [f"h{k}" for k in range(6)]
    return SimplicialComplex.from_facets([(vs[k], vs[(k + 1) % 6]) for k in range(6)], name="Hex")


def double_cover() -> SimplicialMap:
    """Connected double cover of the circle."""
    return SimplicialMap.build(hexagon(), circle(), {f"h{k}": f"c{k % 3}" for k in range(6)})


def moebius():
    """Mobius band over the circle; returns ``(projection, boundary)``."""
    C = circle()
    u = lambda i: f"u{i}"  # noqa: E731
    d = lambda i: f"d{i}"  # noqa: E731
    tris = []
    for i in (0, 1):
        tris += [(u(i), d(i), u(i + 1)), (d(i), u(i + 1), d(i + 1))]
    tris += [(u(2), d(2), d(0)), (d(2), d(0), u(0))]
    M = SimplicialComplex.from_facets(tris, vertices=[x for i in range(3) for x in (u(i), d(i))], name="Mob")
    f = SimplicialMap.build(M, C, {x: f"c{x[1]}" for x in M.vertices})
    edges = [(u(0), u(1)), (d(0), d(1)), (u(1), u(2)), (d(1), d(2)), (u(2), d(0)), (d(2), u(0))]
    return f, M.subcomplex(edges)


@lru_cache(maxsize=None)
def torus():
    """``(T, pr1, pr2)`` with ``T = Circ x Circ``."""
    c = circle()
    return fibre_product(SimplicialMap.constant(c, point()), SimplicialMap.constant(c, point()), name="Torus")


def pair(f: SimplicialMap, sub: SimplicialComplex | None, degree: int, name: str = "") -> SimplicialPairOverBase:
    X = f.source
    sub = X.subcomplex(sub.simplices) if sub is not None else X.subcomplex([])
    return SimplicialPairOverBase(f, sub, degree, name=name)


def absolute(S: SimplicialComplex, degree: int = 0, sub: SimplicialComplex | None = None) -> SimplicialPairOverBase:
    return pair(SimplicialMap.identity(S), sub, degree)


def base_fixtures() -> dict:
    """Named bases with their pair fixtures."""
    P, C, D = point(), circle(), disk()
    T, p1, _ = torus()
    pt = SimplicialComplex.point("p")
    to_pt = lambda K: SimplicialMap.constant(K, pt)  # noqa: E731
    v0 = C.subcomplex([("c0",)])
    I = interval("x", "y")
    CI, ci1, ci2 = fibre_product(SimplicialMap.constant(C, pt), SimplicialMap.constant(I, pt))
    CI_sub = ci2.preimage(I.subcomplex([("x",), ("y",)]))
    out = {
        "Pt": (P, {
            "unit": absolute(P),
            "circ-h1": pair(to_pt(C), None, 1),
            "circ-rel": pair(to_pt(C), v0, 1),
            "disk-rel": pair(to_pt(D), disk_boundary(), 2),
        }),
        "Circ": (C, {
            "unit": absolute(C),
            "rel-vertex": absolute(C, 0, v0),
            "torus-h0": pair(p1, None, 0),
            "torus-h1": pair(p1, None, 1),
            "cover": pair(double_cover(), None, 0),
            "moebius-rel": pair(moebius()[0], moebius()[1], 1),
            "cylinder-rel": pair(SimplicialMap.build(CI, C, {v: v[0] for v in CI.vertices}), CI_sub, 1),
        }),
        "Disk": (D, {
            "unit": absolute(D),
            "rel-boundary": absolute(D, 0, disk_boundary()),
            "rel-vertex": absolute(D, 0, D.subcomplex([("a",)])),
        }),
        "Torus": (T, {
            "unit": absolute(T),
            "rel-fibre": absolute(T, 0, p1.preimage(v0)),
        }),
    }
    return out


def fragment_over(base_name: str, ring: str = "Z") -> DeltaFragment:
    """All pair fixtures over one base, without edges."""
    S, pairs = base_fixtures()[base_name]
    frag = DeltaFragment(S, ring)
    for name, p in pairs.items():
        frag.add_pair(name, p)
    return frag


def circle_sequence(ring: str = "Z"):
    """``h(C, v) -> h(C) -> h(v)`` over the circle, with its edges."""
    C = circle()
    v = C.subcomplex([("c0",)])
    frag = DeltaFragment(C, ring)
    frag.add_pair("rel", absolute(C, 0, v))
    frag.add_pair("abs", absolute(C))
    frag.add_pair("pt", pair(SimplicialMap.inclusion(v, C), None, 0))
    frag.add_map("i", "abs", "rel", SimplicialMap.identity(C))
    frag.add_map("p", "pt", "abs", SimplicialMap.inclusion(v, C))
    return frag


def interval_sequence(ring: str = "Z"):
    """``h(I, dI) -> h(I) -> h(dI)`` over the interval."""
    I = interval()
    B = I.skeleton(0)
    frag = DeltaFragment(I, ring)
    frag.add_pair("rel", absolute(I, 0, B))
    frag.add_pair("abs", absolute(I))
    frag.add_pair("bd", pair(SimplicialMap.inclusion(B, I), None, 0))
    frag.add_map("i", "abs", "rel", SimplicialMap.identity(I))
    frag.add_map("p", "bd", "abs", SimplicialMap.inclusion(B, I))
    return frag


def disk_triple(ring: str = "Z"):
    """``(Circ, {}, 1) -> (Disk, Circ, 2)`` over a point with its connecting edge."""
    P, D = point(), disk()
    B = disk_boundary()
    to_pt = lambda K: SimplicialMap.constant(K, P)  # noqa: E731
    frag = DeltaFragment(P, ring)
    frag.add_pair("circ", pair(to_pt(B), None, 1))
    frag.add_pair("disk", pair(to_pt(D), B, 2))
    frag.add_connecting("d", "circ", "disk")
    return frag


def segment_fragment(a="a", b="b", ring: str = "Z"):
    """Cellular pairs over a point joined by a connecting edge and a map."""
    P = point()
    I = interval(a, b)
    B = I.skeleton(0)
    v = I.subcomplex([(b,)])
    frag = DeltaFragment(P, ring)
    frag.add_pair("lo", pair(SimplicialMap.constant(B, P), B.subcomplex([(b,)]), 0))
    frag.add_pair("up", pair(SimplicialMap.constant(I, P), B, 1))
    frag.add_pair("seg", pair(SimplicialMap.constant(I, P), v, 0))
    frag.add_connecting("c", "lo", "up")
    frag.add_map("r", "lo", "seg", SimplicialMap.inclusion(B, I))
    return frag


def product_fibration(ring: str = "Z"):
    """``I x J -> I`` relative to ``I x dJ`` with the connecting edge from ``I x dJ``."""
    P = point()
    I, J = interval("a", "b"), interval("x", "y")
    X, px, pj = fibre_product(SimplicialMap.constant(I, P), SimplicialMap.constant(J, P))
    Y = pj.preimage(J.skeleton(0))
    frag = DeltaFragment(I, ring)
    frag.add_pair("up", pair(px, Y, 1))
    frag.add_pair("lo", pair(px.restrict(Y), None, 0))
    frag.add_connecting("c", "lo", "up")
    return frag


def open_counterexample():
    """An open edge over an interval: the analogue of a punctured line over the line."""
    I = interval()
    return SimplicialPairOverBase(SimplicialMap.identity(I), I.subcomplex([]), 0, removed=I.subcomplex([("b",)]))


def random_representation(rng: random.Random, ring: str = "Z", max_vertices: int = 4, max_dim: int = 4,
                          bound: int = 3) -> Representation:
    """A random acyclic quiver with module values; edges only go up in vertex order.

    Over Z a vertex may carry one torsion summand; maps out of torsion
    generators that would not be well defined are zeroed.
    """
    n = rng.randint(2, max_vertices)
    verts = [f"v{i}" for i in range(n)]
    mods = {}
    for v in verts:
        k = rng.randint(0, max_dim)
        if ring == "Z" and k and rng.random() < 0.3:
            mods[v] = FpModule.from_invariants(k - 1, (rng.randint(2, 4),))
        else:
            mods[v] = FpModule.free(k, ring)
    edges, maps = [], {}
    for i in range(n):
        for j in range(i + 1, n):
            count = rng.choice((0, 1, 1, 2)) or int(i == 0 and j == 1)
            for m in range(count):
                label = f"e{i}{j}" + ("'" * m)
                edges.append((label, verts[i], verts[j]))
                s, t = mods[verts[i]], mods[verts[j]]
                rows = [[rng.randint(-bound, bound) for _ in range(s.ngens)] for _ in range(t.ngens)]
                mat = ExactMatrix.from_rows(rows, ring, ncols=s.ngens)
                try:
                    maps[label] = ModuleMorphism(s, t, mat)
                except NotWellDefined:
                    tors = {c for c in range(s.ngens) if any(r[c] for r in s.relations.data)}
                    rows = [[0 if c in tors else x for c, x in enumerate(r)] for r in rows]
                    maps[label] = ModuleMorphism(s, t, ExactMatrix.from_rows(rows, ring, ncols=s.ngens))
    return Representation(Quiver.build(verts, edges), ModuleCategory(ring), mods, maps)
