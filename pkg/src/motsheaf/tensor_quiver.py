"""Relations of the graded tensor quiver, checked on realizations.

Given two fragments over one base, ``TensorSquare`` declares every product
``w (x) v`` (left vertex first) and ``v (x) w`` in a single fragment, with the
edges ``id (x) e``, the symmetry maps and unit maps.  Each relation is then an
equality of morphisms in the universal category, decided by realization.
"""

from __future__ import annotations

from dataclasses import dataclass

from .motives import (
    DeltaFragment,
    Type1Edge,
    TensorFunctor,
    Type2Edge,
    declare_tensor_edge,
    edge_value,
)
from .pairs import SimplicialPairOverBase, product_pair
from .serre import QuotientMorphism
from .simplicial import SimplicialComplex, SimplicialMap


@dataclass
class RelationResult:
    relation: str
    instance: str
    passed: bool


def _degree(e) -> int:
    return 1 if isinstance(e, Type2Edge) else 0


def _ends(frag: DeltaFragment, e):
    """``(source, target)`` of the motive morphism of an edge."""
    if isinstance(e, Type1Edge):
        return e.target, e.source
    return e.lower, e.upper


def unit_pair(base: SimplicialComplex) -> SimplicialPairOverBase:
    """``h^0_S(S, {})``."""
    return SimplicialPairOverBase(SimplicialMap.identity(base), SimplicialComplex.empty(), 0, name="1")


def _swap(src: SimplicialPairOverBase, tgt: SimplicialPairOverBase) -> SimplicialMap:
    return SimplicialMap.build(src.total, tgt.total, {(a, b): (b, a) for (a, b) in src.total.vertices})


class TensorSquare:
    """Products of two fragments together with symmetry and unit edges."""

    def __init__(self, left: DeltaFragment, right: DeltaFragment):
        if left.base != right.base or left.ring != right.ring:
            raise ValueError("fragments must share base and ring")
        self.left, self.right = left, right
        T = self.target = DeltaFragment(left.base, left.ring, left.unroll_depth)
        ring = left.ring
        self.xy = {}
        self.yx = {}
        for w, wv in left.vertices.items():
            for v, vv in right.vertices.items():
                self.xy[w, v] = product_pair(wv.pair, vv.pair, ring, check_flat=False)
                self.yx[v, w] = product_pair(vv.pair, wv.pair, ring, check_flat=False)
                T.add_pair(("x", w, v), self.xy[w, v], check=False)
                T.add_pair(("y", v, w), self.yx[v, w], check=False)
        # id_w (x) e for right edges on both copies, id_v (x) f for left edges
        self.right_edges = {}
        for fam in ("x", "x'"):
            for w, wv in left.vertices.items():
                prod = {v: self.xy[w, v] for v in right.vertices}
                if fam == "x'":
                    for v in right.vertices:
                        T.add_pair((fam, w, v), self.xy[w, v], check=False)
                for label, e in right.edges.items():
                    self.right_edges[fam, w, label] = declare_tensor_edge(
                        T, wv.pair, label, e, prod,
                        lambda kind, x, w=w, fam=fam: (fam, w, x) if kind == "x" and x in right.vertices
                        else (fam + kind, w, x))
        self.left_edges = {}
        for v, vv in right.vertices.items():
            prod = {w: self.yx[v, w] for w in left.vertices}
            for label, f in left.edges.items():
                self.left_edges[v, label] = declare_tensor_edge(
                    T, vv.pair, label, f, prod, lambda kind, x, v=v: ("y", v, x) if kind == "x" and x in left.vertices
                    else ("y" + kind, v, x))
        # symmetry: x -> y -> x' keeps the quiver acyclic
        for (w, v), p in self.xy.items():
            q = self.yx[v, w]
            T.add_map(("alpha'", w, v), ("y", v, w), ("x", w, v), _swap(q, p))
            T.add_map(("alpha", w, v), ("x'", w, v), ("y", v, w), _swap(p, q))
        # unit: 1 (x) v with the projection to v
        one = unit_pair(left.base)
        self.unit = {}
        for v, vv in right.vertices.items():
            T.add_pair(("v", v), vv.pair, check=False)
            up = product_pair(one, vv.pair, ring, check_flat=False)
            T.add_pair(("u", v), up, check=False)
            T.add_map(("unit", v), ("u", v), ("v", v),
                      SimplicialMap.build(up.total, vv.pair.total, {(s, x): x for (s, x) in up.total.vertices}))
        for label, e in right.edges.items():
            if isinstance(e, Type1Edge):
                T.add_map(("v-e", label), ("v", e.source), ("v", e.target), e.map.g)
            else:
                T.add_connecting(("v-e", label), ("v", e.lower), ("v", e.upper))
        prod = {v: product_pair(one, vv.pair, ring, check_flat=False) for v, vv in right.vertices.items()}
        self.unit_edges = {label: declare_tensor_edge(
            T, one, label, e, prod, lambda kind, x: ("u", x) if kind == "x" and x in right.vertices else ("u" + kind, x))
            for label, e in right.edges.items()}

    @property
    def category(self):
        return self.target.category

    # morphisms ----------------------------------------------------------
    def id_tensor(self, w, label, fam="x") -> QuotientMorphism:
        """``id_w (x) e``."""
        return edge_value(self.target, self.right_edges[fam, w, label])

    def tensor_id(self, label, v) -> QuotientMorphism:
        """``f (x) id_v``, transported through the symmetry (lands in the second copy)."""
        C = self.category
        a, b = _ends(self.left, self.left.edges[label])
        inner = edge_value(self.target, self.left_edges[v, label])
        to_y = self.target.edge(("alpha'", a, v))
        back = self.target.edge(("alpha", b, v))
        return C.compose(back, C.compose(inner, to_y))

    # relations ----------------------------------------------------------
    def identity_relation(self):
        """``id_w (x) id_v = id_{w (x) v}`` through the tensor functor of ``w``."""
        out = []
        for w, wv in self.left.vertices.items():
            T = TensorFunctor(wv.pair, self.right, check=False)
            C = T.category
            for v in self.right.vertices:
                m = self.right.motive(v)
                img = T.on_morphism(self.right.category.identity(m))
                out.append(RelationResult("identity", f"{w}|{v}", C.equal(img, C.identity(T.vertex_image(v)))))
        return out

    def _is_identity(self, f) -> bool:
        """``f`` runs between two copies of one pair and realizes to the identity."""
        C = self.category
        T = C.target_category
        r = C.realize(f)
        return r.source == r.target and T.equal(r, T.identity(r.source))

    def alpha_involution(self):
        C = self.category
        out = []
        for (w, v) in self.xy:
            both = C.compose(self.target.edge(("alpha", w, v)), self.target.edge(("alpha'", w, v)))
            out.append(RelationResult("alpha-involution", f"{w}|{v}", self._is_identity(both)))
        return out

    def interchange(self):
        """``(f (x) id)(id (x) e) = (-1)^{|e||f|} (id (x) e)(f (x) id)``."""
        C = self.category
        out = []
        for fl, f in self.left.edges.items():
            a, b = _ends(self.left, f)
            for el, e in self.right.edges.items():
                c, d = _ends(self.right, e)
                lhs = C.compose(self.tensor_id(fl, d), self.id_tensor(a, el))
                rhs = C.compose(self.id_tensor(b, el, "x'"), self.tensor_id(fl, c))
                sign = (-1) ** (_degree(e) * _degree(f))
                out.append(RelationResult("signed-interchange", f"{fl}|{el}", C.equal(lhs, C.scale(rhs, sign))))
        return out

    def unit_relation(self):
        C = self.category
        out = []
        for v in self.right.vertices:
            out.append(RelationResult("unit-iso", str(v), C.is_iso(self.target.edge(("unit", v)))))
        for el, e in self.right.edges.items():
            c, d = _ends(self.right, e)
            u_c, u_d = self.target.edge(("unit", c)), self.target.edge(("unit", d))
            lhs = C.compose(u_d, self.target.edge(("v-e", el)))
            rhs = C.compose(edge_value(self.target, self.unit_edges[el]), u_c)
            out.append(RelationResult("unit-natural", str(el), C.equal(lhs, rhs)))
        return out

    def all_relations(self):
        return self.identity_relation() + self.alpha_involution() + self.interchange() + self.unit_relation()


def associativity_relation(a: SimplicialPairOverBase, b: SimplicialPairOverBase, c: SimplicialPairOverBase,
                           ring: str = "Z") -> RelationResult:
    """``beta . beta' = id`` for ``(a b) c`` and ``a (b c)``."""
    lp = product_pair(product_pair(a, b, ring, check_flat=False), c, ring, check_flat=False)
    rp = product_pair(a, product_pair(b, c, ring, check_flat=False), ring, check_flat=False)
    T = DeltaFragment(a.base, ring)
    T.add_pair("l", lp, check=False)
    T.add_pair("r", rp, check=False)
    T.add_pair("l'", lp, check=False)
    T.add_map("beta", "r", "l", SimplicialMap.build(rp.total, lp.total,
                                                     {(x, (y, z)): ((x, y), z) for (x, (y, z)) in rp.total.vertices}))
    T.add_map("beta'", "l'", "r", SimplicialMap.build(lp.total, rp.total,
                                                       {((x, y), z): (x, (y, z)) for ((x, y), z) in lp.total.vertices}))
    C = T.category
    both = C.compose(T.edge("beta'"), T.edge("beta"))
    r = C.realize(both)
    S = C.target_category
    ok = r.source == r.target and S.equal(r, S.identity(r.source)) and C.is_iso(T.edge("beta"))
    return RelationResult("beta-inverse", f"{a.label()}|{b.label()}|{c.label()}", ok)
