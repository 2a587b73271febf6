"""Property suites run by ``verify``: each returns a list of ``Check`` records."""

from __future__ import annotations

from dataclasses import dataclass

from . import fixtures as fx
from .direct_image import DirectImage, Refinement, lifted_filtration, subdivided_pair
from .motives import DeltaFragment, TensorFunctor, change_coefficients
from .serre import UniversalCategory, colimit_glue
from .sheaves import SheafCategory, derived_pushforward_oracle, sheaf_cohomology, skeletal_filtration
from .simplicial import SimplicialMap, relative_cohomology
from .tensor_quiver import TensorSquare, associativity_relation, unit_pair


@dataclass
class Check:
    suite: str
    property: str
    instance: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"property": f"{self.suite}/{self.property}", "instance": self.instance,
                "status": "pass" if self.passed else "FAIL", "data": {"detail": self.detail} if self.detail else {}}


# ----------------------------------------------------------------------
# abelian axioms and exactness of the realization
# ----------------------------------------------------------------------

def abelian_axioms(U: UniversalCategory, morphisms: dict, suite="abelian-axioms") -> list:
    """Kernel/cokernel universality and (co)image identities on the given morphisms."""
    out = []
    for name, f in morphisms.items():
        K, k = U.kernel(f)
        Q, q = U.cokernel(f)
        out.append(Check(suite, "kernel-composite", name, U.is_zero(U.compose(f, k))))
        out.append(Check(suite, "cokernel-composite", name, U.is_zero(U.compose(q, f))))
        out.append(Check(suite, "kernel-universal", name, U.equal(U.compose(k, U.lift(k, k)), k)))
        out.append(Check(suite, "cokernel-universal", name, U.equal(U.compose(U.colift(q, q), q), q)))
        # the image of f is both ker(coker f) and coker(ker f)
        _, kq = U.kernel(q)
        _, ck = U.cokernel(k)
        out.append(Check(suite, "coimage-is-image", name,
                         U.invariants(U.source(kq)) == U.invariants(U.target(ck))))
        if U.is_mono(f):
            _, kk = U.kernel(q)
            out.append(Check(suite, "monic-is-kernel", name, U.is_iso(U.lift(kk, f))))
        if U.is_epi(f):
            _, cc = U.cokernel(k)
            out.append(Check(suite, "epic-is-cokernel", name, U.is_iso(U.colift(cc, f))))
    return out


def exactness(U: UniversalCategory, morphisms: dict, suite="exactness") -> list:
    """Realization commutes with kernels and cokernels; agrees with the representation."""
    T = U.target_category
    out = []
    for name, f in morphisms.items():
        rf = U.realize(f)
        K, k = U.kernel(f)
        Q, q = U.cokernel(f)
        out.append(Check(suite, "kernel", name, T.invariants(U.realize_object(K)) == T.invariants(T.kernel(rf)[0])))
        out.append(Check(suite, "cokernel", name,
                         T.invariants(U.realize_object(Q)) == T.invariants(T.cokernel(rf)[0])))
        out.append(Check(suite, "kernel-map-mono", name, T.is_mono(U.realize(k))))
    rep = U.rep
    for v in rep.quiver.vertices:
        out.append(Check(suite, "canonical-vertex", str(v),
                         T.invariants(U.realize_object(U.vertex(v))) == T.invariants(rep.vertex(v))))
    for e in rep.quiver.edges:
        out.append(Check(suite, "canonical-edge", str(e.label), T.equal(U.realize(U.edge(e.label)),
                                                                         rep.edge_morphisms[e.label])))
    return out


def fragment_morphisms(frag: DeltaFragment) -> dict:
    U = frag.category
    out = {}
    for e in frag.quiver.edges:
        f = U.edge(e.label)
        out[str(e.label)] = f
        out[f"2*{e.label}"] = U.scale(f, 2)
    for v in frag.quiver.vertices:
        out[f"id:{v}"] = U.identity(U.vertex(v))
    return out


def builtin_fragments(ring="Z") -> dict:
    return {"circle-sequence": fx.circle_sequence(ring), "interval-sequence": fx.interval_sequence(ring),
            "disk-triple": fx.disk_triple(ring), "segments": fx.segment_fragment(ring=ring)}


# ----------------------------------------------------------------------
# Kunneth and tensor
# ----------------------------------------------------------------------

def kunneth_ranks(a, b, p) -> Check:
    rk = lambda K: [relative_cohomology(K, None, n, "Q").rank for n in range(K.dim + 1)]  # noqa: E731
    ra, rb, rp = rk(a), rk(b), rk(p)
    conv = [sum(ra[i] * rb[n - i] for i in range(len(ra)) if 0 <= n - i < len(rb))
            for n in range(len(ra) + len(rb) - 1)]
    ok = rp + [0] * (len(conv) - len(rp)) == conv + [0] * (len(rp) - len(conv))
    return Check("kunneth", "ranks", p.name or "product", ok, f"{rp} vs {conv}")


def h1_tensor_h1() -> Check:
    """``h^1(Circ, v) (x) h^1(Circ, v)`` over a point, rational coefficients."""
    P, C = fx.point(), fx.circle()
    p = fx.pair(SimplicialMap.constant(C, P), C.subcomplex([("c0",)]), 1)
    frag = DeltaFragment(P, "Q")
    frag.add_pair("h", p)
    T = TensorFunctor(p, frag)
    F = T.category.realize_object(T.vertex_image("h"))
    stalk = F.stalks[("p",)]
    deg = T.target.vertices[("x", "h")].pair.degree
    return Check("kunneth", "h1-tensor-h1", "Circ", stalk.rank == 1 and deg == 2, f"rank {stalk.rank}, degree {deg}")


def tensor_relations(left: DeltaFragment, right: DeltaFragment, tag: str) -> list:
    sq = TensorSquare(left, right)
    out = [Check("tensor-relations", r.relation, f"{tag}:{r.instance}", r.passed) for r in sq.all_relations()]
    lv = list(left.vertices.values())
    rv = list(right.vertices.values())
    for a in lv[:2]:
        r = associativity_relation(a.pair, rv[0].pair, unit_pair(left.base), left.ring)
        out.append(Check("tensor-relations", r.relation, f"{tag}:{r.instance}", r.passed))
    return out


# ----------------------------------------------------------------------
# pushforward oracle and refinement
# ----------------------------------------------------------------------

def pushforward_oracle(frag: DeltaFragment, g: SimplicialMap, tag: str, top: int = 3, objects=None) -> list:
    """``R_B(r^j g_* m)`` against the cellular pushforward of ``R_B m``."""
    d = DirectImage(frag, g)
    C = d.category
    Q = SheafCategory(g.target, frag.ring)
    out = []
    objects = objects or {n: frag.motive(n) for n in frag.vertices}
    for name, m in objects.items():
        K = d.k_complex(m)
        out.append(Check("pushforward-oracle", "d-squared", f"{tag}:{name}", K.d_squared_zero()))
        F = frag.category.realize_object(m)
        for j in range(top):
            got = C.realize_object(K.cohomology(j))
            want = derived_pushforward_oracle(g, F, j)
            out.append(Check("pushforward-oracle", f"r{j}", f"{tag}:{name}", Q.invariants(got) == Q.invariants(want)))
        if len(g.target.vertices) == 1:
            for j in range(top):
                got = C.realize_object(K.cohomology(j)).stalks[g.target.sorted_simplices[0]]
                out.append(Check("pushforward-oracle", f"H{j}", f"{tag}:{name}",
                                 got.invariants() == sheaf_cohomology(F, j).invariants()))
    return out


def refinement_checks(frag: DeltaFragment, tag: str) -> list:
    """Global sections against a skeletal filtration and against a subdivision."""
    S = frag.base
    P = fx.point()
    g = SimplicialMap.constant(S, P)
    out = []
    d = DirectImage(frag, g, skeletal_filtration(S))
    sd_frag = DeltaFragment(subdivided_pair(next(iter(frag.vertices.values())).pair).base, frag.ring)
    for n, v in frag.vertices.items():
        sd_frag.add_pair(n, subdivided_pair(v.pair), check=False)
    sdS = sd_frag.base
    g2 = SimplicialMap.constant(sdS, P)
    R = Refinement(sd_frag, g2, [skeletal_filtration(sdS), lifted_filtration(skeletal_filtration(S), S)])
    for n in frag.vertices:
        m = frag.motive(n)
        m2 = sd_frag.motive(n)
        out.append(Check("refinement", "quasi-isomorphism", f"{tag}:{n}", R.is_quasi_isomorphism(m2)))
        K1, K2 = d.k_complex(m), R.images[1].k_complex(m2)
        same = all(d.category.realize_object(K1.cohomology(j)).stalks[("p",)].invariants()
                   == R.target.category.realize_object(K2.cohomology(j)).stalks[("p",)].invariants()
                   for j in range(S.dim + 2))
        out.append(Check("refinement", "subdivision-invariance", f"{tag}:{n}", same))
    return out


def glue_checks(frag: DeltaFragment, tag: str) -> list:
    """Operations computed in a small stage agree with the full category."""
    U = frag.category
    verts = list(frag.quiver.vertices)
    stages = [verts[:k] for k in range(1, len(verts) + 1)]
    G = colimit_glue(U.rep, stages)
    full = G.stage(len(stages) - 1)
    out = []
    for e in frag.quiver.edges:
        f = U.edge(e.label)
        k = G.stage_index(f)
        small = G.stage(k)
        T = small.target_category
        fs = small.edge(e.label)
        ff = full.edge(e.label)
        ok = T.invariants(small.realize_object(small.kernel(fs)[0])) == \
            T.invariants(full.realize_object(full.kernel(ff)[0]))
        ok = ok and T.invariants(small.realize_object(small.cokernel(fs)[0])) == \
            T.invariants(full.realize_object(full.cokernel(ff)[0]))
        ok = ok and T.equal(small.realize(small.compose(fs, small.identity(small.source(fs)))), full.realize(ff))
        out.append(Check("refinement", "glue-stage-independence", f"{tag}:{e.label}", ok))
    return out


# ----------------------------------------------------------------------
# suite registry
# ----------------------------------------------------------------------

def suite_abelian(session=None) -> list:
    out = []
    for tag, frag in _fragments(session).items():
        out += [Check(c.suite, c.property, f"{tag}:{c.instance}", c.passed)
                for c in abelian_axioms(frag.category, fragment_morphisms(frag))]
    return out


def suite_exactness(session=None) -> list:
    out = []
    for tag, frag in _fragments(session).items():
        out += [Check(c.suite, c.property, f"{tag}:{c.instance}", c.passed)
                for c in exactness(frag.category, fragment_morphisms(frag))]
        q, functor = change_coefficients(frag, "Q")
        U = frag.category
        for e in frag.quiver.edges:
            f = U.edge(e.label)
            K, _ = U.kernel(f)
            img = functor.on_object(K)
            rank_z = [m.rank for m in U.realize_object(K).stalks.values()]
            rank_q = [m.rank for m in q.category.realize_object(img).stalks.values()]
            out.append(Check("exactness", "coefficients-commute-with-kernel", f"{tag}:{e.label}", rank_z == rank_q))
    return out


def suite_kunneth(session=None) -> list:
    T, _, _ = fx.torus()
    C = fx.circle()
    out = [kunneth_ranks(C, C, T), h1_tensor_h1()]
    if session is not None:
        sc = session.scene
        for name, (a, b, base) in sc.products.items():
            if len(sc.complexes[base].vertices) == 1:
                out.append(kunneth_ranks(sc.complexes[a], sc.complexes[b], sc.complexes[name]))
    return out


def suite_pushforward(session=None) -> list:
    out = []
    P = fx.point()
    for bname in ("Pt", "Circ", "Disk"):
        frag = fx.fragment_over(bname)
        out += pushforward_oracle(frag, SimplicialMap.constant(frag.base, P), f"{bname}->Pt")
    T, p1, _ = fx.torus()
    tfrag = DeltaFragment(T)
    tfrag.add_pair("unit", fx.absolute(T))
    out += pushforward_oracle(tfrag, p1, "Torus->Circ")
    if session is not None:
        sc = session.scene
        for fname in sc.fragments:
            frag, _ = session.fragment(fname)
            for mname, g in sorted(sc.maps.items()):
                if g.source == frag.base and frag.vertices:
                    out += pushforward_oracle(frag, g, f"{fname}/{mname}")
    return out


def suite_refinement(session=None) -> list:
    out = []
    for bname in ("Pt", "Circ"):
        out += refinement_checks(fx.fragment_over(bname), bname)
    for tag, frag in builtin_fragments().items():
        out += glue_checks(frag, tag)
    if session is not None:
        for fname in session.scene.fragments:
            frag, _ = session.fragment(fname)
            if frag.vertices and all(not v.pair.is_open for v in frag.vertices.values()):
                out += glue_checks(frag, fname)
    return out


def suite_tensor(session=None) -> list:
    return tensor_relations(fx.segment_fragment("a", "b"), fx.segment_fragment("x", "y"), "segments")


def _fragments(session) -> dict:
    out = dict(builtin_fragments())
    if session is not None:
        for fname in session.scene.fragments:
            frag, _ = session.fragment(fname)
            if frag.vertices:
                out[f"scene:{fname}"] = frag
    return out


SUITES = {
    "abelian-axioms": suite_abelian,
    "exactness": suite_exactness,
    "kunneth": suite_kunneth,
    "pushforward-oracle": suite_pushforward,
    "refinement": suite_refinement,
    "tensor-relations": suite_tensor,
}
