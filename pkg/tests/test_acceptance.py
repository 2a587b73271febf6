"""The ten acceptance criteria, each reported as one pass/fail line."""

import os
import random
import subprocess
import sys
import time

from motsheaf import fixtures as fx
from motsheaf.direct_image import DeltaFunctor, DirectImage, connecting_delta, derived_pushforward, twist_compatible
from motsheaf.motives import BaseChangeFailed, DeltaFragment, Localization, LocalizedMorphism, loc_hom_equal
from motsheaf.pairs import base_change_check, has_base_change
from motsheaf.scene import shipped_scenes
from motsheaf.serre import UniversalCategory
from motsheaf.simplicial import SimplicialComplex, SimplicialMap, connecting_map
from motsheaf.suites import (
    abelian_axioms,
    builtin_fragments,
    exactness,
    glue_checks,
    h1_tensor_h1,
    kunneth_ranks,
    pushforward_oracle,
    refinement_checks,
    tensor_relations,
)

POINT_BASES = ("Pt", "Circ", "Disk", "Torus")


def named(checks):
    return [(f"{c.suite}/{c.property}:{c.instance}", c.passed) for c in checks]


def to_point(K):
    return SimplicialMap.constant(K, fx.point())


def test_universal_category_soundness(verdict):
    rng = random.Random(20261016)
    start = time.perf_counter()
    checks = []
    for n in range(26):
        ring = "Z" if n % 2 == 0 else "Q"
        rep = fx.random_representation(rng, ring)
        U = UniversalCategory(rep)
        morphisms = {}
        for e in rep.quiver.edges:
            f = U.edge(e.label)
            morphisms[str(e.label)] = f
            morphisms[f"2*{e.label}"] = U.scale(f, 2)
        for e1 in rep.quiver.edges:
            for e2 in rep.quiver.edges:
                if e1.target == e2.source:
                    morphisms[f"{e2.label}.{e1.label}"] = U.compose(U.edge(e2.label), U.edge(e1.label))
        tag = f"rep{n}/{ring}"
        checks += [(f"{tag}:{name}", ok) for name, ok in named(abelian_axioms(U, morphisms))]
        checks += [(f"{tag}:{name}", ok) for name, ok in named(exactness(U, morphisms))]
    elapsed = time.perf_counter() - start
    checks.append(("runtime under 60 s", elapsed < 60))
    verdict(1, "universal category: abelian axioms, exactness, canonical 2-commutativity on 26 random reps", checks)


def test_cohomology_of_k_matches_sheaf_cohomology(verdict):
    checks, instances = [], 0
    for base in POINT_BASES:
        frag = fx.fragment_over(base)
        instances += len(frag.vertices)
        cs = pushforward_oracle(frag, to_point(frag.base), base)
        checks += [c for c in named(cs) if c[0].split(":")[0].split("/")[1].startswith("H")]
    checks.append((f"{instances} fixture vertices", instances >= 12))
    verdict(2, "H^j of K equals sheaf cohomology of the relative sheaf over Z", checks)


def inclusion_fragments():
    D = fx.disk()
    edge = D.subcomplex([("a", "b")])
    f1 = DeltaFragment(edge)
    f1.add_pair("unit", fx.absolute(edge))
    f1.add_pair("rel", fx.absolute(edge, 0, edge.subcomplex([("b",)])))
    C = fx.circle()
    v = C.subcomplex([("c0",)])
    f2 = DeltaFragment(v)
    f2.add_pair("unit", fx.absolute(v))
    return [(f1, SimplicialMap.inclusion(edge, D), "edge->Disk"), (f2, SimplicialMap.inclusion(v, C), "vertex->Circ")]


def test_direct_image_square(verdict):
    checks = []
    for base in ("Circ", "Disk"):
        frag = fx.fragment_over(base)
        checks += named(pushforward_oracle(frag, to_point(frag.base), f"{base}->Pt"))
    _, p1, _ = fx.torus()
    checks += named(pushforward_oracle(fx.fragment_over("Torus"), p1, "Torus->Circ"))
    for frag, g, tag in inclusion_fragments():
        checks += named(pushforward_oracle(frag, g, tag))
    checks = [c for c in checks if "/r" in c[0]]
    verdict(3, "realized r^j g_* equals the cellular pushforward oracle, j <= 2", checks)


def test_d_squared_certificates(verdict):
    checks = []
    for base in POINT_BASES:
        frag = fx.fragment_over(base)
        checks += named(pushforward_oracle(frag, to_point(frag.base), base, top=1))
    _, p1, _ = fx.torus()
    checks += named(pushforward_oracle(fx.fragment_over("Torus"), p1, "Torus->Circ", top=1))
    for frag, g, tag in inclusion_fragments():
        checks += named(pushforward_oracle(frag, g, tag, top=1))
    checks = [c for c in checks if "d-squared" in c[0]]
    cases = [(fx.circle_sequence, ["rel", "abs", "pt"], ["i", "p"]), (fx.circle_sequence, ["abs", "pt"], ["p"]),
             (fx.interval_sequence, ["rel", "abs", "bd"], ["i", "p"]), (fx.interval_sequence, ["rel", "abs"], ["i"])]
    for build, ms, es in cases:
        frag = build()
        d = DirectImage(frag, to_point(frag.base))
        total, dc = derived_pushforward(d, [frag.motive(m) for m in ms], [frag.edge(e) for e in es])
        tag = f"{build.__name__}:{','.join(ms)}"
        checks += [(f"double/anticommutes:{tag}", dc.anticommutes()), (f"double/d2:{tag}", dc.d_squared_zero()),
                   (f"total/d2:{tag}", total.d_squared_zero())]
    verdict(4, "d^2 = 0 on every K complex and double complex, by realization", checks)


def test_kunneth_and_tensor(verdict):
    T, _, _ = fx.torus()
    C = fx.circle()
    k = kunneth_ranks(C, C, T)
    checks = [("torus ranks (1,2,1)", k.passed and k.detail.startswith("[1, 2, 1]"))]
    checks += named([h1_tensor_h1()])
    checks += named(tensor_relations(fx.segment_fragment("a", "b"), fx.segment_fragment("x", "y"), "segments"))
    checks += named(tensor_relations(fx.disk_triple(), fx.segment_fragment("x", "y"), "disk-segment"))
    verdict(5, "Kunneth over Q and tensor-quiver relations by realization", checks)


def test_localization(verdict):
    checks, fixtures = [], 0
    for base, depth in (("Pt", 2), ("Circ", 1), ("Disk", 1)):
        S, pairs = fx.base_fixtures()[base]
        for name, p in pairs.items():
            fixtures += 1
            frag = DeltaFragment(S)
            frag.add_pair(name, p)
            loc = Localization(frag)
            lm = loc.localize(frag.motive(name))
            tag = f"{base}:{name}"
            a, b = loc.twist(loc.twist(lm, 2), -3), loc.twist(lm, -1)
            checks.append((f"twist-additive:{tag}", a.weight == b.weight and loc.equal(a, b)))
            base_inv = frag.sheaf_category().invariants(loc.realize(lm))
            for k in range(1, depth + 1):
                st = loc.stabilize(lm, k)
                same = st.fragment.sheaf_category().invariants(loc.realize(st)) == base_inv
                checks.append((f"rank-invariant-L^{k}:{tag}", same and loc.equal(lm, st)))
    checks.append((f"{fixtures} fixtures", fixtures >= 10))
    for build in (fx.circle_sequence, fx.interval_sequence):
        frag = build()
        loc = Localization(frag)
        U = frag.category
        for label in ("i", "p"):
            f = U.edge(label)
            s, t = loc.localize(U.source(f)), loc.localize(U.target(f))
            one = LocalizedMorphism(s, t, f)
            tag = f"{build.__name__}:{label}"
            checks.append((f"hom-equal-stabilized:{tag}", loc_hom_equal(loc, one, loc.stabilize_morphism(one, 1))))
            checks.append((f"hom-differs-scaled:{tag}", not loc_hom_equal(loc, one, LocalizedMorphism(s, t, U.scale(f, 2)))))
            checks.append((f"hom-differs-zero:{tag}", not loc_hom_equal(loc, one, LocalizedMorphism(s, t, U.zero_morphism(U.source(f), U.target(f))))))
        for name in frag.vertices:
            lm = loc.localize(frag.motive(name))
            for j in range(3):
                checks.append((f"twist-commutes-r{j}:{build.__name__}:{name}",
                               twist_compatible(loc, lm, to_point(frag.base), j)))
    verdict(6, "localization: twists, rank invariance, hom equality, twist commutes with r^j", checks)


def test_refinement_and_glue(verdict):
    checks = []
    for base in POINT_BASES:
        checks += named(refinement_checks(fx.fragment_over(base), base))
    for tag, frag in builtin_fragments().items():
        checks += named(glue_checks(frag, tag))
    verdict(7, "subdivision refinement agrees with skeletal r^j Gamma; glue is stage independent", checks)


def short_exact_sequences():
    out = []
    for build in (fx.circle_sequence, fx.interval_sequence):
        frag = build()
        out.append((f"{build.__name__}", frag, frag.edge("i"), frag.edge("p")))
    q = fx.circle_sequence("Q")
    out.append(("circle_sequence/Q", q, q.edge("i"), q.edge("p")))
    for build, label in ((fx.circle_sequence, "p"), (fx.interval_sequence, "i"), (fx.interval_sequence, "p")):
        frag = build()
        U = frag.category
        _, k = U.kernel(U.edge(label))
        _, c = U.cokernel(k)
        out.append((f"{build.__name__}:ker/coim {label}", frag, k, c))
    return out


def test_delta_functor(verdict):
    checks = []
    for tag, frag, i, p in short_exact_sequences():
        d = DirectImage(frag, to_point(frag.base))
        checks.append((f"les-exact:{tag}", DeltaFunctor(d, i, p).realized_exact()))
    frag = fx.interval_sequence()
    I = frag.base
    d, delta = connecting_delta(frag, to_point(I), frag.edge("i"), frag.edge("p"), 0)
    got = d.category.realize(delta).components[("p",)].matrix
    want = connecting_map(I, I.skeleton(0), SimplicialComplex.empty(), 0).matrix
    checks.append(("delta matches the simplicial connecting map", got == want))
    checks.append(("at least five sequences", len(short_exact_sequences()) >= 5))
    verdict(8, "long exact sequences of r^j g_* are exact with natural connecting maps", checks)


def test_base_change(verdict):
    checks = []
    C, D = fx.circle(), fx.disk()
    T, p1, _ = fx.torus()
    along = {
        "Pt": [SimplicialMap.identity(fx.point())],
        "Circ": [fx.double_cover(), SimplicialMap.inclusion(C.subcomplex([("c0",)]), C)],
        "Disk": [SimplicialMap.inclusion(fx.disk_boundary(), D), SimplicialMap.inclusion(D.subcomplex([("a",)]), D)],
        "Torus": [SimplicialMap.inclusion(p1.preimage(C.subcomplex([("c0",)])), T)],
    }
    for base, (_, pairs) in fx.base_fixtures().items():
        for name, p in pairs.items():
            checks.append((f"faces:{base}:{name}", has_base_change(p)))
            for n, g in enumerate(along[base]):
                checks.append((f"along-{n}:{base}:{name}", base_change_check(g, p)))
    bad = fx.open_counterexample()
    I = bad.base
    checks.append(("open pair fails", not has_base_change(bad)))
    checks.append(("open pair fails at b", not base_change_check(SimplicialMap.inclusion(I.subcomplex([("b",)]), I), bad)))
    frag = DeltaFragment(I)
    try:
        frag.add_pair("open", bad)
        rejected = False
    except BaseChangeFailed as err:
        rejected = err.witness == ("b",)
    checks.append(("fragment rejects the open pair with witness b", rejected))
    verdict(9, "proper fixtures have base change; the open pair is rejected with a witness", checks)


def cli(*args, cache=None):
    env = dict(os.environ, PYTHONHASHSEED=str(random.randint(1, 2**31)))
    cmd = [sys.executable, "-c", "import sys; from motsheaf.cli import main; sys.exit(main())", *args]
    if cache is None:
        cmd.append("--no-cache")
    else:
        cmd += ["--cache-dir", str(cache)]
    return subprocess.run(cmd, capture_output=True, env=env, timeout=300)


def test_cli_determinism(verdict, tmp_path):
    checks = []
    for name, path in sorted(shipped_scenes().items()):
        for emit in ("text", "structured"):
            cache = tmp_path / f"{name}-{emit}"
            outs = [cli("run", str(path), "--emit", emit, cache=cache),  # cold
                    cli("run", str(path), "--emit", emit, cache=cache),  # warm
                    cli("run", str(path), "--emit", emit),
                    cli("run", str(path), "--emit", emit)]
            ref = outs[0]
            tag = f"{name}/{emit}"
            checks.append((f"{tag}: exit code", ref.returncode == 0))
            checks.append((f"{tag}: non-empty", bool(ref.stdout)))
            checks.append((f"{tag}: byte identical", all(o.stdout == ref.stdout and o.returncode == 0 for o in outs)))
    verdict(10, "CLI reports byte identical across cold, warm and uncached runs of every shipped scene", checks)
