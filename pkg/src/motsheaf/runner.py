"""Execution of scenes: fragments, commands, the result cache and reports."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .direct_image import DirectImage, Refinement, adapted_check_pair, relative_filtration
from .exact import FpModule
from .motives import BaseChangeFailed, DeltaFragment, Localization, TensorFunctor, base_change_witness, is_cellular
from .pairs import relative_sheaf
from .scene import Command, Scene
from .sheaves import (
    CellularSheaf,
    Filtration,
    SheafMorphism,
    derived_pushforward_oracle,
    sheaf_cohomology,
    skeletal_filtration,
)
from .simplicial import relative_cohomology

CACHE_ENV = "MOTSHEAF_CACHE_DIR"


class EngineError(RuntimeError):
    """An engine failure while running a command; carries the command context."""

    def __init__(self, command: Command | None, cause: Exception):
        self.command, self.cause = command, cause
        where = f"line {command.line} ({command.canonical()}): " if command else ""
        super().__init__(f"{where}{type(cause).__name__}: {cause}")


class UnknownSuite(ValueError):
    pass


# ----------------------------------------------------------------------
# plain-data renderings
# ----------------------------------------------------------------------

def face_label(s) -> str:
    return ".".join(str(v) for v in s)


def module_data(m: FpModule) -> dict:
    rank, torsion = m.invariants()
    return {"rank": rank, "torsion": list(torsion)}


def module_text(m: FpModule) -> str:
    return m.describe()


def _entry(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def matrix_data(mat) -> list:
    return [[_entry(x) for x in row] for row in mat.data]


def sheaf_data(F: CellularSheaf) -> dict:
    return {face_label(s): module_data(F.stalks[s]) for s in F.base.sorted_simplices}


def sheaf_morphism_data(f: SheafMorphism) -> dict:
    return {face_label(s): matrix_data(f.components[s].matrix) for s in f.source.base.sorted_simplices}


# ----------------------------------------------------------------------
# cache
# ----------------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "motsheaf"


class ResultCache:
    """Content-addressed store of command results (normalized JSON)."""

    def __init__(self, root: Path | str | None):
        self.root = Path(root) if root is not None else None
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(*parts) -> str:
        h = hashlib.sha256()
        for p in parts:
            h.update(json.dumps(p, sort_keys=True).encode())
            h.update(b"\0")
        return h.hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        if self.root is None:
            return None
        p = self._path(key)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            self.misses += 1
            return None
        self.hits += 1
        return data

    def put(self, key: str, value) -> None:
        if self.root is None:
            return
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(value, fh, sort_keys=True)
        os.replace(tmp, p)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

@dataclass
class Report:
    scene: dict
    results: list = field(default_factory=list)
    failures: int = 0

    def structured(self) -> str:
        return json.dumps({"engine": __version__, "scene": self.scene, "results": self.results,
                           "failures": self.failures}, sort_keys=True, indent=2) + "\n"

    def text(self) -> str:
        lines = [f"motsheaf {__version__}"]
        lines.append("scene: " + ", ".join(f"{k}={v}" for k, v in sorted(self.scene.items())))
        for r in self.results:
            head = r.get("command") or f"{r.get('property', '')} {r.get('instance', '')}".strip()
            lines.append(f"[{r['status']}] {head}")
            lines.extend("    " + ln for ln in _text_lines(r.get("data", {}), ring=self.scene.get("ring", "Z")))
        lines.append(f"failures: {self.failures}")
        return "\n".join(lines) + "\n"

    def emit(self, fmt: str = "text") -> str:
        return self.structured() if fmt == "structured" else self.text()


def _text_lines(data, prefix="", ring="Z") -> list:
    out = []
    if isinstance(data, dict):
        for k in sorted(data):
            v = data[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{prefix}{k}:")
                out.extend(_text_lines(v, prefix + "  ", ring))
            else:
                out.append(f"{prefix}{k}: {_flat_text(v, ring)}")
    elif isinstance(data, list):
        for i, v in enumerate(data):
            if isinstance(v, (dict, list)) and not _flat(v):
                out.append(f"{prefix}- [{i}]")
                out.extend(_text_lines(v, prefix + "  ", ring))
            else:
                out.append(f"{prefix}- {_flat_text(v, ring)}")
    else:
        out.append(f"{prefix}{data}")
    return out


def _flat(v) -> bool:
    if isinstance(v, dict):
        return set(v) <= {"rank", "torsion"}
    if isinstance(v, list):
        return all(not isinstance(x, dict) for x in v) and all(
            not isinstance(x, list) or all(not isinstance(y, (list, dict)) for y in x) for x in v)
    return True


def _flat_text(v, ring) -> str:
    if isinstance(v, dict) and set(v) <= {"rank", "torsion"}:
        parts = [f"{ring}^{v['rank']}"] if v.get("rank") else []
        parts += [f"Z/{t}" for t in v.get("torsion", [])]
        return " + ".join(parts) or "0"
    if isinstance(v, list):
        return json.dumps(v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# ----------------------------------------------------------------------
# the session
# ----------------------------------------------------------------------

class Session:
    """Engine objects for one scene (fragments are built lazily, once)."""

    def __init__(self, scene: Scene, ring: str | None = None, unroll_depth: int = 2,
                 default_filtration: str | None = None, cache: ResultCache | None = None,
                 timing: bool = False):
        self.scene = scene
        self.ring = ring or scene.ring
        self.unroll_depth = unroll_depth
        self.default_filtration = default_filtration
        self.cache = cache or ResultCache(None)
        self.timing = timing
        self._frags: dict = {}

    # objects -------------------------------------------------------------
    def fragment(self, name) -> tuple[DeltaFragment, list]:
        """``(fragment, rejected)``; rejected vertices carry their witness face."""
        if name not in self._frags:
            decl = self.scene.fragments[name]
            S = self.scene.complexes[decl.base]
            frag = DeltaFragment(S, self.ring, self.unroll_depth)
            rejected = []
            for p in decl.pairs:
                try:
                    frag.add_pair(p, self.scene.pairs[p])
                except BaseChangeFailed as e:
                    rejected.append({"vertex": p, "witness": face_label(e.witness)})
            bad = {r["vertex"] for r in rejected}
            for label, kind, a, b, mname, _ in decl.edges:
                if a in bad or b in bad:
                    continue
                if kind == "map":
                    frag.add_map(label, a, b, self.scene.maps[mname])
                else:
                    frag.add_connecting(label, a, b)
            self._frags[name] = (frag, rejected)
        return self._frags[name]

    def vertex(self, fname, pname):
        frag, rejected = self.fragment(fname)
        if pname not in frag.vertices:
            raise ValueError(f"vertex {pname!r} was rejected from fragment {fname!r}")
        return frag, frag.motive(pname)

    def filtration(self, name, base):
        decl = self.scene.filtrations[name]
        if decl[0] == "skeletal":
            return skeletal_filtration(self.scene.complexes[decl[1]])
        if decl[0] == "relative":
            return relative_filtration(self.scene.maps[decl[1]])
        return Filtration(tuple(base.subcomplex(self.scene.complexes[s].simplices) for s in decl[1:]))

    # commands ------------------------------------------------------------
    def cache_key(self, c: Command) -> str:
        return ResultCache.key(__version__, self.ring, self.unroll_depth, self.default_filtration,
                               self.scene.declarations, c.canonical())

    def execute(self, c: Command) -> dict:
        key = self.cache_key(c)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        t0 = time.perf_counter()
        try:
            data = getattr(self, f"c_{c.verb}")(c)
        except Exception as e:  # engine failures keep their command context
            raise EngineError(c, e) from e
        result = {"command": c.canonical(), "line": c.line, "status": "ok", "data": data}
        self.cache.put(key, result)
        if self.timing:
            result = dict(result, seconds=round(time.perf_counter() - t0, 3))
        return result

    def c_realize(self, c):
        frag, m = self.vertex(c.args[0], c.args[1])
        F = frag.category.realize_object(m)
        return {"stalks": sheaf_data(F),
                "cohomology": [module_data(sheaf_cohomology(F, j)) for j in range(frag.base.dim + 1)]}

    def c_cohomology(self, c):
        K = self.scene.complexes[c.args[0]]
        L = self.scene.complexes[c.options["rel"]] if "rel" in c.options else None
        ring = c.options.get("ring", self.ring)
        return {"ring": ring, "degrees": [module_data(relative_cohomology(K, L, n, ring))
                                          for n in range(K.dim + 1)]}

    def c_pushforward(self, c):
        frag, m = self.vertex(c.args[0], c.args[1])
        g = self.scene.maps[c.args[2]]
        fname = c.options.get("filtration", self.default_filtration)
        filt = self.filtration(fname, frag.base) if fname else None
        d = DirectImage(frag, g, filt)
        K = d.k_complex(m)
        C = d.category
        top = int(c.options.get("degrees", d.terms.n + 1))
        coh = [C.realize_object(K.cohomology(j)) for j in range(top)]
        oracle = [derived_pushforward_oracle(g, relative_sheaf(frag.vertices[c.args[1]].pair, self.ring), j)
                  for j in range(top)]
        T = frag.sheaf_category()
        Q = type(T)(g.target, self.ring)
        return {
            "filtration": fname or "relative",
            "adapted": {v: adapted_check_pair(frag.vertices[v].pair, g, d.filt, self.ring) for v in frag.vertices},
            "terms": [sheaf_data(C.realize_object(t)) for t in K.terms],
            "differentials": [sheaf_morphism_data(C.realize(x)) for x in K.diffs],
            "d_squared_zero": K.d_squared_zero(),
            "cohomology": [sheaf_data(h) for h in coh],
            "oracle_agrees": all(Q.invariants(a) == Q.invariants(b) for a, b in zip(coh, oracle)),
        }

    def c_tensor(self, c):
        frag, _ = self.fragment(c.args[0])
        left = self.scene.pairs[c.args[1]]
        _, m = self.vertex(c.args[0], c.args[2])
        T = TensorFunctor(left, frag)
        F = T.category.realize_object(T.on_object(m))
        return {"left_cellular": is_cellular(left, self.ring), "degree": left.degree + frag.vertices[c.args[2]].pair.degree,
                "stalks": sheaf_data(F)}

    def c_twist(self, c):
        frag, m = self.vertex(c.args[0], c.args[1])
        w = int(c.args[2])
        loc = Localization(frag)
        lm = loc.twist(loc.localize(m), w)
        steps = int(c.options.get("stabilize", 1))
        st = loc.stabilize(lm, steps)
        return {"weight": lm.weight, "stabilized_weight": st.weight, "stage": loc.stage_of(st),
                "stalks": sheaf_data(loc.realize(lm)), "stabilized_stalks": sheaf_data(loc.realize(st)),
                "equal_after_stabilization": loc.equal(lm, st)}

    def c_kunneth(self, c):
        a, b, base = self.scene.products[c.args[0]]
        cx = self.scene.complexes
        rk = lambda K: [relative_cohomology(K, None, n, "Q").rank for n in range(K.dim + 1)]  # noqa: E731
        ra, rb, rp = rk(cx[a]), rk(cx[b]), rk(cx[c.args[0]])
        conv = [sum(ra[i] * rb[n - i] for i in range(len(ra)) if 0 <= n - i < len(rb))
                for n in range(len(ra) + len(rb) - 1)]
        data = {"factor_ranks": [ra, rb], "product_ranks": rp}
        if len(cx[base].vertices) == 1:
            data["expected"] = conv
            data["agrees"] = rp[:len(conv)] == conv[:len(rp)] and sum(rp) == sum(conv)
        return data

    def c_check(self, c):
        frag, rejected = self.fragment(c.args[0])
        out = {}
        for p in self.scene.fragments[c.args[0]].pairs:
            w = base_change_witness(self.scene.pairs[p], self.ring)
            out[p] = {"base_change": w is None, "witness": face_label(w) if w is not None else None}
        # cycles are computed on an unrolled cover; say how deep it went
        q = frag.build()[0] if frag.vertices else None
        depth = self.unroll_depth if q is not None and not q.acyclic else None
        return {"vertices": out, "rejected": rejected, "unroll_depth": depth}

    def c_refine(self, c):
        frag, m = self.vertex(c.args[0], c.args[1])
        g = self.scene.maps[c.args[2]]
        f1, f2 = self.filtration(c.args[3], frag.base), self.filtration(c.args[4], frag.base)
        R = Refinement(frag, g, [f1, f2])
        C = R.target.category
        ks = [R.images[k].k_complex(m) for k in (0, 1)]
        top = max(R.images[0].terms.n, R.images[1].terms.n) + 1
        return {"quasi_isomorphism": R.is_quasi_isomorphism(m),
                "cohomology": [[sheaf_data(C.realize_object(K.cohomology(j))) for j in range(top)] for K in ks]}


def run(scene: Scene, session: Session | None = None) -> Report:
    s = session or Session(scene)
    rep = Report(dict(scene.summary(), ring=s.ring))
    for c in scene.commands:
        rep.results.append(s.execute(c))
    return rep

