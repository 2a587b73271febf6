"""Scene files: a line-oriented description of complexes, pairs, fragments and commands.

Grammar (one declaration per line, ``#`` starts a comment)::

    ring Z|Q
    complex NAME facets a,b b,c ...
    subcomplex NAME of PARENT facets a b,c ...
    map NAME SRC TGT const v | identity | inclusion | assign a=x b=y ...
    product NAME A B over BASE [via F G]
    pair NAME MAP [rel SUB] degree I [removed SUB]
    fragment NAME BASE PAIR ...
    edge FRAG LABEL map SRC TGT via MAP
    edge FRAG LABEL connecting LOWER UPPER
    filtration NAME skeletal BASE | relative MAP | steps SUB ...
    command VERB ARG ...
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path

from .exact import RingMismatch as _EngineRingMismatch
from .pairs import SimplicialPairOverBase
from .simplicial import SimplicialComplex, SimplicialMap, fibre_product

SHIPPED = Path(__file__).parent / "scenes"

VERBS = {
    "realize": 2, "cohomology": 1, "pushforward": 3, "tensor": 3, "twist": 3,
    "kunneth": 1, "check": 1, "refine": 5,
}


class SceneError(ValueError):
    """Invalid scene; ``diagnostics`` lists ``(line, message)`` pairs."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(f"line {ln}: {msg}" for ln, msg in self.diagnostics))


class ParseError(SceneError):
    pass


class UnresolvedReference(SceneError):
    pass


class RingMismatch(SceneError, _EngineRingMismatch):
    pass


@dataclass
class Command:
    verb: str
    args: tuple
    options: dict
    line: int

    def canonical(self) -> str:
        opts = " ".join(f"{k}={v}" for k, v in sorted(self.options.items()))
        return " ".join((self.verb,) + self.args) + (f" [{opts}]" if opts else "")


@dataclass
class FragmentDecl:
    name: str
    base: str
    pairs: list
    edges: list = field(default_factory=list)  # (label, kind, a, b, map|None, line)
    line: int = 0


@dataclass
class Scene:
    ring: str = "Z"
    ring_declared: bool = False
    complexes: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    products: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    fragments: dict = field(default_factory=dict)
    filtrations: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)
    declarations: list = field(default_factory=list)  # normalized lines, for hashing
    path: str = ""

    def summary(self) -> dict:
        return {
            "ring": self.ring,
            "complexes": len(self.complexes) - len(self.products),
            "products": len(self.products),
            "maps": len(self.maps),
            "pairs": len(self.pairs),
            "fragments": len(self.fragments),
            "filtrations": len(self.filtrations),
            "commands": len(self.commands),
        }


def _facets(tokens):
    return [tuple(t.split(",")) for t in tokens]


class _Parser:
    def __init__(self):
        self.scene = Scene()
        self.errors: list = []  # (kind, line, message)

    def err(self, kind, line, msg):
        self.errors.append((kind, line, msg))

    def need(self, table, name, line, what):
        if name not in table:
            self.err(UnresolvedReference, line, f"unknown {what} {name!r}")
            return None
        return table[name]

    def fresh(self, table, name, line):
        if name in table:
            self.err(ParseError, line, f"name {name!r} already declared")
            return False
        return True

    def complex_of(self, name, line):
        return self.need(self.scene.complexes, name, line, "complex")

    # declarations ---------------------------------------------------------
    def d_ring(self, t, ln):
        if len(t) != 1 or t[0] not in ("Z", "Q"):
            return self.err(ParseError, ln, "ring takes Z or Q")
        if self.scene.ring_declared and self.scene.ring != t[0]:
            return self.err(RingMismatch, ln, f"ring {t[0]} conflicts with earlier ring {self.scene.ring}")
        self.scene.ring, self.scene.ring_declared = t[0], True

    def d_complex(self, t, ln):
        if len(t) < 3 or t[1] != "facets":
            return self.err(ParseError, ln, "expected: complex NAME facets ...")
        if self.fresh(self.scene.complexes, t[0], ln):
            self.scene.complexes[t[0]] = SimplicialComplex.from_facets(_facets(t[2:]), name=t[0])

    def d_subcomplex(self, t, ln):
        if len(t) < 4 or t[1] != "of" or t[3] != "facets":
            return self.err(ParseError, ln, "expected: subcomplex NAME of PARENT facets ...")
        parent = self.complex_of(t[2], ln)
        if parent is None or not self.fresh(self.scene.complexes, t[0], ln):
            return
        try:
            self.scene.complexes[t[0]] = parent.subcomplex(_facets(t[4:]), name=t[0])
        except ValueError as e:
            self.err(ParseError, ln, str(e))

    def d_map(self, t, ln):
        if len(t) < 4:
            return self.err(ParseError, ln, "expected: map NAME SRC TGT KIND ...")
        name, src, tgt, kind, rest = t[0], t[1], t[2], t[3], t[4:]
        S, T = self.complex_of(src, ln), self.complex_of(tgt, ln)
        if S is None or T is None or not self.fresh(self.scene.maps, name, ln):
            return
        try:
            if kind == "const" and len(rest) == 1:
                if rest[0] not in T.vertices:
                    return self.err(UnresolvedReference, ln, f"unknown vertex {rest[0]!r} of {tgt}")
                m = SimplicialMap.build(S, T, {v: rest[0] for v in S.vertices})
            elif kind == "identity" and not rest:
                m = SimplicialMap.build(S, T, {v: v for v in S.vertices})
            elif kind == "inclusion" and not rest:
                m = SimplicialMap.inclusion(S, T)
            elif kind == "assign":
                pairs = dict(a.split("=", 1) for a in rest)
                missing = [v for v in S.vertices if v not in pairs]
                if missing:
                    return self.err(ParseError, ln, f"vertices without image: {missing}")
                m = SimplicialMap.build(S, T, pairs)
            else:
                return self.err(ParseError, ln, f"bad map kind {kind!r}")
        except ValueError as e:
            return self.err(ParseError, ln, str(e))
        self.scene.maps[name] = m

    def d_product(self, t, ln):
        if len(t) not in (5, 8) or t[3] != "over" or (len(t) == 8 and t[5] != "via"):
            return self.err(ParseError, ln, "expected: product NAME A B over BASE [via F G]")
        name, a, b, base = t[0], t[1], t[2], t[4]
        A, B, S = self.complex_of(a, ln), self.complex_of(b, ln), self.complex_of(base, ln)
        if None in (A, B, S) or not self.fresh(self.scene.complexes, name, ln):
            return
        if len(t) == 8:
            f, g = self.need(self.scene.maps, t[6], ln, "map"), self.need(self.scene.maps, t[7], ln, "map")
            if f is None or g is None:
                return
        else:
            if len(S.vertices) != 1:
                return self.err(ParseError, ln, "maps are required unless the base is a point")
            f, g = SimplicialMap.constant(A, S), SimplicialMap.constant(B, S)
        if f.source != A or g.source != B or f.target != S or g.target != S:
            return self.err(ParseError, ln, "product maps do not match the factors")
        P, p1, p2 = fibre_product(f, g, name=name)
        self.scene.complexes[name] = P
        self.scene.maps[f"{name}.pr1"] = p1
        self.scene.maps[f"{name}.pr2"] = p2
        self.scene.maps[f"{name}.base"] = p1.then(f)
        self.scene.products[name] = (a, b, base)

    def d_pair(self, t, ln):
        if len(t) < 4:
            return self.err(ParseError, ln, "expected: pair NAME MAP [rel SUB] degree I [removed SUB]")
        name, mname = t[0], t[1]
        opts, k = {}, 2
        while k < len(t):
            if t[k] in ("rel", "degree", "removed") and k + 1 < len(t):
                opts[t[k]] = t[k + 1]
                k += 2
            else:
                return self.err(ParseError, ln, f"unexpected token {t[k]!r}")
        if "degree" not in opts or not opts["degree"].isdigit():
            return self.err(ParseError, ln, "pair needs a natural-number degree")
        f = self.need(self.scene.maps, mname, ln, "map")
        subs = {key: self.complex_of(opts[key], ln) for key in ("rel", "removed") if key in opts}
        if f is None or None in subs.values() or not self.fresh(self.scene.pairs, name, ln):
            return
        X = f.source
        try:
            sub = X.subcomplex(subs["rel"].simplices) if "rel" in subs else X.subcomplex([])
            rem = X.subcomplex(subs["removed"].simplices) if "removed" in subs else X.subcomplex([])
        except ValueError as e:
            return self.err(ParseError, ln, str(e))
        self.scene.pairs[name] = SimplicialPairOverBase(f, sub, int(opts["degree"]), rem, name=name)

    def d_fragment(self, t, ln):
        if len(t) < 2:
            return self.err(ParseError, ln, "expected: fragment NAME BASE PAIR ...")
        name, base, pairs = t[0], t[1], t[2:]
        S = self.complex_of(base, ln)
        ok = all(self.need(self.scene.pairs, p, ln, "pair") is not None for p in pairs)
        if S is None or not ok or not self.fresh(self.scene.fragments, name, ln):
            return
        for p in pairs:
            if self.scene.pairs[p].base != S:
                self.err(ParseError, ln, f"pair {p!r} does not live over {base}")
        self.scene.fragments[name] = FragmentDecl(name, base, list(pairs), [], ln)

    def d_edge(self, t, ln):
        if len(t) < 5:
            return self.err(ParseError, ln, "expected: edge FRAG LABEL map|connecting ...")
        frag = self.need(self.scene.fragments, t[0], ln, "fragment")
        if frag is None:
            return
        label, kind = t[1], t[2]
        if kind == "map" and len(t) == 7 and t[5] == "via":
            self.need(self.scene.maps, t[6], ln, "map")
            a, b = t[3], t[4]
        elif kind == "connecting" and len(t) == 5:
            a, b = t[3], t[4]
        else:
            return self.err(ParseError, ln, "expected: map SRC TGT via MAP, or connecting LOWER UPPER")
        for p in (a, b):
            if p not in frag.pairs:
                self.err(UnresolvedReference, ln, f"pair {p!r} is not in fragment {frag.name!r}")
        frag.edges.append((label, kind, a, b, t[6] if kind == "map" else None, ln))

    def d_filtration(self, t, ln):
        if len(t) < 3:
            return self.err(ParseError, ln, "expected: filtration NAME skeletal|relative|steps ...")
        name, kind, rest = t[0], t[1], t[2:]
        if not self.fresh(self.scene.filtrations, name, ln):
            return
        if kind == "skeletal" and len(rest) == 1:
            if self.complex_of(rest[0], ln) is not None:
                self.scene.filtrations[name] = ("skeletal", rest[0])
        elif kind == "relative" and len(rest) == 1:
            if self.need(self.scene.maps, rest[0], ln, "map") is not None:
                self.scene.filtrations[name] = ("relative", rest[0])
        elif kind == "steps":
            if all(self.complex_of(r, ln) is not None for r in rest):
                self.scene.filtrations[name] = ("steps",) + tuple(rest)
        else:
            self.err(ParseError, ln, f"bad filtration kind {kind!r}")

    def d_command(self, t, ln):
        if not t or t[0] not in VERBS:
            return self.err(ParseError, ln, f"unknown command {t[0] if t else ''!r}")
        verb, args, opts = t[0], [], {}
        for tok in t[1:]:
            if "=" in tok:
                k, v = tok.split("=", 1)
                opts[k] = v
            else:
                args.append(tok)
        if len(args) < VERBS[verb]:
            return self.err(ParseError, ln, f"{verb} needs {VERBS[verb]} arguments")
        cmd = Command(verb, tuple(args), opts, ln)
        self._check_refs(cmd)
        self.scene.commands.append(cmd)

    def _check_refs(self, c: Command):
        s, ln, a = self.scene, c.line, c.args
        kinds = {
            "realize": ("fragment", "pair"),
            "cohomology": ("complex",),
            "pushforward": ("fragment", "pair", "map"),
            "tensor": ("fragment", "pair", "pair"),
            "twist": ("fragment", "pair", None),
            "kunneth": ("product",),
            "check": ("fragment",),
            "refine": ("fragment", "pair", "map", "filtration", "filtration"),
        }[c.verb]
        tables = {"fragment": s.fragments, "pair": s.pairs, "map": s.maps, "complex": s.complexes,
                  "product": s.products, "filtration": s.filtrations}
        for kind, name in zip(kinds, a):
            if kind is not None:
                self.need(tables[kind], name, ln, kind)
        if c.verb == "twist":
            try:
                int(a[2])
            except ValueError:
                self.err(ParseError, ln, "twist weight must be an integer")
        for key in ("filtration",):
            if key in c.options:
                self.need(s.filtrations, c.options[key], ln, "filtration")
        if "rel" in c.options:
            self.need(s.complexes, c.options["rel"], ln, "complex")
        if "ring" in c.options and c.options["ring"] != s.ring:
            self.err(RingMismatch, ln, f"command ring {c.options['ring']} differs from scene ring {s.ring}")


def parse_text(text: str, path: str = "<scene>") -> Scene:
    p = _Parser()
    p.scene.path = path
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            toks = shlex.split(line)
        except ValueError as e:
            p.err(ParseError, ln, str(e))
            continue
        head, rest = toks[0], toks[1:]
        fn = getattr(p, f"d_{head}", None)
        if fn is None:
            p.err(ParseError, ln, f"unknown declaration {head!r}")
            continue
        fn(rest, ln)
        p.scene.declarations.append(" ".join(toks))
    if p.errors:
        order = (ParseError, RingMismatch, UnresolvedReference)
        kind = next(k for k in order if any(e[0] is k for e in p.errors))
        raise kind([(ln, msg) for _, ln, msg in sorted(p.errors, key=lambda e: e[1])])
    return p.scene


def parse_scene(path) -> Scene:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError([(0, f"cannot read {path}: {e}")]) from e
    return parse_text(text, str(path))


def shipped_scenes() -> dict:
    """Name -> path of the scenes bundled with the package."""
    return {p.stem: p for p in sorted(SHIPPED.glob("*.scene"))}
