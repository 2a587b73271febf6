"""Cellular sheaves on the face poset of a simplicial complex."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .categories import AbelianCategory, ModuleCategory, cohomology_at, induced_on_cohomology
from .exact import FpModule, ModuleMorphism
from .simplicial import SimplicialComplex, SimplicialMap


class NotASheaf(ValueError):
    pass


def codim_one_pairs(s: SimplicialComplex) -> list:
    """``(sigma, tau, sign)`` with ``sigma`` the facet of ``tau`` omitting vertex k, sign ``(-1)^k``."""
    out = []
    for tau in s.sorted_simplices:
        if len(tau) < 2:
            continue
        for k in range(len(tau)):
            out.append((tau[:k] + tau[k + 1:], tau, (-1) ** k))
    return out


@dataclass(frozen=True, eq=False)
class CellularSheaf:
    """A functor on the face poset: stalk per face, map ``F(sigma) -> F(tau)`` per facet pair."""

    base: SimplicialComplex
    stalks: dict
    restrictions: dict  # (sigma, tau) codim one -> ModuleMorphism
    ring: str = "Z"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        for s in self.base.simplices:
            if s not in self.stalks:
                raise NotASheaf(f"face {s} has no stalk")
        for sigma, tau, _ in codim_one_pairs(self.base):
            r = self.restrictions.get((sigma, tau))
            if r is None:
                raise NotASheaf(f"missing restriction {sigma} <= {tau}")
            if r.source != self.stalks[sigma] or r.target != self.stalks[tau]:
                raise NotASheaf(f"restriction {sigma} <= {tau} has wrong endpoints")
        if self.check:
            for sigma, tau in self._diamonds():
                paths = [self.restrictions[(mid, tau)] @ self.restrictions[(sigma, mid)]
                         for mid in _middles(sigma, tau)]
                if any(not p.equals(paths[0]) for p in paths[1:]):
                    raise NotASheaf(f"restrictions do not commute between {sigma} and {tau}")

    def __eq__(self, other):
        return isinstance(other, CellularSheaf) and self.base == other.base and \
            self.stalks == other.stalks and all(
                self.restrictions[k].matrix == other.restrictions[k].matrix for k in self.restrictions)

    def __hash__(self):
        return hash((self.base, tuple(sorted(((k, v) for k, v in self.stalks.items()), key=repr))))

    def _diamonds(self):
        for tau in self.base.simplices:
            if len(tau) >= 3:
                for k in range(len(tau)):
                    for l in range(k + 1, len(tau)):
                        yield tuple(v for m, v in enumerate(tau) if m not in (k, l)), tau

    def stalk(self, sigma) -> FpModule:
        return self.stalks[tuple(sigma)]

    def restriction(self, sigma, tau) -> ModuleMorphism:
        """The map ``F(sigma) -> F(tau)`` for any ``sigma <= tau``."""
        sigma, tau = tuple(sigma), tuple(tau)
        key = (sigma, tau)
        cache = self.__dict__.setdefault("_rcache", {})
        if key in cache:
            return cache[key]
        if sigma == tau:
            out = ModuleMorphism.identity(self.stalks[sigma])
        elif key in self.restrictions:
            out = self.restrictions[key]
        else:
            if not set(sigma) < set(tau):
                raise ValueError(f"{sigma} is not a face of {tau}")
            extra = next(v for v in tau if v not in sigma)
            mid = self.base.simplex(sigma + (extra,))
            out = self.restriction(mid, tau) @ self.restrictions[(sigma, mid)]
        cache[key] = out
        return out


def _middles(sigma, tau):
    extra = [v for v in tau if v not in sigma]
    return [tuple(v for v in tau if v in sigma or v == e) for e in extra]


def constant_sheaf(s: SimplicialComplex, ring: str = "Z", module: FpModule | None = None) -> CellularSheaf:
    m = module if module is not None else FpModule.free(1, ring)
    stalks = {f: m for f in s.simplices}
    res = {(a, b): ModuleMorphism.identity(m) for a, b, _ in codim_one_pairs(s)}
    return CellularSheaf(s, stalks, res, ring, check=False)


@dataclass(frozen=True, eq=False)
class SheafMorphism:
    source: CellularSheaf
    target: CellularSheaf
    components: dict  # face -> ModuleMorphism

    def component(self, sigma) -> ModuleMorphism:
        return self.components[tuple(sigma)]

    def is_natural(self) -> bool:
        for sigma, tau, _ in codim_one_pairs(self.source.base):
            lhs = self.target.restrictions[(sigma, tau)] @ self.components[sigma]
            rhs = self.components[tau] @ self.source.restrictions[(sigma, tau)]
            if not lhs.equals(rhs):
                return False
        return True


class SheafCategory(AbelianCategory):
    """Cellular sheaves on a fixed base; everything is computed stalkwise."""

    def __init__(self, base: SimplicialComplex, ring: str = "Z"):
        self.base = base
        self.ring = ring
        self.modules = ModuleCategory(ring)

    def __repr__(self):
        return f"SheafCategory({self.base!r}, {self.ring})"

    def _faces(self):
        return self.base.sorted_simplices

    def _make(self, stalks, restriction_fn: Callable) -> CellularSheaf:
        res = {(a, b): restriction_fn(a, b) for a, b, _ in codim_one_pairs(self.base)}
        return CellularSheaf(self.base, stalks, res, self.ring, check=False)

    def zero_object(self):
        z = FpModule.zero(self.ring)
        return self._make({f: z for f in self._faces()}, lambda a, b: ModuleMorphism.identity(z))

    def identity(self, x):
        return SheafMorphism(x, x, {f: ModuleMorphism.identity(x.stalks[f]) for f in self._faces()})

    def zero_morphism(self, x, y):
        return SheafMorphism(x, y, {f: ModuleMorphism.zero(x.stalks[f], y.stalks[f]) for f in self._faces()})

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def compose(self, g, f):
        return SheafMorphism(f.source, g.target, {s: g.components[s] @ f.components[s] for s in self._faces()})

    def add(self, f, g):
        return SheafMorphism(f.source, f.target, {s: f.components[s] + g.components[s] for s in self._faces()})

    def scale(self, f, c):
        return SheafMorphism(f.source, f.target, {s: f.components[s].scale(c) for s in self._faces()})

    def equal(self, f, g):
        return all(f.components[s].equals(g.components[s]) for s in self._faces())

    def is_zero_object(self, x):
        return all(x.stalks[s].is_zero() for s in self._faces())

    def direct_sum(self, objs):
        objs = list(objs)
        M = self.modules
        per_face = {s: M.direct_sum([o.stalks[s] for o in objs]) for s in self._faces()}
        total = self._make({s: per_face[s][0] for s in self._faces()},
                           lambda a, b: M.block_morphism([o.stalks[a] for o in objs], [o.stalks[b] for o in objs],
                                                         [[o.restrictions[(a, b)] if i == j else None
                                                           for j, o in enumerate(objs)] for i, _ in enumerate(objs)]))
        incs = [SheafMorphism(o, total, {s: per_face[s][1][k] for s in self._faces()}) for k, o in enumerate(objs)]
        projs = [SheafMorphism(total, o, {s: per_face[s][2][k] for s in self._faces()}) for k, o in enumerate(objs)]
        return total, incs, projs

    def block_morphism(self, sources, targets, entries):
        src = self.direct_sum(sources)[0]
        tgt = self.direct_sum(targets)[0]
        comps = {}
        for s in self._faces():
            comps[s] = self.modules.block_morphism(
                [x.stalks[s] for x in sources], [y.stalks[s] for y in targets],
                [[None if e is None else e.components[s] for e in row] for row in entries])
            comps[s] = ModuleMorphism(src.stalks[s], tgt.stalks[s], comps[s].matrix, check=False)
        return SheafMorphism(src, tgt, comps)

    def kernel(self, f):
        M = self.modules
        data = {s: M.kernel(f.components[s]) for s in self._faces()}
        K = self._make({s: data[s][0] for s in self._faces()},
                       lambda a, b: M.lift(data[b][1], f.source.restrictions[(a, b)] @ data[a][1]))
        return K, SheafMorphism(K, f.source, {s: data[s][1] for s in self._faces()})

    def cokernel(self, f):
        M = self.modules
        data = {s: M.cokernel(f.components[s]) for s in self._faces()}
        C = self._make({s: data[s][0] for s in self._faces()},
                       lambda a, b: M.colift(data[a][1], data[b][1] @ f.target.restrictions[(a, b)]))
        return C, SheafMorphism(f.target, C, {s: data[s][1] for s in self._faces()})

    def lift(self, mono, f):
        return SheafMorphism(f.source, mono.source,
                             {s: self.modules.lift(mono.components[s], f.components[s]) for s in self._faces()})

    def colift(self, epi, f):
        return SheafMorphism(epi.target, f.target,
                             {s: self.modules.colift(epi.components[s], f.components[s]) for s in self._faces()})

    def invariants(self, x):
        stalks = tuple((s, x.stalks[s].invariants()) for s in self._faces())
        res = tuple((a, b, self.modules.morphism_invariants(x.restrictions[(a, b)]))
                    for a, b, _ in codim_one_pairs(self.base))
        return stalks, res

    def morphism_invariants(self, f):
        return tuple((s, self.modules.morphism_invariants(f.components[s])) for s in self._faces())

    def describe(self, x):
        return "; ".join(f"{'.'.join(map(str, s))}: {x.stalks[s].describe()}" for s in self._faces())


# ----------------------------------------------------------------------
# cohomology with coefficients in a cellular sheaf
# ----------------------------------------------------------------------

def sheaf_cochain_differential(F: CellularSheaf, n: int, sub: SimplicialComplex | None = None) -> ModuleMorphism:
    """``d: C^n -> C^{n+1}``, faces of ``sub`` excluded (cochains of the pair)."""
    M = ModuleCategory(F.ring)
    excl = sub.simplices if sub is not None else frozenset()
    src = [s for s in F.base.faces(n) if s not in excl]
    tgt = [t for t in F.base.faces(n + 1) if t not in excl]
    sidx = {s: k for k, s in enumerate(src)}
    entries = [[None] * len(src) for _ in tgt]
    for i, t in enumerate(tgt):
        for k in range(len(t)):
            j = sidx.get(t[:k] + t[k + 1:])
            if j is not None:
                entries[i][j] = F.restrictions[(src[j], t)].scale((-1) ** k)
    return M.block_morphism([F.stalks[s] for s in src], [F.stalks[t] for t in tgt], entries)


def sheaf_cohomology(F: CellularSheaf, n: int, sub: SimplicialComplex | None = None) -> FpModule:
    """``H^n(S, sub; F)`` from the cellular cochain complex."""
    if n < 0:
        return FpModule.zero(F.ring)
    M = ModuleCategory(F.ring)
    return cohomology_at(M, sheaf_cochain_differential(F, n - 1, sub), sheaf_cochain_differential(F, n, sub))[0]


def sheaf_cohomology_all(F: CellularSheaf, sub: SimplicialComplex | None = None) -> list:
    return [sheaf_cohomology(F, n, sub) for n in range(F.base.dim + 1)]


def restrict_sheaf(F: CellularSheaf, sub: SimplicialComplex) -> CellularSheaf:
    stalks = {s: F.stalks[s] for s in sub.simplices}
    res = {(a, b): F.restrictions[(a, b)] for a, b, _ in codim_one_pairs(sub)}
    return CellularSheaf(sub, stalks, res, F.ring, check=False)


def pullback_sheaf(g: SimplicialMap, F: CellularSheaf) -> CellularSheaf:
    """``g^* F``: stalk at ``t`` is ``F(g(t))``."""
    T = g.source
    stalks = {t: F.stalks[g(t)] for t in T.simplices}
    res = {(a, b): F.restriction(g(a), g(b)) for a, b, _ in codim_one_pairs(T)}
    return CellularSheaf(T, stalks, res, F.ring, check=False)


def pullback_sheaf_morphism(g: SimplicialMap, phi: SheafMorphism) -> SheafMorphism:
    s, t = pullback_sheaf(g, phi.source), pullback_sheaf(g, phi.target)
    return SheafMorphism(s, t, {x: phi.components[g(x)] for x in g.source.simplices})


def change_sheaf_ring(F: CellularSheaf, ring: str) -> CellularSheaf:
    from .exact import tensor_coefficients, tensor_morphism_coefficients, simplify
    if F.ring == ring:
        return F
    new = {s: tensor_coefficients(m, ring) for s, m in F.stalks.items()}

    def conv(f: ModuleMorphism, a, b):
        raw = tensor_morphism_coefficients(f, ring)
        _, _, back_a = simplify(raw.source)
        _, to_b, _ = simplify(raw.target)
        return ModuleMorphism(new[a], new[b], (to_b.matrix @ raw.matrix @ back_a.matrix), check=False)

    res = {(a, b): conv(f, a, b) for (a, b), f in F.restrictions.items()}
    return CellularSheaf(F.base, new, res, ring, check=False)


def change_morphism_ring(phi: SheafMorphism, ring: str, source: CellularSheaf, target: CellularSheaf) -> SheafMorphism:
    from .exact import tensor_morphism_coefficients, simplify
    comps = {}
    for s, f in phi.components.items():
        raw = tensor_morphism_coefficients(f, ring)
        _, _, back = simplify(raw.source)
        _, to, _ = simplify(raw.target)
        comps[s] = ModuleMorphism(source.stalks[s], target.stalks[s], to.matrix @ raw.matrix @ back.matrix, check=False)
    return SheafMorphism(source, target, comps)


# ----------------------------------------------------------------------
# filtrations
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Filtration:
    """Closed subcomplexes ``S_0 <= S_1 <= ... <= S_d = S`` (``S_{-1}`` empty)."""

    steps: tuple

    def __post_init__(self):
        for a, b in zip(self.steps, self.steps[1:]):
            if not a.is_subcomplex_of(b):
                raise ValueError("filtration steps must be nested")

    @property
    def length(self) -> int:
        return len(self.steps)

    def step(self, a: int) -> SimplicialComplex:
        if a < 0:
            return SimplicialComplex.empty()
        if a >= len(self.steps):
            return self.steps[-1]
        return self.steps[a]

    def is_refined_by(self, other: "Filtration") -> bool:
        return all(other.step(a).is_subcomplex_of(self.step(a)) for a in range(max(self.length, other.length)))


def skeletal_filtration(s: SimplicialComplex) -> Filtration:
    return Filtration(tuple(s.skeleton(a) for a in range(max(s.dim, 0) + 1)))


def relative_sheaf_cohomology(F: CellularSheaf, big: SimplicialComplex, small: SimplicialComplex, n: int) -> FpModule:
    return sheaf_cohomology(restrict_sheaf(F, big), n, small)


def sheaf_adapted(F: CellularSheaf, filt: Filtration) -> bool:
    """``H^n(S_a, S_{a-1}; F) = 0`` for ``n != a``."""
    for a in range(filt.length):
        big, small = filt.step(a), filt.step(a - 1)
        for n in range(big.dim + 1):
            if n != a and not relative_sheaf_cohomology(F, big, small, n).is_zero():
                return False
    return True


# ----------------------------------------------------------------------
# derived pushforward along a simplicial map (independent oracle)
# ----------------------------------------------------------------------

def _upset(g: SimplicialMap, tau) -> list:
    return [r for r in g.source.sorted_simplices if set(tau) <= set(g(r))]


def _chains(faces: list) -> dict:
    by_len: dict[int, list] = {0: [(f,) for f in faces]}
    n = 0
    while by_len[n]:
        nxt = []
        for c in by_len[n]:
            for f in faces:
                if set(c[-1]) < set(f):
                    nxt.append(c + (f,))
        by_len[n + 1] = nxt
        n += 1
    return by_len


class _RoosComplex:
    """Cochains computing the derived limit of ``F`` over an up-set of faces."""

    def __init__(self, F: CellularSheaf, faces: list):
        self.F = F
        self.chains = _chains(faces)
        self.M = ModuleCategory(F.ring)
        self._data: dict = {}

    def terms(self, n):
        return [self.F.stalks[c[-1]] for c in self.chains.get(n, [])]

    def differential(self, n) -> ModuleMorphism:
        src, tgt = self.chains.get(n, []), self.chains.get(n + 1, [])
        sidx = {c: k for k, c in enumerate(src)}
        entries = [[None] * len(src) for _ in tgt]
        for i, c in enumerate(tgt):
            for k in range(len(c)):
                face = c[:k] + c[k + 1:]
                j = sidx.get(face)
                if j is None:
                    continue
                m = self.F.restriction(face[-1], c[-1]) if k == len(c) - 1 else \
                    ModuleMorphism.identity(self.F.stalks[c[-1]])
                m = m.scale((-1) ** k)
                entries[i][j] = m if entries[i][j] is None else entries[i][j] + m
        return self.M.block_morphism(self.terms(n), self.terms(n + 1), entries)

    def cohomology(self, n):
        if n not in self._data:
            d_in = self.differential(n - 1) if n > 0 else self.M.zero_morphism(
                self.M.zero_object(), self.M.direct_sum_object(self.terms(0)))
            self._data[n] = cohomology_at(self.M, d_in, self.differential(n))
        return self._data[n]

    def restrict_to(self, other: "_RoosComplex", n) -> ModuleMorphism:
        """Projection of cochains onto the chains of a smaller up-set."""
        src, tgt = self.chains.get(n, []), other.chains.get(n, [])
        sidx = {c: k for k, c in enumerate(src)}
        entries = [[None] * len(src) for _ in tgt]
        for i, c in enumerate(tgt):
            entries[i][sidx[c]] = ModuleMorphism.identity(self.F.stalks[c[-1]])
        return self.M.block_morphism(self.terms(n), other.terms(n), entries)


def derived_pushforward_oracle(g: SimplicialMap, F: CellularSheaf, j: int) -> CellularSheaf:
    """``R^j g_* F`` on the target of ``g`` via derived limits over preimages of open stars."""
    T = g.target
    roos = {t: _RoosComplex(F, _upset(g, t)) for t in T.simplices}
    stalks = {t: roos[t].cohomology(j)[0] for t in T.simplices}
    M = ModuleCategory(F.ring)
    res = {}
    for a, b, _ in codim_one_pairs(T):
        phi = roos[a].restrict_to(roos[b], j)
        res[(a, b)] = induced_on_cohomology(M, roos[a].cohomology(j), roos[b].cohomology(j), phi)
    return CellularSheaf(T, stalks, res, F.ring, check=False)


def sheaves_match(F: CellularSheaf, G: CellularSheaf) -> bool:
    """Isomorphism test by stalk, restriction and cohomology invariants."""
    if F.base != G.base:
        return False
    C = SheafCategory(F.base, F.ring)
    if C.invariants(F) != C.invariants(G):
        return False
    return [h.invariants() for h in sheaf_cohomology_all(F)] == [h.invariants() for h in sheaf_cohomology_all(G)]
