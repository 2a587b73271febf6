"""Exact linear algebra over Z and Q.

Matrices are immutable, dense and carry a ring tag (``"Z"`` or ``"Q"``).
Integers are Python ints; rationals are :class:`fractions.Fraction`.
Finitely presented modules are cokernels of relation matrices whose rows are
the relations, written in generator coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

RINGS = ("Z", "Q")


class NoSolution:
    """Marker returned by :func:`solve_lift` for inconsistent systems."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoSolution"

    def __bool__(self):
        return False


NO_SOLUTION = NoSolution()


class RingMismatch(ValueError):
    pass


def coerce(x, ring: str):
    if ring == "Z":
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x.numerator)
        return int(x)
    if ring == "Q":
        return Fraction(x)
    raise RingMismatch(f"unknown ring {ring!r}")


def _check_ring(*rings):
    if len(set(rings)) > 1:
        raise RingMismatch(f"mixed rings {rings}")


@dataclass(frozen=True)
class ExactMatrix:
    nrows: int
    ncols: int
    data: tuple
    ring: str = "Z"

    def __post_init__(self):
        if self.ring not in RINGS:
            raise RingMismatch(self.ring)
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ValueError("ragged or mis-sized entry grid")

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ring: str = "Z", ncols: int | None = None):
        rows = [tuple(coerce(x, ring) for x in r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, tuple(rows), ring)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, ring: str = "Z"):
        z = coerce(0, ring)
        return cls(nrows, ncols, tuple((z,) * ncols for _ in range(nrows)), ring)

    @classmethod
    def identity(cls, n: int, ring: str = "Z"):
        one, z = coerce(1, ring), coerce(0, ring)
        return cls(n, n, tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), ring)

    @classmethod
    def _raw(cls, rows: list, nrows: int, ncols: int, ring: str):
        return cls(nrows, ncols, tuple(tuple(r) for r in rows), ring)

    # access -------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def rows(self) -> list[list]:
        return [list(r) for r in self.data]

    def column(self, j: int) -> list:
        return [r[j] for r in self.data]

    def tolist(self):
        return [list(r) for r in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def __repr__(self):
        return f"ExactMatrix({self.ring}, {self.tolist()}, shape={self.shape})"

    # arithmetic -------------------------------------------------------
    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        _check_ring(self.ring, other.ring)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.data)) if other.nrows else [()] * other.ncols
        z = coerce(0, self.ring)
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * c[k] for k, a in nz), z) for c in cols))
        return ExactMatrix(self.nrows, other.ncols, tuple(out), self.ring)

    def __add__(self, other):
        _check_ring(self.ring, other.ring)
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return ExactMatrix(self.nrows, self.ncols,
                           tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
                           self.ring)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = coerce(c, self.ring)
        return ExactMatrix(self.nrows, self.ncols, tuple(tuple(c * a for a in r) for r in self.data), self.ring)

    @property
    def T(self) -> "ExactMatrix":
        if self.nrows == 0:
            return ExactMatrix.zeros(self.ncols, 0, self.ring)
        return ExactMatrix(self.ncols, self.nrows, tuple(zip(*self.data)), self.ring)

    def to_ring(self, ring: str) -> "ExactMatrix":
        if ring == self.ring:
            return self
        return ExactMatrix(self.nrows, self.ncols,
                           tuple(tuple(coerce(x, ring) for x in r) for r in self.data), ring)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None):
        rows = range(self.nrows) if rows is None else rows
        cols = range(self.ncols) if cols is None else cols
        return ExactMatrix(len(rows), len(cols),
                           tuple(tuple(self.data[i][j] for j in cols) for i in rows), self.ring)

    def rank(self) -> int:
        return len(smith_normal_form(self)[0].diagonal_nonzero())

    def diagonal_nonzero(self) -> list:
        return [self.data[i][i] for i in range(min(self.shape)) if self.data[i][i] != 0]


def hstack(mats: Sequence[ExactMatrix], nrows: int | None = None, ring: str | None = None) -> ExactMatrix:
    if not mats:
        return ExactMatrix.zeros(nrows or 0, 0, ring or "Z")
    _check_ring(*(m.ring for m in mats))
    n = mats[0].nrows
    if any(m.nrows != n for m in mats):
        raise ValueError("hstack row mismatch")
    rows = tuple(tuple(x for m in mats for x in m.data[i]) for i in range(n))
    return ExactMatrix(n, sum(m.ncols for m in mats), rows, mats[0].ring)


def vstack(mats: Sequence[ExactMatrix], ncols: int | None = None, ring: str | None = None) -> ExactMatrix:
    if not mats:
        return ExactMatrix.zeros(0, ncols or 0, ring or "Z")
    _check_ring(*(m.ring for m in mats))
    n = mats[0].ncols
    if any(m.ncols != n for m in mats):
        raise ValueError("vstack column mismatch")
    return ExactMatrix(sum(m.nrows for m in mats), n, tuple(r for m in mats for r in m.data), mats[0].ring)


def block_matrix(blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    return vstack([hstack(list(row)) for row in blocks])


def block_diag(mats: Sequence[ExactMatrix], ring: str = "Z") -> ExactMatrix:
    if not mats:
        return ExactMatrix.zeros(0, 0, ring)
    ring = mats[0].ring
    _check_ring(*(m.ring for m in mats))
    z = coerce(0, ring)
    ncols = sum(m.ncols for m in mats)
    rows, off = [], 0
    for m in mats:
        pre, post = (z,) * off, (z,) * (ncols - off - m.ncols)
        rows.extend(pre + r + post for r in m.data)
        off += m.ncols
    return ExactMatrix(len(rows), ncols, tuple(rows), ring)


# ----------------------------------------------------------------------
# Smith normal form
# ----------------------------------------------------------------------

def _snf_lists(A: list[list], m: int, n: int, ring: str):
    """In-place SNF on list rows; returns (S, U, V) with S = U A V."""
    zero, one = coerce(0, ring), coerce(1, ring)
    S = [list(r) for r in A]
    U = [[one if i == j else zero for j in range(m)] for i in range(m)]
    V = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q row_src
        Sd, Ss = S[dst], S[src]
        for k in range(n):
            if Ss[k]:
                Sd[k] -= q * Ss[k]
        Ud, Us = U[dst], U[src]
        for k in range(m):
            if Us[k]:
                Ud[k] -= q * Us[k]

    def add_col(dst, src, q):  # col_dst -= q col_src
        for row in S:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]

    def quot(a, b):
        return a // b if ring == "Z" else a / b

    t = 0
    while t < min(m, n):
        while True:
            best = None
            for i in range(t, m):
                Si = S[i]
                for j in range(t, n):
                    x = Si[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                return S, U, V
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, quot(S[i][t], p))
                    if S[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, quot(S[t][j], p))
                    if S[t][j]:
                        clean = False
            if not clean:
                continue
            if ring == "Z" and abs(p) != 1:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p), None)
                if bad is not None:
                    add_row(t, bad[0], -1)
                    continue
            break
        p = S[t][t]
        if ring == "Z":
            if p < 0:
                S[t] = [-x for x in S[t]]
                U[t] = [-x for x in U[t]]
        elif p != 1:
            inv = 1 / p
            S[t] = [x * inv for x in S[t]]
            U[t] = [x * inv for x in U[t]]
        t += 1
    return S, U, V


@lru_cache(maxsize=4096)
def smith_normal_form(m: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Return ``(s, u, v)`` with ``s == u @ m @ v``.

    ``u`` and ``v`` are unimodular and ``s`` is diagonal with each diagonal
    entry dividing the next.  Over Q the nonzero diagonal entries are 1.
    """
    S, U, V = _snf_lists(m.rows(), m.nrows, m.ncols, m.ring)
    return (ExactMatrix._raw(S, m.nrows, m.ncols, m.ring),
            ExactMatrix._raw(U, m.nrows, m.nrows, m.ring),
            ExactMatrix._raw(V, m.ncols, m.ncols, m.ring))


def invariant_factors(m: ExactMatrix) -> list:
    return smith_normal_form(m)[0].diagonal_nonzero()


def solve_right(a: ExactMatrix, b: ExactMatrix):
    """Any ``x`` with ``a @ x == b`` over the ring, else ``NO_SOLUTION``."""
    _check_ring(a.ring, b.ring)
    if a.nrows != b.nrows:
        raise ValueError(f"solve shape mismatch {a.shape} vs {b.shape}")
    s, u, v = smith_normal_form(a)
    c = u @ b
    diag = s.diagonal_nonzero()
    r = len(diag)
    zero = coerce(0, a.ring)
    y = [[zero] * b.ncols for _ in range(a.ncols)]
    for i in range(a.nrows):
        ci = c.data[i]
        if i < r:
            d = diag[i]
            for k, x in enumerate(ci):
                if a.ring == "Z":
                    if x % d:
                        return NO_SOLUTION
                    y[i][k] = x // d
                else:
                    y[i][k] = x / d
        elif any(ci):
            return NO_SOLUTION
    return v @ ExactMatrix._raw(y, a.ncols, b.ncols, a.ring)


def solve_lift(a: ExactMatrix, b: ExactMatrix, side: str = "right"):
    """Solve ``a @ x == b`` (``side='right'``) or ``x @ a == b`` (``'left'``)."""
    if side == "right":
        return solve_right(a, b)
    if side == "left":
        x = solve_right(a.T, b.T)
        return x if x is NO_SOLUTION else x.T
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def nullspace(a: ExactMatrix) -> ExactMatrix:
    """Columns form a basis of ``{x : a @ x == 0}`` (saturated lattice over Z)."""
    s, _, v = smith_normal_form(a)
    r = len(s.diagonal_nonzero())
    return v.submatrix(cols=list(range(r, a.ncols)))


def column_basis(p: ExactMatrix) -> ExactMatrix:
    """A basis (as columns) of the lattice spanned by the columns of ``p``."""
    s, _, v = smith_normal_form(p)
    r = len(s.diagonal_nonzero())
    return (p @ v).submatrix(cols=list(range(r)))


def inverse(a: ExactMatrix) -> ExactMatrix:
    x = solve_right(a, ExactMatrix.identity(a.nrows, a.ring))
    if x is NO_SOLUTION or a.nrows != a.ncols:
        raise ValueError("matrix is not invertible over its ring")
    return x


def determinant(a: ExactMatrix):
    if a.nrows != a.ncols:
        raise ValueError("determinant of non-square matrix")
    n = a.nrows
    rows = [[Fraction(x) for x in r] for r in a.data]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c]), None)
        if p is None:
            return coerce(0, a.ring)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            if rows[r][c]:
                f = rows[r][c] / rows[c][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return coerce(det, a.ring)


# ----------------------------------------------------------------------
# Finitely presented modules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FpModule:
    """``R^ngens / rowspan(relations)``; elements are column vectors."""

    ngens: int
    relations: ExactMatrix

    def __post_init__(self):
        if self.relations.ncols != self.ngens:
            raise ValueError("relation matrix must have one column per generator")

    @property
    def ring(self) -> str:
        return self.relations.ring

    @classmethod
    def free(cls, n: int, ring: str = "Z") -> "FpModule":
        return cls(n, ExactMatrix.zeros(0, n, ring))

    @classmethod
    def zero(cls, ring: str = "Z") -> "FpModule":
        return cls.free(0, ring)

    @classmethod
    def cyclic(cls, d: int, ring: str = "Z") -> "FpModule":
        return cls(1, ExactMatrix.from_rows([[d]], ring))

    @classmethod
    def from_invariants(cls, rank: int, torsion: Sequence[int] = (), ring: str = "Z") -> "FpModule":
        n = rank + len(torsion)
        rows = []
        for k, d in enumerate(torsion):
            row = [0] * n
            row[rank + k] = d
            rows.append(row)
        return cls(n, ExactMatrix.from_rows(rows, ring, ncols=n))

    def relation_columns(self) -> ExactMatrix:
        return self.relations.T

    def invariants(self) -> tuple[int, tuple]:
        """``(free rank, torsion invariant factors > 1)``."""
        d = invariant_factors(self.relations)
        rank = self.ngens - len(d)
        if self.ring == "Q":
            return rank, ()
        return rank, tuple(int(x) for x in d if abs(x) != 1)

    @property
    def rank(self) -> int:
        return self.invariants()[0]

    def is_zero(self) -> bool:
        return self.invariants() == (0, ())

    def is_free(self) -> bool:
        return not self.invariants()[1]

    def is_isomorphic(self, other: "FpModule") -> bool:
        return self.ring == other.ring and self.invariants() == other.invariants()

    def contains(self, vectors: ExactMatrix) -> bool:
        """Whether every column of ``vectors`` is zero in the module."""
        if vectors.ncols == 0:
            return True
        if self.relations.nrows == 0:
            return vectors.is_zero()
        return solve_right(self.relation_columns(), vectors) is not NO_SOLUTION

    def describe(self) -> str:
        rank, tors = self.invariants()
        base = "Z" if self.ring == "Z" else "Q"
        parts = [f"{base}^{rank}"] if rank else []
        parts += [f"Z/{d}" for d in tors]
        return " + ".join(parts) if parts else "0"


class NotWellDefined(ValueError):
    pass


@dataclass(frozen=True)
class ModuleMorphism:
    source: FpModule
    target: FpModule
    matrix: ExactMatrix
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        if self.check and self.source.relations.nrows:
            if not self.target.contains(self.matrix @ self.source.relation_columns()):
                raise NotWellDefined("matrix does not respect the source relations")

    @property
    def ring(self):
        return self.matrix.ring

    @classmethod
    def identity(cls, m: FpModule) -> "ModuleMorphism":
        return cls(m, m, ExactMatrix.identity(m.ngens, m.ring), check=False)

    @classmethod
    def zero(cls, s: FpModule, t: FpModule) -> "ModuleMorphism":
        return cls(s, t, ExactMatrix.zeros(t.ngens, s.ngens, s.ring), check=False)

    def __matmul__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """``self @ other`` is ``self`` after ``other``."""
        if other.target.ngens != self.source.ngens:
            raise ValueError("composition of incompatible morphisms")
        return ModuleMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self):
        return ModuleMorphism(self.source, self.target, -self.matrix, check=False)

    def scale(self, c):
        return ModuleMorphism(self.source, self.target, self.matrix.scale(c), check=False)

    def equals(self, other: "ModuleMorphism") -> bool:
        return self.target.contains((self.matrix - other.matrix))

    def is_zero(self) -> bool:
        return self.target.contains(self.matrix)


def _presentation_columns(m: FpModule) -> ExactMatrix:
    return m.relation_columns() if m.relations.nrows else ExactMatrix.zeros(m.ngens, 0, m.ring)


@lru_cache(maxsize=4096)
def simplify(m: FpModule) -> tuple[FpModule, ModuleMorphism, ModuleMorphism]:
    """Normalize ``m`` to ``R^r + sum R/d_i``; returns ``(m', to, back)``."""
    rel = _presentation_columns(m)
    s, u, _ = smith_normal_form(rel)
    diag = s.diagonal_nonzero()
    ring = m.ring
    unit = (lambda d: abs(d) == 1) if ring == "Z" else (lambda d: d != 0)
    keep = [i for i in range(m.ngens) if i >= len(diag) or not unit(diag[i])]
    torsion = [(k, diag[i]) for k, i in enumerate(keep) if i < len(diag)]
    rows = []
    for k, d in torsion:
        row = [0] * len(keep)
        row[k] = d
        rows.append(row)
    new = FpModule(len(keep), ExactMatrix.from_rows(rows, ring, ncols=len(keep)))
    uinv = inverse(u)
    to = ModuleMorphism(m, new, u.submatrix(rows=keep), check=False)
    back = ModuleMorphism(new, m, uinv.submatrix(cols=keep), check=False)
    return new, to, back


def module_kernel(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism]:
    """Kernel of ``f`` with its (monic) embedding."""
    ring = f.ring
    src, tgt = f.source, f.target
    rel_t = _presentation_columns(tgt)
    system = hstack([f.matrix, -rel_t], nrows=tgt.ngens, ring=ring)
    ns = nullspace(system)
    gens = ns.submatrix(rows=list(range(src.ngens)))
    gens = column_basis(gens)
    # relations among the kernel generators: K z in span(source relations)
    rel_s = _presentation_columns(src)
    k = gens.ncols
    rel_sys = hstack([gens, -rel_s], nrows=src.ngens, ring=ring)
    rel_ns = nullspace(rel_sys).submatrix(rows=list(range(k)))
    kmod = FpModule(k, rel_ns.T if rel_ns.ncols else ExactMatrix.zeros(0, k, ring))
    emb = ModuleMorphism(kmod, src, gens, check=False)
    small, _, back = simplify(kmod)
    return small, emb @ back


def module_cokernel(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism]:
    tgt = f.target
    rels = vstack([tgt.relations, f.matrix.T], ncols=tgt.ngens, ring=f.ring)
    cmod = FpModule(tgt.ngens, rels)
    proj = ModuleMorphism(tgt, cmod, ExactMatrix.identity(tgt.ngens, f.ring), check=False)
    small, to, _ = simplify(cmod)
    return small, to @ proj


def module_image(f: ModuleMorphism) -> tuple[FpModule, ModuleMorphism, ModuleMorphism]:
    """``(im, epi: source->im, mono: im->target)``."""
    k, emb = module_kernel(f)
    coim, q = module_cokernel(emb)
    mono = colift_through_epi(q, f)
    return coim, q, mono


def lift_through_mono(mono: ModuleMorphism, f: ModuleMorphism) -> ModuleMorphism:
    """``g`` with ``mono @ g == f``; raises if ``f`` does not factor."""
    tgt = mono.target
    a = hstack([mono.matrix, _presentation_columns(tgt)], nrows=tgt.ngens, ring=f.ring)
    x = solve_right(a, f.matrix)
    if x is NO_SOLUTION:
        raise NotWellDefined("morphism does not factor through the monomorphism")
    g = x.submatrix(rows=list(range(mono.source.ngens)))
    return ModuleMorphism(f.source, mono.source, g, check=False)


def colift_through_epi(epi: ModuleMorphism, f: ModuleMorphism) -> ModuleMorphism:
    """``g`` with ``g @ epi == f``; raises if ``f`` does not factor."""
    C, D = epi.target, f.target
    ring = f.ring
    rel_c = _presentation_columns(C)
    # G [E | R_C] - R_D Z = [F | 0]
    a = hstack([epi.matrix, rel_c], nrows=C.ngens, ring=ring)
    b = hstack([f.matrix, ExactMatrix.zeros(D.ngens, rel_c.ncols, ring)], nrows=D.ngens, ring=ring)
    sol = _solve_left_mod(a, b, _presentation_columns(D))
    if sol is NO_SOLUTION:
        raise NotWellDefined("morphism does not factor through the epimorphism")
    return ModuleMorphism(C, D, sol, check=False)


def _solve_left_mod(a: ExactMatrix, b: ExactMatrix, rel: ExactMatrix):
    """Solve ``x @ a == b + rel @ z`` for ``x`` (any ``z``)."""
    ring = a.ring
    n_out = b.nrows
    if rel.ncols == 0:
        x = solve_right(a.T, b.T)
        return x if x is NO_SOLUTION else x.T
    # unknown X (n_out x k), Z (rel.ncols x a.ncols): X a - rel Z = b
    k, m = a.nrows, a.ncols
    r = rel.ncols
    # vectorize row-major over X and Z
    nx, nz = n_out * k, r * m
    rows = []
    rhs = []
    for i in range(n_out):
        for j in range(m):
            row = [0] * (nx + nz)
            for t in range(k):
                row[i * k + t] = a.data[t][j]
            for t in range(r):
                row[nx + t * m + j] = -rel.data[i][t]
            rows.append(row)
            rhs.append([b.data[i][j]])
    A = ExactMatrix.from_rows(rows, ring, ncols=nx + nz)
    B = ExactMatrix.from_rows(rhs, ring, ncols=1)
    sol = solve_right(A, B)
    if sol is NO_SOLUTION:
        return NO_SOLUTION
    vals = [sol.data[p][0] for p in range(nx)]
    return ExactMatrix.from_rows([vals[i * k:(i + 1) * k] for i in range(n_out)], ring, ncols=k)


def tensor_coefficients(m: FpModule, ring: str = "Q") -> FpModule:
    """Base change along the flat inclusion Z -> Q."""
    if m.ring == ring:
        return m
    if (m.ring, ring) != ("Z", "Q"):
        raise RingMismatch(f"only Z -> Q is supported, got {m.ring} -> {ring}")
    return simplify(FpModule(m.ngens, m.relations.to_ring(ring)))[0]


def tensor_morphism_coefficients(f: ModuleMorphism, ring: str = "Q") -> ModuleMorphism:
    if f.ring == ring:
        return f
    s = FpModule(f.source.ngens, f.source.relations.to_ring(ring))
    t = FpModule(f.target.ngens, f.target.relations.to_ring(ring))
    return ModuleMorphism(s, t, f.matrix.to_ring(ring), check=False)


def direct_sum_modules(mods: Sequence[FpModule], ring: str = "Z") -> FpModule:
    if not mods:
        return FpModule.zero(ring)
    ring = mods[0].ring
    n = sum(m.ngens for m in mods)
    rels = block_diag([m.relations for m in mods], ring)
    return FpModule(n, rels)
