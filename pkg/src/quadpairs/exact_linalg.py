"""Exact linear algebra over the supported rings.

Matrices over any ring from :mod:`quadpairs.exact_rings` are handled by the
``Matrix`` class.  Linear problems between spaces of matrices are flattened
into coordinates: every ring element splits into monomial coordinates, and a
coordinate is either an integer (possibly taken modulo some n) or an element
of GF(2^m).  Integer problems are solved through a Smith normal form with
transforms, which also yields certificates of unsolvability; field problems
through Gaussian elimination.

Flattening of filtered rings (polynomial, Laurent) is always done at an
explicit degree bound ``D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .exact_rings import (
    Integers,
    IntegersMod,
    Ring,
    RingElement,
    RingHom,
    _gf_mul_raw,
)

__all__ = [
    "LinalgError",
    "Matrix",
    "smith_normal_form",
    "SNFResult",
    "ModuleSpace",
    "LinearMap",
    "FlatSystem",
    "Certificate",
    "Solution",
    "Unsolvable",
    "SubmoduleBasis",
    "MembershipResult",
    "build_system",
    "solve_linear",
    "solve_map",
    "kernel",
    "image",
    "span",
    "membership",
    "quotient_generators",
    "intersection",
    "hermite_normal_form",
    "CombinationResult",
    "solve_combination",
]


class LinalgError(ValueError):
    """Shape mismatch, unsupported base ring, or a non-invertible matrix."""


# ---------------------------------------------------------------------------
# Matrices over a ring
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix with canonical ring-element entries."""

    __slots__ = ("ring", "data", "nrows", "ncols", "_hash")

    def __init__(self, ring: Ring, rows: Sequence[Sequence[Any]]):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise LinalgError("matrices must have positive dimensions")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise LinalgError("ragged matrix rows")
        data = []
        for r in rows:
            out = []
            for x in r:
                if isinstance(x, RingElement):
                    if x.ring != ring:
                        raise LinalgError(f"entry from {x.ring} in a matrix over {ring}")
                    out.append(x.data)
                else:
                    out.append(ring(x).data)
            data.append(tuple(out))
        self._set(ring, tuple(data))

    def _set(self, ring, data):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", len(data[0]))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("matrices are immutable")

    @classmethod
    def from_data(cls, ring: Ring, data) -> "Matrix":
        m = cls.__new__(cls)
        m._set(ring, tuple(tuple(r) for r in data))
        return m

    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int | None = None) -> "Matrix":
        ncols = nrows if ncols is None else ncols
        z = ring.zero_data()
        return cls.from_data(ring, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        return cls.scalar(ring, n, ring.one_data())

    @classmethod
    def scalar(cls, ring: Ring, n: int, c) -> "Matrix":
        if isinstance(c, RingElement):
            c = c.data
        z = ring.zero_data()
        return cls.from_data(ring, [[c if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, ring: Ring, nrows: int, i: int, j: int, ncols: int | None = None, coeff=None) -> "Matrix":
        ncols = nrows if ncols is None else ncols
        c = ring.one_data() if coeff is None else (coeff.data if isinstance(coeff, RingElement) else coeff)
        z = ring.zero_data()
        return cls.from_data(
            ring, [[c if (a, b) == (i, j) else z for b in range(ncols)] for a in range(nrows)]
        )

    @classmethod
    def diagonal(cls, ring: Ring, entries: Sequence[Any]) -> "Matrix":
        n = len(entries)
        z = ring.zero_data()
        vals = [ring(e).data if not isinstance(e, RingElement) else e.data for e in entries]
        return cls.from_data(ring, [[vals[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def block_diagonal(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        ring = blocks[0].ring
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        z = ring.zero_data()
        out = [[z] * m for _ in range(n)]
        r = c = 0
        for b in blocks:
            for i in range(b.nrows):
                for j in range(b.ncols):
                    out[r + i][c + j] = b.data[i][j]
            r += b.nrows
            c += b.ncols
        return cls.from_data(ring, out)

    # access --------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> RingElement:
        i, j = ij
        return RingElement(self.ring, self.data[i][j], canonical=True)

    def entries(self) -> list[list[RingElement]]:
        return [[RingElement(self.ring, x, canonical=True) for x in r] for r in self.data]

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(x) for r in self.data for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # arithmetic -------------------------------------------------------------
    def _check_same(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise LinalgError("matrix expected")
        if other.ring != self.ring:
            raise LinalgError(f"ring mismatch {self.ring} vs {other.ring}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in addition")
        add = self.ring.add
        return Matrix.from_data(
            self.ring, [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        )

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix.from_data(self.ring, [[neg(a) for a in r] for r in self.data])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __mul__(self, other) -> "Matrix":
        if isinstance(other, Matrix):
            return self.matmul(other)
        return self.scale(other)

    def __rmul__(self, other) -> "Matrix":
        return self.scale(other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return self.matmul(other)

    def scale(self, c) -> "Matrix":
        if isinstance(c, int):
            c = self.ring.from_int(c)
        elif isinstance(c, RingElement):
            if c.ring != self.ring:
                raise LinalgError("scalar from a different ring")
            c = c.data
        mul = self.ring.mul
        return Matrix.from_data(self.ring, [[mul(c, a) for a in r] for r in self.data])

    def matmul(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.ncols != other.nrows:
            raise LinalgError(f"cannot multiply {self.shape} by {other.shape}")
        ring = self.ring
        add, mul, is_zero = ring.add, ring.mul, ring.is_zero
        z = ring.zero_data()
        cols = list(zip(*other.data))
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if not is_zero(a)]
            row = []
            for col in cols:
                acc = z
                for k, a in nz:
                    b = col[k]
                    if not is_zero(b):
                        acc = add(acc, mul(a, b))
                row.append(acc)
            out.append(row)
        return Matrix.from_data(ring, out)

    def __pow__(self, e: int) -> "Matrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.ring, self.nrows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    @property
    def T(self) -> "Matrix":
        return Matrix.from_data(self.ring, list(zip(*self.data)))

    def transpose(self) -> "Matrix":
        return self.T

    def trace(self) -> RingElement:
        if not self.is_square():
            raise LinalgError("trace of a non-square matrix")
        acc = self.ring.zero_data()
        for i in range(self.nrows):
            acc = self.ring.add(acc, self.data[i][i])
        return RingElement(self.ring, acc, canonical=True)

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product with block (i, j) equal to ``self[i, j] * other``."""
        self._check_same(other)
        mul = self.ring.mul
        out = []
        for r in self.data:
            for s in other.data:
                out.append([mul(a, b) for a in r for b in s])
        return Matrix.from_data(self.ring, out)

    def map_data(self, fn: Callable, ring: Ring | None = None) -> "Matrix":
        ring = self.ring if ring is None else ring
        return Matrix.from_data(ring, [[fn(a) for a in r] for r in self.data])

    def apply_hom(self, h: RingHom) -> "Matrix":
        if h.source != self.ring:
            raise LinalgError(f"hom from {h.source} applied to a matrix over {self.ring}")
        return self.map_data(h.apply_data, h.target)

    def truncate(self, D: int) -> "Matrix":
        return self.map_data(lambda a: self.ring.truncate(a, D))

    # determinants and inverses ------------------------------------------------
    def charpoly(self) -> list:
        """Coefficients ``[1, c1, ..., cn]`` of det(t - M) by Berkowitz's method."""
        if not self.is_square():
            raise LinalgError("characteristic polynomial of a non-square matrix")
        ring = self.ring
        add, mul, neg = ring.add, ring.mul, ring.neg
        z, one = ring.zero_data(), ring.one_data()
        A = self.data
        n = self.nrows
        C = [one]
        for r in range(n):
            # leading r x r block M, row R = A[r][:r], column S = A[:r][r], corner a
            a = A[r][r]
            R = A[r][:r]
            S = [A[i][r] for i in range(r)]
            col = [one, neg(a)]
            vec = S
            for _ in range(r):
                val = z
                for x, y in zip(R, vec):
                    val = add(val, mul(x, y))
                col.append(neg(val))
                vec = [
                    _dot(ring, A[i][:r], vec) for i in range(r)
                ]
            # Toeplitz (r+2) x (r+1) with first column col, times C
            newC = []
            for i in range(r + 2):
                acc = z
                for j in range(r + 1):
                    k = i - j
                    if 0 <= k < len(col):
                        acc = add(acc, mul(col[k], C[j]))
                newC.append(acc)
            C = newC
        return [RingElement(ring, c, canonical=True) for c in C]

    def det(self) -> RingElement:
        coeffs = self.charpoly()
        c = coeffs[-1]
        return c if self.nrows % 2 == 0 else -c

    def is_invertible(self) -> bool:
        return self.is_square() and self.det().is_unit()

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise LinalgError("inverse of a non-square matrix")
        coeffs = self.charpoly()
        n = self.nrows
        cn = coeffs[-1]
        if not cn.is_unit():
            raise LinalgError("matrix is not invertible (determinant is not a unit)")
        # Cayley-Hamilton: M^-1 = -cn^-1 (M^(n-1) + c1 M^(n-2) + ... + c_(n-1))
        B = Matrix.identity(self.ring, n)
        for k in range(1, n):
            B = self @ B + Matrix.scalar(self.ring, n, coeffs[k])
        inv = B.scale(-(cn.inverse()))
        return inv

    # equality & io -----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Matrix) and self.ring == other.ring and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.ring, self.data)))
        return self._hash

    def to_json(self) -> list[list[str]]:
        fmt = self.ring.format
        return [[fmt(a) for a in r] for r in self.data]

    @classmethod
    def from_json(cls, ring: Ring, rows) -> "Matrix":
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise LinalgError("matrix JSON must be a nested array")
        return cls(ring, [[ring.parse(str(x)) for x in r] for r in rows])

    def __str__(self):
        cells = self.to_json()
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)

    def __repr__(self):
        return f"Matrix({self.ring}, {self.to_json()})"


def _dot(ring: Ring, xs, ys):
    acc = ring.zero_data()
    for x, y in zip(xs, ys):
        acc = ring.add(acc, ring.mul(x, y))
    return acc


# ---------------------------------------------------------------------------
# Integer Smith normal form with transforms
# ---------------------------------------------------------------------------


def _snf_int(A: list[list[int]], transforms: bool = True):
    """Return (U, S, V, Vinv, rank) with U*A*V = S diagonal, d_i | d_(i+1), d_i >= 0."""
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(r) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None
    Vi = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        if transforms:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in S:
            r[i], r[j] = r[j], r[i]
        if transforms:
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_addmul(dst, src, q):  # row_dst -= q * row_src
        if q == 0:
            return
        rs, rd = S[src], S[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        if transforms:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] -= q * us[k]

    def col_addmul(dst, src, q):  # col_dst -= q * col_src
        if q == 0:
            return
        for r in S:
            if r[src]:
                r[dst] -= q * r[src]
        if transforms:
            for r in V:
                if r[src]:
                    r[dst] -= q * r[src]
            vs, vd = Vi[src], Vi[dst]
            for k in range(n):
                if vd[k]:
                    vs[k] += q * vd[k]

    t = 0
    while t < min(m, n):
        # choose the smallest nonzero entry of the remaining block as pivot
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = S[t][t]
            changed = False
            for i in range(t + 1, m):
                if S[i][t]:
                    row_addmul(i, t, S[i][t] // p)
                    if S[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if S[t][j]:
                    col_addmul(j, t, S[t][j] // p)
                    if S[t][j]:
                        changed = True
            if changed:
                # move a smaller remainder into the pivot position
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    v = S[i][t]
                    if v and abs(v) < best[0]:
                        best = (abs(v), i, t)
                for j in range(t + 1, n):
                    v = S[t][j]
                    if v and abs(v) < best[0]:
                        best = (abs(v), t, j)
                _, bi, bj = best
                if bi != t:
                    swap_rows(t, bi)
                if bj != t:
                    swap_cols(t, bj)
                continue
            # row and column cleared; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                row = S[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, -1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            if transforms:
                U[t] = [-x for x in U[t]]
        t += 1
    return U, S, V, Vi, t


@dataclass(frozen=True)
class SNFResult:
    """``U * M * V == diag(diagonal)`` with ``d_i | d_(i+1)``."""

    diagonal: tuple
    U: Matrix
    V: Matrix
    S: Matrix


def smith_normal_form(M: Matrix) -> SNFResult:
    """Smith normal form over ZZ or ZZ/n, with unimodular transforms."""
    ring = M.ring
    if isinstance(ring, Integers):
        n = 0
    elif isinstance(ring, IntegersMod):
        n = ring.n
    else:
        raise LinalgError(f"Smith normal form needs ZZ or ZZ/n entries, got {ring}")
    A = [list(r) for r in M.data]
    U, S, V, _, rank = _snf_int(A)
    k = min(M.nrows, M.ncols)
    diag = [S[i][i] for i in range(k)]
    if n:
        # over ZZ/n every d is an associate of gcd(d, n)
        for i, d in enumerate(diag):
            g = math.gcd(d, n)
            if g == n:
                diag[i] = 0
                continue
            w = _unit_with(d, g, n)
            diag[i] = g
            winv = pow(w, -1, n)
            U[i] = [(x * winv) % n for x in U[i]]
        U = [[x % n for x in r] for r in U]
        V = [[x % n for x in r] for r in V]
    Um = Matrix(ring, U)
    Vm = Matrix(ring, V)
    Sm = Um @ M @ Vm
    return SNFResult(tuple(ring.element(ring.canon(d)) for d in diag), Um, Vm, Sm)


def _unit_with(d: int, g: int, n: int) -> int:
    """A unit w mod n with d == w * g (mod n)."""
    d %= n
    for w in range(1, n):
        if math.gcd(w, n) == 1 and (w * g - d) % n == 0:
            return w
    raise LinalgError("no unit relating d to gcd(d, n)")


def hermite_normal_form(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by integer ``rows``.

    Pivots are positive and strictly increase; entries above a pivot are
    reduced into ``[0, pivot)``.  Zero rows are dropped.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    work = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    for c in range(ncols):
        if not work:
            break
        nz = [r for r in work if r[c]]
        if not nz:
            continue
        rest = [r for r in work if not r[c]]
        # gcd-combine the column entries into a single pivot row
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[c]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[c]:
                    new.append(r)
                elif any(r):
                    rest.append(r)
            nz = new
        piv = nz[0]
        if piv[c] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        work = rest
    # reduce above pivots
    pivcols = [next(j for j, a in enumerate(r) if a) for r in out]
    for k in range(len(out)):
        c = pivcols[k]
        p = out[k][c]
        for i in range(k):
            q = out[i][c] // p
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[k])]
    return out


# ---------------------------------------------------------------------------
# GF(2^m) helpers
# ---------------------------------------------------------------------------

_GF_TABLES: dict[int, tuple[list[list[int]], list[int]]] = {}


def _gf_tables(m: int):
    if m not in _GF_TABLES:
        q = 1 << m
        mul = [[_gf_mul_raw(a, b, m) for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        _GF_TABLES[m] = (mul, inv)
    return _GF_TABLES[m]


def _gf_eliminate(A: list[list[int]], b: list[int] | None, m: int):
    """Row-reduce [A | b] over GF(2^m) tracking the left transform.

    Returns (R, rb, T, pivots) with T*A = R in reduced row echelon form.
    """
    mul, inv = _gf_tables(m)
    rows = len(A)
    ncols = len(A[0]) if rows else 0
    R = [list(r) for r in A]
    rb = list(b) if b is not None else [0] * rows
    T = [[int(i == j) for j in range(rows)] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        rb[r], rb[piv] = rb[piv], rb[r]
        T[r], T[piv] = T[piv], T[r]
        s = inv[R[r][c]]
        if s != 1:
            R[r] = [mul[s][x] for x in R[r]]
            rb[r] = mul[s][rb[r]]
            T[r] = [mul[s][x] for x in T[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                mf = mul[f]
                R[i] = [x ^ mf[y] for x, y in zip(R[i], R[r])]
                rb[i] ^= mf[rb[r]]
                T[i] = [x ^ mf[y] for x, y in zip(T[i], T[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, rb, T, pivots


# ---------------------------------------------------------------------------
# Spaces of matrices and their coordinates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    ring: Ring
    nrows: int
    ncols: int


class ModuleSpace:
    """A direct sum of matrix spaces ``M_{r x c}(R)``; vectors are tuples of matrices."""

    def __init__(self, slots: Sequence[Slot | tuple]):
        norm = []
        for s in slots:
            if isinstance(s, Slot):
                norm.append(s)
            else:
                ring, r, c = s
                norm.append(Slot(ring, r, c))
        if not norm:
            raise LinalgError("a module space needs at least one slot")
        backends = {s.ring.backend for s in norm}
        if len(backends) != 1:
            raise LinalgError("all slots must share a coordinate backend")
        self.slots = tuple(norm)
        self.backend = norm[0].ring.backend

    @classmethod
    def matrices(cls, ring: Ring, nrows: int, ncols: int | None = None) -> "ModuleSpace":
        return cls([Slot(ring, nrows, nrows if ncols is None else ncols)])

    def __eq__(self, other):
        return isinstance(other, ModuleSpace) and self.slots == other.slots

    def __hash__(self):
        return hash(self.slots)

    def __repr__(self):
        return "ModuleSpace(" + ", ".join(f"M_{s.nrows}x{s.ncols}({s.ring})" for s in self.slots) + ")"

    def as_vec(self, v) -> tuple[Matrix, ...]:
        if isinstance(v, Matrix):
            v = (v,)
        v = tuple(v)
        if len(v) != len(self.slots):
            raise LinalgError("vector does not match the space")
        for m, s in zip(v, self.slots):
            if m.ring != s.ring or m.shape != (s.nrows, s.ncols):
                raise LinalgError(f"component {m.shape} over {m.ring} does not fit {s}")
        return v

    def zero(self) -> tuple[Matrix, ...]:
        return tuple(Matrix.zero(s.ring, s.nrows, s.ncols) for s in self.slots)

    def coordinates(self, D: int | None) -> list[tuple]:
        out = []
        for k, s in enumerate(self.slots):
            keys = s.ring.basis_keys(D)
            for i in range(s.nrows):
                for j in range(s.ncols):
                    for key in keys:
                        out.append((k, i, j, key))
        return out

    def modulus(self, coord) -> int:
        return self.slots[coord[0]].ring.modulus(coord[3])

    def unit_vector(self, coord, scalar=1) -> tuple[Matrix, ...]:
        k, i, j, key = coord
        vec = list(self.zero())
        s = self.slots[k]
        entry = s.ring.from_coords({key: scalar})
        vec[k] = Matrix.unit(s.ring, s.nrows, i, j, s.ncols, coeff=entry)
        return tuple(vec)

    def coords_of(self, v) -> dict:
        v = self.as_vec(v)
        out = {}
        for k, (m, s) in enumerate(zip(v, self.slots)):
            for i, row in enumerate(m.data):
                for j, a in enumerate(row):
                    for key, val in s.ring.coords(a).items():
                        out[(k, i, j, key)] = val
        return out

    def from_coords(self, coords: dict) -> tuple[Matrix, ...]:
        buckets: dict[tuple, dict] = {}
        for (k, i, j, key), val in coords.items():
            buckets.setdefault((k, i, j), {})[key] = val
        out = []
        for k, s in enumerate(self.slots):
            rows = []
            for i in range(s.nrows):
                row = []
                for j in range(s.ncols):
                    row.append(s.ring.from_coords(buckets.get((k, i, j), {})))
                rows.append(row)
            out.append(Matrix.from_data(s.ring, rows))
        return tuple(out)

    def key_degree(self, coord) -> int:
        return self.slots[coord[0]].ring.key_degree(coord[3])


def _vec_add(a: tuple[Matrix, ...], b: tuple[Matrix, ...]) -> tuple[Matrix, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _vec_scale(a: tuple[Matrix, ...], c: int) -> tuple[Matrix, ...]:
    return tuple(x.scale(c) for x in a)


class LinearMap:
    """A map between module spaces, linear over the coordinate base ring."""

    def __init__(self, domain: ModuleSpace, codomain: ModuleSpace, fn: Callable, name: str = ""):
        if domain.backend != codomain.backend:
            raise LinalgError("domain and codomain must share a coordinate backend")
        self.domain = domain
        self.codomain = codomain
        self.fn = fn
        self.name = name

    def __call__(self, v) -> tuple[Matrix, ...]:
        out = self.fn(self.domain.as_vec(v))
        if isinstance(out, Matrix):
            out = (out,)
        return self.codomain.as_vec(out)

    @classmethod
    def matrix_action(cls, A: Matrix) -> "LinearMap":
        """``v -> A v`` on column vectors."""
        dom = ModuleSpace.matrices(A.ring, A.ncols, 1)
        cod = ModuleSpace.matrices(A.ring, A.nrows, 1)
        return cls(dom, cod, lambda v: (A @ v[0],), "matrix action")


# ---------------------------------------------------------------------------
# Flat systems
# ---------------------------------------------------------------------------


@dataclass
class FlatSystem:
    """``A x = b`` on coordinates: columns are domain coordinates, rows codomain ones.

    On the integer backend each row carries the additive order of its
    coordinate (0 = free) and equations hold modulo it; domain coordinates
    carry their own orders in ``col_moduli``.
    """

    backend: tuple
    degree: int | None
    rows: list
    cols: list
    columns: list[dict]  # sparse column j: {row index: value}
    rhs: dict  # {row index: value}
    row_moduli: list[int]
    col_moduli: list[int]
    domain: ModuleSpace | None = None
    codomain: ModuleSpace | None = None
    row_index: dict = field(default_factory=dict)

    def add_row(self, coord, modulus: int) -> int:
        if coord in self.row_index:
            return self.row_index[coord]
        self.row_index[coord] = len(self.rows)
        self.rows.append(coord)
        self.row_moduli.append(modulus)
        return len(self.rows) - 1

    def set_rhs(self, coords: dict, moduli: Callable[[Any], int]):
        self.rhs = {}
        for c, v in coords.items():
            r = self.add_row(c, moduli(c))
            if v:
                self.rhs[r] = v

    def column_vector(self, j: int) -> dict:
        return {self.rows[r]: v for r, v in self.columns[j].items()}


def build_system(lin: LinearMap, D: int | None, rhs=None, coord_filter: Callable | None = None) -> FlatSystem:
    """Flatten ``lin`` on domain coordinates of degree at most ``D``.

    ``coord_filter`` restricts the columns to the domain coordinates it accepts.
    """
    dom, cod = lin.domain, lin.codomain
    cols = dom.coordinates(D)
    if coord_filter is not None:
        cols = [c for c in cols if coord_filter(c)]
    sysm = FlatSystem(
        backend=dom.backend,
        degree=D,
        rows=[],
        cols=cols,
        columns=[],
        rhs={},
        row_moduli=[],
        col_moduli=[dom.modulus(c) if dom.backend[0] == "Z" else 0 for c in cols],
        domain=dom,
        codomain=cod,
    )
    gf = dom.backend[0] == "GF"
    m = dom.backend[1] if gf else None
    for c in cols:
        img = cod.coords_of(lin(dom.unit_vector(c)))
        if gf and m > 1:
            # the flattening is only valid for maps linear over the field
            w = 2
            img_w = cod.coords_of(lin(dom.unit_vector(c, w)))
            mul, _ = _gf_tables(m)
            if img_w != {k: mul[w][v] for k, v in img.items() if mul[w][v]}:
                raise LinalgError(f"map {lin.name!r} is not linear over GF(2^{m})")
        col = {}
        for coord, val in img.items():
            r = sysm.add_row(coord, cod.modulus(coord) if not gf else 0)
            col[r] = val
        sysm.columns.append(col)
    if rhs is not None:
        sysm.set_rhs(cod.coords_of(rhs), (lambda c: cod.modulus(c)) if not gf else (lambda c: 0))
    return sysm


def _components(sysm: FlatSystem) -> list[tuple[list[int], list[int]]]:
    """Connected components of the row/column incidence graph."""
    nr, nc = len(sysm.rows), len(sysm.cols)
    parent = list(range(nr + nc))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, col in enumerate(sysm.columns):
        for r in col:
            a, b = find(r), find(nr + j)
            if a != b:
                parent[a] = b
    groups: dict[int, tuple[list, list]] = {}
    for r in range(nr):
        groups.setdefault(find(r), ([], []))[0].append(r)
    for j in range(nc):
        groups.setdefault(find(nr + j), ([], []))[1].append(j)
    return sorted(groups.values(), key=lambda g: (g[0][:1] or [10**9], g[1][:1]))


# ---------------------------------------------------------------------------
# Certificates and solutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A functional on the codomain coordinates witnessing unsolvability.

    Integer backend: ``chi`` takes values in ZZ/modulus (ZZ if modulus is 0),
    vanishes on every column and on every coordinate relation, and is nonzero
    on the right-hand side.  Field backend: same with values in GF(2^m).
    """

    backend: tuple
    functional: dict  # {codomain coordinate: coefficient}
    modulus: int
    value: int

    def evaluate(self, coords: dict) -> int:
        acc = 0
        if self.backend[0] == "GF":
            mul, _ = _gf_tables(self.backend[1])
            for c, v in coords.items():
                k = self.functional.get(c)
                if k:
                    acc ^= mul[k][v]
            return acc
        for c, v in coords.items():
            k = self.functional.get(c)
            if k:
                acc += k * v
        return acc % self.modulus if self.modulus else acc

    def verify(self, sysm: FlatSystem) -> bool:
        """Re-check the certificate against every column and relation of ``sysm``."""
        for j in range(len(sysm.cols)):
            if self.evaluate(sysm.column_vector(j)) != 0:
                return False
        if self.backend[0] == "Z":
            for coord, mod in zip(sysm.rows, sysm.row_moduli):
                k = self.functional.get(coord, 0)
                if mod and self.modulus and (k * mod) % self.modulus:
                    return False
                if mod and not self.modulus and k:
                    return False
        rhs = {sysm.rows[r]: v for r, v in sysm.rhs.items()}
        value = self.evaluate(rhs)
        return value != 0 and value == self.value

    def to_json(self) -> dict:
        return {
            "functional": [[_coord_json(c), v] for c, v in sorted(self.functional.items(), key=lambda t: repr(t[0]))],
            "modulus": self.modulus,
            "value": self.value,
        }


def _coord_json(c):
    k, i, j, key = c
    return {"slot": k, "row": i + 1, "col": j + 1, "key": key if not isinstance(key, tuple) else list(key)}


@dataclass
class Solution:
    particular: tuple
    kernel: "SubmoduleBasis"
    system: FlatSystem

    solvable = True


@dataclass
class Unsolvable:
    certificate: Certificate
    system: FlatSystem

    solvable = False


def _int_solve_component(sysm: FlatSystem, rows: list[int], cols: list[int], want_kernel: bool):
    """Solve the block ``rows x cols`` over ZZ with row moduli.

    Returns (x: {col: int} or None, certificate or None, kernel generator list).
    """
    mod_rows = [r for r in rows if sysm.row_moduli[r]]
    ridx = {r: k for k, r in enumerate(rows)}
    ncols = len(cols) + len(mod_rows)
    A = [[0] * ncols for _ in rows]
    for cj, j in enumerate(cols):
        for r, v in sysm.columns[j].items():
            A[ridx[r]][cj] = v
    for k, r in enumerate(mod_rows):
        A[ridx[r]][len(cols) + k] = sysm.row_moduli[r]
    b = [sysm.rhs.get(r, 0) for r in rows]
    if ncols == 0:
        U, S, V, Vi, rank = [[int(i == j) for j in range(len(rows))] for i in range(len(rows))], [], [], [], 0
    else:
        U, S, V, Vi, rank = _snf_int(A)
    c = [sum(u * x for u, x in zip(Urow, b)) for Urow in U]
    x = None
    cert = None
    y = [0] * ncols
    ok = True
    for i in range(len(rows)):
        d = S[i][i] if i < rank else 0
        if i < rank:
            if c[i] % d:
                ok = False
                chi = {rows[k]: U[i][k] for k in range(len(rows)) if U[i][k] % d}
                cert = (chi, d, c[i] % d)
                break
            y[i] = c[i] // d
        elif c[i]:
            ok = False
            chi = {rows[k]: U[i][k] for k in range(len(rows)) if U[i][k]}
            cert = (chi, 0, c[i])
            break
    if ok:
        full = [sum(V[r][k] * y[k] for k in range(ncols)) for r in range(ncols)] if ncols else []
        x = {cols[k]: full[k] for k in range(len(cols))}
    kern = []
    if want_kernel:
        for k in range(rank, ncols):
            vec = {cols[t]: V[t][k] for t in range(len(cols)) if V[t][k]}
            if vec:
                kern.append(vec)
    return x, cert, kern


def _gf_solve_component(sysm: FlatSystem, rows: list[int], cols: list[int], want_kernel: bool):
    m = sysm.backend[1]
    ridx = {r: k for k, r in enumerate(rows)}
    A = [[0] * len(cols) for _ in rows]
    for cj, j in enumerate(cols):
        for r, v in sysm.columns[j].items():
            A[ridx[r]][cj] = v
    b = [sysm.rhs.get(r, 0) for r in rows]
    if not cols:
        A = [[] for _ in rows]
    R, rb, T, pivots = _gf_eliminate(A, b, m) if cols else (A, b, [[int(i == j) for j in range(len(rows))] for i in range(len(rows))], [])
    rank = len(pivots)
    for i in range(rank, len(rows)):
        if rb[i]:
            chi = {rows[k]: T[i][k] for k in range(len(rows)) if T[i][k]}
            return None, (chi, 0, rb[i]), []
    x = {j: 0 for j in cols}
    for i, pc in enumerate(pivots):
        x[cols[pc]] = rb[i]
    kern = []
    if want_kernel:
        free = [c for c in range(len(cols)) if c not in set(pivots)]
        for f in free:
            vec = {cols[f]: 1}
            for i, pc in enumerate(pivots):
                if R[i][f]:
                    vec[cols[pc]] = R[i][f]  # char 2: -a == a
            kern.append(vec)
    return x, None, kern


def _solve(sysm: FlatSystem, want_kernel: bool = True):
    gf = sysm.backend[0] == "GF"
    comps = _components(sysm)
    x_total: dict[int, int] = {}
    kern_all: list[dict] = []
    for rows, cols in comps:
        if not rows:
            # columns that never reach a row are free
            if want_kernel:
                kern_all.extend({j: 1} for j in cols)
            continue
        if not any(sysm.rhs.get(r) for r in rows) and not want_kernel:
            continue
        if gf:
            x, cert, kern = _gf_solve_component(sysm, rows, cols, want_kernel)
        else:
            x, cert, kern = _int_solve_component(sysm, rows, cols, want_kernel)
        if cert is not None:
            chi, d, val = cert
            if not gf and d:
                chi = {r: v % d for r, v in chi.items() if v % d}
            chi = {sysm.rows[r]: v for r, v in chi.items()}
            certificate = Certificate(sysm.backend, chi, d, val)
            return None, certificate, None
        x_total.update({j: v for j, v in x.items() if v})
        kern_all.extend(kern)
    return x_total, None, kern_all


def _simplify_certificate(sysm: FlatSystem, cert: Certificate) -> Certificate:
    """Prefer a single-coordinate functional when one exists."""
    gf = sysm.backend[0] == "GF"
    by_row: dict[int, list[int]] = {}
    for j, col in enumerate(sysm.columns):
        for r, v in col.items():
            by_row.setdefault(r, []).append(v)
    for r, coord in enumerate(sysm.rows):
        b = sysm.rhs.get(r, 0)
        if not b:
            continue
        entries = by_row.get(r, [])
        if gf:
            if not any(entries):
                return Certificate(sysm.backend, {coord: 1}, 0, b)
            continue
        mod = sysm.row_moduli[r]
        g = 0
        for v in entries:
            g = math.gcd(g, v)
        if mod:
            cands = sorted((d for d in range(2, mod + 1) if mod % d == 0), reverse=True)
        else:
            cands = [0] + sorted((d for d in _divisors(g) if d > 1), reverse=True) if g == 0 else sorted((d for d in _divisors(g) if d > 1), reverse=True)
        for d in cands:
            if d == 0:
                if not any(entries) and b:
                    return Certificate(sysm.backend, {coord: 1}, 0, b)
                continue
            if all(v % d == 0 for v in entries) and b % d:
                return Certificate(sysm.backend, {coord: 1}, d, b % d)
    return cert


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0] if n else []


def solve_linear(sysm: FlatSystem, *, want_kernel: bool = True, simplify: bool = True):
    """Solve a flat system: ``Solution`` (particular + kernel) or ``Unsolvable``."""
    x, cert, kern = _solve(sysm, want_kernel)
    if cert is not None:
        if simplify:
            cert = _simplify_certificate(sysm, cert)
        if not cert.verify(sysm):
            raise LinalgError("internal error: unsolvability certificate failed to verify")
        return Unsolvable(cert, sysm)
    dom = sysm.domain
    coords = {sysm.cols[j]: v for j, v in x.items()}
    particular = dom.from_coords(_reduce_coords(coords, sysm.backend, dom)) if dom else coords
    kernel_basis = None
    if want_kernel and dom is not None:
        vecs = [{sysm.cols[j]: v for j, v in vec.items()} for vec in kern]
        kernel_basis = _make_submodule(dom, sysm.degree, vecs, relations=[])
    return Solution(particular, kernel_basis, sysm)


def _reduce_coords(coords: dict, backend, space: ModuleSpace) -> dict:
    if backend[0] == "GF":
        return coords
    out = {}
    for c, v in coords.items():
        mod = space.modulus(c)
        v = v % mod if mod else v
        if v:
            out[c] = v
    return out


def solve_map(lin: LinearMap, rhs, D: int | None, *, want_kernel: bool = True):
    """Solve ``lin(x) = rhs`` with ``x`` of degree at most ``D``."""
    return solve_linear(build_system(lin, D, rhs), want_kernel=want_kernel)


# ---------------------------------------------------------------------------
# Submodules
# ---------------------------------------------------------------------------


@dataclass
class SubmoduleBasis:
    """A submodule of a flattened space, given by a minimal generating set.

    Integer backend: ``generators[i]`` generates a cyclic summand whose
    additive order is ``annihilators[i]`` (0 = infinite), so the submodule is
    the direct sum of these cyclic pieces.  ``echelon`` is the Hermite normal
    form of the lattice of integer lifts (including the coordinate relations),
    used for membership and canonical coset representatives.  Field backend:
    generators are the rows of a reduced echelon basis.
    """

    space: ModuleSpace
    degree: int | None
    coords: list
    generators: list[dict]
    annihilators: list[int]
    echelon: list[list[int]]
    pivots: list[int]

    @property
    def backend(self):
        return self.space.backend

    def __len__(self):
        return len(self.generators)

    @property
    def count(self) -> int:
        return len(self.generators)

    def vectors(self) -> list[tuple[Matrix, ...]]:
        return [self.space.from_coords(_reduce_coords(g, self.backend, self.space)) for g in self.generators]

    def matrices(self) -> list[Matrix]:
        """Generators of a single-slot space as matrices."""
        return [v[0] for v in self.vectors()]

    def is_free(self) -> bool:
        return all(a == 0 for a in self.annihilators) if self.backend[0] == "Z" else True

    def reduce(self, v) -> tuple[Matrix, ...]:
        """Canonical representative of ``v`` modulo this submodule."""
        vec = self._dense(self.space.coords_of(v))
        vec = _reduce_dense(vec, self.echelon, self.pivots, self.backend)
        coords = {c: x for c, x in zip(self.coords, vec) if x}
        for c in self.space.coords_of(v):
            if c not in self._index:
                raise LinalgError("vector has coordinates outside the flattened space")
        return self.space.from_coords(_reduce_coords(coords, self.backend, self.space))

    @property
    def _index(self):
        return {c: k for k, c in enumerate(self.coords)}

    def _dense(self, coords: dict) -> list[int]:
        idx = self._index
        vec = [0] * len(self.coords)
        for c, x in coords.items():
            if c not in idx:
                raise LinalgError(f"coordinate {c} outside the flattened space at degree {self.degree}")
            vec[idx[c]] = x
        return vec

    def to_json(self) -> dict:
        return {
            "generators": [[m.to_json() for m in v] if len(v) > 1 else v[0].to_json() for v in self.vectors()],
            "annihilators": list(self.annihilators),
            "degree": self.degree,
        }


def _reduce_dense(vec: list[int], echelon: list[list[int]], pivots: list[int], backend) -> list[int]:
    vec = list(vec)
    if backend[0] == "GF":
        mul, _ = _gf_tables(backend[1])
        for row, p in zip(echelon, pivots):
            f = vec[p]
            if f:
                mf = mul[f]
                vec = [x ^ mf[y] for x, y in zip(vec, row)]
        return vec
    for row, p in zip(echelon, pivots):
        q = vec[p] // row[p]
        if q:
            vec = [x - q * y for x, y in zip(vec, row)]
    return vec


def _make_submodule(space: ModuleSpace, D: int | None, vecs: list[dict], relations: list[dict]) -> SubmoduleBasis:
    """Minimal generators of ``span(vecs) / span(relations)`` inside ``space``.

    On the integer backend the coordinate relations of ``space`` are always
    added to ``relations``; they must lie in ``span(vecs)`` + coordinate
    relations, which holds for every submodule built here.
    """
    coords = space.coordinates(D)
    extra = set()
    for v in list(vecs) + list(relations):
        extra.update(c for c in v if c not in set(coords))
    if extra:
        coords = coords + sorted(extra, key=repr)
    idx = {c: k for k, c in enumerate(coords)}
    N = len(coords)

    def dense(v):
        out = [0] * N
        for c, x in v.items():
            out[idx[c]] = x
        return out

    if space.backend[0] == "GF":
        m = space.backend[1]
        rows = [dense(v) for v in vecs]
        rel = [dense(v) for v in relations]
        # echelon of the relations, then of relations + vectors
        ech_rel, piv_rel = _gf_rref(rel, m)
        reduced = [_reduce_dense(r, ech_rel, piv_rel, space.backend) for r in rows]
        ech, piv = _gf_rref(reduced, m)
        gens = [{coords[k]: x for k, x in enumerate(r) if x} for r in ech]
        full_ech, full_piv = _gf_rref(rel + rows, m)
        return SubmoduleBasis(space, D, coords, gens, [0] * len(gens), full_ech, full_piv)

    mod_rel = []
    for k, c in enumerate(coords):
        mod = space.modulus(c)
        if mod:
            row = [0] * N
            row[k] = mod
            mod_rel.append(row)
    rel_rows = [dense(v) for v in relations] + mod_rel
    gen_rows = [dense(v) for v in vecs]
    lattice = hermite_normal_form(gen_rows + rel_rows)
    if not lattice:
        return SubmoduleBasis(space, D, coords, [], [], [], [])
    pivots = [next(j for j, a in enumerate(r) if a) for r in lattice]
    # coefficients of each relation in the lattice basis (exact, triangular)
    C = []
    for r in rel_rows:
        coeff = []
        rem = list(r)
        for row, p in zip(lattice, pivots):
            q, s = divmod(rem[p], row[p])
            if s:
                raise LinalgError("relations are not contained in the spanned lattice")
            coeff.append(q)
            if q:
                rem = [x - q * y for x, y in zip(rem, row)]
        if any(rem):
            raise LinalgError("relations are not contained in the spanned lattice")
        C.append(coeff)
    rho = len(lattice)
    if C:
        _, S, _, Vi, rank = _snf_int(C)
        diag = [S[i][i] if i < rank else 0 for i in range(rho)]
    else:
        Vi = [[int(i == j) for j in range(rho)] for i in range(rho)]
        diag = [0] * rho
    gens, anns = [], []
    for i in range(rho):
        if diag[i] == 1:
            continue
        vec = [0] * N
        for k in range(rho):
            f = Vi[i][k]
            if f:
                row = lattice[k]
                vec = [x + f * y for x, y in zip(vec, row)]
        vec = _reduce_dense(vec, hermite_normal_form(rel_rows), _pivots_of(hermite_normal_form(rel_rows)), space.backend) if rel_rows else vec
        gens.append({coords[k]: x for k, x in enumerate(vec) if x})
        anns.append(diag[i])
    # lattice of lifts of the submodule (including relations) for membership
    return SubmoduleBasis(space, D, coords, gens, anns, lattice, pivots)


def _pivots_of(ech: list[list[int]]) -> list[int]:
    return [next(j for j, a in enumerate(r) if a) for r in ech]


def _gf_rref(rows: list[list[int]], m: int):
    rows = [r for r in rows if any(r)]
    if not rows:
        return [], []
    R, _, _, pivots = _gf_eliminate(rows, None, m)
    return R[: len(pivots)], pivots


def kernel(lin: LinearMap, D: int | None, coord_filter: Callable | None = None) -> SubmoduleBasis:
    """Generators of ``ker(lin)`` among domain elements of degree at most ``D``."""
    sysm = build_system(lin, D, coord_filter=coord_filter)
    x, cert, kern = _solve(sysm, want_kernel=True)
    vecs = [{sysm.cols[j]: v for j, v in vec.items()} for vec in kern]
    return _make_submodule(lin.domain, D, vecs, relations=[])


def image(
    lin: LinearMap, D: int | None, codomain_degree: int | None = None, coord_filter: Callable | None = None
) -> SubmoduleBasis:
    """Generators of the image of the degree-``D`` part of the domain."""
    sysm = build_system(lin, D, coord_filter=coord_filter)
    vecs = [sysm.column_vector(j) for j in range(len(sysm.cols))]
    return _make_submodule(lin.codomain, D if codomain_degree is None else codomain_degree, vecs, relations=[])


def span(space: ModuleSpace, vectors: Iterable, D: int | None = None) -> SubmoduleBasis:
    """Submodule generated by explicit vectors (tuples of matrices or matrices)."""
    vecs = [space.coords_of(v) for v in vectors]
    return _make_submodule(space, D, vecs, relations=[])


def quotient_generators(B: SubmoduleBasis, sub: SubmoduleBasis) -> SubmoduleBasis:
    """Minimal generators of ``B / sub`` (``sub`` must be contained in ``B``)."""
    if B.space != sub.space:
        raise LinalgError("quotient of submodules of different spaces")
    return _make_submodule(B.space, B.degree, B.generators, relations=sub.generators)


@dataclass
class MembershipResult:
    member: bool
    coefficients: list | None
    certificate: Certificate | None
    system: FlatSystem

    def __bool__(self):
        return self.member

    def verify(self, v, B: SubmoduleBasis) -> bool:
        if self.member:
            acc = B.space.zero()
            for c, g in zip(self.coefficients, B.vectors()):
                if c:
                    acc = _vec_add(acc, _vec_scale(g, c) if B.backend[0] == "Z" else _gf_scale_vec(g, c))
            return acc == B.space.as_vec(v)
        return self.certificate.verify(self.system)


def _gf_scale_vec(v, c):
    """Scale by a field constant ``c`` coordinatewise, so nested rings work too."""
    out = []
    for m in v:
        R = m.ring
        mul, _ = _gf_tables(R.backend[1])
        out.append(m.map_data(lambda a: R.from_coords({k: mul[c][x] for k, x in R.coords(a).items()})))
    return tuple(out)


def _generator_system(B: SubmoduleBasis) -> FlatSystem:
    rows = list(B.coords)
    row_index = {c: k for k, c in enumerate(rows)}
    gf = B.backend[0] == "GF"
    sysm = FlatSystem(
        backend=B.backend,
        degree=B.degree,
        rows=rows,
        cols=[("gen", k) for k in range(len(B.generators))],
        columns=[{row_index[c]: x for c, x in g.items()} for g in B.generators],
        rhs={},
        row_moduli=[0 if gf else B.space.modulus(c) for c in rows],
        col_moduli=[0] * len(B.generators),
        domain=None,
        codomain=B.space,
        row_index=row_index,
    )
    return sysm


def membership(v, B: SubmoduleBasis) -> MembershipResult:
    """Decide ``v in B`` with coefficients or an unsolvability certificate."""
    sysm = _generator_system(B)
    coords = B.space.coords_of(v)
    gf = B.backend[0] == "GF"
    sysm.set_rhs(coords, (lambda c: 0) if gf else B.space.modulus)
    x, cert, _ = _solve(sysm, want_kernel=False)
    if cert is not None:
        cert = _simplify_certificate(sysm, cert)
        if not cert.verify(sysm):
            raise LinalgError("internal error: membership certificate failed to verify")
        return MembershipResult(False, None, cert, sysm)
    coeffs = [x.get(j, 0) for j in range(len(B.generators))]
    if not gf:
        coeffs = [c % a if a else c for c, a in zip(coeffs, B.annihilators)]
    return MembershipResult(True, coeffs, None, sysm)


@dataclass
class CombinationResult:
    """Coefficients ``t`` with ``sum t_k vectors[k] = target``, or a certificate."""

    solvable: bool
    coefficients: list | None
    certificate: Certificate | None
    system: FlatSystem

    def __bool__(self):
        return self.solvable


def solve_combination(space: ModuleSpace, vectors: list[dict], target: dict) -> CombinationResult:
    """Express ``target`` through ``vectors`` (all given as coordinate dicts of ``space``)."""
    gf = space.backend[0] == "GF"
    rows: list = []
    seen: set = set()
    for v in list(vectors) + [target]:
        for c in v:
            if c not in seen:
                seen.add(c)
                rows.append(c)
    row_index = {c: k for k, c in enumerate(rows)}
    sysm = FlatSystem(
        backend=space.backend,
        degree=None,
        rows=rows,
        cols=list(range(len(vectors))),
        columns=[{row_index[c]: x for c, x in v.items() if x} for v in vectors],
        rhs={},
        row_moduli=[0 if gf else space.modulus(c) for c in rows],
        col_moduli=[0] * len(vectors),
        codomain=space,
        row_index=row_index,
    )
    sysm.set_rhs(target, (lambda c: 0) if gf else space.modulus)
    x, cert, _ = _solve(sysm, want_kernel=False)
    if cert is not None:
        cert = _simplify_certificate(sysm, cert)
        if not cert.verify(sysm):
            raise LinalgError("internal error: combination certificate failed to verify")
        return CombinationResult(False, None, cert, sysm)
    return CombinationResult(True, [x.get(j, 0) for j in range(len(vectors))], None, sysm)


def contains(B: SubmoduleBasis, C: SubmoduleBasis) -> bool:
    """``C`` is a submodule of ``B``."""
    return all(membership(v, B).member for v in C.vectors())


def intersection(B1: SubmoduleBasis, B2: SubmoduleBasis) -> SubmoduleBasis:
    """Generators of ``B1 ∩ B2`` (integer or field backend)."""
    if B1.space != B2.space:
        raise LinalgError("intersection of submodules of different spaces")
    space = B1.space
    coords = sorted(set(B1.coords) | set(B2.coords), key=lambda c: (B1._index.get(c, 10**9), repr(c)))
    row_index = {c: k for k, c in enumerate(coords)}
    gf = space.backend[0] == "GF"
    cols = []
    for g in B1.generators:
        cols.append({row_index[c]: x for c, x in g.items()})
    n1 = len(cols)
    for g in B2.generators:
        if gf:
            cols.append({row_index[c]: x for c, x in g.items()})
        else:
            cols.append({row_index[c]: -x for c, x in g.items()})
    sysm = FlatSystem(
        backend=space.backend,
        degree=B1.degree,
        rows=coords,
        cols=list(range(len(cols))),
        columns=cols,
        rhs={},
        row_moduli=[0 if gf else space.modulus(c) for c in coords],
        col_moduli=[0] * len(cols),
        row_index=row_index,
    )
    _, _, kern = _solve(sysm, want_kernel=True)
    vecs = []
    for vec in kern:
        acc: dict = {}
        for j, f in vec.items():
            if j >= n1:
                continue
            for c, x in B1.generators[j].items():
                if gf:
                    mul, _ = _gf_tables(space.backend[1])
                    acc[c] = acc.get(c, 0) ^ mul[f][x]
                else:
                    acc[c] = acc.get(c, 0) + f * x
        vecs.append({c: x for c, x in acc.items() if x})
    return _make_submodule(space, B1.degree, vecs, relations=[])
