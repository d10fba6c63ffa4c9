"""Sparse exact linear algebra over the rationals.

Everything downstream (homology, induced maps, spectral sequences) reduces
to the handful of routines here.  Scalars are ``fractions.Fraction``; the
elimination kernels work on integer rows (fraction-free, content-reduced)
and only normalise to fractions at the end.

Canonical subspace form: every ``Subspace`` basis vector carries a pivot,
its *last* nonzero coordinate, equal to 1, and every other basis vector
vanishes at that pivot.  This is reduced echelon form for the reversed
coordinate order.  It has two pleasant consequences: kernel bases read off
a row-reduced matrix are already canonical, and the coordinates of a member
vector are just its entries at the pivots.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

from .errors import NotAChainMapOnSubspaces, NotContained

Vector = dict  # column index -> Fraction, no zeros stored


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SparseMatrix:
    """Immutable sparse rational matrix stored row-wise."""

    __slots__ = ("nrows", "ncols", "_rows", "_hash")

    def __init__(self, nrows: int, ncols: int, rows: Mapping[int, Mapping[int, Fraction]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        if rows:
            for i, row in rows.items():
                r = {j: _frac(v) for j, v in row.items() if v}
                if r:
                    if not 0 <= i < nrows or not all(0 <= j < ncols for j in r):
                        raise IndexError(f"entry out of range in {nrows}x{ncols} matrix (row {i})")
                    clean[i] = r
        self._rows = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def _trusted(cls, nrows, ncols, rows):
        m = cls.__new__(cls)
        m.nrows, m.ncols, m._rows, m._hash = nrows, ncols, rows, None
        return m

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int, object]]):
        """Build from (i, j, value) triples; repeated positions are summed."""
        rows: dict[int, dict[int, Fraction]] = {}
        for i, j, v in entries:
            if not v:
                continue
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i},{j}) out of range for {nrows}x{ncols}")
            r = rows.setdefault(i, {})
            r[j] = r.get(j, 0) + v
        return cls._trusted(nrows, ncols, _drop_zeros(rows))

    @classmethod
    def from_columns(cls, nrows: int, columns: list[Mapping[int, object]]):
        return cls.from_entries(nrows, len(columns), ((i, j, v) for j, col in enumerate(columns) for i, v in col.items()))

    @classmethod
    def from_dense(cls, data):
        data = [list(r) for r in data]
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        return cls.from_entries(nrows, ncols, ((i, j, _frac(v)) for i, r in enumerate(data) for j, v in enumerate(r)))

    @classmethod
    def zero(cls, nrows: int, ncols: int):
        return cls._trusted(nrows, ncols, {})

    @classmethod
    def identity(cls, n: int):
        one = Fraction(1)
        return cls._trusted(n, n, {i: {i: one} for i in range(n)})

    @classmethod
    def monomial(cls, nrows: int, images: list[tuple[int, object] | None]):
        """Matrix sending basis vector j to coef * e_row for images[j] = (row, coef)."""
        return cls.from_entries(nrows, len(images), ((im[0], j, im[1]) for j, im in enumerate(images) if im is not None))

    # access -----------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def row(self, i: int) -> dict:
        return dict(self._rows.get(i, {}))

    def row_items(self):
        return self._rows.items()

    def entries(self) -> list[tuple[int, int, Fraction]]:
        """Canonical row-major entry list."""
        return [(i, j, self._rows[i][j]) for i in sorted(self._rows) for j in sorted(self._rows[i])]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows.get(i, {}).get(j, Fraction(0))

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, r in self._rows.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def columns(self) -> list[dict]:
        cols: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in self._rows.items():
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def column(self, j: int) -> dict:
        return {i: r[j] for i, r in self._rows.items() if j in r}

    # arithmetic -------------------------------------------------------
    @property
    def T(self) -> "SparseMatrix":
        rows: dict[int, dict[int, Fraction]] = {}
        for i, r in self._rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return SparseMatrix._trusted(self.ncols, self.nrows, rows)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        rows = {}
        for i, r in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in r.items():
                ok = orows.get(k)
                if ok is None:
                    continue
                for j, b in ok.items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                rows[i] = acc
        return SparseMatrix._trusted(self.nrows, other.ncols, rows)

    def _combine(self, other: "SparseMatrix", sign: int) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            tgt = rows.setdefault(i, {})
            for j, v in r.items():
                w = tgt.get(j, 0) + sign * v
                if w:
                    tgt[j] = w
                else:
                    tgt.pop(j, None)
            if not tgt:
                del rows[i]
        return SparseMatrix._trusted(self.nrows, self.ncols, rows)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "SparseMatrix":
        c = _frac(c)
        if not c:
            return SparseMatrix.zero(self.nrows, self.ncols)
        return SparseMatrix._trusted(self.nrows, self.ncols, {i: {j: c * v for j, v in r.items()} for i, r in self._rows.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def apply(self, vec: Mapping[int, Fraction]) -> dict:
        """Matrix times a sparse column vector."""
        out: dict[int, Fraction] = {}
        if not vec:
            return out
        for i, r in self._rows.items():
            s = 0
            if len(r) < len(vec):
                for j, a in r.items():
                    v = vec.get(j)
                    if v:
                        s += a * v
            else:
                for j, v in vec.items():
                    a = r.get(j)
                    if a:
                        s += a * v
            if s:
                out[i] = _frac(s)
        return out

    def restrict(self, rows: list[int] | None = None, cols: list[int] | None = None) -> "SparseMatrix":
        """Submatrix on the given row and column index lists (in that order)."""
        rmap = {r: k for k, r in enumerate(rows)} if rows is not None else None
        cmap = {c: k for k, c in enumerate(cols)} if cols is not None else None
        out = {}
        for i, r in self._rows.items():
            if rmap is not None:
                if i not in rmap:
                    continue
                ii = rmap[i]
            else:
                ii = i
            if cmap is None:
                nr = dict(r)
            else:
                nr = {cmap[j]: v for j, v in r.items() if j in cmap}
            if nr:
                out[ii] = nr
        return SparseMatrix._trusted(len(rows) if rows is not None else self.nrows,
                                     len(cols) if cols is not None else self.ncols, out)

    def is_zero(self) -> bool:
        return not self._rows

    def is_identity(self) -> bool:
        if self.nrows != self.ncols or len(self._rows) != self.nrows:
            return False
        return all(len(r) == 1 and r.get(i) == 1 for i, r in self._rows.items())

    def first_nonzero(self) -> tuple[int, int, Fraction] | None:
        """Smallest (column, row) position holding a nonzero entry; used as a witness."""
        best = None
        for i, r in self._rows.items():
            for j, v in r.items():
                if best is None or (j, i) < (best[1], best[0]):
                    best = (i, j, v)
        return best

    def is_monomial(self) -> bool:
        """At most one nonzero per row and per column."""
        seen = set()
        for r in self._rows.values():
            if len(r) != 1:
                return False
            (j,) = r
            if j in seen:
                return False
            seen.add(j)
        return True

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, tuple(self.entries())))
        return self._hash

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def _drop_zeros(rows):
    out = {}
    for i, r in rows.items():
        r = {j: _frac(v) for j, v in r.items() if v}
        if r:
            out[i] = r
    return out


def block_matrix(nrows: int, ncols: int, blocks: Iterable[tuple[int, int, SparseMatrix]]) -> SparseMatrix:
    """Assemble a matrix from (row offset, col offset, block) pieces; overlaps add."""
    rows: dict[int, dict[int, Fraction]] = {}
    for ro, co, blk in blocks:
        for i, r in blk.row_items():
            tgt = rows.setdefault(ro + i, {})
            for j, v in r.items():
                tgt[co + j] = tgt.get(co + j, 0) + v
    return SparseMatrix._trusted(nrows, ncols, _drop_zeros(rows))


def inverse(M: SparseMatrix) -> SparseMatrix:
    """Exact inverse of a square matrix; ValueError if singular."""
    n = M.nrows
    if n != M.ncols:
        raise ValueError("inverse of non-square matrix")
    if M.is_monomial() and len(M._rows) == n:
        return SparseMatrix._trusted(n, n, {j: {i: 1 / v} for i, r in M._rows.items() for j, v in r.items()})
    # row-reduce [M | I]
    aug = []
    for i in range(n):
        r = dict(M._rows.get(i, {}))
        r[n + i] = Fraction(1)
        aug.append(r)
    red = _rref_fraction(aug, 2 * n)
    if len(red) < n or any(p != k for k, (p, _) in enumerate(red[:n])):
        raise ValueError("matrix is singular")
    return SparseMatrix._trusted(n, n, {k: {j - n: v for j, v in row.items() if j >= n} for k, (p, row) in enumerate(red)})


# -- elimination kernels --------------------------------------------------

def _int_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    if den == 1:
        return {j: int(v) for j, v in row.items()}
    return {j: int(v * den) for j, v in row.items()}


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def rank(M: SparseMatrix) -> int:
    """Exact rank.

    Left-looking fraction-free elimination.  Rows are fed sparsest first and
    each reduced row pivots on its entry whose column is least populated
    (a static Markowitz cost), which keeps fill-in low on chain differentials.
    """
    if M.nrows == 0 or M.ncols == 0:
        return 0
    # eliminate along the shorter side
    A = M if M.nrows <= M.ncols else M.T
    colcount: dict[int, int] = {}
    for r in A._rows.values():
        for j in r:
            colcount[j] = colcount.get(j, 0) + 1
    order = sorted(A._rows, key=lambda i: (len(A._rows[i]), i))
    pivots: dict[int, tuple[int, dict[int, int]]] = {}  # col -> (stamp, row)
    for i in order:
        row = _primitive(_int_row(A._rows[i]))
        heap = [(pivots[j][0], j) for j in row if j in pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            a = row.get(c)
            if not a:
                continue
            prow = pivots[c][1]
            p = prow[c]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {j: v * fa for j, v in row.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - fp * v
                if w:
                    if j not in new and j in pivots:
                        heapq.heappush(heap, (pivots[j][0], j))
                    new[j] = w
                else:
                    new.pop(j, None)
            row = _primitive(new)
            if not row:
                break
        if row:
            c = min(row, key=lambda j: (colcount.get(j, 0), j))
            pivots[c] = (len(pivots), row)
    return len(pivots)


def _echelon_int(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, dict[int, int]]:
    """Fraction-free echelon form keyed by leading (smallest) column."""
    piv: dict[int, dict[int, int]] = {}
    for src in sorted(rows, key=len):
        if not src:
            continue
        row = _primitive(_int_row(src))
        while row:
            c = min(row)
            prow = piv.get(c)
            if prow is None:
                piv[c] = row
                break
            a, p = row[c], prow[c]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {j: v * fa for j, v in row.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - fp * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            row = _primitive(new)
    return piv


def _rref_from_echelon(piv: dict[int, dict[int, int]]) -> list[tuple[int, dict[int, Fraction]]]:
    done: dict[int, dict[int, Fraction]] = {}
    for c in sorted(piv, reverse=True):
        row = piv[c]
        lead = row[c]
        r = {j: Fraction(v, lead) for j, v in row.items()}
        for j in sorted(k for k in r if k != c and k in done):
            a = r.get(j)
            if not a:
                continue
            for k, v in done[j].items():
                w = r.get(k, 0) - a * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
        done[c] = r
    return [(c, done[c]) for c in sorted(done)]


def _rref_fraction(rows, ncols) -> list[tuple[int, dict[int, Fraction]]]:
    return _rref_from_echelon(_echelon_int(rows))


def rref(M: SparseMatrix) -> list[tuple[int, dict[int, Fraction]]]:
    """Reduced row echelon form of M: list of (pivot column, row) with pivot 1."""
    return _rref_fraction(M._rows.values(), M.ncols)


class Subspace:
    """A subspace of Q^n in canonical form (see module docstring)."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_pivset")

    def __init__(self, ambient_dim: int, basis: list[dict], pivots: list[int]):
        self.ambient_dim = ambient_dim
        self.basis = tuple(basis)
        self.pivots = tuple(pivots)
        self._pivset = dict(zip(pivots, range(len(pivots))))

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping[int, object]]) -> "Subspace":
        n = ambient_dim
        flipped = [{n - 1 - j: _frac(v) for j, v in vec.items() if v} for vec in vectors]
        red = _rref_fraction([f for f in flipped if f], n)
        basis, pivots = [], []
        for c, row in reversed(red):
            basis.append({n - 1 - j: v for j, v in row.items()})
            pivots.append(n - 1 - c)
        return cls(n, basis, pivots)

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        one = Fraction(1)
        return cls(n, [{i: one} for i in range(n)], list(range(n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, [], [])

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        one = Fraction(1)
        return cls(n, [{i: one} for i in idx], idx)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, vec: Mapping[int, Fraction]) -> dict:
        """Residual of vec modulo this subspace (zero at every pivot)."""
        out = dict(vec)
        for p, k in self._pivset.items():
            a = out.get(p)
            if a:
                for j, v in self.basis[k].items():
                    w = out.get(j, 0) - a * v
                    if w:
                        out[j] = w
                    else:
                        out.pop(j, None)
        return out

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: Mapping[int, Fraction]) -> list[Fraction]:
        """Coordinates of a member vector in the canonical basis."""
        return [_frac(vec.get(p, 0)) for p in self.pivots]

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace.span(self.ambient_dim, list(self.basis) + list(other.basis))

    def matrix(self) -> SparseMatrix:
        """Columns are the basis vectors."""
        return SparseMatrix.from_columns(self.ambient_dim, list(self.basis))

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim and self.pivots == other.pivots and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim} in Q^{self.ambient_dim})"


def kernel(M: SparseMatrix) -> Subspace:
    """Canonical basis of {v : Mv = 0}."""
    red = rref(M)
    pivcols = {c for c, _ in red}
    one = Fraction(1)
    vecs: dict[int, dict[int, Fraction]] = {f: {f: one} for f in range(M.ncols) if f not in pivcols}
    for c, row in red:
        for j, v in row.items():
            if j != c:
                vecs[j][c] = -v
    free = sorted(vecs)
    return Subspace(M.ncols, [vecs[f] for f in free], free)


def image(M: SparseMatrix) -> Subspace:
    return Subspace.span(M.nrows, M.columns())


def image_of(M: SparseMatrix, sub: Subspace) -> Subspace:
    return Subspace.span(M.nrows, [M.apply(v) for v in sub.basis])


def subquotient_dim(Z: Subspace, B: Subspace) -> int:
    """dim Z/B, after checking that B lies in Z."""
    for k, v in enumerate(B.basis):
        if not Z.contains(v):
            raise NotContained(f"basis vector {k} of B is not in Z", witness=v)
    return Z.dim - B.dim


class Subquotient:
    """Z/B with canonical representatives.

    The residuals of Z's basis modulo B span a complement Q of B in Z; its
    canonical basis is the representative set, and the class of x in Z is
    read off by reducing x modulo B and taking entries at Q's pivots.
    """

    __slots__ = ("Z", "B", "Q")

    def __init__(self, Z: Subspace, B: Subspace, check: bool = True):
        if check:
            subquotient_dim(Z, B)
        self.Z, self.B = Z, B
        if B.dim == 0:
            self.Q = Z
        else:
            self.Q = Subspace.span(Z.ambient_dim, [B.reduce(z) for z in Z.basis])

    @property
    def dim(self) -> int:
        return self.Q.dim

    @property
    def representatives(self) -> tuple:
        return self.Q.basis

    def class_of(self, vec: Mapping[int, Fraction]) -> list[Fraction]:
        return self.Q.coordinates(self.B.reduce(vec))


def induced_map(M: SparseMatrix, srcZ: Subspace, srcB: Subspace, dstZ: Subspace, dstB: Subspace,
                src: Subquotient | None = None, dst: Subquotient | None = None) -> SparseMatrix:
    """Matrix of the map srcZ/srcB -> dstZ/dstB induced by M, in canonical bases."""
    for v in srcB.basis:
        w = M.apply(v)
        if not dstB.contains(w):
            raise NotAChainMapOnSubspaces("image of a source boundary is not a target boundary", witness=v)
    src = src or Subquotient(srcZ, srcB)
    dst = dst or Subquotient(dstZ, dstB)
    cols = []
    for v in src.representatives:
        w = M.apply(v)
        if not dstZ.contains(w):
            raise NotAChainMapOnSubspaces("image of a source cycle leaves the target subspace", witness=v)
        cols.append({i: c for i, c in enumerate(dst.class_of(w)) if c})
    return SparseMatrix.from_columns(dst.dim, cols)
