"""Paracyclic modules as (d, s, t) data, derived operators, bi-paracyclic modules,
the diagonal and the degree-zero Eilenberg–Zilber maps."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .complexes import GradedMap, GradedModule, MixedComplex, ParachainComplex, ParachainBicomplex
from .complexes.bicomplex import tot_layout
from .complexes.graded import require_equal
from .errors import IdentityViolation, NotAChainMap, NotCyclic
from .linalg import SparseMatrix, block_matrix, inverse


class ParacyclicModule:
    """(C, d, s, t): d the end face (degree −1), s the extra degeneracy (+1), t invertible.

    Faces d_j = t^j d t^{−(j+1)} and degeneracies s_j = t^{j+1} s t^{−(j+1)} are
    derived on demand.  ``twist`` (optional, per degree) is the expected value
    of t^{m+1}; for a cyclic module it is the identity.
    """

    def __init__(self, spaces: GradedModule, d: GradedMap, s: GradedMap, t: GradedMap, twist: GradedMap | None = None,
                 cyclic: bool = False, check: bool = True, name: str = ""):
        self.spaces = spaces
        self.d, self.s, self.t = d, s, t
        self.twist = twist
        self.cyclic = cyclic
        self.name = name
        self._pow: dict = {}
        self._tinv: dict = {}
        if check:
            self.check()

    @property
    def N(self) -> int:
        return self.spaces.N

    def tinv(self, m: int) -> SparseMatrix:
        if m not in self._tinv:
            self._tinv[m] = inverse(self.t[m])
        return self._tinv[m]

    def tpow(self, m: int, k: int) -> SparseMatrix:
        """t^k on C_m (k may be negative)."""
        key = (m, k)
        if key not in self._pow:
            if k == 0:
                M = SparseMatrix.identity(self.spaces.dim(m))
            elif k > 0:
                M = self.t[m] @ self.tpow(m, k - 1)
            else:
                M = self.tinv(m) @ self.tpow(m, k + 1)
            self._pow[key] = M
        return self._pow[key]

    def T(self, m: int) -> SparseMatrix:
        return self.tpow(m, m + 1)

    def face(self, m: int, j: int) -> SparseMatrix:
        """d_j : C_m → C_{m−1}."""
        return self.tpow(m - 1, j) @ self.d[m] @ self.tpow(m, -(j + 1))

    def degeneracy(self, m: int, j: int) -> SparseMatrix:
        """s_j : C_m → C_{m+1}."""
        return self.tpow(m + 1, j + 1) @ self.s[m] @ self.tpow(m, -(j + 1))

    def hochschild_b(self) -> GradedMap:
        out = {}
        for m in range(1, self.N + 1):
            acc = SparseMatrix.zero(self.spaces.dim(m - 1), self.spaces.dim(m))
            for j in range(m + 1):
                acc = acc + self.face(m, j).scale((-1) ** j)
            out[m] = acc
        return GradedMap(-1, out)

    def check(self):
        sp, N = self.spaces, self.N
        for m in range(0, N):
            require_equal("t = ds", m, self.t[m], self.d[m + 1] @ self.s[m], sp)
        for m in range(1, N + 1):
            require_equal("dT = Td", m, self.d[m] @ self.T(m), self.T(m - 1) @ self.d[m], sp)
        for m in range(0, N):
            require_equal("sT = Ts", m, self.s[m] @ self.T(m), self.T(m + 1) @ self.s[m], sp)
        for m in range(2, N + 1):
            for j in range(1, m + 1):
                for i in range(j):
                    require_equal(f"d_{i}d_{j} = d_{j - 1}d_{i}", m, self.face(m - 1, i) @ self.face(m, j),
                                  self.face(m - 1, j - 1) @ self.face(m, i), sp)
        for m in range(0, N - 1):
            for j in range(m + 1):
                for i in range(j + 1):
                    require_equal(f"s_{i}s_{j} = s_{j + 1}s_{i}", m, self.degeneracy(m + 1, i) @ self.degeneracy(m, j),
                                  self.degeneracy(m + 1, j + 1) @ self.degeneracy(m, i), sp)
        for m in range(0, N):
            one = SparseMatrix.identity(sp.dim(m))
            for j in range(m + 1):
                sj = self.degeneracy(m, j)
                for i in range(m + 2):
                    lhs = self.face(m + 1, i) @ sj
                    if i < j:
                        rhs = self.degeneracy(m - 1, j - 1) @ self.face(m, i)
                    elif i in (j, j + 1):
                        rhs = one
                    else:
                        rhs = self.degeneracy(m - 1, j) @ self.face(m, i - 1)
                    require_equal(f"d_{i}s_{j}", m, lhs, rhs, sp)
        for m in range(0, N + 1):
            if self.cyclic and not self.T(m).is_identity():
                raise NotCyclic(f"t^{m + 1} ≠ 1 in degree {m}", witness={"degree": m})
            if self.twist is not None:
                require_equal("t^{m+1} = twist", m, self.T(m), self.twist[m], sp)

    def is_cyclic(self) -> bool:
        return all(self.T(m).is_identity() for m in range(self.N + 1))

    def truncate(self, N: int) -> "ParacyclicModule":
        out = ParacyclicModule(self.spaces.truncate(N), self.d.restrict_degrees(1, N), self.s.restrict_degrees(0, N - 1),
                                self.t.restrict_degrees(0, N),
                                self.twist.restrict_degrees(0, N) if self.twist is not None else None,
                                self.cyclic, check=False, name=self.name)
        out._tinv = {m: M for m, M in self._tinv.items() if m <= N}
        out._pow = {k: M for k, M in self._pow.items() if k[0] <= N}
        return out

    def __repr__(self):
        return f"ParacyclicModule({self.name!r}, dims={self.spaces.dims})"


def derived_operators(P: ParacyclicModule) -> tuple[GradedMap, GradedMap, GradedMap]:
    """(b, B, T) of a paracyclic module.

    b = Σ (−1)^j d_j and B = (1 − τ) s' N on C_m, with τ = (−1)^m t,
    N = Σ_{i≤m} τ^i and s' = s b' s.  For cyclic inputs s' is replaced by s
    (the two give isomorphic mixed complexes; plain s fails B² = 0 once
    t^{m+1} ≠ 1).
    """
    sp, N = P.spaces, P.N
    b = P.hochschild_b()
    cyclic = P.is_cyclic()
    bp = None if cyclic else bar_differential(P)
    B = {}
    for m in range(0, N):
        n = sp.dim(m)
        tau = P.t[m].scale((-1) ** m)
        norm = SparseMatrix.identity(n)
        acc = SparseMatrix.identity(n)
        for _ in range(m):
            acc = tau @ acc
            norm = norm + acc
        ext = P.s[m] if cyclic else P.s[m] @ bp[m + 1] @ P.s[m]
        tau1 = P.t[m + 1].scale((-1) ** (m + 1))
        B[m] = (SparseMatrix.identity(sp.dim(m + 1)) - tau1) @ ext @ norm
    T = {m: P.T(m) for m in range(N + 1)}
    return b, GradedMap(1, B), GradedMap(0, T)


def derive_parachain(P: ParacyclicModule, check: bool = True) -> ParachainComplex:
    """The parachain complex (C, b, B) with T = 1 − (bB + Bb) = t^{m+1}."""
    b, B, T = derived_operators(P)
    if P.is_cyclic():
        return MixedComplex(P.spaces, b, B, check=check)
    return ParachainComplex(P.spaces, b, B, T, check=check)


def bar_differential(P: ParacyclicModule) -> GradedMap:
    """b' = Σ_{j<m} (−1)^j d_j."""
    out = {}
    for m in range(1, P.N + 1):
        acc = SparseMatrix.zero(P.spaces.dim(m - 1), P.spaces.dim(m))
        for j in range(m):
            acc = acc + P.face(m, j).scale((-1) ** j)
        out[m] = acc
    return GradedMap(-1, out)


# -- bi-paracyclic modules -------------------------------------------------------

class BiParacyclicModule:
    """Cells C_{p,q} for 0 ≤ p, q ≤ N with horizontal (d̄, s̄, t̄) and vertical (d, s, t).

    Operator dicts are keyed by source cell.  Rows (fixed q) and columns
    (fixed p) are paracyclic modules and horizontal operators commute with
    vertical ones.
    """

    def __init__(self, N: int, labels: dict, hd: dict, hs: dict, ht: dict, vd: dict, vs: dict, vt: dict,
                 check: bool = True, name: str = ""):
        self.N = N
        self.labels = {c: tuple(l) for c, l in labels.items()}
        self.hd, self.hs, self.ht = hd, hs, ht
        self.vd, self.vs, self.vt = vd, vs, vt
        self.name = name
        self._rows: dict = {}
        self._cols: dict = {}
        if check:
            self.check()

    def dim(self, p: int, q: int) -> int:
        return len(self.labels.get((p, q), ()))

    def _extent(self, cell) -> int:
        k = 0
        while cell(k + 1) in self.labels:
            k += 1
        return k

    def row(self, q: int) -> ParacyclicModule:
        if q not in self._rows:
            N = self._extent(lambda p: (p, q))
            sp = GradedModule([self.labels[(p, q)] for p in range(N + 1)])
            self._rows[q] = ParacyclicModule(sp, GradedMap(-1, {p: self.hd[(p, q)] for p in range(1, N + 1)}),
                                             GradedMap(1, {p: self.hs[(p, q)] for p in range(N)}),
                                             GradedMap(0, {p: self.ht[(p, q)] for p in range(N + 1)}), check=False,
                                             name=f"{self.name} row {q}")
        return self._rows[q]

    def column(self, p: int) -> ParacyclicModule:
        if p not in self._cols:
            N = self._extent(lambda q: (p, q))
            sp = GradedModule([self.labels[(p, q)] for q in range(N + 1)])
            self._cols[p] = ParacyclicModule(sp, GradedMap(-1, {q: self.vd[(p, q)] for q in range(1, N + 1)}),
                                             GradedMap(1, {q: self.vs[(p, q)] for q in range(N)}),
                                             GradedMap(0, {q: self.vt[(p, q)] for q in range(N + 1)}), check=False,
                                             name=f"{self.name} column {p}")
        return self._cols[p]

    def check(self):
        N = self.N
        for k in range(N + 1):
            if (0, k) in self.labels:
                self.row(k).check()
            if (k, 0) in self.labels:
                self.column(k).check()
        hops = {"d̄": (self.hd, -1), "s̄": (self.hs, 1), "t̄": (self.ht, 0)}
        vops = {"d": (self.vd, -1), "s": (self.vs, 1), "t": (self.vt, 0)}
        for (p, q) in self.labels:
            wit = GradedModule([self.labels[(p, q)]])
            for hn, (H, dh) in hops.items():
                for vn, (V, dv) in vops.items():
                    p1, q1 = p + dh, q + dv
                    if (p, q) in H and (p, q) in V and (p, q1) in H and (p1, q) in V:
                        require_equal(f"{hn}{vn} = {vn}{hn}", 0, H[(p, q1)] @ V[(p, q)], V[(p1, q)] @ H[(p, q)], wit)

    def is_cylindrical(self) -> bool:
        for (p, q) in self.labels:
            if not (self.row(q).T(p) @ self.column(p).T(q)).is_identity():
                return False
        return True

    def hface(self, p, q, j):
        return self.row(q).face(p, j)

    def vface(self, p, q, j):
        return self.column(p).face(q, j)

    def hdeg(self, p, q, j):
        return self.row(q).degeneracy(p, j)

    def vdeg(self, p, q, j):
        return self.column(p).degeneracy(q, j)

    def to_parachain_bicomplex(self, check: bool = True) -> ParachainBicomplex:
        """Rows and columns replaced by their derived (b, B, T), on cells p + q ≤ N."""
        N = self.N
        rows = {q: derived_operators(self.row(q).truncate(N - q)) for q in range(N + 1)}
        cols = {p: derived_operators(self.column(p).truncate(N - p)) for p in range(N + 1)}
        cells = [(p, q) for p in range(N + 1) for q in range(N + 1 - p)]
        labels = {c: self.labels[c] for c in cells}
        hb, hB, hT, vb, vB, vT = {}, {}, {}, {}, {}, {}
        for (p, q) in cells:
            rb, rB, rT = rows[q]
            cb, cB, cT = cols[p]
            hT[(p, q)] = rT[p]
            vT[(p, q)] = cT[q]
            if p >= 1:
                hb[(p, q)] = rb[p]
            if q >= 1:
                vb[(p, q)] = cb[q]
            if p + q + 1 <= N:
                hB[(p, q)] = rB[p]
                vB[(p, q)] = cB[q]
        return ParachainBicomplex(N, labels, hb, hB, hT, vb, vB, vT, check=check)

    def swap(self) -> "BiParacyclicModule":
        sw = lambda d: {(q, p): M for (p, q), M in d.items()}
        return BiParacyclicModule(self.N, sw(self.labels), sw(self.vd), sw(self.vs), sw(self.vt), sw(self.hd),
                                  sw(self.hs), sw(self.ht), check=False, name=f"{self.name} swapped")


def diagonal(X: BiParacyclicModule, check: bool = True) -> ParacyclicModule:
    """Diag_m = C_{m,m} with (d̄d, s̄s, t̄t)."""
    N = X.N
    sp = GradedModule([X.labels[(m, m)] for m in range(N + 1)])
    d = {m: X.hd[(m, m - 1)] @ X.vd[(m, m)] for m in range(1, N + 1)}
    s = {m: X.hs[(m, m + 1)] @ X.vs[(m, m)] for m in range(N)}
    t = {m: X.ht[(m, m)] @ X.vt[(m, m)] for m in range(N + 1)}
    P = ParacyclicModule(sp, GradedMap(-1, d), GradedMap(1, s), GradedMap(0, t), check=False, name=f"Diag {X.name}")
    cyl = X.is_cylindrical()
    P.cyclic = cyl
    if check:
        P.check()
    return P


def _tot_b(X: BiParacyclicModule) -> tuple[GradedModule, GradedMap, dict]:
    """Tot of the b-bicomplex over the full square (p, q ≤ N, p + q ≤ N)."""
    N = X.N
    offsets, labels = {}, []
    for m in range(N + 1):
        off, lab = 0, []
        for p in range(m + 1):
            offsets[(p, m - p)] = off
            off += X.dim(p, m - p)
            lab.extend(f"({p},{m - p}){x}" for x in X.labels[(p, m - p)])
        labels.append(lab)
    dims = [len(l) for l in labels]
    b = {}
    for m in range(1, N + 1):
        blocks = []
        for p in range(m + 1):
            q = m - p
            o = offsets[(p, q)]
            if p >= 1:
                blocks.append((offsets[(p - 1, q)], o, X.row(q).hochschild_b()[p]))
            if q >= 1:
                blocks.append((offsets[(p, q - 1)], o, X.column(p).hochschild_b()[q].scale((-1) ** p)))
        b[m] = block_matrix(dims[m - 1], dims[m], blocks)
    return GradedModule(labels), GradedMap(-1, b), offsets


def _shuffles(p: int, q: int):
    """(μ, ν, sign) for the (p, q)-shuffles of {0, …, p+q−1}."""
    n = p + q
    for mu in combinations(range(n), p):
        nu = tuple(k for k in range(n) if k not in mu)
        inv = sum(m - i for i, m in enumerate(mu))
        yield mu, nu, -1 if inv % 2 else 1


def shuffle(X: BiParacyclicModule) -> GradedMap:
    """Eilenberg–Zilber shuffle map Tot_m → Diag_m (degree-zero component)."""
    N = X.N
    _, _, offsets = _tot_b(X)
    out = {}
    for m in range(N + 1):
        nrow = X.dim(m, m)
        blocks = []
        for p in range(m + 1):
            q = m - p
            acc = SparseMatrix.zero(nrow, X.dim(p, q))
            for mu, nu, sign in _shuffles(p, q):
                M = SparseMatrix.identity(X.dim(p, q))
                qq = q
                for k in mu:  # vertical degeneracies raise q to m
                    M = X.vdeg(p, qq, k) @ M
                    qq += 1
                pp = p
                for k in nu:  # horizontal degeneracies raise p to m
                    M = X.hdeg(pp, m, k) @ M
                    pp += 1
                acc = acc + M.scale(sign)
            blocks.append((0, offsets[(p, q)], acc))
        out[m] = block_matrix(nrow, sum(X.dim(p, m - p) for p in range(m + 1)), blocks)
    return GradedMap(0, out)


def alexander_whitney(X: BiParacyclicModule) -> GradedMap:
    """Alexander–Whitney map Diag_m → Tot_m: front horizontal faces, back vertical faces."""
    N = X.N
    _, _, offsets = _tot_b(X)
    out = {}
    for m in range(N + 1):
        ncol = X.dim(m, m)
        blocks = []
        for p in range(m + 1):
            q = m - p
            M = SparseMatrix.identity(ncol)
            qq = m
            for _ in range(p):  # d_0 applied p times: vertical degree m → q
                M = X.vface(m, qq, 0) @ M
                qq -= 1
            pp = m
            for j in range(m, p, -1):  # d̄_m first, down to d̄_{p+1}
                M = X.hface(pp, q, j) @ M
                pp -= 1
            blocks.append((offsets[(p, q)], 0, M))
        out[m] = block_matrix(sum(X.dim(p, m - p) for p in range(m + 1)), ncol, blocks)
    return GradedMap(0, out)


def check_ez_maps(X: BiParacyclicModule):
    """Both EZ maps commute with the b-differentials of Tot and Diag."""
    sp, btot, _ = _tot_b(X)
    D = diagonal(X, check=False)
    bdiag = D.hochschild_b()
    sh, aw = shuffle(X), alexander_whitney(X)
    for m in range(1, X.N + 1):
        require_equal("shuffle∘b = b∘shuffle", m, bdiag[m] @ sh[m], sh[m - 1] @ btot[m], sp, NotAChainMap)
        require_equal("AW∘b = b∘AW", m, btot[m] @ aw[m], aw[m - 1] @ bdiag[m], D.spaces, NotAChainMap)
    return sp, btot, D, sh, aw
