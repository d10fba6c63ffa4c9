"""Chain, mixed and parachain complexes, para-S-modules, C^♮ and homology."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from ..errors import IdentityViolation, NotCyclic
from ..linalg import (SparseMatrix, Subquotient, Subspace, block_matrix, image, induced_map, inverse, kernel,
                      rank)
from .graded import GradedMap, GradedModule, require_equal, require_zero


def _identity_like(spaces: GradedModule) -> GradedMap:
    return GradedMap.identity(spaces)


class ChainComplex:
    """(C_•, d) truncated at N; d is keyed by source degree 1..N."""

    def __init__(self, spaces: GradedModule, d: GradedMap, check: bool = True):
        self.spaces = spaces
        self.d = d
        for m in range(1, spaces.N + 1):
            if m not in d:
                raise ValueError(f"missing differential in degree {m}")
            if d[m].shape != (spaces.dim(m - 1), spaces.dim(m)):
                raise ValueError(f"differential in degree {m} has shape {d[m].shape}")
        if check:
            self.check()

    @property
    def N(self) -> int:
        return self.spaces.N

    def check(self):
        for m in range(2, self.N + 1):
            require_zero("d∘d = 0", m, self.d[m - 1] @ self.d[m], self.spaces)

    def diff(self, m: int) -> SparseMatrix:
        """d_m with the conventions d_0 = 0 and d_{N+1} = 0 (truncated complex)."""
        if 1 <= m <= self.N:
            return self.d[m]
        return SparseMatrix.zero(self.spaces.dim(m - 1), self.spaces.dim(m))


class HomologyTable:
    """Homology of a truncated chain complex on the reliable range 0..N-1.

    Dimensions come from ranks alone; canonical cycle representatives are
    computed on demand (kernels are much more expensive than ranks).
    """

    def __init__(self, C: ChainComplex, name: str = ""):
        self.complex = C
        self.name = name
        self.N = C.N
        self._ranks: dict[int, int] = {}
        self._sq: dict[int, Subquotient] = {}
        self.dims = tuple(self.dim(n) for n in range(self.N))

    @property
    def reliable(self) -> range:
        return range(self.N)

    def rank_d(self, m: int) -> int:
        if m < 1 or m > self.N:
            return 0
        if m not in self._ranks:
            self._ranks[m] = rank(self.complex.d[m])
        return self._ranks[m]

    def dim(self, n: int) -> int:
        return self.complex.spaces.dim(n) - self.rank_d(n) - self.rank_d(n + 1)

    def cycles(self, n: int) -> Subspace:
        if n == 0:
            return Subspace.whole(self.complex.spaces.dim(0))
        return kernel(self.complex.d[n])

    def boundaries(self, n: int) -> Subspace:
        if n + 1 > self.N:
            return Subspace.zero(self.complex.spaces.dim(n))
        return image(self.complex.d[n + 1])

    def subquotient(self, n: int) -> Subquotient:
        if n not in self._sq:
            self._sq[n] = Subquotient(self.cycles(n), self.boundaries(n), check=False)
        return self._sq[n]

    def representatives(self, n: int) -> tuple:
        return self.subquotient(n).representatives

    def rep_labels(self, n: int) -> list[str]:
        labels = self.complex.spaces.labels[n]
        out = []
        for v in self.representatives(n):
            terms = []
            for j in sorted(v):
                c = v[j]
                terms.append(f"{c}*{labels[j]}" if c != 1 else labels[j])
            out.append(" + ".join(terms))
        return out

    def to_dict(self, representatives: bool = False) -> dict:
        out = {"name": self.name, "truncation": self.N, "reliable_degrees": list(self.reliable), "dims": list(self.dims)}
        if representatives:
            out["representatives"] = {str(n): self.rep_labels(n) for n in self.reliable}
        return out

    def to_json(self, representatives: bool = False) -> str:
        return json.dumps(self.to_dict(representatives), sort_keys=True, indent=2)

    def to_csv(self, representatives: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "dimension", "representatives"] if representatives else ["degree", "dimension"])
        for n in self.reliable:
            row = [n, self.dims[n]]
            if representatives:
                row.append(" | ".join(self.rep_labels(n)))
            w.writerow(row)
        return buf.getvalue()

    def __repr__(self):
        return f"HomologyTable({self.name!r}, dims={self.dims})"


def homology(C: ChainComplex, name: str = "") -> HomologyTable:
    return HomologyTable(C, name)


def induced_homology_map(f: SparseMatrix, Hs: HomologyTable, Ht: HomologyTable, n: int, degree: int = 0) -> SparseMatrix:
    """Matrix of the map H_n(source) -> H_{n+degree}(target) induced by a chain map f."""
    m = n + degree
    return induced_map(f, Hs.cycles(n), Hs.boundaries(n), Ht.cycles(m), Ht.boundaries(m),
                       Hs.subquotient(n), Ht.subquotient(m))


def check_chain_map(f: GradedMap, src_d: GradedMap, dst_d: GradedMap, spaces: GradedModule | None = None,
                    name: str = "f∘d = d∘f", exc=None):
    """f ∘ d_src = d_dst ∘ f wherever both sides are defined."""
    from ..errors import NotAChainMap

    exc = exc or NotAChainMap
    for m in sorted(f.mats):
        if m - 1 + f.degree < 0 or (m - 1) not in f.mats or m not in src_d.mats:
            continue
        dd = dst_d.get(m + f.degree)
        if dd is None:
            continue
        require_equal(name, m, f[m - 1] @ src_d[m], dd @ f[m], spaces, exc)


class ParachainComplex:
    """(C, b, B, T) with b² = B² = 0 and bB + Bb = 1 − T, T invertible and central."""

    def __init__(self, spaces: GradedModule, b: GradedMap, B: GradedMap, T: GradedMap | None = None, check: bool = True):
        self.spaces = spaces
        self.b = b
        self.B = B
        self.T = T if T is not None else _identity_like(spaces)
        N = spaces.N
        for m in range(1, N + 1):
            if b[m].shape != (spaces.dim(m - 1), spaces.dim(m)):
                raise ValueError(f"b in degree {m} has wrong shape")
        for m in range(0, N):
            if B[m].shape != (spaces.dim(m + 1), spaces.dim(m)):
                raise ValueError(f"B in degree {m} has wrong shape")
        if check:
            self.check()

    @property
    def N(self) -> int:
        return self.spaces.N

    def is_mixed(self) -> bool:
        return all(self.T[m].is_identity() for m in range(self.N + 1))

    def bB_plus_Bb(self, m: int) -> SparseMatrix:
        """bB + Bb on C_m (needs m ≤ N−1)."""
        out = self.b[m + 1] @ self.B[m]
        if m >= 1:
            out = out + self.B[m - 1] @ self.b[m]
        return out

    def check(self):
        sp, N = self.spaces, self.N
        b, B, T = self.b, self.B, self.T
        for m in range(2, N + 1):
            require_zero("b² = 0", m, b[m - 1] @ b[m], sp)
        for m in range(0, N - 1):
            require_zero("B² = 0", m, B[m + 1] @ B[m], sp)
        for m in range(0, N):
            one = SparseMatrix.identity(sp.dim(m))
            require_equal("bB + Bb = 1 − T", m, self.bB_plus_Bb(m), one - T[m], sp)
        for m in range(0, N + 1):
            Tm = T[m]
            if not (Tm.is_monomial() and Tm.nnz == sp.dim(m)) and rank(Tm) != sp.dim(m):
                raise IdentityViolation(f"T not invertible in degree {m}", identity="T invertible")
        for m in range(1, N + 1):
            require_equal("Tb = bT", m, T[m - 1] @ b[m], b[m] @ T[m], sp)
        for m in range(0, N):
            require_equal("TB = BT", m, T[m + 1] @ B[m], B[m] @ T[m], sp)

    def hochschild(self) -> ChainComplex:
        return ChainComplex(self.spaces, self.b, check=False)

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.spaces.dims})"


class MixedComplex(ParachainComplex):
    """(C, b, B) with b² = B² = bB + Bb = 0."""

    def __init__(self, spaces: GradedModule, b: GradedMap, B: GradedMap, check: bool = True):
        super().__init__(spaces, b, B, None, check=check)


def as_mixed(P: ParachainComplex, check: bool = False) -> MixedComplex:
    if not P.is_mixed():
        raise IdentityViolation("parachain complex has T ≠ 1", identity="T = 1")
    return MixedComplex(P.spaces, P.b, P.B, check=check)


class ParaSModule:
    """(C, d, S, T) with dS = Sd, dT = Td, ST = TS and d² = (1 − T)S."""

    def __init__(self, spaces: GradedModule, d: GradedMap, S: GradedMap, T: GradedMap | None = None, check: bool = True):
        self.spaces = spaces
        self.d = d
        self.S = S
        self.T = T if T is not None else _identity_like(spaces)
        if check:
            self.check()

    @property
    def N(self) -> int:
        return self.spaces.N

    def check(self):
        sp, N, d, S, T = self.spaces, self.N, self.d, self.S, self.T
        for m in range(2, N + 1):
            lhs = d[m - 1] @ d[m]
            one = SparseMatrix.identity(sp.dim(m - 2))
            require_equal("d² = (1 − T)S", m, lhs, (one - T[m - 2]) @ S[m], sp)
        for m in range(3, N + 1):
            require_equal("dS = Sd", m, d[m - 2] @ S[m], S[m - 1] @ d[m], sp)
        for m in range(1, N + 1):
            require_equal("dT = Td", m, d[m] @ T[m], T[m - 1] @ d[m], sp)
        for m in range(2, N + 1):
            require_equal("ST = TS", m, S[m] @ T[m], T[m - 2] @ S[m], sp)

    def is_s_module(self) -> bool:
        return all(self.T[m].is_identity() for m in range(self.N + 1))

    def chain_complex(self, check: bool = True) -> ChainComplex:
        """The underlying chain complex; requires d² = 0."""
        return ChainComplex(self.spaces, self.d, check=check)


# -- the cyclic complex ---------------------------------------------------

def natural_slots(dims_fn, m: int) -> list[tuple[int, int, int]]:
    """(j, degree m−2j, offset) for the summands of C^♮_m."""
    out, off = [], 0
    j = 0
    while m - 2 * j >= 0:
        out.append((j, m - 2 * j, off))
        off += dims_fn(m - 2 * j)
        j += 1
    return out


def cyclic_complex(M: ParachainComplex) -> ParaSModule:
    """C^♮_m = C_m ⊕ C_{m−2} ⊕ … with d = b + BS and S dropping the top summand."""
    sp, N = M.spaces, M.N
    dim = sp.dim
    labels, slots = [], {}
    for m in range(N + 1):
        slots[m] = natural_slots(dim, m)
        lab = []
        for j, k, _ in slots[m]:
            lab.extend(sp.labels[k] if j == 0 else [f"S^{j}[{x}]" for x in sp.labels[k]])
        labels.append(lab)
    spaces = GradedModule(labels)
    d, S, T = {}, {}, {}
    for m in range(N + 1):
        src = slots[m]
        T[m] = block_matrix(len(labels[m]), len(labels[m]), [(off, off, M.T[k]) for _, k, off in src])
        if m >= 1:
            tgt = {j: off for j, _, off in slots[m - 1]}
            blocks = []
            for j, k, off in src:
                if k >= 1:
                    blocks.append((tgt[j], off, M.b[k]))
                if j >= 1:
                    blocks.append((tgt[j - 1], off, M.B[k]))
            d[m] = block_matrix(len(labels[m - 1]), len(labels[m]), blocks)
        if m >= 2:
            tgt = {j: off for j, _, off in slots[m - 2]}
            S[m] = block_matrix(len(labels[m - 2]), len(labels[m]),
                                [(tgt[j - 1], off, SparseMatrix.identity(dim(k))) for j, k, off in src if j >= 1])
    return ParaSModule(spaces, GradedMap(-1, d), GradedMap(-2, S), GradedMap(0, T))


def cyclic_homology(M: ParachainComplex, name: str = "") -> HomologyTable:
    """HC of a mixed complex as the homology of C^♮."""
    if not M.is_mixed():
        raise IdentityViolation("cyclic homology requested for a parachain complex with T ≠ 1", identity="T = 1")
    return homology(cyclic_complex(M).chain_complex(check=False), name)


def natural_map(f: GradedMap, src: ParachainComplex, dst: ParachainComplex) -> GradedMap:
    """f^♮ on cyclic complexes induced by a degree-0 map commuting with b, B."""
    out = {}
    for m in range(min(src.N, dst.N) + 1):
        ss = natural_slots(src.spaces.dim, m)
        ts = natural_slots(dst.spaces.dim, m)
        nr = sum(dst.spaces.dim(k) for _, k, _ in ts)
        nc = sum(src.spaces.dim(k) for _, k, _ in ss)
        out[m] = block_matrix(nr, nc, [(to, so, f[k]) for (j, k, so), (_, _, to) in zip(ss, ts)])
    return GradedMap(0, out)


def check_parachain_map(f: GradedMap, src: ParachainComplex, dst: ParachainComplex, exc=None, name: str = "f"):
    """f commutes with b, B and T."""
    from ..errors import NotAParachainMap

    exc = exc or NotAParachainMap
    N = min(src.N, dst.N)
    for m in range(1, N + 1):
        require_equal(f"{name}∘b = b∘{name}", m, f[m - 1] @ src.b[m], dst.b[m] @ f[m], src.spaces, exc)
    for m in range(0, N):
        require_equal(f"{name}∘B = B∘{name}", m, f[m + 1] @ src.B[m], dst.B[m] @ f[m], src.spaces, exc)
    for m in range(0, N + 1):
        require_equal(f"{name}∘T = T∘{name}", m, f[m] @ src.T[m], dst.T[m] @ f[m], src.spaces, exc)


def homology_isomorphism_ranks(f: GradedMap, Hs: HomologyTable, Ht: HomologyTable, degrees) -> dict:
    """For each degree: (dim source, dim target, rank of induced map)."""
    out = {}
    for n in degrees:
        M = induced_homology_map(f[n], Hs, Ht, n)
        out[n] = (Hs.dims[n], Ht.dims[n], rank(M))
    return out


def is_iso_report(report: dict) -> bool:
    return all(a == b == r for a, b, r in report.values())


# -- Connes' λ-complex ------------------------------------------------------

def lambda_complex(P) -> ChainComplex:
    """C^λ_m = C_m / ran(1 − τ), τ = (−1)^m t, with the induced Hochschild b.

    ``P`` is any cyclic module view: it needs ``spaces``, ``t`` and
    ``hochschild_b()``.
    """
    sp, N = P.spaces, P.spaces.N
    b = P.hochschild_b()
    quots, labels = [], []
    for m in range(N + 1):
        n = sp.dim(m)
        tm = P.t[m]
        tp = tm
        for _ in range(m):
            tp = tp @ tm
        if not tp.is_identity():
            raise NotCyclic(f"t^{m + 1} ≠ 1 in degree {m}", witness={"degree": m})
        tau = tm.scale((-1) ** m)
        Bm = image(SparseMatrix.identity(n) - tau)
        Q = Subquotient(Subspace.whole(n), Bm, check=False)
        quots.append(Q)
        labels.append([f"[{sp.labels[m][Q.Q.pivots[k]]}]" for k in range(Q.dim)])
    d = {}
    for m in range(1, N + 1):
        d[m] = induced_map(b[m], quots[m].Z, quots[m].B, quots[m - 1].Z, quots[m - 1].B, quots[m], quots[m - 1])
    return ChainComplex(GradedModule(labels), GradedMap(-1, d))


# -- periodicity -----------------------------------------------------------

def s_stabilization(P: ParaSModule, name: str = "") -> tuple[HomologyTable, dict]:
    """Homology of an S-module with the matrices of S on it, plus an HP estimate.

    HP_i counts as stabilized when the two top applicable maps
    S: H_{n+2} → H_n of parity i in the reliable range are isomorphisms; the
    estimate is then dim H of the top degree of that parity.
    """
    if not P.is_s_module():
        raise IdentityViolation("s_stabilization needs T = 1", identity="T = 1")
    H = homology(P.chain_complex(check=False), name)
    top = H.N - 1
    maps = {}
    for n in range(0, top - 1):
        M = induced_homology_map(P.S[n + 2], H, H, n + 2, degree=-2)
        maps[n + 2] = M
    hp = {}
    for parity in (0, 1):
        ntop = top if top % 2 == parity else top - 1
        entry = {"top_degree": ntop, "stabilized": False, "estimate": None}
        if ntop - 4 >= 0:
            isos = []
            for n in (ntop, ntop - 2):
                M = maps[n]
                isos.append(H.dims[n] == H.dims[n - 2] == rank(M))
            if all(isos):
                entry["stabilized"] = True
                entry["estimate"] = H.dims[ntop]
        if not entry["stabilized"]:
            entry["note"] = f"inconclusive at truncation N = {H.N}"
        hp[parity] = entry
    ranks = {n: rank(M) for n, M in maps.items()}
    return H, {"hp": hp, "s_maps": maps, "s_ranks": ranks}
