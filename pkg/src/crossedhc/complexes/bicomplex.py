"""Parachain bicomplexes (including cylindrical complexes) and totalization."""
from __future__ import annotations

from ..errors import IdentityViolation, NotCylindrical
from ..linalg import SparseMatrix, block_matrix
from .chain import MixedComplex, ParachainComplex
from .graded import GradedMap, GradedModule, require_equal, require_zero

Cell = tuple  # (p, q)


class ParachainBicomplex:
    """Bigraded spaces C_{p,q}, p + q ≤ N, with horizontal (b̄, B̄, T̄) and vertical (b, B, T).

    Every operator dict is keyed by its source cell.  Horizontal b̄ goes
    (p,q) → (p−1,q), B̄ goes (p,q) → (p+1,q); vertical ones move q.  All
    horizontal operators commute with all vertical ones.
    """

    def __init__(self, N: int, labels: dict, hb: dict, hB: dict, hT: dict, vb: dict, vB: dict, vT: dict,
                 check: bool = True):
        self.N = N
        self.labels = {c: tuple(l) for c, l in labels.items()}
        self.hb, self.hB, self.hT = hb, hB, hT
        self.vb, self.vB, self.vT = vb, vB, vT
        if check:
            self.check()

    def dim(self, p: int, q: int) -> int:
        return len(self.labels.get((p, q), ()))

    def cells(self, m: int | None = None):
        if m is None:
            return sorted(self.labels)
        return [(p, m - p) for p in range(m + 1) if (p, m - p) in self.labels]

    def _spaces_for(self, c):
        return GradedModule([self.labels[c]])

    def check(self):
        N = self.N
        hb, hB, hT, vb, vB, vT = self.hb, self.hB, self.hT, self.vb, self.vB, self.vT
        for (p, q) in self.cells():
            n = self.dim(p, q)
            one = SparseMatrix.identity(n)
            wit = self._spaces_for((p, q))
            if p >= 2:
                require_zero("b̄² = 0", 0, hb[(p - 1, q)] @ hb[(p, q)], wit)
            if q >= 2:
                require_zero("b² = 0", 0, vb[(p, q - 1)] @ vb[(p, q)], wit)
            if p + q + 2 <= N:
                require_zero("B̄² = 0", 0, hB[(p + 1, q)] @ hB[(p, q)], wit)
                require_zero("B² = 0", 0, vB[(p, q + 1)] @ vB[(p, q)], wit)
            if p + q + 1 <= N:
                lhs = hb[(p + 1, q)] @ hB[(p, q)]
                if p >= 1:
                    lhs = lhs + hB[(p - 1, q)] @ hb[(p, q)]
                require_equal("b̄B̄ + B̄b̄ = 1 − T̄", 0, lhs, one - hT[(p, q)], wit)
                lhs = vb[(p, q + 1)] @ vB[(p, q)]
                if q >= 1:
                    lhs = lhs + vB[(p, q - 1)] @ vb[(p, q)]
                require_equal("bB + Bb = 1 − T", 0, lhs, one - vT[(p, q)], wit)
            # horizontal/vertical commutation
            hops = {"b̄": (hb, -1), "B̄": (hB, 1), "T̄": (hT, 0)}
            vops = {"b": (vb, -1), "B": (vB, 1), "T": (vT, 0)}
            for hn, (H, dh) in hops.items():
                for vn, (V, dv) in vops.items():
                    p1, q1 = p + dh, q + dv
                    # both composites must be representable in the truncation
                    if not ((p, q) in H and (p, q) in V and (p, q1) in H and (p1, q) in V):
                        continue
                    require_equal(f"{hn}{vn} = {vn}{hn}", 0, H[(p, q1)] @ V[(p, q)], V[(p1, q)] @ H[(p, q)], wit)

    def is_cylindrical(self) -> tuple[bool, object]:
        for c in self.cells():
            M = self.hT[c] @ self.vT[c]
            if not M.is_identity():
                diff = M - SparseMatrix.identity(self.dim(*c))
                w = diff.first_nonzero()
                return False, {"cell": list(c), "basis": self.labels[c][w[1]]}
        return True, None

    def is_mixed(self) -> bool:
        return all(self.hT[c].is_identity() and self.vT[c].is_identity() for c in self.cells())

    def transpose(self) -> "ParachainBicomplex":
        """Swap the roles of p and q (no signs)."""
        sw = lambda d: {(q, p): M for (p, q), M in d.items()}
        return ParachainBicomplex(self.N, sw(self.labels), sw(self.vb), sw(self.vB), sw(self.vT),
                                  sw(self.hb), sw(self.hB), sw(self.hT), check=False)


def tot_layout(bc: ParachainBicomplex):
    """Offsets of the cells inside Tot_m and the labels of Tot."""
    offsets, labels = {}, []
    for m in range(bc.N + 1):
        off, lab = 0, []
        for (p, q) in bc.cells(m):
            offsets[(p, q)] = off
            off += bc.dim(p, q)
            lab.extend(f"({p},{q}){x}" for x in bc.labels[(p, q)])
        labels.append(lab)
    return offsets, labels


def totalize_bicomplex(bc: ParachainBicomplex, cylindrical: bool | None = None, check: bool = True) -> ParachainComplex:
    """Tot_m = ⊕_{p+q=m} C_{p,q}, b† = b̄ + (−1)^p b, B† = B̄ + (−1)^p T̄B, T† = T̄T.

    For mixed bicomplexes T̄ = 1 and B† is the plain B̄ + (−1)^p B.  When
    T̄T = 1 (cylindrical) the result is a MixedComplex.
    """
    ok, wit = bc.is_cylindrical()
    if cylindrical and not ok:
        raise NotCylindrical("T̄T ≠ 1", witness=wit)
    N = bc.N
    off, labels = tot_layout(bc)
    dims = [len(l) for l in labels]
    b, B, T = {}, {}, {}
    for m in range(N + 1):
        tb, tB, tT = [], [], []
        for (p, q) in bc.cells(m):
            o = off[(p, q)]
            sign = -1 if p % 2 else 1
            tT.append((o, o, bc.hT[(p, q)] @ bc.vT[(p, q)]))
            if p >= 1:
                tb.append((off[(p - 1, q)], o, bc.hb[(p, q)]))
            if q >= 1:
                tb.append((off[(p, q - 1)], o, bc.vb[(p, q)].scale(sign)))
            if m + 1 <= N:
                tB.append((off[(p + 1, q)], o, bc.hB[(p, q)]))
                tB.append((off[(p, q + 1)], o, (bc.hT[(p, q + 1)] @ bc.vB[(p, q)]).scale(sign)))
        T[m] = block_matrix(dims[m], dims[m], tT)
        if m >= 1:
            b[m] = block_matrix(dims[m - 1], dims[m], tb)
        if m + 1 <= N:
            B[m] = block_matrix(dims[m + 1], dims[m], tB)
    spaces = GradedModule(labels)
    if ok:
        return MixedComplex(spaces, GradedMap(-1, b), GradedMap(1, B), check=check)
    return ParachainComplex(spaces, GradedMap(-1, b), GradedMap(1, B), GradedMap(0, T), check=check)


def bicomplex_from_parts(N: int, horizontal, vertical, labels) -> ParachainBicomplex:
    """Assemble from callables horizontal(p,q) -> (b̄, B̄, T̄) and vertical(p,q) -> (b, B, T).

    Entries that would leave the range p + q ≤ N (or go negative) are ignored.
    """
    hb, hB, hT, vb, vB, vT = {}, {}, {}, {}, {}, {}
    for (p, q) in labels:
        a, Bh, Th = horizontal(p, q)
        c, Bv, Tv = vertical(p, q)
        hT[(p, q)] = Th
        vT[(p, q)] = Tv
        if p >= 1:
            hb[(p, q)] = a
        if q >= 1:
            vb[(p, q)] = c
        if p + q + 1 <= N:
            hB[(p, q)] = Bh
            vB[(p, q)] = Bv
    return ParachainBicomplex(N, labels, hb, hB, hT, vb, vB, vT)
