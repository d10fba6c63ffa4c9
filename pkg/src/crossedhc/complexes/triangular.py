"""Triangular S-modules and the two triangularizations of a cylindrical complex."""
from __future__ import annotations

from ..errors import IdentityViolation
from ..linalg import SparseMatrix, block_matrix
from .bicomplex import ParachainBicomplex, tot_layout, totalize_bicomplex
from .chain import ParaSModule, cyclic_complex, natural_slots
from .graded import GradedMap, GradedModule, require_equal, require_zero

_STEP = {"horizontal": ((1, 0), (0, 1)), "vertical": ((0, 1), (1, 0))}


class TriangularSModule:
    """Bigraded object with an S-module direction and a parachain direction.

    ``orientation`` names the S-direction.  Operator dicts are keyed by
    source cell: ``d`` moves one step back along the S-direction, ``S`` two
    steps back, ``b`` one step back along the other direction and ``B`` one
    step forward.  The defining identity is d² + (bB + Bb)S = 0 (written
    (b̄B̄ + B̄b̄)S + d² = 0 in the vertical case).
    """

    def __init__(self, orientation: str, N: int, labels: dict, d: dict, S: dict, b: dict, B: dict, check: bool = True,
                 origin: dict | None = None):
        if orientation not in _STEP:
            raise ValueError("orientation must be 'horizontal' or 'vertical'")
        self.orientation = orientation
        self.N = N
        self.labels = {c: tuple(l) for c, l in labels.items()}
        self.d, self.S, self.b, self.B = d, S, b, B
        # origin[(cell)][i] = (slot j, source cell, index) for comparisons with Tot^♮
        self.origin = origin
        if check:
            self.check()

    def _move(self, c, along_s: int = 0, along_c: int = 0):
        (sx, sy), (cx, cy) = _STEP[self.orientation]
        return (c[0] + along_s * sx + along_c * cx, c[1] + along_s * sy + along_c * cy)

    def dim(self, c) -> int:
        return len(self.labels.get(c, ()))

    def cells(self, m: int | None = None):
        if m is None:
            return sorted(self.labels)
        return [(p, m - p) for p in range(m + 1) if (p, m - p) in self.labels]

    def check(self):
        d, S, b, B = self.d, self.S, self.b, self.B
        for c in self.cells():
            wit = GradedModule([self.labels[c]])
            c1, c2 = self._move(c, -1), self._move(c, -2)
            if c in d and c1 in d:
                lhs = d[c1] @ d[c]
                cS = c2
                if c in S and cS in B and self._move(cS, 0, 1) in b:
                    t = b[self._move(cS, 0, 1)] @ B[cS]
                    if cS in b:
                        t = t + B[self._move(cS, 0, -1)] @ b[cS]
                    lhs = lhs + t @ S[c]
                    require_zero("d² + (bB + Bb)S = 0", 0, lhs, wit)
            cb = self._move(c, 0, -1)
            if c in b and cb in b:
                require_zero("b² = 0", 0, b[cb] @ b[c], wit)
            cB = self._move(c, 0, 1)
            if c in B and cB in B:
                require_zero("B² = 0", 0, B[cB] @ B[c], wit)
            # S-direction operators commute with chain-direction ones
            for name, X in (("d", d), ("S", S)):
                for yname, Y in (("b", b), ("B", B)):
                    if c not in X or c not in Y:
                        continue
                    ds = -1 if name == "d" else -2
                    dc = -1 if yname == "b" else 1
                    a = self._move(c, ds)
                    e = self._move(c, 0, dc)
                    if a in Y and e in X:
                        require_equal(f"{name}{yname} = {yname}{name}", 0, X[e] @ Y[c], Y[a] @ X[c], wit)
            if c in d and c in S and c1 in S and c2 in d:
                require_equal("dS = Sd", 0, d[c2] @ S[c], S[c1] @ d[c], wit)

    # totalization -----------------------------------------------------
    def layout(self):
        offsets, labels, bideg = {}, [], []
        for m in range(self.N + 1):
            off, lab, bd = 0, [], []
            for (p, q) in self.cells(m):
                offsets[(p, q)] = off
                off += self.dim((p, q))
                lab.extend(f"({p},{q}){x}" for x in self.labels[(p, q)])
                bd.extend([(p, q)] * self.dim((p, q)))
            labels.append(lab)
            bideg.append(bd)
        return offsets, labels, bideg

    def total(self, check: bool = True) -> ParaSModule:
        """Total S-module: signs (−1)^p on every operator moving in the q-direction."""
        off, labels, _ = self.layout()
        dims = [len(l) for l in labels]
        vertical_s = self.orientation == "vertical"
        d, S = {}, {}
        for m in range(self.N + 1):
            blocks_d, blocks_S = [], []
            for c in self.cells(m):
                p = c[0]
                sign = -1 if p % 2 else 1
                o = off[c]
                if c in self.d:
                    M = self.d[c]
                    blocks_d.append((off[self._move(c, -1)], o, M.scale(sign) if vertical_s else M))
                if c in self.b:
                    M = self.b[c]
                    blocks_d.append((off[self._move(c, 0, -1)], o, M if vertical_s else M.scale(sign)))
                if c in self.S:
                    c2 = self._move(c, -2)
                    blocks_S.append((off[c2], o, self.S[c]))
                    if c2 in self.B:
                        M = self.B[c2] @ self.S[c]
                        blocks_d.append((off[self._move(c2, 0, 1)], o, M if vertical_s else M.scale(sign)))
            if m >= 1:
                d[m] = block_matrix(dims[m - 1], dims[m], blocks_d)
            if m >= 2:
                S[m] = block_matrix(dims[m - 2], dims[m], blocks_S)
        return ParaSModule(GradedModule(labels), GradedMap(-1, d), GradedMap(-2, S), None, check=check)

    def filtered(self, filtration: str):
        """FilteredComplex of the total complex by columns (p) or rows (q)."""
        from .spectral import FilteredComplex

        if filtration not in ("columns", "rows"):
            raise ValueError("filtration must be 'columns' or 'rows'")
        _, _, bideg = self.layout()
        k = 0 if filtration == "columns" else 1
        P = self.total(check=False)
        return FilteredComplex(P.chain_complex(check=False), [[c[k] for c in bd] for bd in bideg])


def triangularize(bc: ParachainBicomplex, which: str, check: bool = True) -> TriangularSModule:
    """C^wσ ('wsigma': S along p) or C^σ ('sigma': S along q) of a cylindrical complex.

    The parachain direction keeps (b, B) except that the vertical B is
    replaced by T̄B, so that the total S-module is Tot(C)^♮ on the nose for
    the cylindrical totalization B† = B̄ + (−1)^p T̄B.  For mixed bicomplexes
    T̄ = 1 and this is the plain construction.
    """
    N = bc.N
    if which not in ("wsigma", "sigma"):
        raise ValueError("which must be 'wsigma' or 'sigma'")
    horizontal = which == "wsigma"
    vB_tw = {c: bc.hT[(c[0], c[1] + 1)] @ M for c, M in bc.vB.items()}
    labels, slots, origin = {}, {}, {}
    for p in range(N + 1):
        for q in range(N + 1 - p):
            sl, lab, org, off = [], [], [], 0
            j = 0
            while True:
                src = (p - 2 * j, q) if horizontal else (p, q - 2 * j)
                if min(src) < 0:
                    break
                sl.append((j, src, off))
                n = bc.dim(*src)
                lab.extend(f"[{j}]({src[0]},{src[1]}){x}" for x in bc.labels[src])
                org.extend((j, src, i) for i in range(n))
                off += n
                j += 1
            labels[(p, q)] = lab
            slots[(p, q)] = sl
            origin[(p, q)] = org

    def ofs(cell):
        return {j: (src, o) for j, src, o in slots[cell]}

    d, S, b, B = {}, {}, {}, {}
    if horizontal:
        sdir_b, sdir_B, cdir_b, cdir_B = bc.hb, bc.hB, bc.vb, vB_tw
    else:
        sdir_b, sdir_B, cdir_b, cdir_B = bc.vb, vB_tw, bc.hb, bc.hB
    step_s = (1, 0) if horizontal else (0, 1)
    step_c = (0, 1) if horizontal else (1, 0)

    def mv(c, a, k):
        return (c[0] + a * step_s[0] + k * step_c[0], c[1] + a * step_s[1] + k * step_c[1])

    for cell in labels:
        n = len(labels[cell])
        src_slots = slots[cell]
        # d = b + BS along the S-direction
        t = mv(cell, -1, 0)
        if t in labels:
            to = ofs(t)
            blocks = []
            for j, src, o in src_slots:
                if j in to and src in sdir_b:
                    blocks.append((to[j][1], o, sdir_b[src]))
                if j >= 1 and (j - 1) in to:
                    blocks.append((to[j - 1][1], o, sdir_B[src]))
            d[cell] = block_matrix(len(labels[t]), n, blocks)
        t = mv(cell, -2, 0)
        if t in labels:
            to = ofs(t)
            S[cell] = block_matrix(len(labels[t]), n, [(to[j - 1][1], o, SparseMatrix.identity(bc.dim(*src)))
                                                     for j, src, o in src_slots if j >= 1])
        t = mv(cell, 0, -1)
        if t in labels:
            to = ofs(t)
            b[cell] = block_matrix(len(labels[t]), n, [(to[j][1], o, cdir_b[src]) for j, src, o in src_slots])
        t = mv(cell, 0, 1)
        if t in labels:
            to = ofs(t)
            B[cell] = block_matrix(len(labels[t]), n, [(to[j][1], o, cdir_B[src]) for j, src, o in src_slots])
    return TriangularSModule("horizontal" if horizontal else "vertical", N, labels, d, S, b, B, check=check,
                             origin=origin)


def compare_with_natural(tri: TriangularSModule, bc: ParachainBicomplex) -> None:
    """Check that the total S-module of ``tri`` is Tot(bc)^♮ after reindexing."""
    nat = cyclic_complex(totalize_bicomplex(bc, check=False))
    tot = tri.total(check=False)
    tot_off, _ = tot_layout(bc)
    N = bc.N

    def perm(m):
        # position in Tot^♮_m for each basis element of the triangular total degree m
        slot_off = {j: o for j, _, o in natural_slots(lambda k: sum(bc.dim(*c) for c in bc.cells(k)), m)}
        out = []
        for c in tri.cells(m):
            for (j, src, i) in tri.origin[c]:
                out.append(slot_off[j] + tot_off[src] + i)
        return out

    perms = [perm(m) for m in range(N + 1)]
    for m in range(N + 1):
        if sorted(perms[m]) != list(range(nat.spaces.dim(m))):
            raise IdentityViolation(f"degree {m}: triangular total is not a reindexing of Tot^♮", identity="Tot^♮")
    for m in range(1, N + 1):
        A = tot.d[m]
        Bm = nat.d[m]
        moved = SparseMatrix.from_entries(Bm.nrows, Bm.ncols,
                                          ((perms[m - 1][i], perms[m][j], v) for i, j, v in A.entries()))
        require_equal("total d = Tot^♮ d", m, moved, Bm, nat.spaces)
    for m in range(2, N + 1):
        A = tot.S[m]
        moved = SparseMatrix.from_entries(nat.S[m].nrows, nat.S[m].ncols,
                                          ((perms[m - 2][i], perms[m][j], v) for i, j, v in A.entries()))
        require_equal("total S = Tot^♮ S", m, moved, nat.S[m], nat.spaces)


def tensor_smodule_mixed(P: ParaSModule, M, N: int | None = None, check: bool = True) -> TriangularSModule:
    """Horizontal triangular S-module P ⊗ M of an S-module and a mixed complex.

    C_{p,q} = P_p ⊗ M_q with d̄ = d ⊗ 1, S ⊗ 1 and vertical (1 ⊗ b, 1 ⊗ B).
    """
    from ..linalg import SparseMatrix as SM

    N = N if N is not None else min(P.N, M.N)
    labels, d, S, b, B = {}, {}, {}, {}, {}

    def kron(X, Y):
        rows = {}
        for i1, r1 in X.row_items():
            for i2, r2 in Y.row_items():
                rows[i1 * Y.nrows + i2] = {j1 * Y.ncols + j2: v1 * v2 for j1, v1 in r1.items() for j2, v2 in r2.items()}
        return SM(X.nrows * Y.nrows, X.ncols * Y.ncols, rows)

    for p in range(N + 1):
        for q in range(N + 1 - p):
            labels[(p, q)] = [f"{x}⊗{y}" for x in P.spaces.labels[p] for y in M.spaces.labels[q]]
    for (p, q) in labels:
        Ip = SM.identity(P.spaces.dim(p))
        Iq = SM.identity(M.spaces.dim(q))
        if p >= 1:
            d[(p, q)] = kron(P.d[p], Iq)
        if p >= 2:
            S[(p, q)] = kron(P.S[p], Iq)
        if q >= 1:
            b[(p, q)] = kron(Ip, M.b[q])
        if p + q + 1 <= N:
            B[(p, q)] = kron(Ip, M.B[q])
    return TriangularSModule("horizontal", N, labels, d, S, b, B, check=check)
