"""Cyclic modules of algebras and groups, their twisted versions, tensor products
over a group, the conjugacy-class splitting of C(A⋊Γ), and the embedding μ_φ."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .complexes import GradedMap, GradedModule
from .errors import IdentityViolation, NotStructurePreserving, PhiNotCentral
from .groups import Algebra, ConjugacyData, FiniteGroup, GroupAction
from .linalg import SparseMatrix, block_matrix, inverse
from .simplicial import BiParacyclicModule, ParacyclicModule, diagonal

ONE = Fraction(1)


def _tensor_expand(vectors) -> dict:
    """Expand v_0 ⊗ … ⊗ v_m (dicts) into {index tuple: coefficient}."""
    out = {(): ONE}
    for v in vectors:
        nxt = {}
        for t, c in out.items():
            for i, a in v.items():
                nxt[t + (i,)] = nxt.get(t + (i,), 0) + c * a
        out = nxt
    return {t: c for t, c in out.items() if c}


def _matrix(src: list, dst_index: dict, fn, where: str) -> SparseMatrix:
    entries = []
    for j, tup in enumerate(src):
        for tgt, c in fn(tup).items():
            try:
                entries.append((dst_index[tgt], j, c))
            except KeyError:
                raise IdentityViolation(f"{where} leaves the chosen basis", witness=list(tgt))
    return SparseMatrix.from_entries(len(dst_index), len(src), entries)


def algebra_tuples(A: Algebra, m: int, weight: int | None = None, keep=None) -> list[tuple]:
    """Basis tuples of A^{⊗(m+1)} (of total weight ``weight`` in the graded case)."""
    n = A.dim
    if weight is None or not A.graded:
        tuples = list(product(range(n), repeat=m + 1))
    else:
        w = A.weights
        by_w: dict = {}
        for i in range(n):
            by_w.setdefault(w[i], []).append(i)
        tuples = []

        def rec(prefix, left, slots):
            if slots == 0:
                if left == 0:
                    tuples.append(tuple(prefix))
                return
            for ww, idx in by_w.items():
                if ww <= left:
                    for i in idx:
                        rec(prefix + [i], left - ww, slots - 1)

        rec([], weight, m + 1)
        tuples.sort()
    if keep is not None:
        tuples = [t for t in tuples if keep(t)]
    return tuples


class TwistedAlgebraCyclic(ParacyclicModule):
    """C^φ(A): C_m = A^{⊗(m+1)} with d_φ, s, t_φ.

    d_φ(a⁰⊗…⊗a^m) = (φ⁻¹a^m)a⁰ ⊗ a¹ ⊗ … ⊗ a^{m−1},  s = 1 ⊗ −,
    t_φ(a⁰⊗…⊗a^m) = φ⁻¹a^m ⊗ a⁰ ⊗ … ⊗ a^{m−1}.
    With φ = None this is Connes' cyclic module C(A).  ``action`` (a GroupAction
    commuting with φ) supplies the diagonal group action used by ⊗_Γ.
    """

    def __init__(self, A: Algebra, N: int, phi: SparseMatrix | None = None, weight: int | None = None,
                 action: GroupAction | None = None, keep=None, check: bool = True, name: str = ""):
        self.algebra, self.phi, self.weight, self.action = A, phi, weight, action
        phi_inv = inverse(phi) if phi is not None else None
        inv_cols = phi_inv.columns() if phi_inv is not None else [{j: ONE} for j in range(A.dim)]
        self.bases = [algebra_tuples(A, m, weight, keep) for m in range(N + 1)]
        self.index = [{t: i for i, t in enumerate(b)} for b in self.bases]
        labels = [["⊗".join(A.labels[i] for i in t) for t in b] for b in self.bases]
        unit = A.unit
        e = lambda i: {i: ONE}

        def d(t):
            head = A.mul(inv_cols[t[-1]], e(t[0]))
            return _tensor_expand([head] + [e(i) for i in t[1:-1]])

        def s(t):
            return _tensor_expand([unit] + [e(i) for i in t])

        def tt(t):
            return _tensor_expand([inv_cols[t[-1]]] + [e(i) for i in t[:-1]])

        B, I = self.bases, self.index
        dm = {m: _matrix(B[m], I[m - 1], d, "d") for m in range(1, N + 1)}
        sm = {m: _matrix(B[m], I[m + 1], s, "s") for m in range(N)}
        tm = {m: _matrix(B[m], I[m], tt, "t") for m in range(N + 1)}
        twist = None
        if phi is not None:
            twist = GradedMap(0, {m: self.tensor_power(phi_inv, m) for m in range(N + 1)})
        super().__init__(GradedModule(labels), GradedMap(-1, dm), GradedMap(1, sm), GradedMap(0, tm), twist=twist,
                         cyclic=phi is None or phi.is_identity(), check=check, name=name or "C(A)")

    def tensor_power(self, M: SparseMatrix, m: int) -> SparseMatrix:
        cols = M.columns()
        return _matrix(self.bases[m], self.index[m], lambda t: _tensor_expand([cols[i] for i in t]), "action")

    def act_matrix(self, g: int, m: int) -> SparseMatrix:
        """Diagonal action of group element g (index in the action's group) on C_m."""
        key = (g, m)
        cache = self.__dict__.setdefault("_act", {})
        if key not in cache:
            cache[key] = self.tensor_power(self.action.mats[g], m)
        return cache[key]


def build_CphiA(A: Algebra, phi: SparseMatrix | None = None, N: int = 3, weight: int | None = None,
                action: GroupAction | None = None, check: bool = True) -> TwistedAlgebraCyclic:
    return TwistedAlgebraCyclic(A, N, phi, weight, action, check=check, name="C^phi(A)" if phi is not None else "C(A)")


def _encode(t, k: int) -> int:
    r = 0
    for x in t:
        r = r * k + x
    return r


def _decode(i: int, k: int, length: int) -> tuple:
    out = [0] * length
    for j in range(length - 1, -1, -1):
        i, out[j] = divmod(i, k)
    return tuple(out)


class TwistedGroupCyclic(ParacyclicModule):
    """C^φ(Γ): C_m = ℚ[Γ^{m+1}], d drops the last entry,
    s_φ(ψ) = (φ⁻¹ψ_m, ψ_0, …, ψ_m), t_φ(ψ) = (φ⁻¹ψ_m, ψ_0, …, ψ_{m−1})."""

    def __init__(self, G: FiniteGroup, phi: int, N: int, check: bool = True):
        if not G.is_central(phi):
            bad = next(g for g in range(len(G)) if G.mul(g, phi) != G.mul(phi, g))
            raise PhiNotCentral("φ is not central", witness=[G.elements[phi], G.elements[bad]])
        self.group, self.phi = G, phi
        k = len(G)
        self.k = k
        fi = G.inv(phi)
        labels = [[",".join(G.elements[x] for x in _decode(i, k, m + 1)) for i in range(k ** (m + 1))]
                  for m in range(N + 1)]

        def mono(m, m2, f):
            return SparseMatrix.monomial(k ** (m2 + 1), [(_encode(f(_decode(i, k, m + 1)), k), 1)
                                                         for i in range(k ** (m + 1))])

        d = {m: mono(m, m - 1, lambda t: t[:-1]) for m in range(1, N + 1)}
        s = {m: mono(m, m + 1, lambda t: (G.mul(fi, t[-1]),) + t) for m in range(N)}
        t = {m: mono(m, m, lambda t: (G.mul(fi, t[-1]),) + t[:-1]) for m in range(N + 1)}
        twist = GradedMap(0, {m: self.act_matrix(fi, m) for m in range(N + 1)})
        super().__init__(GradedModule(labels), GradedMap(-1, d), GradedMap(1, s), GradedMap(0, t), twist=twist,
                         cyclic=phi == 0, check=check, name=f"C^{G.elements[phi]}(Γ)")

    def act_matrix(self, g: int, m: int) -> SparseMatrix:
        G, k = self.group, self.k
        return SparseMatrix.monomial(k ** (m + 1), [(_encode(tuple(G.mul(g, x) for x in _decode(i, k, m + 1)), k), 1)
                                                    for i in range(k ** (m + 1))])


def build_CphiGamma(G: FiniteGroup, phi=0, N: int = 3, check: bool = True) -> TwistedGroupCyclic:
    return TwistedGroupCyclic(G, G.element(phi), N, check=check)


def lift_group_operator(G: FiniteGroup, M: SparseMatrix, p: int, p2: int, ny: int, act) -> SparseMatrix:
    """Matrix of M ⊗ 1 on C_p(Γ) ⊗_Γ Y → C_{p2}(Γ) ⊗_Γ Y in normalized bases.

    M is a Γ-equivariant matrix C_p(Γ) → C_{p2}(Γ); act(g) is the matrix of g
    on Y (of dimension ny).  A term (χ_0, χ_1, …) ⊗ y is rewritten as
    (1, χ_0⁻¹χ_1, …) ⊗ χ_0⁻¹·y.
    """
    k = len(G)
    cols = M.columns()
    blocks, cache = [], {}
    for r in range(k ** p):
        src = _encode((0,) + _decode(r, k, p), k)
        for row, c in cols[src].items():
            chi = _decode(row, k, p2 + 1)
            g0 = G.inv(chi[0])
            r2 = _encode(tuple(G.mul(g0, x) for x in chi[1:]), k)
            if g0 not in cache:
                cache[g0] = act(g0)
            blocks.append((r2 * ny, r * ny, cache[g0] if c == 1 else cache[g0].scale(c)))
    return block_matrix(k ** p2 * ny, k ** p * ny, blocks)


def block_diagonal(V: SparseMatrix, copies: int) -> SparseMatrix:
    return block_matrix(copies * V.nrows, copies * V.ncols, [(r * V.nrows, r * V.ncols, V) for r in range(copies)])


class GammaTensorModule(BiParacyclicModule):
    """X ⊗_Γ Y for X = C^φ(Γ) (horizontal) and a φ-paracyclic Γ-module Y (vertical).

    Γ acts freely on the leftmost group coordinate, so cell (p, q) has basis
    (1, ψ_1, …, ψ_p) ⊗ y_j.  An operator on X sending (1, ψ…) to (χ_0, χ…)
    is rewritten as (1, χ_0⁻¹χ…) ⊗ χ_0⁻¹·y.
    """

    def __init__(self, X: TwistedGroupCyclic, Y: ParacyclicModule, N: int | None = None, region: str = "square",
                 check: bool = True):
        G, k = X.group, X.k
        N = min(X.N, Y.N) if N is None else N
        self.X, self.Y, self.region = X, Y, region
        cells = [(p, q) for p in range(N + 1) for q in range(N + 1) if region == "square" or p + q <= N]
        labels = {}
        for (p, q) in cells:
            ylab = Y.spaces.labels[q]
            labels[(p, q)] = [f"({','.join(['1'] + [G.elements[x] for x in _decode(r, k, p)])})⊗{y}"
                              for r in range(k ** p) for y in ylab]
        hd, hs, ht, vd, vs, vt = {}, {}, {}, {}, {}, {}
        for (p, q) in cells:
            if p >= 1:
                hd[(p, q)] = self._lift(X.d[p], p, p - 1, q)
            if (p + 1, q) in labels:
                hs[(p, q)] = self._lift(X.s[p], p, p + 1, q)
            ht[(p, q)] = self._lift(X.t[p], p, p, q)
            if q >= 1:
                vd[(p, q)] = self._vert(Y.d[q], p)
            if (p, q + 1) in labels:
                vs[(p, q)] = self._vert(Y.s[q], p)
            vt[(p, q)] = self._vert(Y.t[q], p)
        super().__init__(N, labels, hd, hs, ht, vd, vs, vt, check=False, name=f"{X.name}⊗_Γ{Y.name}")
        if check:
            self.check()
            ok = self.is_cylindrical()
            if not ok:
                from .errors import NotCylindrical
                raise NotCylindrical("t̄^{p+1}t^{q+1} ≠ 1 on X ⊗_Γ Y")

    def _lift(self, M: SparseMatrix, p: int, p2: int, q: int) -> SparseMatrix:
        return lift_group_operator(self.X.group, M, p, p2, self.Y.spaces.dim(q), lambda g: self.Y.act_matrix(g, q))

    def _vert(self, V: SparseMatrix, p: int) -> SparseMatrix:
        return block_diagonal(V, self.X.k ** p)

    def cell_basis(self, p: int, q: int):
        """(group tuple with leading identity, index into Y_q) for each basis vector of the cell."""
        k, ny = self.X.k, self.Y.spaces.dim(q)
        return [((0,) + _decode(r, k, p), j) for r in range(k ** p) for j in range(ny)]


def tensor_over_gamma(X: TwistedGroupCyclic, Y: ParacyclicModule, N: int | None = None, region: str = "square",
                      check: bool = True) -> GammaTensorModule:
    return GammaTensorModule(X, Y, N, region, check)


# -- crossed products: class splitting and μ_φ ---------------------------------

def crossed_group_part(Acr: Algebra, c: int) -> int:
    _, G, _ = Acr.crossed
    return c % len(G)


def class_of_tuple(Acr: Algebra, t) -> int:
    """Group part g_0 ⋯ g_m of a basis tuple of C(A⋊Γ)."""
    _, G, _ = Acr.crossed
    k = len(G)
    g = 0
    for c in t:
        g = G.mul(g, c % k)
    return g


def split_by_class(Acr: Algebra, N: int, weight: int | None = None, check: bool = True) -> dict:
    """{class representative: cyclic submodule of C(A⋊Γ) spanned by tuples with product in the class}.

    Each component is built on its own basis; the builder fails if an
    operator leaves the component, so closure is machine-checked.
    """
    _, G, _ = Acr.crossed
    out = {}
    for klass in G.conjugacy_classes():
        members = set(klass)
        keep = lambda t, members=members: class_of_tuple(Acr, t) in members
        P = TwistedAlgebraCyclic(Acr, N, None, weight, keep=keep, check=check, name=f"C(A⋊Γ)[{G.elements[klass[0]]}]")
        P.klass = klass
        out[klass[0]] = P
    return out


def class_component(Acr: Algebra, phi: int, N: int, weight: int | None = None, check: bool = True) -> TwistedAlgebraCyclic:
    _, G, _ = Acr.crossed
    members = {G.conj(g, phi) for g in range(len(G))}
    P = TwistedAlgebraCyclic(Acr, N, None, weight, keep=lambda t: class_of_tuple(Acr, t) in members, check=check,
                             name=f"C(A⋊Γ)[{G.elements[phi]}]")
    P.klass = sorted(members)
    return P


def centralizer_model(A: Algebra, G: FiniteGroup, act: GroupAction, phi, N: int, weight: int | None = None,
                      region: str = "square", check: bool = True):
    """(ConjugacyData, C^φ(Γ_φ), C^φ(A) with Γ_φ-action, C^φ(Γ_φ) ⊗_{Γ_φ} C^φ(A))."""
    from .groups import conjugacy_analysis
    cd = conjugacy_analysis(G, phi)
    H, emb = cd.centralizer, cd.embedding
    X = TwistedGroupCyclic(H, cd.phi_in_centralizer, N, check=check)
    Y = TwistedAlgebraCyclic(A, N, act.mats[cd.phi], weight, act.restrict(H, emb), check=check, name="C^phi(A)")
    return cd, X, Y, GammaTensorModule(X, Y, N, region, check)


def mu_phi(cd: ConjugacyData, T: GammaTensorModule, target: TwistedAlgebraCyclic, act: GroupAction,
           check: bool = True) -> GradedMap:
    """μ_φ : Diag(C^φ(Γ_φ) ⊗_{Γ_φ} C^φ(A)) → C(A⋊Γ)_{[φ]}.

    (ψ_0..ψ_m) ⊗ (a⁰..a^m) ↦ [(ψ_m⁻¹φ)·a⁰] u_{φψ_m⁻¹ψ_0} ⊗ (ψ_0⁻¹·a¹) u_{ψ_0⁻¹ψ_1} ⊗ … ⊗ (ψ_{m−1}⁻¹·a^m) u_{ψ_{m−1}⁻¹ψ_m}
    """
    G, emb, phi = cd.group, cd.embedding, cd.phi
    k = len(G)
    Y = T.Y
    N = min(T.N, target.N)
    cols = [M.columns() for M in act.mats]

    def part(g, a, u):
        return {c * k + u: v for c, v in cols[g][a].items()}

    mats = {}
    for m in range(N + 1):
        ybase = Y.bases[m]
        entries = []
        for j, (psi, yj) in enumerate(T.cell_basis(m, m)):
            ps = [emb[x] for x in psi]
            a = ybase[yj]
            inv_last = G.inv(ps[-1])
            vecs = [part(G.mul(inv_last, phi), a[0], G.prod(phi, inv_last, ps[0]))]
            for i in range(1, m + 1):
                h = G.inv(ps[i - 1])
                vecs.append(part(h, a[i], G.mul(h, ps[i])))
            for tup, c in _tensor_expand(vecs).items():
                try:
                    entries.append((target.index[m][tup], j, c))
                except KeyError:
                    raise NotStructurePreserving("μ_φ leaves the [φ] component", witness=list(tup))
        mats[m] = SparseMatrix.from_entries(target.spaces.dim(m), T.dim(m, m), entries)
    mu = GradedMap(0, mats)
    if check:
        check_structure_map(mu, diagonal(T, check=False), target, "μ_φ")
    return mu


def mu_inverse(T: GammaTensorModule, source: TwistedAlgebraCyclic, act: GroupAction) -> GradedMap:
    """μ⁻¹ : C(A⋊Γ)_{[1]} → Diag(C(Γ) ⊗_Γ C(A)), via the partial products φ̂_j = φ_0⋯φ_j."""
    _, G, _ = source.algebra.crossed
    k = len(G)
    N = min(T.N, source.N)
    X, Y = T.X, T.Y
    cols = [M.columns() for M in act.mats]
    mats = {}
    for m in range(N + 1):
        ny = Y.spaces.dim(m)
        entries = []
        for j, tup in enumerate(source.bases[m]):
            a = [c // k for c in tup]
            g = [c % k for c in tup]
            hat = []
            acc = 0
            for x in g:
                acc = G.mul(acc, x)
                hat.append(acc)
            h0 = G.inv(hat[0])
            gt = tuple(G.mul(h0, x) for x in hat[1:])
            vecs = [cols[h0][a[0]]] + [cols[G.mul(h0, hat[i - 1])][a[i]] for i in range(1, m + 1)]
            r = _encode(gt, k)
            for yt, c in _tensor_expand(vecs).items():
                entries.append((r * ny + Y.index[m][yt], j, c))
        mats[m] = SparseMatrix.from_entries(T.dim(m, m), source.spaces.dim(m), entries)
    return GradedMap(0, mats)


def check_structure_map(f: GradedMap, P: ParacyclicModule, Q: ParacyclicModule, name: str = "f"):
    """f commutes with d, s and t."""
    N = min(P.N, Q.N)
    for m in range(N + 1):
        for op, deg in (("d", -1), ("s", 1), ("t", 0)):
            m2 = m + deg
            if m2 < 0 or m2 > N or m not in getattr(P, op).mats:
                continue
            lhs = f[m2] @ getattr(P, op)[m]
            rhs = getattr(Q, op)[m] @ f[m]
            if lhs != rhs:
                i, j, _ = (lhs - rhs).first_nonzero()
                raise NotStructurePreserving(f"{name} does not commute with {op} in degree {m}", operator=op,
                                             witness={"degree": m, "source": P.spaces.labels[m][j],
                                                      "target": Q.spaces.labels[m2][i]})
