"""Reductions of C(A⋊Γ)_{[φ]}: finite centralizers (invariants), finite-order φ
(the flat bicomplex C^♭(Γ_φ, 𝒞^φ)), and the infinite-order sigma model
built from Γ̄_φ = Γ_φ/⟨φ⟩ and an Euler cocycle.  Also group (co)homology,
cap products, ν_φ and the antisymmetrization ε."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from .complexes import (ChainComplex, GradedMap, GradedModule, HomologyTable, MixedComplex, ParachainBicomplex,
                        ParachainComplex, ParaSModule, compare_with_natural, cyclic_homology, homology,
                        homology_isomorphism_ranks, is_iso_report, natural_map, s_stabilization, spectral_sequence,
                        totalize_bicomplex, triangularize)
from .complexes.bicomplex import tot_layout
from .complexes.graded import require_equal, require_zero
from .complexes.spectral import FilteredComplex
from .crossed import (GammaTensorModule, TwistedAlgebraCyclic, TwistedGroupCyclic, _decode, _encode, block_diagonal,
                      centralizer_model, class_component, lift_group_operator, mu_phi)
from .errors import (DSquaredNonzero, IdentityViolation, NotACocycle, NotAParachainMap, PhiNotCentral,
                     PhiNotFiniteOrder, SpecError)
from .groups import Algebra, ConjugacyData, FiniteGroup, GroupAction, conjugacy_analysis
from .linalg import SparseMatrix, Subspace, block_matrix, image, rank
from .simplicial import alexander_whitney, derive_parachain, diagonal, shuffle
from .simplicial import _tot_b as _tot_b_complex

ONE = Fraction(1)


# -- group homology ------------------------------------------------------------

class GModule:
    """Finite-dimensional representation: mats[g] is the matrix of g."""

    def __init__(self, G: FiniteGroup, mats: list[SparseMatrix], labels=None, check: bool = True):
        self.G, self.mats = G, list(mats)
        self.dim = mats[0].nrows
        self.labels = list(labels) if labels is not None else [f"v{i}" for i in range(self.dim)]
        if check:
            for a, b in product(range(len(G)), repeat=2):
                if self.mats[G.mul(a, b)] != self.mats[a] @ self.mats[b]:
                    from .errors import NotAHomomorphism
                    raise NotAHomomorphism("ρ(ab) ≠ ρ(a)ρ(b)", witness=[G.elements[a], G.elements[b]])

    @classmethod
    def trivial(cls, G: FiniteGroup, dim: int = 1) -> "GModule":
        return cls(G, [SparseMatrix.identity(dim)] * len(G), check=False)

    @classmethod
    def character(cls, G: FiniteGroup, chi) -> "GModule":
        """One-dimensional module with g acting by chi(g) (a homomorphism to ℚ^×)."""
        return cls(G, [SparseMatrix.from_dense([[chi(g)]]) for g in range(len(G))])

    @classmethod
    def regular(cls, G: FiniteGroup) -> "GModule":
        k = len(G)
        return cls(G, [SparseMatrix.monomial(k, [(G.mul(g, h), 1) for h in range(k)]) for g in range(k)],
                   labels=[f"[{e}]" for e in G.elements])


def group_boundary(G: FiniteGroup, p: int, n: int, act) -> SparseMatrix:
    """∂ : C_p(G) ⊗_G M → C_{p−1}(G) ⊗_G M in the normalized basis (1, g_1, …, g_p) ⊗ v_j."""
    k = len(G)
    blocks, cache = [], {}
    for r in range(k ** p):
        g = _decode(r, k, p)
        # j = 0: drop the leading identity, renormalize by g_1⁻¹
        h = G.inv(g[0])
        if h not in cache:
            cache[h] = act(h)
        r0 = _encode(tuple(G.mul(h, x) for x in g[1:]), k)
        blocks.append((r0 * n, r * n, cache[h]))
        for j in range(1, p + 1):
            rj = _encode(g[:j - 1] + g[j:], k)
            blocks.append((rj * n, r * n, SparseMatrix.identity(n).scale((-1) ** j)))
    return block_matrix(k ** (p - 1) * n, k ** p * n, blocks)


def group_chain_complex(G: FiniteGroup, M: GModule, N: int) -> ChainComplex:
    k = len(G)
    labels = [[f"({','.join(['1'] + [G.elements[x] for x in _decode(r, k, p)])})⊗{v}" for r in range(k ** p)
               for v in M.labels] for p in range(N + 1)]
    d = {p: group_boundary(G, p, M.dim, lambda g: M.mats[g]) for p in range(1, N + 1)}
    return ChainComplex(GradedModule(labels), GradedMap(-1, d))


def group_homology(G: FiniteGroup, M: GModule | None = None, N: int = 4) -> HomologyTable:
    M = M or GModule.trivial(G)
    return homology(group_chain_complex(G, M, N), f"H(G, M)")


# -- cochains, Euler cocycle, cap product ---------------------------------------

class Cochain:
    """Homogeneous Γ-invariant p-cochain with values in ℚ, stored on normalized tuples (1, g_1, …, g_p)."""

    def __init__(self, G: FiniteGroup, p: int, values: dict):
        self.G, self.p = G, p
        self.values = {tuple(k): Fraction(v) for k, v in values.items() if v}

    def __call__(self, *gs) -> Fraction:
        G = self.G
        h = G.inv(gs[0])
        return self.values.get(tuple(G.mul(h, x) for x in gs[1:]), Fraction(0))

    @classmethod
    def constant_one(cls, G: FiniteGroup) -> "Cochain":
        return cls(G, 0, {(): 1})

    def coboundary(self) -> "Cochain":
        """(δu)(g_0, …, g_{p+1}) = Σ_j (−1)^j u(g_0, …, ĝ_j, …, g_{p+1})."""
        G, p = self.G, self.p
        vals = {}
        for t in product(range(len(G)), repeat=p + 1):
            full = (0,) + t
            v = sum((-1) ** j * self(*(full[:j] + full[j + 1:])) for j in range(p + 2))
            if v:
                vals[t] = v
        return Cochain(G, p + 1, vals)

    def is_cocycle(self) -> bool:
        return not self.coboundary().values

    def __add__(self, other: "Cochain") -> "Cochain":
        keys = set(self.values) | set(other.values)
        return Cochain(self.G, self.p, {k: self.values.get(k, 0) + other.values.get(k, 0) for k in keys})

    def to_dict(self) -> dict:
        G = self.G
        return {",".join(G.elements[x] for x in k): str(v) for k, v in sorted(self.values.items())}


def cap_matrix(u: Cochain, m: int, n: int) -> SparseMatrix:
    """u ⌢ − : C_m(G) ⊗_G M → C_{m−p}(G) ⊗_G M with u ⌢ (g_0, …, g_m) = u(g_{m−p}, …, g_m)(g_0, …, g_{m−p})."""
    G, p = u.G, u.p
    k = len(G)
    if p > m:
        return SparseMatrix.zero(0, k ** m * n)
    I = SparseMatrix.identity(n)
    blocks = []
    for r in range(k ** m):
        g = (0,) + _decode(r, k, m)
        c = u(*g[m - p:])
        if c:
            r2 = _encode(g[1:m - p + 1], k)
            blocks.append((r2 * n, r * n, I.scale(c)))
    return block_matrix(k ** (m - p) * n, k ** m * n, blocks)


def cap_product(u: Cochain, x: dict, m: int, n: int = 1) -> dict:
    """Cap product of u with a chain x ∈ C_m(G) ⊗_G M given as {index: coefficient}."""
    return cap_matrix(u, m, n).apply(x)


@dataclass
class EulerCocycleData:
    quotient: FiniteGroup
    cocycle: list            # c[g][h] ∈ ℤ with s(g)s(h) = φ^{c(g,h)} s(gh)
    u: Cochain               # homogeneous representative, u(g_0, g_1, g_2) = c(g_0⁻¹g_1, g_1⁻¹g_2)
    section: list | None = None

    def to_dict(self) -> dict:
        return {"quotient_order": len(self.quotient), "cocycle": self.cocycle, "section": self.section,
                "u": self.u.to_dict()}


def euler_cocycle(period: int | None = None, section=None, quotient: FiniteGroup | None = None,
                  cocycle=None) -> EulerCocycleData:
    """Euler cocycle of 1 → ⟨φ⟩ → Γ_φ → Γ̄_φ → 1.

    Either Γ_φ = ℤ with φ = period·generator (Γ̄ = ℤ/period, optional integer
    section with s(k̄) ≡ k mod period), or a finite quotient with an integer
    2-cocycle table.
    """
    if period is not None:
        n = int(period)
        if n < 1:
            raise SpecError("infinite_order.period", "period must be positive")
        Q = FiniteGroup.cyclic(n)
        s = list(section) if section is not None else list(range(n))
        if len(s) != n or any((s[g] - g) % n for g in range(n)):
            raise SpecError("infinite_order.section", f"section values must lift 0..{n - 1} modulo {n}")
        c = [[(s[g] + s[h] - s[(g + h) % n]) // n for h in range(n)] for g in range(n)]
    else:
        if quotient is None or cocycle is None:
            raise SpecError("infinite_order", "need either a period or a quotient group with a cocycle")
        Q, c, s = quotient, [[int(x) for x in row] for row in cocycle], None
        k = len(Q)
        for g, h, l in product(range(k), repeat=3):
            if c[g][h] + c[Q.mul(g, h)][l] != c[h][l] + c[g][Q.mul(h, l)]:
                raise NotACocycle("c(g,h) + c(gh,l) ≠ c(h,l) + c(g,hl)",
                                  witness=[Q.elements[g], Q.elements[h], Q.elements[l]])
    vals = {(g1, g2): c[g1][Q.mul(Q.inv(g1), g2)] for g1 in range(len(Q)) for g2 in range(len(Q))}
    u = Cochain(Q, 2, vals)
    if not u.is_cocycle():
        bad = next(iter(u.coboundary().values))
        raise NotACocycle("∂u ≠ 0", witness=[Q.elements[x] for x in (0,) + bad])
    return EulerCocycleData(Q, c, u, s)


# -- invariants ---------------------------------------------------------------

class InvariantComplex:
    """Fixed subcomplex of a parachain complex under a finite group of automorphisms.

    ``mats(m)`` lists the matrices of all group elements in degree m.  The
    averaging ν is an idempotent commuting with b and B; on the image T = 1
    whenever T is itself one of the group elements, so the result is mixed.
    """

    def __init__(self, P: ParachainComplex, mats, check: bool = True, name: str = ""):
        self.source = P
        N = P.N
        nu, incl, restr, subs = {}, {}, {}, []
        for m in range(N + 1):
            Ms = mats(m)
            n = P.spaces.dim(m)
            acc = SparseMatrix.zero(n, n)
            for M in Ms:
                acc = acc + M
            nu[m] = acc.scale(Fraction(1, len(Ms)))
            sub = image(nu[m])
            subs.append(sub)
            incl[m] = sub.matrix()
            cols = nu[m].columns()
            restr[m] = SparseMatrix.from_columns(sub.dim, [dict(enumerate(sub.coordinates(c))) for c in cols])
        self.nu, self.inclusion, self.restriction, self.subspaces = (GradedMap(0, nu), GradedMap(0, incl),
                                                                     GradedMap(0, restr), subs)
        self._mats = mats
        labels = [[f"inv[{P.spaces.labels[m][p]}]" for p in subs[m].pivots] for m in range(N + 1)]
        sp = GradedModule(labels)
        b = {m: restr[m - 1] @ P.b[m] @ incl[m] for m in range(1, N + 1)}
        B = {m: restr[m + 1] @ P.B[m] @ incl[m] for m in range(N)}
        if check:
            self.check()
        self.complex = MixedComplex(sp, GradedMap(-1, b), GradedMap(1, B), check=check)
        self.name = name

    def check(self):
        P, nu = self.source, self.nu
        for m in range(P.N + 1):
            require_equal("ν² = ν", m, nu[m] @ nu[m], nu[m], P.spaces)
            require_equal("ι∘ρ = ν", m, self.inclusion[m] @ self.restriction[m], nu[m], P.spaces)
            if m >= 1:
                require_equal("νb = bν", m, nu[m - 1] @ P.b[m], P.b[m] @ nu[m], P.spaces)
            if m < P.N:
                require_equal("νB = Bν", m, nu[m + 1] @ P.B[m], P.B[m] @ nu[m], P.spaces)

    def induced_action(self, g_matrix, m: int) -> SparseMatrix:
        """Matrix on the invariants of an automorphism commuting with the group."""
        return self.restriction[m] @ g_matrix @ self.inclusion[m]


def invariants_projector(P: ParachainComplex, mats, check: bool = True) -> InvariantComplex:
    return InvariantComplex(P, mats, check)


# -- π₀, ι, ν_φ, ε ----------------------------------------------------------------

def point_complex(N: int) -> MixedComplex:
    """ℚ concentrated in degree 0 with b = B = 0."""
    dims = [1] + [0] * N
    sp = GradedModule([["1"]] + [[] for _ in range(N)])
    b = {m: SparseMatrix.zero(dims[m - 1], dims[m]) for m in range(1, N + 1)}
    B = {m: SparseMatrix.zero(dims[m + 1], dims[m]) for m in range(N)}
    return MixedComplex(sp, GradedMap(-1, b), GradedMap(1, B))


def pi0_iota(G: FiniteGroup, phi=0, N: int = 3, check: bool = True):
    """π₀ : C^φ(Γ) → ℚ (every ψ ↦ 1 in degree 0) and its b-section ι : 1 ↦ (1)."""
    phi = G.element(phi)
    if not G.is_central(phi):
        raise PhiNotCentral("φ is not central", witness=G.elements[phi])
    k = len(G)
    pi0 = {0: SparseMatrix.from_entries(1, k, [(0, j, 1) for j in range(k)])}
    for m in range(1, N + 1):
        pi0[m] = SparseMatrix.zero(0, k ** (m + 1))
    iota = {0: SparseMatrix.from_entries(k, 1, [(0, 0, 1)])}
    pi0, iota = GradedMap(0, pi0), GradedMap(0, iota)
    if check:
        X = TwistedGroupCyclic(G, phi, N)
        check_parachain_map_loose(pi0, derive_parachain(X), point_complex(N), "π₀")
        if not (pi0[0] @ iota[0]).is_identity():
            raise IdentityViolation("π₀∘ι ≠ 1", identity="π₀ι = 1", witness={"degree": 0})
    return pi0, iota


def check_parachain_map_loose(f: GradedMap, src: ParachainComplex, dst: ParachainComplex, name: str = "f"):
    """f b = b f, f B = B f and f T = T f (T = 1 on mixed targets)."""
    N = min(src.N, dst.N)
    for m in range(1, N + 1):
        require_equal(f"{name}∘b = b∘{name}", m, f[m - 1] @ src.b[m], dst.b[m] @ f[m], src.spaces, NotAParachainMap)
    for m in range(N):
        require_equal(f"{name}∘B = B∘{name}", m, f[m + 1] @ src.B[m], dst.B[m] @ f[m], src.spaces, NotAParachainMap)
    for m in range(N + 1):
        require_equal(f"{name}∘T = T∘{name}", m, f[m] @ src.T[m], dst.T[m] @ f[m], src.spaces, NotAParachainMap)


def nu_phi(G: FiniteGroup, phi, N: int) -> GradedMap:
    """Average over independent powers of φ in each slot: the projection onto ((ℚΓ)^φ)^{⊗(m+1)}."""
    phi = G.element(phi)
    r = G.element_order(phi)
    k = len(G)
    powers = [G.power(phi, l) for l in range(r)]
    out = {}
    for m in range(N + 1):
        w = Fraction(1, r ** (m + 1))
        entries = []
        for i in range(k ** (m + 1)):
            t = _decode(i, k, m + 1)
            for ls in product(powers, repeat=m + 1):
                entries.append((_encode(tuple(G.mul(l, x) for l, x in zip(ls, t)), k), i, w))
        out[m] = SparseMatrix.from_entries(k ** (m + 1), k ** (m + 1), entries)
    return GradedMap(0, out)


def _perm_sign(p) -> int:
    sign, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, L = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            L += 1
        if L % 2 == 0:
            sign = -sign
    return sign


def antisymmetrize(G: FiniteGroup, N: int, signed: bool = True) -> GradedMap:
    """ε(ψ_0, …, ψ_m) = (1/(m+1)!) Σ_{σ ∈ S_{m+1}} sign(σ) (ψ_{σ⁻¹(0)}, …, ψ_{σ⁻¹(m)}).

    ``signed=False`` drops the sign (kept only for comparison; it is not a chain map).
    """
    k = len(G)
    out = {}
    for m in range(N + 1):
        perms = list(permutations(range(m + 1)))
        w = Fraction(1, math.factorial(m + 1))
        entries = []
        for i in range(k ** (m + 1)):
            t = _decode(i, k, m + 1)
            for s in perms:
                inv = [0] * (m + 1)
                for a, b in enumerate(s):
                    inv[b] = a
                c = w * (_perm_sign(s) if signed else 1)
                entries.append((_encode(tuple(t[inv[j]] for j in range(m + 1)), k), i, c))
        out[m] = SparseMatrix.from_entries(k ** (m + 1), k ** (m + 1), entries)
    return GradedMap(0, out)


def flat_group_complex(G: FiniteGroup, N: int) -> MixedComplex:
    """C^♭(Γ) = (C(Γ), ∂, 0)."""
    X = TwistedGroupCyclic(G, 0, N, check=False)
    b = X.hochschild_b()
    B = {m: SparseMatrix.zero(X.spaces.dim(m + 1), X.spaces.dim(m)) for m in range(N)}
    return MixedComplex(X.spaces, b, GradedMap(1, B))


def eps_nu(G: FiniteGroup, phi, N: int, signed: bool = True, check: bool = True) -> GradedMap:
    """εν_φ, checked to be an idempotent parachain map C^φ(Γ) → C^♭(Γ)."""
    phi = G.element(phi)
    if G.element_order(phi) > 64:
        raise PhiNotFiniteOrder("φ must have finite order")
    E, V = antisymmetrize(G, N, signed), nu_phi(G, phi, N)
    F = GradedMap(0, {m: E[m] @ V[m] for m in range(N + 1)})
    if check:
        X = TwistedGroupCyclic(G, phi, N)
        for m in range(N + 1):
            if not (F[m] @ F[m] == F[m]):
                raise IdentityViolation("εν_φ is not idempotent", identity="(εν)² = εν", witness={"degree": m})
            if not (E[m] @ V[m] == V[m] @ E[m]):
                raise IdentityViolation("ε and ν_φ do not commute", identity="εν = νε", witness={"degree": m})
        check_parachain_map_loose(F, derive_parachain(X), _flat_with_T(G, N), "εν_φ")
    return F


def _flat_with_T(G, N):
    return flat_group_complex(G, N)


def eps_homology_matrices(G: FiniteGroup, N: int, M: GModule | None = None, signed: bool = True) -> dict:
    """Matrices of ε ⊗ 1 on H_n(G, M) for n ≤ N−1 in canonical bases (identity when ε ≃ 1)."""
    from .complexes import induced_homology_map
    M = M or GModule.trivial(G)
    E = antisymmetrize(G, N, signed)
    C = group_chain_complex(G, M, N)
    f = {p: lift_group_operator(G, E[p], p, p, M.dim, lambda g: M.mats[g]) for p in range(N + 1)}
    for p in range(1, N + 1):
        require_equal("ε∂ = ∂ε", p, f[p - 1] @ C.d[p], C.d[p] @ f[p], C.spaces, NotAParachainMap)
    H = homology(C)
    return {n: induced_homology_map(f[n], H, H, n) for n in H.reliable}


def eps_is_homotopic_to_identity(G: FiniteGroup, N: int, M: GModule | None = None, signed: bool = True) -> bool:
    try:
        mats = eps_homology_matrices(G, N, M, signed)
    except NotAParachainMap:
        return False
    return all(Mx.is_identity() for Mx in mats.values())


# -- coefficient systems ---------------------------------------------------------

class Coefficients:
    """A φ-parachain complex 𝒟 with Γ_φ-action and a Γ_φ-equivariant parachain map α : C^φ(A) → 𝒟.

    ``alpha`` None means 𝒟 = C^φ(A) and α = 1.
    """

    def __init__(self, complex: ParachainComplex, act, alpha: GradedMap | None = None, name: str = "C^phi(A)"):
        self.complex, self.act, self.alpha, self.name = complex, act, alpha, name

    def apply_alpha(self, m: int, M: SparseMatrix) -> SparseMatrix:
        return M if self.alpha is None else self.alpha[m] @ M


def identity_coefficients(Y: TwistedAlgebraCyclic) -> Coefficients:
    return Coefficients(derive_parachain(Y), Y.act_matrix)


# -- finite pipelines -----------------------------------------------------------

def _label(G, g):
    return G.elements[g]


def _dims(H: HomologyTable, degrees) -> list[int]:
    return [H.dims[n] for n in degrees]


def hp_estimate(M: ParachainComplex) -> dict:
    """Periodic estimate of a mixed complex from S on its truncated cyclic complex."""
    from .complexes import cyclic_complex
    _, info = s_stabilization(cyclic_complex(M))
    return {str(k): v for k, v in info["hp"].items()}


def _bicomplex_total(T: GammaTensorModule, check: bool):
    bc = T.to_parachain_bicomplex(check=check)
    return bc, totalize_bicomplex(bc, check=check)


def embedding_certificate(A, G, act, phi, N, weight, target: TwistedAlgebraCyclic) -> dict:
    """Ranks of μ_φ∘shuffle : Tot(C^φ(Γ_φ, A)) → C(A⋊Γ)_{[φ]} on b-homology (the degree-zero part of the S-map)."""
    cd, X, Y, T = centralizer_model(A, G, act, phi, N, weight, region="square")
    mu = mu_phi(cd, T, target, act)
    sh = shuffle(T)
    sp, btot, _ = _tot_b_complex(T)
    f = GradedMap(0, {m: mu[m] @ sh[m] for m in range(N + 1)})
    Hs = homology(ChainComplex(sp, btot, check=False))
    Ht = homology(ChainComplex(target.spaces, target.hochschild_b(), check=False))
    rep = homology_isomorphism_ranks(f, Hs, Ht, Hs.reliable)
    return {"map": "mu_phi . shuffle", "ranks": {str(n): list(v) for n, v in rep.items()}, "iso": is_iso_report(rep)}


def finite_centralizer_pipeline(A: Algebra, G: FiniteGroup, act: GroupAction, phi, N: int, weight: int | None = None,
                                coefficients=None, compare_degrees=None, certify: bool = True,
                                check: bool = True, direct: bool = True) -> dict:
    """HC(A⋊Γ)_{[φ]} against HC(𝒟^{Γ_φ}) through Tot(C^φ(Γ_φ, C^φ(A)))^♮ and π₀ ⊗ α."""
    cd, X, Y, T = centralizer_model(A, G, act, phi, N, weight, region="triangle", check=check)
    H = cd.centralizer
    coeff = coefficients(cd, Y) if callable(coefficients) else (coefficients or identity_coefficients(Y))
    D = coeff.complex
    inv = InvariantComplex(D, lambda m: [coeff.act(h, m) for h in range(len(H))], check=check)
    bc, tot = _bicomplex_total(T, check)
    off, _ = tot_layout(bc)
    F = {}
    for m in range(N + 1):
        blk = inv.restriction[m] @ coeff.apply_alpha(m, SparseMatrix.identity(Y.spaces.dim(m)))
        F[m] = block_matrix(inv.complex.spaces.dim(m), tot.spaces.dim(m), [(0, off[(0, m)], blk)])
    F = GradedMap(0, F)
    checks = []
    if check:
        check_parachain_map_loose(F, tot, inv.complex, "π₀⊗α")
        checks.append("pi0 (x) alpha is a mixed-complex map")
    Acr = _crossed(A, G, act)
    comp = class_component(Acr, cd.phi, N, weight, check=check) if direct else None
    H_direct = cyclic_homology(derive_parachain(comp, check=check)) if direct else None
    H_tot = cyclic_homology(tot)
    H_model = cyclic_homology(inv.complex)
    degrees = list(compare_degrees if compare_degrees is not None else range(N - 1))
    report = {"class": _label(G, cd.phi), "method": "finite", "weight": weight, "truncation": N,
              "degrees": degrees, "hc_direct": _dims(H_direct, degrees) if direct else None, "hc_tot": _dims(H_tot, degrees),
              "hc_model": _dims(H_model, degrees), "model": f"{coeff.name}^Gamma_phi"}
    if certify:
        fn = natural_map(F, tot, inv.complex)
        rep = homology_isomorphism_ranks(fn, H_tot, H_model, degrees)
        report["pi0_alpha_ranks"] = {str(n): list(v) for n, v in rep.items()}
        report["pi0_alpha_iso"] = is_iso_report(rep)
        checks.append("pi0 (x) alpha induces isomorphisms on HC" if report["pi0_alpha_iso"] else
                      "pi0 (x) alpha FAILS to induce isomorphisms on HC")
        if direct:
            report["embedding"] = embedding_certificate(A, G, act, cd.phi, N, weight, comp)
    report["hc_dims"] = report["hc_model"]
    report["hp_estimate"] = hp_estimate(inv.complex)
    report["agree"] = report["hc_tot"] == report["hc_model"] and (not direct or report["hc_direct"] == report["hc_model"])
    report["checks"] = checks
    return report


def flat_bicomplex(H: FiniteGroup, Dphi: InvariantComplex, act_inv, N: int, check: bool = True) -> ParachainBicomplex:
    """C^♭(H, 𝒟^φ): cells C_p(H) ⊗_H 𝒟^φ_q, horizontal (∂, 0, 1), vertical (b, B, 1)."""
    k = len(H)
    M = Dphi.complex
    cells = [(p, q) for p in range(N + 1) for q in range(N + 1 - p)]
    labels = {(p, q): [f"({','.join(['1'] + [H.elements[x] for x in _decode(r, k, p)])})⊗{y}"
                       for r in range(k ** p) for y in M.spaces.labels[q]] for (p, q) in cells}
    hb, hB, hT, vb, vB, vT = {}, {}, {}, {}, {}, {}
    for (p, q) in cells:
        n = M.spaces.dim(q)
        dim = k ** p * n
        hT[(p, q)] = SparseMatrix.identity(dim)
        vT[(p, q)] = SparseMatrix.identity(dim)
        if p >= 1:
            hb[(p, q)] = group_boundary(H, p, n, lambda g, q=q: act_inv(g, q))
        if q >= 1:
            vb[(p, q)] = block_diagonal(M.b[q], k ** p)
        if p + q + 1 <= N:
            hB[(p, q)] = SparseMatrix.zero(k ** (p + 1) * n, dim)
            vB[(p, q)] = block_diagonal(M.B[q], k ** p)
    return ParachainBicomplex(N, labels, hb, hB, hT, vb, vB, vT, check=check)


def finite_order_pipeline(A: Algebra, G: FiniteGroup, act: GroupAction, phi, N: int, weight: int | None = None,
                          coefficients=None, compare_degrees=None, certify: bool = True, spectral: bool = True,
                          pages: int = 3, signed: bool = True, check: bool = True, direct: bool = True) -> dict:
    """HC(A⋊Γ)_{[φ]} against HC(Tot C^♭(Γ_φ, 𝒟^φ)) through (εν_φ) ⊗ α, plus the three spectral sequences."""
    cd, X, Y, T = centralizer_model(A, G, act, phi, N, weight, region="triangle", check=check)
    H, phi_h = cd.centralizer, cd.phi_in_centralizer
    r = H.element_order(phi_h)
    coeff = coefficients(cd, Y) if callable(coefficients) else (coefficients or identity_coefficients(Y))
    D = coeff.complex
    powers = [H.power(phi_h, l) for l in range(r)]
    Dphi = InvariantComplex(D, lambda m: [coeff.act(h, m) for h in powers], check=check)
    act_inv = lambda g, q: Dphi.induced_action(coeff.act(g, q), q)
    flat = flat_bicomplex(H, Dphi, act_inv, N, check=check)
    tot_flat = totalize_bicomplex(flat, check=check)
    bc, tot = _bicomplex_total(T, check)
    checks = []
    EN = eps_nu(H, phi_h, N, signed=signed, check=check)
    if check:
        checks.append("eps nu_phi is an idempotent parachain map C^phi(Gamma) -> C^flat(Gamma)")
    # (εν_φ) ⊗ α on Tot, cell by cell
    off_s, _ = tot_layout(bc)
    off_t, _ = tot_layout(flat)
    k = len(H)
    F = {}
    for m in range(N + 1):
        blocks = []
        for p in range(m + 1):
            q = m - p
            ny = Y.spaces.dim(q)
            L = lift_group_operator(H, EN[p], p, p, ny, lambda g, q=q: Y.act_matrix(g, q))
            post = Dphi.restriction[q] @ coeff.apply_alpha(q, SparseMatrix.identity(ny))
            blocks.append((off_t[(p, q)], off_s[(p, q)], block_diagonal(post, k ** p) @ L))
        F[m] = block_matrix(tot_flat.spaces.dim(m), tot.spaces.dim(m), blocks)
    F = GradedMap(0, F)
    if check:
        check_parachain_map_loose(F, tot, tot_flat, "(εν_φ)⊗α")
        checks.append("(eps nu_phi) (x) alpha is a mixed-complex map on totalizations")
    Acr = _crossed(A, G, act)
    comp = class_component(Acr, cd.phi, N, weight, check=check) if direct else None
    H_direct = cyclic_homology(derive_parachain(comp, check=check)) if direct else None
    H_tot = cyclic_homology(tot)
    H_flat = cyclic_homology(tot_flat)
    degrees = list(compare_degrees if compare_degrees is not None else range(N - 1))
    report = {"class": _label(G, cd.phi), "method": "finite-order", "weight": weight, "truncation": N,
              "order": r, "degrees": degrees, "hc_direct": _dims(H_direct, degrees) if direct else None, "hc_tot": _dims(H_tot, degrees),
              "hc_model": _dims(H_flat, degrees), "model": f"Tot(C^flat(Gamma_phi, {coeff.name}^phi))"}
    if certify:
        rep = homology_isomorphism_ranks(natural_map(F, tot, tot_flat), H_tot, H_flat, degrees)
        report["eps_nu_alpha_ranks"] = {str(n): list(v) for n, v in rep.items()}
        report["eps_nu_alpha_iso"] = is_iso_report(rep)
        checks.append("(eps nu_phi) (x) alpha induces isomorphisms on HC" if report["eps_nu_alpha_iso"] else
                      "(eps nu_phi) (x) alpha FAILS to induce isomorphisms on HC")
    if spectral:
        report["spectral_sequences"] = flat_spectral_sequences(flat, H_direct, pages, check)
    report["hc_dims"] = report["hc_model"]
    report["hp_estimate"] = hp_estimate(tot_flat)
    report["agree"] = report["hc_tot"] == report["hc_model"] and (not direct or report["hc_direct"] == report["hc_model"])
    report["checks"] = checks
    return report


def flat_spectral_sequences(flat: ParachainBicomplex, H_direct: HomologyTable | None = None, pages: int = 3,
                            check: bool = True) -> dict:
    """Sequences I (rows of C^σ), II (columns of C^σ) and III (columns of C^wσ) of a mixed bicomplex."""
    tri_v = triangularize(flat, "sigma", check=check)
    tri_h = triangularize(flat, "wsigma", check=check)
    if check:
        compare_with_natural(tri_v, flat)
        compare_with_natural(tri_h, flat)
    out = {}
    for name, tri, filt in (("I", tri_v, "rows"), ("II", tri_v, "columns"), ("III", tri_h, "columns")):
        ss = spectral_sequence(tri, filt, pages=pages, check=check)
        d = ss.to_dict()
        if H_direct is not None:
            d["matches_direct"] = all(ss.infinity.total(n) == H_direct.dims[n] for n in ss.homology.reliable
                                      if n < len(H_direct.dims))
        out[name] = d
    return out


_CROSSED_CACHE: dict = {}


def _crossed(A, G, act):
    from .groups import crossed_product
    key = (id(A), id(G), id(act))
    if key not in _CROSSED_CACHE:
        _CROSSED_CACHE[key] = (crossed_product(A, G, act), A, G, act)
    return _CROSSED_CACHE[key][0]


# -- infinite order: the sigma model ------------------------------------------------

class SigmaModel:
    """Tot(C^σ(Γ̄, 𝒞)): ⊕_{p+q=m} C_p(Γ̄) ⊗_Γ̄ 𝒞_q with d† = ∂ + (−1)^p b + (−1)^p B(u ⌢ −) and S = u ⌢ −.

    ``sign='literal'`` uses −B(u ⌢ −) instead of (−1)^p B(u ⌢ −) (for comparison only).
    """

    def __init__(self, Q: FiniteGroup, u: Cochain, C: ParachainComplex, act, N: int | None = None,
                 sign: str = "p", check: bool = True):
        N = C.N if N is None else N
        self.Q, self.u, self.C, self.N, self.sign = Q, u, C, N, sign
        k = len(Q)
        cells = [(p, m - p) for m in range(N + 1) for p in range(m + 1)]
        self.cells = cells
        off, labels = {}, []
        for m in range(N + 1):
            o, lab = 0, []
            for p in range(m + 1):
                q = m - p
                off[(p, q)] = o
                o += k ** p * C.spaces.dim(q)
                lab.extend(f"({p},{q})({','.join(['1'] + [Q.elements[x] for x in _decode(r, k, p)])})⊗{y}"
                           for r in range(k ** p) for y in C.spaces.labels[q])
            labels.append(lab)
        self.offsets = off
        self.spaces = GradedModule(labels)
        self.bideg = [[(p, m - p) for p in range(m + 1) for _ in range(k ** p * C.spaces.dim(m - p))]
                      for m in range(N + 1)]
        dims = self.spaces.dims
        caps = {}
        d, S = {}, {}
        for m in range(N + 1):
            dblocks, sblocks = [], []
            for p in range(m + 1):
                q = m - p
                n = C.spaces.dim(q)
                o = off[(p, q)]
                sgn = -1 if p % 2 else 1
                if p >= 1:
                    dblocks.append((off[(p - 1, q)], o, group_boundary(Q, p, n, lambda g, q=q: act(g, q))))
                if q >= 1:
                    dblocks.append((off[(p, q - 1)], o, block_diagonal(C.b[q], k ** p).scale(sgn)))
                if p >= u.p:
                    key = (p, q)
                    caps[key] = cap_matrix(u, p, n)
                    sblocks.append((off[(p - u.p, q)], o, caps[key]))
                    if u.p == 2 and q + 1 <= N - (p - 2) and (p - 2, q + 1) in off and q < C.N:
                        bsign = sgn if sign == "p" else -1
                        dblocks.append((off[(p - 2, q + 1)], o,
                                        (block_diagonal(C.B[q], k ** (p - 2)) @ caps[key]).scale(bsign)))
            if m >= 1:
                d[m] = block_matrix(dims[m - 1], dims[m], dblocks)
            if m >= u.p:
                S[m] = block_matrix(dims[m - u.p], dims[m], sblocks)
        self.d, self.S = GradedMap(-1, d), GradedMap(-u.p, S)
        if check:
            self.check()

    def check(self):
        sp = self.spaces
        for m in range(2, self.N + 1):
            require_zero("(d†)² = 0", m, self.d[m - 1] @ self.d[m], sp, DSquaredNonzero)
        for m in range(self.u.p + 1, self.N + 1):
            require_equal("d†(u⌢) = (u⌢)d†", m, self.d[m - self.u.p] @ self.S[m], self.S[m - 1] @ self.d[m], sp)

    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.spaces, self.d, check=False)

    def smodule(self) -> ParaSModule:
        return ParaSModule(self.spaces, self.d, self.S, None, check=False)

    def filtered(self) -> FilteredComplex:
        return FilteredComplex(self.chain_complex(), [[c[0] for c in bd] for bd in self.bideg])


def sigma_model(Q: FiniteGroup, u: Cochain, C: ParachainComplex, act=None, N: int | None = None,
                sign: str = "p", pages: int = 3, check: bool = True) -> dict:
    """Homology, periodicity (u ⌢ −) on homology and the column spectral sequence of the sigma model."""
    act = act or (lambda g, q: SparseMatrix.identity(C.spaces.dim(q)))
    M = SigmaModel(Q, u, C, act, N, sign, check)
    if u.p == 2:
        Hh, info = s_stabilization(M.smodule())
        per = {str(n): [[str(x) for x in row] for row in Mx.to_dense()] for n, Mx in info["s_maps"].items()}
        hp = info["hp"]
        ranks = info["s_ranks"]
    else:
        Hh, per, hp, ranks = homology(M.chain_complex()), {}, {}, {}
    ss = spectral_sequence(M.filtered(), pages=pages, check=check)
    return {"model": M, "homology": Hh, "periodicity": per, "periodicity_ranks": ranks, "hp_estimate": hp,
            "spectral_sequence": ss}


def infinite_order_report(data: EulerCocycleData, C: ParachainComplex, act=None, N: int | None = None,
                          pages: int = 3, check: bool = True) -> dict:
    res = sigma_model(data.quotient, data.u, C, act, N, pages=pages, check=check)
    H = res["homology"]
    return {"method": "infinite-order", "quotient_order": len(data.quotient), "hc_dims": [H.dims[n] for n in H.reliable],
            "periodicity_ranks": {str(k): v for k, v in res["periodicity_ranks"].items()},
            "hp_estimate": {str(k): v for k, v in res["hp_estimate"].items()},
            "ss": res["spectral_sequence"].to_dict(), "euler_cocycle": data.to_dict(),
            "checks": ["(d+)^2 = 0", "d+ commutes with u cap -"] if check else []}
