"""Linear finite-order actions on polynomial algebras, algebraic differential
forms on the fixed subspace, and the twisted HKR map α^φ."""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from itertools import combinations

from .complexes import GradedMap, GradedModule, MixedComplex, ParachainComplex, homology, ChainComplex
from .complexes import homology_isomorphism_ranks, is_iso_report
from .crossed import TwistedAlgebraCyclic, build_CphiA
from .errors import NotAHomomorphism, NotAnAutomorphism, NotAParachainMap, PhiNotFiniteOrder, SpecError
from .groups import Algebra, FiniteGroup, GroupAction
from .linalg import SparseMatrix, inverse, kernel
from .quasi_iso import Coefficients, check_parachain_map_loose, finite_centralizer_pipeline, finite_order_pipeline
from .simplicial import derive_parachain

ONE = Fraction(1)


# -- polynomials and forms ------------------------------------------------------
# A polynomial is {exponent tuple: coeff}; a form is {(exponent tuple, sorted dt-index tuple): coeff}.

def _poly_mul(f: dict, g: dict) -> dict:
    out: dict = {}
    for a, c in f.items():
        for b, e in g.items():
            k = tuple(x + y for x, y in zip(a, b))
            out[k] = out.get(k, 0) + c * e
    return {k: v for k, v in out.items() if v}


def _poly_pow(f: dict, n: int, nvars: int) -> dict:
    out = {(0,) * nvars: ONE}
    for _ in range(n):
        out = _poly_mul(out, f)
    return out


def substitute(poly: dict, rows, nvars_out: int) -> dict:
    """poly(x) with x_j = Σ_l rows[j][l] y_l."""
    lin = [{tuple(int(i == l) for i in range(nvars_out)): Fraction(c) for l, c in enumerate(row) if c} for row in rows]
    out: dict = {}
    for e, c in poly.items():
        term = {(0,) * nvars_out: Fraction(c)}
        for j, p in enumerate(e):
            if p:
                term = _poly_mul(term, _poly_pow(lin[j], p, nvars_out))
        for k, v in term.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _wedge_indices(I: tuple, J: tuple):
    """Sign and sorted union of dt_I ∧ dt_J, or (0, None) when they overlap."""
    if set(I) & set(J):
        return 0, None
    seq = list(I) + list(J)
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1) ** inv, tuple(sorted(seq))


def form_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (e1, I1), c1 in a.items():
        for (e2, I2), c2 in b.items():
            sgn, I = _wedge_indices(I1, I2)
            if sgn:
                k = (tuple(x + y for x, y in zip(e1, e2)), I)
                out[k] = out.get(k, 0) + sgn * c1 * c2
    return {k: v for k, v in out.items() if v}


def exterior_d(form: dict) -> dict:
    out: dict = {}
    for (e, I), c in form.items():
        for l, p in enumerate(e):
            if p and l not in I:
                sgn, J = _wedge_indices((l,), I)
                e2 = tuple(x - (i == l) for i, x in enumerate(e))
                k = (e2, J)
                out[k] = out.get(k, 0) + sgn * p * c
    return {k: v for k, v in out.items() if v}


def function_form(poly: dict) -> dict:
    return {(e, ()): c for e, c in poly.items()}


def pullback_form(form: dict, rows, nvars_out: int) -> dict:
    """Pull a form back along the linear map y ↦ x = rows·y (dx_j = Σ_l rows[j][l] dy_l)."""
    out: dict = {}
    for (e, I), c in form.items():
        term = function_form(substitute({e: c}, rows, nvars_out))
        for j in I:
            dx = {((0,) * nvars_out, (l,)): Fraction(v) for l, v in enumerate(rows[j]) if v}
            term = form_mul(term, dx)
        for k, v in term.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _monomials(nvars: int, total: int):
    if nvars == 0:
        if total == 0:
            yield ()
        return
    for a in range(total, -1, -1):
        for rest in _monomials(nvars - 1, total - a):
            yield (a,) + rest


def _mono_label(e, var="t") -> str:
    parts = [f"{var}{i}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p]
    return "*".join(parts) or "1"


def _form_label(e, I) -> str:
    return "".join([_mono_label(e) if (any(e) or not I) else ""] + [f"dt{i}" for i in I])


# -- linear actions -------------------------------------------------------------

def _dense(M) -> list[list[Fraction]]:
    if isinstance(M, SparseMatrix):
        return M.to_dense()
    return [[Fraction(x) for x in row] for row in M]


def _matmul(A, B):
    return [[sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _is_id(A) -> bool:
    return all(A[i][j] == (i == j) for i in range(len(A)) for j in range(len(A)))


def poly_algebra(nvars: int, top_weight: int) -> Algebra:
    """ℚ[x_0..x_{k−1}] truncated above ``top_weight`` with deg x_i = 1."""
    A = Algebra.polynomial(nvars, top_weight)
    A.nvars = nvars
    return A


def linear_action(G: FiniteGroup, A: Algebra, linear: dict, check: bool = True) -> GroupAction:
    """Action g·f = f∘M_g⁻¹ on a polynomial algebra from k×k matrices given on some elements.

    Missing elements are filled in by closure under products; inconsistent
    data raises NotAHomomorphism.
    """
    k = A.nvars
    mats = {G.element(g): _dense(M) for g, M in linear.items()}
    mats.setdefault(0, [[Fraction(int(i == j)) for j in range(k)] for i in range(k)])
    for g, M in list(mats.items()):
        if len(M) != k or any(len(r) != k for r in M):
            raise SpecError(f"linear_action.{G.elements[g]}", f"expected a {k}x{k} matrix")
    queue = deque(mats)
    while queue:
        g = queue.popleft()
        for h in list(mats):
            for a, b in ((g, h), (h, g)):
                gh = G.mul(a, b)
                P = _matmul(mats[a], mats[b])
                if gh in mats:
                    if mats[gh] != P:
                        raise NotAHomomorphism("M(gh) ≠ M(g)M(h)", witness=[G.elements[a], G.elements[b]])
                else:
                    mats[gh] = P
                    queue.append(gh)
    if len(mats) != len(G):
        missing = [G.elements[g] for g in range(len(G)) if g not in mats]
        raise SpecError("linear_action", f"matrices do not generate the group; missing {missing}")
    monos = A.monomials
    pos = {e: i for i, e in enumerate(monos)}
    alg_mats = []
    for g in range(len(G)):
        Minv = _dense(inverse(SparseMatrix.from_dense(mats[g])))
        cols = []
        for e in monos:
            img = substitute({e: ONE}, Minv, k)
            col = {}
            for e2, c in img.items():
                if e2 not in pos:
                    raise NotAnAutomorphism("linear substitution leaves the truncated algebra", witness=A.labels[pos[e]])
                col[pos[e2]] = c
            cols.append(col)
        alg_mats.append(SparseMatrix.from_columns(len(monos), cols))
    act = GroupAction(G, A, alg_mats, check=check)
    act.linear = [mats[g] for g in range(len(G))]
    return act


# -- fixed subspace and forms ------------------------------------------------------

class FixedForms:
    """Ω(X^φ) for X^φ = ker(M_φ − 1), in coordinates t with x = K t, graded by weight (weight of dt = 1)."""

    def __init__(self, nvars: int, M_phi, top_weight: int, N: int):
        M = _dense(M_phi)
        k = nvars
        r_ = 1
        P = M
        while not _is_id(P):
            P = _matmul(P, M)
            r_ += 1
            if r_ > 64:
                raise PhiNotFiniteOrder("M_φ has no finite order ≤ 64")
        self.order = r_
        shifted = SparseMatrix.from_dense([[M[i][j] - (i == j) for j in range(k)] for i in range(k)])
        K = kernel(shifted)
        self.dim = K.dim
        self.K = [[K.basis[l].get(j, Fraction(0)) for l in range(K.dim)] for j in range(k)]   # k × r
        self.pivots = K.pivots
        self.nvars, self.top_weight, self.N = k, top_weight, N

    def restrict_poly(self, poly: dict) -> dict:
        return substitute(poly, self.K, self.dim)

    def restrict_form(self, form: dict) -> dict:
        return pullback_form(form, self.K, self.dim)

    def basis(self, weight: int, degree: int) -> list:
        r = self.dim
        if degree > r or degree > weight:
            return []
        out = []
        for I in combinations(range(r), degree):
            for e in _monomials(r, weight - degree):
                out.append((e, I))
        return out

    def complex(self, weight: int) -> MixedComplex:
        """(Ω_w, 0, d) truncated at form degree N."""
        N = self.N
        bases = [self.basis(weight, q) for q in range(N + 1)]
        self.bases = bases
        idx = [{b: i for i, b in enumerate(bs)} for bs in bases]
        labels = [[_form_label(e, I) for e, I in bs] for bs in bases]
        b = {q: SparseMatrix.zero(len(bases[q - 1]), len(bases[q])) for q in range(1, N + 1)}
        B = {}
        for q in range(N):
            cols = []
            for key in bases[q]:
                img = exterior_d({key: ONE})
                cols.append({idx[q + 1][k]: v for k, v in img.items()})
            B[q] = SparseMatrix.from_columns(len(bases[q + 1]), cols)
        cx = MixedComplex(GradedModule(labels), GradedMap(-1, b), GradedMap(1, B))
        cx.form_bases, cx.form_index = bases, idx
        return cx

    def induced_linear(self, M_h) -> list[list[Fraction]]:
        """N_h with M_h K = K N_h (M_h commutes with M_φ, so it preserves the fixed subspace)."""
        MK = _matmul(_dense(M_h), self.K)
        out = []
        for l in range(self.dim):
            col = [MK[j][l] for j in range(self.nvars)]
            coords = [col[p] for p in self.pivots]
            out.append(coords)
        Nh = [[out[l][i] for l in range(self.dim)] for i in range(self.dim)]
        if _matmul(self.K, Nh) != MK:
            raise NotAnAutomorphism("group element does not preserve the fixed subspace")
        return Nh

    def action_matrix(self, M_h, cx: MixedComplex, q: int) -> SparseMatrix:
        """h·ω = pullback of ω along t ↦ N_h⁻¹ t."""
        if self.dim == 0:
            return SparseMatrix.identity(cx.spaces.dim(q))
        Nh_inv = _dense(inverse(SparseMatrix.from_dense(self.induced_linear(M_h))))
        cols = []
        for key in cx.form_bases[q]:
            img = pullback_form({key: ONE}, Nh_inv, self.dim)
            cols.append({cx.form_index[q][k]: v for k, v in img.items()})
        return SparseMatrix.from_columns(cx.spaces.dim(q), cols)


def fixed_subvariety(act_or_matrix, phi=None, top_weight: int = 2, N: int = 3) -> FixedForms:
    """Fixed subspace of φ; pass a LinearAction with an element, or a bare matrix."""
    if isinstance(act_or_matrix, GroupAction):
        M = act_or_matrix.linear[act_or_matrix.G.element(phi)]
        k = act_or_matrix.A.nvars
    else:
        M = _dense(act_or_matrix)
        k = len(M)
    return FixedForms(k, M, top_weight, N)


# -- the HKR map ------------------------------------------------------------------

def hkr_map(A: Algebra, Y: TwistedAlgebraCyclic, F: FixedForms, target: MixedComplex) -> GradedMap:
    """α^φ(a⁰⊗…⊗a^m) = (1/m!) a⁰ da¹ … da^m restricted to X^φ, on the basis of Y."""
    monos = A.monomials
    restricted = [function_form(F.restrict_poly({e: ONE})) for e in monos]
    diffs = [exterior_d(f) for f in restricted]
    out = {}
    for m in range(min(Y.N, target.N) + 1):
        w = Fraction(1, math.factorial(m))
        cols = []
        for t in Y.bases[m]:
            form = restricted[t[0]]
            for i in t[1:]:
                if not form:
                    break
                form = form_mul(form, diffs[i])
            col = {}
            for key, c in form.items():
                j = target.form_index[m].get(key)
                if j is None:
                    raise NotAParachainMap("α lands outside the weight piece", witness=_form_label(*key))
                col[j] = c * w
            cols.append(col)
        out[m] = SparseMatrix.from_columns(target.spaces.dim(m), cols)
    return GradedMap(0, out)


def check_hkr(A: Algebra, M_phi=None, N: int = 3, weight: int = 0, act: GroupAction | None = None) -> dict:
    """α^φ is a parachain map C^φ(A)_w → (Ω(X^φ)_w, 0, d) inducing isomorphisms on b_φ-homology."""
    k = A.nvars
    M = _dense(M_phi) if M_phi is not None else [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    F = FixedForms(k, M, A.top_weight, N)
    phi_alg = _algebra_matrix(A, M)
    Y = TwistedAlgebraCyclic(A, N, None if _is_id(M) else phi_alg, weight, act)
    P = derive_parachain(Y)
    Om = F.complex(weight)
    alpha = hkr_map(A, Y, F, Om)
    check_parachain_map_loose(alpha, P, Om, "α^φ")
    Hs = homology(ChainComplex(P.spaces, P.b, check=False))
    Ht = homology(ChainComplex(Om.spaces, Om.b, check=False))
    rep = homology_isomorphism_ranks(alpha, Hs, Ht, Hs.reliable)
    return {"weight": weight, "fixed_dim": F.dim, "hh_dims": list(Hs.dims), "forms_dims": list(Ht.dims),
            "ranks": {str(n): list(v) for n, v in rep.items()}, "iso": is_iso_report(rep)}


def _algebra_matrix(A: Algebra, M) -> SparseMatrix:
    """Matrix of f ↦ f∘M⁻¹ on the monomial basis."""
    monos = A.monomials
    pos = {e: i for i, e in enumerate(monos)}
    Minv = _dense(inverse(SparseMatrix.from_dense(M)))
    cols = []
    for e in monos:
        img = substitute({e: ONE}, Minv, A.nvars)
        cols.append({pos[e2]: c for e2, c in img.items()})
    return SparseMatrix.from_columns(len(monos), cols)


def hkr_coefficients(act: GroupAction, N: int, weight: int):
    """Coefficient builder for the pipelines: 𝒟 = Ω(X^φ)_w with the induced Γ_φ-action and α = α^φ."""
    A = act.A

    def build(cd, Y):
        F = FixedForms(A.nvars, act.linear[cd.phi], A.top_weight, N)
        Om = F.complex(weight)
        alpha = hkr_map(A, Y, F, Om)
        cache = {}

        def on_forms(h, q):
            if (h, q) not in cache:
                cache[(h, q)] = F.action_matrix(act.linear[cd.embedding[h]], Om, q)
            return cache[(h, q)]

        return Coefficients(Om, on_forms, alpha, name="Omega(X^phi)")

    return build


def varieties_pipeline(act: GroupAction, phi, N: int = 3, weights=None, method: str = "both",
                       check: bool = True) -> dict:
    """Weightwise comparison of HC(A⋊Γ)_{[φ]} with the differential-form models."""
    A, G = act.A, act.G
    weights = list(range(A.top_weight + 1)) if weights is None else list(weights)
    out = {"class": G.elements[G.element(phi)], "truncation": N, "top_weight": A.top_weight, "weights": {}}
    ok = True
    for w in weights:
        entry = {}
        coeff = hkr_coefficients(act, N, w)
        if method in ("both", "finite"):
            r = finite_centralizer_pipeline(A, G, act, phi, N, w, coefficients=coeff, certify=True, check=check)
            r.pop("embedding", None)
            entry["finite"] = r
            ok &= r["agree"] and r.get("pi0_alpha_iso", True)
        if method in ("both", "finite-order"):
            r = finite_order_pipeline(A, G, act, phi, N, w, coefficients=coeff, certify=True, spectral=False,
                                      check=check)
            entry["finite_order"] = r
            ok &= r["agree"] and r.get("eps_nu_alpha_iso", True)
        out["weights"][str(w)] = entry
    out["agree"] = bool(ok)
    return out
