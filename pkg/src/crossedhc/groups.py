"""Finite groups, conjugacy data, unital algebras with group actions, crossed products."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from .errors import NotAGroup, NotAHomomorphism, NotAnAutomorphism, NotAssociative, NotUnital, ResourceGuard, SpecError
from .linalg import SparseMatrix, _frac

MAX_GROUP_ORDER = 64


class FiniteGroup:
    """Group given by a multiplication table; element 0 is the identity."""

    def __init__(self, elements, table, check: bool = True):
        self.elements = [str(e) for e in elements]
        self.table = [list(map(int, row)) for row in table]
        n = len(self.elements)
        if n > MAX_GROUP_ORDER:
            raise ResourceGuard("group order", n, MAX_GROUP_ORDER)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if check:
            self._check()
        self._inv = [next(j for j in range(n) if self.table[i][j] == 0) for i in range(n)]

    def _check(self):
        n = len(self.elements)
        if n == 0 or len(self.table) != n or any(len(r) != n for r in self.table):
            raise NotAGroup("table must be square of size |G|")
        if len(self.index) != n:
            raise NotAGroup("element labels are not distinct")
        for i in range(n):
            if sorted(self.table[i]) != list(range(n)) or sorted(r[i] for r in self.table) != list(range(n)):
                raise NotAGroup("table is not a Latin square", witness=self.elements[i])
            if self.table[0][i] != i or self.table[i][0] != i:
                raise NotAGroup("element 0 is not the identity", witness=self.elements[i])
        for a, b, c in product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise NotAssociative("multiplication is not associative",
                                witness=[self.elements[a], self.elements[b], self.elements[c]])

    # constructors --------------------------------------------------------
    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([f"g{i}" if i else "1" for i in range(n)], [[(i + j) % n for j in range(n)] for i in range(n)])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.cyclic(1)

    @classmethod
    def from_permutations(cls, perms, labels=None) -> "FiniteGroup":
        """Group of permutation tuples (closed under composition); identity first."""
        perms = [tuple(p) for p in perms]
        ident = tuple(range(len(perms[0])))
        perms = [ident] + [p for p in perms if p != ident]
        idx = {p: i for i, p in enumerate(perms)}
        # (pq)(x) = p(q(x))
        try:
            table = [[idx[tuple(p[q[x]] for x in range(len(p)))] for q in perms] for p in perms]
        except KeyError:
            raise NotAGroup("permutations are not closed under composition")
        labels = labels or ["1"] + ["".join(map(str, p)) for p in perms[1:]]
        return cls(labels, table)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        return cls.from_permutations(sorted(permutations(range(n))))

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of the n-gon, as permutations of its vertices."""
        rot = [tuple((k + i) % n for k in range(n)) for i in range(n)]
        ref = [tuple((i - k) % n for k in range(n)) for i in range(n)]
        return cls.from_permutations(rot + ref)

    @classmethod
    def from_json(cls, data: dict, path: str = "group") -> "FiniteGroup":
        if not isinstance(data, dict) or "elements" not in data or "table" not in data:
            raise SpecError(path, "expected {'elements': [...], 'table': [[...]]}")
        els = data["elements"]
        if len(els) > MAX_GROUP_ORDER:
            raise ResourceGuard("group order", len(els), MAX_GROUP_ORDER)
        idx = {str(e): i for i, e in enumerate(els)}
        table = []
        for i, row in enumerate(data["table"]):
            if len(row) != len(els):
                raise SpecError(f"{path}.table[{i}]", f"row has length {len(row)}, expected {len(els)}")
            out = []
            for j, x in enumerate(row):
                if isinstance(x, int) and not isinstance(x, bool):
                    out.append(x)
                elif str(x) in idx:
                    out.append(idx[str(x)])
                else:
                    raise SpecError(f"{path}.table[{i}][{j}]", f"unknown element {x!r}")
            table.append(out)
        return cls(els, table)

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "table": [list(r) for r in self.table]}

    # arithmetic ----------------------------------------------------------
    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def prod(self, *xs: int) -> int:
        r = 0
        for x in xs:
            r = self.table[r][x]
        return r

    def conj(self, g: int, x: int) -> int:
        """g x g⁻¹."""
        return self.table[self.table[g][x]][self._inv[g]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self._inv[a], -k
        r = 0
        for _ in range(k):
            r = self.table[r][a]
        return r

    def element(self, label) -> int:
        if isinstance(label, int):
            return label
        try:
            return self.index[str(label)]
        except KeyError:
            raise SpecError("phi", f"unknown group element {label!r}")

    def is_central(self, a: int) -> bool:
        return all(self.table[a][g] == self.table[g][a] for g in range(len(self)))

    def subgroup(self, members) -> tuple["FiniteGroup", list[int]]:
        """Subgroup on ``members`` (sorted, identity first) and its embedding."""
        emb = sorted(set(members))
        if emb[0] != 0:
            raise NotAGroup("subgroup must contain the identity")
        pos = {g: i for i, g in enumerate(emb)}
        try:
            table = [[pos[self.table[a][b]] for b in emb] for a in emb]
        except KeyError:
            raise NotAGroup("subset is not closed under multiplication")
        return FiniteGroup([self.elements[g] for g in emb], table, check=False), emb

    def conjugacy_classes(self) -> list[list[int]]:
        seen, out = set(), []
        for x in range(len(self)):
            if x in seen:
                continue
            cl = sorted({self.conj(g, x) for g in range(len(self))})
            seen.update(cl)
            out.append(cl)
        return out

    def __repr__(self):
        return f"FiniteGroup(order={len(self)})"


@dataclass
class ConjugacyData:
    phi: int
    klass: list            # elements of the class, sorted
    centralizer: FiniteGroup
    embedding: list        # centralizer index -> group index
    order: int             # order of phi
    group: FiniteGroup

    @property
    def phi_in_centralizer(self) -> int:
        return self.embedding.index(self.phi)

    def to_dict(self) -> dict:
        G = self.group
        return {"phi": G.elements[self.phi], "class": [G.elements[g] for g in self.klass],
                "centralizer": [G.elements[g] for g in self.embedding], "order": self.order}


def conjugacy_analysis(G: FiniteGroup, phi) -> ConjugacyData:
    phi = G.element(phi)
    klass = sorted({G.conj(g, phi) for g in range(len(G))})
    cent = [g for g in range(len(G)) if G.mul(g, phi) == G.mul(phi, g)]
    H, emb = G.subgroup(cent)
    return ConjugacyData(phi, klass, H, emb, G.element_order(phi), G)


# -- algebras ---------------------------------------------------------------

Vec = dict  # index -> Fraction


class Algebra:
    """Finite-dimensional unital algebra over ℚ by structure constants.

    ``structure[i][j]`` is a dict k -> c_{ij}^k.  With ``weights`` the algebra
    is weight-graded with top weight ``top_weight``; products of weight above
    the top are truncated to zero.
    """

    def __init__(self, labels, structure, unit: Vec, weights=None, top_weight=None, check: bool = True):
        self.labels = [str(l) for l in labels]
        self.dim = len(self.labels)
        self.structure = [[{k: _frac(c) for k, c in cell.items() if c} for cell in row] for row in structure]
        self.unit = {k: _frac(c) for k, c in unit.items() if c}
        self.weights = list(weights) if weights is not None else None
        self.top_weight = top_weight if weights is None or top_weight is not None else max(weights)
        if check:
            self.check()

    @property
    def graded(self) -> bool:
        return self.weights is not None

    def weight(self, i: int) -> int:
        return self.weights[i] if self.weights is not None else 0

    def basis_mul(self, i: int, j: int) -> Vec:
        return self.structure[i][j]

    def mul(self, u: Vec, v: Vec) -> Vec:
        out: dict = {}
        for i, a in u.items():
            row = self.structure[i]
            for j, b in v.items():
                ab = a * b
                for k, c in row[j].items():
                    x = out.get(k, 0) + ab * c
                    if x:
                        out[k] = x
                    else:
                        out.pop(k, None)
        return out

    def is_unit_basis(self) -> int | None:
        """Index i with unit = e_i, if any."""
        if len(self.unit) == 1:
            (i, c), = self.unit.items()
            if c == 1:
                return i
        return None

    def check(self):
        n = self.dim
        if len(self.structure) != n or any(len(r) != n for r in self.structure):
            raise SpecError("algebra.structure", "structure constants must be dim × dim × dim")
        for i in range(n):
            e = {i: Fraction(1)}
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                raise NotUnital("unit law fails", witness=self.labels[i])
        for i, j, k in product(range(n), repeat=3):
            ei, ej, ek = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
            if self.mul(self.mul(ei, ej), ek) != self.mul(ei, self.mul(ej, ek)):
                raise NotAssociative("(xy)z ≠ x(yz)", witness=[self.labels[i], self.labels[j], self.labels[k]])
        if self.graded:
            for i, j in product(range(n), repeat=2):
                for k in self.structure[i][j]:
                    if self.weights[k] != self.weights[i] + self.weights[j]:
                        raise SpecError("algebra.weights", f"{self.labels[i]}·{self.labels[j]} leaves weight "
                                                           f"{self.weights[i] + self.weights[j]}")

    # constructors ----------------------------------------------------------
    @classmethod
    def field(cls) -> "Algebra":
        return cls(["1"], [[{0: 1}]], {0: 1})

    @classmethod
    def functions(cls, n: int) -> "Algebra":
        """ℚ^n with pointwise product (idempotents e_0..e_{n−1})."""
        return cls([f"e{i}" for i in range(n)], [[{i: 1} if i == j else {} for j in range(n)] for i in range(n)],
                   {i: 1 for i in range(n)})

    @classmethod
    def group_ring(cls, G: FiniteGroup) -> "Algebra":
        n = len(G)
        return cls([f"[{e}]" for e in G.elements], [[{G.mul(i, j): 1} for j in range(n)] for i in range(n)], {0: 1})

    @classmethod
    def matrices(cls, n: int) -> "Algebra":
        idx = [(i, j) for i in range(n) for j in range(n)]
        pos = {ij: k for k, ij in enumerate(idx)}
        st = [[{pos[(a[0], b[1])]: 1} if a[1] == b[0] else {} for b in idx] for a in idx]
        return cls([f"E{i}{j}" for i, j in idx], st, {pos[(i, i)]: 1 for i in range(n)})

    @classmethod
    def polynomial(cls, nvars: int, top_weight: int, var_weights=None) -> "Algebra":
        """ℚ[x_1..x_n] truncated above ``top_weight`` (monomial basis, graded by degree)."""
        vw = list(var_weights or [1] * nvars)
        monos = []

        def rec(prefix, w):
            if len(prefix) == nvars:
                monos.append(tuple(prefix))
                return
            k = 0
            while w + k * vw[len(prefix)] <= top_weight:
                rec(prefix + [k], w + k * vw[len(prefix)])
                k += 1

        rec([], 0)
        monos.sort(key=lambda e: (sum(a * b for a, b in zip(e, vw)), tuple(-x for x in e)))
        pos = {e: i for i, e in enumerate(monos)}
        weights = [sum(a * b for a, b in zip(e, vw)) for e in monos]
        st = []
        for a in monos:
            row = []
            for b in monos:
                c = tuple(x + y for x, y in zip(a, b))
                row.append({pos[c]: 1} if c in pos else {})
            st.append(row)
        labels = [_mono_label(e) for e in monos]
        alg = cls(labels, st, {pos[(0,) * nvars]: 1}, weights, top_weight, check=False)
        alg.monomials = monos
        return alg

    @classmethod
    def from_json(cls, data: dict, path: str = "algebra") -> "Algebra":
        try:
            labels = data["basis"]
            n = len(labels)
            raw = data["structure"]
            st = []
            for i in range(n):
                row = []
                for j in range(n):
                    v = raw[i][j]
                    if len(v) != n:
                        raise SpecError(f"{path}.structure[{i}][{j}]", f"expected {n} coefficients")
                    row.append({k: _frac(c) for k, c in enumerate(v) if _frac(c)})
                st.append(row)
            unit = {k: _frac(c) for k, c in enumerate(data["unit"]) if _frac(c)}
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise SpecError(path, f"malformed algebra: {e}")
        weights = data.get("weights")
        return cls(labels, st, unit, weights, data.get("top_weight"))

    def to_json(self) -> dict:
        n = self.dim
        out = {"basis": list(self.labels),
               "structure": [[[str(self.structure[i][j].get(k, 0)) for k in range(n)] for j in range(n)] for i in range(n)],
               "unit": [str(self.unit.get(k, 0)) for k in range(n)]}
        if self.weights is not None:
            out["weights"] = list(self.weights)
            out["top_weight"] = self.top_weight
        return out

    def __repr__(self):
        return f"Algebra(dim={self.dim})"


def _mono_label(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{k}")
    return "*".join(parts) or "1"


class GroupAction:
    """Left action of a finite group on an algebra by unital automorphisms.

    ``mats[g]`` has columns the images g·e_j.
    """

    def __init__(self, G: FiniteGroup, A: Algebra, mats: list[SparseMatrix], check: bool = True):
        self.G, self.A = G, A
        self.mats = list(mats)
        if check:
            self.check()

    @classmethod
    def trivial(cls, G: FiniteGroup, A: Algebra) -> "GroupAction":
        return cls(G, A, [SparseMatrix.identity(A.dim)] * len(G), check=False)

    @classmethod
    def by_basis_permutation(cls, G: FiniteGroup, A: Algebra, perm_of) -> "GroupAction":
        """perm_of(g) -> list of basis images (g·e_j = e_{perm[j]})."""
        return cls(G, A, [SparseMatrix.monomial(A.dim, [(p, 1) for p in perm_of(g)]) for g in range(len(G))])

    @classmethod
    def generated(cls, G: FiniteGroup, A: Algebra, gen: int, M: SparseMatrix) -> "GroupAction":
        """Action of a cyclic group determined by the image of a generator."""
        mats = [None] * len(G)
        X, k = SparseMatrix.identity(A.dim), 0
        g = 0
        while mats[g] is None:
            mats[g] = X
            X = M @ X
            g = G.mul(gen, g)
        if any(m is None for m in mats):
            raise NotAHomomorphism("generator does not generate the group")
        return cls(G, A, mats)

    @classmethod
    def from_json(cls, G: FiniteGroup, A: Algebra, data: dict, path: str = "action") -> "GroupAction":
        mats = [None] * len(G)
        mats[0] = SparseMatrix.identity(A.dim)
        for key, m in (data or {}).items():
            if str(key) not in G.index:
                raise SpecError(f"{path}.{key}", "unknown group element")
            try:
                M = SparseMatrix.from_dense(m)
            except (TypeError, ValueError) as e:
                raise SpecError(f"{path}.{key}", f"malformed matrix: {e}")
            if M.shape != (A.dim, A.dim):
                raise SpecError(f"{path}.{key}", f"expected a {A.dim}×{A.dim} matrix")
            mats[G.index[str(key)]] = M
        # fill unspecified elements from products of given ones
        changed = True
        while changed:
            changed = False
            for a in range(len(G)):
                for b in range(len(G)):
                    c = G.mul(a, b)
                    if mats[c] is None and mats[a] is not None and mats[b] is not None:
                        mats[c] = mats[a] @ mats[b]
                        changed = True
        missing = [G.elements[g] for g in range(len(G)) if mats[g] is None]
        if missing:
            raise SpecError(path, f"action does not determine elements {missing}")
        return cls(G, A, mats)

    def check(self):
        G, A = self.G, self.A
        for g, M in enumerate(self.mats):
            if M.shape != (A.dim, A.dim):
                raise SpecError(f"action.{G.elements[g]}", "wrong matrix shape")
            if M.apply(A.unit) != A.unit:
                raise NotAnAutomorphism("action does not fix the unit", witness=G.elements[g])
            cols = M.columns()
            for i, j in product(range(A.dim), repeat=2):
                lhs = M.apply(A.basis_mul(i, j))
                rhs = A.mul(cols[i], cols[j])
                if lhs != rhs:
                    raise NotAnAutomorphism("g(xy) ≠ g(x)g(y)", witness=[G.elements[g], A.labels[i], A.labels[j]])
            if A.graded:
                for j, col in enumerate(cols):
                    if any(A.weights[i] != A.weights[j] for i in col):
                        raise NotAnAutomorphism("action does not preserve weights", witness=[G.elements[g], A.labels[j]])
        if not self.mats[0].is_identity():
            raise NotAHomomorphism("identity acts nontrivially", witness=G.elements[0])
        for a, b in product(range(len(G)), repeat=2):
            if self.mats[G.mul(a, b)] != self.mats[a] @ self.mats[b]:
                raise NotAHomomorphism("ρ(ab) ≠ ρ(a)ρ(b)", witness=[G.elements[a], G.elements[b]])

    def matrix(self, g: int) -> SparseMatrix:
        return self.mats[g]

    def apply(self, g: int, vec: Vec) -> Vec:
        return self.mats[g].apply(vec)

    def restrict(self, H: FiniteGroup, embedding: list[int]) -> "GroupAction":
        return GroupAction(H, self.A, [self.mats[g] for g in embedding], check=False)


def crossed_product(A: Algebra, G: FiniteGroup, act: GroupAction) -> Algebra:
    """A ⋊ G with basis e_i u_g (index i·|G| + g) and (a u_g)(b u_h) = a (g·b) u_{gh}."""
    n, k = A.dim, len(G)
    cols = [act.mats[g].columns() for g in range(k)]
    labels = [f"{A.labels[i]}u[{G.elements[g]}]" for i in range(n) for g in range(k)]
    st = []
    for i in range(n):
        for g in range(k):
            row = []
            for j in range(n):
                gb = cols[g][j]
                prod_ = A.mul({i: Fraction(1)}, gb)
                for h in range(k):
                    gh = G.mul(g, h)
                    row.append({c * k + gh: v for c, v in prod_.items()})
            st.append(row)
    unit = {i * k: c for i, c in A.unit.items()}
    weights = [A.weight(i) for i in range(n) for _ in range(k)] if A.graded else None
    out = Algebra(labels, st, unit, weights, A.top_weight if A.graded else None, check=False)
    out.crossed = (A, G, act)
    return out


def crossed_index(k: int, i: int, g: int) -> int:
    return i * k + g
