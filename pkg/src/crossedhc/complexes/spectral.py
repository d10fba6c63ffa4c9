"""Spectral sequences of finitely filtered, truncated chain complexes.

With F_s C the span of basis vectors of filtration index ≤ s,

    Z^r_s   = {x ∈ F_s C_n : dx ∈ F_{s−r} C_{n−1}}      (Z^r_s = F_s for r ≤ 0)
    Den^r_s = Z^{r−1}_{s−1} + d Z^{r−1}_{s+r−1}
    E^r_s   = Z^r_s / Den^r_s,   d^r : E^r_s → E^r_{s−r} induced by d.

Entries are reported as (s, n − s).  The truncated complex is treated as
a finite complex (d_{N+1} = 0), so the sequence converges to its homology
in every degree; degrees ≤ N−1 coincide with the honest homology.
"""
from __future__ import annotations

import json

from ..errors import FiltrationNotPreserved, IdentityViolation
from ..linalg import SparseMatrix, Subquotient, Subspace, image_of, induced_map, kernel, rank
from .chain import ChainComplex, HomologyTable, homology


class FilteredComplex:
    def __init__(self, chain: ChainComplex, filt: list[list[int]]):
        self.chain = chain
        self.filt = [list(f) for f in filt]
        for m in range(1, chain.N + 1):
            for i, j, v in chain.d[m].entries():
                if self.filt[m - 1][i] > self.filt[m][j]:
                    raise FiltrationNotPreserved(
                        f"d_{m} raises filtration", witness={
                            "degree": m, "source": chain.spaces.labels[m][j], "target": chain.spaces.labels[m - 1][i],
                            "source_index": self.filt[m][j], "target_index": self.filt[m - 1][i]})

    @property
    def N(self) -> int:
        return self.chain.N

    def span(self, n: int) -> tuple[int, int] | None:
        f = self.filt[n] if 0 <= n <= self.N else []
        return (min(f), max(f)) if f else None


class SSPage:
    """One page: dims and representatives of E^r_{s,t}, and d^r out of each entry."""

    def __init__(self, r: int, dims: dict, bases: dict, differentials: dict):
        self.r = r
        self.dims = dims
        self.bases = bases
        self.differentials = differentials

    def total(self, n: int) -> int:
        return sum(v for (s, t), v in self.dims.items() if s + t == n)

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def to_dict(self) -> dict:
        return {"r": self.r, "entries": [[s, t, v] for (s, t), v in sorted(self.dims.items()) if v],
                "differential_ranks": [[s, t, rank(M)] for (s, t), M in sorted(self.differentials.items())
                                       if not M.is_zero()]}


class SpectralSequence:
    def __init__(self, fc: FilteredComplex, pages: int):
        self.fc = fc
        self.N = fc.N
        self._Z: dict = {}
        self._den: dict = {}
        self._sq: dict = {}
        lo = min((fc.span(n)[0] for n in range(self.N + 1) if fc.span(n)), default=0)
        hi = max((fc.span(n)[1] for n in range(self.N + 1) if fc.span(n)), default=0)
        self.lo, self.hi = lo, hi
        self.r_inf = hi - lo + 2
        self.pages = [self._page(r) for r in range(pages + 1)]
        self.infinity = self._page(max(self.r_inf, pages + 1), with_differentials=False)
        self.homology = homology(fc.chain)

    # subspaces --------------------------------------------------------
    def _F(self, s: int, n: int) -> list[int]:
        return [i for i, f in enumerate(self.fc.filt[n]) if f <= s]

    def Z(self, r: int, s: int, n: int) -> Subspace:
        amb = self.fc.chain.spaces.dim(n)
        top = min(max(s, self.lo - 1), self.hi)
        # the boundary condition dx ∈ F_{s−r} keeps the unclamped s
        bound = None if r <= 0 or n == 0 else max(s - r, self.lo - 1)
        if bound is not None and bound >= self.hi:
            bound = None
        key = (top, bound, n)
        if key in self._Z:
            return self._Z[key]
        cols = self._F(top, n)
        if bound is None:
            Zs = Subspace.coordinate(amb, cols)
        else:
            rows = [i for i, f in enumerate(self.fc.filt[n - 1]) if f > bound]
            K = kernel(self.fc.chain.d[n].restrict(rows=rows, cols=cols))
            Zs = Subspace(amb, [{cols[j]: v for j, v in vec.items()} for vec in K.basis], [cols[p] for p in K.pivots])
        self._Z[key] = Zs
        return Zs

    def den(self, r: int, s: int, n: int) -> Subspace:
        key = (r, s, n)
        if key not in self._den:
            A = self.Z(r - 1, s - 1, n)
            if n + 1 <= self.N:
                A = A + image_of(self.fc.chain.d[n + 1], self.Z(r - 1, s + r - 1, n + 1))
            self._den[key] = A
        return self._den[key]

    def sq(self, r: int, s: int, n: int) -> Subquotient:
        key = (r, s, n)
        if key not in self._sq:
            self._sq[key] = Subquotient(self.Z(r, s, n), self.den(r, s, n))
        return self._sq[key]

    def _svalues(self, n: int):
        return sorted(set(self.fc.filt[n])) if 0 <= n <= self.N else []

    def _page(self, r: int, with_differentials: bool = True) -> SSPage:
        dims, bases, diffs = {}, {}, {}
        for n in range(self.N + 1):
            for s in self._svalues(n):
                q = self.sq(r, s, n)
                dims[(s, n - s)] = q.dim
                bases[(s, n - s)] = q.representatives
                if not with_differentials or n == 0:
                    continue
                t = s - r
                if t in self._svalues(n - 1):
                    tq = self.sq(r, t, n - 1)
                    diffs[(s, n - s)] = induced_map(self.fc.chain.d[n], q.Z, q.B, tq.Z, tq.B, q, tq)
                else:
                    diffs[(s, n - s)] = SparseMatrix.zero(0, q.dim)
        return SSPage(r, dims, bases, diffs)

    # checks -------------------------------------------------------------
    def check(self):
        """d^r∘d^r = 0 and E^{r+1} = H(E^r, d^r) dimensionwise, for consecutive computed pages."""
        for k, page in enumerate(self.pages):
            r = page.r
            for (s, t), M in page.differentials.items():
                tgt = (s - r, t + r - 1)
                M2 = page.differentials.get(tgt)
                if M2 is not None and M.nrows and M2.ncols == M.nrows and not (M2 @ M).is_zero():
                    raise IdentityViolation(f"d^{r}∘d^{r} ≠ 0 at {(s, t)}", identity="d^r d^r = 0")
            nxt = self.pages[k + 1] if k + 1 < len(self.pages) else None
            if nxt is None:
                continue
            for (s, t), dim in page.dims.items():
                out_rank = rank(page.differentials[(s, t)]) if (s, t) in page.differentials else 0
                src = (s + r, t - r + 1)
                in_rank = rank(page.differentials[src]) if src in page.differentials and page.differentials[src].nrows else 0
                if nxt.dims.get((s, t), 0) != dim - out_rank - in_rank:
                    raise IdentityViolation(f"E^{r + 1}{(s, t)} is not the homology of E^{r}", identity="E^{r+1} = H(E^r)")

    def convergence(self) -> dict:
        """Per degree n ≤ N−1: Σ dim E^∞ against dim H_n(Tot)."""
        out = {}
        for n in self.homology.reliable:
            out[n] = {"e_infinity": self.infinity.total(n), "homology": self.homology.dims[n]}
        return out

    def converges(self) -> bool:
        return all(v["e_infinity"] == v["homology"] for v in self.convergence().values())

    def to_dict(self) -> dict:
        return {"pages": [p.to_dict() for p in self.pages], "infinity": self.infinity.to_dict(),
                "convergence": {str(n): v for n, v in self.convergence().items()}, "converges": self.converges()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def spectral_sequence(obj, filtration: str = "columns", pages: int = 3, check: bool = True) -> SpectralSequence:
    """Pages E^0..E^pages (and E^∞) of a triangular S-module or filtered complex."""
    fc = obj if isinstance(obj, FilteredComplex) else obj.filtered(filtration)
    ss = SpectralSequence(fc, pages)
    if check:
        ss.check()
    return ss
