"""Independent dense reference computations used to freeze expected values."""
from fractions import Fraction
from itertools import product


def dense_rank(rows) -> int:
    """Fraction Gaussian elimination on a list of rows."""
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def dense_null_dim(rows, ncols) -> int:
    return ncols - dense_rank(rows)


def _mul(structure, x, y):
    n = len(structure)
    out = [Fraction(0)] * n
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                if b:
                    for k, c in structure[i][j].items():
                        out[k] += a * b * c
    return out


def hochschild_dims(structure, N: int) -> list:
    """HH_n, n ≤ N−1, of an algebra from its structure constants by the unnormalized bar complex."""
    n = len(structure)
    bases = [list(product(range(n), repeat=m + 1)) for m in range(N + 1)]
    index = [{t: i for i, t in enumerate(b)} for b in bases]

    def e(i):
        v = [Fraction(0)] * n
        v[i] = Fraction(1)
        return v

    def bmat(m):
        rows = [[Fraction(0)] * len(bases[m]) for _ in bases[m - 1]]
        for col, t in enumerate(bases[m]):
            for j in range(m + 1):
                sign = (-1) ** j
                if j < m:
                    prod = _mul(structure, e(t[j]), e(t[j + 1]))
                    for k, c in enumerate(prod):
                        if c:
                            rows[index[m - 1][t[:j] + (k,) + t[j + 2:]]][col] += sign * c
                else:
                    prod = _mul(structure, e(t[m]), e(t[0]))
                    for k, c in enumerate(prod):
                        if c:
                            rows[index[m - 1][(k,) + t[1:m]]][col] += sign * c
        return rows

    ranks = {m: dense_rank(bmat(m)) for m in range(1, N + 1)}
    return [len(bases[m]) - ranks.get(m, 0) - ranks.get(m + 1, 0) for m in range(N)]


def coinvariant_dim(mats) -> int:
    """dim H_0(G, M) over ℚ = rank of the averaging operator (higher homology vanishes)."""
    n = len(mats[0])
    avg = [[sum(Fraction(M[i][j]) for M in mats) / len(mats) for j in range(n)] for i in range(n)]
    return dense_rank(avg)


def center_dim(structure) -> int:
    """dim of {z : z e_j = e_j z for all j}, by dense linear algebra."""
    n = len(structure)
    rows = []
    for j in range(n):
        for k in range(n):
            rows.append([Fraction(structure[i][j].get(k, 0)) - Fraction(structure[j][i].get(k, 0)) for i in range(n)])
    return dense_null_dim(rows, n)


def trace_form_rank(structure) -> int:
    """Rank of (x, y) ↦ Tr(L_{xy}) for the left regular representation."""
    n = len(structure)
    tr = [sum(Fraction(structure[i][k].get(k, 0)) for k in range(n)) for i in range(n)]
    return dense_rank([[sum(c * tr[k] for k, c in structure[i][j].items()) for j in range(n)] for i in range(n)])


def twisted_hh0_dim(structure, phi_inv) -> int:
    """dim A / span{a·b − (φ⁻¹b)·a} for basis elements a, b; ``phi_inv`` dense with columns φ⁻¹e_j."""
    n = len(structure)
    cols = []
    for a in range(n):
        for b in range(n):
            ea = [Fraction(int(i == a)) for i in range(n)]
            eb = [Fraction(int(i == b)) for i in range(n)]
            pb = [Fraction(phi_inv[i][b]) for i in range(n)]
            cols.append([x - y for x, y in zip(_mul(structure, ea, eb), _mul(structure, pb, ea))])
    return n - dense_rank(cols)
