from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crossedhc.complexes import (ChainComplex, FilteredComplex, GradedMap, GradedModule, MixedComplex,
                                 ParachainComplex, ParaSModule, bicomplex_from_parts, compare_with_natural,
                                 cyclic_complex, cyclic_homology, homology, lambda_complex, s_stabilization,
                                 spectral_sequence, tensor_smodule_mixed, totalize_bicomplex, triangularize)
from crossedhc.crossed import TwistedAlgebraCyclic, TwistedGroupCyclic, tensor_over_gamma
from crossedhc.errors import DSquaredNonzero, FiltrationNotPreserved, IdentityViolation
from crossedhc.groups import Algebra, FiniteGroup, GroupAction
from crossedhc.linalg import SparseMatrix
from crossedhc.simplicial import derive_parachain


def point(N):
    """ℚ in degree 0, zero above, b = B = 0."""
    sp = GradedModule([["1"]] + [[] for _ in range(N)])
    b = {m: SparseMatrix.zero(sp.dim(m - 1), sp.dim(m)) for m in range(1, N + 1)}
    B = {m: SparseMatrix.zero(sp.dim(m + 1), sp.dim(m)) for m in range(N)}
    return MixedComplex(sp, GradedMap(-1, b), GradedMap(1, B))


def test_acyclic_and_zero_differential():
    sp = GradedModule([["a"], ["b"]])
    assert homology(ChainComplex(sp, GradedMap(-1, {1: SparseMatrix.identity(1)}))).dims == (0,)
    sp2 = GradedModule([["a", "b"], ["c"], ["d", "e", "f"]])
    d = GradedMap(-1, {1: SparseMatrix.zero(2, 1), 2: SparseMatrix.zero(1, 3)})
    assert homology(ChainComplex(sp2, d)).dims == (2, 1)


def test_bad_differential_is_rejected():
    sp = GradedModule([["a"], ["b"], ["c"]])
    one = SparseMatrix.identity(1)
    with pytest.raises(IdentityViolation):
        ChainComplex(sp, GradedMap(-1, {1: one, 2: one}))


def test_cyclic_complex_of_point():
    N = 6
    P = cyclic_complex(point(N))
    assert P.spaces.dims == (1, 0, 1, 0, 1, 0, 1)
    assert homology(P.chain_complex()).dims == (1, 0, 1, 0, 1, 0)


def test_b_only_decomposes():
    C = derive_parachain(TwistedAlgebraCyclic(Algebra.functions(2), 4))
    zeroB = MixedComplex(C.spaces, C.b, GradedMap(1, {m: SparseMatrix.zero(C.spaces.dim(m + 1), C.spaces.dim(m))
                                                      for m in range(4)}))
    hh = homology(ChainComplex(C.spaces, C.b)).dims
    hc = cyclic_homology(zeroB).dims
    assert list(hc) == [sum(hh[n - 2 * j] for j in range(n // 2 + 1)) for n in range(4)]


def test_parachain_with_nontrivial_T_has_nonzero_square():
    X = TwistedGroupCyclic(FiniteGroup.cyclic(2), 1, 3)
    M = derive_parachain(X)
    P = cyclic_complex(M)
    sq = P.d[1] @ P.d[2]
    assert not sq.is_zero()
    with pytest.raises(IdentityViolation):
        P.chain_complex()


def test_lambda_complex_examples():
    C = TwistedAlgebraCyclic(Algebra.field(), 4)
    lam = lambda_complex(C)
    assert lam.spaces.dims == (1, 0, 1, 0, 1)
    assert homology(lam).dims == (1, 0, 1, 0)
    G = TwistedGroupCyclic(FiniteGroup.cyclic(2), 0, 4)
    Agr = TwistedAlgebraCyclic(Algebra.group_ring(FiniteGroup.cyclic(2)), 4)
    assert homology(lambda_complex(Agr)).dims == (2, 0, 2, 0)
    assert homology(lambda_complex(G)).dims == cyclic_homology(derive_parachain(G)).dims


def test_totalization_of_twisted_tensor_is_mixed():
    Z2 = FiniteGroup.cyclic(2)
    Q = Algebra.field()
    T = tensor_over_gamma(TwistedGroupCyclic(Z2, 1, 4), TwistedAlgebraCyclic(Q, 4, None, action=GroupAction.trivial(Z2, Q)),
                          4, region="triangle")
    tot = totalize_bicomplex(T.to_parachain_bicomplex())
    assert tot.is_mixed()
    tot.check()


def test_tensor_square_of_point_is_point():
    N = 3
    P = point(N)
    labels = {(p, q): (["1"] if p == 0 and q == 0 else []) for p in range(N + 1) for q in range(N + 1 - p)}

    def ops(p, q, horizontal):
        dim = len(labels[(p, q)])
        src = (p - 1, q) if horizontal else (p, q - 1)
        up = (p + 1, q) if horizontal else (p, q + 1)
        b = SparseMatrix.zero(len(labels.get(src, [])), dim)
        B = SparseMatrix.zero(len(labels.get(up, [])), dim)
        return b, B, SparseMatrix.identity(dim)

    bc = bicomplex_from_parts(N, lambda p, q: ops(p, q, True), lambda p, q: ops(p, q, False), labels)
    tot = totalize_bicomplex(bc)
    assert tot.spaces.dims == P.spaces.dims
    assert cyclic_homology(tot).dims == cyclic_homology(P).dims


def test_triangularizations_agree_and_match_natural():
    Z3 = FiniteGroup.cyclic(3)
    Q = Algebra.field()
    T = tensor_over_gamma(TwistedGroupCyclic(Z3, 1, 4), TwistedAlgebraCyclic(Q, 4, None, action=GroupAction.trivial(Z3, Q)),
                          4, region="triangle")
    bc = T.to_parachain_bicomplex()
    dims = []
    for which in ("wsigma", "sigma"):
        tri = triangularize(bc, which)
        compare_with_natural(tri, bc)
        dims.append(homology(tri.total().chain_complex()).dims)
    assert dims[0] == dims[1] == cyclic_homology(totalize_bicomplex(bc)).dims


def test_tensor_smodule_mixed_identity():
    P = cyclic_complex(point(4))
    C = derive_parachain(TwistedAlgebraCyclic(Algebra.functions(2), 4))
    tri = tensor_smodule_mixed(P, C)
    tri.check()


def test_spectral_sequence_single_column():
    sp = GradedModule([["a", "b"], ["c"], ["d"]])
    d = GradedMap(-1, {1: SparseMatrix.from_dense([[1], [0]]), 2: SparseMatrix.zero(1, 1)})
    fc = FilteredComplex(ChainComplex(sp, d), [[0, 0], [0], [0]])
    ss = spectral_sequence(fc, pages=3)
    assert ss.pages[2].dims == ss.infinity.dims
    assert ss.converges()


def test_spectral_sequence_rejects_bad_filtration():
    sp = GradedModule([["a"], ["b"]])
    d = GradedMap(-1, {1: SparseMatrix.identity(1)})
    with pytest.raises(FiltrationNotPreserved):
        FilteredComplex(ChainComplex(sp, d), [[1], [0]])


def test_spectral_pages_shrink():
    Z2 = FiniteGroup.cyclic(2)
    A = Algebra.functions(2)
    act = GroupAction.by_basis_permutation(Z2, A, lambda g: [0, 1] if g == 0 else [1, 0])
    T = tensor_over_gamma(TwistedGroupCyclic(Z2, 1, 4), TwistedAlgebraCyclic(A, 4, act.mats[1], action=act), 4,
                          region="triangle")
    bc = T.to_parachain_bicomplex()
    for which, filt, other in (("sigma", "rows", "columns"), ("wsigma", "columns", "rows")):
        tri = triangularize(bc, which)
        with pytest.raises(FiltrationNotPreserved):
            spectral_sequence(tri, other)
        ss = spectral_sequence(tri, filt, pages=4)
        for a, b in zip(ss.pages, ss.pages[1:]):
            for key, v in b.dims.items():
                assert v <= a.dims.get(key, 0)
        assert ss.converges()


def test_s_stabilization_of_point():
    H, info = s_stabilization(cyclic_complex(point(6)))
    assert info["hp"][0]["stabilized"] and info["hp"][0]["estimate"] == 1
    assert info["hp"][1]["stabilized"] and info["hp"][1]["estimate"] == 0
    M = info["s_maps"][4]
    assert M.shape == (1, 1) and not M.is_zero()


def test_s_stabilization_inconclusive_when_short():
    _, info = s_stabilization(cyclic_complex(point(4)))
    assert "inconclusive" in info["hp"][0]["note"]


def test_zero_S_gives_zero_estimate():
    N = 8
    sp = GradedModule([["x"]] + [[] for _ in range(N)])
    d = GradedMap(-1, {m: SparseMatrix.zero(sp.dim(m - 1), sp.dim(m)) for m in range(1, N + 1)})
    S = GradedMap(-2, {m: SparseMatrix.zero(sp.dim(m - 2), sp.dim(m)) for m in range(2, N + 1)})
    _, info = s_stabilization(ParaSModule(sp, d, S))
    # H = ℚ in degree 0 only; both parities stabilize at zero once the top range is clear of degree 0
    assert info["hp"][0] == {"top_degree": 6, "stabilized": True, "estimate": 0}
    assert info["hp"][1]["estimate"] == 0


@given(st.integers(2, 4))
def test_homology_is_truncation_stable(N):
    A = Algebra.functions(2)
    lo = cyclic_homology(derive_parachain(TwistedAlgebraCyclic(A, N))).dims
    hi = cyclic_homology(derive_parachain(TwistedAlgebraCyclic(A, N + 1))).dims
    assert hi[:N] == lo
