import pytest
from hypothesis import given, strategies as st

from crossedhc.complexes import ChainComplex, GradedMap, homology, induced_homology_map
from crossedhc.crossed import TwistedAlgebraCyclic, TwistedGroupCyclic, tensor_over_gamma
from crossedhc.errors import IdentityViolation, NotCyclic
from crossedhc.groups import Algebra, FiniteGroup, GroupAction
from crossedhc.linalg import SparseMatrix, block_matrix, rank
from crossedhc.simplicial import (ParacyclicModule, alexander_whitney, check_ez_maps, derive_parachain,
                                  derived_operators, diagonal, shuffle)


def swap_action():
    Z2 = FiniteGroup.cyclic(2)
    A = Algebra.functions(2)
    return Z2, A, GroupAction.by_basis_permutation(Z2, A, lambda g: [0, 1] if g == 0 else [1, 0])


def test_group_b_is_group_boundary():
    X = TwistedGroupCyclic(FiniteGroup.cyclic(2), 0, 2)
    b, _, _ = derived_operators(X)
    idx = {lab: i for i, lab in enumerate(X.spaces.labels[0])}
    for j, lab in enumerate(X.spaces.labels[1]):
        p0, p1 = lab.split(",")
        expected = {}
        for key, c in ((p1, 1), (p0, -1)):
            expected[idx[key]] = expected.get(idx[key], 0) + c
        col = {i: v for i, v in b[1].columns()[j].items()}
        assert col == {i: v for i, v in expected.items() if v}


@pytest.mark.parametrize("make", [
    lambda: TwistedAlgebraCyclic(Algebra.field(), 4),
    lambda: TwistedAlgebraCyclic(Algebra.group_ring(FiniteGroup.cyclic(2)), 3),
    lambda: TwistedGroupCyclic(FiniteGroup.symmetric(3), 0, 2),
])
def test_cyclic_modules_have_trivial_T(make):
    P = make()
    for m in range(P.N + 1):
        assert P.T(m).is_identity()
    derive_parachain(P).check()


def test_twisted_group_T_is_translation_by_inverse():
    G = FiniteGroup.cyclic(4)
    X = TwistedGroupCyclic(G, 1, 3)
    _, _, T = derived_operators(X)
    for m in range(4):
        assert T[m] == X.act_matrix(G.inv(1), m)
        assert not T[m].is_identity()


def test_broken_t_is_rejected():
    P = TwistedAlgebraCyclic(Algebra.functions(2), 2)
    bad_t = dict(P.t.mats)
    bad_t[1] = bad_t[1].scale(2)
    with pytest.raises(IdentityViolation):
        ParacyclicModule(P.spaces, P.d, P.s, GradedMap(0, bad_t))


def test_cyclic_flag_is_enforced():
    X = TwistedGroupCyclic(FiniteGroup.cyclic(2), 1, 2, check=False)
    with pytest.raises(NotCyclic):
        ParacyclicModule(X.spaces, X.d, X.s, X.t, cyclic=True)


def test_diagonal_of_tensor_square_of_point():
    N = 3
    Q = Algebra.field()
    one = FiniteGroup.trivial()
    T = tensor_over_gamma(TwistedGroupCyclic(one, 0, N), TwistedAlgebraCyclic(Q, N, action=GroupAction.trivial(one, Q)))
    D = diagonal(T)
    assert D.spaces.dims == (1, 1, 1, 1)
    assert D.is_cyclic()


def test_diagonal_of_twisted_tensor_is_cyclic_and_swap_invariant():
    Z2, A, act = swap_action()
    N = 3
    T = tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N), TwistedAlgebraCyclic(A, N, act.mats[1], action=act))
    assert T.is_cylindrical()
    D = diagonal(T)
    assert D.is_cyclic()
    D.check()
    assert diagonal(T.swap(), check=False).spaces.dims == D.spaces.dims


def ez_instance(N=3):
    one = FiniteGroup.trivial()
    A = Algebra.group_ring(FiniteGroup.cyclic(2))
    return tensor_over_gamma(TwistedGroupCyclic(one, 0, N), TwistedAlgebraCyclic(A, N, action=GroupAction.trivial(one, A)))


def test_ez_maps_degree_zero_and_one():
    X = ez_instance()
    sh, aw = shuffle(X), alexander_whitney(X)
    assert sh[0].is_identity() and aw[0].is_identity()
    # degree 1 of Tot is C_{0,1} ⊕ C_{1,0}; AW∘shuffle is the identity up to degenerate terms
    M = (aw[1] @ sh[1]).to_dense()
    a, b = X.dim(0, 1), X.dim(1, 0)
    assert [r[:a] for r in M[:a]] == SparseMatrix.identity(a).to_dense()
    assert [r[a:] for r in M[a:]] == SparseMatrix.identity(b).to_dense()
    for deg, rows, cols in ((X.vdeg(0, 0, 0), M[:a], range(a, a + b)), (X.hdeg(0, 0, 0), M[a:], range(a))):
        block = SparseMatrix.from_dense([[r[c] for c in cols] for r in rows])
        both = block_matrix(deg.shape[0], deg.shape[1] + block.shape[1], [(0, 0, deg), (0, deg.shape[1], block)])
        assert rank(both) == rank(deg)


def test_ez_maps_are_inverse_on_homology():
    X = ez_instance(3)
    sp, btot, D, sh, aw = check_ez_maps(X)
    Htot = homology(ChainComplex(sp, btot))
    Hdiag = homology(ChainComplex(D.spaces, D.hochschild_b()))
    assert Htot.dims == Hdiag.dims == (2, 0, 0)
    for n in range(3):
        f = induced_homology_map(sh[n], Htot, Hdiag, n)
        g = induced_homology_map(aw[n], Hdiag, Htot, n)
        if Htot.dims[n]:
            assert (g @ f).is_identity() and (f @ g).is_identity()


@given(st.sampled_from([1, 2, 3]), st.sampled_from([None, "swap"]))
def test_t_equals_ds_and_T_matches_twist(n, twist):
    A = Algebra.functions(n)
    phi = None
    if twist and n > 1:
        phi = SparseMatrix.monomial(n, [((j + 1) % n, 1) for j in range(n)])
    P = TwistedAlgebraCyclic(A, 3, phi)
    for m in range(3):
        assert P.t[m] == P.d[m + 1] @ P.s[m]
    b, B, T = derived_operators(P)
    for m in range(1, 3):
        assert (b[m - 1] @ b[m]).is_zero() if m >= 2 else True
        lhs = b[m + 1] @ B[m] + B[m - 1] @ b[m]
        assert SparseMatrix.identity(P.spaces.dim(m)) - lhs == T[m]
