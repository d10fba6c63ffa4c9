from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crossedhc.errors import NotAChainMapOnSubspaces, NotContained
from crossedhc.linalg import (SparseMatrix, Subquotient, Subspace, image, induced_map, inverse, kernel, rank,
                              subquotient_dim)
from oracles import dense_rank

small = st.integers(-3, 3)


def matrices(max_rows=8, max_cols=8, density=0.4):
    @st.composite
    def build(draw):
        r = draw(st.integers(1, max_rows))
        c = draw(st.integers(1, max_cols))
        rows = [[draw(small) if draw(st.floats(0, 1)) < density else 0 for _ in range(c)] for _ in range(r)]
        return rows
    return build()


def test_rank_basic():
    assert rank(SparseMatrix.identity(3)) == 3
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_kernel_basic():
    assert kernel(SparseMatrix.zero(2, 3)).dim == 3
    assert kernel(SparseMatrix.identity(4)).dim == 0
    K = kernel(SparseMatrix.from_dense([[1, 1]]))
    assert K == Subspace.span(2, [{0: 1, 1: -1}])


def test_stored_representation_is_sparse_and_sorted():
    M = SparseMatrix.from_entries(3, 3, [(2, 1, 5), (0, 2, 0), (0, 0, Fraction(1, 2)), (2, 1, -5)])
    assert M.entries() == [(0, 0, Fraction(1, 2))]


@given(matrices())
def test_rank_matches_dense_oracle(rows):
    assert rank(SparseMatrix.from_dense(rows)) == dense_rank(rows)


@given(matrices())
def test_rank_nullity(rows):
    M = SparseMatrix.from_dense(rows)
    K = kernel(M)
    assert rank(M) + K.dim == M.ncols
    for v in K.basis:
        assert not M.apply(v)


@given(matrices())
def test_kernel_is_canonical(rows):
    M = SparseMatrix.from_dense(rows)
    a, b = kernel(M), kernel(SparseMatrix.from_dense(rows))
    assert a.basis == b.basis and a.pivots == b.pivots


@given(matrices(), st.randoms(use_true_random=False))
def test_span_is_basis_independent(rows, rnd):
    M = SparseMatrix.from_dense(rows)
    cols = M.columns()
    shuffled = list(cols)
    rnd.shuffle(shuffled)
    assert Subspace.span(M.nrows, cols) == Subspace.span(M.nrows, shuffled)
    assert image(M).dim == rank(M)


def test_random_fifty_by_fifty_against_oracle():
    import random
    rnd = random.Random(7)
    rows = [[rnd.choice([0, 0, 0, 0, 1, -1, 2]) for _ in range(50)] for _ in range(50)]
    assert rank(SparseMatrix.from_dense(rows)) == dense_rank(rows)


def test_rank_against_oracle_up_to_200_columns():
    import random
    rnd = random.Random(11)
    for ncols in (60, 120, 200):
        rows = [[rnd.choice([0] * 12 + [1, -1, 3]) for _ in range(ncols)] for _ in range(40)]
        assert rank(SparseMatrix.from_dense(rows)) == dense_rank(rows)


def test_subquotient_dim():
    Z = Subspace.whole(2)
    assert subquotient_dim(Z, Subspace.zero(2)) == 2
    assert subquotient_dim(Z, Z) == 0
    with pytest.raises(NotContained):
        subquotient_dim(Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1]))


def test_induced_map_identity_and_zero():
    Z, B = Subspace.whole(3), Subspace.coordinate(3, [0])
    I = induced_map(SparseMatrix.identity(3), Z, B, Z, B)
    assert I.is_identity() and I.shape == (2, 2)
    assert induced_map(SparseMatrix.zero(3, 3), Z, B, Z, B).is_zero()


def test_induced_map_rejects_non_chain_map():
    Z, B = Subspace.whole(2), Subspace.coordinate(2, [0])
    swap = SparseMatrix.from_dense([[0, 1], [1, 0]])
    with pytest.raises(NotAChainMapOnSubspaces):
        induced_map(swap, Z, B, Z, B)


def test_subquotient_class_of():
    Q = Subquotient(Subspace.whole(3), Subspace.span(3, [{0: 1, 1: 1}]))
    assert Q.dim == 2
    assert Q.class_of({0: 1, 1: 1}) == [0, 0]


@given(st.integers(1, 5), st.integers(0, 10 ** 6))
def test_inverse_of_unipotent(n, seed):
    import random
    rnd = random.Random(seed)
    M = SparseMatrix.from_dense([[1 if i == j else (rnd.randint(-2, 2) if j > i else 0) for j in range(n)]
                                 for i in range(n)])
    assert (inverse(M) @ M).is_identity()
