from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from crossedhc.complexes import ChainComplex, cyclic_homology, homology, induced_homology_map
from crossedhc.crossed import (TwistedAlgebraCyclic, TwistedGroupCyclic, build_CphiA, build_CphiGamma,
                               centralizer_model, class_component, class_of_tuple, mu_inverse, mu_phi,
                               split_by_class, tensor_over_gamma)
from crossedhc.errors import PhiNotCentral
from crossedhc.groups import Algebra, FiniteGroup, GroupAction, crossed_product
from crossedhc.linalg import SparseMatrix, rank
from crossedhc.simplicial import derive_parachain, diagonal
from oracles import hochschild_dims, twisted_hh0_dim


def b_homology(P):
    return homology(ChainComplex(P.spaces, P.hochschild_b())).dims


def swap_data():
    Z2 = FiniteGroup.cyclic(2)
    A = Algebra.functions(2)
    return Z2, A, GroupAction.by_basis_permutation(Z2, A, lambda g: [0, 1] if g == 0 else [1, 0])


def test_cyclic_module_of_field_is_trivial():
    P = build_CphiA(Algebra.field(), None, 3)
    assert P.spaces.dims == (1, 1, 1, 1)
    for op in (P.d, P.s, P.t):
        for M in op.mats.values():
            assert M.is_identity()


def test_group_ring_hochschild_matches_bar_oracle():
    A = Algebra.group_ring(FiniteGroup.cyclic(2))
    P = build_CphiA(A, None, 3)
    assert b_homology(P) == tuple(hochschild_dims(A.structure, 3)) == (2, 0, 0)


def test_twisted_hochschild_of_swap_degree_zero():
    _, A, act = swap_data()
    P = build_CphiA(A, act.mats[1], 2)
    # the swap has no fixed points, so the twisted trace space is zero
    assert b_homology(P)[0] == twisted_hh0_dim(A.structure, act.mats[1].to_dense()) == 0
    assert b_homology(build_CphiA(A, None, 2))[0] == twisted_hh0_dim(A.structure, [[1, 0], [0, 1]]) == 2


def test_group_module_shapes_and_homology():
    Z2 = FiniteGroup.cyclic(2)
    X = build_CphiGamma(Z2, "1", 3)
    assert X.spaces.dims == (2, 4, 8, 16)
    assert b_homology(X) == (1, 0, 0)
    Xs = build_CphiGamma(Z2, "g1", 2)
    assert Xs.T(0) == SparseMatrix.from_dense([[0, 1], [1, 0]])
    one = build_CphiGamma(FiniteGroup.trivial(), 0, 3)
    assert one.spaces.dims == (1, 1, 1, 1)


def test_noncentral_phi_is_rejected():
    G = FiniteGroup.symmetric(3)
    t = next(g for g in range(len(G)) if g and G.element_order(g) == 2)
    with pytest.raises(PhiNotCentral):
        TwistedGroupCyclic(G, t, 2)


def test_tensor_over_trivial_group_is_Y():
    Z2, A, act = swap_data()
    one = FiniteGroup.trivial()
    Y = TwistedAlgebraCyclic(A, 3, action=GroupAction.trivial(one, A))
    T = tensor_over_gamma(TwistedGroupCyclic(one, 0, 3), Y)
    col = T.column(0)
    assert col.spaces.dims == Y.spaces.dims
    for q in range(1, 4):
        assert col.d[q] == Y.d[q]


def test_tensor_dims_and_cylindrical():
    Z2 = FiniteGroup.cyclic(2)
    Q = Algebra.field()
    Y = TwistedAlgebraCyclic(Q, 3, SparseMatrix.identity(1), action=GroupAction.trivial(Z2, Q))
    T = tensor_over_gamma(TwistedGroupCyclic(Z2, 1, 3), Y)
    for p, q in product(range(4), repeat=2):
        assert T.dim(p, q) == 2 ** p
    assert T.is_cylindrical()


def crossed_swap():
    Z2, A, act = swap_data()
    return Z2, A, act, crossed_product(A, Z2, act)


def test_split_counts_for_group_ring():
    Z2 = FiniteGroup.cyclic(2)
    Q = Algebra.field()
    Acr = crossed_product(Q, Z2, GroupAction.trivial(Z2, Q))
    parts = split_by_class(Acr, 2)
    assert parts[0].spaces.dims[1] == 2 and parts[1].spaces.dims[1] == 2
    for m in range(3):
        assert sum(P.spaces.dim(m) for P in parts.values()) == 2 ** (m + 1)
    unit = (0,) * 3
    assert unit in parts[0].index[2]


def test_split_of_matrix_like_crossed_product():
    _, _, _, Acr = crossed_swap()
    N = 3
    parts = split_by_class(Acr, N)
    whole = cyclic_homology(derive_parachain(TwistedAlgebraCyclic(Acr, N))).dims
    comps = {g: cyclic_homology(derive_parachain(P)).dims for g, P in parts.items()}
    assert whole == (1, 0, 1)
    assert comps[0] == whole
    assert comps[1] == (0, 0, 0)
    for m in range(N + 1):
        assert sum(P.spaces.dim(m) for P in parts.values()) == 4 ** (m + 1)


def test_mu_degree_zero_formula():
    Z2, A, act, Acr = crossed_swap()
    cd, X, Y, T = centralizer_model(A, Z2, act, 1, 2)
    target = class_component(Acr, 1, 2)
    mu = mu_phi(cd, T, target, act)
    # ψ₀ = 1, so (1) ⊗ e_j ↦ (σ·e_j) u_σ = e_{1−j} u_σ
    for j, (psi, yj) in enumerate(T.cell_basis(0, 0)):
        col = mu[0].columns()[j]
        tup = ((1 - yj) * 2 + 1,)
        assert col == {target.index[0][tup]: 1}


def test_mu_is_invertible_for_identity_class():
    Z2 = FiniteGroup.cyclic(2)
    Q = Algebra.field()
    act = GroupAction.trivial(Z2, Q)
    Acr = crossed_product(Q, Z2, act)
    cd, X, Y, T = centralizer_model(Q, Z2, act, 0, 3)
    target = class_component(Acr, 0, 3)
    mu = mu_phi(cd, T, target, act)
    inv = mu_inverse(T, target, act)
    for m in range(4):
        assert (mu[m] @ inv[m]).is_identity()
        assert (inv[m] @ mu[m]).is_identity()


@pytest.mark.parametrize("phi", [0, 1])
def test_mu_is_homology_isomorphism(phi):
    Z2, A, act, Acr = crossed_swap()
    N = 3
    cd, X, Y, T = centralizer_model(A, Z2, act, phi, N)
    target = class_component(Acr, phi, N)
    mu = mu_phi(cd, T, target, act)
    D = diagonal(T, check=False)
    Hs = homology(ChainComplex(D.spaces, D.hochschild_b()))
    Ht = homology(ChainComplex(target.spaces, target.hochschild_b()))
    assert Hs.dims == Ht.dims
    for n in range(3):
        assert rank(induced_homology_map(mu[n], Hs, Ht, n)) == Hs.dims[n]


@settings(max_examples=6)
@given(st.sampled_from([0, 1, 2]))
def test_mu_commutes_with_structure_for_rotation(phi):
    Z3 = FiniteGroup.cyclic(3)
    A = Algebra.functions(3)
    act = GroupAction.by_basis_permutation(Z3, A, lambda g: [(j + g) % 3 for j in range(3)])
    Acr = crossed_product(A, Z3, act)
    cd, X, Y, T = centralizer_model(A, Z3, act, phi, 2)
    target = class_component(Acr, phi, 2)
    mu_phi(cd, T, target, act, check=True)


@given(st.data())
def test_class_of_tuple_is_conjugation_stable(data):
    G = FiniteGroup.symmetric(3)
    Q = Algebra.field()
    Acr = crossed_product(Q, G, GroupAction.trivial(G, Q))
    t = tuple(data.draw(st.lists(st.integers(0, 5), min_size=1, max_size=4)))
    rotated = t[1:] + t[:1]
    g, h = class_of_tuple(Acr, t), class_of_tuple(Acr, rotated)
    assert any(G.conj(x, g) == h for x in range(6))
