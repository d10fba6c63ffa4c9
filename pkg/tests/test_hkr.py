from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crossedhc.crossed import TwistedAlgebraCyclic
from crossedhc.errors import NotAHomomorphism
from crossedhc.groups import FiniteGroup
from crossedhc.hkr import (FixedForms, check_hkr, exterior_d, fixed_subvariety, hkr_map, linear_action, poly_algebra,
                           pullback_form, varieties_pipeline)
from crossedhc.linalg import rank

Z2 = FiniteGroup.cyclic(2)
SWAP = [[0, 1], [1, 0]]


def forms(nvars, max_exp=3, max_terms=4):
    key = st.tuples(st.tuples(*[st.integers(0, max_exp)] * nvars),
                    st.sets(st.integers(0, nvars - 1), max_size=nvars).map(lambda s: tuple(sorted(s))))
    return st.dictionaries(key, st.integers(-5, 5).filter(bool).map(Fraction), max_size=max_terms)


@given(forms(3))
def test_d_squared_is_zero(w):
    assert exterior_d(exterior_d(w)) == {}


@given(forms(2))
def test_restriction_commutes_with_d(w):
    F = fixed_subvariety(SWAP, top_weight=6)
    assert F.restrict_form(exterior_d(w)) == exterior_d(F.restrict_form(w))


def test_identity_fixes_everything():
    F = fixed_subvariety([[1, 0], [0, 1]])
    assert F.dim == 2
    w = {((1, 2), (0,)): Fraction(3)}
    assert F.restrict_form(w) == w


def test_sign_has_point_fixed_set():
    F = fixed_subvariety([[-1]], top_weight=2, N=3)
    assert F.dim == 0
    assert F.complex(0).spaces.dims == (1, 0, 0, 0)
    assert F.complex(1).spaces.dims == (0, 0, 0, 0)


def test_swap_restriction_of_x0_dx1():
    F = fixed_subvariety(SWAP)
    assert F.dim == 1
    assert F.restrict_form({((1, 0), (1,)): Fraction(1)}) == {((1,), (0,)): 1}


def alpha_setup(weight, N=3):
    A = poly_algebra(1, 2)
    F = FixedForms(1, [[1]], 2, N)
    Y = TwistedAlgebraCyclic(A, N, None, weight)
    Om = F.complex(weight)
    return A, Y, Om, hkr_map(A, Y, F, Om)


def test_alpha_on_x_tensor_x_and_unit():
    A, Y, Om, alpha = alpha_setup(2)
    x = A.monomials.index((1,))
    j = Y.index[1][(x, x)]
    assert alpha[1].columns()[j] == {Om.form_index[1][((1,), (0,))]: 1}
    A, Y, Om, alpha = alpha_setup(0)
    one = A.monomials.index((0,))
    assert alpha[0].columns()[Y.index[0][(one,)]] == {0: 1}


def test_weight_two_first_hochschild_group():
    A = poly_algebra(1, 2)
    rep = check_hkr(A, None, 3, 2)
    assert rep["hh_dims"][1] == rep["forms_dims"][1] == 1
    assert rep["iso"]


@pytest.mark.parametrize("nvars,M", [(1, [[1]]), (1, [[-1]]), (2, SWAP)])
@pytest.mark.parametrize("weight", [0, 1, 2])
def test_hkr_is_quasi_isomorphism(nvars, M, weight):
    A = poly_algebra(nvars, 2)
    assert check_hkr(A, M, 3, weight)["iso"]


@pytest.mark.parametrize("weight", [0, 1, 2])
def test_hkr_is_onto_forms(weight):
    A = poly_algebra(2, 2)
    F = FixedForms(2, [[1, 0], [0, 1]], 2, 3)
    Y = TwistedAlgebraCyclic(A, 3, None, weight)
    Om = F.complex(weight)
    alpha = hkr_map(A, Y, F, Om)
    for q in range(3):
        assert rank(alpha[q]) == Om.spaces.dim(q)


def test_linear_action_consistency():
    A = poly_algebra(1, 2)
    act = linear_action(Z2, A, {"g1": [[-1]]})
    assert act.linear[1] == [[-1]]
    with pytest.raises(NotAHomomorphism):
        linear_action(Z2, A, {"g1": [[2]]})


def test_varieties_pipeline_sign_action():
    A = poly_algebra(1, 2)
    act = linear_action(Z2, A, {"g1": [[-1]]})
    sig = varieties_pipeline(act, 1, 3)
    assert sig["agree"]
    assert sig["weights"]["0"]["finite"]["hc_model"] == [1, 0]
    assert sig["weights"]["1"]["finite"]["hc_model"] == [0, 0]
    ident = varieties_pipeline(act, 0, 3)
    assert ident["agree"]
    assert [ident["weights"][w]["finite"]["hc_direct"] for w in "012"] == [[1, 0], [0, 0], [1, 0]]


def test_trivial_group_reduces_to_classical_hkr():
    A = poly_algebra(1, 2)
    act = linear_action(FiniteGroup.trivial(), A, {})
    rep = varieties_pipeline(act, 0, 3, method="finite")
    assert rep["agree"]
