"""The shipped corpus: structural instances for the identity suite and
JSON problem descriptions for the pipelines."""
from __future__ import annotations

import time
from fractions import Fraction

from .complexes import cyclic_complex, cyclic_homology, homology, lambda_complex, totalize_bicomplex, triangularize
from .crossed import (TwistedAlgebraCyclic, TwistedGroupCyclic, class_component, tensor_over_gamma)
from .errors import CheckFailure
from .groups import Algebra, FiniteGroup, GroupAction, crossed_product
from .linalg import SparseMatrix
from .simplicial import derive_parachain, diagonal


def _swap_q2():
    A, G = Algebra.functions(2), FiniteGroup.cyclic(2)
    return A, G, GroupAction.by_basis_permutation(G, A, lambda g: [0, 1] if g == 0 else [1, 0])


def _rotate_q3():
    A, G = Algebra.functions(3), FiniteGroup.cyclic(3)
    return A, G, GroupAction.by_basis_permutation(G, A, lambda g: [(j + g) % 3 for j in range(3)])


def _poly_sign(W=2):
    from .hkr import linear_action, poly_algebra
    A, G = poly_algebra(1, W), FiniteGroup.cyclic(2)
    return A, G, linear_action(G, A, {"g1": [[-1]]})


def _paracyclic(P):
    P.check()
    M = derive_parachain(P)
    cyclic_complex(M).check()
    names = ["simplicial identities", "t = ds", "dT = Td", "sT = Ts", "b^2 = 0", "B^2 = 0", "bB + Bb = 1 - T",
             "d^2 = (1 - T)S"]
    if P.cyclic:
        names.append("t^(m+1) = 1")
    return names


def _bi(X):
    X.check()
    names = ["row and column identities", "horizontal/vertical commutation"]
    if X.is_cylindrical():
        names.append("bar T T = 1")
    return names


def _tot(X):
    bc = X.to_parachain_bicomplex()
    bc.check()
    tot = totalize_bicomplex(bc)
    tot.check()
    cyclic_complex(tot).check()
    return ["bicomplex identities", "Tot: b^2 = 0, B^2 = 0, bB + Bb = 1 - T", "Tot natural: d^2 = (1 - T)S"]


def _tri(X, which):
    bc = X.to_parachain_bicomplex()
    tri = triangularize(bc, which)
    tri.check()
    return [f"{which}: bar d^2 + (bB + Bb)S = 0", f"{which}: S commutes", f"{which}: total d^2 = 0"]


def identity_instances(N: int = 4) -> list:
    """(name, kind, thunk) triples; each thunk runs the constructor identities and returns their names."""
    from .hkr import poly_algebra
    from .quasi_iso import SigmaModel, euler_cocycle, flat_bicomplex, InvariantComplex
    Q = Algebra.field()
    A2, Z2, swap = _swap_q2()
    A3, Z3, rot = _rotate_q3()
    Ax, _, sign = _poly_sign()
    Z4, S3 = FiniteGroup.cyclic(4), FiniteGroup.symmetric(3)
    out = [
        ("C(Q)", "C(A)", lambda: _paracyclic(TwistedAlgebraCyclic(Q, N))),
        ("C(Q^2)", "C(A)", lambda: _paracyclic(TwistedAlgebraCyclic(A2, N))),
        ("C(M_2(Q))", "C(A)", lambda: _paracyclic(TwistedAlgebraCyclic(Algebra.matrices(2), N))),
        ("C^swap(Q^2)", "C^phi(A)", lambda: _paracyclic(TwistedAlgebraCyclic(A2, N, swap.mats[1]))),
        ("C^rot(Q^3)", "C^phi(A)", lambda: _paracyclic(TwistedAlgebraCyclic(A3, N, rot.mats[1]))),
        ("C^-1(Q[x])_w2", "C^phi(A)", lambda: _paracyclic(TwistedAlgebraCyclic(Ax, N, sign.mats[1], 2))),
        ("C^sigma(Z/2)", "C^phi(Gamma)", lambda: _paracyclic(TwistedGroupCyclic(Z2, 1, N))),
        ("C^g(Z/4)", "C^phi(Gamma)", lambda: _paracyclic(TwistedGroupCyclic(Z4, 1, N))),
        ("C(S3)", "C^phi(Gamma)", lambda: _paracyclic(TwistedGroupCyclic(S3, 0, N))),
        ("C(Q^2 x| Z/2)[sigma]", "C(A)", lambda: _paracyclic(class_component(_checked_crossed(A2, Z2, swap), 1, N))),
        ("C^sigma(Z/2) (x) C^sigma(Q^2)", "tensor product",
         lambda: _bi(tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N), TwistedAlgebraCyclic(A2, N, swap.mats[1],
                                                                                       action=swap), N))),
        ("Diag C^sigma(Z/2) (x) C^sigma(Q^2)", "C(A)",
         lambda: _paracyclic(diagonal(tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N),
                                                        TwistedAlgebraCyclic(A2, N, swap.mats[1], action=swap), N)))),
        ("Tot C^g(Z/4) (x) C(Q)", "totalization",
         lambda: _tot(tensor_over_gamma(TwistedGroupCyclic(Z4, 1, N), TwistedAlgebraCyclic(Q, N, None,
                                                                                       action=GroupAction.trivial(Z4, Q)),
                                        N, region="triangle"))),
        ("Tot C^sigma(Z/2) (x) C^sigma(Q^2)", "totalization",
         lambda: _tot(tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N), TwistedAlgebraCyclic(A2, N, swap.mats[1],
                                                                                       action=swap), N,
                                        region="triangle"))),
        ("C^wsigma of C^sigma(Z/2) (x) C^sigma(Q^2)", "triangular S-module",
         lambda: _tri(tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N), TwistedAlgebraCyclic(A2, N, swap.mats[1],
                                                                                       action=swap), N,
                                        region="triangle"), "wsigma")),
        ("C^sigma of C^g(Z/3) (x) C^g(Q^3)", "triangular S-module",
         lambda: _tri(tensor_over_gamma(TwistedGroupCyclic(Z3, 1, N), TwistedAlgebraCyclic(A3, N, rot.mats[1],
                                                                                       action=rot), N,
                                        region="triangle"), "sigma")),
        ("Tot C^flat(Z/2, C(Q^2)^sigma)", "totalization", lambda: _flat_tot(A2, Z2, swap, 1, N)),
        ("sigma model Z/2, u(period 2), C(Q)", "sigma model", lambda: _sigma(Z2, Q, None, 2, N)),
        ("sigma model Z/2, u(period 2), C(Q^2) swap", "sigma model", lambda: _sigma(Z2, A2, swap, 2, N)),
        ("sigma model Z/3, u(period 3), C(Q)", "sigma model", lambda: _sigma(Z3, Q, None, 3, N)),
    ]
    return out


def _checked_crossed(A, G, act):
    Acr = crossed_product(A, G, act)
    Acr.check()
    return Acr


def _flat_tot(A, G, act, phi, N):
    from .quasi_iso import InvariantComplex, flat_bicomplex, identity_coefficients
    from .crossed import centralizer_model
    cd, X, Y, T = centralizer_model(A, G, act, phi, N, region="triangle")
    H, ph = cd.centralizer, cd.phi_in_centralizer
    coeff = identity_coefficients(Y)
    powers = [H.power(ph, l) for l in range(H.element_order(ph))]
    Dphi = InvariantComplex(coeff.complex, lambda m: [coeff.act(h, m) for h in powers])
    flat = flat_bicomplex(H, Dphi, lambda g, q: Dphi.induced_action(coeff.act(g, q), q), N)
    flat.check()
    tot = totalize_bicomplex(flat)
    tot.check()
    return ["invariants: nu^2 = nu, nu b = b nu, nu B = B nu", "flat bicomplex identities",
            "Tot: b^2 = 0, B^2 = 0, bB + Bb = 0"]


def _sigma(Q, A, act, period, N):
    from .quasi_iso import SigmaModel, euler_cocycle
    ext = euler_cocycle(period=period)
    Y = TwistedAlgebraCyclic(A, N, None, action=act)
    C = derive_parachain(Y)
    fn = (lambda g, q: Y.act_matrix(g, q)) if act is not None else (lambda g, q: SparseMatrix.identity(C.spaces.dim(q)))
    M = SigmaModel(ext.quotient, ext.u, C, fn, N)
    M.check()
    return ["(d+)^2 = 0", "d+ commutes with u cap -"]


def run_identity_suite(N: int = 4) -> list[dict]:
    out = []
    for name, kind, thunk in identity_instances(N):
        t0 = time.perf_counter()
        try:
            checks = thunk()
            out.append({"instance": name, "kind": kind, "ok": True, "identities": checks,
                        "seconds": round(time.perf_counter() - t0, 3)})
        except CheckFailure as e:
            out.append({"instance": name, "kind": kind, "ok": False, "failure": e.to_json(),
                        "seconds": round(time.perf_counter() - t0, 3)})
    return out


def cyclic_instances(N: int = 4) -> list:
    """Cyclic modules of the corpus, for the λ-complex cross-check."""
    Q = Algebra.field()
    A2, Z2, swap = _swap_q2()
    A3, Z3, rot = _rotate_q3()
    Ax, _, _ = _poly_sign()
    S3 = FiniteGroup.symmetric(3)
    return [
        ("C(Q)", lambda: TwistedAlgebraCyclic(Q, N)),
        ("C(Q^2)", lambda: TwistedAlgebraCyclic(A2, N)),
        ("C(M_2(Q))", lambda: TwistedAlgebraCyclic(Algebra.matrices(2), N)),
        ("C(Q[x])_w2", lambda: TwistedAlgebraCyclic(Ax, N, None, 2)),
        ("C(Z/2)", lambda: TwistedGroupCyclic(Z2, 0, N)),
        ("C(Z/3)", lambda: TwistedGroupCyclic(Z3, 0, N)),
        ("C(S3)", lambda: TwistedGroupCyclic(S3, 0, N)),
        ("C(Q^2 x| Z/2)[1]", lambda: class_component(_checked_crossed(A2, Z2, swap), 0, N)),
        ("C(Q^2 x| Z/2)[sigma]", lambda: class_component(_checked_crossed(A2, Z2, swap), 1, N)),
        ("C(Q^3 x| Z/3)[g1]", lambda: class_component(_checked_crossed(A3, Z3, rot), 1, N)),
        ("Diag C^sigma(Z/2) (x) C^sigma(Q^2)",
         lambda: diagonal(tensor_over_gamma(TwistedGroupCyclic(Z2, 1, N),
                                            TwistedAlgebraCyclic(A2, N, swap.mats[1], action=swap), N))),
    ]


def connes_cross_check(N: int = 4, degrees=range(4)) -> list[dict]:
    out = []
    for name, thunk in cyclic_instances(N):
        P = thunk()
        lam = homology(lambda_complex(P))
        hc = cyclic_homology(derive_parachain(P))
        a = [lam.dims[n] for n in degrees]
        b = [hc.dims[n] for n in degrees]
        out.append({"instance": name, "lambda": a, "mixed": b, "ok": a == b})
    return out


# -- problem descriptions -----------------------------------------------------------

def _perm_action(images):
    return {"permutation": {"g1": images}}


PROBLEMS = {
    "q_z2": {"group": {"cyclic": 2}, "algebra": {"field": True}, "action": "trivial", "phi": "all-classes",
             "truncation": 4, "pipeline": "finite-order"},
    "q_z3": {"group": {"cyclic": 3}, "algebra": {"field": True}, "action": "trivial", "phi": "all-classes",
             "truncation": 4, "pipeline": "finite-order"},
    "q_s3": {"group": {"symmetric": 3}, "algebra": {"field": True}, "action": "trivial", "phi": "all-classes",
             "truncation": 4, "pipeline": "finite-order"},
    "q2_swap": {"group": {"cyclic": 2}, "algebra": {"functions": 2}, "action": _perm_action([1, 0]),
                "phi": "all-classes", "truncation": 4, "pipeline": "finite-order"},
    "q2_trivial_z2": {"group": {"cyclic": 2}, "algebra": {"functions": 2}, "action": "trivial", "phi": "all-classes",
                      "truncation": 4, "pipeline": "finite-order"},
    "q3_rotation": {"group": {"cyclic": 3}, "algebra": {"functions": 3}, "action": _perm_action([1, 2, 0]),
                    "phi": "all-classes", "truncation": 3, "pipeline": "finite-order"},
    "poly_sign": {"group": {"cyclic": 2}, "poly": {"vars": 1, "top_weight": 2}, "linear_action": {"g1": [[-1]]},
                  "phi": "all-classes", "truncation": 3, "pipeline": "hkr"},
    "poly_swap": {"group": {"cyclic": 2}, "poly": {"vars": 2, "top_weight": 1}, "linear_action": {"g1": [[0, 1], [1, 0]]},
                  "phi": "all-classes", "truncation": 3, "pipeline": "hkr"},
    "z_period1": {"algebra": {"field": True}, "infinite_order": {"period": 1}, "truncation": 4},
    "z_period2": {"algebra": {"field": True}, "infinite_order": {"period": 2}, "truncation": 4},
    "z_period2_shifted": {"algebra": {"field": True}, "infinite_order": {"period": 2, "section": [0, 3]},
                          "truncation": 4},
    "z_swap_period2": {"algebra": {"functions": 2}, "infinite_order": {"period": 2}, "action": _perm_action([1, 0]),
                       "truncation": 4},
}


def write_corpus(directory) -> list:
    import json
    from pathlib import Path
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, spec in sorted(PROBLEMS.items()):
        p = d / f"{name}.json"
        p.write_text(json.dumps(spec, sort_keys=True, indent=2) + "\n")
        paths.append(p)
    return paths
