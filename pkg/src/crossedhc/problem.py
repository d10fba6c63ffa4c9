"""Problem descriptions: JSON loading, shorthands and resource guards.

A problem is a JSON object with

    group      {"elements": [...], "table": [[...]]} or {"cyclic": n} / {"symmetric": n} / {"dihedral": n}
    algebra    {"basis", "structure", "unit"} or {"field": true} / {"functions": n} / {"matrices": n}
    poly       {"vars": k, "top_weight": W}             (instead of algebra)
    action     {"<element>": matrix, ...}, "trivial", or {"permutation": {"<element>": [images]}}
    linear_action  {"<element>": k×k matrix}            (with poly)
    phi        element label or "all-classes"
    truncation N (default 4), weight (optional), pipeline (optional)
    infinite_order {"period": n, "section": [...]} or {"quotient": group, "cocycle": [[...]]}

With an infinite_order block the group is the quotient Γ̄_φ and the action
is the induced action of Γ̄_φ on A (φ itself acting trivially).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ResourceGuard, SpecError
from .groups import Algebra, FiniteGroup, GroupAction

MAX_TRUNCATION = 6
MAX_BLOCK = 12      # dim A · |Γ| per weight
PIPELINES = ("direct", "finite", "finite-order", "infinite-order", "hkr")


@dataclass
class Problem:
    group: FiniteGroup
    algebra: Algebra
    action: GroupAction
    phi: list = field(default_factory=list)          # element indices, one per class to treat
    truncation: int = 4
    weight: int | None = None
    pipeline: str = "finite"
    infinite: dict | None = None
    raw: dict = field(default_factory=dict)

    @property
    def is_poly(self) -> bool:
        return hasattr(self.action, "linear")

    def class_label(self, g: int) -> str:
        return self.group.elements[g]

    def weights(self) -> list:
        if self.weight is not None:
            return [self.weight]
        if self.algebra.graded:
            return list(range(self.algebra.top_weight + 1))
        return [None]


def _group(data, path="group") -> FiniteGroup:
    if isinstance(data, dict):
        for key, ctor in (("cyclic", FiniteGroup.cyclic), ("symmetric", FiniteGroup.symmetric),
                          ("dihedral", FiniteGroup.dihedral)):
            if key in data:
                n = data[key]
                if not isinstance(n, int) or n < 1:
                    raise SpecError(f"{path}.{key}", "expected a positive integer")
                return ctor(n)
    return FiniteGroup.from_json(data, path)


def _algebra(data, path="algebra") -> Algebra:
    if isinstance(data, dict):
        if data.get("field"):
            return Algebra.field()
        if "functions" in data:
            return Algebra.functions(int(data["functions"]))
        if "matrices" in data:
            return Algebra.matrices(int(data["matrices"]))
    return Algebra.from_json(data, path)


def _action(G, A, data, path="action") -> GroupAction:
    if data is None or data == "trivial":
        return GroupAction.trivial(G, A)
    if isinstance(data, dict) and "permutation" in data:
        perms = data["permutation"]
        mats = {}
        for key, images in perms.items():
            if sorted(images) != list(range(A.dim)):
                raise SpecError(f"{path}.permutation.{key}", "expected a permutation of the basis indices")
            mats[key] = [[int(images[j] == i) for j in range(A.dim)] for i in range(A.dim)]
        return GroupAction.from_json(G, A, mats, path)
    if not isinstance(data, dict):
        raise SpecError(path, "expected an object, 'trivial' or {'permutation': ...}")
    return GroupAction.from_json(G, A, data, path)


def load_problem(data: dict | str | Path, truncation: int | None = None, weight: int | None = None,
                 klass: str | None = None) -> Problem:
    if isinstance(data, (str, Path)):
        try:
            data = json.loads(Path(data).read_text())
        except json.JSONDecodeError as e:
            raise SpecError("$", f"invalid JSON: {e}")
    if not isinstance(data, dict):
        raise SpecError("$", "expected a JSON object")
    N = int(truncation if truncation is not None else data.get("truncation", 4))
    if N < 1:
        raise SpecError("truncation", "must be at least 1")
    infinite = data.get("infinite_order")
    if infinite is not None:
        from .quasi_iso import euler_cocycle
        if "period" in infinite:
            ext = euler_cocycle(period=infinite["period"], section=infinite.get("section"))
        elif "quotient" in infinite:
            ext = euler_cocycle(quotient=_group(infinite["quotient"], "infinite_order.quotient"),
                                cocycle=infinite.get("cocycle"))
        else:
            raise SpecError("infinite_order", "expected 'period' or 'quotient' with 'cocycle'")
        G = ext.quotient
    else:
        if "group" not in data:
            raise SpecError("group", "missing")
        G = _group(data["group"])
        ext = None
    if "poly" in data:
        from .hkr import linear_action, poly_algebra
        p = data["poly"]
        try:
            A = poly_algebra(int(p["vars"]), int(p["top_weight"]))
        except (KeyError, TypeError, ValueError):
            raise SpecError("poly", "expected {'vars': k, 'top_weight': W}")
        act = linear_action(G, A, data.get("linear_action") or {})
    else:
        if "algebra" not in data:
            raise SpecError("algebra", "missing")
        A = _algebra(data["algebra"])
        act = _action(G, A, data.get("action"))
    w = weight if weight is not None else data.get("weight")
    if w is not None and not A.graded:
        raise SpecError("weight", "the algebra is not weight-graded")
    block = _block_dim(A, G, w)
    if block > MAX_BLOCK:
        raise ResourceGuard("dim A * |Gamma| per weight", block, MAX_BLOCK, predicted_dim=block ** (N + 1))
    if N > MAX_TRUNCATION:
        raise ResourceGuard("truncation N", N, MAX_TRUNCATION, predicted_dim=block ** (N + 1))
    phi_raw = klass if klass is not None else data.get("phi", "all-classes")
    if infinite is not None:
        phis = []
    elif phi_raw == "all-classes":
        phis = [c[0] for c in G.conjugacy_classes()]
    else:
        if str(phi_raw) not in G.index:
            raise SpecError("phi", f"unknown group element {phi_raw!r}")
        phis = [G.index[str(phi_raw)]]
    pipe = data.get("pipeline", "infinite-order" if infinite is not None else ("hkr" if "poly" in data else "finite"))
    if pipe not in PIPELINES:
        raise SpecError("pipeline", f"expected one of {list(PIPELINES)}")
    prob = Problem(G, A, act, phis, N, w, pipe, None, data)
    if ext is not None:
        prob.infinite = {"extension": ext, "raw": infinite}
    return prob


def _block_dim(A: Algebra, G: FiniteGroup, w) -> int:
    if A.graded and w is not None:
        return sum(1 for x in A.weights if x <= w) * len(G)
    if A.graded:
        return A.dim * len(G) if A.top_weight is None else sum(1 for x in A.weights if x <= A.top_weight) * len(G)
    return A.dim * len(G)
