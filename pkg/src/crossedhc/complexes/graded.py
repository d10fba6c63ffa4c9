"""Graded free modules with labelled bases and per-degree operators."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from ..errors import IdentityViolation
from ..linalg import SparseMatrix


@dataclass(frozen=True)
class GradedModule:
    """Basis labels for degrees 0..N (the truncation)."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(tuple(l) for l in self.labels))

    @property
    def N(self) -> int:
        return len(self.labels) - 1

    @property
    def dims(self) -> tuple:
        return tuple(len(l) for l in self.labels)

    def dim(self, m: int) -> int:
        if 0 <= m <= self.N:
            return len(self.labels[m])
        return 0

    def label(self, m: int, i: int) -> str:
        return self.labels[m][i]

    def truncate(self, N: int) -> "GradedModule":
        return GradedModule(self.labels[: N + 1])


class GradedMap:
    """A family of matrices C_m -> D_{m+degree}, keyed by source degree m."""

    __slots__ = ("degree", "mats")

    def __init__(self, degree: int, mats: Mapping[int, SparseMatrix]):
        self.degree = degree
        self.mats = dict(mats)

    def __getitem__(self, m: int) -> SparseMatrix:
        return self.mats[m]

    def get(self, m: int):
        return self.mats.get(m)

    def __contains__(self, m):
        return m in self.mats

    def degrees(self):
        return sorted(self.mats)

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        out = {}
        for m, A in other.mats.items():
            Bm = self.mats.get(m + other.degree)
            if Bm is not None:
                out[m] = Bm @ A
        return GradedMap(self.degree + other.degree, out)

    def _zip(self, other, fn):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        keys = set(self.mats) & set(other.mats)
        return GradedMap(self.degree, {m: fn(self.mats[m], other.mats[m]) for m in keys})

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def scale(self, c):
        return GradedMap(self.degree, {m: A.scale(c) for m, A in self.mats.items()})

    def map(self, fn: Callable[[int, SparseMatrix], SparseMatrix]) -> "GradedMap":
        return GradedMap(self.degree, {m: fn(m, A) for m, A in self.mats.items()})

    def restrict_degrees(self, lo: int, hi: int) -> "GradedMap":
        return GradedMap(self.degree, {m: A for m, A in self.mats.items() if lo <= m <= hi})

    @staticmethod
    def identity(spaces: GradedModule) -> "GradedMap":
        return GradedMap(0, {m: SparseMatrix.identity(spaces.dim(m)) for m in range(spaces.N + 1)})

    @staticmethod
    def zero(src: GradedModule, dst: GradedModule, degree: int) -> "GradedMap":
        out = {}
        for m in range(src.N + 1):
            if 0 <= m + degree <= dst.N:
                out[m] = SparseMatrix.zero(dst.dim(m + degree), src.dim(m))
        return GradedMap(degree, out)

    def __repr__(self):
        return f"GradedMap(degree={self.degree}, degrees={self.degrees()})"


def witness_label(spaces: GradedModule | None, m: int, M: SparseMatrix):
    w = M.first_nonzero()
    if w is None:
        return None
    i, j, v = w
    label = spaces.label(m, j) if spaces is not None and j < spaces.dim(m) else j
    return {"degree": m, "basis": label, "row": i, "value": str(v)}


def require_zero(name: str, m: int, M: SparseMatrix, spaces: GradedModule | None = None, exc=IdentityViolation):
    """Raise ``exc`` with a witness basis element if M is nonzero."""
    if not M.is_zero():
        raise exc(f"{name} fails in degree {m}", witness=witness_label(spaces, m, M), identity=name)


def require_equal(name: str, m: int, A: SparseMatrix, B: SparseMatrix, spaces: GradedModule | None = None,
                  exc=IdentityViolation):
    if A.shape != B.shape:
        raise exc(f"{name}: shape mismatch {A.shape} vs {B.shape} in degree {m}", identity=name)
    require_zero(name, m, A - B, spaces, exc)
