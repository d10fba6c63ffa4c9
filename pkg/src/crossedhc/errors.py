"""Exception types.  Each carries an optional witness (basis label, vector, triple...)."""
from __future__ import annotations


class CheckFailure(Exception):
    """Base class for failed structural checks."""

    def __init__(self, message: str, witness=None, **info):
        super().__init__(message)
        self.witness = witness
        self.info = info

    def to_json(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self)}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        for k, v in sorted(self.info.items()):
            out[k] = _jsonable(v)
        return out


def _jsonable(x):
    from fractions import Fraction

    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class NotContained(CheckFailure):
    pass


class NotAChainMapOnSubspaces(CheckFailure):
    pass


class IdentityViolation(CheckFailure):
    pass


class NotCyclic(CheckFailure):
    pass


class NotCylindrical(CheckFailure):
    pass


class FiltrationNotPreserved(CheckFailure):
    pass


class NotAChainMap(CheckFailure):
    pass


class NotAssociative(CheckFailure):
    pass


class NotUnital(CheckFailure):
    pass


class NotAnAutomorphism(CheckFailure):
    pass


class NotAHomomorphism(CheckFailure):
    pass


class NotAGroup(CheckFailure):
    pass


class PhiNotCentral(CheckFailure):
    pass


class PhiNotFiniteOrder(CheckFailure):
    pass


class NotStructurePreserving(CheckFailure):
    pass


class NotACocycle(CheckFailure):
    pass


class DSquaredNonzero(CheckFailure):
    pass


class NotAParachainMap(CheckFailure):
    pass


class SpecError(Exception):
    """Malformed problem description; ``path`` is a JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path

    def to_json(self) -> dict:
        return {"error": "SpecError", "path": self.path, "message": str(self)}


class ResourceGuard(Exception):
    """A requested computation exceeds the desk-scale bounds."""

    def __init__(self, bound: str, value, limit, predicted_dim=None):
        msg = f"{bound} = {value} exceeds limit {limit}"
        if predicted_dim is not None:
            msg += f" (predicted top chain-group dimension {predicted_dim})"
        super().__init__(msg)
        self.bound, self.value, self.limit, self.predicted_dim = bound, value, limit, predicted_dim

    def to_json(self) -> dict:
        return {"error": "ResourceGuard", "bound": self.bound, "value": self.value, "limit": self.limit,
                "predicted_dim": self.predicted_dim, "message": str(self)}
