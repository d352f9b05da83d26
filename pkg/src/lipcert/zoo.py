# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""Test functions with known global Lipschitz moduli, and the JSON spec format that describes them."""
from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from lipcert.errors import GradientUnavailable, NonFiniteValue, ParseError, ValidationError
from lipcert.geometry import Points, Vector, as_points, as_vector

PSD_TOLERANCE = 1e-8
INFINITE = math.inf


class FunctionKind(StrEnum):
    NORM = "norm"
    LINEAR = "linear"
    CONSTANT = "constant"
    LOGISTIC = "logistic"
    MAXAFFINE = "maxaffine"
    QUADRATIC = "quadratic"
    RECIPROCAL_ABS = "reciprocal-abs"


@dataclass(frozen=True, eq=False)
class AnalyticInfo:
    global_modulus: float | None
    gradient_available: bool
    direction_hints: tuple[Vector, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "global_modulus": self.global_modulus,
            "gradient_available": self.gradient_available,
            "direction_hints": [[float(c) for c in hint] for hint in self.direction_hints],
        }


def _unit(vec: npt.ArrayLike) -> Vector | None:
    arr = np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    return None if norm == 0.0 else as_vector(arr / norm)


def _both_ways(vec: npt.ArrayLike) -> tuple[Vector, ...]:
    u = _unit(vec)
    return () if u is None else (u, as_vector(-u))


class EvaluableFunction(ABC):
    """Anything the estimator can probe: f(x) for one point and row-wise for a batch."""

    convex: bool = True
    smooth: bool = True

    def __init__(self, dim: int | None = None, name: str | None = None) -> None:
        self.dim = dim
        self.name = name

    @property
    def function_id(self) -> str:
        return self.name or type(self).__name__

    def __call__(self, x: npt.ArrayLike) -> float:
        return self.evaluate(x)

    def evaluate(self, x: npt.ArrayLike) -> float:
        point = self._check_point(x)
        value = float(self._values(point.reshape(1, -1))[0])
        if not math.isfinite(value):
            raise NonFiniteValue(f"{self.function_id} is not finite at {point.tolist()}")
        return value

    def evaluate_many(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        rows = as_points(points, self.dim)
        values = np.asarray(self._values(rows), dtype=np.float64)
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteValue(f"{self.function_id} is not finite at {rows[bad].tolist()}")
        return values

    def gradient(self, x: npt.ArrayLike) -> Vector:
        return as_vector(self._gradient(self._check_point(x)), "gradient")

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(None, False)

    def _check_point(self, x: npt.ArrayLike) -> Vector:
        point = as_vector(x, "x")
        if self.dim is not None and point.size != self.dim:
            raise ValidationError(f"point has dimension {point.size}, function expects {self.dim}", "x")
        return point

    @abstractmethod
    def _values(self, rows: Points) -> npt.NDArray[np.float64]: ...

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        raise GradientUnavailable(f"{self.function_id} has no gradient")


class FunctionSpec(EvaluableFunction):
    kind: ClassVar[FunctionKind]

    @property
    def function_id(self) -> str:
        return self.name or str(self.kind)

    @abstractmethod
    def _parameters(self) -> dict[str, Any]: ...

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": str(self.kind)}
        doc.update(self._parameters())
        if self.name:
            doc["name"] = self.name
        return doc

    def __repr__(self) -> str:
        return f"{type(self).__name__}({json.dumps(self._parameters())})"


# Zoo -----------------------------------------------------------------------------------------


class EuclideanNorm(FunctionSpec):
    kind = FunctionKind.NORM
    smooth = False

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return np.sqrt(np.einsum("ij,ij->i", rows, rows))

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            raise GradientUnavailable("the Euclidean norm is not differentiable at the origin")
        return x / norm

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(1.0, True)

    def _parameters(self) -> dict[str, Any]:
        return {} if self.dim is None else {"dim": self.dim}


class Linear(FunctionSpec):
    kind = FunctionKind.LINEAR

    def __init__(self, b: npt.ArrayLike, offset: float = 0.0, name: str | None = None) -> None:
        self.b = as_vector(b, "b")
        self.offset = float(offset)
        super().__init__(self.b.size, name)

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return rows @ self.b + self.offset

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        return self.b

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(float(np.linalg.norm(self.b)), True, _both_ways(self.b))

    def _parameters(self) -> dict[str, Any]:
        return {"b": self.b.tolist(), "offset": self.offset}


class Constant(FunctionSpec):
    kind = FunctionKind.CONSTANT

    def __init__(self, c: float, dim: int | None = None, name: str | None = None) -> None:
        self.c = float(c)
        super().__init__(dim, name)

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return np.full(rows.shape[0], self.c)

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        return np.zeros_like(x)

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(0.0, True)

    def _parameters(self) -> dict[str, Any]:
        params: dict[str, Any] = {"c": self.c}
        if self.dim is not None:
            params["dim"] = self.dim
        return params


def softplus(t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """ln(1 + e^t) as max(t, 0) + ln(1 + e^-|t|), finite for any finite t."""
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def sigmoid(t: npt.NDArray[np.float64] | float) -> npt.NDArray[np.float64]:
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(t, dtype=np.float64)))


class Logistic(FunctionSpec):
    kind = FunctionKind.LOGISTIC

    def __init__(self, b: npt.ArrayLike, name: str | None = None) -> None:
        self.b = as_vector(b, "b")
        super().__init__(self.b.size, name)

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return softplus(rows @ self.b)

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        return sigmoid(float(x @ self.b)) * self.b

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(float(np.linalg.norm(self.b)), True, _both_ways(self.b))

    def _parameters(self) -> dict[str, Any]:
        return {"b": self.b.tolist()}


class MaxAffine(FunctionSpec):
    kind = FunctionKind.MAXAFFINE
    smooth = False

    def __init__(self, slopes: npt.ArrayLike, intercepts: npt.ArrayLike, name: str | None = None) -> None:
        self.slopes = as_points(slopes, name="pieces")
        self.intercepts = as_vector(intercepts, "pieces")
        if self.intercepts.size != self.slopes.shape[0]:
            raise ValidationError(f"{self.slopes.shape[0]} slopes but {self.intercepts.size} intercepts", "pieces")
        super().__init__(self.slopes.shape[1], name)

    def _affine(self, rows: Points) -> npt.NDArray[np.float64]:
        return rows @ self.slopes.T + self.intercepts

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return np.max(self._affine(rows), axis=1)

    def active_piece(self, x: npt.ArrayLike) -> int:
        # argmax returns the lowest index among ties
        return int(np.argmax(self._affine(self._check_point(x).reshape(1, -1))[0]))

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        return self.slopes[self.active_piece(x)]

    def analytic_info(self) -> AnalyticInfo:
        norms = np.linalg.norm(self.slopes, axis=1)
        hints = tuple(u for u in (_unit(b) for b in self.slopes) if u is not None)
        return AnalyticInfo(float(np.max(norms)), True, hints)

    def _parameters(self) -> dict[str, Any]:
        return {"pieces": [{"b": b.tolist(), "alpha": float(a)} for b, a in zip(self.slopes, self.intercepts)]}


class Quadratic(FunctionSpec):
    """f(x) = x^T Q x + c^T x with Q symmetric positive semidefinite."""

    kind = FunctionKind.QUADRATIC

    def __init__(self, Q: npt.ArrayLike, c: npt.ArrayLike | None = None, name: str | None = None) -> None:
        self.Q = as_points(Q, name="Q")
        n = self.Q.shape[0]
        if self.Q.shape != (n, n):
            raise ValidationError(f"Q must be square, got shape {self.Q.shape}", "Q")
        self.c = as_vector(np.zeros(n) if c is None else c, "c")
        if self.c.size != n:
            raise ValidationError(f"c has dimension {self.c.size}, Q has {n}", "c")
        scale = max(1.0, float(np.max(np.abs(self.Q))))
        if float(np.max(np.abs(self.Q - self.Q.T))) > PSD_TOLERANCE * scale:
            raise ValidationError("Q must be symmetric", "Q")
        self.eigenvalues = np.linalg.eigvalsh(self.Q)
        if float(self.eigenvalues[0]) < -PSD_TOLERANCE:
            raise ValidationError(f"Q must be positive semidefinite, smallest eigenvalue is {self.eigenvalues[0]:.6g}", "Q")
        super().__init__(n, name)

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return np.einsum("ij,jk,ik->i", rows, self.Q, rows) + rows @ self.c

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        return 2.0 * (self.Q @ x) + self.c

    def analytic_info(self) -> AnalyticInfo:
        if not np.any(self.Q):
            return AnalyticInfo(float(np.linalg.norm(self.c)), True, _both_ways(self.c))
        _, vectors = np.linalg.eigh(self.Q)
        return AnalyticInfo(INFINITE, True, _both_ways(vectors[:, -1]))

    def _parameters(self) -> dict[str, Any]:
        return {"Q": self.Q.tolist(), "c": self.c.tolist()}


class ReciprocalAbs(FunctionSpec):
    """1/|x| away from zero and 0 at zero: bounded growth at infinity, yet not Lipschitz."""

    kind = FunctionKind.RECIPROCAL_ABS
    convex = False
    smooth = False

    def __init__(self, name: str | None = None) -> None:
        super().__init__(1, name)

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        x = np.abs(rows[:, 0])
        out = np.zeros_like(x)
        with np.errstate(over="ignore"):
            np.divide(1.0, x, out=out, where=x != 0.0)
        return out

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        if x[0] == 0.0:
            raise GradientUnavailable("1/|x| has no gradient at 0")
        return np.array([-np.sign(x[0]) / x[0] ** 2])

    def _parameters(self) -> dict[str, Any]:
        return {}


class CallableFunction(EvaluableFunction):
    """Adapter for plain Python callables, the extension point for functions outside the zoo."""

    def __init__(
        self,
        fn: Callable[[Vector], float],
        dim: int | None = None,
        name: str | None = None,
        convex: bool = True,
        grad: Callable[[Vector], npt.ArrayLike] | None = None,
        modulus: float | None = None,
    ) -> None:
        super().__init__(dim, name)
        self.fn = fn
        self.grad = grad
        self.modulus = modulus
        self.convex = convex
        self.smooth = grad is not None

    def _values(self, rows: Points) -> npt.NDArray[np.float64]:
        return np.array([float(self.fn(row)) for row in rows], dtype=np.float64)

    def _gradient(self, x: Vector) -> npt.ArrayLike:
        if self.grad is None:
            return super()._gradient(x)
        return self.grad(x)

    def analytic_info(self) -> AnalyticInfo:
        return AnalyticInfo(self.modulus, self.grad is not None)


def as_function(f: EvaluableFunction | Callable[[Vector], float], **kwargs: Any) -> EvaluableFunction:
    if isinstance(f, EvaluableFunction):
        return f
    return CallableFunction(f, **kwargs)


# Operations ----------------------------------------------------------------------------------


def evaluate(spec: EvaluableFunction, x: npt.ArrayLike) -> float:
    return spec.evaluate(x)


def gradient(spec: EvaluableFunction, x: npt.ArrayLike) -> Vector:
    return spec.gradient(x)


def analytic_global_modulus(spec: EvaluableFunction) -> float | None:
    """Closed-form global Lipschitz modulus, math.inf when there is none, None when unknown."""
    return spec.analytic_info().global_modulus


# Spec documents ------------------------------------------------------------------------------

_NUMBER = {"type": "number"}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}

FUNCTION_SPEC_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "kind": {"enum": [str(k) for k in FunctionKind]},
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "b": _VECTOR,
        "offset": _NUMBER,
        "c": {"anyOf": [_NUMBER, _VECTOR]},
        "pieces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"b": _VECTOR, "alpha": _NUMBER},
                "required": ["b", "alpha"],
                "additionalProperties": False,
            },
        },
        "Q": {"type": "array", "items": _VECTOR, "minItems": 1},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

KIND_FIELDS: dict[FunctionKind, tuple[set[str], set[str]]] = {
    # kind: (required, optional) beyond "kind" and "name"
    FunctionKind.NORM: (set(), {"dim"}),
    FunctionKind.LINEAR: ({"b"}, {"offset"}),
    FunctionKind.CONSTANT: ({"c"}, {"dim"}),
    FunctionKind.LOGISTIC: ({"b"}, set()),
    FunctionKind.MAXAFFINE: ({"pieces"}, set()),
    FunctionKind.QUADRATIC: ({"Q"}, {"c"}),
    FunctionKind.RECIPROCAL_ABS: (set(), {"dim"}),
}

_validator = Draft202012Validator(FUNCTION_SPEC_SCHEMA)


def json_path(parts: Any) -> str:
    path = "$"
    for part in parts:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def parse_function_spec(document: str | bytes | Mapping[str, Any]) -> FunctionSpec:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise ParseError(f"malformed function spec: {err.msg} at line {err.lineno} column {err.colno}", "$") from err
        except UnicodeDecodeError as err:
            raise ParseError(f"function spec is not valid UTF-8: {err.reason} at byte {err.start}", "$") from err

    error = best_match(_validator.iter_errors(document))
    if error is not None:
        raise ParseError(error.message, json_path(error.absolute_path))
    assert isinstance(document, Mapping)

    kind = FunctionKind(document["kind"])
    required, optional = KIND_FIELDS[kind]
    fields = set(document) - {"kind", "name"}
    for missing in sorted(required - fields):
        raise ParseError(f"'{missing}' is required for kind '{kind}'", f"$.{missing}")
    for extra in sorted(fields - required - optional):
        raise ParseError(f"'{extra}' is not a field of kind '{kind}'", f"$.{extra}")

    name = document.get("name")
    dim = document.get("dim")
    match kind:
        case FunctionKind.NORM:
            return EuclideanNorm(dim, name)
        case FunctionKind.LINEAR:
            return Linear(document["b"], document.get("offset", 0.0), name)
        case FunctionKind.CONSTANT:
            if not isinstance(document["c"], (int, float)):
                raise ParseError("constant 'c' must be a number", "$.c")
            return Constant(document["c"], dim, name)
        case FunctionKind.LOGISTIC:
            return Logistic(document["b"], name)
        case FunctionKind.MAXAFFINE:
            pieces = document["pieces"]
            first = len(pieces[0]["b"])
            for i, piece in enumerate(pieces):
                if len(piece["b"]) != first:
                    raise ValidationError(f"piece has dimension {len(piece['b'])}, expected {first}", f"$.pieces[{i}].b")
            return MaxAffine([piece["b"] for piece in pieces], [piece["alpha"] for piece in pieces], name)
        case FunctionKind.QUADRATIC:
            Q = document["Q"]
            for i, row in enumerate(Q):
                if len(row) != len(Q):
                    raise ValidationError(f"Q must be square, row has {len(row)} entries for {len(Q)} rows", f"$.Q[{i}]")
            c = document.get("c")
            if c is not None and not isinstance(c, list):
                raise ParseError("quadratic 'c' must be a list of numbers", "$.c")
            try:
                return Quadratic(Q, c, name)
            except ValidationError as err:
                raise ValidationError(err.message, f"$.{err.path}") from err
        case FunctionKind.RECIPROCAL_ABS:
            if dim not in (None, 1):
                raise ValidationError("reciprocal-abs is defined in dimension 1 only", "$.dim")
            return ReciprocalAbs(name)


def load_function_spec(path: str | Path) -> FunctionSpec:
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"cannot read function spec {file}: {err.strerror}", str(file)) from err
    except UnicodeDecodeError as err:
        raise ParseError(f"function spec {file} is not valid UTF-8: {err.reason} at byte {err.start}", str(file)) from err
    return parse_function_spec(text)


# Catalog -------------------------------------------------------------------------------------

MODULUS_FORMULAS: dict[FunctionKind, str] = {
    FunctionKind.NORM: "1",
    FunctionKind.LINEAR: "||b||",
    FunctionKind.CONSTANT: "0",
    FunctionKind.LOGISTIC: "||b||",
    FunctionKind.MAXAFFINE: "max_i ||b_i||",
    FunctionKind.QUADRATIC: "inf (Q != 0)",
    FunctionKind.RECIPROCAL_ABS: "n/a (non-convex)",
}


def catalog() -> list[FunctionSpec]:
    """One example of every kind, in the order `lipcert zoo` lists them."""
    return [
        EuclideanNorm(2, "norm2"),
        Linear([3.0, 4.0], 1.0, "linear34"),
        Constant(7.0, 2, "const7"),
        Logistic([3.0, 4.0], "logistic34"),
        MaxAffine([[1.0, 0.0], [0.0, -2.0]], [0.0, 1.0], "maxaffine2"),
        Quadratic(np.eye(2), [0.0, 0.0], "quad"),
        ReciprocalAbs("recip"),
    ]
