"""JSON encoding of instances, certificates and reports.

Complex numbers are ``[re, im]`` pairs; plain real numbers are accepted on
input. Non-finite floats are written as the strings ``"inf"``, ``"-inf"``
and ``"nan"``. Block keys are 1-based ``"i,j"`` strings with ``i >= j``.
The ``*_SCHEMA`` dicts are JSON Schema (draft 2020-12) descriptions of the
documents produced here.
"""

import json
from typing import Any, Dict

import numpy as np

from .blockmat import BlockMatrix, BlockPartition, ModuleVector, assemble
from .errors import GramCertError, SchemaError

# ----------------------------------------------------------------- primitives


def number(x) -> Any:
    x = float(x)
    if np.isfinite(x):
        return x
    return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")


def parse_number(v) -> float:
    if isinstance(v, bool):
        raise SchemaError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    if v in ("inf", "-inf", "nan"):
        return float(v)
    raise SchemaError(f"expected a number, got {v!r}")


def encode_matrix(A) -> list:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def _entry(v) -> complex:
    if isinstance(v, list):
        if len(v) != 2:
            raise SchemaError("complex entries must be [re, im] pairs")
        return complex(parse_number(v[0]), parse_number(v[1]))
    return complex(parse_number(v))


def decode_matrix(obj, name="matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(f"{name} must be a nonempty list of rows")
    width = len(obj[0])
    if width == 0 or any(len(r) != width for r in obj):
        raise SchemaError(f"{name} rows must be nonempty and of equal length")
    return np.array([[_entry(v) for v in row] for row in obj], dtype=complex)


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise SchemaError(f"duplicate key {k!r}")
        out[k] = v
    return out


def loads(text: str):
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _require(obj, keys, what):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise SchemaError(f"{what} missing field(s): {', '.join(missing)}")


def _positive_int(v, name):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise SchemaError(f"{name} must be a positive integer, got {v!r}")
    return v


def _pair_key(key, n):
    try:
        i, j = (int(p) for p in key.split(","))
    except ValueError:
        raise SchemaError(f"block key {key!r} is not of the form 'i,j'") from None
    if not (1 <= i <= n and 1 <= j <= n):
        raise SchemaError(f"block key {key!r} outside 1..{n}")
    if i < j:
        raise SchemaError(f"block key {key!r} has i < j; only lower blocks are stored")
    return i - 1, j - 1


# -------------------------------------------------------------- block matrix


_MATRIX = {"type": "array", "minItems": 1,
           "items": {"type": "array", "minItems": 1,
                     "items": {"oneOf": [{"type": "number"},
                                         {"type": "array", "minItems": 2, "maxItems": 2,
                                          "items": {"type": ["number", "string"]}}]}}}
_NUM = {"type": ["number", "string"]}
_NUM_OR_NULL = {"type": ["number", "string", "null"]}

BLOCKMATRIX_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["partition", "blocks"],
    "properties": {
        "partition": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "module_rank": {"type": "integer", "minimum": 1},
        "blocks": {"type": "object",
                   "propertyNames": {"pattern": "^[0-9]+,[0-9]+$"},
                   "additionalProperties": _MATRIX},
    },
}


def blockmatrix_to_json(T: BlockMatrix) -> Dict[str, Any]:
    blocks = {f"{i + 1},{j + 1}": encode_matrix(T.block(i, j))
              for i in range(T.n) for j in range(i + 1)}
    return {"partition": list(T.partition.sizes), "module_rank": int(T.module_rank), "blocks": blocks}


def blockmatrix_from_json(obj) -> BlockMatrix:
    _require(obj, ("partition", "blocks"), "block matrix")
    sizes = obj["partition"]
    if not isinstance(sizes, list) or not sizes:
        raise SchemaError("partition must be a nonempty list")
    sizes = [_positive_int(d, "partition entry") for d in sizes]
    k = _positive_int(obj.get("module_rank", 1), "module_rank")
    if not isinstance(obj["blocks"], dict):
        raise SchemaError("blocks must be an object keyed by 'i,j'")
    blocks = {}
    for key, val in obj["blocks"].items():
        blocks[_pair_key(key, len(sizes))] = decode_matrix(val, f"block {key}")
    try:
        return assemble(blocks, BlockPartition(tuple(sizes)), k)
    except GramCertError as exc:
        raise SchemaError(str(exc)) from None


MODULE_VECTOR_SCHEMA = {
    "type": "object",
    "required": ["partition", "module_rank", "slots"],
    "properties": {
        "partition": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "module_rank": {"type": "integer", "minimum": 1},
        "slots": {"type": "array", "items": _MATRIX},
    },
}


def module_vector_to_json(x: ModuleVector) -> Dict[str, Any]:
    return {"partition": list(x.partition.sizes), "module_rank": int(x.module_rank),
            "slots": [encode_matrix(s) for s in x.slots]}


def module_vector_from_json(obj) -> ModuleVector:
    _require(obj, ("partition", "module_rank", "slots"), "module vector")
    part = BlockPartition(tuple(_positive_int(d, "partition entry") for d in obj["partition"]))
    try:
        return ModuleVector(part, obj["module_rank"], tuple(decode_matrix(s) for s in obj["slots"]))
    except GramCertError as exc:
        raise SchemaError(str(exc)) from None


# ------------------------------------------------------------ certificates


CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["kind", "verdict", "method", "ratios"],
    "properties": {
        "kind": {"const": "positivity-certificate"},
        "verdict": {"enum": ["CertifiedPositive", "CertifiedNotPositive", "Inconclusive"]},
        "method": {"type": "string"},
        "witness": {"oneOf": [{"type": "null"}, MODULE_VECTOR_SCHEMA]},
        "witness_form": _NUM_OR_NULL,
        "min_eig": _NUM_OR_NULL,
        "ratios": {"type": "object", "propertyNames": {"pattern": "^[0-9]+,[0-9]+$"},
                   "additionalProperties": _NUM},
        "slack": {"type": ["array", "null"], "items": _NUM},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


def certificate_to_json(cert) -> Dict[str, Any]:
    return {
        "kind": "positivity-certificate",
        "verdict": cert.verdict.value,
        "method": cert.method,
        "witness": None if cert.witness is None else module_vector_to_json(cert.witness),
        "witness_form": None if cert.witness_form is None else number(cert.witness_form),
        "min_eig": None if cert.min_eig is None else number(cert.min_eig),
        "ratios": {f"{i + 1},{j + 1}": number(r) for (i, j), r in sorted(cert.ratios.items())},
        "slack": None if cert.slack is None else [number(s) for s in cert.slack],
        "factor_residual": None if cert.factor is None else number(cert.factor.residual_norm),
        "bound": cert.bound,
        "notes": list(cert.notes),
    }


FACTOR_SCHEMA = {
    "type": "object",
    "required": ["kind", "partition", "X", "regularizations", "residual"],
    "properties": {
        "kind": {"const": "gram-factor"},
        "partition": BLOCKMATRIX_SCHEMA["properties"]["partition"],
        "module_rank": {"type": "integer", "minimum": 1},
        "X": _MATRIX,
        "regularizations": {"type": "array", "items": _NUM},
        "residual": _NUM,
        "threshold_events": {"type": "array"},
        "ops": {"type": "object", "additionalProperties": {"type": "integer"}},
        "residual_history": {"type": "array"},
    },
}


def factor_to_json(F, module_rank: int = 1) -> Dict[str, Any]:
    return {
        "kind": "gram-factor",
        "partition": list(F.partition.sizes),
        "module_rank": int(module_rank),
        "X": encode_matrix(F.X),
        "regularizations": [number(e) for e in F.diagonal_regularizations],
        "residual": number(F.residual_norm),
        "threshold_events": [{"i": i + 1, "j": j + 1, "norm": number(v)} for i, j, v in F.threshold_events],
        "ops": {k: int(v) for k, v in F.ops.items()},
        "residual_history": [{"pass": p + 1, "residual": number(r)} for p, r in F.residual_history],
    }


def factor_product_from_json(obj) -> BlockMatrix:
    """``X X*`` as a :class:`BlockMatrix` from a factor document."""
    _require(obj, ("partition", "X"), "factor")
    sizes = [_positive_int(d, "partition entry") for d in obj["partition"]]
    part = BlockPartition(tuple(sizes))
    X = decode_matrix(obj["X"], "X")
    if X.shape != (part.total, part.total):
        raise SchemaError(f"factor X has shape {X.shape}, expected {(part.total, part.total)}")
    P = X @ X.conj().T
    return BlockMatrix(part, 0.5 * (P + P.conj().T), True, _positive_int(obj.get("module_rank", 1), "module_rank"))


SCHWARZ_SCHEMA = {
    "type": "object",
    "required": ["kind", "alpha", "constant", "sigma1"],
    "properties": {
        "kind": {"const": "schwarz-report"},
        "alpha": {"type": ["number", "null"]},
        "constant": _NUM,
        "sigma1": _NUM,
        "attaining_x": {"type": ["array", "null"]},
        "attaining_y": {"type": ["array", "null"]},
        "grid": {"type": "object", "additionalProperties": _NUM},
        "infinite_points": {"type": "object", "additionalProperties": {"type": "integer"}},
        "spread": _NUM_OR_NULL,
    },
}


def _vector(v):
    return None if v is None else [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def schwarz_to_json(result, optimization=None) -> Dict[str, Any]:
    out = {
        "kind": "schwarz-report",
        "alpha": None if optimization is None else float(optimization.alpha),
        "constant": number(result.constant),
        "sigma1": number(result.sigma1),
        "method": result.method,
        "attaining_x": _vector(result.attaining_x),
        "attaining_y": _vector(result.attaining_y),
        "grid": {},
        "infinite_points": {},
        "spread": None,
    }
    if optimization is not None:
        out["grid"] = {repr(s): number(v) for s, v in optimization.values.items()}
        out["infinite_points"] = {repr(s): int(c) for s, c in optimization.infinite_points.items()}
        out["spread"] = number(optimization.spread)
    return out


DOUGLAS_SCHEMA = {
    "type": "object",
    "required": ["kind", "lambda_star", "range_included", "table", "X_limit", "rank"],
    "properties": {
        "kind": {"const": "douglas-report"},
        "lambda_star": _NUM,
        "range_included": {"type": "boolean"},
        "range_residual": _NUM,
        "table": {"type": "array", "items": {"type": "object",
                                             "required": ["epsilon", "norm_X_eps", "residual",
                                                          "projected_residual"]}},
        "X_limit": {"type": "array"},
        "limit_residual": _NUM,
        "kernel_dimension": {"type": "integer", "minimum": 0},
        "rank": {"type": "integer", "minimum": 0},
        "consistent": {"type": "boolean"},
        "conditioning_warning": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


def douglas_to_json(report) -> Dict[str, Any]:
    from .douglas import TABLE_HEADER
    X = report.X_limit
    return {
        "kind": "douglas-report",
        "lambda_star": number(report.lambda_star),
        "range_included": bool(report.range_included),
        "range_residual": number(report.range_residual),
        "table": [dict(zip(TABLE_HEADER, map(number, row))) for row in report.table],
        "X_limit": encode_matrix(X) if X.size else [],
        "limit_residual": number(report.limit_residual),
        "kernel_dimension": int(report.kernel_basis.shape[1]),
        "rank": int(report.rank),
        "consistent": bool(report.consistent),
        "conditioning_warning": bool(report.conditioning_warning),
        "notes": list(report.notes),
    }


GAP_SCHEMA = {
    "type": "object",
    "required": ["kind", "gamma", "delta", "lambda_min_H", "decay_checks"],
    "properties": {
        "kind": {"const": "gap-certificate"},
        "gamma": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "lambda_min_H": {"type": "number"},
        "a": {"type": "number"},
        "c": {"type": "number"},
        "decay_checks": {"type": "array", "items": {"type": "object", "required": ["t", "norm", "bound"]}},
    },
}


def gap_to_json(cert) -> Dict[str, Any]:
    return {
        "kind": "gap-certificate",
        "gamma": float(cert.gamma),
        "delta": float(cert.delta),
        "lambda_min_H": float(cert.lambda_min_H),
        "a": float(cert.a),
        "c": float(cert.c),
        "decay_checks": [{"t": t, "norm": number(v), "bound": number(b)} for t, v, b in cert.decay_checks],
    }


# ------------------------------------------------------------------ inputs


def dense_from_json(obj) -> np.ndarray:
    """``{"matrix": ...}`` or a block-matrix document (its full entries)."""
    if isinstance(obj, dict) and "matrix" in obj:
        return decode_matrix(obj["matrix"])
    if isinstance(obj, dict) and "blocks" in obj:
        return np.array(blockmatrix_from_json(obj).entries)
    raise SchemaError("expected an object with 'matrix' or a block matrix")


def douglas_from_json(obj):
    from .douglas import DouglasInstance
    _require(obj, ("A", "C"), "douglas input")
    A, C = decode_matrix(obj["A"], "A"), decode_matrix(obj["C"], "C")
    try:
        return DouglasInstance(A, C)
    except GramCertError as exc:
        raise SchemaError(str(exc)) from None


def douglas_input_to_json(inst) -> Dict[str, Any]:
    return {"A": encode_matrix(inst.A), "C": encode_matrix(inst.C)}


def coercivity_from_json(obj):
    """``{"A", "B", "C", "a"?, "c"?}`` or a two-block block matrix."""
    from .spectral import CoercivityInstance
    if not isinstance(obj, dict):
        raise SchemaError("gap input must be a JSON object")
    if "blocks" in obj:
        T = blockmatrix_from_json(obj)
        if T.n != 2:
            raise SchemaError(f"gap input needs exactly 2 blocks, got {T.n}")
        A, B, C = np.array(T.block(0, 0)), np.array(T.block(0, 1)), np.array(T.block(1, 1))
    else:
        _require(obj, ("A", "B", "C"), "gap input")
        A, B, C = (decode_matrix(obj[k], k) for k in ("A", "B", "C"))
    a = obj.get("a")
    c = obj.get("c")
    return CoercivityInstance(A, B, C, None if a is None else parse_number(a),
                              None if c is None else parse_number(c))


def coercivity_input_to_json(inst) -> Dict[str, Any]:
    return {"A": encode_matrix(inst.A), "B": encode_matrix(inst.B), "C": encode_matrix(inst.C),
            "a": float(inst.a), "c": float(inst.c)}
