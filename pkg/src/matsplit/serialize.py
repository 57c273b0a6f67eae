"""JSON formats for algebras, orders, lattices and split results.

Rationals serialize as "p/q" strings (bare "p" when the denominator is 1);
quadratic scalars as {"a": "p/q", "b": "p/q"} with the field descriptor
carried once at top level.  A small structural schema checker validates
outputs against the schema files shipped with the package.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Any

from .algebra import (
    AlgebraElement,
    StructureConstants,
    find_identity,
    ideal_rank,
)
from .errors import InputError
from .exactnum import QQ, ExactMatrix, Field, QuadScalar, scalar_is_zero
from .lattice import LatticeBasis
from .orders import Order


def rational_to_str(x) -> str:
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def rational_from_str(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational literal {s!r}") from exc


def scalar_to_json(x):
    if isinstance(x, QuadScalar):
        return {"a": rational_to_str(x.a), "b": rational_to_str(x.b)}
    return rational_to_str(x)


def scalar_from_json(field: Field, obj):
    if isinstance(obj, str):
        return field.coerce(rational_from_str(obj))
    if isinstance(obj, dict) and "a" in obj and "b" in obj:
        if field.is_rational:
            raise InputError("quadratic scalar in a rational algebra")
        return QuadScalar(field.d, rational_from_str(obj["a"]), rational_from_str(obj["b"]))
    raise InputError(f"bad scalar {obj!r}")


def field_to_json(field: Field) -> dict:
    if field.is_rational:
        return {"type": "Q"}
    return {"type": "imag_quad", "d": field.d}


def field_from_json(obj) -> Field:
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError("field descriptor must be an object with a type")
    if obj["type"] == "Q":
        return QQ
    if obj["type"] == "imag_quad":
        return Field(int(obj["d"]))
    raise InputError(f"unknown field type {obj['type']!r}")


def algebra_to_json(table: StructureConstants) -> dict:
    return {
        "field": field_to_json(table.field),
        "dim": table.m,
        "gamma": [
            [[scalar_to_json(table.gamma[i][j][k]) for k in range(table.m)]
             for j in range(table.m)]
            for i in range(table.m)
        ],
    }


def algebra_from_json(obj) -> StructureConstants:
    field = field_from_json(obj.get("field"))
    m = int(obj.get("dim", 0))
    gamma = obj.get("gamma")
    if not isinstance(gamma, list) or len(gamma) != m:
        raise InputError("gamma grid does not match the declared dimension")
    grid = [
        [[scalar_from_json(field, gamma[i][j][k]) for k in range(m)] for j in range(m)]
        for i in range(m)
    ]
    return StructureConstants(field, grid)


def vector_to_json(vec) -> list:
    return [scalar_to_json(x) for x in vec]


def vector_from_json(field: Field, obj) -> tuple:
    return tuple(scalar_from_json(field, x) for x in obj)


def matrix_to_json(M: ExactMatrix) -> list:
    return [[scalar_to_json(x) for x in row] for row in M.entries]


def matrix_from_json(field: Field, obj) -> ExactMatrix:
    return ExactMatrix(field, [[scalar_from_json(field, x) for x in row] for row in obj])


def order_to_json(order: Order) -> dict:
    return {
        "field": field_to_json(order.table.field),
        "dim": order.table.m,
        "basis": [vector_to_json(order.basis_matrix.column(j)) for j in range(order.table.m)],
        "discriminant": scalar_to_json(order.discriminant),
    }


def order_from_json(table: StructureConstants, obj) -> Order:
    cols = [vector_from_json(table.field, c) for c in obj["basis"]]
    return Order(table, ExactMatrix.from_columns(table.field, [list(c) for c in cols]))


def lattice_to_json(basis: LatticeBasis) -> dict:
    return {
        "dim": basis.ambient_dim,
        "basis": [[rational_to_str(x) for x in col] for col in basis.columns],
    }


def lattice_from_json(obj) -> LatticeBasis:
    cols = [[rational_from_str(x) for x in col] for col in obj["basis"]]
    if any(len(c) != int(obj["dim"]) for c in cols):
        raise InputError("basis vectors do not match the declared dimension")
    return LatticeBasis(cols)


def result_to_json(result, table: StructureConstants) -> dict:
    stats = result.stats
    return {
        "field": field_to_json(table.field),
        "n": table.n,
        "algebra": algebra_to_json(table),
        "rank_one_element": vector_to_json(result.rank_one_element.coords),
        "witness": {
            "left_ideal_basis": [
                vector_to_json(el.coords) for el in result.witness.left_ideal_basis
            ],
            "images": [matrix_to_json(M) for M in result.witness.images],
        },
        "stats": {
            "engine": stats.engine,
            "dynamic_pruning": stats.dynamic_pruning,
            "precision_bits": stats.precision_bits,
            "nodes_visited": stats.nodes_visited,
            "found_norm": stats.found_norm,
            "norm_bound": stats.norm_bound,
            "norm_bound_satisfied": stats.norm_bound_satisfied,
            "disc_trace": [str(x) for x in stats.disc_trace],
            "wall_time": stats.wall_time,
            "minimal_class_size": stats.minimal_class_size,
            "box_nodes_static": stats.box_nodes_static,
            "box_nodes_cm_flat": (
                str(stats.box_nodes_cm_flat)
                if stats.box_nodes_cm_flat is not None
                else None
            ),
        },
    }


def verify_result_json(obj) -> list[str]:
    """Re-run the exact checks on a serialized split result.

    Returns a list of failure descriptions; empty means the witness is valid.
    """
    problems = []
    table = algebra_from_json(obj["algebra"])
    n = table.n
    element = AlgebraElement(table, vector_from_json(table.field, obj["rank_one_element"]))
    if ideal_rank(element, n) != 1:
        problems.append("claimed element does not have ideal rank one")
    images = [matrix_from_json(table.field, M) for M in obj["witness"]["images"]]
    if len(images) != table.m:
        problems.append("wrong number of image matrices")
        return problems
    for i in range(table.m):
        for j in range(table.m):
            prod = images[i] @ images[j]
            acc = ExactMatrix.zeros(table.field, n, n)
            for k in range(table.m):
                g = table.gamma[i][j][k]
                if not scalar_is_zero(g):
                    acc = acc + images[k].scaled(g)
            if prod != acc:
                problems.append(f"multiplicativity fails at basis pair ({i}, {j})")
                return problems
    e = find_identity(table)
    phi_e = ExactMatrix.zeros(table.field, n, n)
    for k in range(table.m):
        if not scalar_is_zero(e.coords[k]):
            phi_e = phi_e + images[k].scaled(e.coords[k])
    if phi_e != ExactMatrix.identity(table.field, n):
        problems.append("phi(1) is not the identity")
    return problems


# -- structural schema checking ----------------------------------------------


def load_schema(name: str) -> dict:
    text = resources.files("matsplit").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


def check_schema(obj: Any, schema: dict, path: str = "$") -> list[str]:
    """Minimal structural validation: type, required, properties, items, enum."""
    errors = []
    t = schema.get("type")
    if t:
        ok = {
            "object": lambda v: isinstance(v, dict),
            "array": lambda v: isinstance(v, list),
            "string": lambda v: isinstance(v, str),
            "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
            "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
            "boolean": lambda v: isinstance(v, bool),
            "null": lambda v: v is None,
        }
        types = t if isinstance(t, list) else [t]
        if not any(ok[tt](obj) for tt in types):
            errors.append(f"{path}: expected {t}, got {type(obj).__name__}")
            return errors
    if "enum" in schema and obj not in schema["enum"]:
        errors.append(f"{path}: {obj!r} not in enum")
    if isinstance(obj, dict):
        for key in schema.get("required", []):
            if key not in obj:
                errors.append(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in obj:
                errors.extend(check_schema(obj[key], sub, f"{path}.{key}"))
    if isinstance(obj, list) and "items" in schema:
        for i, item in enumerate(obj):
            errors.extend(check_schema(item, schema["items"], f"{path}[{i}]"))
    return errors
