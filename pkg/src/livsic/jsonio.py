"""JSON encoding of complex numbers, matrices, measures and inner functions.

complex   ``[re, im]`` (a bare number is read as real)
matrix    list of rows of complex entries
measure   ``{"domain": "circle" | "line", "atoms": [{"point": z, "weight": matrix}]}``
inner     ``{"constant": z, "zeros": [z, ...]}``
"""
from __future__ import annotations

import json
from numbers import Real
from pathlib import Path

import numpy as np

from .errors import InputError
from .herglotz import AtomicMatrixMeasure, HerglotzData
from .inner import ScalarInner


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(value, where: str = "value") -> complex:
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a number or [re, im], got a boolean")
    if isinstance(value, Real):
        return complex(float(value), 0.0)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, Real) and not isinstance(v, bool) for v in value):
        return complex(float(value[0]), float(value[1]))
    raise InputError(f"{where}: expected a number or [re, im], got {value!r}")


def matrix_to_json(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[complex_to_json(x) for x in row] for row in m]


def matrix_from_json(value, where: str = "matrix") -> np.ndarray:
    if isinstance(value, dict):
        if "matrix" not in value:
            raise InputError(f"{where}: object without a 'matrix' field")
        value = value["matrix"]
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise InputError(f"{where}: expected a non-empty list of rows")
    width = len(value[0])
    rows = []
    for i, row in enumerate(value):
        if len(row) != width:
            raise InputError(f"{where}: row {i} has {len(row)} entries, expected {width}")
        rows.append([complex_from_json(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=complex)


def vector_from_json(value, where: str = "vector") -> np.ndarray:
    if isinstance(value, dict) and "vector" in value:
        value = value["vector"]
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty list")
    return np.array([complex_from_json(x, f"{where}[{i}]") for i, x in enumerate(value)])


def measure_to_json(m: AtomicMatrixMeasure) -> dict:
    return {
        "domain": m.domain,
        "atoms": [{"point": complex_to_json(p), "weight": matrix_to_json(w)} for p, w in zip(m.points, m.weights)],
    }


def measure_from_json(value, where: str = "measure") -> AtomicMatrixMeasure:
    if not isinstance(value, dict) or "domain" not in value or "atoms" not in value:
        raise InputError(f"{where}: expected an object with 'domain' and 'atoms'")
    atoms = value["atoms"]
    if not isinstance(atoms, list):
        raise InputError(f"{where}.atoms: expected a list")
    points, weights = [], []
    for k, atom in enumerate(atoms):
        if not isinstance(atom, dict) or "point" not in atom or "weight" not in atom:
            raise InputError(f"{where}.atoms[{k}]: expected 'point' and 'weight'")
        points.append(complex_from_json(atom["point"], f"{where}.atoms[{k}].point"))
        weights.append(matrix_from_json(atom["weight"], f"{where}.atoms[{k}].weight"))
    return AtomicMatrixMeasure(value["domain"], tuple(points), tuple(weights))


def herglotz_to_json(h: HerglotzData) -> dict:
    return {"P": matrix_to_json(h.P), "measure": measure_to_json(h.measure)}


def inner_to_json(f: ScalarInner) -> dict:
    return {"constant": complex_to_json(f.constant), "zeros": [complex_to_json(a) for a in f.zeros]}


def inner_from_json(value, where: str = "inner") -> ScalarInner:
    if not isinstance(value, dict) or "zeros" not in value:
        raise InputError(f"{where}: expected an object with 'zeros'")
    zeros = value["zeros"]
    if not isinstance(zeros, list):
        raise InputError(f"{where}.zeros: expected a list")
    constant = complex_from_json(value.get("constant", 1.0), f"{where}.constant")
    return ScalarInner(constant, tuple(complex_from_json(z, f"{where}.zeros[{k}]") for k, z in enumerate(zeros)))


def load_json(path) -> object:
    """Read a JSON file, turning parse failures into InputError with position."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
