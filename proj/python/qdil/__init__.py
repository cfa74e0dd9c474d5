"""Isometric dilations of q-commuting and Q-commuting contraction tuples.

Matrices are complex NumPy arrays. Phase matrices are real antisymmetric
arrays theta with q(i, j) = exp(1j * theta[i, j]). Reports are the same
dictionaries the ``qdil`` command-line tool writes.
"""

import json

import numpy as np

from . import _core
from ._core import (
    BASIS_ORDER,
    QdilError,
    brehmer_check,
    hermitian_sqrt,
    pair_dilation,
    pure_dilation_map,
    sylvester_nullspace,
    szego_defect,
    unitary_completion,
)

__all__ = [
    "BASIS_ORDER",
    "QdilError",
    "brehmer_check",
    "dilate_pair",
    "dilate_tuple",
    "generate",
    "hermitian_sqrt",
    "instance_arrays",
    "pair_dilation",
    "pure_dilation_map",
    "sylvester_nullspace",
    "szego_defect",
    "unitary_completion",
    "verify",
]


def _matrix(m):
    rows, cols = m["rows"], m["cols"]
    data = np.array(m["data"], dtype=float).reshape(rows * cols, 2)
    return (data[:, 0] + 1j * data[:, 1]).reshape(rows, cols)


def instance_arrays(instance):
    """NumPy view of an instance bundle.

    A qtuple gives ``(ops, theta)``; a qpair gives ``(T1, T2, Q, variant)``.
    """
    if instance["type"] == "qtuple":
        ops = [_matrix(m) for m in instance["ops"]]
        return ops, np.array(instance["phases"]["theta"], dtype=float).reshape(len(ops), len(ops))
    return _matrix(instance["T1"]), _matrix(instance["T2"]), _matrix(instance["Q"]), instance["variant"]


def generate(spec):
    """Instance bundle (dict) from a generator spec (dict)."""
    return json.loads(_core.generate_json(json.dumps(spec)))


def verify(instance, verify_tol=1e-8):
    return json.loads(_core.verify_json(json.dumps(instance), verify_tol))


def dilate_pair(t1, t2, q, variant="left", k_max=5, verify_tol=1e-8):
    return json.loads(_core.dilate_pair_json(t1, t2, q, variant, k_max, verify_tol))


def dilate_tuple(ops, theta, mode="pure", deg=0, verify_tol=1e-8):
    return json.loads(_core.dilate_tuple_json(list(ops), theta, mode, deg, verify_tol))
