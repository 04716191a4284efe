"""Norm and inner-product inequalities on raw vectors of an inner-product space.

Each function returns the two sides of an inequality written as
``lhs >= rhs``. These operate on arbitrary complex vectors and are the
vector-level counterparts of the relations in :mod:`uncrel.relations`.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "Sides",
    "cauchy_schwarz",
    "cs_product",
    "buzano",
    "buzano_weak",
    "lupu_schwarz",
    "lupu_schwarz_weak",
    "jensen_norm",
    "jensen_norm_sq",
    "triangle",
    "triangle_second_kind",
]


class Sides(NamedTuple):
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    def holds(self, rel: float = 1e-9) -> bool:
        return self.slack >= -rel * (1.0 + abs(self.lhs) + abs(self.rhs))


def _ip(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(u, v))


def _norm(u: np.ndarray) -> float:
    return float(np.linalg.norm(u))


def cauchy_schwarz(u, v) -> Sides:
    """||u|| ||v|| >= |<u|v>|."""
    u, v = np.asarray(u, complex), np.asarray(v, complex)
    return Sides(_norm(u) * _norm(v), abs(_ip(u, v)))


def cs_product(vectors: Sequence) -> Sides:
    """Product of the pairwise Cauchy-Schwarz inequalities over all pairs.

    For n vectors each norm appears with exponent n - 1; n = 3 and n = 4
    give the triple and quadruple forms.
    """
    vs = [np.asarray(v, complex) for v in vectors]
    n = len(vs)
    lhs = float(np.prod([_norm(v) ** (n - 1) for v in vs]))
    rhs = float(np.prod([abs(_ip(vs[i], vs[j])) for i, j in combinations(range(n), 2)]))
    return Sides(lhs, rhs)


def buzano(u1, u2, u3) -> Sides:
    """1/2 (||u1|| ||u2|| + |<u1|u2>|) ||u3||^2 >= |<u1|u3><u3|u2>|."""
    u1, u2, u3 = (np.asarray(v, complex) for v in (u1, u2, u3))
    lhs = 0.5 * (_norm(u1) * _norm(u2) + abs(_ip(u1, u2))) * _norm(u3) ** 2
    return Sides(lhs, abs(_ip(u1, u3) * _ip(u3, u2)))


def buzano_weak(u1, u2, u3) -> Sides:
    u1, u2, u3 = (np.asarray(v, complex) for v in (u1, u2, u3))
    return Sides(_norm(u1) * _norm(u2) * _norm(u3) ** 2, abs(_ip(u1, u3) * _ip(u3, u2)))


def lupu_schwarz(u1, u2, u3) -> Sides:
    """Three-vector Lupu-Schwarz inequality with the triple product on the left."""
    u1, u2, u3 = (np.asarray(v, complex) for v in (u1, u2, u3))
    n1, n2, n3 = _norm(u1) ** 2, _norm(u2) ** 2, _norm(u3) ** 2
    g12, g23, g31 = _ip(u1, u2), _ip(u2, u3), _ip(u3, u1)
    lhs = n1 * n2 * n3 + 2.0 * abs(g12 * g23 * g31)
    rhs = n1 * abs(g23) ** 2 + n2 * abs(g31) ** 2 + n3 * abs(g12) ** 2
    return Sides(lhs, rhs)


def lupu_schwarz_weak(u1, u2, u3) -> Sides:
    u1, u2, u3 = (np.asarray(v, complex) for v in (u1, u2, u3))
    n1, n2, n3 = _norm(u1) ** 2, _norm(u2) ** 2, _norm(u3) ** 2
    rhs = n1 * abs(_ip(u2, u3)) ** 2 + n2 * abs(_ip(u3, u1)) ** 2 + n3 * abs(_ip(u1, u2)) ** 2
    return Sides(3.0 * n1 * n2 * n3, rhs)


def _weights(n: int, weights) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0) or not np.isclose(w.sum(), 1.0):
        raise ValueError("weights must be n positive numbers summing to 1")
    return w


def jensen_norm(vectors: Sequence, weights=None) -> Sides:
    """sum p_i ||u_i|| >= ||sum p_i u_i||."""
    vs = np.array([np.asarray(v, complex) for v in vectors])
    w = _weights(len(vs), weights)
    return Sides(float(np.dot(w, np.linalg.norm(vs, axis=1))), _norm(w @ vs))


def jensen_norm_sq(vectors: Sequence, weights=None) -> Sides:
    """sum p_i ||u_i||^2 >= ||sum p_i u_i||^2."""
    vs = np.array([np.asarray(v, complex) for v in vectors])
    w = _weights(len(vs), weights)
    return Sides(float(np.dot(w, np.linalg.norm(vs, axis=1) ** 2)), _norm(w @ vs) ** 2)


def triangle(vectors: Sequence) -> Sides:
    """Generalized triangle inequality: sum ||u_i|| >= ||sum u_i||."""
    vs = np.array([np.asarray(v, complex) for v in vectors])
    return Sides(float(np.linalg.norm(vs, axis=1).sum()), _norm(vs.sum(axis=0)))


def triangle_second_kind(vectors: Sequence) -> Sides:
    """sum ||u_i||^2 >= (1/n) ||sum u_i||^2."""
    vs = np.array([np.asarray(v, complex) for v in vectors])
    n = len(vs)
    return Sides(float((np.linalg.norm(vs, axis=1) ** 2).sum()), _norm(vs.sum(axis=0)) ** 2 / n)
