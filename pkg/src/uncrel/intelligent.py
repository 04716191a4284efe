"""Intelligent states: solutions of (A - <A>) phi = z (B - <B>) phi.

Any eigenvector phi of M = A - zB with eigenvalue mu satisfies the
deviation identity, because <phi|M|phi> = mu forces <A> - z<B> = mu.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import tolerances
from .core import Observable, StateVector, eig_general, make_state
from .errors import ConvergenceFailure, DefectiveMatrix, DimMismatch, EmptyGrid
from .moments import deviation_vector
from .tolerances import Tolerances

__all__ = ["IntelligentStateResult", "find_intelligent", "scan_z", "is_intelligent", "deviation_residual"]


@dataclass(frozen=True, eq=False)
class IntelligentStateResult:
    z: complex
    state: StateVector
    residual: float
    r_value: float | None
    degenerate: bool
    eigenvalue: complex = 0j

    def to_dict(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "state": [[c.real, c.imag] for c in self.state.amplitudes.tolist()],
            "residual": self.residual,
            "r_value": self.r_value,
            "degenerate": self.degenerate,
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
        }


def _check(a: Observable, b: Observable) -> None:
    if a.dim != b.dim:
        raise DimMismatch(f"observables {a.name!r} and {b.name!r} have dims {a.dim} and {b.dim}")


def deviation_residual(a: Observable, b: Observable, z: complex, state: StateVector, tol: Tolerances | None = None) -> float:
    """||dA phi - z dB phi||, computed from the deviation vectors themselves."""
    return float(np.linalg.norm(deviation_vector(a, state, tol) - z * deviation_vector(b, state, tol)))


def _res_limit(a: Observable, b: Observable, z: complex, tol: Tolerances) -> float:
    return tol.intel_res * (1.0 + a.scale + abs(z) * b.scale)


def _result(a: Observable, b: Observable, z: complex, mu: complex, state: StateVector, tol: Tolerances) -> IntelligentStateResult:
    da = deviation_vector(a, state, tol)
    db = deviation_vector(b, state, tol)
    residual = float(np.linalg.norm(da - z * db))
    na, nb = float(np.linalg.norm(da)), float(np.linalg.norm(db))
    degenerate = na <= tol.zero_for(a.scale) or nb <= tol.zero_for(b.scale)
    r = None if degenerate else abs(complex(np.vdot(da, db))) / (na * nb)
    return IntelligentStateResult(z, state, residual, r, degenerate, mu)


def find_intelligent(a: Observable, b: Observable, z: complex, tol: Tolerances | None = None) -> list[IntelligentStateResult]:
    """All eigenvectors of A - zB, each checked against the deviation identity."""
    tol = tolerances.resolve(tol)
    _check(a, b)
    z = complex(z)
    m = a.matrix - z * b.matrix
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DefectiveMatrix)
        pairs = eig_general(m, tol)
    limit = _res_limit(a, b, z, tol)
    results = []
    for pair in pairs:
        state = make_state(pair.vector, tol, normalize=True)
        res = _result(a, b, z, pair.value, state, tol)
        if res.residual > limit:
            # one step of inverse iteration on a slightly shifted matrix
            shift = pair.value + 1e-10 * (1.0 + abs(pair.value))
            try:
                v = np.linalg.solve(m - shift * np.eye(a.dim), state.amplitudes)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceFailure(str(exc)) from exc
            state = make_state(v, tol, normalize=True)
            res = _result(a, b, z, pair.value, state, tol)
            if res.residual > limit:
                raise ConvergenceFailure(f"deviation residual {res.residual:.3e} exceeds {limit:.3e} at z={z}")
        results.append(res)
    return results


def scan_z(a: Observable, b: Observable, z_grid: Iterable[complex], tol: Tolerances | None = None) -> list[IntelligentStateResult]:
    """Solve over a grid of z; sorted by residual with degenerate results last."""
    grid = [complex(z) for z in z_grid]
    if not grid:
        raise EmptyGrid("z grid is empty")
    results = [res for z in grid for res in find_intelligent(a, b, z, tol)]
    return sorted(results, key=lambda r: (r.degenerate, r.residual))


class IntelligenceCheck(NamedTuple):
    intelligent: bool
    best_z: complex | None


def is_intelligent(a: Observable, b: Observable, state: StateVector, tol: Tolerances | None = None) -> IntelligenceCheck:
    """Intelligent iff both deviations are positive and r(A, B) = 1.

    ``best_z`` is the least-squares z with dA phi ~ z dB phi.
    """
    tol = tolerances.resolve(tol)
    _check(a, b)
    da = deviation_vector(a, state, tol)
    db = deviation_vector(b, state, tol)
    na, nb = float(np.linalg.norm(da)), float(np.linalg.norm(db))
    if na <= tol.zero_for(a.scale) or nb <= tol.zero_for(b.scale):
        return IntelligenceCheck(False, None)
    overlap = complex(np.vdot(db, da))
    r = abs(overlap) / (na * nb)
    if abs(r - 1.0) > tol.intel:
        return IntelligenceCheck(False, None)
    return IntelligenceCheck(True, overlap / (nb * nb))
