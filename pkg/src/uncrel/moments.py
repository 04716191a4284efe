"""Expectations, deviation vectors, covariances and Pearson coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances
from .core import Observable, StateVector, commutator
from .errors import DimMismatch, NonRealExpectation, ZeroDeviation
from .tolerances import Tolerances

__all__ = [
    "MomentReport",
    "CovarianceRecord",
    "JointMoments",
    "expectation",
    "deviation_vector",
    "moment_report",
    "covariance",
    "pearson",
    "joint_moments",
]


def _check_dims(state: StateVector, *observables: Observable) -> None:
    for obs in observables:
        if obs.dim != state.dim:
            raise DimMismatch(f"observable {obs.name!r} has dim {obs.dim}, state has dim {state.dim}")


@dataclass(frozen=True)
class MomentReport:
    mean: float
    stddev: float
    deviation_norm_sq: float


@dataclass(frozen=True)
class CovarianceRecord:
    """C(A, B) = <AB> - <A><B> together with <[A, B]>."""

    value: complex
    commutator_expectation: complex

    @property
    def re_part(self) -> float:
        return self.value.real

    @property
    def im_part(self) -> float:
        return self.value.imag


def expectation(a: Observable, state: StateVector, tol: Tolerances | None = None) -> float:
    tol = tolerances.resolve(tol)
    _check_dims(state, a)
    phi = state.amplitudes
    value = complex(np.vdot(phi, a.matrix @ phi))
    if abs(value.imag) > tol.rel * (1.0 + a.scale):
        raise NonRealExpectation(f"<{a.name}> has imaginary part {value.imag:.3e}")
    return value.real


def deviation_vector(a: Observable, state: StateVector, tol: Tolerances | None = None) -> np.ndarray:
    """(A - <A>) phi; orthogonal to phi by construction."""
    mean = expectation(a, state, tol)
    phi = state.amplitudes
    return a.matrix @ phi - mean * phi


def moment_report(a: Observable, state: StateVector, tol: Tolerances | None = None) -> MomentReport:
    dev = deviation_vector(a, state, tol)
    norm_sq = float(np.vdot(dev, dev).real)
    return MomentReport(mean=expectation(a, state, tol), stddev=float(np.linalg.norm(dev)), deviation_norm_sq=norm_sq)


def covariance(a: Observable, b: Observable, state: StateVector, tol: Tolerances | None = None) -> CovarianceRecord:
    _check_dims(state, a, b)
    value = complex(np.vdot(deviation_vector(a, state, tol), deviation_vector(b, state, tol)))
    phi = state.amplitudes
    comm = complex(np.vdot(phi, commutator(a, b) @ phi))
    return CovarianceRecord(value=value, commutator_expectation=comm)


def pearson(a: Observable, b: Observable, state: StateVector, tol: Tolerances | None = None) -> float:
    """|C(A, B)| / (dA dB); raises ZeroDeviation when either deviation is ~0."""
    tol = tolerances.resolve(tol)
    da = moment_report(a, state, tol).stddev
    db = moment_report(b, state, tol).stddev
    if da <= tol.zero_for(a.scale):
        raise ZeroDeviation(a.name, da)
    if db <= tol.zero_for(b.scale):
        raise ZeroDeviation(b.name, db)
    return abs(covariance(a, b, state, tol).value) / (da * db)


@dataclass(frozen=True, eq=False)
class JointMoments:
    """All first and second moments of N observables in one state.

    ``cov[i, j]`` is C(A_i, A_j) built from deviation vectors; ``comm[i, j]``
    is <[A_i, A_j]> built from the raw second moments <A_i A_j>.
    """

    names: tuple[str, ...]
    means: np.ndarray
    deviations: np.ndarray
    deltas: np.ndarray
    cov: np.ndarray
    comm: np.ndarray
    scales: np.ndarray
    zero_limits: np.ndarray

    @property
    def n(self) -> int:
        return len(self.names)

    def is_zero(self, i: int) -> bool:
        return bool(self.deltas[i] <= self.zero_limits[i])

    def zero_indices(self) -> list[int]:
        return [i for i in range(self.n) if self.is_zero(i)]

    def pearson_matrix(self) -> np.ndarray:
        """Matrix of r_ij; raises ZeroDeviation if any deviation is ~0."""
        for i in range(self.n):
            if self.is_zero(i):
                raise ZeroDeviation(self.names[i], float(self.deltas[i]))
        r = np.abs(self.cov) / np.outer(self.deltas, self.deltas)
        np.fill_diagonal(r, 1.0)
        return r


def joint_moments(
    observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None
) -> JointMoments:
    tol = tolerances.resolve(tol)
    _check_dims(state, *observables)
    phi = state.amplitudes
    n = len(observables)
    applied = np.array([obs.matrix @ phi for obs in observables]).reshape(n, state.dim)
    raw_means = applied @ phi.conj()
    scales = np.array([obs.scale for obs in observables])
    for obs, m, s in zip(observables, raw_means, scales):
        if abs(m.imag) > tol.rel * (1.0 + s):
            raise NonRealExpectation(f"<{obs.name}> has imaginary part {m.imag:.3e}")
    means = raw_means.real
    deviations = applied - means[:, None] * phi[None, :]
    deltas = np.linalg.norm(deviations, axis=1)
    cov = deviations.conj() @ deviations.T
    # <phi|A_i A_j|phi> = <A_i phi|A_j phi> for Hermitian A_i.
    second = applied.conj() @ applied.T
    comm = second - second.T
    zero_limits = np.array([tol.zero_for(s) for s in scales])
    arrays = [means, deviations, deltas, cov, comm, scales, zero_limits]
    for arr in arrays:
        arr.setflags(write=False)
    return JointMoments(tuple(o.name for o in observables), *arrays)
