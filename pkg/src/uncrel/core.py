"""Dense complex linear-algebra primitives: observables, states, eigenpairs.

Eigen-decompositions are delegated to LAPACK through :mod:`numpy.linalg`;
the contract enforced here is the residual bound on every returned pair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import tolerances
from .errors import (
    ConvergenceFailure,
    DefectiveMatrix,
    DimMismatch,
    NonFinite,
    NonHermitian,
    NonSquare,
    NotNormalized,
)
from .tolerances import Tolerances

__all__ = [
    "Observable",
    "StateVector",
    "EigenPair",
    "make_observable",
    "make_state",
    "inner_product",
    "commutator",
    "eig_hermitian",
    "eig_general",
    "max_entry",
    "as_matrix",
    "as_vector",
]

# Greedy rank test inside an eigenvalue cluster: a Jordan block perturbed by
# rounding yields eigenvectors that differ by ~sqrt(eps).
_INDEPENDENCE_TOL = 1e-6
_CLUSTER_TOL = 1e-4


def max_entry(matrix: np.ndarray) -> float:
    """Max-entry magnitude, the scale used for every tolerance."""
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Observable:
    """Named Hermitian matrix.

    Direct construction validates against the process-wide default
    tolerances; use :func:`make_observable` to pass explicit ones.
    """

    name: str
    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _validated_matrix(self.matrix, self.name, tolerances.get_default()))

    @classmethod
    def _trusted(cls, name: str, matrix: np.ndarray) -> "Observable":
        obj = object.__new__(cls)
        object.__setattr__(obj, "name", name)
        object.__setattr__(obj, "matrix", _frozen(matrix))
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def scale(self) -> float:
        return max_entry(self.matrix)

    def __add__(self, other: "Observable") -> "Observable":
        if self.dim != other.dim:
            raise DimMismatch(f"cannot add dims {self.dim} and {other.dim}")
        return Observable._trusted(f"{self.name}+{other.name}", self.matrix + other.matrix)

    def __repr__(self) -> str:
        return f"Observable(name={self.name!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector in C^d, d >= 2."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", _validated_state(self.amplitudes, tolerances.get_default(), False))

    @classmethod
    def _trusted(cls, amplitudes: np.ndarray) -> "StateVector":
        obj = object.__new__(cls)
        object.__setattr__(obj, "amplitudes", _frozen(amplitudes))
        return obj

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim})"


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray


Vectorish = Union[StateVector, np.ndarray, Sequence[complex]]
Matrixish = Union[Observable, np.ndarray, Sequence[Sequence[complex]]]


def as_vector(v: Vectorish) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.amplitudes
    return np.asarray(v, dtype=complex)


def as_matrix(m: Matrixish) -> np.ndarray:
    if isinstance(m, Observable):
        return m.matrix
    return np.asarray(m, dtype=complex)


def _validated_matrix(entries, name: str, tol: Tolerances) -> np.ndarray:
    try:
        arr = np.array(entries, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise NonSquare(f"entries of {name!r} do not form a rectangular numeric grid") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NonSquare(f"entries of {name!r} have shape {arr.shape}, expected (d, d)")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"entries of {name!r} contain NaN or Inf")
    asym = max_entry(arr - arr.conj().T)
    limit = tol.herm_for(max_entry(arr))
    if asym > limit:
        raise NonHermitian(asym, limit, name)
    # Symmetrize so downstream expectations are exactly real-valued in form.
    return _frozen(0.5 * (arr + arr.conj().T))


def _validated_state(amplitudes, tol: Tolerances, normalize: bool) -> np.ndarray:
    arr = np.array(amplitudes, dtype=complex)
    if arr.ndim != 1:
        raise DimMismatch(f"state must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimMismatch("state dimension must be at least 2")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("state amplitudes contain NaN or Inf")
    norm = float(np.linalg.norm(arr))
    if normalize:
        if norm == 0.0:
            raise NotNormalized("cannot normalize the zero vector")
    elif abs(norm - 1.0) > tol.renorm:
        raise NotNormalized(f"state norm {norm!r} deviates from 1 by more than {tol.renorm:g}")
    if abs(norm - 1.0) > tol.norm or normalize:
        arr = arr / norm
    return _frozen(arr)


def make_observable(name: str, entries: Matrixish, tol: Tolerances | None = None) -> Observable:
    """Validate ``entries`` as a Hermitian matrix and wrap it.

    Raises :class:`NonSquare`, :class:`NonFinite` or :class:`NonHermitian`
    (the latter carries the max asymmetry entry).
    """
    tol = tolerances.resolve(tol)
    if isinstance(entries, Observable):
        entries = entries.matrix
    return Observable._trusted(name, _validated_matrix(entries, name, tol))


def make_state(amplitudes: Vectorish, tol: Tolerances | None = None, *, normalize: bool = False) -> StateVector:
    """Build a state; near-unit inputs are renormalized, others rejected unless ``normalize``."""
    tol = tolerances.resolve(tol)
    return StateVector._trusted(_validated_state(as_vector(amplitudes), tol, normalize))


def inner_product(u: Vectorish, v: Vectorish) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    a, b = as_vector(u), as_vector(v)
    if a.shape != b.shape:
        raise DimMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def commutator(a: Matrixish, b: Matrixish) -> np.ndarray:
    """AB - BA."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimMismatch(f"matrix shapes differ: {ma.shape} vs {mb.shape}")
    return ma @ mb - mb @ ma


def _residual_limit(matrix: np.ndarray, tol: Tolerances) -> float:
    return tol.eig * (1.0 + max_entry(matrix) * matrix.shape[0])


def eig_hermitian(a: Matrixish, tol: Tolerances | None = None) -> list[EigenPair]:
    """Eigenpairs of a Hermitian matrix, ascending eigenvalues."""
    tol = tolerances.resolve(tol)
    m = as_matrix(a)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    limit = _residual_limit(m, tol)
    pairs = []
    for k in range(m.shape[0]):
        v = vectors[:, k]
        lam = float(values[k])
        res = float(np.linalg.norm(m @ v - lam * v))
        if res > limit:
            raise ConvergenceFailure(f"eigenpair {k} residual {res:.3e} exceeds {limit:.3e}")
        pairs.append(EigenPair(complex(lam), _frozen(v)))
    return pairs


def eig_general(m: Matrixish, tol: Tolerances | None = None) -> list[EigenPair]:
    """Eigenpairs of an arbitrary square complex matrix.

    Repeated eigenvalues may yield fewer independent eigenvectors than the
    dimension; in that case a :class:`DefectiveMatrix` warning is emitted
    and only the independent ones are returned.
    """
    tol = tolerances.resolve(tol)
    mat = as_matrix(m)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise NonFinite("matrix contains NaN or Inf")
    d = mat.shape[0]
    try:
        values, vectors = np.linalg.eig(mat)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc

    # Within each cluster of nearly equal eigenvalues keep a maximal
    # independent subset of eigenvectors (greedy Gram-Schmidt).
    cluster_tol = _CLUSTER_TOL * (1.0 + max_entry(mat))
    kept: list[int] = []
    kept_basis: list[np.ndarray] = []
    for k in range(d):
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        v_perp = v
        for j, q in zip(kept, kept_basis):
            if abs(values[j] - values[k]) <= cluster_tol:
                v_perp = v_perp - q * np.vdot(q, v_perp)
        if np.linalg.norm(v_perp) <= _INDEPENDENCE_TOL:
            continue
        kept.append(k)
        kept_basis.append(v_perp / np.linalg.norm(v_perp))

    limit = _residual_limit(mat, tol)
    pairs = []
    for k in kept:
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        lam = complex(values[k])
        res = float(np.linalg.norm(mat @ v - lam * v))
        if res > limit:
            raise ConvergenceFailure(f"eigenpair {k} residual {res:.3e} exceeds {limit:.3e}")
        pairs.append(EigenPair(lam, _frozen(v)))
    if len(pairs) < d:
        warnings.warn(
            f"matrix is defective: {len(pairs)} independent eigenvectors for dimension {d}",
            DefectiveMatrix,
            stacklevel=2,
        )
    return pairs
