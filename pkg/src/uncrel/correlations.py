"""Correlation matrices of Pearson coefficients, their determinants, the
three-observable consistency theorems and feasibility-region grids."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from . import tolerances
from .core import Observable, StateVector
from .errors import ArityMismatch, DimMismatch, NotIntelligent, OutOfRange, ZeroDeviation
from .moments import joint_moments
from .tolerances import Tolerances

__all__ = [
    "CorrelationMatrix",
    "RegionSample",
    "EntanglementVerdict",
    "Theorem2Result",
    "build_correlation_matrix",
    "correlation_matrix_from_coefficients",
    "determinant",
    "r3_closed_form",
    "feasibility_region",
    "feasible_fraction",
    "region_csv",
    "theorem2_check",
    "theorem2_from_matrix",
    "corollary2_check",
    "corollary2_from_matrix",
    "classify_entanglement",
]

REGION_HEADER = ("r12", "r13", "r23", "det", "feasible")


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    entries: np.ndarray
    determinant: float
    synthetic: bool = False
    names: tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    def r(self, i: int, j: int) -> float:
        return float(self.entries[i, j])

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "names": list(self.names),
            "entries": self.entries.tolist(),
            "determinant": self.determinant,
            "synthetic": self.synthetic,
        }


def r3_closed_form(r12: float, r13: float, r23: float, tol: Tolerances | None = None) -> float:
    """1 + 2 r12 r13 r23 - r12^2 - r13^2 - r23^2."""
    tol = tolerances.resolve(tol)
    for name, v in (("r12", r12), ("r13", r13), ("r23", r23)):
        if not (-tol.rel <= v <= 1.0 + tol.rel):
            raise OutOfRange(f"{name} = {v!r} outside [0, 1]")
    return 1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23


def determinant(entries: np.ndarray) -> float:
    """Exact cofactor expansion for k <= 3, LU factorization beyond."""
    m = np.asarray(entries, dtype=float)
    k = m.shape[0]
    if k == 1:
        return float(m[0, 0])
    if k == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if k == 3:
        return float(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
    return float(np.linalg.det(m))


def build_correlation_matrix(
    observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None
) -> CorrelationMatrix:
    tol = tolerances.resolve(tol)
    if len(observables) < 2:
        raise ArityMismatch("a correlation matrix needs at least 2 observables")
    r = joint_moments(observables, state, tol).pearson_matrix()
    r = 0.5 * (r + r.T)
    r.setflags(write=False)
    return CorrelationMatrix(r, determinant(r), synthetic=False, names=tuple(o.name for o in observables))


def correlation_matrix_from_coefficients(coefficients, tol: Tolerances | None = None) -> CorrelationMatrix:
    """Synthetic matrix from a k x k array or from (r12, r13, r23)."""
    tol = tolerances.resolve(tol)
    arr = np.asarray(coefficients, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != 3:
            raise ArityMismatch("flat input must be (r12, r13, r23)")
        r12, r13, r23 = arr
        arr = np.array([[1.0, r12, r13], [r12, 1.0, r23], [r13, r23, 1.0]])
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
        raise ArityMismatch(f"expected a square k x k matrix with k >= 2, got shape {arr.shape}")
    if not np.allclose(arr, arr.T) or not np.allclose(np.diag(arr), 1.0):
        raise OutOfRange("correlation matrix must be symmetric with unit diagonal")
    if np.any(arr < -tol.rel) or np.any(arr > 1.0 + tol.rel):
        raise OutOfRange("correlation coefficients must lie in [0, 1]")
    arr = arr.copy()
    arr.setflags(write=False)
    return CorrelationMatrix(arr, determinant(arr), synthetic=True)


@dataclass(frozen=True, eq=False)
class RegionSample:
    r12: float
    grid_step: float
    r13: np.ndarray
    r23: np.ndarray
    det: np.ndarray
    feasible: np.ndarray

    @property
    def points(self) -> list[tuple[float, float, float, bool]]:
        return [
            (float(a), float(b), float(d), bool(f))
            for a, b, d, f in zip(self.r13, self.r23, self.det, self.feasible)
        ]

    def __len__(self) -> int:
        return len(self.det)


def _exact(value: float | str | Fraction) -> Fraction:
    # Decimal strings and the shortest float repr both give the intended rational.
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(repr(float(value)))


def feasibility_region(
    r12: float | str, step: float | str, *, cells: bool = False, max_step: Fraction | int = 1
) -> RegionSample:
    """Lattice of (r13, r23) in [0, 1]^2 flagged by the sign of the 3x3 determinant.

    Coordinates are exact rationals (decimal inputs are read exactly), and the
    sign is decided in integer arithmetic so boundary points such as
    (0.6, 0.8) at r12 = 0 are classified exactly. With ``cells=True`` the
    points are cell centres offset by step/2. The command line passes
    ``max_step=Fraction(1, 10)``.
    """
    q12, qs = _exact(r12), _exact(step)
    if not (0 <= q12 <= 1):
        raise OutOfRange(f"r12 = {r12} outside [0, 1]")
    if not (0 < qs <= max_step):
        raise OutOfRange(f"step = {step} outside (0, {max_step}]")
    count = math.floor(1 / qs)
    if cells:
        # centre of cell i is (2i + 1) * step / 2
        numer = np.arange(count, dtype=np.int64) * 2 + 1
        denom_frac = qs / 2
    else:
        numer = np.arange(count + 1, dtype=np.int64)
        denom_frac = qs
    # coordinate = numer * p / m with denom_frac = p / m
    p, m = denom_frac.numerator, denom_frac.denominator
    a, q = q12.numerator, q12.denominator
    i = np.repeat(numer, len(numer))
    j = np.tile(numer, len(numer))
    # det * q^2 m^2 = q^2 m^2 + 2 a q p^2 i j - a^2 m^2 - q^2 p^2 (i^2 + j^2)
    bound = max(q * m, a * m, q * p * int(numer[-1])) ** 2 * 8
    if bound < 2**62:
        I, J = i, j
    else:
        I, J = i.astype(object), j.astype(object)
    scaled = q * q * m * m + 2 * a * q * p * p * I * J - a * a * m * m - q * q * p * p * (I * I + J * J)
    feasible = np.asarray(scaled >= 0, dtype=bool)
    det = np.array([float(Fraction(int(s), q * q * m * m)) for s in scaled]) if scaled.dtype == object else (
        scaled.astype(float) / float(q * q * m * m)
    )
    coords13 = (i * p) / m
    coords23 = (j * p) / m
    return RegionSample(float(q12), float(qs), coords13.astype(float), coords23.astype(float), det, feasible)


def feasible_fraction(region: RegionSample) -> float:
    return float(np.count_nonzero(region.feasible)) / len(region)


def region_csv(region: RegionSample) -> str:
    """CSV with header r12,r13,r23,det,feasible; 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGION_HEADER)
    r12 = f"{region.r12:.17g}"
    for a, b, d, f in zip(region.r13, region.r23, region.det, region.feasible):
        w.writerow((r12, f"{a:.17g}", f"{b:.17g}", f"{d:.17g}", 1 if f else 0))
    return buf.getvalue()


class Theorem2Result(NamedTuple):
    r13: float
    r23: float
    consistent: bool


def theorem2_from_matrix(cm: CorrelationMatrix, tol: Tolerances | None = None) -> Theorem2Result:
    """For r12 = 1 the only realizable configurations have r13 == r23."""
    tol = tolerances.resolve(tol)
    if cm.k != 3:
        raise ArityMismatch("theorem check needs a 3x3 correlation matrix")
    if abs(cm.r(0, 1) - 1.0) > tol.intel:
        raise NotIntelligent(f"r12 = {cm.r(0, 1):.12g} is not 1 within {tol.intel:g}")
    r13, r23 = cm.r(0, 2), cm.r(1, 2)
    return Theorem2Result(r13, r23, abs(r13 - r23) <= tol.thm)


def theorem2_check(observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None) -> Theorem2Result:
    if len(observables) != 3:
        raise ArityMismatch(f"expected 3 observables, got {len(observables)}")
    return theorem2_from_matrix(build_correlation_matrix(observables, state, tol), tol)


def corollary2_from_matrix(cm: CorrelationMatrix, tol: Tolerances | None = None) -> bool:
    """r12 = r23 = 1 must force r13 = 1."""
    tol = tolerances.resolve(tol)
    if cm.k != 3:
        raise ArityMismatch("corollary check needs a 3x3 correlation matrix")
    for (i, j) in ((0, 1), (1, 2)):
        if abs(cm.r(i, j) - 1.0) > tol.intel:
            raise NotIntelligent(f"r{i + 1}{j + 1} = {cm.r(i, j):.12g} is not 1 within {tol.intel:g}")
    return abs(cm.r(0, 2) - 1.0) <= tol.thm


def corollary2_check(observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None) -> bool:
    if len(observables) != 3:
        raise ArityMismatch(f"expected 3 observables, got {len(observables)}")
    return corollary2_from_matrix(build_correlation_matrix(observables, state, tol), tol)


@dataclass(frozen=True)
class EntanglementVerdict:
    """Pairwise non-factorizability flags and, for three observables, their conjunction."""

    pair_flags: dict[tuple[int, int], bool]
    triple_flag: bool | None

    def to_dict(self) -> dict:
        return {
            "pair_flags": [{"pair": list(k), "entangled": v} for k, v in self.pair_flags.items()],
            "triple_flag": self.triple_flag,
        }


def classify_entanglement(
    observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None
) -> EntanglementVerdict:
    tol = tolerances.resolve(tol)
    n = len(observables)
    if n not in (2, 3):
        raise ArityMismatch(f"entanglement classification takes 2 or 3 observables, got {n}")
    for obs in observables:
        if obs.dim != state.dim:
            raise DimMismatch(f"observable {obs.name!r} has dim {obs.dim}, state has dim {state.dim}")
    jm = joint_moments(observables, state, tol)
    flags = {}
    for i, j in combinations(range(n), 2):
        limit = tol.zero_for(max(jm.scales[i], jm.scales[j]))
        flags[(i, j)] = bool(abs(jm.cov[i, j]) > limit)
    triple = all(flags.values()) if n == 3 else None
    return EntanglementVerdict(flags, triple)
