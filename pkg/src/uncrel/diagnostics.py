"""Critical points: eigenstates of one observable, orthogonal deviation
vectors, and the sum relations that survive when one deviation vanishes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from . import tolerances
from .core import Observable, StateVector
from .errors import ArityTooSmall, NotEigenstate, SoundnessViolation
from .moments import JointMoments, joint_moments
from .relations import RelationId, RelationVerdict, _verdict, evaluate_all, inputs_digest
from .tolerances import Tolerances

__all__ = ["CriticalReport", "SumReduction", "critical_report", "sum_reduction", "reduced_sum_relations"]


@dataclass(frozen=True)
class CriticalReport:
    eigen_flags: tuple[bool, ...]
    orthogonal_pairs: tuple[tuple[int, int], ...]
    trivial_relations: tuple[RelationId, ...]
    zero_bound_relations: tuple[RelationId, ...]

    def to_dict(self) -> dict:
        return {
            "eigen_flags": list(self.eigen_flags),
            "orthogonal_pairs": [list(p) for p in self.orthogonal_pairs],
            "trivial_relations": [r.value for r in self.trivial_relations],
            "zero_bound_relations": [r.value for r in self.zero_bound_relations],
        }


def _unique(ids) -> tuple[RelationId, ...]:
    return tuple(dict.fromkeys(ids))


def critical_report(observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None) -> CriticalReport:
    """Classify the critical configurations of an instance.

    An observable is flagged when ``phi`` is its eigenvector, detected by the
    deviation-vector norm rather than by spectrum membership. A pair is
    orthogonal when both deviations are positive but their overlap vanishes.
    """
    tol = tolerances.resolve(tol)
    jm = joint_moments(observables, state, tol)
    n = jm.n
    flags = tuple(jm.is_zero(i) for i in range(n))
    for j in range(n):
        if not flags[j]:
            continue
        for k in range(n):
            # |C_kj| <= D_k D_j by Cauchy-Schwarz, so it must vanish with D_j.
            bound = jm.deltas[k] * jm.zero_limits[j] + tol.rel * (1.0 + jm.scales[k])
            if k != j and abs(jm.cov[k, j]) > bound:
                raise SoundnessViolation(f"C({jm.names[k]}, {jm.names[j]}) = {jm.cov[k, j]} does not vanish at an eigenstate")
    orthogonal = tuple(
        (i, j)
        for i, j in combinations(range(n), 2)
        if not flags[i] and not flags[j] and abs(jm.cov[i, j]) <= tol.rel * jm.deltas[i] * jm.deltas[j]
    )
    result = evaluate_all(observables, state, tol)
    trivial, zero_bound = [], []
    for v in result:
        if v.relation in (RelationId.SUM_STD, RelationId.SUM_VAR):
            continue
        if abs(v.lhs) <= v.tol_abs and abs(v.rhs) <= v.tol_abs:
            trivial.append(v.relation)
        elif abs(v.rhs) <= v.tol_abs:
            zero_bound.append(v.relation)
    return CriticalReport(flags, orthogonal, _unique(trivial), _unique(zero_bound))


class SumReduction(NamedTuple):
    full: float
    reduced: float
    equal: bool


def _sum_delta(observables: Sequence[Observable], idx: Sequence[int], state: StateVector) -> float:
    total = sum(observables[i].matrix for i in idx)
    phi = state.amplitudes
    applied = total @ phi
    mean = complex(np.vdot(phi, applied)).real
    return float(np.linalg.norm(applied - mean * phi))


def _require_eigen(jm: JointMoments, j: int) -> None:
    if not 0 <= j < jm.n:
        raise IndexError(f"observable index {j} out of range for {jm.n} observables")
    if not jm.is_zero(j):
        raise NotEigenstate(f"state is not an eigenvector of {jm.names[j]!r} (deviation {jm.deltas[j]:.3e})")


def sum_reduction(observables: Sequence[Observable], state: StateVector, j: int, tol: Tolerances | None = None) -> SumReduction:
    """D(sum_i A_i) versus D(sum_{i != j} A_i) for an eigenstate of A_j (0-based ``j``)."""
    tol = tolerances.resolve(tol)
    jm = joint_moments(observables, state, tol)
    _require_eigen(jm, j)
    full = _sum_delta(observables, range(jm.n), state)
    rest = [i for i in range(jm.n) if i != j]
    reduced = _sum_delta(observables, rest, state)
    return SumReduction(full, reduced, abs(full - reduced) <= tol.rel * (1.0 + full))


def reduced_sum_relations(
    observables: Sequence[Observable], state: StateVector, j: int, tol: Tolerances | None = None
) -> list[RelationVerdict]:
    """Sum relations over the N - 1 observables left when phi is an eigenvector of A_j.

    Returns the standard-deviation form, the variance form keeping the
    original 1/N factor, and the variance form with 1/(N - 1) (informational).
    """
    tol = tolerances.resolve(tol)
    n = len(observables)
    if n < 3:
        raise ArityTooSmall(f"reduced sum relations need N >= 3, got {n}")
    jm = joint_moments(observables, state, tol)
    _require_eigen(jm, j)
    rest = tuple(i for i in range(n) if i != j)
    digest = inputs_digest(observables, state)
    d_sum = _sum_delta(observables, rest, state)
    std_lhs = float(sum(jm.deltas[i] for i in rest))
    var_lhs = float(sum(jm.deltas[i] ** 2 for i in rest))
    return [
        _verdict(RelationId.SUM_STD, std_lhs, d_sum, tol, digest, rest, note="reduced"),
        _verdict(RelationId.SUM_VAR, var_lhs, d_sum**2 / n, tol, digest, rest, note="reduced, 1/N"),
        _verdict(RelationId.SUM_VAR, var_lhs, d_sum**2 / (n - 1), tol, digest, rest, note="reduced, 1/(N-1), informational"),
    ]
