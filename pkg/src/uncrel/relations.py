"""Catalog of product, Buzano, Lupu-Schwarz, sum and Pearson-form uncertainty
relations, and an evaluator returning auditable lhs/rhs/slack verdicts.

Every relation is written ``lhs >= rhs``. Product and Pearson relations are
built from :func:`uncrel.moments.joint_moments`; the sum relations take the
standard deviation of the summed operator directly from its matrix.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import tolerances
from .core import Observable, StateVector
from .errors import ArityMismatch, DimMismatch, NotIntelligent, ZeroDeviation
from .moments import JointMoments, joint_moments
from .tolerances import Tolerances

__all__ = [
    "RelationId",
    "RelationSpec",
    "RelationVerdict",
    "SkipRecord",
    "CatalogResult",
    "CATALOG",
    "LUPU_HR_FACTOR",
    "evaluate",
    "evaluate_all",
    "pearson_sides",
    "lu3b_constraint",
    "b3a_bound",
    "inputs_digest",
]


class RelationId(str, Enum):
    RS_PAIR = "RS_PAIR"
    HR_PAIR = "HR_PAIR"
    RS_TRIPLE = "RS_TRIPLE"
    HR_TRIPLE = "HR_TRIPLE"
    RS_QUAD = "RS_QUAD"
    HR_QUAD = "HR_QUAD"
    RS_PRODUCT_N = "RS_PRODUCT_N"
    BUZANO_STRONG = "BUZANO_STRONG"
    BUZANO_WEAK = "BUZANO_WEAK"
    BUZANO_HR = "BUZANO_HR"
    LUPU_STRONG = "LUPU_STRONG"
    LUPU_WEAK = "LUPU_WEAK"
    LUPU_HR = "LUPU_HR"
    SUM_STD = "SUM_STD"
    SUM_VAR = "SUM_VAR"
    PEARSON_PAIR = "PEARSON_PAIR"
    PEARSON_TRIPLE = "PEARSON_TRIPLE"
    PEARSON_QUAD = "PEARSON_QUAD"
    PEARSON_BUZANO_STRONG = "PEARSON_BUZANO_STRONG"
    PEARSON_BUZANO_WEAK = "PEARSON_BUZANO_WEAK"
    PEARSON_LUPU = "PEARSON_LUPU"

    def __str__(self) -> str:
        return self.value


# |C|^2 >= (Im C)^2 = |<[A,B]>|^2 / 4 applied to the weak Lupu-Schwarz form
# gives 1/3 * 1/4. The larger factor 1/6 is violated by the Pauli triple in
# the state with Bloch vector (1, 1, 1)/sqrt(3).
LUPU_HR_FACTOR = 1.0 / 12.0


@dataclass(frozen=True)
class RelationVerdict:
    relation: RelationId
    lhs: float
    rhs: float
    slack: float
    holds: bool
    tol_abs: float
    inputs_digest: str
    indices: tuple[int, ...] = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "tol_abs": self.tol_abs,
            "inputs_digest": self.inputs_digest,
            "indices": list(self.indices),
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RelationVerdict":
        return cls(
            relation=RelationId(data["relation"]),
            lhs=data["lhs"],
            rhs=data["rhs"],
            slack=data["slack"],
            holds=data["holds"],
            tol_abs=data["tol_abs"],
            inputs_digest=data["inputs_digest"],
            indices=tuple(data.get("indices", ())),
            note=data.get("note", ""),
        )


@dataclass(frozen=True)
class SkipRecord:
    relation: RelationId
    indices: tuple[int, ...]
    reason: str

    def to_dict(self) -> dict:
        return {"relation": self.relation.value, "indices": list(self.indices), "reason": self.reason}


@dataclass
class CatalogResult:
    verdicts: list[RelationVerdict] = field(default_factory=list)
    skipped: list[SkipRecord] = field(default_factory=list)

    def __iter__(self) -> Iterator[RelationVerdict]:
        return iter(self.verdicts)

    def __len__(self) -> int:
        return len(self.verdicts)

    @property
    def violations(self) -> list[RelationVerdict]:
        return [v for v in self.verdicts if not v.holds]

    @property
    def all_hold(self) -> bool:
        return not self.violations

    def by_relation(self, relation: RelationId) -> list[RelationVerdict]:
        return [v for v in self.verdicts if v.relation == relation]


class _Context:
    """Moments of one (observables, state) instance, shared by all relations."""

    def __init__(self, observables: Sequence[Observable], state: StateVector, tol: Tolerances):
        self.observables = observables
        self.state = state
        self.tol = tol
        self.jm: JointMoments = joint_moments(observables, state, tol)
        self.digest = inputs_digest(observables, state)
        self._sum_deltas: dict[tuple[int, ...], float] = {}

    def d(self, i: int) -> float:
        return float(self.jm.deltas[i])

    def c(self, i: int, j: int) -> float:
        return float(abs(self.jm.cov[i, j]))

    def k(self, i: int, j: int) -> float:
        return float(abs(self.jm.comm[i, j]))

    def r(self, i: int, j: int) -> float:
        return self.c(i, j) / (self.d(i) * self.d(j))

    def sum_delta(self, idx: tuple[int, ...]) -> float:
        if idx not in self._sum_deltas:
            total = sum(self.observables[i].matrix for i in idx)
            phi = self.state.amplitudes
            applied = total @ phi
            mean = complex(np.vdot(phi, applied)).real
            self._sum_deltas[idx] = float(np.linalg.norm(applied - mean * phi))
        return self._sum_deltas[idx]


Formula = Callable[[_Context, tuple], tuple]


def _pairs(idx):
    return list(combinations(idx, 2))


def _rs_pair(c: _Context, idx):
    i, j = idx
    return c.d(i) * c.d(j), c.c(i, j)


def _hr_pair(c: _Context, idx):
    i, j = idx
    return c.d(i) * c.d(j), 0.5 * c.k(i, j)


def _rs_triple(c: _Context, idx):
    i, j, k = idx
    return (c.d(i) * c.d(j) * c.d(k)) ** 2, c.c(i, j) * c.c(j, k) * c.c(i, k)


def _hr_triple(c: _Context, idx):
    i, j, k = idx
    return (c.d(i) * c.d(j) * c.d(k)) ** 2, c.k(i, j) * c.k(j, k) * c.k(i, k) / 8.0


def _rs_quad(c: _Context, idx):
    lhs = float(np.prod([c.d(i) ** 3 for i in idx]))
    return lhs, float(np.prod([c.c(i, j) for i, j in _pairs(idx)]))


def _hr_quad(c: _Context, idx):
    lhs = float(np.prod([c.d(i) ** 3 for i in idx]))
    return lhs, float(np.prod([c.k(i, j) for i, j in _pairs(idx)])) / 16.0


def _rs_product_n(c: _Context, idx):
    n = len(idx)
    lhs = float(np.prod([c.d(i) ** (n - 1) for i in idx]))
    return lhs, float(np.prod([c.c(i, j) for i, j in _pairs(idx)]))


def _buzano_strong(c: _Context, idx):
    a, b, m = idx
    return (c.d(a) * c.d(b) + c.c(a, b)) * c.d(m) ** 2, 2.0 * c.c(a, m) * c.c(m, b)


def _buzano_weak(c: _Context, idx):
    a, b, m = idx
    return c.d(a) * c.d(b) * c.d(m) ** 2, c.c(a, m) * c.c(m, b)


def _buzano_hr(c: _Context, idx):
    a, b, m = idx
    return c.d(a) * c.d(b) * c.d(m) ** 2, 0.25 * c.k(a, m) * c.k(m, b)


def _lupu_terms(c: _Context, idx, second):
    i, j, k = idx
    di2, dj2, dk2 = c.d(i) ** 2, c.d(j) ** 2, c.d(k) ** 2
    return (di2 * dj2 * dk2, di2 * second(j, k) ** 2 + dj2 * second(k, i) ** 2 + dk2 * second(i, j) ** 2)


def _lupu_strong(c: _Context, idx):
    i, j, k = idx
    lhs, s = _lupu_terms(c, idx, c.c)
    return lhs, s - 2.0 * c.c(i, j) * c.c(j, k) * c.c(i, k)


def _lupu_weak(c: _Context, idx):
    lhs, s = _lupu_terms(c, idx, c.c)
    return lhs, s / 3.0


def _lupu_hr(c: _Context, idx):
    lhs, s = _lupu_terms(c, idx, c.k)
    return lhs, LUPU_HR_FACTOR * s


def _sum_std(c: _Context, idx):
    return sum(c.d(i) for i in idx), c.sum_delta(tuple(idx))


def _sum_var(c: _Context, idx):
    return sum(c.d(i) ** 2 for i in idx), c.sum_delta(tuple(idx)) ** 2 / len(idx)


# Pearson forms are defined on a matrix of coefficients so that synthetic
# (not state-induced) inputs can be evaluated with the same code.


def _p_pair(r, idx):
    i, j = idx
    return 1.0, r[i, j]


def _p_triple(r, idx):
    i, j, k = idx
    return 1.0, r[i, j] * r[j, k] * r[i, k]


def _p_quad(r, idx):
    return 1.0, float(np.prod([r[i, j] for i, j in _pairs(idx)]))


def _p_buzano_strong(r, idx):
    a, b, m = idx
    return 1.0 + r[a, b], 2.0 * r[a, m] * r[b, m]


def _p_buzano_weak(r, idx):
    a, b, m = idx
    return 1.0, r[a, m] * r[b, m]


def _p_lupu(r, idx):
    i, j, k = idx
    return 1.0 + 2.0 * r[i, j] * r[i, k] * r[j, k], r[i, j] ** 2 + r[i, k] ** 2 + r[j, k] ** 2


@dataclass(frozen=True)
class RelationSpec:
    id: RelationId
    arity: int | None  # None: any N >= 2
    formula: str
    evaluate: Callable
    pearson: bool = False
    middle: bool = False  # third observable plays a distinguished role


CATALOG: dict[RelationId, RelationSpec] = {
    s.id: s
    for s in [
        RelationSpec(RelationId.RS_PAIR, 2, "D1 D2 >= |C12|", _rs_pair),
        RelationSpec(RelationId.HR_PAIR, 2, "D1 D2 >= |<[A1,A2]>|/2", _hr_pair),
        RelationSpec(RelationId.RS_TRIPLE, 3, "(D1 D2 D3)^2 >= |C12||C23||C13|", _rs_triple),
        RelationSpec(RelationId.HR_TRIPLE, 3, "(D1 D2 D3)^2 >= prod |<[Ai,Aj]>| / 8", _hr_triple),
        RelationSpec(RelationId.RS_QUAD, 4, "prod Di^3 >= prod_{i<j} |Cij|", _rs_quad),
        RelationSpec(RelationId.HR_QUAD, 4, "prod Di^3 >= prod_{i<j} |<[Ai,Aj]>| / 16", _hr_quad),
        RelationSpec(RelationId.RS_PRODUCT_N, None, "prod Di^(N-1) >= prod_{i<j} |Cij|", _rs_product_n),
        RelationSpec(
            RelationId.BUZANO_STRONG, 3, "(D1 D2 + |C12|) D3^2 >= 2 |C13 C32|", _buzano_strong, middle=True
        ),
        RelationSpec(RelationId.BUZANO_WEAK, 3, "D1 D2 D3^2 >= |C13 C32|", _buzano_weak, middle=True),
        RelationSpec(
            RelationId.BUZANO_HR, 3, "D1 D2 D3^2 >= |<[A1,A3]>||<[A3,A2]>| / 4", _buzano_hr, middle=True
        ),
        RelationSpec(
            RelationId.LUPU_STRONG,
            3,
            "D1^2 D2^2 D3^2 >= D1^2|C23|^2 + D2^2|C31|^2 + D3^2|C12|^2 - 2|C12 C23 C13|",
            _lupu_strong,
        ),
        RelationSpec(
            RelationId.LUPU_WEAK, 3, "D1^2 D2^2 D3^2 >= (D1^2|C23|^2 + D2^2|C31|^2 + D3^2|C12|^2) / 3", _lupu_weak
        ),
        RelationSpec(
            RelationId.LUPU_HR,
            3,
            "D1^2 D2^2 D3^2 >= (D1^2|<[A2,A3]>|^2 + D2^2|<[A1,A3]>|^2 + D3^2|<[A1,A2]>|^2) / 12",
            _lupu_hr,
        ),
        RelationSpec(RelationId.SUM_STD, None, "sum Di >= D(sum Ai)", _sum_std),
        RelationSpec(RelationId.SUM_VAR, None, "sum Di^2 >= D(sum Ai)^2 / N", _sum_var),
        RelationSpec(RelationId.PEARSON_PAIR, 2, "1 >= r12", _p_pair, pearson=True),
        RelationSpec(RelationId.PEARSON_TRIPLE, 3, "1 >= r12 r23 r13", _p_triple, pearson=True),
        RelationSpec(RelationId.PEARSON_QUAD, 4, "1 >= prod_{i<j} rij", _p_quad, pearson=True),
        RelationSpec(
            RelationId.PEARSON_BUZANO_STRONG, 3, "1 + r12 >= 2 r13 r23", _p_buzano_strong, pearson=True, middle=True
        ),
        RelationSpec(RelationId.PEARSON_BUZANO_WEAK, 3, "1 >= r13 r23", _p_buzano_weak, pearson=True, middle=True),
        RelationSpec(
            RelationId.PEARSON_LUPU, 3, "1 + 2 r12 r13 r23 >= r12^2 + r13^2 + r23^2", _p_lupu, pearson=True
        ),
    ]
}


def inputs_digest(observables: Sequence[Observable], state: StateVector) -> str:
    h = hashlib.sha256()
    for obs in observables:
        h.update(obs.name.encode())
        h.update(np.ascontiguousarray(obs.matrix).tobytes())
    h.update(np.ascontiguousarray(state.amplitudes).tobytes())
    return h.hexdigest()[:16]


def _verdict(relation: RelationId, lhs: float, rhs: float, ctx_tol: Tolerances, digest: str, idx, note="") -> RelationVerdict:
    lhs, rhs = float(lhs), float(rhs)
    tol_abs = ctx_tol.verdict(lhs, rhs)
    slack = lhs - rhs
    return RelationVerdict(relation, lhs, rhs, slack, bool(slack >= -tol_abs), tol_abs, digest, tuple(int(i) for i in idx), note)


def _run(spec: RelationSpec, ctx: _Context, idx: tuple[int, ...]) -> RelationVerdict:
    if spec.pearson:
        for i in idx:
            if ctx.jm.is_zero(i):
                raise ZeroDeviation(ctx.jm.names[i], ctx.d(i))
        # entries for other (possibly zero-deviation) observables are never read
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.abs(ctx.jm.cov) / np.outer(ctx.jm.deltas, ctx.jm.deltas)
        lhs, rhs = spec.evaluate(r, idx)
    else:
        lhs, rhs = spec.evaluate(ctx, idx)
    return _verdict(spec.id, lhs, rhs, ctx.tol, ctx.digest, idx)


def _check_instance(observables: Sequence[Observable], state: StateVector) -> None:
    for obs in observables:
        if obs.dim != state.dim:
            raise DimMismatch(f"observable {obs.name!r} has dim {obs.dim}, state has dim {state.dim}")


def evaluate(
    relation: RelationId | str,
    observables: Sequence[Observable],
    state: StateVector,
    tol: Tolerances | None = None,
) -> RelationVerdict:
    """Evaluate one catalog relation on the observables in the given order.

    For relations with a distinguished observable (Buzano forms) the last
    one plays the middle role.
    """
    tol = tolerances.resolve(tol)
    spec = CATALOG[RelationId(relation)]
    n = len(observables)
    if spec.arity is None:
        if n < 2:
            raise ArityMismatch(f"{spec.id} needs at least 2 observables, got {n}")
    elif n != spec.arity:
        raise ArityMismatch(f"{spec.id} needs exactly {spec.arity} observables, got {n}")
    _check_instance(observables, state)
    return _run(spec, _Context(observables, state, tol), tuple(range(n)))


def _placements(spec: RelationSpec, n: int) -> list[tuple[int, ...]]:
    if spec.arity is None:
        return [tuple(range(n))]
    if spec.arity > n:
        return []
    out = []
    for combo in combinations(range(n), spec.arity):
        if spec.middle:
            i, j, k = combo
            out.extend([(i, j, k), (j, k, i), (k, i, j)])
        else:
            out.append(combo)
    return out


def evaluate_all(
    observables: Sequence[Observable],
    state: StateVector,
    tol: Tolerances | None = None,
    relations: Iterable[RelationId | str] | None = None,
) -> CatalogResult:
    """Evaluate every applicable relation.

    Fixed-arity relations run on every index subset of their arity (each
    choice of distinguished observable for Buzano forms); N-forms run on the
    full list. Pearson forms are skipped when a deviation vanishes.
    """
    tol = tolerances.resolve(tol)
    _check_instance(observables, state)
    wanted = None if relations is None else {RelationId(r) for r in relations}
    ctx = _Context(observables, state, tol)
    result = CatalogResult()
    for spec in CATALOG.values():
        if wanted is not None and spec.id not in wanted:
            continue
        for idx in _placements(spec, len(observables)):
            if spec.pearson:
                zeros = [ctx.jm.names[i] for i in idx if ctx.jm.is_zero(i)]
                if zeros:
                    result.skipped.append(SkipRecord(spec.id, idx, f"zero deviation: {', '.join(zeros)}"))
                    continue
            result.verdicts.append(_run(spec, ctx, idx))
    return result


def pearson_sides(relation: RelationId | str, r: np.ndarray | Sequence[Sequence[float]]) -> tuple[float, float]:
    """(lhs, rhs) of a Pearson-form relation on a supplied coefficient matrix."""
    spec = CATALOG[RelationId(relation)]
    if not spec.pearson:
        raise ValueError(f"{spec.id} is not a Pearson-form relation")
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    if spec.arity != n:
        raise ArityMismatch(f"{spec.id} needs a {spec.arity}x{spec.arity} matrix, got {n}x{n}")
    lhs, rhs = spec.evaluate(r, tuple(range(n)))
    return float(lhs), float(rhs)


class Lu3bResult(NamedTuple):
    lhs: float
    rhs: float
    satisfied: bool


def _intelligent_triple(observables: Sequence[Observable], state: StateVector, tol: Tolerances) -> _Context:
    if len(observables) != 3:
        raise ArityMismatch(f"expected 3 observables, got {len(observables)}")
    _check_instance(observables, state)
    ctx = _Context(observables, state, tol)
    for i in (0, 1):
        if ctx.jm.is_zero(i):
            raise ZeroDeviation(ctx.jm.names[i], ctx.d(i))
    r12 = ctx.r(0, 1)
    if abs(r12 - 1.0) > tol.intel:
        raise NotIntelligent(f"r({ctx.jm.names[0]}, {ctx.jm.names[1]}) = {r12:.12g} is not 1 within {tol.intel:g}")
    return ctx


def lu3b_constraint(observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None) -> Lu3bResult:
    """D1 |C23| == D2 |C13| for a state intelligent for the first pair."""
    tol = tolerances.resolve(tol)
    ctx = _intelligent_triple(observables, state, tol)
    if ctx.jm.is_zero(2):
        raise ZeroDeviation(ctx.jm.names[2], ctx.d(2))
    lhs = ctx.d(0) * ctx.c(1, 2)
    rhs = ctx.d(1) * ctx.c(0, 2)
    return Lu3bResult(lhs, rhs, abs(lhs - rhs) <= tol.rel * (1.0 + lhs + rhs))


def b3a_bound(observables: Sequence[Observable], state: StateVector, tol: Tolerances | None = None) -> RelationVerdict:
    """Lower bound on the third variance for a state intelligent for the first pair:
    D3^2 |C12| >= |C13 C32|."""
    tol = tolerances.resolve(tol)
    ctx = _intelligent_triple(observables, state, tol)
    lhs = ctx.d(2) ** 2 * ctx.c(0, 1)
    rhs = ctx.c(0, 2) * ctx.c(2, 1)
    return _verdict(RelationId.BUZANO_STRONG, lhs, rhs, tol, ctx.digest, (0, 1, 2), note="conditioned on r12 = 1")
