"""Seeded random states and observables, and Monte-Carlo soundness surveys.

Randomness comes from :class:`numpy.random.Generator` with the PCG64 bit
generator. A survey splits its samples into fixed blocks; block ``b`` draws
from ``SeedSequence(seed, spawn_key=(b,))`` so the output does not depend on
how many workers process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import Observable, StateVector, make_observable
from .correlations import determinant, r3_closed_form
from .moments import joint_moments
from .relations import CATALOG, RelationId, evaluate_all
from .tolerances import Tolerances

__all__ = [
    "ObservableKind",
    "EnsembleSpec",
    "RelationStats",
    "SurveyStatistics",
    "make_rng",
    "random_state",
    "random_hermitian",
    "random_complex_vectors",
    "pauli_matrices",
    "survey",
    "HISTOGRAM_EDGES",
]

BLOCK_SIZE = 256
HISTOGRAM_EDGES = np.logspace(-15, 2, 51)

# Checks beyond the relation catalog, tallied alongside it.
REALIZABILITY = "REALIZABILITY"
DET_CLOSED_FORM = "DET_CLOSED_FORM"
QUBIT_SATURATION = "QUBIT_SATURATION"
THEOREM1 = "THEOREM1"


class ObservableKind(str, Enum):
    GAUSSIAN_HERMITIAN = "gaussian_hermitian"
    PAULI_FIXED = "pauli_fixed"
    USER_SUPPLIED = "user_supplied"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state: normalized vector of standard complex Gaussians."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector._trusted(v / np.linalg.norm(v))


def random_hermitian(dim: int, rng: np.random.Generator, name: str = "H") -> Observable:
    """GUE-style draw H = (G + G^dagger)/2 with standard complex Gaussian G."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return make_observable(name, 0.5 * (g + g.conj().T))


def random_complex_vectors(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """n unnormalized standard complex Gaussian vectors, shape (n, dim)."""
    return rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))


def pauli_matrices() -> list[Observable]:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return [make_observable(n, m) for n, m in (("sigma_x", sx), ("sigma_y", sy), ("sigma_z", sz))]


@dataclass(frozen=True)
class EnsembleSpec:
    dim: int
    n_observables: int
    n_samples: int
    seed: int
    observable_kind: ObservableKind = ObservableKind.GAUSSIAN_HERMITIAN
    observables: tuple[Observable, ...] = ()
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        object.__setattr__(self, "observable_kind", ObservableKind(self.observable_kind))
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.n_observables < 2:
            raise ValueError("n_observables must be at least 2")
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.observable_kind is ObservableKind.PAULI_FIXED and (self.dim != 2 or self.n_observables > 3):
            raise ValueError("pauli_fixed needs dim 2 and at most 3 observables")
        if self.observable_kind is ObservableKind.USER_SUPPLIED:
            if len(self.observables) != self.n_observables:
                raise ValueError("user_supplied needs exactly n_observables observables")
            if any(o.dim != self.dim for o in self.observables):
                raise ValueError("user-supplied observables must match dim")


@dataclass
class RelationStats:
    count_evaluated: int = 0
    count_holds: int = 0
    count_skipped: int = 0
    min_slack: float = math.inf
    histogram: list[int] = field(default_factory=lambda: [0] * (len(HISTOGRAM_EDGES) + 1))

    def add(self, slack: float, holds: bool) -> None:
        self.count_evaluated += 1
        self.count_holds += int(holds)
        self.min_slack = min(self.min_slack, slack)
        # bin 0: slack < 1e-15 (incl. non-positive); last bin: slack >= 1e2
        self.histogram[int(np.searchsorted(HISTOGRAM_EDGES, slack, side="right"))] += 1

    def merge(self, other: "RelationStats") -> None:
        self.count_evaluated += other.count_evaluated
        self.count_holds += other.count_holds
        self.count_skipped += other.count_skipped
        self.min_slack = min(self.min_slack, other.min_slack)
        self.histogram = [a + b for a, b in zip(self.histogram, other.histogram)]

    def to_dict(self) -> dict:
        return {
            "count_evaluated": self.count_evaluated,
            "count_holds": self.count_holds,
            "count_skipped": self.count_skipped,
            "min_slack": None if math.isinf(self.min_slack) else self.min_slack,
            "slack_histogram": self.histogram,
        }


@dataclass
class SurveyStatistics:
    spec: EnsembleSpec
    relations: dict[str, RelationStats] = field(default_factory=dict)
    violations: list[tuple[int, str]] = field(default_factory=list)

    def stats(self, name: str | RelationId) -> RelationStats:
        key = str(name)
        if key not in self.relations:
            self.relations[key] = RelationStats()
        return self.relations[key]

    def record(self, sample: int, name: str | RelationId, slack: float, holds: bool) -> None:
        self.stats(name).add(slack, holds)
        if not holds:
            self.violations.append((sample, str(name)))

    def merge(self, other: "SurveyStatistics") -> None:
        for key, st in other.relations.items():
            self.stats(key).merge(st)
        self.violations.extend(other.violations)

    def to_dict(self) -> dict:
        s = self.spec
        return {
            "spec": {
                "dim": s.dim,
                "n_observables": s.n_observables,
                "n_samples": s.n_samples,
                "seed": s.seed,
                "observable_kind": s.observable_kind.value,
                "tol_rel": s.tol.rel,
                "generator": "PCG64",
                "block_size": BLOCK_SIZE,
            },
            "histogram_edges": [float(e) for e in HISTOGRAM_EDGES],
            "relations": {k: self.relations[k].to_dict() for k in sorted(self.relations)},
            "violations": [{"sample": i, "relation": r} for i, r in sorted(self.violations)],
        }


def _draw_observables(spec: EnsembleSpec, rng: np.random.Generator) -> Sequence[Observable]:
    if spec.observable_kind is ObservableKind.GAUSSIAN_HERMITIAN:
        return [random_hermitian(spec.dim, rng, f"A{i + 1}") for i in range(spec.n_observables)]
    if spec.observable_kind is ObservableKind.PAULI_FIXED:
        return pauli_matrices()[: spec.n_observables]
    return spec.observables


def _sample(spec: EnsembleSpec, index: int, rng: np.random.Generator, out: SurveyStatistics) -> None:
    tol = spec.tol
    observables = _draw_observables(spec, rng)
    state = random_state(spec.dim, rng)
    result = evaluate_all(observables, state, tol)
    for v in result.verdicts:
        out.record(index, v.relation, v.slack, v.holds)
    for s in result.skipped:
        out.stats(s.relation).count_skipped += 1

    jm = joint_moments(observables, state, tol)
    if jm.zero_indices():
        out.stats(REALIZABILITY).count_skipped += 1
        return
    r = jm.pearson_matrix()
    # |C| keeps positive semidefiniteness only up to 3x3, so larger sets are
    # checked through their 3x3 principal minors
    for idx in [tuple(range(jm.n))] if jm.n <= 3 else combinations(range(jm.n), 3):
        sub = r[np.ix_(idx, idx)]
        det = determinant(sub)
        out.record(index, REALIZABILITY, det, det >= -tol.rel)
        if len(idx) == 3:
            closed = r3_closed_form(sub[0, 1], sub[0, 2], sub[1, 2], tol)
            gap = abs(closed - det)
            out.record(index, DET_CLOSED_FORM, tol.rel - gap, gap <= tol.rel)
    if spec.dim == 2:
        for i in range(jm.n):
            for j in range(i + 1, jm.n):
                gap = abs(r[i, j] - 1.0)
                out.record(index, QUBIT_SATURATION, tol.intel - gap, gap <= tol.intel)
                c = abs(jm.cov[i, j])
                out.record(index, THEOREM1, c, c > tol.zero_for(max(jm.scales[i], jm.scales[j])))


def _run_block(spec: EnsembleSpec, block: int) -> SurveyStatistics:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(block,))))
    out = SurveyStatistics(spec)
    start = block * BLOCK_SIZE
    for index in range(start, min(start + BLOCK_SIZE, spec.n_samples)):
        _sample(spec, index, rng, out)
    return out


def survey(spec: EnsembleSpec, workers: int = 1) -> SurveyStatistics:
    """Monte-Carlo sweep of the relation catalog plus correlation-matrix checks.

    Violations are returned as data; the survey never raises on them.
    """
    n_blocks = math.ceil(spec.n_samples / BLOCK_SIZE)
    total = SurveyStatistics(spec)
    for rid in CATALOG:
        total.stats(rid)
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, [spec] * n_blocks, range(n_blocks)))
    else:
        parts = [_run_block(spec, b) for b in range(n_blocks)]
    for part in parts:
        total.merge(part)
    return total
