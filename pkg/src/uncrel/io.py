"""Problem-file parsing and report serialization.

Complex numbers are two-element ``[re, im]`` arrays everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .core import Observable, StateVector, make_observable, make_state
from .correlations import build_correlation_matrix, classify_entanglement
from .diagnostics import critical_report
from .errors import NonHermitian, ParseError, UncrelError
from .moments import joint_moments
from .relations import RelationId, RelationVerdict, evaluate_all, inputs_digest
from .tolerances import Tolerances

__all__ = ["Problem", "parse_problem", "load_problem", "build_report", "dump_json", "verdicts_from_report", "TOL_KEYS"]

TOL_KEYS = {"rel", "herm", "norm", "renorm", "zero", "eig", "intel", "intel_res"}


@dataclass(frozen=True)
class Problem:
    observables: tuple[Observable, ...]
    state: StateVector
    tol: Tolerances


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _complex(value: Any, path: str) -> complex:
    if not isinstance(value, list) or len(value) != 2 or not all(_is_number(x) for x in value):
        raise ParseError(path, "expected a [re, im] pair of numbers")
    if not all(math.isfinite(x) for x in value):
        raise ParseError(path, "non-finite number")
    return complex(value[0], value[1])


def _row(value: Any, dim: int, path: str) -> list[complex]:
    if not isinstance(value, list):
        raise ParseError(path, "expected an array")
    if len(value) != dim:
        raise ParseError(path, f"expected {dim} entries, got {len(value)}")
    return [_complex(v, f"{path}[{k}]") for k, v in enumerate(value)]


def parse_problem(data: Any, base_tol: Tolerances | None = None) -> Problem:
    """Turn decoded JSON into observables and a state; errors name the offending path."""
    if not isinstance(data, dict):
        raise ParseError("", "problem file must be a JSON object")
    tol = base_tol or Tolerances()
    overrides = data.get("tol", {})
    if overrides:
        if not isinstance(overrides, dict):
            raise ParseError("tol", "expected an object")
        for key, value in overrides.items():
            if key not in TOL_KEYS:
                raise ParseError(f"tol.{key}", f"unknown tolerance; expected one of {sorted(TOL_KEYS)}")
            if not _is_number(value) or not value > 0:
                raise ParseError(f"tol.{key}", "expected a positive number")
        tol = tol.with_overrides(**overrides)

    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise ParseError("dim", "expected an integer >= 2")
    raw_obs = data.get("observables")
    if not isinstance(raw_obs, list) or not raw_obs:
        raise ParseError("observables", "expected a non-empty array")
    observables = []
    for n, entry in enumerate(raw_obs):
        path = f"observables[{n}]"
        if not isinstance(entry, dict):
            raise ParseError(path, "expected an object with name and matrix")
        name = entry.get("name", f"A{n + 1}")
        if not isinstance(name, str):
            raise ParseError(f"{path}.name", "expected a string")
        matrix = entry.get("matrix")
        if not isinstance(matrix, list):
            raise ParseError(f"{path}.matrix", "expected an array of rows")
        if len(matrix) != dim:
            raise ParseError(f"{path}.matrix", f"expected {dim} rows, got {len(matrix)}")
        rows = [_row(r, dim, f"{path}.matrix[{k}]") for k, r in enumerate(matrix)]
        try:
            observables.append(make_observable(name, rows, tol))
        except NonHermitian as exc:
            raise ParseError(f"{path}.matrix", f"not Hermitian (max |M - M^dagger| = {exc.max_asymmetry:.6g})") from exc
        except UncrelError as exc:
            raise ParseError(f"{path}.matrix", str(exc)) from exc
    amplitudes = _row(data.get("state"), dim, "state")
    try:
        state = make_state(amplitudes, tol)
    except UncrelError as exc:
        raise ParseError("state", str(exc)) from exc
    return Problem(tuple(observables), state, tol)


def load_problem(path: str | Path, base_tol: Tolerances | None = None) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError("", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("", f"invalid JSON: {exc}") from exc
    return parse_problem(data, base_tol)


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def build_report(
    observables: Sequence[Observable],
    state: StateVector,
    tol: Tolerances,
    relations: Iterable[RelationId | str] | None = None,
) -> dict:
    """Full evaluation report as plain JSON-ready data."""
    result = evaluate_all(observables, state, tol, relations)
    jm = joint_moments(observables, state, tol)
    n = len(observables)
    moments = [
        {"name": o.name, "mean": float(jm.means[i]), "stddev": float(jm.deltas[i]), "eigenstate": jm.is_zero(i)}
        for i, o in enumerate(observables)
    ]
    pairs = []
    for i, j in combinations(range(n), 2):
        c = complex(jm.cov[i, j])
        r = None if jm.is_zero(i) or jm.is_zero(j) else abs(c) / float(jm.deltas[i] * jm.deltas[j])
        pairs.append(
            {
                "pair": [i, j],
                "names": [observables[i].name, observables[j].name],
                "covariance": _pair(c),
                "re_part": c.real,
                "im_part": c.imag,
                "commutator_expectation": _pair(complex(jm.comm[i, j])),
                "pearson": r,
            }
        )
    if jm.zero_indices():
        corr = None
    else:
        corr = build_correlation_matrix(observables, state, tol).to_dict()
    ent = classify_entanglement(observables, state, tol).to_dict() if n in (2, 3) else None
    return {
        "tool": "uncrel",
        "version": __version__,
        "input_digest": inputs_digest(observables, state),
        "tolerances": {k: getattr(tol, k) for k in sorted(TOL_KEYS)},
        "all_hold": result.all_hold,
        "verdicts": [v.to_dict() for v in result.verdicts],
        "skipped": [s.to_dict() for s in result.skipped],
        "moments": moments,
        "pairs": pairs,
        "critical": critical_report(observables, state, tol).to_dict(),
        "correlation_matrix": corr,
        "entanglement": ent,
    }


def verdicts_from_report(report: dict) -> list[RelationVerdict]:
    return [RelationVerdict.from_dict(v) for v in report["verdicts"]]


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + "\n"
