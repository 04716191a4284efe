"""Numerical tolerances used across the package.

Every scale-aware tolerance is an absolute floor plus a term proportional to
the max-entry magnitude of the operator involved.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-9
    herm: float = 1e-10
    norm: float = 1e-9
    renorm: float = 1e-6
    zero: float = 1e-12
    eig: float = 1e-10
    intel: float = 1e-6
    intel_res: float = 1e-8

    @property
    def thm(self) -> float:
        # r13 == r23 at r12 = 1 compounds two near-unity classifications
        return max(1e-6, 10.0 * self.intel)

    def herm_for(self, scale: float) -> float:
        return self.herm * (1.0 + scale)

    def zero_for(self, scale: float) -> float:
        return self.zero * (1.0 + scale)

    def verdict(self, lhs: float, rhs: float) -> float:
        return self.rel * (1.0 + abs(lhs) + abs(rhs))

    def with_overrides(self, **kwargs: float | None) -> "Tolerances":
        return replace(self, **{k: float(v) for k, v in kwargs.items() if v is not None})


DEFAULT = Tolerances()
_current = DEFAULT


def get_default() -> Tolerances:
    return _current


def set_default(tol: Tolerances) -> None:
    """Replace the process-wide default used when ``tol=None`` is passed."""
    global _current
    _current = tol


def resolve(tol: Tolerances | None) -> Tolerances:
    return _current if tol is None else tol
