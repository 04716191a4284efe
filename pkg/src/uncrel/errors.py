"""Exception hierarchy shared by every uncrel module."""

from __future__ import annotations

__all__ = [
    "UncrelError",
    "NonSquare",
    "NonFinite",
    "NonHermitian",
    "NotNormalized",
    "DimMismatch",
    "ConvergenceFailure",
    "DefectiveMatrix",
    "NonRealExpectation",
    "ZeroDeviation",
    "ArityMismatch",
    "ArityTooSmall",
    "NotIntelligent",
    "NotEigenstate",
    "OutOfRange",
    "EmptyGrid",
    "SoundnessViolation",
    "ParseError",
]


class UncrelError(Exception):
    """Base class for all errors raised by uncrel."""


class NonSquare(UncrelError):
    pass


class NonFinite(UncrelError):
    pass


class NonHermitian(UncrelError):
    """Matrix fails the Hermiticity gate; ``max_asymmetry`` is max |M - M^dagger|."""

    def __init__(self, max_asymmetry: float, tolerance: float, name: str = ""):
        self.max_asymmetry = float(max_asymmetry)
        self.tolerance = float(tolerance)
        self.name = name
        label = f"observable {name!r}" if name else "matrix"
        super().__init__(
            f"{label} is not Hermitian: max |M - M^dagger| = {self.max_asymmetry:.3e} "
            f"exceeds {self.tolerance:.3e}"
        )


class NotNormalized(UncrelError):
    pass


class DimMismatch(UncrelError):
    pass


class ConvergenceFailure(UncrelError):
    pass


class DefectiveMatrix(UserWarning):
    """Informational: fewer independent eigenvectors than the matrix dimension."""


class NonRealExpectation(UncrelError):
    pass


class ZeroDeviation(UncrelError):
    """A standard deviation vanished where a positive one is required."""

    def __init__(self, which: str, value: float):
        self.which = which
        self.value = float(value)
        super().__init__(f"standard deviation of {which} is ~0 ({self.value:.3e}); Pearson coefficient undefined")


class ArityMismatch(UncrelError):
    pass


class ArityTooSmall(UncrelError):
    pass


class NotIntelligent(UncrelError):
    pass


class NotEigenstate(UncrelError):
    pass


class OutOfRange(UncrelError):
    pass


class EmptyGrid(UncrelError):
    pass


class SoundnessViolation(UncrelError):
    """A property that must hold for every genuine instance failed."""


class ParseError(UncrelError):
    """Problem file could not be turned into observables and a state.

    ``path`` names the offending location, e.g. ``observables[0].matrix[0]``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
