"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`SynapticError`.  The CLI maps :class:`ValidationError` subclasses to
exit code 1 and :class:`RefusalError` subclasses (a mathematically meaningful
"no") to exit code 2.
"""
from __future__ import annotations

from typing import Any, Sequence


class SynapticError(Exception):
    pass


class ValidationError(SynapticError, ValueError):
    """Input does not satisfy the invariants of the requested type."""


class RefusalError(SynapticError):
    """The input is well formed but the requested construction does not exist."""


class DimensionMismatch(ValidationError):
    pass


class NotHermitian(ValidationError):
    def __init__(self, row: int, col: int, deviation: float):
        self.row, self.col, self.deviation = row, col, deviation
        super().__init__(
            f"matrix is not Hermitian: entry ({row}, {col}) differs from the "
            f"conjugate of ({col}, {row}) by {deviation:.3e}"
        )


class NotProjection(ValidationError):
    pass


class NotPositive(ValidationError):
    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"element is not positive: smallest eigenvalue {min_eigenvalue:.3e}")


class InvalidResolution(ValidationError):
    pass


class FunctionUndefined(ValidationError):
    def __init__(self, point: float):
        self.point = point
        super().__init__(f"function is undefined at eigenvalue {point!r}")


class InvalidObservable(ValidationError):
    pass


class UnknownOutcome(ValidationError, KeyError):
    def __init__(self, label: Any):
        self.label = label
        ValidationError.__init__(self, f"unknown outcome label {label!r}")

    def __str__(self) -> str:
        return self.args[0]


class NotSharp(ValidationError):
    pass


class OverlappingAtoms(ValidationError):
    def __init__(self, first: Any, second: Any, overlap: float):
        self.first, self.second, self.overlap = first, second, overlap
        super().__init__(
            f"atoms {first!r} and {second!r} are not orthogonal (|e_i e_j| = {overlap:.3e})"
        )


class InvalidState(ValidationError):
    pass


class KernelViolation(ValidationError):
    def __init__(self, row: int, condition: str, detail: str = ""):
        self.row, self.condition, self.detail = row, condition, detail
        msg = f"kernel row {row} violates condition {condition}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class IdealMismatch(ValidationError):
    def __init__(self, labels: Sequence[Any]):
        self.labels = list(labels)
        super().__init__(
            f"kernel declares outcomes {self.labels!r} null but the observable does not vanish there"
        )


class AxiomViolationError(ValidationError):
    def __init__(self, violations: Sequence[Any]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"effect algebra axioms fail: {lines}{more}")


class MeetUndefined(SynapticError):
    def __init__(self, a: int, b: int):
        self.a, self.b = a, b
        super().__init__(f"elements {a} and {b} have no greatest lower bound")


class NonCommuting(RefusalError):
    """A family that was required to commute does not.

    ``pair`` names the first offending pair and ``norm`` is the norm of its
    commutator.
    """

    def __init__(self, pair: tuple[Any, Any], norm: float, what: str = "elements"):
        self.pair, self.norm = pair, norm
        super().__init__(
            f"{what} {pair[0]!r} and {pair[1]!r} do not commute (|[a, b]| = {norm:.3e})"
        )


class NonCommutingInput(NonCommuting):
    pass


class NonCommutingRanges(NonCommuting):
    pass


class NonCommutingRange(NonCommuting):
    pass


class CertificationError(SynapticError):
    """A constructed object failed its own post-hoc certificate.  Indicates a bug."""
