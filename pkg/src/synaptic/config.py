"""Numerical tolerances shared by every module.

All equality-like checks in the package compare against one set of
tolerances.  The active set lives in a :class:`contextvars.ContextVar`, so
overriding it inside :func:`tolerances` is local to the current thread or
task and never leaks into concurrent callers.
"""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from typing import Iterator


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances, scaled by ``max(1, norm)`` at the point of use.

    Attributes
    ----------
    herm : float
        Hermiticity, ``|a - a^*|``.
    proj : float
        Idempotency and positivity (smallest admissible eigenvalue is
        ``-proj``).
    comm : float
        Commutator norm below which two elements commute.
    eig : float
        Relative eigenvalue clustering width; eigenvalues closer than
        ``eig * max(1, |a|)`` are merged into one spectral breakpoint.
    """

    herm: float = 1e-9
    proj: float = 1e-9
    comm: float = 1e-9
    eig: float = 1e-8

    def __post_init__(self) -> None:
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not value > 0:
                raise ValueError(f"tolerance {field.name} must be positive, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()

_ACTIVE: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "synaptic_tolerances", default=DEFAULT_TOLERANCES
)


def get_tolerances() -> Tolerances:
    return _ACTIVE.get()


@contextlib.contextmanager
def tolerances(tol: Tolerances | None = None, **overrides: float) -> Iterator[Tolerances]:
    """Temporarily replace the active tolerances.

    >>> with tolerances(comm=1e-6):
    ...     get_tolerances().comm
    1e-06
    """
    base = tol if tol is not None else _ACTIVE.get()
    new = dataclasses.replace(base, **overrides)
    token = _ACTIVE.set(new)
    try:
        yield new
    finally:
        _ACTIVE.reset(token)
