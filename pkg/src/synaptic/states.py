"""Density-matrix states on the matrix algebra.

A state is ``s(a) = tr(W a)`` for a density matrix ``W``.  In finite
dimension every state has this form and is automatically normal, so the
states of the order-unit space, of its effect interval and the
sigma-additive states all coincide.

:func:`spanning_states` returns a fixed finite family whose values
determine a Hermitian matrix completely.  It is what the rest of the package
uses wherever a statement quantifies over "all states".
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .config import get_tolerances
from .errors import DimensionMismatch, InvalidState
from .matrix_core import HermitianElement, as_element, order_unit_norm


class DensityState:
    """A positive trace-one matrix ``W`` acting by ``a -> tr(W a)``."""

    def __init__(self, W, *, check: bool = True):
        w = W if isinstance(W, HermitianElement) else HermitianElement(W)
        if check:
            tol = get_tolerances().proj
            if abs(w.trace() - 1) > tol * w.dim:
                raise InvalidState(f"trace is {w.trace():.12g}, expected 1")
            if w.eigenvalues[0] < -tol:
                raise InvalidState(f"not positive: smallest eigenvalue {w.eigenvalues[0]:.3e}")
        self.W = w

    @classmethod
    def pure(cls, vector) -> "DensityState":
        v = np.asarray(vector, dtype=complex).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise InvalidState("zero vector does not define a state")
        v = v / nrm
        return cls(HermitianElement(np.outer(v, v.conj()), check=False), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityState":
        return cls(HermitianElement(np.eye(dim) / dim, check=False), check=False)

    @property
    def dim(self) -> int:
        return self.W.dim

    def __call__(self, a) -> float:
        return apply(self, a)

    def __repr__(self) -> str:
        return f"DensityState(dim={self.dim})"


def apply(s: DensityState, a) -> float:
    """``s(a) = tr(W a)``."""
    a = as_element(a)
    if a.dim != s.dim:
        raise DimensionMismatch(f"state has dimension {s.dim}, element {a.dim}")
    # tr(W a) = sum_ij W_ij a_ji
    return float(np.real(np.sum(s.W.matrix * a.matrix.T)))


def distribution(s: DensityState, xi) -> np.ndarray:
    """Outcome probabilities ``(s(xi({x})))_x`` in the order of ``xi.outcomes``."""
    return np.array([apply(s, e) for e in xi.atoms])


def expectation(s: DensityState, xi) -> float:
    """``sum_t t * s(xi({t}))`` for a real observable."""
    p = distribution(s, xi)
    return float(np.dot(np.asarray(xi.outcomes, dtype=float), p))


def spanning_states(dim: int) -> list[DensityState]:
    """``|i><i|``, and the normalised ``|i> +- |j>``, ``|i> +- i|j>`` for ``i < j``.

    The ``2 n^2 - n`` values ``tr(W a)`` over this family determine every
    Hermitian ``a``; a linear identity that holds on all of them holds for
    all states.
    """
    basis = np.eye(dim)
    out = [DensityState.pure(basis[i]) for i in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            for phase in (1, -1, 1j, -1j):
                out.append(DensityState.pure(basis[i] + phase * basis[j]))
    return out


def state_matrix(states: Sequence[DensityState], elements: Sequence) -> np.ndarray:
    """``M[s, k] = s(elements[k])``."""
    if not states:
        return np.zeros((0, len(elements)))
    ws = np.stack([s.W.matrix for s in states])
    es = np.stack([as_element(e).matrix for e in elements])
    return np.real(np.einsum("sij,kji->sk", ws, es))


def leq_via_states(a, b, states: Sequence[DensityState]) -> bool:
    """``s(a) <= s(b)`` for all ``s`` in ``states``."""
    v = state_matrix(states, [a, b])
    return bool(np.all(v[:, 0] <= v[:, 1] + get_tolerances().proj))


def eigenvector_states(a) -> list[DensityState]:
    a = as_element(a)
    return [DensityState.pure(a.eigenvectors[:, k]) for k in range(a.dim)]


@dataclasses.dataclass(frozen=True)
class NormCertificate:
    """``lower`` is the best value over the supplied sample; ``certified`` is
    the exact supremum ``max |eigenvalue|``, attained at ``maximizer``."""

    lower: float
    certified: float
    maximizer: DensityState

    @property
    def attained(self) -> bool:
        return abs(self.lower - self.certified) <= get_tolerances().proj * max(1.0, self.certified)


def norm_via_states(a, sample: Sequence[DensityState] = ()) -> NormCertificate:
    """Lower bound ``max |s(a)|`` over ``sample`` and the certified norm."""
    a = as_element(a)
    lower = max((abs(apply(s, a)) for s in sample), default=0.0)
    w = a.eigenvalues
    k = 0 if abs(w[0]) >= abs(w[-1]) else a.dim - 1
    maximizer = DensityState.pure(a.eigenvectors[:, k])
    certified = order_unit_norm(a)
    return NormCertificate(lower=lower, certified=certified, maximizer=maximizer)


def random_pure_state(rng: np.random.Generator, dim: int) -> DensityState:
    return DensityState.pure(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_mixed_state(rng: np.random.Generator, dim: int) -> DensityState:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    w = z @ z.conj().T
    return DensityState(HermitianElement(w / np.trace(w).real, check=False), check=False)
