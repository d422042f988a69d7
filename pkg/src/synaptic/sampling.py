"""Random instances for property tests and demos.

Every generator takes an explicit :class:`numpy.random.Generator`.
"""
from __future__ import annotations

import numpy as np

from .matrix_core import HermitianElement, Projection


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianElement:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianElement(scale * (z + z.conj().T) / 2, check=False)


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> HermitianElement:
    rank = dim if rank is None else rank
    z = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return HermitianElement(z @ z.conj().T, check=False)


def random_effect(rng: np.random.Generator, dim: int) -> HermitianElement:
    u = random_unitary(rng, dim)
    w = rng.uniform(0, 1, size=dim)
    return HermitianElement((u * w) @ u.conj().T, check=False)


def random_projection(rng: np.random.Generator, dim: int, rank: int | None = None) -> Projection:
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    u = random_unitary(rng, dim)
    return Projection.onto(u[:, :rank]) if rank else Projection.zero(dim)


def random_pvm_atoms(rng: np.random.Generator, dim: int, outcomes: int) -> list[Projection]:
    """Orthogonal projections summing to the identity; some may be zero when
    ``outcomes > dim``."""
    u = random_unitary(rng, dim)
    owner = rng.integers(0, outcomes, size=dim)
    # make sure no outcome is empty when there is room for it
    if outcomes <= dim:
        owner[:outcomes] = rng.permutation(outcomes)
    atoms = []
    for k in range(outcomes):
        cols = u[:, owner == k]
        atoms.append(Projection(cols @ cols.conj().T, check=False))
    return atoms


def random_stochastic(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Row-stochastic matrix with Dirichlet(1) rows."""
    return rng.dirichlet(np.ones(cols), size=rows)


def random_commuting_pair(
    rng: np.random.Generator, dim: int, levels: int = 3
) -> tuple[HermitianElement, HermitianElement]:
    """Two elements diagonal in a common random basis.

    Eigenvalues are drawn from ``levels`` small integers so both elements are
    usually degenerate and sums/products collide.
    """
    u = random_unitary(rng, dim)
    a = rng.integers(-levels, levels + 1, size=dim).astype(float)
    b = rng.integers(-levels, levels + 1, size=dim).astype(float)
    mk = lambda w: HermitianElement((u * w) @ u.conj().T, check=False)  # noqa: E731
    return mk(a), mk(b)


def trine_atoms() -> list[HermitianElement]:
    """The qubit trine POVM, ``(2/3)|psi_k><psi_k|`` at 120 degree Bloch spacing."""
    atoms = []
    for k in range(3):
        theta = 2 * np.pi * k / 3
        psi = np.array([np.cos(theta / 2), np.sin(theta / 2)])
        atoms.append(HermitianElement(2 / 3 * np.outer(psi, psi), check=False))
    return atoms
