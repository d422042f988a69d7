"""Hermitian matrices as a concrete synaptic algebra.

The algebra ``A`` is the real vector space of ``n x n`` complex Hermitian
matrices with the identity as order unit.  Everything here is a pure
function of immutable :class:`HermitianElement` values.

Spectral data is obtained from LAPACK's Hermitian eigensolver and then
*clustered*: eigenvalues closer than ``tol.eig * max(1, |a|)`` are treated
as one breakpoint and their eigenprojections are summed.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import get_tolerances
from .errors import (
    DimensionMismatch,
    FunctionUndefined,
    InvalidResolution,
    NotHermitian,
    NotPositive,
    NotProjection,
)

__all__ = [
    "HermitianElement",
    "Projection",
    "SpectralResolution",
    "as_element",
    "absolute",
    "carrier",
    "cluster_sorted",
    "commutator_norm",
    "commutes",
    "element_from_resolution",
    "functional_calculus",
    "is_effect",
    "is_projection",
    "jordan_product",
    "join",
    "leq",
    "meet",
    "order_unit_norm",
    "orthocomplement",
    "positive_part",
    "quadratic_map",
    "spectral_projection",
    "spectral_resolution",
    "square_root",
    "stieltjes_sum",
]


def _scale(*norms: float) -> float:
    return max(1.0, *norms)


class HermitianElement:
    """An element of the matrix synaptic algebra.

    The stored matrix is symmetrised (``(m + m^*) / 2``) after the
    hermiticity check and made read-only, so two threads can share an
    element freely.

    Parameters
    ----------
    entries : array_like
        Square real or complex matrix.
    check : bool
        Skip the hermiticity test when False.  The matrix is still
        symmetrised.
    """

    __array_priority__ = 1000

    def __init__(self, entries, *, check: bool = True):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NotHermitian(*np.argwhere(~np.isfinite(m))[0], math.inf)
        if check:
            dev = np.abs(m - m.conj().T)
            tol = get_tolerances().herm * _scale(float(np.abs(m).max()))
            if dev.max() > tol:
                i, j = np.unravel_index(int(dev.argmax()), dev.shape)
                raise NotHermitian(int(i), int(j), float(dev[i, j]))
        m = (m + m.conj().T) / 2
        m.flags.writeable = False
        self._m = m

    # -- construction ---------------------------------------------------
    @classmethod
    def identity(cls, dim: int) -> "HermitianElement":
        return cls(np.eye(dim), check=False)

    @classmethod
    def zero(cls, dim: int) -> "HermitianElement":
        return cls(np.zeros((dim, dim)), check=False)

    @classmethod
    def diag(cls, values: Iterable[float]) -> "HermitianElement":
        return cls(np.diag(np.asarray(list(values), dtype=float)), check=False)

    # -- basic data -----------------------------------------------------
    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    @functools.cached_property
    def _eigh(self) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(self._m)
        w.flags.writeable = False
        v.flags.writeable = False
        return w, v

    @property
    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues (with multiplicity)."""
        return self._eigh[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        """Unitary whose columns are eigenvectors matching :attr:`eigenvalues`."""
        return self._eigh[1]

    def norm(self) -> float:
        return order_unit_norm(self)

    def trace(self) -> float:
        return float(np.trace(self._m).real)

    def allclose(self, other, atol: float = 1e-10) -> bool:
        other = as_element(other)
        return self.dim == other.dim and float(np.abs(self._m - other._m).max()) <= atol

    def distance(self, other) -> float:
        """Operator-norm distance ``|self - other|``."""
        other = as_element(other)
        _same_dim(self, other)
        return float(np.linalg.norm(self._m - other._m, 2))

    # -- real vector space ----------------------------------------------
    def _wrap(self, m) -> "HermitianElement":
        return HermitianElement(m, check=False)

    def __add__(self, other):
        if isinstance(other, HermitianElement):
            _same_dim(self, other)
            return self._wrap(self._m + other._m)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianElement):
            _same_dim(self, other)
            return self._wrap(self._m - other._m)
        return NotImplemented

    def __neg__(self):
        return self._wrap(-self._m)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return self._wrap(float(scalar) * self._m)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return self._wrap(self._m / float(scalar))
        return NotImplemented

    def __repr__(self) -> str:
        body = np.array2string(self._m, precision=4, suppress_small=True)
        return f"{type(self).__name__}(dim={self.dim}, {body})"


class Projection(HermitianElement):
    """An idempotent element, ``p = p^2``."""

    def __init__(self, entries, *, check: bool = True):
        super().__init__(entries, check=check)
        if check:
            resid = float(np.abs(self._m @ self._m - self._m).max())
            if resid > get_tolerances().proj:
                raise NotProjection(f"|p^2 - p| = {resid:.3e} exceeds tolerance")

    @classmethod
    def identity(cls, dim: int) -> "Projection":
        return cls(np.eye(dim), check=False)

    @classmethod
    def zero(cls, dim: int) -> "Projection":
        return cls(np.zeros((dim, dim)), check=False)

    @classmethod
    def onto(cls, vectors) -> "Projection":
        """Orthogonal projection onto the span of the given columns."""
        v = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if v.shape[1] == 0:
            return cls.zero(v.shape[0])
        q, r = np.linalg.qr(v)
        rank_tol = 1e-10 * max(1.0, float(np.abs(r).max()))
        q = q[:, np.abs(np.diag(r)) > rank_tol]
        return cls(q @ q.conj().T, check=False)


def as_element(x) -> HermitianElement:
    if isinstance(x, HermitianElement):
        return x
    return HermitianElement(x)


def _same_dim(a: HermitianElement, b: HermitianElement) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")


def _pair(a, b) -> tuple[HermitianElement, HermitianElement]:
    a, b = as_element(a), as_element(b)
    _same_dim(a, b)
    return a, b


def cluster_sorted(values: Sequence[float], width: float) -> list[list[int]]:
    """Group ascending ``values`` into runs whose consecutive gaps are <= ``width``."""
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and v - values[groups[-1][-1]] <= width:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _cluster_width(a: HermitianElement) -> float:
    return get_tolerances().eig * _scale(order_unit_norm(a))


def _from_spectrum(v: np.ndarray, w: Sequence[float]) -> HermitianElement:
    return HermitianElement((v * np.asarray(w)) @ v.conj().T, check=False)


# -- Jordan structure -------------------------------------------------------

def jordan_product(a, b) -> HermitianElement:
    """``a o b = (ab + ba) / 2``."""
    a, b = _pair(a, b)
    m = a.matrix @ b.matrix
    return HermitianElement((m + m.conj().T) / 2, check=False)


def quadratic_map(a, b) -> HermitianElement:
    """``b -> aba``, linear and order preserving in ``b``."""
    a, b = _pair(a, b)
    return HermitianElement(a.matrix @ b.matrix @ a.matrix, check=False)


def commutator_norm(a, b) -> float:
    a, b = _pair(a, b)
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.linalg.norm(c, 2))


def commutes(a, b) -> bool:
    """True iff ``|ab - ba| <= tol.comm * max(1, |a||b|)``."""
    a, b = _pair(a, b)
    return commutator_norm(a, b) <= get_tolerances().comm * _scale(a.norm() * b.norm())


# -- order ------------------------------------------------------------------

def order_unit_norm(a) -> float:
    """``|a| = max |eigenvalue|``; the order-unit norm of the identity-unit space."""
    w = as_element(a).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))


def leq(a, b) -> bool:
    """``a <= b`` in the positive-semidefinite order."""
    a, b = _pair(a, b)
    d = b - a
    return float(d.eigenvalues[0]) >= -get_tolerances().proj * _scale(a.norm(), b.norm())


def is_effect(e) -> bool:
    """``0 <= e <= 1``."""
    e = as_element(e)
    w = e.eigenvalues
    tol = get_tolerances().proj
    return bool(w[0] >= -tol and w[-1] <= 1 + tol)


def is_projection(p) -> bool:
    p = as_element(p)
    return float(np.abs(p.matrix @ p.matrix - p.matrix).max()) <= get_tolerances().proj


def _as_projection(p) -> Projection:
    if isinstance(p, Projection):
        return p
    return Projection(as_element(p).matrix)


# -- spectral primitives ----------------------------------------------------

def positive_part(a) -> HermitianElement:
    """``a^+``: negative eigenvalues clipped to zero."""
    a = as_element(a)
    return _from_spectrum(a.eigenvectors, np.clip(a.eigenvalues, 0.0, None))


def square_root(a) -> HermitianElement:
    """The unique positive ``r`` with ``r^2 = a``.

    Raises
    ------
    NotPositive
        If the smallest eigenvalue of ``a`` is below ``-tol.proj * max(1, |a|)``.
    """
    a = as_element(a)
    w = a.eigenvalues
    if w[0] < -get_tolerances().proj * _scale(a.norm()):
        raise NotPositive(float(w[0]))
    return _from_spectrum(a.eigenvectors, np.sqrt(np.clip(w, 0.0, None)))


def absolute(b) -> HermitianElement:
    """``|b| = (b^2)^{1/2}``."""
    b = as_element(b)
    return _from_spectrum(b.eigenvectors, np.abs(b.eigenvalues))


def carrier(a) -> Projection:
    """Smallest projection ``p`` with ``a = ap``: the projection onto the range of ``a``."""
    a = as_element(a)
    keep = np.abs(a.eigenvalues) > _cluster_width(a)
    v = a.eigenvectors[:, keep]
    return Projection(v @ v.conj().T, check=False)


def spectral_projection(a, lam: float) -> Projection:
    """``p_{a,lam} = 1 - ((a - lam)^+)^o`` computed through the carrier.

    Independent of :func:`spectral_resolution`; the two routes agree.
    """
    a = as_element(a)
    shifted = positive_part(a - lam * HermitianElement.identity(a.dim))
    # the carrier threshold must follow a's scale, not the shifted element's
    v = shifted.eigenvectors[:, np.abs(shifted.eigenvalues) > _cluster_width(a)]
    return Projection(np.eye(a.dim) - v @ v.conj().T, check=False)


@dataclasses.dataclass(frozen=True)
class SpectralResolution:
    """Right-continuous step family of projections.

    ``steps[i]`` is ``p_lam`` for ``breakpoints[i] <= lam < breakpoints[i+1]``;
    below the first breakpoint ``p_lam = 0`` and ``steps[-1]`` is the identity.
    Invariants are validated on construction (:class:`InvalidResolution`).
    """

    breakpoints: tuple[float, ...]
    steps: tuple[Projection, ...]

    def __post_init__(self) -> None:
        bps = tuple(float(x) for x in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        steps = tuple(self.steps)
        if not bps or len(bps) != len(steps):
            raise InvalidResolution("need one step per breakpoint and at least one breakpoint")
        if any(not math.isfinite(x) for x in bps):
            raise InvalidResolution("breakpoints must be finite")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise InvalidResolution("breakpoints must be strictly increasing")
        try:
            steps = tuple(_as_projection(p) for p in steps)
        except NotProjection as exc:
            raise InvalidResolution(f"step is not a projection: {exc}") from None
        object.__setattr__(self, "steps", steps)
        n = steps[0].dim
        if any(p.dim != n for p in steps):
            raise InvalidResolution("steps have different dimensions")
        tol = get_tolerances().proj
        if float(np.abs(steps[-1].matrix - np.eye(n)).max()) > tol:
            raise InvalidResolution("last step is not the identity")
        prev = np.zeros((n, n))
        for i, p in enumerate(steps):
            m = p.matrix
            # p_prev <= p for projections means p_prev p = p p_prev = p_prev
            if float(np.abs(prev @ m - prev).max()) > tol or float(np.abs(m @ prev - prev).max()) > tol:
                raise InvalidResolution(f"steps {i - 1} and {i} are not monotone")
            if float(np.abs(m - prev).max()) <= tol:
                raise InvalidResolution(f"step {i} does not increase (empty jump at {bps[i]})")
            prev = m

    @property
    def dim(self) -> int:
        return self.steps[0].dim

    @property
    def lower(self) -> float:
        """``L_a``, the infimum of the spectrum."""
        return self.breakpoints[0]

    @property
    def upper(self) -> float:
        """``U_a``, the supremum of the spectrum."""
        return self.breakpoints[-1]

    def at(self, lam: float) -> Projection:
        """``p_lam`` for arbitrary real ``lam``."""
        i = int(np.searchsorted(self.breakpoints, lam, side="right")) - 1
        if i < 0:
            return Projection.zero(self.dim)
        return self.steps[i]

    def increments(self) -> list[HermitianElement]:
        """Eigenprojections ``p_{lam_i} - p_{lam_{i-1}}``."""
        out = []
        prev = np.zeros((self.dim, self.dim))
        for p in self.steps:
            out.append(Projection(p.matrix - prev, check=False))
            prev = p.matrix
        return out


def _eigen_clusters(a: HermitianElement) -> list[tuple[float, np.ndarray]]:
    w, v = a.eigenvalues, a.eigenvectors
    groups = cluster_sorted(list(w), _cluster_width(a))
    return [(float(np.mean(w[g])), v[:, g]) for g in groups]


def spectral_resolution(a) -> SpectralResolution:
    """Spectral resolution of ``a`` with clustered breakpoints."""
    a = as_element(a)
    n = a.dim
    breakpoints, steps = [], []
    acc = np.zeros((n, n), dtype=complex)
    clusters = _eigen_clusters(a)
    for k, (lam, v) in enumerate(clusters):
        acc = acc + v @ v.conj().T
        breakpoints.append(lam)
        if k == len(clusters) - 1:
            steps.append(Projection.identity(n))
        else:
            steps.append(Projection(acc, check=False))
    return SpectralResolution(tuple(breakpoints), tuple(steps))


def element_from_resolution(r: SpectralResolution) -> HermitianElement:
    """The element ``sum lam_i (p_i - p_{i-1})`` whose resolution is ``r``."""
    if not isinstance(r, SpectralResolution):
        raise InvalidResolution(f"expected a SpectralResolution, got {type(r).__name__}")
    m = np.zeros((r.dim, r.dim), dtype=complex)
    for lam, dp in zip(r.breakpoints, r.increments()):
        m += lam * dp.matrix
    return HermitianElement(m, check=False)


def stieltjes_sum(a, mesh: Sequence[float]) -> HermitianElement:
    """Riemann-Stieltjes sum ``sum t_j (p_{t_j} - p_{t_{j-1}})`` over ``mesh``.

    The mesh must start strictly below ``L_a`` and end at or above ``U_a``;
    the result is within ``max(diff(mesh))`` of ``a`` in norm.
    """
    res = a if isinstance(a, SpectralResolution) else spectral_resolution(a)
    t = np.asarray(mesh, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("mesh must be a strictly increasing sequence of at least two points")
    if not (t[0] < res.lower and t[-1] >= res.upper):
        raise ValueError(f"mesh must cover ({res.lower}, {res.upper}] with a point below L_a")
    n = res.dim
    m = np.zeros((n, n), dtype=complex)
    prev = res.at(t[0]).matrix
    for tj in t[1:]:
        cur = res.at(tj).matrix
        m += tj * (cur - prev)
        prev = cur
    return HermitianElement(m, check=False)


def functional_calculus(a, f: Callable[[float], float]) -> HermitianElement:
    """``f(a) = sum f(lam_i) dp_i`` over the clustered spectrum of ``a``.

    ``f`` is called once per distinct eigenvalue with a Python float and must
    return a finite real number there.
    """
    a = as_element(a)
    n = a.dim
    m = np.zeros((n, n), dtype=complex)
    for lam, v in _eigen_clusters(a):
        try:
            with np.errstate(all="raise"):
                val = f(lam)
            val = complex(val)
        except (ArithmeticError, ValueError, TypeError, FloatingPointError):
            raise FunctionUndefined(lam) from None
        if val.imag != 0 or not math.isfinite(val.real):
            raise FunctionUndefined(lam)
        m += val.real * (v @ v.conj().T)
    return HermitianElement(m, check=False)


# -- projection lattice -----------------------------------------------------

def orthocomplement(p) -> Projection:
    p = _as_projection(p)
    return Projection(np.eye(p.dim) - p.matrix, check=False)


def meet(p, q) -> Projection:
    """``p ^ q``: projection onto the intersection of the ranges.

    Computed as the eigenvalue-2 eigenspace of ``p + q``, so it does not
    assume ``p`` and ``q`` commute.
    """
    p, q = _as_projection(p), _as_projection(q)
    _same_dim(p, q)
    s = p + q
    w, v = s.eigenvalues, s.eigenvectors
    keep = w >= 2 - 2 * get_tolerances().eig
    return Projection(v[:, keep] @ v[:, keep].conj().T, check=False)


def join(p, q) -> Projection:
    """``p v q = (p' ^ q')'``."""
    return orthocomplement(meet(orthocomplement(p), orthocomplement(q)))
