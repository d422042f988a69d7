"""Weak Markov kernels, smearings and the commuting-range decomposition.

A kernel between finite outcome sets is a row-per-source matrix
``rows[x, y] = nu(x, {y})``; ``nu(x, B)`` is the row sum over ``B``, so
countable additivity holds by construction.  The probability conditions are
only enforced off the null set ``null`` (the "I-a.e." clause): rows indexed
by null outcomes are stored but never read.
"""
from __future__ import annotations

import dataclasses
import functools
import itertools
from typing import Any, Callable, Hashable, Mapping, NamedTuple, Sequence

import numpy as np

from .config import get_tolerances
from .errors import (
    CertificationError,
    DimensionMismatch,
    IdealMismatch,
    KernelViolation,
    NonCommutingInput,
    NonCommutingRange,
    ValidationError,
)
from .matrix_core import (
    HermitianElement,
    Projection,
    _scale,
    as_element,
    cluster_sorted,
    commutator_norm,
    commutes,
    order_unit_norm,
)
from .observables import Observable, RealObservable, _make
from .states import spanning_states, state_matrix


class WeakMarkovKernel:
    """Kernel ``nu(x, {y})`` that is a probability vector for ``x`` off ``null``.

    Use :func:`validate_kernel` to build one from raw data.
    """

    def __init__(self, source: Sequence[Hashable], target: Sequence[Hashable], rows, null: Sequence[Hashable] = ()):
        self.source = tuple(source)
        self.target = tuple(target)
        r = np.array(rows, dtype=float)
        if r.ndim != 2 or r.shape != (len(self.source), len(self.target)):
            raise ValidationError(
                f"kernel rows must have shape ({len(self.source)}, {len(self.target)}), got {r.shape}"
            )
        if len(set(self.source)) != len(self.source) or len(set(self.target)) != len(self.target):
            raise ValidationError("kernel outcome labels must be distinct")
        self.null = frozenset(null)
        unknown = self.null - set(self.source)
        if unknown:
            raise ValidationError(f"null outcomes {sorted(map(repr, unknown))} are not source outcomes")
        r.flags.writeable = False
        self.rows = r
        self._src = {x: i for i, x in enumerate(self.source)}
        self._check()

    def _check(self) -> None:
        tol = get_tolerances().proj
        for i, x in enumerate(self.source):
            if x in self.null:
                continue
            row = self.rows[i]
            if not np.all(np.isfinite(row)) or np.any(row < -tol) or np.any(row > 1 + tol):
                raise KernelViolation(i, "(ii)", f"entries {row.tolist()} leave [0, 1]")
            if abs(row.sum() - 1) > tol * max(1, row.size):
                raise KernelViolation(i, "(iii)", f"row sums to {row.sum():.12g}, not 1")

    @property
    def is_markov(self) -> bool:
        return not self.null

    def row(self, x: Hashable) -> np.ndarray:
        return self.rows[self._src[x]]

    def value(self, x: Hashable, subset: Sequence[Hashable]) -> float:
        """``nu(x, B)``."""
        cols = [self.target.index(y) for y in subset]
        return float(self.row(x)[cols].sum())

    def effective_rows(self) -> np.ndarray:
        """Rows with every null row replaced by zeros."""
        r = self.rows.copy()
        for i, x in enumerate(self.source):
            if x in self.null:
                r[i] = 0.0
        return r

    def __repr__(self) -> str:
        return f"{type(self).__name__}(source={list(self.source)!r}, target={list(self.target)!r}, null={sorted(map(repr, self.null))})"


class MarkovKernel(WeakMarkovKernel):
    """A weak Markov kernel with empty null set: every row is a probability vector."""

    def __init__(self, source, target, rows):
        super().__init__(source, target, rows, null=())


def validate_kernel(
    rows,
    source: Sequence[Hashable] | None = None,
    target: Sequence[Hashable] | None = None,
    null: Sequence[Hashable] = (),
) -> WeakMarkovKernel:
    """Build a kernel, defaulting labels to ``0..n-1``.

    Returns a :class:`MarkovKernel` when ``null`` is empty.  The row-sum
    condition is read as holding off the null ideal (the same ideal as the
    range condition).

    Raises
    ------
    KernelViolation
        With the offending row index and condition ``"(ii)"`` (entries in
        ``[0, 1]``) or ``"(iii)"`` (row sums to one).
    """
    r = np.array(rows, dtype=float)
    if r.ndim != 2:
        raise ValidationError("kernel rows must form a rectangular 2-d array")
    source = tuple(range(r.shape[0])) if source is None else tuple(source)
    target = tuple(range(r.shape[1])) if target is None else tuple(target)
    if not null:
        return MarkovKernel(source, target, r)
    return WeakMarkovKernel(source, target, r, null)


def identity_kernel(labels: Sequence[Hashable]) -> MarkovKernel:
    return MarkovKernel(labels, labels, np.eye(len(labels)))


def constant_kernel(source: Sequence[Hashable], target: Sequence[Hashable], mu) -> MarkovKernel:
    mu = np.asarray(mu, dtype=float)
    return MarkovKernel(source, target, np.tile(mu, (len(source), 1)))


def deterministic_kernel(source: Sequence[Hashable], f: Callable[[Any], Hashable] | Mapping,
                         target: Sequence[Hashable] | None = None) -> MarkovKernel:
    """``nu(x, B) = 1`` if ``f(x)`` is in ``B``; the kernel realising ``f(xi)``."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    image = [fn(x) for x in source]
    target = list(dict.fromkeys(image)) if target is None else list(target)
    rows = np.zeros((len(source), len(target)))
    for i, y in enumerate(image):
        rows[i, target.index(y)] = 1.0
    return MarkovKernel(source, target, rows)


def binary_symmetric_kernel(eps: float, labels: Sequence[Hashable] = (0, 1)) -> MarkovKernel:
    return MarkovKernel(labels, labels, [[1 - eps, eps], [eps, 1 - eps]])


def kernel_equiv(nu: WeakMarkovKernel, mu: WeakMarkovKernel, ideal: Sequence[Hashable] | None = None) -> bool:
    """``nu ~_I mu``: rows agree off ``ideal`` (default: the union of both null sets)."""
    if nu.source != mu.source or nu.target != mu.target:
        raise DimensionMismatch("kernels have different outcome spaces")
    ideal = (nu.null | mu.null) if ideal is None else frozenset(ideal)
    tol = get_tolerances().proj
    for i, x in enumerate(nu.source):
        if x in ideal:
            continue
        if float(np.abs(nu.rows[i] - mu.rows[i]).max()) > tol:
            return False
    return True


def pushforward(nu: WeakMarkovKernel, P) -> np.ndarray:
    """``(nu P)(y) = sum_x nu(x, {y}) P(x)``.

    ``P`` must vanish on the null outcomes of ``nu``; those rows are skipped.
    """
    p = np.asarray(P, dtype=float)
    if p.shape != (len(nu.source),):
        raise DimensionMismatch(f"P must have length {len(nu.source)}")
    tol = get_tolerances().proj
    for i, x in enumerate(nu.source):
        if x in nu.null and abs(p[i]) > tol:
            raise ValidationError(f"P puts mass {p[i]:.3e} on null outcome {x!r}")
    return p @ nu.effective_rows()


def _values_on(xi: Observable, f) -> np.ndarray:
    if isinstance(f, Mapping):
        return np.array([float(f[x]) for x in xi.outcomes])
    if callable(f):
        return np.array([float(f(x)) for x in xi.outcomes])
    v = np.asarray(f, dtype=float)
    if v.shape != (len(xi),):
        raise DimensionMismatch(f"need {len(xi)} values, got shape {v.shape}")
    return v


def integrate(xi: Observable, f) -> HermitianElement:
    """``xi(f) = sum_x f(x) xi({x})`` for ``f : X -> [0, 1]``.

    ``f`` may be a mapping, a callable on outcomes, or a sequence aligned
    with ``xi.outcomes``.  Values on null outcomes are ignored, so ``f`` and
    any ``f'`` equal off the null ideal give the same element.
    """
    v = _values_on(xi, f)
    null = xi.null_outcomes()
    tol = get_tolerances().proj
    m = np.zeros((xi.dim, xi.dim), dtype=complex)
    for x, t, e in zip(xi.outcomes, v, xi.atoms):
        if x in null:
            continue
        if not (-tol <= t <= 1 + tol):
            raise ValidationError(f"integrand takes value {t!r} at outcome {x!r}, outside [0, 1]")
        m += t * e.matrix
    return HermitianElement(m, check=False)


def _aligned(xi: Observable, nu: WeakMarkovKernel) -> WeakMarkovKernel:
    if nu.source == xi.outcomes:
        return nu
    if set(nu.source) != set(xi.outcomes):
        raise ValidationError("kernel source outcomes differ from the observable's outcomes")
    order = [nu.source.index(x) for x in xi.outcomes]
    return WeakMarkovKernel(xi.outcomes, nu.target, nu.rows[order], nu.null)


def smear(xi: Observable, nu: WeakMarkovKernel, *, certify: bool = True) -> Observable:
    """The smearing ``eta(B) = xi(nu(., B))`` of ``xi`` by ``nu``.

    With ``certify`` the result is checked against the defining state
    identity on :func:`~synaptic.states.spanning_states`; since those states
    determine a matrix, passing the check also certifies uniqueness.

    Raises
    ------
    IdealMismatch
        If ``nu`` declares an outcome null where ``xi`` does not vanish.
    """
    nu = _aligned(xi, nu)
    bad = nu.null - xi.null_outcomes()
    if bad:
        raise IdealMismatch(sorted(bad, key=repr))
    atoms = [integrate(xi, nu.rows[:, k]) for k in range(len(nu.target))]
    eta = _make(nu.target, atoms)
    if certify:
        resid = smearing_residual(xi, nu, eta)
        if resid > get_tolerances().proj * max(1, len(xi)):
            raise CertificationError(f"smearing fails its state identity by {resid:.3e}")
    return eta


def smearing_state_residuals(xi: Observable, nu: WeakMarkovKernel, eta: Observable, max_subsets: int = 4096) -> np.ndarray:
    """Per spanning state ``s``: ``max_B |s(eta(B)) - sum_x nu(x, B) s(xi({x}))|``.

    ``B`` runs over all subsets of the target if there are at most
    ``max_subsets`` of them, otherwise over singletons and the full set.
    """
    nu = _aligned(xi, nu)
    eta_atoms = [eta.atom(y) for y in nu.target]
    states = spanning_states(xi.dim)
    p_xi = state_matrix(states, xi.atoms)
    p_eta = state_matrix(states, eta_atoms)
    predicted = p_xi @ nu.effective_rows()
    k = len(nu.target)
    if 2 ** k <= max_subsets:
        ind = np.array(list(itertools.product((0.0, 1.0), repeat=k))).T
    else:
        ind = np.hstack([np.eye(k), np.ones((k, 1))])
    return np.abs((p_eta - predicted) @ ind).max(axis=1)


def smearing_residual(xi: Observable, nu: WeakMarkovKernel, eta: Observable, max_subsets: int = 4096) -> float:
    """Largest violation of the smearing state identity over spanning states and subsets."""
    return float(smearing_state_residuals(xi, nu, eta, max_subsets).max())


# -- finite Loomis-Sikorski representation ---------------------------------

@dataclasses.dataclass(frozen=True)
class LoomisSikorski:
    """Joint spectral atoms of a commuting family.

    ``labels[x]`` is the tuple of eigenvalues the family takes on the
    ``x``-th joint eigenspace and ``projections[x]`` the projection onto it.
    The map :meth:`represent` sends a function on the atoms to
    ``sum_x f(x) P_x``, a surjective morphism onto the algebra generated by
    the family.
    """

    labels: tuple[tuple[float, ...], ...]
    projections: tuple[Projection, ...]

    @property
    def dim(self) -> int:
        return self.projections[0].dim

    def represent(self, f) -> HermitianElement:
        """``h(f) = sum_x f(x) P_x``; ``f`` is a callable on label tuples or
        a sequence of per-atom values."""
        if callable(f):
            vals = [float(f(lab)) for lab in self.labels]
        else:
            vals = [float(v) for v in f]
            if len(vals) != len(self.labels):
                raise DimensionMismatch(f"need {len(self.labels)} values")
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for v, p in zip(vals, self.projections):
            m += v * p.matrix
        return HermitianElement(m, check=False)

    def sharp_observable(self, outcomes: Sequence[Hashable] | None = None) -> Observable:
        """The PVM ``x -> P_x``, labelled by the joint eigenvalue tuples by default."""
        return _make(self.labels if outcomes is None else tuple(outcomes), self.projections)


def _check_commuting(elements: Sequence[HermitianElement], exc=NonCommutingInput, labels=None,
                     what: str = "elements") -> None:
    labels = list(range(len(elements))) if labels is None else list(labels)
    for (i, a), (j, b) in itertools.combinations(enumerate(elements), 2):
        if not commutes(a, b):
            raise exc((labels[i], labels[j]), commutator_norm(a, b), what=what)


def _joint_labels(elements, v: np.ndarray) -> tuple[tuple[float, ...], bool]:
    """Rayleigh values of each element on span(v) and whether span(v) is a joint eigenspace."""
    labels, ok = [], True
    for a in elements:
        av = a.matrix @ v
        lam = float(np.real(np.trace(v.conj().T @ av)) / v.shape[1])
        labels.append(lam)
        if np.linalg.norm(av - lam * v, 2) > 2 * get_tolerances().eig * _scale(order_unit_norm(a)):
            ok = False
    return tuple(labels), ok


def _split_by_combination(elements, rng) -> list[np.ndarray] | None:
    dim = elements[0].dim
    c = rng.normal(size=len(elements))
    m = sum((ci * a.matrix / _scale(order_unit_norm(a)) for ci, a in zip(c, elements)), np.zeros((dim, dim), dtype=complex))
    w, v = np.linalg.eigh(m)
    width = get_tolerances().eig * _scale(float(np.abs(w).max()))
    blocks = [v[:, g] for g in cluster_sorted(list(w), width)]
    if all(_joint_labels(elements, b)[1] for b in blocks):
        return blocks
    return None


def _split_by_deflation(elements) -> list[np.ndarray]:
    dim = elements[0].dim
    blocks = [np.eye(dim, dtype=complex)]
    for a in elements:
        width = get_tolerances().eig * _scale(order_unit_norm(a))
        nxt = []
        for q in blocks:
            w, u = np.linalg.eigh(q.conj().T @ a.matrix @ q)
            for g in cluster_sorted(list(w), width):
                nxt.append(q @ u[:, g])
        blocks = nxt
    return blocks


def finite_loomis_sikorski(elements: Sequence, *, seed: int = 0, retries: int = 8) -> LoomisSikorski:
    """Joint spectral atoms of pairwise commuting elements.

    Simultaneous diagonalisation by a random linear combination; if a draw
    produces an accidental degeneracy (a cluster that is not a joint
    eigenspace) it is retried with fresh coefficients up to ``retries``
    times, then the family is diagonalised one element at a time by
    deflation.  Atoms are returned sorted by label, so the result does not
    depend on the random draw.

    Raises
    ------
    NonCommutingInput
        Naming the first non-commuting pair.
    """
    elements = [as_element(a) for a in elements]
    if not elements:
        raise ValueError("need at least one element")
    if any(a.dim != elements[0].dim for a in elements):
        raise DimensionMismatch("elements have different dimensions")
    _check_commuting(elements)
    rng = np.random.default_rng(seed)
    blocks = None
    for _ in range(retries):
        blocks = _split_by_combination(elements, rng)
        if blocks is not None:
            break
    if blocks is None:
        blocks = _split_by_deflation(elements)

    merged: dict[tuple[float, ...], list[np.ndarray]] = {}
    widths = [get_tolerances().eig * _scale(order_unit_norm(a)) for a in elements]
    for b in blocks:
        lab, _ = _joint_labels(elements, b)
        key = next(
            (k for k in merged if all(abs(s - t) <= w for s, t, w in zip(k, lab, widths))),
            lab,
        )
        merged.setdefault(key, []).append(b)
    atoms = []
    for key in merged:
        v = np.hstack(merged[key])
        lab, _ = _joint_labels(elements, v)
        atoms.append((lab, Projection(v @ v.conj().T, check=False)))

    # lexicographic, treating coordinates within the clustering width as ties
    def cmp(s, t):
        for x, y, w in zip(s[0], t[0], widths):
            if abs(x - y) > w:
                return -1 if x < y else 1
        return 0

    atoms.sort(key=functools.cmp_to_key(cmp))
    return LoomisSikorski(tuple(a for a, _ in atoms), tuple(p for _, p in atoms))


class Decomposition(NamedTuple):
    sharp: RealObservable
    kernel: MarkovKernel


def decompose_commuting(eta: Observable, *, seed: int = 0) -> Decomposition:
    """Write a commuting-range observable as a smearing of a sharp one.

    The sharp observable is the PVM of joint spectral atoms of ``eta``'s
    range, labelled ``0, 1, ...`` (so it is real); ``kernel[x, y]`` is the
    eigenvalue of ``eta({y})`` on atom ``x``.

    Raises
    ------
    NonCommutingRange
        If two atoms of ``eta`` do not commute; no such decomposition exists.
    """
    _check_commuting(eta.atoms, NonCommutingRange, eta.outcomes, what="atoms")
    ls = finite_loomis_sikorski(eta.atoms, seed=seed)
    sharp = RealObservable(range(len(ls.labels)), ls.projections, check=False)
    rows = np.array(ls.labels, dtype=float)
    kernel = MarkovKernel(sharp.outcomes, eta.outcomes, rows)
    return Decomposition(sharp, kernel)
