"""Observables on finite outcome sets.

An observable is stored by its atoms ``xi({x})``; the value on a subset is
the sum of its atoms, so finite additivity and ``xi(X) = 1`` reduce to the
atoms being effects that sum to the identity.
"""
from __future__ import annotations

import itertools
import numbers
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .config import get_tolerances
from .errors import (
    DimensionMismatch,
    InvalidObservable,
    NonCommutingRanges,
    NotSharp,
    OverlappingAtoms,
    UnknownOutcome,
)
from .matrix_core import (
    HermitianElement,
    Projection,
    _scale,
    as_element,
    cluster_sorted,
    commutator_norm,
    commutes,
    is_effect,
    is_projection,
    order_unit_norm,
    spectral_resolution,
)


class Observable:
    """Effect-valued measure on a finite outcome list.

    Parameters
    ----------
    outcomes : sequence of hashable
        Distinct outcome labels.
    atoms : sequence of array_like
        One effect per outcome; together they must sum to the identity.
    """

    def __init__(self, outcomes: Sequence[Hashable], atoms: Sequence, *, check: bool = True):
        outcomes = tuple(outcomes)
        atoms = tuple(as_element(e) for e in atoms)
        if len(outcomes) != len(atoms) or not atoms:
            raise InvalidObservable("need the same, non-zero number of outcomes and atoms")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidObservable("outcome labels must be distinct")
        dim = atoms[0].dim
        if any(e.dim != dim for e in atoms):
            raise DimensionMismatch("atoms have different dimensions")
        self.outcomes = outcomes
        self.atoms = atoms
        self._index = {x: i for i, x in enumerate(outcomes)}
        if check:
            for x, e in zip(outcomes, atoms):
                if not is_effect(e):
                    raise InvalidObservable(f"atom {x!r} is not an effect (0 <= e <= 1 fails)")
            total = sum((e.matrix for e in atoms), np.zeros((dim, dim), dtype=complex))
            resid = float(np.abs(total - np.eye(dim)).max())
            if resid > get_tolerances().proj * max(1, len(atoms)):
                raise InvalidObservable(f"atoms sum to the identity only up to {resid:.3e}")

    @property
    def dim(self) -> int:
        return self.atoms[0].dim

    def __len__(self) -> int:
        return len(self.outcomes)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, outcomes={list(self.outcomes)!r})"

    def items(self) -> Iterable[tuple[Hashable, HermitianElement]]:
        return zip(self.outcomes, self.atoms)

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownOutcome(label) from None

    def atom(self, label: Hashable) -> HermitianElement:
        return self.atoms[self.index(label)]

    def evaluate(self, subset: Iterable[Hashable]) -> HermitianElement:
        """``xi(A)``, the sum of the atoms over ``A``."""
        idx = {self.index(x) for x in subset}
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for i in idx:
            m += self.atoms[i].matrix
        return HermitianElement(m, check=False)

    def null_outcomes(self) -> frozenset:
        """Outcomes whose atom vanishes; their subsets make up the null ideal ``I_xi``."""
        tol = get_tolerances().proj
        return frozenset(x for x, e in self.items() if order_unit_norm(e) <= tol)

    def is_sharp(self) -> bool:
        """Every atom is a projection (so every ``xi(A)`` is one too)."""
        return all(is_projection(e) for e in self.atoms)

    def noncommuting_pair(self) -> tuple[Hashable, Hashable, float] | None:
        """First pair of atoms that fail to commute, with their commutator norm."""
        for (x, e), (y, f) in itertools.combinations(self.items(), 2):
            if not commutes(e, f):
                return x, y, commutator_norm(e, f)
        return None

    def has_commuting_range(self) -> bool:
        return self.noncommuting_pair() is None


class RealObservable(Observable):
    """Observable whose outcomes are distinct real numbers."""

    def __init__(self, outcomes: Sequence[float], atoms: Sequence, *, check: bool = True):
        outcomes = tuple(outcomes)
        for t in outcomes:
            if isinstance(t, bool) or not isinstance(t, numbers.Real) or not np.isfinite(float(t)):
                raise InvalidObservable(f"real observable needs finite real labels, got {t!r}")
        super().__init__(outcomes, atoms, check=check)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.outcomes, dtype=float)


def trivial_observable(dim: int, label: Hashable = 0) -> Observable:
    return Observable((label,), (HermitianElement.identity(dim),), check=False)


def f_function(xi: Observable, f: Callable[[Any], Hashable] | Mapping, codomain: Sequence[Hashable] | None = None) -> Observable:
    """``f(xi)``: the observable ``B -> xi(f^{-1}(B))``.

    Outcomes are the image of ``f`` in order of first appearance, or
    ``codomain`` if given (outcomes outside the image get a zero atom).
    Returns a :class:`RealObservable` when every outcome is real.
    """
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    image = [fn(x) for x in xi.outcomes]
    labels = list(dict.fromkeys(image)) if codomain is None else list(codomain)
    pos = {y: k for k, y in enumerate(labels)}
    mats = [np.zeros((xi.dim, xi.dim), dtype=complex) for _ in labels]
    for y, e in zip(image, xi.atoms):
        if y not in pos:
            raise InvalidObservable(f"f maps into {y!r}, which is not in the codomain")
        mats[pos[y]] += e.matrix
    atoms = [HermitianElement(m, check=False) for m in mats]
    return _make(labels, atoms)


def _make(labels: Sequence[Hashable], atoms: Sequence[HermitianElement]) -> Observable:
    if all(isinstance(t, numbers.Real) and not isinstance(t, bool) for t in labels):
        return RealObservable(labels, atoms, check=False)
    return Observable(labels, atoms, check=False)


def observable_of_element(a) -> RealObservable:
    """The sharp real observable ``xi_a``: eigenvalues mapped to eigenprojections."""
    res = spectral_resolution(a)
    return RealObservable(res.breakpoints, res.increments(), check=False)


def element_of_observable(xi: Observable) -> HermitianElement:
    """The unique ``a`` with ``xi = xi_a``: ``sum t * xi({t})``.

    Raises
    ------
    NotSharp
        If some atom is not a projection.
    OverlappingAtoms
        If two atoms are not orthogonal.
    """
    if not isinstance(xi, RealObservable):
        xi = RealObservable(xi.outcomes, xi.atoms, check=False)
    for x, e in xi.items():
        if not is_projection(e):
            raise NotSharp(f"atom {x!r} is not a projection")
    tol = get_tolerances().proj
    for (x, e), (y, f) in itertools.combinations(xi.items(), 2):
        overlap = float(np.linalg.norm(e.matrix @ f.matrix, 2))
        if overlap > tol:
            raise OverlappingAtoms(x, y, overlap)
    m = sum((t * e.matrix for t, e in zip(xi.values, xi.atoms)), np.zeros((xi.dim, xi.dim), dtype=complex))
    return HermitianElement(m, check=False)


def joint_spectral_measure(*observables: RealObservable) -> Observable:
    """Joint observable of pairwise commuting sharp real observables.

    Outcomes are tuples ``(t_1, ..., t_n)`` whose joint projection
    ``xi_1({t_1}) ... xi_n({t_n})`` is non-zero; the ``i``-th marginal
    (``f_function`` with the ``i``-th coordinate) recovers ``xi_i``.  With a
    single input the labels are 1-tuples.
    """
    if not observables:
        raise ValueError("need at least one observable")
    dim = observables[0].dim
    for i, xi in enumerate(observables):
        if xi.dim != dim:
            raise DimensionMismatch("observables act on different dimensions")
        if not isinstance(xi, RealObservable):
            raise InvalidObservable(f"observable {i} is not real")
        if not xi.is_sharp():
            raise NotSharp(f"observable {i} is not sharp")
    for (i, xi), (j, eta) in itertools.combinations(enumerate(observables), 2):
        for (s, e), (t, f) in itertools.product(xi.items(), eta.items()):
            if not commutes(e, f):
                raise NonCommutingRanges(((i, s), (j, t)), commutator_norm(e, f), what="atoms")
    tol = get_tolerances().proj
    labels, atoms = [], []
    for combo in itertools.product(*(list(xi.items()) for xi in observables)):
        m = np.eye(dim, dtype=complex)
        for _, e in combo:
            m = m @ e.matrix
        if np.linalg.norm(m, 2) < tol:
            continue
        labels.append(tuple(t for t, _ in combo))
        atoms.append(Projection(m, check=False))
    return Observable(labels, atoms, check=False)


def g_function(joint: Observable, G: Callable[..., float]) -> RealObservable:
    """``G(xi_1, ..., xi_n)``: pushes the joint observable forward along ``G``.

    ``G`` receives the coordinates of each joint outcome as separate
    arguments.  Values closer than the eigenvalue clustering width are
    merged and labelled by their mean, ascending.
    """
    vals = [float(G(*x)) if isinstance(x, tuple) else float(G(x)) for x in joint.outcomes]
    order = sorted(range(len(vals)), key=vals.__getitem__)
    sorted_vals = [vals[k] for k in order]
    width = get_tolerances().eig * _scale(max(abs(v) for v in vals))
    labels, atoms = [], []
    for group in cluster_sorted(sorted_vals, width):
        members = [order[g] for g in group]
        labels.append(float(np.mean([vals[k] for k in members])))
        m = sum((joint.atoms[k].matrix for k in members), np.zeros((joint.dim, joint.dim), dtype=complex))
        atoms.append(HermitianElement(m, check=False))
    return RealObservable(labels, atoms, check=False)


def observable_distance(xi: Observable, eta: Observable, label_atol: float = 0.0) -> float:
    """Largest atom distance after matching outcomes; ``inf`` if they cannot be matched.

    Null atoms are ignored on both sides.  Real labels are matched within
    ``label_atol``; other labels must be equal.
    """
    if xi.dim != eta.dim:
        return float("inf")
    a = [(x, e) for x, e in xi.items() if x not in xi.null_outcomes()]
    b = [(y, f) for y, f in eta.items() if y not in eta.null_outcomes()]
    if len(a) != len(b):
        return float("inf")
    worst = 0.0
    used: set[int] = set()
    for x, e in a:
        match = None
        for k, (y, f) in enumerate(b):
            if k in used:
                continue
            if _labels_match(x, y, label_atol):
                match = k
                break
        if match is None:
            return float("inf")
        used.add(match)
        worst = max(worst, float(np.abs(e.matrix - b[match][1].matrix).max()))
    return worst


def _labels_match(x, y, atol: float) -> bool:
    if isinstance(x, tuple) and isinstance(y, tuple):
        return len(x) == len(y) and all(_labels_match(s, t, atol) for s, t in zip(x, y))
    if isinstance(x, numbers.Real) and isinstance(y, numbers.Real):
        return abs(float(x) - float(y)) <= atol
    return x == y
