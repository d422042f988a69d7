"""Finite effect algebras given by partial addition tables.

Elements are the integers ``0 .. size-1``; the table stores ``a (+) b`` or
``None`` where the sum is undefined.  Axiom checks, meets and joins are
brute force over the table and the derived order, which is ``O(size^3)``
and meant for algebras with a few dozen elements.

The second half of the module bridges to the matrix effect interval
``E = {e : 0 <= e <= 1}``, where ``e (+) f`` is defined iff ``e + f <= 1``.
"""
from __future__ import annotations

import dataclasses
import itertools
from typing import Any, Mapping, Sequence

import numpy as np

from .config import get_tolerances
from .errors import AxiomViolationError, MeetUndefined, ValidationError
from .matrix_core import (
    HermitianElement,
    _as_projection,
    as_element,
    is_effect,
    leq as matrix_leq,
    meet as projection_meet,
)

Table = tuple[tuple[int | None, ...], ...]


@dataclasses.dataclass(frozen=True)
class AxiomViolation:
    """One failed axiom instance.

    ``axiom`` is ``"EA1"`` .. ``"EA4"``; ``witness`` holds the elements that
    exhibit the failure:

    * EA1 ``(a, b)``: ``a (+) b`` defined but ``b (+) a`` missing or different.
    * EA2 ``(a, b, c)``: ``b (+) c`` and ``a (+) (b (+) c)`` defined, but
      ``(a (+) b) (+) c`` undefined or different.
    * EA3 ``(a, *complements)``: ``a`` has zero or several orthosupplements.
    * EA4 ``(a,)``: ``1 (+) a`` defined with ``a != 0``.
    """

    axiom: str
    witness: tuple[int, ...]
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.axiom} at {self.witness}" + (f" ({self.detail})" if self.detail else "")


def _normalize_table(size: int, osum) -> Table:
    if size < 1:
        raise ValidationError("effect algebra needs at least one element")
    rows: list[list[int | None]] = [[None] * size for _ in range(size)]
    triples = ((i, j, k) for (i, j), k in osum.items()) if isinstance(osum, Mapping) else osum
    for t in triples:
        i, j, k = (int(x) for x in t)
        for x in (i, j, k):
            if not 0 <= x < size:
                raise ValidationError(f"index {x} out of range in osum entry {tuple(t)}")
        if rows[i][j] is not None and rows[i][j] != k:
            raise ValidationError(f"osum entry ({i}, {j}) given twice with results {rows[i][j]} and {k}")
        rows[i][j] = k
    return tuple(tuple(r) for r in rows)


def table_to_triples(rows: Sequence[Sequence[int | None]]) -> list[tuple[int, int, int]]:
    """Convert a ``size x size`` table with ``None`` for undefined into triples."""
    return [(i, j, k) for i, r in enumerate(rows) for j, k in enumerate(r) if k is not None]


def check_axioms(size: int, zero: int, one: int, osum) -> list[AxiomViolation]:
    """All violations of EA1-EA4 in the given partial table (empty if valid).

    ``osum`` is a mapping ``{(i, j): k}`` or an iterable of ``(i, j, k)``
    triples meaning ``i (+) j = k``.  Malformed input (bad indices,
    conflicting entries) raises :class:`ValidationError` instead.
    """
    if not (0 <= zero < size and 0 <= one < size):
        raise ValidationError("zero and one must be element indices")
    return _violations(_normalize_table(size, osum), zero, one)


def _violations(t: Table, zero: int, one: int) -> list[AxiomViolation]:
    size = len(t)
    out: list[AxiomViolation] = []
    r = range(size)
    for a, b in itertools.product(r, r):
        ab = t[a][b]
        if ab is not None and t[b][a] != ab:
            out.append(AxiomViolation("EA1", (a, b), f"{a}+{b}={ab}, {b}+{a}={t[b][a]}"))
    for a, b, c in itertools.product(r, r, r):
        bc = t[b][c]
        if bc is None or t[a][bc] is None:
            continue
        ab = t[a][b]
        if ab is None or t[ab][c] != t[a][bc]:
            out.append(AxiomViolation("EA2", (a, b, c)))
    for a in r:
        comps = tuple(c for c in r if t[a][c] == one)
        if len(comps) != 1:
            out.append(AxiomViolation("EA3", (a, *comps), f"{len(comps)} orthosupplements"))
    for a in r:
        if a != zero and t[one][a] is not None:
            out.append(AxiomViolation("EA4", (a,)))
    return out


def verify_axioms(size: int, zero: int, one: int, osum, labels: Sequence[str] | None = None) -> "FiniteEffectAlgebra":
    """Validate a raw table and return the effect algebra.

    Raises
    ------
    AxiomViolationError
        Carrying the full list of :class:`AxiomViolation` records.
    """
    return FiniteEffectAlgebra(size, zero, one, osum, labels=labels)


@dataclasses.dataclass(frozen=True)
class EAState:
    """A state ``s`` given by its values on every element."""

    values: tuple[float, ...]

    def __call__(self, a: int) -> float:
        return self.values[a]


@dataclasses.dataclass(frozen=True)
class StructureReport:
    is_lattice: bool
    is_mv: bool
    is_oml: bool
    is_boolean: bool
    is_orthocomplete: bool
    sharp_elements: tuple[int, ...]
    witnesses: Mapping[str, Any]

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["sharp_elements"] = list(self.sharp_elements)
        d["witnesses"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.witnesses.items()}
        return d


class FiniteEffectAlgebra:
    """A validated finite effect algebra ``(L, (+), 0, 1)``.

    Construction runs :func:`check_axioms` and raises
    :class:`AxiomViolationError` on any failure, so every instance satisfies
    EA1-EA4.
    """

    def __init__(self, size: int, zero: int, one: int, osum, labels: Sequence[str] | None = None):
        if not (0 <= zero < size and 0 <= one < size):
            raise ValidationError("zero and one must be element indices")
        table = _normalize_table(size, osum)
        violations = _violations(table, zero, one)
        if violations:
            raise AxiomViolationError(violations)
        self.size, self.zero, self.one = size, zero, one
        self.table: Table = table
        if labels is not None and len(labels) != size:
            raise ValidationError("need one label per element")
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(size))
        self._prime = tuple(next(c for c in range(size) if table[a][c] == one) for a in range(size))
        order = np.zeros((size, size), dtype=bool)
        for a, c in itertools.product(range(size), repeat=2):
            b = table[a][c]
            if b is not None:
                order[a, b] = True
        order.flags.writeable = False
        self._order = order

    def __repr__(self) -> str:
        return f"FiniteEffectAlgebra(size={self.size}, labels={list(self.labels)})"

    @property
    def elements(self) -> range:
        return range(self.size)

    def oplus(self, a: int, b: int) -> int | None:
        return self.table[a][b]

    def orthogonal(self, a: int, b: int) -> bool:
        return self.table[a][b] is not None

    def prime(self, a: int) -> int:
        """The orthosupplement ``a'``."""
        return self._prime[a]

    def leq(self, a: int, b: int) -> bool:
        return bool(self._order[a, b])

    def ominus(self, b: int, a: int) -> int:
        """``b (-) a``, the unique ``c`` with ``a (+) c = b``."""
        for c in self.elements:
            if self.table[a][c] == b:
                return c
        raise ValueError(f"{a} is not below {b}")

    def meet(self, a: int, b: int) -> int | None:
        lower = [c for c in self.elements if self._order[c, a] and self._order[c, b]]
        for c in lower:
            if all(self._order[d, c] for d in lower):
                return c
        return None

    def join(self, a: int, b: int) -> int | None:
        upper = [c for c in self.elements if self._order[a, c] and self._order[b, c]]
        for c in upper:
            if all(self._order[c, d] for d in upper):
                return c
        return None

    def is_sharp(self, a: int) -> bool:
        """``a ^ a' = 0``.  Raises :class:`MeetUndefined` if the meet does not exist."""
        m = self.meet(a, self.prime(a))
        if m is None:
            raise MeetUndefined(a, self.prime(a))
        return m == self.zero

    def are_compatible(self, a: int, b: int) -> bool:
        """Exists ``a1, b1, g`` with ``a = a1 (+) g``, ``b = b1 (+) g`` and
        ``a1 (+) b1 (+) g`` defined."""
        t = self.table
        for g in self.elements:
            if not (self._order[g, a] and self._order[g, b]):
                continue
            a1, b1 = self.ominus(a, g), self.ominus(b, g)
            s = t[a1][b1]
            if s is not None and t[s][g] is not None:
                return True
        return False

    def classify(self) -> StructureReport:
        witnesses: dict[str, Any] = {}
        pairs = list(itertools.combinations_with_replacement(self.elements, 2))

        bad_pair = next(((a, b) for a, b in pairs if self.meet(a, b) is None or self.join(a, b) is None), None)
        is_lattice = bad_pair is None
        if not is_lattice:
            witnesses["lattice"] = bad_pair

        incompatible = next(((a, b) for a, b in pairs if not self.are_compatible(a, b)), None)
        is_mv = is_lattice and incompatible is None
        if not is_mv:
            witnesses["mv"] = incompatible if incompatible is not None else "not a lattice"

        sharp, unsharp = [], None
        for a in self.elements:
            m = self.meet(a, self.prime(a))
            if m == self.zero:
                sharp.append(a)
            elif unsharp is None:
                unsharp = a
        is_oml = is_lattice and unsharp is None
        if not is_oml:
            witnesses["oml"] = ("unsharp element", unsharp) if unsharp is not None else "not a lattice"

        is_boolean = is_mv and is_oml
        if not is_boolean:
            witnesses["boolean"] = witnesses.get("oml") if not is_oml else witnesses["mv"]
        return StructureReport(
            is_lattice=is_lattice,
            is_mv=is_mv,
            is_oml=is_oml,
            is_boolean=is_boolean,
            is_orthocomplete=True,
            sharp_elements=tuple(sharp),
            witnesses=witnesses,
        )

    # -- states -----------------------------------------------------------
    def state(self, values: Sequence[float]) -> EAState:
        """Validate ``values`` as a state: ``s(1) = 1`` and additive on defined sums."""
        v = tuple(float(x) for x in values)
        if len(v) != self.size:
            raise ValidationError("need one value per element")
        tol = get_tolerances().proj
        if any(x < -tol or x > 1 + tol for x in v):
            raise ValidationError("state values must lie in [0, 1]")
        if abs(v[self.one] - 1) > tol:
            raise ValidationError("state must take the value 1 at the unit")
        for a, b in itertools.product(self.elements, repeat=2):
            c = self.table[a][b]
            if c is not None and abs(v[c] - v[a] - v[b]) > tol:
                raise ValidationError(f"state is not additive at {a} (+) {b} = {c}")
        return EAState(v)

    def two_valued_states(self) -> list[EAState]:
        """All ``{0, 1}``-valued states, by exhaustive search (small algebras only)."""
        if self.size > 20:
            raise ValueError("exhaustive two-valued state search is limited to 20 elements")
        out = []
        for bits in itertools.product((0.0, 1.0), repeat=self.size):
            try:
                out.append(self.state(bits))
            except ValidationError:
                pass
        return out

    def states_ordering(self, states: Sequence[EAState]) -> bool:
        """``a <= b`` iff ``s(a) <= s(b)`` for every ``s`` in ``states``."""
        tol = get_tolerances().proj
        for a, b in itertools.product(self.elements, repeat=2):
            dominated = all(s(a) <= s(b) + tol for s in states)
            if dominated != self.leq(a, b):
                return False
        return True

    def states_separating(self, states: Sequence[EAState]) -> bool:
        """``s(a) = s(b)`` for every ``s`` forces ``a = b``."""
        tol = get_tolerances().proj
        for a, b in itertools.combinations(self.elements, 2):
            if all(abs(s(a) - s(b)) <= tol for s in states):
                return False
        return True

    def osum_triples(self) -> list[tuple[int, int, int]]:
        return table_to_triples(self.table)


# -- standard examples ------------------------------------------------------

def boolean_algebra(n: int) -> FiniteEffectAlgebra:
    """Subsets of ``n`` atoms as bitmasks; ``a (+) b = a | b`` for disjoint ``a, b``."""
    size = 1 << n
    osum = {(a, b): a | b for a in range(size) for b in range(size) if a & b == 0}
    labels = ["{" + ",".join(str(i) for i in range(n) if a >> i & 1) + "}" for a in range(size)]
    return FiniteEffectAlgebra(size, 0, size - 1, osum, labels=labels)


def chain(n: int) -> FiniteEffectAlgebra:
    """``{0, 1/n, ..., 1}`` with ``i/n (+) j/n = (i+j)/n`` when ``i + j <= n``.

    ``chain(2)`` is the three-element chain ``{0, 1/2, 1}``.
    """
    osum = {(i, j): i + j for i in range(n + 1) for j in range(n + 1) if i + j <= n}
    return FiniteEffectAlgebra(n + 1, 0, n, osum, labels=[f"{i}/{n}" for i in range(n + 1)])


def mo(n: int) -> FiniteEffectAlgebra:
    """``MO_n``: horizontal sum of ``n`` four-element Boolean algebras.

    Elements are ``0``, then ``a_1, a_1', ..., a_n, a_n'``, then ``1``.
    """
    size = 2 * n + 2
    one = size - 1
    osum: dict[tuple[int, int], int] = {}
    for x in range(size):
        osum[(0, x)] = x
        osum[(x, 0)] = x
    for k in range(n):
        a, b = 1 + 2 * k, 2 + 2 * k
        osum[(a, b)] = one
        osum[(b, a)] = one
    labels = ["0"] + [s for k in range(n) for s in (f"a{k + 1}", f"a{k + 1}'")] + ["1"]
    return FiniteEffectAlgebra(size, 0, one, osum, labels=labels)


# -- matrix effect interval -------------------------------------------------

def matrix_oplus(e, f) -> HermitianElement | None:
    """``e (+) f`` in the matrix interval: ``e + f`` if it is still an effect, else None."""
    e, f = as_element(e), as_element(f)
    if not (is_effect(e) and is_effect(f)):
        raise ValidationError("operands must be effects")
    s = e + f
    return s if matrix_leq(s, HermitianElement.identity(e.dim)) else None


def matrix_prime(e) -> HermitianElement:
    e = as_element(e)
    return HermitianElement.identity(e.dim) - e


def decomposition_witnesses_compatibility(e, f, g) -> bool:
    """Check that ``e = e1 + g``, ``f = f1 + g`` with ``e1 + f1 + g <= 1`` is a
    valid compatibility witness, all terms being effects."""
    e, f, g = as_element(e), as_element(f), as_element(g)
    zero = HermitianElement.zero(e.dim)
    e1, f1 = e - g, f - g
    return (
        all(matrix_leq(zero, x) for x in (e1, f1, g))
        and matrix_leq(e1 + f1 + g, HermitianElement.identity(e.dim))
    )


def projections_compatible(p, q) -> bool:
    """Effect-algebra compatibility of two projections in the matrix interval.

    For projections the only candidate common part is ``g = p ^ q`` (any
    effect below both projections is below their meet, and shrinking ``g``
    only enlarges ``e1 + f1 + g``), so the test is decided by that witness.
    """
    p, q = _as_projection(p), _as_projection(q)
    return decomposition_witnesses_compatibility(p, q, projection_meet(p, q))
