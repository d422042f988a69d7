"""JSON file formats.

Matrix
    ``{"dim": n, "re": [[...], ...], "im": [[...], ...]}``; ``im`` may be
    omitted when the matrix is real.
Density state
    A matrix document (trace one, positive).
Observable
    ``{"outcomes": [...], "atoms": [...]}`` where each atom is an inline
    matrix document or a path (relative to the observable file) of one.
    Labels are JSON scalars; arrays are read back as tuples.
Kernel
    ``{"source": [...], "target": [...], "rows": [[...]], "null": [...]}``;
    ``null`` may be omitted.
Effect algebra
    ``{"size": n, "zero": i, "one": j, "osum": [[a, b, c], ...]}`` listing
    every defined sum ``a (+) b = c`` (both orders), plus optional
    ``"labels"``.

Loaders also accept a command report that wraps the document under the
key of the same name (``"observable"``, ``"kernel"``, ...), so structured
command output can be fed straight back in.
"""
from __future__ import annotations

import json
import numbers
import os
from pathlib import Path
from typing import Any, Hashable

import numpy as np

from .effect_algebra import FiniteEffectAlgebra, check_axioms, AxiomViolation
from .errors import ValidationError
from .matrix_core import HermitianElement
from .observables import Observable, _make
from .smearing import WeakMarkovKernel, validate_kernel
from .states import DensityState


class ParseError(ValidationError):
    pass


def _read(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def dumps(doc: Any) -> str:
    return json.dumps(_clean(doc), indent=2) + "\n"


def write(path, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def _clean(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, numbers.Real):
        v = float(x) + 0.0  # drops negative zero
        return v if np.isfinite(v) else str(v)
    return x


def _unwrap(doc: Any, key: str) -> Any:
    if isinstance(doc, dict) and key in doc and isinstance(doc[key], dict):
        return doc[key]
    return doc


def _label(x: Any) -> Hashable:
    if isinstance(x, list):
        return tuple(_label(v) for v in x)
    return x


# -- matrices ---------------------------------------------------------------

def matrix_to_doc(a) -> dict:
    m = np.asarray(a.matrix if isinstance(a, HermitianElement) else a, dtype=complex)
    doc: dict[str, Any] = {"dim": m.shape[0], "re": m.real.tolist()}
    if np.any(m.imag != 0):
        doc["im"] = m.imag.tolist()
    return doc


def matrix_from_doc(doc: Any, where: str = "matrix") -> HermitianElement:
    doc = _unwrap(_unwrap(doc, "matrix"), "state")
    if not isinstance(doc, dict) or "re" not in doc:
        raise ParseError(f"{where}: expected an object with 're' (and optional 'im', 'dim')")
    try:
        re = np.array(doc["re"], dtype=float)
        im = np.array(doc["im"], dtype=float) if "im" in doc else np.zeros_like(re)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric entries ({exc})") from None
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ParseError(f"{where}: 're'/'im' must be square arrays of equal shape")
    if "dim" in doc and doc["dim"] != re.shape[0]:
        raise ParseError(f"{where}: 'dim' is {doc['dim']} but the arrays are {re.shape[0]}x{re.shape[0]}")
    return HermitianElement(re + 1j * im)


def load_matrix(path) -> HermitianElement:
    return matrix_from_doc(_read(path), str(path))


def load_state(path) -> DensityState:
    return DensityState(load_matrix(path))


# -- observables ------------------------------------------------------------

def observable_to_doc(xi: Observable) -> dict:
    return {"outcomes": list(xi.outcomes), "atoms": [matrix_to_doc(e) for e in xi.atoms]}


def observable_from_doc(doc: Any, base: str | os.PathLike = ".", where: str = "observable") -> Observable:
    doc = _unwrap(doc, "observable")
    if not isinstance(doc, dict) or "outcomes" not in doc or "atoms" not in doc:
        raise ParseError(f"{where}: expected an object with 'outcomes' and 'atoms'")
    atoms = []
    for k, ref in enumerate(doc["atoms"]):
        if isinstance(ref, str):
            atoms.append(load_matrix(Path(base) / ref))
        else:
            atoms.append(matrix_from_doc(ref, f"{where}: atom {k}"))
    labels = [_label(x) for x in doc["outcomes"]]
    xi = _make(labels, atoms)
    return type(xi)(labels, atoms)  # validating constructor


def load_observable(path) -> Observable:
    return observable_from_doc(_read(path), Path(path).parent, str(path))


# -- kernels ----------------------------------------------------------------

def kernel_to_doc(nu: WeakMarkovKernel) -> dict:
    return {
        "source": list(nu.source),
        "target": list(nu.target),
        "rows": nu.rows.tolist(),
        "null": [x for x in nu.source if x in nu.null],
    }


def kernel_from_doc(doc: Any, where: str = "kernel") -> WeakMarkovKernel:
    doc = _unwrap(doc, "kernel")
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ParseError(f"{where}: expected an object with 'rows'")
    src = [_label(x) for x in doc["source"]] if "source" in doc else None
    tgt = [_label(x) for x in doc["target"]] if "target" in doc else None
    null = [_label(x) for x in doc.get("null", [])]
    try:
        return validate_kernel(doc["rows"], src, tgt, null)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"{where}: malformed rows ({exc})") from None


def load_kernel(path) -> WeakMarkovKernel:
    return kernel_from_doc(_read(path), str(path))


# -- effect algebras --------------------------------------------------------

def ea_to_doc(L: FiniteEffectAlgebra) -> dict:
    return {
        "size": L.size,
        "zero": L.zero,
        "one": L.one,
        "labels": list(L.labels),
        "osum": [list(t) for t in L.osum_triples()],
    }


def ea_raw_from_doc(doc: Any, where: str = "effect algebra") -> dict:
    """Field dictionary ``size, zero, one, osum, labels`` without axiom checks."""
    doc = _unwrap(doc, "effect_algebra")
    try:
        raw = {
            "size": int(doc["size"]),
            "zero": int(doc["zero"]),
            "one": int(doc["one"]),
            "osum": [tuple(int(v) for v in t) for t in doc["osum"]],
            "labels": doc.get("labels"),
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: expected size, zero, one and osum triples ({exc!r})") from None
    if any(len(t) != 3 for t in raw["osum"]):
        raise ParseError(f"{where}: every osum entry must be a triple")
    return raw


def load_ea_raw(path) -> dict:
    return ea_raw_from_doc(_read(path), str(path))


def check_ea_raw(raw: dict) -> list[AxiomViolation]:
    return check_axioms(raw["size"], raw["zero"], raw["one"], raw["osum"])


def ea_from_raw(raw: dict) -> FiniteEffectAlgebra:
    return FiniteEffectAlgebra(raw["size"], raw["zero"], raw["one"], raw["osum"], labels=raw["labels"])
