"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 mathematical refusal
(e.g. a non-commuting range), 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from typing import Callable, Sequence

import numpy as np

from . import fileio
from .config import Tolerances, tolerances
from .effect_algebra import AxiomViolation
from .errors import NonCommuting, RefusalError, SynapticError, ValidationError
from .matrix_core import (
    HermitianElement,
    absolute,
    carrier,
    element_from_resolution,
    functional_calculus,
    jordan_product,
    order_unit_norm,
    spectral_projection,
    spectral_resolution,
    square_root,
)
from .observables import (
    element_of_observable,
    f_function,
    g_function,
    joint_spectral_measure,
    observable_distance,
    observable_of_element,
)
from .smearing import decompose_commuting, pushforward, smear, smearing_residual, smearing_state_residuals
from .states import distribution, eigenvector_states, norm_via_states, spanning_states

EXIT_OK, EXIT_INVALID, EXIT_REFUSED, EXIT_IO = 0, 1, 2, 3


@dataclasses.dataclass(frozen=True)
class RunConfig:
    tolerances: Tolerances = Tolerances()
    seed: int = 0
    output_format: str = "text"


class Report:
    """Accumulates a structured document and matching text lines."""

    def __init__(self, command: str):
        self.doc: dict = {"command": command}
        self.lines: list[str] = []

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            return fileio.dumps(self.doc)
        return "\n".join(self.lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _matrix_text(a: HermitianElement, indent: str = "    ") -> list[str]:
    m = a.matrix
    real = not np.any(np.abs(m.imag) > 1e-15)
    rows = []
    for r in m:
        cells = [f"{v.real:+.6f}" if real else f"{v.real:+.4f}{v.imag:+.4f}j" for v in r]
        rows.append(indent + " ".join(cells))
    return rows


# -- spectral ---------------------------------------------------------------

def cmd_spectral(args, cfg: RunConfig) -> tuple[Report, int]:
    a = fileio.load_matrix(args.matrix)
    res = spectral_resolution(a)
    recon = element_from_resolution(res)
    residual = a.distance(recon)
    route_gap = max(res.at(lam).distance(spectral_projection(a, lam)) for lam in res.breakpoints)
    rep = Report("spectral")
    rep.doc.update(
        dim=a.dim,
        breakpoints=list(res.breakpoints),
        lower=res.lower,
        upper=res.upper,
        steps=[fileio.matrix_to_doc(p) for p in res.steps],
        ranks=[int(round(p.trace())) for p in res.increments()],
        reconstruction_residual=residual,
        carrier_route_gap=route_gap,
        norm=order_unit_norm(a),
    )
    rep.text(f"dimension      {a.dim}")
    rep.text(f"breakpoints    {', '.join(_fmt(t) for t in res.breakpoints)}")
    rep.text(f"L_a, U_a       {_fmt(res.lower)}, {_fmt(res.upper)}")
    rep.text(f"norm           {_fmt(order_unit_norm(a))}")
    for lam, p, dp in zip(res.breakpoints, res.steps, res.increments()):
        rep.text(f"p({_fmt(lam)})  jump rank {int(round(dp.trace()))}")
        rep.lines.extend(_matrix_text(p))
    rep.text(f"reconstruction residual  {residual:.3e}")
    rep.text(f"carrier-route gap        {route_gap:.3e}")
    return rep, EXIT_OK


# -- smear ------------------------------------------------------------------

def cmd_smear(args, cfg: RunConfig) -> tuple[Report, int]:
    xi = fileio.load_observable(args.observable)
    nu = fileio.load_kernel(args.kernel)
    eta = smear(xi, nu, certify=False)
    per_state = [float(r) for r in smearing_state_residuals(xi, nu, eta)]
    worst = max(per_state)
    tol = cfg.tolerances.proj * max(1, len(xi))
    ok = worst <= tol
    rep = Report("smear")
    rep.doc["observable"] = fileio.observable_to_doc(eta)
    rep.doc["verification"] = {
        "states": len(per_state),
        "per_state_residual": per_state,
        "max_residual": worst,
        "tolerance": tol,
        "pass": ok,
    }
    rep.doc["sharp"] = eta.is_sharp()
    if args.out:
        fileio.write(args.out, fileio.observable_to_doc(eta))
    rep.text(f"smeared observable: {len(eta)} outcomes, sharp={eta.is_sharp()}")
    for y, e in eta.items():
        rep.text(f"  outcome {y!r}")
        rep.lines.extend(_matrix_text(e))
    rep.text(f"state identity on {len(per_state)} spanning states: max residual {worst:.3e} "
             f"-> {'PASS' if ok else 'FAIL'}")
    if args.out:
        rep.text(f"written to {args.out}")
    return rep, EXIT_OK if ok else EXIT_INVALID


# -- decompose --------------------------------------------------------------

def _refusal(rep: Report, exc: NonCommuting) -> None:
    rep.doc["refusal"] = {
        "reason": type(exc).__name__,
        "pair": list(exc.pair),
        "commutator_norm": exc.norm,
    }
    rep.text(f"REFUSED: {exc}")


def cmd_decompose(args, cfg: RunConfig) -> tuple[Report, int]:
    eta = fileio.load_observable(args.observable)
    rep = Report("decompose")
    try:
        sharp, kernel = decompose_commuting(eta, seed=cfg.seed)
    except NonCommuting as exc:
        _refusal(rep, exc)
        return rep, EXIT_REFUSED
    back = smear(sharp, kernel)
    residual = observable_distance(back, eta)
    rep.doc["sharp"] = fileio.observable_to_doc(sharp)
    rep.doc["kernel"] = fileio.kernel_to_doc(kernel)
    rep.doc["round_trip_residual"] = residual
    rep.doc["deterministic_kernel"] = bool(np.all((kernel.rows == 0) | (kernel.rows == 1)))
    if args.out_sharp:
        fileio.write(args.out_sharp, fileio.observable_to_doc(sharp))
    if args.out_kernel:
        fileio.write(args.out_kernel, fileio.kernel_to_doc(kernel))
    rep.text(f"sharp observable with {len(sharp)} joint atoms")
    for x, p in sharp.items():
        rep.text(f"  atom {x}: rank {int(round(p.trace()))}")
    rep.text("kernel rows (nu(x, {y})):")
    for x, row in zip(kernel.source, kernel.rows):
        rep.text(f"  {x}: " + " ".join(_fmt(v) for v in row))
    rep.text(f"round-trip residual {residual:.3e}")
    return rep, EXIT_OK


# -- funcalc ----------------------------------------------------------------

_NAMED: dict[str, Callable[[float], float]] = {
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
    "square": lambda t: t * t,
    "inverse": lambda t: 1 / t,
    "sign": lambda t: float(np.sign(t)),
    "pos": lambda t: max(t, 0.0),
    "step": lambda t: 1.0 if t > 0 else 0.0,
}


def parse_function(spec: str) -> Callable[[float], float]:
    """``exp``, ``log``, ..., ``poly:c0,c1,...`` (ascending coefficients) or ``pow:p``."""
    if spec in _NAMED:
        return _NAMED[spec]
    kind, _, arg = spec.partition(":")
    try:
        if kind == "poly":
            coeffs = [float(c) for c in arg.split(",")]
            return lambda t: float(sum(c * t**k for k, c in enumerate(coeffs)))
        if kind == "pow":
            p = float(arg)
            return lambda t: math.pow(t, p)
    except ValueError:
        pass
    raise ValidationError(f"unknown function {spec!r}; use one of {sorted(_NAMED)}, poly:c0,c1,..., pow:p")


def cmd_funcalc(args, cfg: RunConfig) -> tuple[Report, int]:
    a = fileio.load_matrix(args.matrix)
    f = parse_function(args.fn)
    fa = functional_calculus(a, f)
    rep = Report("funcalc")
    rep.doc["function"] = args.fn
    rep.doc["matrix"] = fileio.matrix_to_doc(fa)
    rep.doc["commutes_with_input"] = bool(np.allclose(fa.matrix @ a.matrix, a.matrix @ fa.matrix, atol=1e-9))
    if args.out:
        fileio.write(args.out, fileio.matrix_to_doc(fa))
    rep.text(f"{args.fn}(a) =")
    rep.lines.extend(_matrix_text(fa))
    return rep, EXIT_OK


# -- joint ------------------------------------------------------------------

_G: dict[str, Callable[..., float]] = {
    "sum": lambda *t: float(sum(t)),
    "product": lambda *t: float(np.prod(t)),
    "max": lambda *t: float(max(t)),
    "min": lambda *t: float(min(t)),
    "first": lambda *t: float(t[0]),
}


def _g_reference(name: str, elements: Sequence[HermitianElement]) -> HermitianElement | None:
    if name == "sum":
        out = elements[0]
        for e in elements[1:]:
            out = out + e
        return out
    if name == "product":
        out = elements[0]
        for e in elements[1:]:
            out = jordan_product(out, e)
        return out
    if name == "first":
        return elements[0]
    return None


def cmd_joint(args, cfg: RunConfig) -> tuple[Report, int]:
    elements = [fileio.load_matrix(p) for p in args.matrices]
    observables = [observable_of_element(a) for a in elements]
    rep = Report("joint")
    try:
        joint = joint_spectral_measure(*observables)
    except NonCommuting as exc:
        _refusal(rep, exc)
        return rep, EXIT_REFUSED
    G = _G[args.g]
    g_obs = g_function(joint, G)
    rep.doc["joint"] = fileio.observable_to_doc(joint)
    rep.doc["g"] = args.g
    rep.doc["g_function"] = fileio.observable_to_doc(g_obs)
    rep.text(f"joint spectral measure: {len(joint)} atoms")
    for t, p in joint.items():
        rep.text(f"  {tuple(_fmt(v) for v in t)}: rank {int(round(p.trace()))}")
    rep.text(f"G = {args.g}: values {', '.join(_fmt(v) for v in g_obs.outcomes)}")
    ref = _g_reference(args.g, elements)
    if ref is not None:
        width = cfg.tolerances.eig * max(1.0, order_unit_norm(ref))
        gap = observable_distance(g_obs, observable_of_element(ref), label_atol=10 * width)
        rep.doc["spectral_reference_gap"] = gap
        rep.text(f"gap to the spectral measure of the {args.g} element: {gap:.3e}")
    return rep, EXIT_OK


# -- ea-check ---------------------------------------------------------------

def _violation_doc(v: AxiomViolation) -> dict:
    return {"axiom": v.axiom, "witness": list(v.witness), "detail": v.detail}


def cmd_ea_check(args, cfg: RunConfig) -> tuple[Report, int]:
    raw = fileio.load_ea_raw(args.ea)
    violations = fileio.check_ea_raw(raw)
    rep = Report("ea-check")
    rep.doc["size"] = raw["size"]
    rep.doc["axioms"] = {ax: not any(v.axiom == ax for v in violations) for ax in ("EA1", "EA2", "EA3", "EA4")}
    rep.doc["violations"] = [_violation_doc(v) for v in violations]
    for ax, ok in rep.doc["axioms"].items():
        first = next((v for v in violations if v.axiom == ax), None)
        rep.text(f"{ax}: {'pass' if ok else 'FAIL, witness ' + str(first.witness)}")
    if violations:
        return rep, EXIT_INVALID
    L = fileio.ea_from_raw(raw)
    report = L.classify()
    rep.doc["classification"] = report.as_dict()
    for flag in ("is_lattice", "is_mv", "is_oml", "is_boolean", "is_orthocomplete"):
        val = getattr(report, flag)
        wit = report.witnesses.get(flag[3:])
        rep.text(f"{flag:17s} {'yes' if val else 'no'}" + (f"  (witness {wit})" if not val and wit is not None else ""))
    rep.text(f"sharp elements    {[L.labels[a] for a in report.sharp_elements]}")
    return rep, EXIT_OK


# -- verify -----------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> tuple[Report, int]:
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, bool(ok), detail))

    tol = cfg.tolerances
    for path in args.matrix or []:
        a = fileio.load_matrix(path)
        res = spectral_resolution(a)
        scale = max(1.0, order_unit_norm(a))
        r = a.distance(element_from_resolution(res))
        check(f"{path}: spectral reconstruction", r <= 1e-9 * scale, f"{r:.3e}")
        rt = spectral_resolution(element_from_resolution(res))
        same = len(rt.breakpoints) == len(res.breakpoints) and all(
            p.distance(q) <= 1e-10 * scale for p, q in zip(rt.steps, res.steps)
        )
        check(f"{path}: resolution round trip", same)
        gap = max(res.at(t).distance(spectral_projection(a, t)) for t in res.breakpoints)
        check(f"{path}: carrier route = eigenprojection route", gap <= 1e-9, f"{gap:.3e}")
        c = carrier(a)
        check(f"{path}: a = a a^o", a.distance(HermitianElement(a.matrix @ c.matrix, check=False)) <= 1e-9 * scale)
        check(f"{path}: sqrt(a o a) = |a|", square_root(jordan_product(a, a)).distance(absolute(a)) <= 1e-8 * scale)
        cert = norm_via_states(a, eigenvector_states(a))
        check(f"{path}: norm attained at eigenvector state", abs(cert.lower - cert.certified) <= 1e-10 * scale)
        xi = observable_of_element(a)
        check(f"{path}: element <-> sharp observable", element_of_observable(xi).distance(a) <= 1e-10 * scale)

    for path in args.observable or []:
        xi = fileio.load_observable(path)
        check(f"{path}: valid observable", True)
        pair = xi.noncommuting_pair()
        check(f"{path}: commuting range", pair is None, "" if pair is None else f"{pair[0]!r},{pair[1]!r}: {pair[2]:.3e}")
        if pair is None:
            sharp, kernel = decompose_commuting(xi, seed=cfg.seed)
            r = observable_distance(smear(sharp, kernel), xi)
            check(f"{path}: decompose/smear round trip", r <= 1e-9, f"{r:.3e}")
        if args.kernel:
            nu = fileio.load_kernel(args.kernel)
            if set(nu.source) == set(xi.outcomes):
                eta = smear(xi, nu, certify=False)
                r = smearing_residual(xi, nu, eta)
                check(f"{path}: smearing state identity", r <= tol.proj * max(1, len(xi)), f"{r:.3e}")
                s = spanning_states(xi.dim)[-1]
                gap = float(np.abs(distribution(s, eta) - pushforward(nu, distribution(s, xi))).max())
                check(f"{path}: distribution of smearing = pushforward", gap <= 1e-10, f"{gap:.3e}")
                fx = f_function(xi, lambda x: 0)
                check(f"{path}: constant f-function is trivial", np.allclose(fx.atoms[0].matrix, np.eye(xi.dim)))

    if args.ea:
        raw = fileio.load_ea_raw(args.ea)
        violations = fileio.check_ea_raw(raw)
        check(f"{args.ea}: effect algebra axioms", not violations,
              "; ".join(str(v) for v in violations[:3]))
        if not violations:
            L = fileio.ea_from_raw(raw)
            perp_ok = all(L.orthogonal(a, b) == L.leq(a, L.prime(b)) for a in L.elements for b in L.elements)
            check(f"{args.ea}: a perp b iff a <= b'", perp_ok)

    for path in args.state or []:
        s = fileio.load_state(path)
        check(f"{path}: density state", True, f"trace {s.W.trace():.12g}")

    rep = Report("verify")
    rep.doc["checks"] = [{"name": n, "pass": ok, "detail": d} for n, ok, d in checks]
    rep.doc["all_pass"] = all(ok for _, ok, _ in checks)
    for n, ok, d in checks:
        rep.text(f"[{'PASS' if ok else 'FAIL'}] {n}" + (f"  ({d})" if d else ""))
    return rep, EXIT_OK if rep.doc["all_pass"] else EXIT_INVALID


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="hermiticity/projection/commutation tolerance (default 1e-9)")
    common.add_argument("--tol-eig", type=float, default=None,
                        help="relative eigenvalue clustering width (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised steps (default 0)")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    p = argparse.ArgumentParser(prog="synaptic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectral", parents=[common], help="spectral resolution of a matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("smear", parents=[common], help="smear an observable by a kernel")
    s.add_argument("observable")
    s.add_argument("kernel")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_smear)

    s = sub.add_parser("decompose", parents=[common], help="sharp observable + kernel for a commuting range")
    s.add_argument("observable")
    s.add_argument("--out-sharp")
    s.add_argument("--out-kernel")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("funcalc", parents=[common], help="apply a real function to a matrix")
    s.add_argument("matrix")
    s.add_argument("--fn", required=True, help="exp, log, sqrt, abs, square, inverse, sign, pos, step, poly:c0,c1,..., pow:p")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_funcalc)

    s = sub.add_parser("joint", parents=[common], help="joint spectral measure and a G-function")
    s.add_argument("matrices", nargs="+")
    s.add_argument("--g", choices=sorted(_G), default="sum")
    s.set_defaults(func=cmd_joint)

    s = sub.add_parser("ea-check", parents=[common], help="check effect-algebra axioms and classify")
    s.add_argument("ea")
    s.set_defaults(func=cmd_ea_check)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite on input files")
    s.add_argument("--matrix", action="append")
    s.add_argument("--observable", action="append")
    s.add_argument("--kernel")
    s.add_argument("--ea")
    s.add_argument("--state", action="append")
    s.set_defaults(func=cmd_verify)
    return p


def _error_doc(command: str, exc: Exception, cfg: RunConfig) -> None:
    if cfg.output_format == "structured":
        sys.stdout.write(fileio.dumps({"command": command, "error": type(exc).__name__, "message": str(exc)}))


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, which is the refusal code here
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    overrides = {}
    if args.tol is not None:
        overrides.update(herm=args.tol, proj=args.tol, comm=args.tol)
    if args.tol_eig is not None:
        overrides["eig"] = args.tol_eig
    try:
        tol = dataclasses.replace(Tolerances(), **overrides)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    cfg = RunConfig(tolerances=tol, seed=args.seed, output_format=args.format)
    try:
        with tolerances(tol):
            rep, code = args.func(args, cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RefusalError as exc:
        _error_doc(args.command, exc, cfg)
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except SynapticError as exc:
        _error_doc(args.command, exc, cfg)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(rep.render(cfg.output_format))
    return code


if __name__ == "__main__":
    sys.exit(main())
