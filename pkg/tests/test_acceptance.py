"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
in the terminal summary (see ``conftest.py``)."""
import itertools
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import oracles
from synaptic.effect_algebra import boolean_algebra, chain, check_axioms, mo
from synaptic.errors import NonCommutingRange
from synaptic.matrix_core import HermitianElement, commutator_norm, element_from_resolution, spectral_resolution
from synaptic.observables import (
    Observable,
    g_function,
    joint_spectral_measure,
    observable_distance,
    observable_of_element,
)
from synaptic.sampling import (
    random_commuting_pair,
    random_effect,
    random_hermitian,
    random_pvm_atoms,
    random_stochastic,
    random_unitary,
    trine_atoms,
)
from synaptic.smearing import decompose_commuting, smear, smearing_residual, validate_kernel
from synaptic.states import apply, norm_via_states

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def rng_for(criterion: int) -> np.random.Generator:
    return np.random.default_rng(1000 + criterion)


def random_element(rng, n):
    """Generic spectrum half the time, integer (degenerate) spectrum otherwise."""
    if rng.random() < 0.5:
        return random_hermitian(rng, n, scale=float(rng.uniform(0.1, 10)))
    u = random_unitary(rng, n)
    w = rng.integers(-3, 4, size=n).astype(float)
    return HermitianElement((u * w) @ u.conj().T)


def random_povm(rng, dim, k):
    raw = [random_effect(rng, dim).matrix + 0.05 * np.eye(dim) for _ in range(k)]
    w, v = np.linalg.eigh(sum(raw))
    s = (v / np.sqrt(w)) @ v.conj().T
    return [HermitianElement(s @ m @ s) for m in raw]


def test_c1_spectral_fidelity(record_criterion):
    rng = rng_for(1)
    worst_recon = worst_trip = 0.0
    for _ in range(200):
        a = random_element(rng, int(rng.integers(2, 9)))
        res = spectral_resolution(a)
        b = element_from_resolution(res)
        worst_recon = max(worst_recon, a.distance(b))
        back = spectral_resolution(b)
        if len(back.breakpoints) != len(res.breakpoints):
            worst_trip = np.inf
            continue
        gap = max(
            float(np.abs(np.subtract(back.breakpoints, res.breakpoints)).max()),
            max(p.distance(q) for p, q in zip(back.steps, res.steps)),
        )
        worst_trip = max(worst_trip, gap)
    ok = worst_recon <= 1e-9 and worst_trip <= 1e-10
    record_criterion(1, "spectral fidelity", ok,
                     f"200 matrices, reconstruction {worst_recon:.2e} <= 1e-9, round trip {worst_trip:.2e} <= 1e-10")
    assert ok


def test_c2_smearing_existence_uniqueness(record_criterion):
    rng = rng_for(2)
    worst = 0.0
    weakest_break = np.inf
    for _ in range(100):
        n, m, k = int(rng.integers(2, 9)), int(rng.integers(1, 11)), int(rng.integers(1, 11))
        xi = Observable(range(m), random_pvm_atoms(rng, n, m))
        nu = validate_kernel(random_stochastic(rng, m, k))
        eta = smear(xi, nu)
        assert all(np.linalg.eigvalsh(e.matrix)[0] >= -1e-12 for e in eta.atoms)
        assert eta.evaluate(eta.outcomes).distance(HermitianElement.identity(n)) <= 1e-9
        worst = max(worst, smearing_residual(xi, nu, eta))
        for y in range(k):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            v /= np.linalg.norm(v)
            bent = list(eta.atoms)
            bent[y] = bent[y] + 1e-3 * HermitianElement(np.outer(v, v.conj()))
            broken = Observable(eta.outcomes, bent, check=False)
            weakest_break = min(weakest_break, smearing_residual(xi, nu, broken))
    ok = worst <= 1e-10 and weakest_break > 1e-10
    record_criterion(2, "smearing existence/uniqueness", ok,
                     f"100 pairs, identity residual {worst:.2e} <= 1e-10; every 1e-3 perturbation "
                     f"breaks it (smallest violation {weakest_break:.2e})")
    assert ok


def test_c3_commuting_range_equivalence(record_criterion):
    rng = rng_for(3)
    worst = 0.0
    for i in range(100):
        n, m, k = int(rng.integers(2, 9)), int(rng.integers(1, 11)), int(rng.integers(1, 11))
        eta = smear(Observable(range(m), random_pvm_atoms(rng, n, m)), validate_kernel(random_stochastic(rng, m, k)))
        sharp, nu = decompose_commuting(eta, seed=i)
        assert sharp.is_sharp()
        worst = max(worst, observable_distance(smear(sharp, nu), eta))

    cases = [Observable(range(3), trine_atoms())]
    while len(cases) < 21:
        # two outcomes always commute (b = 1 - a), so draw at least three
        n, k = int(rng.integers(2, 9)), int(rng.integers(3, 11))
        eta = Observable(range(k), random_povm(rng, n, k))
        direct = max(np.linalg.norm(e.matrix @ f.matrix - f.matrix @ e.matrix, 2)
                     for e, f in itertools.combinations(eta.atoms, 2))
        if direct > 1e-3:
            cases.append(eta)
    refused, weakest = 0, np.inf
    for eta in cases:
        try:
            decompose_commuting(eta)
        except NonCommutingRange as exc:
            x, y = exc.pair
            direct = commutator_norm(eta.atom(x), eta.atom(y))  # the witness must be real
            if abs(direct - exc.norm) <= 1e-12 and exc.norm >= 1e-3:
                refused += 1
            weakest = min(weakest, exc.norm)
    ok = worst <= 1e-9 and refused == len(cases)
    record_criterion(3, "commuting-range equivalence", ok,
                     f"100 round trips within {worst:.2e} <= 1e-9; {refused}/{len(cases)} non-commuting POVMs "
                     f"refused with witness >= 1e-3 (smallest {weakest:.3g})")
    assert ok


def test_c4_g_function_calculus(record_criterion):
    rng = rng_for(4)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(2, 9))
        if i % 2:
            a, b = random_commuting_pair(rng, n)
        else:  # generic spectra in a common basis
            u = random_unitary(rng, n)
            a, b = (HermitianElement((u * rng.normal(size=n)) @ u.conj().T) for _ in range(2))
        joint = joint_spectral_measure(observable_of_element(a), observable_of_element(b))
        s = g_function(joint, lambda x, y: x + y)
        p = g_function(joint, lambda x, y: x * y)
        ab = HermitianElement(a.matrix @ b.matrix, check=False)
        width = 1e-8 * max(1.0, (a + b).norm(), ab.norm())
        worst = max(worst,
                    observable_distance(s, observable_of_element(a + b), label_atol=10 * width),
                    observable_distance(p, observable_of_element(ab), label_atol=10 * width))
    ok = worst <= 1e-9
    record_criterion(4, "G-function calculus", ok, f"100 commuting pairs, sum/product atoms within {worst:.2e} <= 1e-9")
    assert ok


def test_c5_kernel_equivalence(record_criterion):
    rng = rng_for(5)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        live = int(rng.integers(1, n + 1))
        dead = int(rng.integers(1, 11 - live))
        atoms = list(random_pvm_atoms(rng, n, live)) + [HermitianElement.zero(n)] * dead
        order = rng.permutation(live + dead)
        xi = Observable(range(live + dead), [atoms[j] for j in order])
        null = sorted(xi.null_outcomes())
        k = int(rng.integers(1, 11))
        rows = random_stochastic(rng, live + dead, k)
        other = rows.copy()
        other[null] = rng.normal(size=(len(null), k)) * 5  # arbitrary junk on null rows
        nu = validate_kernel(rows)
        mu = validate_kernel(other, null=null)
        e1, e2 = smear(xi, nu), smear(xi, mu)
        worst = max(worst, max(float(np.abs(a.matrix - b.matrix).max()) for a, b in zip(e1.atoms, e2.atoms)))
    ok = worst <= 1e-12
    record_criterion(5, "kernel equivalence", ok, f"50 pairs differing on null atoms, smearings differ by {worst:.1e} <= 1e-12")
    assert ok


# -- criterion 6 ------------------------------------------------------------

EXPECTED = {
    # (lattice, MV, OML, Boolean)
    "2^1": (boolean_algebra(1), (True, True, True, True)),
    "2^2": (boolean_algebra(2), (True, True, True, True)),
    "2^3": (boolean_algebra(3), (True, True, True, True)),
    "1/2-chain": (chain(2), (True, True, False, False)),
    "MO2": (mo(2), (True, False, True, False)),
}


def _corruptions(L):
    d = {(i, j): k for i, j, k in L.osum_triples()}
    for i, j in itertools.product(L.elements, repeat=2):
        cur = d.get((i, j))
        for alt in [*L.elements, None]:
            if alt == cur:
                continue
            e = dict(d)
            if alt is None:
                del e[(i, j)]
            else:
                e[(i, j)] = alt
            yield cur is not None, [(a, b, c) for (a, b), c in e.items()]


def _c6_survey():
    out = {}
    for name, (L, flags) in EXPECTED.items():
        r = L.classify()
        classified = (r.is_lattice, r.is_mv, r.is_oml, r.is_boolean) == flags
        total = detected = genuine = defined_total = defined_detected = valid_missed = 0
        for on_defined, triples in _corruptions(L):
            total += 1
            defined_total += on_defined
            v = check_axioms(L.size, L.zero, L.one, triples)
            if v:
                detected += 1
                defined_detected += on_defined
                genuine += all(oracles.witness_is_genuine(triples, L.zero, L.one, x.axiom, x.witness, L.size) for x in v)
            else:
                valid_missed += oracles.is_effect_algebra(triples, L.size, L.zero, L.one)
        out[name] = dict(classified=classified, total=total, detected=detected, genuine=genuine,
                         defined_total=defined_total, defined_detected=defined_detected, valid_missed=valid_missed)
    return out


SURVEY = _c6_survey()


def test_c6_classification_and_provable_detection():
    """Everything in criterion 6 that can hold: exact classification, every
    corruption of a defined entry caught, every witness genuine, and every
    undetected corruption a valid effect algebra (so no checker could flag it)."""
    for name, s in SURVEY.items():
        assert s["classified"], name
        assert s["defined_detected"] == s["defined_total"], name
        assert s["genuine"] == s["detected"], name
        assert s["detected"] + s["valid_missed"] == s["total"], name


@pytest.mark.xfail(strict=True, reason="a (+) a := a' on 2^2 yields the valid 4-chain; literal 100% is unattainable")
def test_c6_effect_algebra_verification(record_criterion):
    b22 = SURVEY["2^2"]
    classified = all(s["classified"] for s in SURVEY.values())
    all_caught = all(s["detected"] == s["total"] and s["genuine"] == s["detected"] for s in SURVEY.values())
    ok = classified and all_caught
    record_criterion(6, "effect-algebra verification", ok,
                     f"classification {'exact' if classified else 'WRONG'}; 2^2 table: {b22['detected']}/{b22['total']} "
                     f"single corruptions caught with genuine witnesses ({b22['defined_detected']}/{b22['defined_total']} "
                     f"on defined entries); the {b22['total'] - b22['detected']} missed are valid effect algebras "
                     f"(4-element chain), so 100% is unattainable")
    assert ok


def test_c7_state_norm_duality(record_criterion):
    rng = rng_for(7)
    worst_cert = worst_attain = 0.0
    for _ in range(200):
        a = random_element(rng, int(rng.integers(2, 9)))
        cert = norm_via_states(a)
        exact = float(np.abs(oracles.eigenvalues(a.matrix)).max())
        worst_cert = max(worst_cert, abs(cert.certified - exact))
        worst_attain = max(worst_attain, abs(abs(apply(cert.maximizer, a)) - cert.certified))
    ok = worst_cert <= 1e-10 and worst_attain <= 1e-10
    record_criterion(7, "state/norm duality", ok,
                     f"200 matrices, certified norm off by {worst_cert:.1e}, eigenvector state attains it to {worst_attain:.1e}")
    assert ok


CORPUS = [
    ["spectral", "diag1225.json"],
    ["spectral", "hermitian4.json"],
    ["spectral", "projection3.json"],
    ["spectral", "not_hermitian.json"],
    ["smear", "pvm2.json", "kernel_identity.json"],
    ["smear", "pvm2.json", "kernel_bsc.json"],
    ["smear", "pvm2.json", "kernel_bad.json"],
    ["smear", "with_null.json", "kernel_weak.json"],
    ["decompose", "diag_povm.json"],
    ["decompose", "pvm2.json"],
    ["decompose", "pvm3_by_path.json"],
    ["decompose", "trine.json"],
    ["decompose", "with_null.json"],
    ["funcalc", "hermitian4.json", "--fn", "exp"],
    ["funcalc", "diag1225.json", "--fn", "log"],
    ["joint", "commuting_a.json", "commuting_b.json"],
    ["joint", "commuting_a.json", "commuting_b.json", "--g", "product"],
    ["joint", "hermitian4.json", "commuting_a.json"],
    ["ea-check", "ea_bool2.json"],
    ["ea-check", "ea_bool3.json"],
    ["ea-check", "ea_chain2.json"],
    ["ea-check", "ea_mo2.json"],
    ["ea-check", "ea_broken.json"],
    ["verify", "--matrix", "hermitian4.json", "--observable", "pvm2.json", "--observable", "trine.json",
     "--kernel", "kernel_bsc.json", "--ea", "ea_mo2.json", "--state", "state3.json"],
]


def _run_corpus():
    outs = []
    for argv in CORPUS:
        proc = subprocess.run(
            [sys.executable, "-m", "synaptic", *argv, "--seed", "0", "--format", "structured"],
            cwd=SAMPLES, capture_output=True,
        )
        outs.append((proc.returncode, proc.stdout))
    return outs


def test_c8_cli_determinism(record_criterion):
    covered = {f.name for f in SAMPLES.glob("*.json")}
    used = {a for argv in CORPUS for a in argv if a.endswith(".json")}
    first, second = _run_corpus(), _run_corpus()
    same = sum(a == b for a, b in zip(first, second))
    nonempty = all(out for _, out in first)
    ok = same == len(CORPUS) and nonempty and covered <= used
    record_criterion(8, "CLI determinism", ok,
                     f"{same}/{len(CORPUS)} structured outputs byte-identical across two runs "
                     f"({len(used & covered)}/{len(covered)} corpus files exercised)")
    assert ok
