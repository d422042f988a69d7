"""Regenerate the sample corpus: ``python3 samples/generate.py``."""
from pathlib import Path

import numpy as np

from synaptic import fileio
from synaptic.effect_algebra import boolean_algebra, chain, mo
from synaptic.matrix_core import HermitianElement
from synaptic.observables import Observable
from synaptic.sampling import random_hermitian, random_projection, random_unitary, trine_atoms
from synaptic.smearing import binary_symmetric_kernel, identity_kernel, validate_kernel
from synaptic.states import random_mixed_state

HERE = Path(__file__).parent


def put(name, doc):
    fileio.write(HERE / name, doc)


def main():
    rng = np.random.default_rng(7)
    m = fileio.matrix_to_doc

    put("diag1225.json", m(HermitianElement.diag([1, 2, 2, 5])))
    put("hermitian4.json", m(random_hermitian(rng, 4)))
    put("projection3.json", m(random_projection(rng, 3, 2)))
    put("not_hermitian.json", {"dim": 2, "re": [[1, 2], [0, 1]]})

    u = random_unitary(rng, 4)
    mk = lambda w: HermitianElement((u * w) @ u.conj().T)  # noqa: E731
    put("commuting_a.json", m(mk([1, 1, 2, 3])))
    put("commuting_b.json", m(mk([0, 2, 2, -1])))

    p = random_projection(rng, 2, 1)
    q = HermitianElement.identity(2) - p
    put("pvm2.json", fileio.observable_to_doc(Observable([0, 1], [p, q])))
    put("atoms/e1.json", m(HermitianElement.diag([1, 0, 0])))
    put("atoms/e23.json", m(HermitianElement.diag([0, 1, 1])))
    put("pvm3_by_path.json", {"outcomes": ["low", "high"], "atoms": ["atoms/e1.json", "atoms/e23.json"]})
    put("diag_povm.json", fileio.observable_to_doc(
        Observable(["u", "v"], [HermitianElement.diag([0.2, 0.7]), HermitianElement.diag([0.8, 0.3])])))
    put("trine.json", fileio.observable_to_doc(Observable([0, 1, 2], trine_atoms())))
    put("with_null.json", fileio.observable_to_doc(Observable(
        ["a", "b", "c"], [HermitianElement.diag([1, 0]), HermitianElement.zero(2), HermitianElement.diag([0, 1])])))

    put("kernel_identity.json", fileio.kernel_to_doc(identity_kernel([0, 1])))
    put("kernel_bsc.json", fileio.kernel_to_doc(binary_symmetric_kernel(0.1)))
    put("kernel_bad.json", {"source": [0, 1], "target": [0, 1], "rows": [[1, 0], [0.5, 0.6]]})
    put("kernel_weak.json", fileio.kernel_to_doc(validate_kernel(
        [[0.7, 0.3], [2, -1], [0.1, 0.9]], source=["a", "b", "c"], target=["x", "y"], null=["b"])))

    put("ea_bool2.json", fileio.ea_to_doc(boolean_algebra(2)))
    put("ea_bool3.json", fileio.ea_to_doc(boolean_algebra(3)))
    put("ea_chain2.json", fileio.ea_to_doc(chain(2)))
    put("ea_mo2.json", fileio.ea_to_doc(mo(2)))
    # 1/2 has no orthosupplement: 1/2 (+) 1/2 is missing
    broken = [t for t in chain(2).osum_triples() if t != (1, 1, 2)]
    put("ea_broken.json", {"size": 3, "zero": 0, "one": 2, "osum": [list(t) for t in broken]})

    put("state3.json", m(random_mixed_state(rng, 3).W))


if __name__ == "__main__":
    main()
