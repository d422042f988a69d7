
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from synaptic.errors import (
    DimensionMismatch,
    IdealMismatch,
    KernelViolation,
    NonCommutingInput,
    NonCommutingRange,
    ValidationError,
)
from synaptic.matrix_core import HermitianElement, Projection, is_effect, spectral_resolution
from synaptic.observables import Observable, RealObservable, f_function, observable_distance
from synaptic.sampling import (
    random_commuting_pair,
    random_hermitian,
    random_projection,
    random_pvm_atoms,
    random_stochastic,
    trine_atoms,
)
from synaptic.smearing import (
    MarkovKernel,
    WeakMarkovKernel,
    binary_symmetric_kernel,
    constant_kernel,
    decompose_commuting,
    deterministic_kernel,
    finite_loomis_sikorski,
    identity_kernel,
    integrate,
    kernel_equiv,
    pushforward,
    smear,
    smearing_residual,
    validate_kernel,
)

seeds = st.integers(0, 2**32 - 1)


def random_pvm(rng, dim, k):
    return Observable(range(k), random_pvm_atoms(rng, dim, k))


def convex_oracle(xi, rows):
    """eta(y) = sum_x rows[x, y] xi(x) with plain loops."""
    out = []
    for k in range(rows.shape[1]):
        m = np.zeros((xi.dim, xi.dim), dtype=complex)
        for i, e in enumerate(xi.atoms):
            m = m + rows[i, k] * e.matrix
        out.append(m)
    return out


class TestKernels:
    def test_identity_permutation_valid(self):
        nu = validate_kernel(np.eye(3)[[2, 0, 1]])
        assert nu.is_markov and isinstance(nu, MarkovKernel)

    def test_bad_row_sum(self):
        with pytest.raises(KernelViolation) as exc:
            validate_kernel([[1, 0], [0.5, 0.6]])
        assert exc.value.row == 1 and exc.value.condition == "(iii)"

    def test_out_of_range_entry(self):
        with pytest.raises(KernelViolation) as exc:
            validate_kernel([[1.5, -0.5]])
        assert exc.value.condition == "(ii)"

    def test_null_row_unconstrained(self):
        nu = validate_kernel([[1, 0], [2, -1]], source=["a", "b"], null=["b"])
        assert not nu.is_markov
        assert np.array_equal(nu.effective_rows(), [[1, 0], [0, 0]])

    def test_shape_and_label_errors(self):
        with pytest.raises(ValidationError):
            WeakMarkovKernel([0, 1], [0], [[1, 0]])
        with pytest.raises(ValidationError):
            WeakMarkovKernel([0], [0], [[1]], null=["zz"])

    def test_value(self):
        nu = binary_symmetric_kernel(0.25)
        assert nu.value(0, [0, 1]) == 1
        assert nu.value(1, [0]) == 0.25

    def test_equivalence(self):
        nu = validate_kernel([[1, 0], [0.3, 0.7]], source=["a", "b"], null=["b"])
        mangled = validate_kernel([[1, 0], [9, -9]], source=["a", "b"], null=["b"])
        assert kernel_equiv(nu, mangled)
        bumped = validate_kernel([[0.9, 0.1], [0.3, 0.7]], source=["a", "b"])
        assert not kernel_equiv(nu, bumped, ideal=["b"])
        with pytest.raises(DimensionMismatch):
            kernel_equiv(nu, identity_kernel([0, 1, 2]))


class TestPushforward:
    def test_examples(self, rng):
        p = rng.dirichlet(np.ones(4))
        assert np.allclose(pushforward(identity_kernel(range(4)), p), p)
        mu = np.array([0.1, 0.2, 0.7])
        assert np.allclose(pushforward(constant_kernel(range(4), "abc", mu), p), mu)
        assert np.allclose(pushforward(binary_symmetric_kernel(0.1), [1, 0]), [0.9, 0.1])

    def test_mass_on_null_rejected(self):
        nu = validate_kernel([[1, 0], [0, 1]], null=[1])
        with pytest.raises(ValidationError):
            pushforward(nu, [0.5, 0.5])
        assert np.allclose(pushforward(nu, [1, 0]), [1, 0])

    @given(seeds, st.integers(1, 6), st.integers(1, 6))
    def test_probability_vector(self, seed, m, k):
        rng = np.random.default_rng(seed)
        out = pushforward(validate_kernel(random_stochastic(rng, m, k)), rng.dirichlet(np.ones(m)))
        assert np.all(out >= 0) and out.sum() == pytest.approx(1, abs=1e-12)


class TestIntegrate:
    def test_indicator_and_constant(self, rng):
        xi = random_pvm(rng, 4, 3)
        for A in oracles.subsets(range(3)):
            chi = [1.0 if x in A else 0.0 for x in range(3)]
            assert integrate(xi, chi).distance(xi.evaluate(A)) <= 1e-12
        assert integrate(xi, lambda x: 1).distance(HermitianElement.identity(4)) <= 1e-9

    def test_ignores_null_atoms(self):
        xi = Observable("abc", [np.diag([1, 0]), np.zeros((2, 2)), np.diag([0, 1])])
        f = {"a": 0.3, "b": 0.0, "c": 0.9}
        g = dict(f, b=7.0)  # out of range, but on a null atom
        assert integrate(xi, f).distance(integrate(xi, g)) == 0

    def test_out_of_range(self, rng):
        with pytest.raises(ValidationError):
            integrate(random_pvm(rng, 2, 2), [0.5, 1.5])

    def test_bad_length(self, rng):
        with pytest.raises(DimensionMismatch):
            integrate(random_pvm(rng, 2, 2), [0.5])


class TestSmear:
    def test_identity_kernel(self, rng):
        xi = random_pvm(rng, 3, 3)
        assert observable_distance(smear(xi, identity_kernel(range(3))), xi) <= 1e-12

    def test_constant_kernel(self, rng):
        xi = random_pvm(rng, 3, 3)
        mu = [0.2, 0.8]
        eta = smear(xi, constant_kernel(range(3), ["u", "v"], mu))
        for y, w in zip("uv", mu):
            assert eta.atom(y).distance(w * HermitianElement.identity(3)) <= 1e-9

    @given(seeds, st.integers(1, 5), st.floats(0.01, 0.49))
    def test_binary_symmetric(self, seed, n, eps):
        rng = np.random.default_rng(seed)
        p = random_projection(rng, n, int(rng.integers(1, n + 1)) if n > 1 else 1)
        q = HermitianElement.identity(n) - p
        xi = Observable([0, 1], [p, q])
        eta = smear(xi, binary_symmetric_kernel(eps))
        assert eta.atom(0).distance((1 - eps) * p + eps * q) <= 1e-12
        assert eta.atom(1).distance(eps * p + (1 - eps) * q) <= 1e-12
        if 0 < np.trace(p.matrix).real < n:  # both p and 1 - p non-zero
            assert not eta.is_sharp()

    @given(seeds, st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
    def test_matches_convex_oracle(self, seed, n, m, k):
        rng = np.random.default_rng(seed)
        xi = random_pvm(rng, n, m)
        rows = random_stochastic(rng, m, k)
        eta = smear(xi, validate_kernel(rows))
        for e, ref in zip(eta.atoms, convex_oracle(xi, rows)):
            assert np.abs(e.matrix - ref).max() <= 1e-12
            assert is_effect(e)
        assert eta.evaluate(eta.outcomes).distance(HermitianElement.identity(n)) <= 1e-9

    def test_ideal_mismatch(self, rng):
        xi = random_pvm(rng, 2, 2)
        with pytest.raises(IdealMismatch):
            smear(xi, validate_kernel([[1, 0], [0, 1]], null=[1]))

    def test_kernel_reordered_to_observable(self, rng):
        xi = Observable("ab", random_pvm_atoms(rng, 2, 2))
        nu = validate_kernel([[0.1, 0.9], [1, 0]], source=["b", "a"])
        eta = smear(xi, nu)
        assert eta.atoms[0].distance(xi.atom("a") + 0.1 * xi.atom("b")) <= 1e-12

    def test_equivalent_kernels_same_smearing(self, rng):
        atoms = random_pvm_atoms(rng, 3, 2) + [Projection.zero(3)]
        xi = Observable(range(3), atoms)
        nu = validate_kernel([[0.5, 0.5], [0.2, 0.8], [1, 0]], null=[2])
        mu = validate_kernel([[0.5, 0.5], [0.2, 0.8], [0, 1]])
        assert kernel_equiv(nu, mu, ideal=xi.null_outcomes())
        assert observable_distance(smear(xi, nu), smear(xi, mu)) == 0

    @given(seeds, st.integers(1, 4), st.integers(1, 5))
    def test_f_functions_are_deterministic_smearings(self, seed, n, m):
        rng = np.random.default_rng(seed)
        xi = random_pvm(rng, n, m)
        f = {x: int(rng.integers(0, 3)) for x in xi.outcomes}
        lhs = f_function(xi, f)
        rhs = smear(xi, deterministic_kernel(xi.outcomes, f, target=lhs.outcomes))
        assert observable_distance(lhs, rhs) <= 1e-12

    def test_state_identity_residual_detects_perturbation(self, rng):
        xi = random_pvm(rng, 3, 3)
        nu = validate_kernel(random_stochastic(rng, 3, 2))
        eta = smear(xi, nu)
        assert smearing_residual(xi, nu, eta) <= 1e-12
        bent = list(eta.atoms)
        bent[0] = bent[0] + 1e-3 * HermitianElement.diag([1, 0, 0])
        assert smearing_residual(xi, nu, Observable(eta.outcomes, bent, check=False)) >= 1e-4


class TestLoomisSikorski:
    def test_single_element(self, rng):
        a = random_hermitian(rng, 4)
        ls = finite_loomis_sikorski([a])
        res = spectral_resolution(a)
        assert [lab[0] for lab in ls.labels] == pytest.approx(list(res.breakpoints), abs=1e-10)
        assert ls.represent(lambda t: t[0]).distance(a) <= 1e-9

    def test_element_and_square(self, rng):
        a, _ = random_commuting_pair(rng, 4)
        ls = finite_loomis_sikorski([a, HermitianElement(a.matrix @ a.matrix)])
        single = finite_loomis_sikorski([a])
        assert len(ls.labels) == len(single.labels)
        for p, q in zip(ls.projections, single.projections):
            assert p.distance(q) <= 1e-9

    def test_diagonal_example(self):
        ls = finite_loomis_sikorski([HermitianElement.diag([1, 1, 2]), HermitianElement.diag([3, 4, 4])])
        assert np.allclose(ls.labels, [(1, 3), (1, 4), (2, 4)], atol=1e-12)
        for k, p in enumerate(ls.projections):
            e = np.zeros((3, 3))
            e[k, k] = 1
            assert np.abs(p.matrix - e).max() <= 1e-12

    @given(seeds, st.integers(1, 6))
    def test_morphism(self, seed, n):
        rng = np.random.default_rng(seed)
        a, b = random_commuting_pair(rng, n)
        ls = finite_loomis_sikorski([a, b], seed=seed)
        f, g = rng.normal(size=len(ls.labels)), rng.normal(size=len(ls.labels))
        hf, hg = ls.represent(f), ls.represent(g)
        assert ls.represent(f * g).distance(HermitianElement(hf.matrix @ hg.matrix)) <= 1e-9
        assert ls.represent(np.ones(len(ls.labels))).distance(HermitianElement.identity(n)) <= 1e-9
        assert ls.represent(lambda t: t[0]).distance(a) <= 1e-9
        assert ls.represent(lambda t: t[1]).distance(b) <= 1e-9
        assert ls.sharp_observable().is_sharp()

    @given(seeds)
    def test_seed_independent(self, seed):
        a, b = random_commuting_pair(np.random.default_rng(seed), 6)
        r1 = finite_loomis_sikorski([a, b], seed=1)
        r2 = finite_loomis_sikorski([a, b], seed=99)
        assert np.allclose(r1.labels, r2.labels, atol=1e-9)
        for p, q in zip(r1.projections, r2.projections):
            assert p.distance(q) <= 1e-9

    def test_deflation_fallback(self, rng):
        a, b = random_commuting_pair(rng, 5)
        ls = finite_loomis_sikorski([a, b], retries=0)
        assert ls.represent(lambda t: t[0] + 2 * t[1]).distance(a + 2 * b) <= 1e-9

    def test_refuses_noncommuting(self):
        with pytest.raises(NonCommutingInput):
            finite_loomis_sikorski([HermitianElement([[0, 1], [1, 0]]), HermitianElement.diag([1, -1])])


class TestDecompose:
    def test_diagonal_povm(self):
        eta = Observable(["u", "v"], [np.diag([0.2, 0.7]), np.diag([0.8, 0.3])])
        sharp, nu = decompose_commuting(eta)
        assert isinstance(sharp, RealObservable) and sharp.is_sharp()
        rows = {tuple(np.round(r, 12)) for r in nu.rows}
        assert rows == {(0.2, 0.8), (0.7, 0.3)}
        # each sharp atom is a coordinate projection and its row is read off the diagonal
        for x, p in sharp.items():
            k = int(np.argmax(np.diag(p.matrix).real))
            assert np.allclose(nu.row(x), [[0.2, 0.7][k], [0.8, 0.3][k]], atol=1e-12)
        assert observable_distance(smear(sharp, nu), eta) <= 1e-12

    def test_sharp_input(self, rng):
        eta = random_pvm(rng, 4, 3)
        sharp, nu = decompose_commuting(eta)
        assert set(np.unique(np.round(nu.rows, 9))) <= {0.0, 1.0}
        assert observable_distance(smear(sharp, nu), eta) <= 1e-9

    @given(seeds, st.integers(1, 6), st.integers(1, 5), st.integers(1, 5))
    def test_round_trip(self, seed, n, m, k):
        rng = np.random.default_rng(seed)
        eta = smear(random_pvm(rng, n, m), validate_kernel(random_stochastic(rng, m, k)))
        sharp, nu = decompose_commuting(eta, seed=seed)
        assert observable_distance(smear(sharp, nu), eta) <= 1e-9

    def test_trine_refused(self):
        with pytest.raises(NonCommutingRange) as exc:
            decompose_commuting(Observable(range(3), trine_atoms()))
        assert exc.value.pair == (0, 1)
        assert exc.value.norm == pytest.approx(np.sqrt(3) / 9, abs=1e-12)
