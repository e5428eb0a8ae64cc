"""Tableau construction, Clifford updates, and basis sampling.

Correctness is cross-validated against the dense statevector module: exact
support sets, output distributions (total variation), and deterministic
replay under fixed seeds.
"""

import numpy as np
import pytest

from colorz.colex import incidence_matrix
from colorz.gf2 import BitMatrix, BitVector, MembershipSolver, solve_membership
from colorz.qsim import apply_one_qubit, build_omega_dense, dense_distribution
from colorz.stabilizer import (
    NotSelfOrthogonalError,
    SupportSampler,
    Tableau,
    apply_clifford,
    apply_clifford_all,
    css_tableau,
    sample_basis,
    sample_basis_batch,
)

from conftest import make_prism

HP_DENSE = (1 / np.sqrt(2)) * np.array([[1, 1], [1, -1]]) @ np.diag([1.0, 1.0j])


def tableaux_equal(a: Tableau, b: Tableau) -> bool:
    return (
        np.array_equal(a.xs, b.xs)
        and np.array_equal(a.zs, b.zs)
        and np.array_equal(a.phases, b.phases)
    )


class TestCssTableau:
    def test_generator_split(self, hex33):
        B = incidence_matrix(hex33)
        t = css_tableau(B)
        V, F = B.rows, B.cols
        x_rows = [i for i in range(V) if t.xs[i].any()]
        z_rows = [i for i in range(V) if not t.xs[i].any()]
        assert len(x_rows) == F - 2
        assert len(z_rows) == V - F + 2
        for i in x_rows:
            assert not t.zs[i].any(), "X-type generators carry no Z part"
        assert (t.phases == 0).all()
        assert (t.signs() == 1).all()

    def test_invariants_checked(self, hex33, sqoct44):
        for colex in (hex33, sqoct44):
            css_tableau(incidence_matrix(colex)).verify()

    def test_zero_matrix_gives_all_z(self):
        t = css_tableau(BitMatrix.zeros(4, 3))
        assert not t.xs.any()
        rng = np.random.default_rng(0)
        for _ in range(5):
            assert sample_basis(t, rng).is_zero()

    def test_rejects_non_self_orthogonal(self):
        with pytest.raises(NotSelfOrthogonalError):
            css_tableau(BitMatrix.from_dense([[1], [0]]))

    def test_all_ones_z_word_in_group(self, hex33, cube):
        # Z on every qubit stabilizes the state: all-ones lies in the span
        # of the Z-type generator z-parts (with sign +1 throughout)
        for colex in (hex33, cube):
            B = incidence_matrix(colex)
            t = css_tableau(B)
            V = B.rows
            z_rows = [i for i in range(V) if not t.xs[i].any()]
            cols = np.zeros((V, len(z_rows)), dtype=np.uint8)
            for j, i in enumerate(z_rows):
                cols[:, j] = BitVector(V, t.zs[i]).to_bits()
            ones = BitVector.from_bits([1] * V)
            assert solve_membership(BitMatrix.from_dense(cols), ones) is not None


class TestCliffordUpdates:
    def test_h_twice_identity(self, cube):
        t = css_tableau(incidence_matrix(cube))
        t2 = apply_clifford(apply_clifford(t, 3, "H"), 3, "H")
        assert tableaux_equal(t, t2)

    def test_p_fourth_power_identity(self, cube):
        t = css_tableau(incidence_matrix(cube))
        t4 = t
        for _ in range(4):
            t4 = apply_clifford(t4, 1, "P")
        assert tableaux_equal(t, t4)

    def test_z_flips_x_generator_signs(self, hex33):
        t = css_tableau(incidence_matrix(hex33))
        q = 0
        t2 = apply_clifford(t, q, "Z")
        xbit = (t.xs[:, 0] >> np.uint64(q)) & np.uint64(1)
        expected = np.where(xbit == 1, -1, 1)
        assert np.array_equal(t2.signs(), expected)
        assert np.array_equal(t2.xs, t.xs) and np.array_equal(t2.zs, t.zs)

    def test_z_equals_p_squared(self, cube):
        t = css_tableau(incidence_matrix(cube))
        assert tableaux_equal(
            apply_clifford(t, 2, "Z"), apply_clifford(apply_clifford(t, 2, "P"), 2, "P")
        )

    def test_gates_preserve_invariants(self, cube):
        t = css_tableau(incidence_matrix(cube))
        for gate in ("H", "P", "Z", "HP"):
            apply_clifford(t, 0, gate).verify()

    def test_apply_all_matches_per_qubit(self, cube):
        t = css_tableau(incidence_matrix(cube))
        expected = t
        for q in range(t.num_qubits):
            expected = apply_clifford(expected, q, "HP")
        assert tableaux_equal(apply_clifford_all(t, "HP"), expected)

    def test_hp_rotated_structure(self, hex33):
        # X(u) generators become X(u)Z(u) with sign (-1)^(|u|/2)
        B = incidence_matrix(hex33)
        t = css_tableau(B)
        tphi = apply_clifford_all(t, "HP")
        tphi.verify()
        for i in range(t.num_qubits):
            if t.xs[i].any():
                u_weight = int(np.bitwise_count(t.xs[i]).sum())
                assert np.array_equal(tphi.xs[i], t.xs[i])
                assert np.array_equal(tphi.zs[i], t.xs[i])
                assert tphi.phases[i] == u_weight % 4

    def test_bad_arguments(self, cube):
        t = css_tableau(incidence_matrix(cube))
        with pytest.raises(ValueError):
            apply_clifford(t, 99, "H")
        with pytest.raises(ValueError):
            apply_clifford(t, 0, "CNOT")


class TestSampling:
    def test_codeword_membership(self, hex33):
        B = incidence_matrix(hex33)
        t = css_tableau(B)
        solver = MembershipSolver(B)
        rng = np.random.default_rng(42)
        for _ in range(300):
            assert solver.contains(sample_basis(t, rng))

    def test_seed_determinism(self, hex33):
        t = css_tableau(incidence_matrix(hex33))
        runs = []
        for _ in range(2):
            rng = np.random.default_rng(123)
            runs.append([sample_basis(t, rng).to_int() for _ in range(25)])
        assert runs[0] == runs[1]

    def test_source_tableau_untouched(self, cube):
        t = css_tableau(incidence_matrix(cube))
        before = (t.xs.copy(), t.zs.copy(), t.phases.copy())
        sample_basis(t, np.random.default_rng(0))
        assert np.array_equal(t.xs, before[0])
        assert np.array_equal(t.zs, before[1])
        assert np.array_equal(t.phases, before[2])

    def test_batch_matches_singles(self, cube):
        t = apply_clifford_all(css_tableau(incidence_matrix(cube)), "HP")
        batch = sample_basis_batch(t, np.random.default_rng(9), 10)
        singles = []
        rng = np.random.default_rng(9)
        for _ in range(10):
            singles.append(sample_basis(t, rng).to_int())
        assert [int(w[0]) for w in batch] == singles


def rotated_dense_distribution(colex, gate_matrix):
    state = build_omega_dense(incidence_matrix(colex))
    for a in range(state.num_qubits):
        state = apply_one_qubit(state, a, gate_matrix)
    return dense_distribution(state)


class TestAgainstDenseOracle:
    def test_support_matches_dense(self):
        colex = make_prism(6)
        t = apply_clifford_all(css_tableau(incidence_matrix(colex)), "HP")
        probs = rotated_dense_distribution(colex, HP_DENSE)
        dense_support = set(np.nonzero(probs > 1e-15)[0].tolist())
        sampler = SupportSampler(t)
        assert 2**sampler.support_dim == len(dense_support)
        draws = sampler.sample(np.random.default_rng(1), 4000)[:, 0].astype(np.int64)
        assert set(draws.tolist()) <= dense_support

    def test_chp_distribution_tv(self):
        # 6-prism: support has 64 atoms; expected empirical TV at 15k draws
        # is ~0.026, far inside the 0.05 gate
        colex = make_prism(6)
        t = apply_clifford_all(css_tableau(incidence_matrix(colex)), "HP")
        probs = rotated_dense_distribution(colex, HP_DENSE)
        n = 15000
        draws = sample_basis_batch(t, np.random.default_rng(7), n)[:, 0].astype(np.int64)
        counts = np.bincount(draws, minlength=probs.shape[0]) / n
        tv = 0.5 * np.abs(counts - probs).sum()
        assert tv < 0.05

    def test_affine_distribution_tv(self):
        colex = make_prism(6)
        t = apply_clifford_all(css_tableau(incidence_matrix(colex)), "HP")
        probs = rotated_dense_distribution(colex, HP_DENSE)
        sampler = SupportSampler(t)
        n = 15000
        draws = sampler.sample(np.random.default_rng(8), n)[:, 0].astype(np.int64)
        counts = np.bincount(draws, minlength=probs.shape[0]) / n
        assert 0.5 * np.abs(counts - probs).sum() < 0.05

    def test_omega_sampling_uniform_over_code(self, cube):
        # |Omega> samples: every codeword, uniformly
        B = incidence_matrix(cube)
        t = css_tableau(B)
        probs = dense_distribution(build_omega_dense(B))
        n = 8000
        draws = sample_basis_batch(t, np.random.default_rng(3), n)[:, 0].astype(np.int64)
        counts = np.bincount(draws, minlength=probs.shape[0]) / n
        assert 0.5 * np.abs(counts - probs).sum() < 0.05
        assert set(np.nonzero(counts)[0]) <= set(np.nonzero(probs)[0])
