import numpy as np
import pytest

from renyi_toolkit import matcore as mc
from renyi_toolkit.states import random_hermitian_from, random_psd_from, substream


def closed_form_2x2(a, b, c):
    """Eigenvalues of [[a, b], [conj(b), c]] from the quadratic formula."""
    mid = (a + c) / 2
    rad = np.sqrt(((a - c) / 2) ** 2 + abs(b) ** 2)
    return mid - rad, mid + rad


class TestEigh:
    def test_identity(self):
        w, v = mc.eigh(np.eye(2, dtype=complex))
        assert np.allclose(w, [1.0, 1.0])
        assert np.allclose(v @ v.conj().T, np.eye(2))

    def test_already_diagonal_sorted_ascending(self):
        w, _ = mc.eigh(np.diag([3.0, 1.0]).astype(complex))
        assert np.allclose(w, [1.0, 3.0])

    def test_projector_closed_form(self):
        m = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        w, v = mc.eigh(m)
        lo, hi = closed_form_2x2(0.5, 0.5, 0.5)
        assert np.allclose(w, [lo, hi], atol=1e-14)
        top = v[:, 1]
        expected = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(np.vdot(top, expected)) - 1) < 1e-12

    def test_random_2x2_against_quadratic_oracle(self):
        rng = substream(100)
        for _ in range(50):
            m = random_hermitian_from(rng, 2).mat
            w, _ = mc.eigh(m)
            lo, hi = closed_form_2x2(m[0, 0].real, m[0, 1], m[1, 1].real)
            assert np.allclose(w, [lo, hi], atol=1e-12)


class TestEighJacobi:
    def test_agrees_with_lapack_small_dims(self):
        rng = substream(101)
        for dim in (2, 3, 4, 8, 16):
            for _ in range(10):
                m = random_hermitian_from(rng, dim).mat
                wj, vj = mc.eigh_jacobi(m)
                wl, _ = mc.eigh(m)
                assert np.abs(wj - wl).max() <= 1e-12 * max(1, np.abs(wl).max())
                recon = (vj * wj) @ vj.conj().T
                assert np.abs(recon - m).max() <= 1e-10 * max(1, np.abs(m).max())
                assert np.abs(vj.conj().T @ vj - np.eye(dim)).max() <= 1e-10

    def test_dim_64_converges(self):
        rng = substream(102)
        m = random_hermitian_from(rng, 64).mat
        wj, vj = mc.eigh_jacobi(m)
        assert np.abs(np.sort(wj) - np.linalg.eigvalsh(m)).max() < 1e-10

    def test_iteration_cap_raises(self):
        rng = substream(103)
        m = random_hermitian_from(rng, 4).mat
        with pytest.raises(mc.ConvergenceError):
            mc.eigh_jacobi(m, max_sweeps=0)


class TestMatPow:
    def test_square_root_with_kernel(self):
        out = mc.mat_pow(np.diag([4.0, 0.0]).astype(complex), 0.5)
        assert np.allclose(out.mat, np.diag([2.0, 0.0]))

    def test_generalized_inverse(self):
        out = mc.mat_pow(np.diag([4.0, 0.0]).astype(complex), -1.0)
        assert np.allclose(out.mat, np.diag([0.25, 0.0]))

    def test_zeroth_power_is_support_projector(self):
        out = mc.mat_pow(np.diag([4.0, 0.0]).astype(complex), 0.0)
        assert np.allclose(out.mat, np.diag([1.0, 0.0]))

    def test_projector_idempotent_under_square(self):
        p = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        assert np.abs(mc.mat_pow(p, 2.0).mat - p).max() < 1e-14

    def test_rejects_negative_definite(self):
        with pytest.raises(mc.MatrixError):
            mc.mat_pow(np.diag([1.0, -0.5]).astype(complex), 0.5)

    def test_power_composition_on_support(self):
        rng = substream(104)
        for p, q in [(0.5, 2.0), (2.0, -0.5), (1.0 / 3, 3.0), (-1.0, -1.0)]:
            m = random_psd_from(rng, 4, rank=3)
            twice = mc.mat_pow(mc.mat_pow(m, p), q)
            once = mc.mat_pow(m, p * q)
            assert np.abs(twice.mat - once.mat).max() <= 1e-9 * max(
                1, np.abs(once.mat).max()
            )


class TestSchattenNorm:
    def test_identity_frobenius(self):
        assert mc.schatten_norm(np.eye(3, dtype=complex), 2) == pytest.approx(np.sqrt(3))

    def test_trace_and_operator_norms(self):
        m = np.diag([3.0, 4.0]).astype(complex)
        assert mc.schatten_norm(m, 1) == pytest.approx(7.0)
        assert mc.schatten_norm(m, np.inf) == pytest.approx(4.0)

    def test_doubled_exponent_identity(self):
        rng = substream(105)
        for p in (0.5, 1.0, 2.0):
            l_mat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            lhs = mc.schatten_norm(l_mat, 2 * p) ** 2
            rhs = mc.schatten_norm(l_mat @ l_mat.conj().T, p)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_unitary_invariance(self):
        rng = substream(106)
        for _ in range(20):
            l_mat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            _, u = mc.eigh(random_hermitian_from(rng, 4))
            _, v = mc.eigh(random_hermitian_from(rng, 4))
            for p in (0.5, 1.0, 2.0, np.inf):
                assert mc.schatten_norm(u @ l_mat @ v, p) == pytest.approx(
                    mc.schatten_norm(l_mat, p), rel=1e-9, abs=1e-9
                )

    def test_generalized_hoelder(self):
        rng = substream(107)
        for _ in range(50):
            mats = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3)]
            inv_s = 0.0
            exps = []
            for _ in range(3):
                e = float(rng.uniform(1.0, 6.0))
                exps.append(e)
                inv_s += 1.0 / e
            s = 1.0 / inv_s
            lhs = mc.schatten_norm(mats[0] @ mats[1] @ mats[2], s)
            rhs = np.prod([mc.schatten_norm(m, e) for m, e in zip(mats, exps)])
            assert lhs <= rhs * (1 + 1e-9)

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            mc.schatten_norm(np.eye(2, dtype=complex), 0.0)


class TestTensorAndPartialTrace:
    def test_kron_diagonals(self):
        out = mc.tensor(np.eye(2, dtype=complex), np.diag([2.0, 3.0]).astype(complex))
        assert np.allclose(np.diag(out.mat), [2, 3, 2, 3])
        out = mc.tensor(np.diag([1.0, 0.0]).astype(complex), np.eye(2, dtype=complex))
        assert np.allclose(np.diag(out.mat), [1, 1, 0, 0])

    def test_trace_multiplicative(self):
        rng = substream(108)
        a = random_hermitian_from(rng, 3)
        b = random_hermitian_from(rng, 3)
        assert mc.tensor(a, b).trace() == pytest.approx(a.trace() * b.trace())

    def test_product_state_partial_trace(self):
        rng = substream(109)
        rho_a = random_psd_from(rng, 2)
        rho_a = mc.HermitianOperator(rho_a.mat / rho_a.trace())
        rho_b = random_psd_from(rng, 3)
        joint = mc.tensor(rho_a, rho_b)
        out = mc.partial_trace(joint, (2, 3), keep=[1])
        assert np.abs(out.mat - rho_b.mat).max() < 1e-12

    def test_maximally_entangled_marginal(self):
        phi = np.zeros(4, dtype=complex)
        phi[0] = phi[3] = 1 / np.sqrt(2)
        proj = np.outer(phi, phi.conj())
        out = mc.partial_trace(proj, (2, 2), keep=[0])
        assert np.abs(out.mat - np.eye(2) / 2).max() < 1e-14

    def test_trace_preserved(self):
        rng = substream(110)
        m = random_hermitian_from(rng, 6)
        out = mc.partial_trace(m, (2, 3), keep=[0])
        assert out.trace() == pytest.approx(m.trace())

    def test_sequential_traces_equal_full_trace(self):
        rng = substream(111)
        m = random_hermitian_from(rng, 6)
        step = mc.partial_trace(m, (2, 3), keep=[1])
        out = mc.partial_trace(step, (3,), keep=[])
        assert out.mat.reshape(()) == pytest.approx(m.trace())

    def test_inconsistent_profile_rejected(self):
        with pytest.raises(mc.DimensionError):
            mc.partial_trace(np.eye(6, dtype=complex), (2, 2), keep=[0])


class TestCommutatorNorm:
    def test_diagonal_pair_commutes(self):
        assert mc.commutator_norm(np.diag([1.0, 2.0]).astype(complex), np.diag([3.0, 4.0]).astype(complex)) == 0.0

    def test_pauli_pair(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.diag([1.0, -1.0]).astype(complex)
        assert mc.commutator_norm(x, z) == pytest.approx(2.0)

    def test_antisymmetry(self):
        rng = substream(112)
        a = random_hermitian_from(rng, 3)
        b = random_hermitian_from(rng, 3)
        assert mc.commutator_norm(a, b) == pytest.approx(mc.commutator_norm(b, a))

    def test_dimension_mismatch(self):
        with pytest.raises(mc.DimensionError):
            mc.commutator_norm(np.eye(2, dtype=complex), np.eye(3, dtype=complex))


class TestHermitianOperator:
    def test_hermitizes_on_construction(self):
        m = np.array([[1.0, 1e-14j], [0, 2.0]], dtype=complex)
        op = mc.HermitianOperator(m)
        assert np.abs(op.mat - op.mat.conj().T).max() == 0.0

    def test_rejects_non_hermitian(self):
        with pytest.raises(mc.MatrixError):
            mc.HermitianOperator(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_json_round_trip(self):
        rng = substream(113)
        m = random_hermitian_from(rng, 3).mat
        back = mc.matrix_from_json(mc.matrix_to_json(m))
        assert np.array_equal(back, m)
