import numpy as np
import pytest

from renyi_toolkit import matcore as mc
from renyi_toolkit import serialize
from renyi_toolkit import states as st


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def projector(v):
    return mc.HermitianOperator(np.outer(v, v.conj()))


class TestRandomDensity:
    def test_seed_determinism_bitwise(self):
        a = st.random_density(4, 4, seed=99)
        b = st.random_density(4, 4, seed=99)
        assert np.array_equal(a.mat, b.mat)

    def test_full_rank_positive(self):
        rho = st.random_density(5, 5, seed=1)
        assert rho.op.eig.eigenvalues[0] > 0

    def test_rank_one_is_pure(self):
        rho = st.random_density(5, 1, seed=2)
        purity = float(np.trace(rho.mat @ rho.mat).real)
        assert abs(purity - 1.0) <= 1e-10

    def test_invalid_rank_rejected(self):
        with pytest.raises(ValueError):
            st.random_density(3, 4, seed=0)

    def test_substreams_are_independent(self):
        a = st.substream(7, 0).normal(size=8)
        b = st.substream(7, 1).normal(size=8)
        assert not np.allclose(a, b)


class TestCanonicalPurification:
    def test_pure_state_purifies_to_product(self):
        rho = st.DensityOperator(projector(ket(1, 0)))
        psi = st.canonical_purification(rho)
        expected = np.zeros(4, dtype=complex)
        expected[0] = 1.0
        assert np.abs(psi.amplitudes - expected).max() < 1e-12

    def test_maximally_mixed_purifies_to_maximally_entangled(self):
        rho = st.maximally_mixed((2,))
        psi = st.canonical_purification(rho)
        expected = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        assert np.abs(psi.amplitudes - expected).max() < 1e-12

    def test_partial_trace_recovers_state(self):
        rho = st.random_density(3, seed=5)
        psi = st.canonical_purification(rho)
        assert np.abs(psi.reduce([0]).mat - rho.mat).max() < 1e-10


class TestCqState:
    def test_single_element(self):
        rho0 = st.random_density(2, seed=3)
        out = st.cq_state(st.Ensemble([1.0], (rho0,)))
        expected = np.kron(np.diag([1.0]), rho0.mat)
        assert np.abs(out.mat - expected).max() < 1e-14

    def test_diagonal_members_stay_diagonal(self):
        d0 = st.DensityOperator(mc.HermitianOperator(np.diag([0.7, 0.3]).astype(complex)))
        d1 = st.DensityOperator(mc.HermitianOperator(np.diag([0.2, 0.8]).astype(complex)))
        out = st.cq_state(st.Ensemble([0.4, 0.6], (d0, d1)))
        assert np.abs(out.mat - np.diag(np.diag(out.mat))).max() < 1e-14

    def test_marginal_is_average_state(self):
        rng = st.substream(11)
        e = st.random_ensemble_from(rng, 3, 2)
        out = st.cq_state(e)
        assert np.abs(out.reduce([1]).mat - e.average_state().mat).max() < 1e-12

    def test_block_structure_commutes_with_dephasing(self):
        rng = st.substream(12)
        e = st.random_ensemble_from(rng, 2, 3)
        out = st.cq_state(e)
        pinch = np.zeros_like(out.mat)
        n, d = out.profile
        for x in range(n):
            pinch[x * d : (x + 1) * d, x * d : (x + 1) * d] = out.mat[
                x * d : (x + 1) * d, x * d : (x + 1) * d
            ]
        assert np.abs(out.mat - pinch).max() < 1e-14


class TestClassicallyCoherentPurification:
    def test_single_pure_member_is_product(self):
        rho = st.DensityOperator(projector(ket(1, 0)))
        tau = st.classically_coherent_purification(st.Ensemble([1.0], (rho,)))
        amps = tau.amplitudes.reshape(tau.profile)
        # Only the (x=0, x'=0) slice carries weight.
        assert np.linalg.norm(amps[0, 0]) == pytest.approx(1.0)

    def test_orthogonal_pure_pair_gives_ghz_amplitudes(self):
        e = st.Ensemble(
            [0.5, 0.5],
            (st.DensityOperator(projector(ket(1, 0))), st.DensityOperator(projector(ket(0, 1)))),
        )
        tau = st.classically_coherent_purification(e)
        nonzero = np.sort(np.abs(tau.amplitudes[np.abs(tau.amplitudes) > 1e-12]))
        assert np.allclose(nonzero, [1 / np.sqrt(2)] * 2)

    def test_reductions_recover_cq_state(self):
        rng = st.substream(13)
        e = st.random_ensemble_from(rng, 3, 2)
        tau = st.classically_coherent_purification(e)
        assert np.abs(tau.reduce([0, 2]).mat - st.cq_state(e).mat).max() < 1e-12


class TestGramMatrix:
    def test_pure_two_state_overlaps(self):
        e = st.Ensemble(
            [0.5, 0.5],
            (st.DensityOperator(projector(ket(1, 0))), st.DensityOperator(projector(ket(1, 1)))),
        )
        g = st.gram_matrix(e)
        # Compress onto the purification vectors: recovers the textbook
        # overlap matrix (1/2)[[1, 1/sqrt2], [1/sqrt2, 1]].
        vecs = [np.kron(np.eye(2)[x], psi.conj()) for x, psi in ((0, ket(1, 0)), (1, ket(1, 1)))]
        compressed = np.array(
            [[np.vdot(vecs[i], g.mat @ vecs[j]) for j in range(2)] for i in range(2)]
        )
        expected = 0.5 * np.array([[1, 1 / np.sqrt(2)], [1 / np.sqrt(2), 1]])
        assert np.abs(compressed - expected).max() < 1e-12
        spectrum = np.linalg.eigvalsh(g.mat)
        nonzero = spectrum[spectrum > 1e-12]
        assert np.allclose(np.sort(nonzero), np.sort(np.linalg.eigvalsh(expected)))

    def test_diagonal_blocks_carry_probabilities(self):
        rng = st.substream(14)
        e = st.random_ensemble_from(rng, 3, 2)
        g = st.gram_matrix(e)
        d = e.state_dim
        for x, p in enumerate(e.probs):
            block = g.mat[x * d : (x + 1) * d, x * d : (x + 1) * d]
            assert np.trace(block).real == pytest.approx(p, abs=1e-12)

    def test_psd_unit_trace(self):
        rng = st.substream(15)
        e = st.random_ensemble_from(rng, 4, 2)
        g = st.gram_matrix(e)
        assert g.trace() == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(g.mat).min() > -1e-12


class TestShiftUnitary:
    def test_trivial_register(self):
        assert np.array_equal(st.shift_unitary(1), np.eye(1, dtype=complex))

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_unitarity(self, dim):
        u = st.shift_unitary(dim)
        assert np.abs(u.conj().T @ u - np.eye(dim * dim)).max() < 1e-14

    def test_concentrates_coherent_state_onto_gram(self):
        rng = st.substream(16)
        for n, d in ((2, 2), (3, 2)):
            e = st.random_ensemble_from(rng, n, d)
            tau = st.classically_coherent_purification(e).reduce([0, 1, 3])
            u = np.kron(st.shift_unitary(n), np.eye(d))
            rotated = u @ tau.mat @ u.conj().T
            g = st.gram_matrix(e)
            assert np.abs(rotated[: n * d, : n * d] - g.mat).max() < 1e-10
            assert np.abs(rotated[n * d :, :]).max() < 1e-10


class TestSerialization:
    def test_state_round_trip(self):
        rho = st.random_density(4, 2, seed=21).with_profile((2, 2))
        back = serialize.state_from_json(serialize.state_to_json(rho))
        assert np.array_equal(back.mat, rho.mat)
        assert back.profile == rho.profile

    def test_ensemble_round_trip(self):
        rng = st.substream(17)
        e = st.random_ensemble_from(rng, 3, 2)
        back = serialize.ensemble_from_json(serialize.ensemble_to_json(e))
        assert np.array_equal(back.probs, e.probs)
        for a, b in zip(back.states, e.states):
            assert np.array_equal(a.mat, b.mat)

    def test_pure_state_round_trip(self):
        psi = st.random_pure_from(st.substream(18), (2, 3))
        back = serialize.pure_state_from_json(serialize.pure_state_to_json(psi))
        assert np.array_equal(back.amplitudes, psi.amplitudes)
        assert back.profile == psi.profile


class TestValidation:
    def test_density_operator_needs_unit_trace(self):
        with pytest.raises(mc.MatrixError):
            st.DensityOperator(mc.HermitianOperator(np.eye(2, dtype=complex)))

    def test_density_operator_rejects_negative(self):
        with pytest.raises(mc.MatrixError):
            st.DensityOperator(mc.HermitianOperator(np.diag([1.5, -0.5]).astype(complex)))

    def test_ensemble_needs_matching_lengths(self):
        rho = st.random_density(2, seed=1)
        with pytest.raises(mc.DimensionError):
            st.Ensemble([0.5, 0.5], (rho,))

    def test_ensemble_needs_distribution(self):
        rho = st.random_density(2, seed=1)
        with pytest.raises(mc.MatrixError):
            st.Ensemble([0.7, 0.7], (rho, rho))

    def test_pure_state_needs_normalization(self):
        with pytest.raises(mc.MatrixError):
            st.PureState(np.array([1.0, 1.0]), (2,))
