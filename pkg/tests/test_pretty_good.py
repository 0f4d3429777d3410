import math

import numpy as np
import pytest

from renyi_toolkit import matcore as mc
from renyi_toolkit import states as st
from renyi_toolkit.divergence import Family
from renyi_toolkit.entropy import h_down
from renyi_toolkit.pretty_good import (
    Povm,
    check_fidelity_bounds,
    check_guessing_bounds,
    fidelity,
    pgm,
    pgm_guess_probability,
    pgm_optimality,
    pretty_good_fidelity,
    singlet_fractions,
    singlet_optimality,
    trace_distance,
)
from renyi_toolkit.sdpsolve import solve_guessing


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def pure(v):
    return st.DensityOperator(mc.HermitianOperator(np.outer(v, v.conj())))


PLUS = pure(ket(1, 1))
ZERO = pure(ket(1, 0))
ONE = pure(ket(0, 1))
DIAG34 = st.DensityOperator(mc.HermitianOperator(np.diag([0.75, 0.25]).astype(complex)))


class TestFidelities:
    def test_identical_states(self):
        rng = st.substream(120)
        rho = st.random_density_from(rng, 3)
        assert pretty_good_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_pure_states(self):
        assert pretty_good_fidelity(ZERO, ONE) == pytest.approx(0.0, abs=1e-12)
        assert fidelity(ZERO, ONE) == pytest.approx(0.0, abs=1e-12)
        assert trace_distance(ZERO, ONE) == pytest.approx(1.0, abs=1e-12)

    def test_rank_one_worked_values(self):
        assert pretty_good_fidelity(PLUS, DIAG34) == pytest.approx((np.sqrt(3) + 1) / 4, abs=1e-12)
        assert fidelity(PLUS, DIAG34) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert trace_distance(ZERO, PLUS) == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    def test_purification_overlap_identity(self):
        rng = st.substream(121)
        for _ in range(20):
            rho = st.random_density_from(rng, 3, int(rng.integers(1, 4)))
            sigma = st.random_density_from(rng, 3, int(rng.integers(1, 4)))
            psi_r = st.canonical_purification(rho).amplitudes
            psi_s = st.canonical_purification(sigma).amplitudes
            overlap = float(np.vdot(psi_r, psi_s).real)
            assert pretty_good_fidelity(rho, sigma) == pytest.approx(overlap, abs=1e-12)

    def test_commuting_pair_fidelities_agree(self):
        rng = st.substream(122)
        base = st.random_density_from(rng, 3)
        _, vecs = base.op.eig
        other = st.DensityOperator(
            mc.HermitianOperator.from_eig(np.sort(rng.dirichlet(np.ones(3))), vecs)
        )
        assert pretty_good_fidelity(base, other) == pytest.approx(
            fidelity(base, other), abs=1e-10
        )


class TestFidelityBounds:
    def test_equal_states_tight(self):
        rng = st.substream(123)
        rho = st.random_density_from(rng, 3)
        report = check_fidelity_bounds(rho, rho)
        assert report.bounds_hold
        assert report.f_pg == pytest.approx(1.0, abs=1e-10)
        assert report.delta == pytest.approx(0.0, abs=1e-10)

    def test_worked_pair(self):
        report = check_fidelity_bounds(PLUS, DIAG34)
        assert report.bounds_hold
        assert report.f_pg <= report.f <= math.sqrt(report.f_pg)
        assert 1 - report.f_pg <= report.delta <= math.sqrt(1 - report.f_pg**2)

    def test_random_sweep(self):
        rng = st.substream(124)
        for _ in range(300):
            dim = int(rng.integers(2, 5))
            rho = st.random_density_from(rng, dim, int(rng.integers(1, dim + 1)))
            sigma = st.random_density_from(rng, dim, int(rng.integers(1, dim + 1)))
            assert check_fidelity_bounds(rho, sigma).bounds_hold


class TestPgm:
    def test_orthogonal_states_projective(self):
        e = st.Ensemble([0.5, 0.5], (ZERO, ONE))
        measurement = pgm(e)
        assert np.abs(measurement.elements[0].mat - ZERO.mat).max() < 1e-10
        assert np.abs(measurement.elements[1].mat - ONE.mat).max() < 1e-10

    def test_single_state_gives_identity(self):
        e = st.Ensemble([1.0], (st.random_density(2, seed=6),))
        measurement = pgm(e)
        assert np.abs(measurement.elements[0].mat - np.eye(2)).max() < 1e-10
        assert pgm_guess_probability(e) == pytest.approx(1.0, abs=1e-10)

    def test_equiprobable_pair_is_optimal(self):
        e = st.Ensemble([0.5, 0.5], (ZERO, PLUS))
        assert pgm_guess_probability(e) == pytest.approx(0.5 * (1 + 1 / np.sqrt(2)), abs=1e-10)

    def test_povm_validation(self):
        bad = mc.HermitianOperator(np.diag([0.5, 0.5]).astype(complex))
        with pytest.raises(ValueError):
            Povm((bad,))

    def test_completion_covers_kernel(self):
        # All states in a proper subspace: the kernel projector is folded in.
        e = st.Ensemble(
            [0.6, 0.4],
            (
                st.DensityOperator(mc.HermitianOperator(np.diag([1.0, 0, 0]).astype(complex))),
                st.DensityOperator(mc.HermitianOperator(np.diag([0, 1.0, 0]).astype(complex))),
            ),
        )
        measurement = pgm(e)
        total = sum(m.mat for m in measurement)
        assert np.abs(total - np.eye(3)).max() < 1e-10


class TestGuessIdentityAndBounds:
    def test_entropy_identity(self):
        rng = st.substream(125)
        for _ in range(100):
            e = st.random_ensemble_from(rng, int(rng.integers(2, 5)), int(rng.integers(2, 4)))
            p_pg = pgm_guess_probability(e)
            reference = 2.0 ** (-h_down(Family.MINIMAL, 2.0, st.cq_state(e)))
            assert p_pg == pytest.approx(reference, abs=1e-10)

    def test_biased_pair_strictly_suboptimal(self):
        e = st.Ensemble([0.9, 0.1], (ZERO, PLUS))
        p_pg = pgm_guess_probability(e)
        p_guess = solve_guessing(e).primal_value
        assert p_pg < p_guess - 1e-6

    def test_chain_worked_values(self):
        e = st.Ensemble([0.5, 0.5], (ZERO, PLUS))
        report = check_guessing_bounds(e)
        assert report.holds
        assert report.p_pg == pytest.approx(0.8535533906, abs=1e-9)
        assert report.p_guess == pytest.approx(0.8535533906, abs=1e-9)
        assert math.sqrt(report.p_pg) == pytest.approx(0.9238795325, abs=1e-9)

    def test_chain_random(self):
        rng = st.substream(126)
        for _ in range(30):
            e = st.random_ensemble_from(rng, 3, 2)
            assert check_guessing_bounds(e).holds


class TestSingletFractions:
    def test_maximally_entangled(self):
        report = singlet_fractions(st.maximally_entangled(2).density())
        assert report.r == pytest.approx(1.0, abs=1e-7)
        assert report.r_pg == pytest.approx(1.0, abs=1e-9)
        assert report.holds

    def test_maximally_mixed(self):
        report = singlet_fractions(st.maximally_mixed((2, 2)))
        assert report.r == pytest.approx(0.25, abs=1e-7)
        assert report.r_pg == pytest.approx(0.25, abs=1e-9)

    def test_chain_random(self):
        rng = st.substream(127)
        for _ in range(30):
            state = st.random_density_from(rng, 4, int(rng.integers(1, 5))).with_profile((2, 2))
            assert singlet_fractions(state).holds


class TestPgmOptimality:
    def test_symmetric_pair_commutes(self):
        e = st.Ensemble([0.5, 0.5], (ZERO, PLUS))
        res = pgm_optimality(e)
        assert res.commutes and res.pgm_optimal and res.consistent

    def test_biased_pair_fails_both(self):
        e = st.Ensemble([0.9, 0.1], (ZERO, PLUS))
        res = pgm_optimality(e)
        assert not res.commutes and not res.pgm_optimal
        assert res.consistent

    def test_pure_ensemble_reduces_to_diagonal_condition(self):
        # For pure members the condition collapses to the textbook Gram
        # matrix commuting with the diagonal of its square root.
        rng = st.substream(128)
        for _ in range(10):
            n = int(rng.integers(2, 4))
            kets = [st.random_pure_from(rng, (3,)).amplitudes for _ in range(n)]
            probs = rng.dirichlet(np.ones(n))
            gram = np.array(
                [
                    [
                        np.sqrt(probs[x] * probs[y]) * np.vdot(kets[y], kets[x])
                        for y in range(n)
                    ]
                    for x in range(n)
                ]
            )
            root = mc.mat_pow(mc.HermitianOperator(gram), 0.5).mat
            reduced_comm = mc.commutator_norm(
                mc.HermitianOperator(gram), mc.HermitianOperator(np.diag(np.diag(root)))
            )
            e = st.Ensemble(probs, tuple(pure(k) for k in kets))
            res = pgm_optimality(e)
            assert res.commutes == (reduced_comm <= 1e-10)

    def test_equivalence_random(self):
        rng = st.substream(129)
        for _ in range(30):
            e = st.random_ensemble_from(rng, int(rng.integers(2, 4)), 2)
            assert pgm_optimality(e).consistent


class TestSingletOptimality:
    def test_pure_bipartite_always_optimal(self):
        rng = st.substream(130)
        for _ in range(10):
            psi = st.random_pure_from(rng, (2, int(rng.integers(2, 4))))
            res = singlet_optimality(psi.density())
            assert res.commutes and res.fractions_equal

    def test_flagged_pure_mixture_always_optimal(self):
        rng = st.substream(131)
        for _ in range(10):
            blocks = int(rng.integers(2, 4))
            probs = rng.dirichlet(np.ones(blocks))
            dim_a, dim_b = 2, 2
            out = np.zeros((dim_a * dim_b * blocks,) * 2, dtype=complex)
            for y, p in enumerate(probs):
                psi = st.random_pure_from(rng, (dim_a, dim_b))
                proj = np.outer(psi.amplitudes, psi.amplitudes.conj())
                flag = np.zeros((blocks, blocks))
                flag[y, y] = 1.0
                out += p * np.kron(proj, flag)
            state = st.DensityOperator(mc.HermitianOperator(out), (dim_a, dim_b * blocks))
            res = singlet_optimality(state)
            assert res.commutes and res.fractions_equal

    def test_generic_state_fails_both(self):
        rng = st.substream(132)
        found_strict = 0
        for _ in range(10):
            state = st.random_density_from(rng, 4).with_profile((2, 2))
            res = singlet_optimality(state)
            assert res.consistent
            if not res.commutes:
                found_strict += 1
                assert res.gap > 1e-6
        assert found_strict > 0

    def test_dual_picture_equivalence(self):
        # Equality of the index-2 and index-infinity entropies on one side
        # matches equality of the two index-1/2 optimized entropies on the
        # purifying side.
        from renyi_toolkit.entropy import h_up

        rng = st.substream(133)
        for _ in range(6):
            state = st.random_density_from(rng, 4).with_profile((2, 2))
            h2 = h_down(Family.MINIMAL, 2.0, state)
            hinf = h_up(Family.MINIMAL, math.inf, state).value
            tau = st.canonical_purification(state)
            rho_ac = tau.reduce([0, 2])
            left = abs(h2 - hinf) <= 1e-5
            right = abs(
                h_up(Family.PETZ, 0.5, rho_ac).value
                - h_up(Family.MINIMAL, 0.5, rho_ac).value
            ) <= 1e-5
            assert left == right
