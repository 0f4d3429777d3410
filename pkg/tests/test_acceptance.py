"""Acceptance battery.

Each test runs one criterion of the verification battery at its stated
trial count and tolerance and prints a single pass/fail line.  The same
checks (and counts) back the ``renyi-toolkit suite --full`` command.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete; the full battery targets a commodity-laptop
runtime of well under ten minutes.
"""

import math
import time

import numpy as np
import pytest

from renyi_toolkit import matcore as mc
from renyi_toolkit import states as st
from renyi_toolkit.harness import FULL_BATTERY_TRIALS, SuiteConfig, run_suite
from renyi_toolkit.pretty_good import check_guessing_bounds
from renyi_toolkit.sdpsolve import verify_fidelity_certificate

SEED = 42


def _run(checks, seed=SEED):
    overrides = {name: FULL_BATTERY_TRIALS[name] for name in checks}
    config = SuiteConfig(seed=seed, checks=tuple(checks), trial_overrides=overrides)
    return run_suite(config)


def _report(number, label, report, extra=""):
    ok = report.failures == 0
    lines = []
    for name in sorted(report.checks):
        result = report.checks[name]
        lines.append(f"{name}:{result.trials}t/{result.failures}f")
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {number:>2}] {status} {label} ({'; '.join(lines)}) "
          f"{extra} [{report.wall_time:.1f}s]")
    return ok


def test_criterion_01_sandwich_bound():
    start = time.monotonic()
    report = _run(["sandwich", "sandwich_unnormalized"])
    elapsed = time.monotonic() - start
    ok = _report(1, "two-sided divergence bound", report, f"runtime {elapsed:.0f}s (target <60s)")
    assert ok
    for result in report.checks.values():
        assert result.worst_slack > -1e-9


def test_criterion_02_reverse_alt():
    report = _run(["reverse_alt", "reverse_alt_specialization", "reverse_alt_substitution"])
    assert _report(2, "reverse trace inequality and its specialization", report)


def test_criterion_03_equality_condition():
    report = _run(["equality_commuting", "equality_generic"])
    assert _report(3, "commutation iff divergence equality", report)


def test_criterion_04_duality_relations():
    report = _run(["duality_petz_down", "duality_min_up", "duality_mixed"])
    assert _report(4, "entropy duality relations", report)


def test_criterion_05_entropy_bound_chains():
    report = _run(["entropy_chain", "coherent_classical", "minlike", "minlike_cq"])
    assert _report(5, "max-like and min-like entropy chains", report)


def test_criterion_06_directional_derivative():
    report = _run(["derivative_fd", "derivative_stationarity"])
    assert _report(6, "derivative formula vs finite differences", report)


def test_criterion_07_certificate_commuting_and_value():
    report = _run(["certificate_random", "certificate_commuting"])
    assert _report(
        7,
        "dual certificate: value identity, partial-trace bound, commuting tightness",
        report,
    )


def test_criterion_07a_certificate_feasibility_on_random_inputs():
    """Literal unconditional-feasibility clause.

    The lifted feasibility constraint of the explicit dual pair holds
    exactly when the input commutes with the lifted closed-form marginal;
    on generic random inputs the candidate value equals the squared pretty
    good overlap, which sits strictly below the program optimum, so no
    dual-feasible pair can carry it.  The assertion below states the
    unconditional form regardless and therefore fails on non-commuting
    draws; it is kept to document the obstruction rather than weakened.
    """
    rng = st.substream(SEED, 777)
    worst = math.inf
    violations = 0
    trials = 1000
    for k in range(trials):
        d_a, d_c = 2, 2 if k % 2 == 0 else 3
        tau = st.random_density_from(rng, d_a * d_c).with_profile((d_a, d_c))
        report = verify_fidelity_certificate(tau)
        low = min(report.min_eig_lifted, report.min_eig_partial)
        worst = min(worst, low)
        if low < -1e-8:
            violations += 1
    ok = violations == 0
    print(
        f"[criterion 7a] {'PASS' if ok else 'FAIL'} unconditional certificate feasibility "
        f"({trials} trials, {violations} infeasible, worst eigenvalue {worst:.3e})"
    )
    assert violations == 0, (
        f"certificate infeasible on {violations}/{trials} random states "
        f"(worst min-eigenvalue {worst:.3e}); feasibility requires the "
        f"commuting condition"
    )


def test_criterion_08_fidelity_bounds():
    report = _run(["fidelity_bounds"])
    assert _report(8, "pretty good fidelity and trace distance bounds", report)


def test_criterion_09_pgm_identity_and_bounds():
    report = _run(["pgm_identity", "guessing_bounds"])
    ok = _report(9, "measurement identity and guessing chain", report)
    # Worked value: equiprobable |0>, |+>.
    k0 = np.array([1, 0], dtype=complex)
    kp = np.array([1, 1], dtype=complex) / np.sqrt(2)
    ensemble = st.Ensemble(
        [0.5, 0.5],
        (
            st.DensityOperator(mc.HermitianOperator(np.outer(k0, k0.conj()))),
            st.DensityOperator(mc.HermitianOperator(np.outer(kp, kp.conj()))),
        ),
    )
    chain = check_guessing_bounds(ensemble)
    expected = 0.5 * (1 + 1 / np.sqrt(2))
    assert ok
    assert abs(chain.p_pg - expected) <= 1e-9
    assert abs(chain.p_guess - expected) <= 1e-9


def test_criterion_10_optimality_equivalences():
    report = _run(
        [
            "pgm_optimality",
            "singlet_optimality",
            "singlet_positive_pure",
            "singlet_positive_mixture",
        ]
    )
    assert _report(10, "optimality commutator equivalences", report)


def test_criterion_11_sdp_health():
    report = _run(
        [
            "sdp_guessing_health",
            "sdp_minentropy_health",
            "sdp_fidelity_health",
            "minentropy_cq_identity",
        ]
    )
    assert _report(11, "semidefinite solver duality gaps and identities", report)
