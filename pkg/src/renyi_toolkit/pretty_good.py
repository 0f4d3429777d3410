"""Pretty good fidelity, measurement and singlet fraction.

The pretty good fidelity tr sqrt(rho) sqrt(sigma) sits within a square
root of the true fidelity and obeys the same trace-distance bounds; the
square-root measurement and the pretty good singlet fraction inherit the
analogous guarantees through the conditional-entropy identities.  The
commutator conditions decide exactly when the pretty good quantities are
optimal, and both sides of those equivalences are evaluated here
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergence import Family, InequalityReport, slack_ok
from .entropy import h_down
from .matcore import (
    HermitianOperator,
    as_operator,
    commutator_norm,
    mat_pow,
    partial_trace,
    schatten_norm,
    tensor,
)
from .states import DensityOperator, Ensemble, canonical_purification, gram_matrix
from .sdpsolve import solve_guessing, solve_min_entropy

__all__ = [
    "Povm",
    "MeasureReport",
    "GuessingReport",
    "SingletFractions",
    "PgmOptimality",
    "SingletOptimality",
    "pretty_good_overlap",
    "pretty_good_fidelity",
    "fidelity",
    "trace_distance",
    "check_fidelity_bounds",
    "pgm",
    "pgm_guess_probability",
    "check_guessing_bounds",
    "singlet_fractions",
    "pgm_optimality",
    "singlet_optimality",
]

BOUND_SLACK = 1e-9
COMMUTE_TOL = 1e-10
OPTIMALITY_GAP_TOL = 1e-6


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to the identity."""

    elements: tuple[HermitianOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("a measurement needs at least one element")
        dim = self.elements[0].dim
        total = np.zeros((dim, dim), dtype=complex)
        for element in self.elements:
            if element.dim != dim:
                raise ValueError("measurement elements must share one space")
            if float(element.eig.eigenvalues[0]) < -1e-9:
                raise ValueError("measurement elements must be positive semidefinite")
            total += element.mat
        if float(np.abs(total - np.eye(dim)).max()) > 1e-9:
            raise ValueError("measurement elements must sum to the identity")

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def pretty_good_overlap(rho, sigma) -> float:
    """tr sqrt(rho) sqrt(sigma) for arbitrary PSD operators."""
    a = mat_pow(as_operator(rho), 0.5)
    b = mat_pow(as_operator(sigma), 0.5)
    return float(np.trace(a.mat @ b.mat).real)


def pretty_good_fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Pretty good fidelity tr sqrt(rho) sqrt(sigma) of two states.

    Equals the plain overlap of the canonical purifications, without the
    unitary freedom that upgrades it to the true fidelity.
    """
    return pretty_good_overlap(rho.op, sigma.op)


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1."""
    a = mat_pow(rho.op, 0.5)
    b = mat_pow(sigma.op, 0.5)
    return schatten_norm(a.mat @ b.mat, 1.0)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * schatten_norm(rho.mat - sigma.mat, 1.0)


@dataclass(frozen=True)
class MeasureReport:
    """Fidelity-type quantities of a state pair and their mutual bounds."""

    f_pg: float
    f: float
    delta: float
    parts: tuple[InequalityReport, ...] = field(repr=False)

    @property
    def bounds_hold(self) -> bool:
        return all(p.holds for p in self.parts)

    @property
    def slack(self) -> float:
        return min((p.slack for p in self.parts), default=math.inf)

    def to_dict(self) -> dict:
        return {
            "f_pg": self.f_pg,
            "f": self.f,
            "delta": self.delta,
            "bounds_hold": self.bounds_hold,
            "slack": self.slack,
            "parts": [p.to_dict() for p in self.parts],
        }


def _ineq(lhs: float, rhs: float) -> InequalityReport:
    return InequalityReport(lhs, rhs, rhs - lhs, slack_ok(lhs, rhs, BOUND_SLACK), "<=")


def check_fidelity_bounds(rho: DensityOperator, sigma: DensityOperator) -> MeasureReport:
    """All bounds tying pretty good fidelity, fidelity and trace distance.

    f_pg <= f <= sqrt(f_pg), 1 - f_pg <= delta <= sqrt(1 - f_pg^2) and
    1 - f <= delta <= sqrt(1 - f^2).
    """
    f_pg = pretty_good_fidelity(rho, sigma)
    f = fidelity(rho, sigma)
    delta = trace_distance(rho, sigma)
    parts = (
        _ineq(f_pg, f),
        _ineq(f, math.sqrt(max(f_pg, 0.0))),
        _ineq(1.0 - f_pg, delta),
        _ineq(delta, math.sqrt(max(1.0 - f_pg**2, 0.0))),
        _ineq(1.0 - f, delta),
        _ineq(delta, math.sqrt(max(1.0 - f**2, 0.0))),
    )
    return MeasureReport(f_pg, f, delta, parts)


def pgm(ensemble: Ensemble) -> Povm:
    """Square-root measurement of an ensemble.

    M_x = p_x abar^(-1/2) rho_x abar^(-1/2) with abar the average state and
    the inverse taken on its support; the kernel projector is folded into
    element 0 so the elements resolve the identity exactly.  The guessing
    probability of this measurement matches the closed-form conditional
    entropy identity at index 2, which pins the construction.
    """
    avg = ensemble.average_state()
    inv_half = mat_pow(avg.op, -0.5)
    dim = ensemble.state_dim
    support = mat_pow(avg.op, 0.0)
    kernel = np.eye(dim, dtype=complex) - support.mat
    elements = []
    for x, (p, state) in enumerate(zip(ensemble.probs, ensemble.states)):
        m = p * (inv_half.mat @ state.mat @ inv_half.mat)
        if x == 0:
            m = m + kernel
        elements.append(HermitianOperator((m + m.conj().T) / 2))
    return Povm(tuple(elements))


def pgm_guess_probability(ensemble: Ensemble) -> float:
    """Success probability of the square-root measurement."""
    measurement = pgm(ensemble)
    return float(
        sum(
            p * np.trace(m.mat @ s.mat).real
            for p, m, s in zip(ensemble.probs, measurement, ensemble.states)
        )
    )


@dataclass(frozen=True)
class GuessingReport:
    """Pretty good vs optimal guessing probability with the chain bounds."""

    p_pg: float
    p_guess: float
    parts: tuple[InequalityReport, ...]
    sdp_gap: float

    @property
    def holds(self) -> bool:
        return all(p.holds for p in self.parts)

    @property
    def slack(self) -> float:
        return min(p.slack for p in self.parts)

    def to_dict(self) -> dict:
        return {
            "p_pg": self.p_pg,
            "p_guess": self.p_guess,
            "holds": self.holds,
            "slack": self.slack,
            "sdp_gap": self.sdp_gap,
        }


def check_guessing_bounds(ensemble: Ensemble, tol: float = 1e-8) -> GuessingReport:
    """p_pg <= p_guess <= sqrt(p_pg) with the optimum from the program."""
    p_pg = pgm_guess_probability(ensemble)
    solution = solve_guessing(ensemble)
    p_guess = solution.primal_value
    parts = (
        InequalityReport(p_pg, p_guess, p_guess - p_pg, slack_ok(p_pg, p_guess, tol), "<="),
        InequalityReport(
            p_guess,
            math.sqrt(max(p_pg, 0.0)),
            math.sqrt(max(p_pg, 0.0)) - p_guess,
            slack_ok(p_guess, math.sqrt(max(p_pg, 0.0)), tol),
            "<=",
        ),
    )
    return GuessingReport(p_pg, p_guess, parts, solution.gap)


@dataclass(frozen=True)
class SingletFractions:
    """Optimal and pretty good singlet fractions with their chain bounds."""

    r: float
    r_pg: float
    parts: tuple[InequalityReport, ...]

    @property
    def holds(self) -> bool:
        return all(p.holds for p in self.parts)

    @property
    def slack(self) -> float:
        return min(p.slack for p in self.parts)

    def to_dict(self) -> dict:
        return {"r": self.r, "r_pg": self.r_pg, "holds": self.holds, "slack": self.slack}


def singlet_fractions(state: DensityOperator, tol: float = 1e-8) -> SingletFractions:
    """Largest and pretty good overlap with the maximally entangled state.

    Both fractions come from conditional-entropy identities: the optimal
    one from the min-entropy program, the pretty good one from the plain
    minimal entropy at index 2; the chain r_pg <= r <= sqrt(r_pg) is
    checked alongside.
    """
    d_a = state.profile[0]
    h_min = -math.log2(solve_min_entropy(state).primal_value)
    r = 2.0 ** (-h_min) / d_a
    h_two = h_down(Family.MINIMAL, 2.0, state)
    r_pg = 2.0 ** (-h_two) / d_a
    parts = (
        InequalityReport(r_pg, r, r - r_pg, slack_ok(r_pg, r, tol), "<="),
        InequalityReport(
            r,
            math.sqrt(max(r_pg, 0.0)),
            math.sqrt(max(r_pg, 0.0)) - r,
            slack_ok(r, math.sqrt(max(r_pg, 0.0)), tol),
            "<=",
        ),
    )
    return SingletFractions(r, r_pg, parts)


@dataclass(frozen=True)
class PgmOptimality:
    """Gram-matrix commutation vs actual optimality of the measurement."""

    commutes: bool
    pgm_optimal: bool
    sigma_hat: HermitianOperator
    commutator: float
    gap: float

    @property
    def consistent(self) -> bool:
        return self.commutes == self.pgm_optimal


def pgm_optimality(ensemble: Ensemble) -> PgmOptimality:
    """The square-root measurement is optimal iff the Gram matrix commutes
    with the block-diagonal pinch of its square root.

    Both sides are computed independently: the commutator norm, and the
    gap between the measurement's guessing probability and the program
    optimum.
    """
    g = gram_matrix(ensemble)
    root = mat_pow(g, 0.5)
    n = ensemble.size
    d = ensemble.state_dim
    blocks = root.mat.reshape(n, d, n, d)
    pinched = np.zeros_like(root.mat).reshape(n, d, n, d)
    for x in range(n):
        pinched[x, :, x, :] = blocks[x, :, x, :]
    sigma_hat = HermitianOperator(pinched.reshape(n * d, n * d))
    comm = commutator_norm(g, sigma_hat)
    gap = abs(pgm_guess_probability(ensemble) - solve_guessing(ensemble).primal_value)
    return PgmOptimality(comm <= COMMUTE_TOL, gap <= OPTIMALITY_GAP_TOL, sigma_hat, comm, gap)


@dataclass(frozen=True)
class SingletOptimality:
    """Purified commutation condition vs equality of the singlet fractions."""

    commutes: bool
    fractions_equal: bool
    commutator: float
    gap: float

    @property
    def consistent(self) -> bool:
        return self.commutes == self.fractions_equal


def singlet_optimality(state: DensityOperator) -> SingletOptimality:
    """The pretty good singlet fraction is optimal iff the purified
    complementary state commutes with the lift of tr_A of its square root.

    The commutator test runs on the canonical purification; the fraction
    gap is evaluated through the two entropy identities.
    """
    if len(state.profile) != 2:
        raise ValueError(f"singlet optimality needs a bipartite state, got {state.profile}")
    d_a = state.profile[0]
    tau3 = canonical_purification(state)
    tau_ac = tau3.reduce([0, 2])
    d_c = tau_ac.profile[1]
    sigma_hat = partial_trace(mat_pow(tau_ac.op, 0.5), tau_ac.profile, [1])
    lifted = tensor(np.eye(d_a, dtype=complex), sigma_hat)
    comm = commutator_norm(tau_ac.op, lifted)
    fractions = singlet_fractions(state)
    gap = abs(fractions.r - fractions.r_pg)
    return SingletOptimality(comm <= COMMUTE_TOL, gap <= OPTIMALITY_GAP_TOL, comm, gap)
