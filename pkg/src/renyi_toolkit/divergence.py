"""The two quantum Renyi divergence families and their inequality checkers.

Implements the Petz family Q(rho||sigma) = tr rho^a sigma^(1-a) and the
minimal (sandwiched) family Q(rho||sigma) = tr (sigma^((1-a)/2a) rho
sigma^((1-a)/2a))^a, the divergences built from them with limit cases,
and verifiers for the Araki-Lieb-Thirring inequality, its reverse with
Schatten-norm correction factors, and the two-sided sandwich bound that
relates the families.

All logarithms are base 2, so divergences and entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .matcore import (
    HermitianOperator,
    as_operator,
    commutator_norm,
    graded_product_sv,
    mat_pow,
    rank_tolerance,
    schatten_norm,
    tr_pow,
)

__all__ = [
    "Family",
    "AltExponents",
    "InequalityReport",
    "SandwichReport",
    "EqualityConditionResult",
    "q_alpha",
    "d_alpha",
    "check_alt",
    "check_reverse_alt",
    "check_sandwich",
    "equality_condition",
    "slack_ok",
]

# Absolute-relative slack for inequality checks: lhs <= rhs passes when
# lhs <= rhs + INEQ_SLACK * max(1, |rhs|).
INEQ_SLACK = 1e-9

# Two eigendecompositions compound error, so divergence equality uses a
# looser threshold than single inequality checks.
DIVERGENCE_EQ_TOL = 1e-8
COMMUTE_TOL = 1e-10

# Kernel-containment leak above this fraction of the total weight counts
# as a support violation.
SUPPORT_LEAK_TOL = 1e-9


class Family(Enum):
    """The two divergence families."""

    PETZ = "petz"
    MINIMAL = "minimal"


def slack_ok(lhs: float, rhs: float, tol: float = INEQ_SLACK) -> bool:
    """lhs <= rhs up to tol * max(1, |rhs|)."""
    if math.isinf(rhs):
        return True
    if math.isinf(lhs):
        return False
    return lhs <= rhs + tol * max(1.0, abs(rhs))


def _psd_eig(op: HermitianOperator) -> tuple[np.ndarray, np.ndarray, float]:
    w, v = op.eig
    w = np.maximum(w, 0.0)
    return w, v, rank_tolerance(w, op.dim)


def _spec_pow(w: np.ndarray, p: float) -> np.ndarray:
    """Entrywise power treating non-positive entries as exact zeros."""
    wp = np.zeros_like(w)
    mask = w > 0
    wp[mask] = w[mask] ** p if p != 0 else 1.0
    return wp


def _power_from_eig(w, v, cutoff, p) -> np.ndarray:
    return (v * _spec_pow(np.where(w > cutoff, w, 0.0), p)) @ v.conj().T


def _log_decades(w: np.ndarray) -> float:
    pos = w[w > 0]
    if pos.size == 0:
        return 0.0
    return float(np.log10(pos.max() / pos.min()))


def _trace_power_product(left, half_power_left: float, right, power_right: float, s: float) -> float:
    """tr((R^pr L^(2 hpl) R^pr)^s) for PSD L, R with support conventions.

    Equals sum sv(L^hpl R^pr)^(2s).  For fractional ``s`` on products whose
    spectrum spans many decades the plain route (assemble, diagonalize,
    clamp) loses the small real eigenvalues, whose s-th powers are not
    negligible; those cases switch to the graded one-sided Jacobi SVD.
    """
    left = as_operator(left)
    right = as_operator(right)
    wl, vl, cl = _psd_eig(left)
    wr, vr, cr = _psd_eig(right)
    wl = np.where(wl > cl, wl, 0.0)
    wr = np.where(wr > cr, wr, 0.0)
    spread = half_power_left * _log_decades(wl) + abs(power_right) * _log_decades(wr)
    if s < 1.0 and spread > 2.0:
        sv = graded_product_sv(wl, vl, half_power_left, wr, vr, power_right)
        sv = sv[sv > 0]
        if sv.size == 0:
            return 0.0
        return float(np.sum(sv ** (2.0 * s)))
    l_half = (vl * _spec_pow(wl, 2.0 * half_power_left)) @ vl.conj().T
    r_pow = (vr * _spec_pow(wr, power_right)) @ vr.conj().T
    prod = r_pow @ l_half @ r_pow
    return tr_pow(HermitianOperator((prod + prod.conj().T) / 2), s)


def _support_violation(rho: HermitianOperator, sigma: HermitianOperator) -> bool:
    """True when supp(rho) is not contained in supp(sigma)."""
    wr, vr, cr = _psd_eig(rho)
    ws, vs, cs = _psd_eig(sigma)
    proj_r = _power_from_eig(wr, vr, cr, 0)
    kernel_s = np.eye(sigma.dim) - _power_from_eig(ws, vs, cs, 0)
    leak = float(np.trace(proj_r @ kernel_s).real)
    return leak > SUPPORT_LEAK_TOL * max(1.0, rho.dim)


def q_alpha(family: Family, rho, sigma, alpha: float) -> float:
    """The trace functional underlying the divergence of either family.

    Matrix powers follow the generalized-inverse convention, so the value
    is finite even without support containment; the divergence level is
    where support violations turn into +inf.
    """
    if alpha in (0.0, 1.0):
        raise ValueError("alpha in {0, 1} is a limit case; use d_alpha")
    if alpha < 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    if rho.dim != sigma.dim:
        raise ValueError("operators must act on the same space")
    wr, vr, cr = _psd_eig(rho)
    if float(wr.sum()) <= 0.0:
        raise ValueError("rho must be nonzero")
    ws, vs, cs = _psd_eig(sigma)
    if family is Family.PETZ:
        ra = _power_from_eig(wr, vr, cr, alpha)
        sb = _power_from_eig(ws, vs, cs, 1.0 - alpha)
        return float(np.tensordot(ra, sb.T, axes=2).real)
    exponent = (1.0 - alpha) / (2.0 * alpha)
    return _trace_power_product(rho, 0.5, sigma, exponent, alpha)


def _d_alpha_one(rho: HermitianOperator, sigma: HermitianOperator) -> float:
    # Umegaki relative entropy tr rho (log rho - log sigma) / tr rho.
    wr, vr, cr = _psd_eig(rho)
    ws, vs, cs = _psd_eig(sigma)
    tr_rho = float(wr.sum())
    log_r = _log_on_support(wr, vr, cr)
    log_s = _log_on_support(ws, vs, cs)
    val = float(np.trace(rho.mat @ (log_r - log_s)).real) / tr_rho
    return val


def _log_on_support(w, v, cutoff) -> np.ndarray:
    lw = np.zeros_like(w)
    mask = w > cutoff
    lw[mask] = np.log2(w[mask])
    return (v * lw) @ v.conj().T


def d_alpha(family: Family, rho, sigma, alpha: float) -> float:
    """Renyi divergence in bits, with explicit limit cases.

    alpha = 1 is the relative entropy (shared by both families); alpha = 0
    is supported for the Petz family and alpha = inf for the minimal one.
    Returns +inf when alpha > 1 (or alpha = inf) and supp(rho) is not
    contained in supp(sigma).
    """
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    if rho.dim != sigma.dim:
        raise ValueError("operators must act on the same space")
    wr, _, _ = _psd_eig(rho)
    tr_rho = float(wr.sum())
    if tr_rho <= 0.0:
        raise ValueError("rho must be nonzero")
    if alpha < 0:
        raise ValueError(f"alpha must be in [0, inf], got {alpha}")

    if alpha == 1.0:
        if _support_violation(rho, sigma):
            return math.inf
        return _d_alpha_one(rho, sigma)

    if alpha == 0.0:
        if family is Family.MINIMAL:
            raise ValueError("the alpha -> 0 limit is only exercised for the Petz family")
        proj = mat_pow(rho, 0.0)
        overlap = float(np.trace(proj.mat @ sigma.mat).real) / tr_rho
        if overlap <= 0.0:
            return math.inf
        return -math.log2(overlap)

    if math.isinf(alpha):
        if family is Family.PETZ:
            raise ValueError("the alpha -> inf limit is only exercised for the minimal family")
        if _support_violation(rho, sigma):
            return math.inf
        inv_half = mat_pow(sigma, -0.5)
        middle = inv_half.mat @ rho.mat @ inv_half.mat
        top = float(np.linalg.eigvalsh((middle + middle.conj().T) / 2).max())
        if top <= 0.0:
            return math.inf
        return math.log2(top)

    if alpha > 1.0 and _support_violation(rho, sigma):
        return math.inf
    q = q_alpha(family, rho, sigma, alpha)
    if q <= 0.0:
        # -log 0 = +inf convention; only reachable for alpha < 1 with
        # orthogonal supports.
        return math.inf
    return math.log2(q / tr_rho) / (alpha - 1.0)


@dataclass(frozen=True)
class AltExponents:
    """Exponent tuple (q, r, a, b) tied by the Hoelder-type constraint.

    For r <= 1 the constraint is 1/(2rq) = 1/(2q) + 1/a + 1/b, for r >= 1
    it is 1/(2q) = 1/(2rq) + 1/a + 1/b; a and b may be inf.
    """

    q: float
    r: float
    a: float
    b: float

    def __post_init__(self):
        if self.q <= 0 or self.r <= 0:
            raise ValueError("q and r must be positive")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive (possibly inf)")
        if self.residual() > 1e-12:
            raise ValueError(f"exponents violate the Hoelder constraint: {self}")

    def residual(self) -> float:
        inv_a = 0.0 if math.isinf(self.a) else 1.0 / self.a
        inv_b = 0.0 if math.isinf(self.b) else 1.0 / self.b
        if self.r <= 1.0:
            return abs(1.0 / (2 * self.r * self.q) - 1.0 / (2 * self.q) - inv_a - inv_b)
        return abs(1.0 / (2 * self.q) - 1.0 / (2 * self.r * self.q) - inv_a - inv_b)

    @classmethod
    def from_split(cls, q: float, r: float, split: float) -> "AltExponents":
        """Distribute the constraint budget between a and b.

        ``split`` in [0, 1] is the fraction assigned to 1/a; the remainder
        goes to 1/b.  Zero shares map to infinite exponents.
        """
        if not 0.0 <= split <= 1.0:
            raise ValueError("split must lie in [0, 1]")
        if r <= 1.0:
            budget = 1.0 / (2 * r * q) - 1.0 / (2 * q)
        else:
            budget = 1.0 / (2 * q) - 1.0 / (2 * r * q)
        inv_a = split * budget
        inv_b = (1.0 - split) * budget
        a = math.inf if inv_a == 0.0 else 1.0 / inv_a
        b = math.inf if inv_b == 0.0 else 1.0 / inv_b
        return cls(q, r, a, b)


@dataclass(frozen=True)
class InequalityReport:
    """One verified inequality lhs <= rhs (direction recorded explicitly)."""

    lhs: float
    rhs: float
    slack: float
    holds: bool
    direction: str = "<="

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "direction": self.direction,
        }


def _report(lhs: float, rhs: float, tol: float = INEQ_SLACK) -> InequalityReport:
    return InequalityReport(lhs, rhs, rhs - lhs, slack_ok(lhs, rhs, tol), "<=")


def check_alt(A, B, q: float, r: float) -> InequalityReport:
    """Araki-Lieb-Thirring inequality between the two orderings of powers.

    For r in [0, 1]: tr (B^(r/2) A^r B^(r/2))^q <= tr (B^(1/2) A B^(1/2))^(rq);
    the direction reverses for r >= 1.
    """
    if q < 0:
        raise ValueError("q must be non-negative")
    A = as_operator(A)
    B = as_operator(B)
    outer = _trace_power_product(A, 0.5, B, 0.5, r * q)
    inner = _trace_power_product(A, r / 2, B, r / 2, q)
    if r <= 1.0:
        return _report(inner, outer)
    flipped = _report(outer, inner)
    return InequalityReport(inner, outer, inner - outer, flipped.holds, ">=")


def check_reverse_alt(A, B, exponents: AltExponents) -> InequalityReport:
    """Reverse Araki-Lieb-Thirring bound with Schatten-norm corrections.

    For r in (0, 1]:
        tr (B^(1/2) A B^(1/2))^(rq)
            <= (tr (B^(r/2) A^r B^(r/2))^q)^r
               * ||A^((1-r)/2)||_a^(2rq) * ||B^((1-r)/2)||_b^(2rq)
    and for r >= 1 the mirrored bound with the norm factors inverted and
    the inequality reversed.
    """
    A = as_operator(A)
    B = as_operator(B)
    q, r, a, b = exponents.q, exponents.r, exponents.a, exponents.b
    outer = _trace_power_product(A, 0.5, B, 0.5, r * q)
    inner = _trace_power_product(A, r / 2, B, r / 2, q)
    if r <= 1.0:
        norm_a = schatten_norm(mat_pow(A, (1.0 - r) / 2).mat, a)
        norm_b = schatten_norm(mat_pow(B, (1.0 - r) / 2).mat, b)
        rhs = inner**r * norm_a ** (2 * r * q) * norm_b ** (2 * r * q)
        return _report(outer, rhs)
    norm_a = schatten_norm(mat_pow(A, (r - 1.0) / 2).mat, a)
    norm_b = schatten_norm(mat_pow(B, (r - 1.0) / 2).mat, b)
    rhs = inner**r * norm_a ** (-2 * r * q) * norm_b ** (-2 * r * q)
    report = _report(rhs, outer)
    return InequalityReport(outer, rhs, outer - rhs, report.holds, ">=")


@dataclass(frozen=True)
class SandwichReport:
    """The two-sided bound between the families at one alpha.

    lower <= d_minimal <= d_petz where lower = alpha * d_petz +
    (1 - alpha) * (log tr rho - log tr sigma); the correction term vanishes
    for normalized inputs.
    """

    alpha: float
    d_petz: float
    d_minimal: float
    lower: float
    correction: float
    holds_lower: bool
    holds_upper: bool

    @property
    def holds(self) -> bool:
        return self.holds_lower and self.holds_upper

    @property
    def slack(self) -> float:
        if any(math.isinf(x) for x in (self.d_petz, self.d_minimal, self.lower)):
            return math.inf
        return min(self.d_minimal - self.lower, self.d_petz - self.d_minimal)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "d_petz": self.d_petz,
            "d_minimal": self.d_minimal,
            "lower": self.lower,
            "correction": self.correction,
            "holds": self.holds,
            "slack": self.slack,
        }


def check_sandwich(rho, sigma, alpha: float, tol: float = INEQ_SLACK) -> SandwichReport:
    """Verify lower <= minimal <= Petz divergence at alpha in [0, 1].

    Inputs may be unnormalized non-negative operators; the lower bound then
    carries the (1 - alpha)(log tr rho - log tr sigma) correction.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"the two-sided bound needs alpha in [0, 1], got {alpha}")
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    d_petz = d_alpha(Family.PETZ, rho, sigma, alpha)
    d_min = d_alpha(Family.MINIMAL, rho, sigma, alpha)
    tr_rho = max(float(np.trace(rho.mat).real), 0.0)
    tr_sigma = max(float(np.trace(sigma.mat).real), 0.0)
    if tr_sigma <= 0.0:
        correction = math.inf
    else:
        correction = (1.0 - alpha) * (math.log2(tr_rho) - math.log2(tr_sigma))
    lower = alpha * d_petz + correction
    # Infinite divergences only occur jointly (shared support condition).
    if math.isinf(d_petz) and math.isinf(d_min):
        holds_lower = holds_upper = True
    else:
        holds_lower = slack_ok(lower, d_min, tol)
        holds_upper = slack_ok(d_min, d_petz, tol)
    return SandwichReport(alpha, d_petz, d_min, lower, correction, holds_lower, holds_upper)


@dataclass(frozen=True)
class EqualityConditionResult:
    """Joint outcome of the commutation test and the divergence-gap test."""

    commute: bool
    divergences_equal: bool
    commutator: float
    gap: float

    @property
    def consistent(self) -> bool:
        return self.commute == self.divergences_equal


def equality_condition(rho, sigma, alpha: float) -> EqualityConditionResult:
    """Commutation is equivalent to equality of the two divergences.

    Evaluates both sides of the equivalence independently: the commutator
    norm against COMMUTE_TOL and |d_petz - d_minimal| against
    DIVERGENCE_EQ_TOL.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"the equality condition is stated for alpha in (0, 1), got {alpha}")
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    comm = commutator_norm(rho, sigma)
    gap = abs(d_alpha(Family.PETZ, rho, sigma, alpha) - d_alpha(Family.MINIMAL, rho, sigma, alpha))
    return EqualityConditionResult(comm <= COMMUTE_TOL, gap <= DIVERGENCE_EQ_TOL, comm, gap)
