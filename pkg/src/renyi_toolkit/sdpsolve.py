"""Dense semidefinite programming for the three fixed problem shapes.

A feasible-start primal-dual path-following solver (Mehrotra-style
predictor-corrector steps on the scaled Newton system) over direct sums of
Hermitian PSD blocks, plus the three problem builders it exists for: the
guessing-probability program of state discrimination, the conditional
min-entropy program, and the marginal-optimized fidelity program together
with its explicit dual certificate.

Problem sizes here are tiny (cones up to a few hundred), so the solver is
tuned for robustness rather than scale: every shape is strictly feasible
by construction on both sides and the iteration cap is generous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .matcore import (
    ConvergenceError,
    HermitianOperator,
    mat_pow,
    matrix_to_json,
    partial_trace,
)
from .states import DensityOperator, Ensemble

__all__ = [
    "SdpShape",
    "SdpSolution",
    "CertificateReport",
    "solve_guessing",
    "solve_min_entropy",
    "solve_fidelity_primal",
    "verify_fidelity_certificate",
]

GAP_TARGET = 1e-9
GAP_ACCEPT = 1e-7
MAX_ITERATIONS = 200
FEASIBILITY_SLACK = 1e-8


class SdpShape(Enum):
    GUESSING = "guessing"
    MIN_ENTROPY = "min_entropy"
    FIDELITY_PRIMAL = "fidelity_primal"


@dataclass(frozen=True)
class SdpSolution:
    """Primal/dual outcome of one solve.

    ``min_slack_eig`` is the smallest eigenvalue over all returned PSD
    variables and slacks (feasibility witness); ``gap`` is the absolute
    primal-dual objective difference.
    """

    shape: SdpShape
    primal_value: float
    dual_value: float
    primal_vars: dict = field(repr=False)
    dual_vars: dict = field(repr=False)
    gap: float
    min_slack_eig: float
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "shape": self.shape.value,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "min_slack_eig": self.min_slack_eig,
            "iterations": self.iterations,
            "residual": self.residual,
            "primal_vars": {k: matrix_to_json(v) for k, v in self.primal_vars.items()},
            "dual_vars": {
                k: (matrix_to_json(v) if isinstance(v, np.ndarray) else v)
                for k, v in self.dual_vars.items()
            },
        }


def _hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of the real space of d x d Hermitian matrices."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = inv_sqrt2
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1j * inv_sqrt2
            e[j, i] = -1j * inv_sqrt2
            basis.append(e)
    return basis


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


class _Program:
    """min sum_b <C_b, X_b> s.t. sum_b <A_ib, X_b> = b_i, X_b >= 0."""

    def __init__(self, c_blocks, a_stacks, b_vec, x_start, y_start):
        self.c = [np.asarray(c, dtype=complex) for c in c_blocks]
        # a_stacks[k] has shape (m, d_k, d_k).
        self.a = [np.asarray(a, dtype=complex) for a in a_stacks]
        self.b = np.asarray(b_vec, dtype=float)
        self.x0 = [np.asarray(x, dtype=complex) for x in x_start]
        self.y0 = np.asarray(y_start, dtype=float)
        self.m = self.b.size
        self.total_dim = sum(c.shape[0] for c in self.c)


def _inner(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.tensordot(p.conj(), q, axes=2).real)


def _adjoint(a_stack: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.tensordot(y, a_stack, axes=1)


def _max_step(p_blocks, d_blocks) -> float:
    """Largest step in [0, 1] keeping every block positive definite."""
    step = 1.0
    for p, d in zip(p_blocks, d_blocks):
        try:
            chol = np.linalg.cholesky(p)
        except np.linalg.LinAlgError:
            # Rounding can graze the cone boundary near convergence; shift
            # past the violation before measuring the step.
            w = np.linalg.eigvalsh(p)
            shift = 4 * max(0.0, -float(w.min())) + 1e-14 * max(float(w.max()), 0.0) + 1e-300
            chol = np.linalg.cholesky(p + shift * np.eye(p.shape[0]))
        w = np.linalg.solve(chol, np.linalg.solve(chol, d).conj().T).conj().T
        lmin = float(np.linalg.eigvalsh(_herm(w)).min())
        if lmin < 0:
            step = min(step, -1.0 / lmin)
    return step


def _quality(prog: _Program, x, y, s) -> tuple[float, float, float]:
    gap = sum(_inner(x[k], s[k]) for k in range(len(x)))
    pobj = sum(_inner(prog.c[k], x[k]) for k in range(len(x)))
    dobj = float(prog.b @ y)
    return gap, pobj, dobj


def _solve_program(prog: _Program) -> tuple[list, np.ndarray, list, int, float]:
    nb = len(prog.c)
    x = [xb.copy() for xb in prog.x0]
    y = prog.y0.copy()
    total = prog.total_dim
    best = None

    for iteration in range(MAX_ITERATIONS):
        # Reconstruct the dual slack from y so dual feasibility is exact.
        s = [prog.c[k] - _adjoint(prog.a[k], y) for k in range(nb)]
        gap, pobj, dobj = _quality(prog, x, y, s)
        scale = max(1.0, abs(pobj))
        merit = max(gap, abs(pobj - dobj), _primal_residual(prog, x)) / scale
        if best is None or merit < best[0]:
            best = (merit, [xk.copy() for xk in x], y.copy(), [sk.copy() for sk in s], iteration, gap)
        if merit <= GAP_TARGET:
            return x, y, s, iteration, gap
        if iteration - best[4] > 8:
            break  # no progress; fall through to the best iterate
        mu = gap / total
        try:
            s_inv = [np.linalg.inv(s[k]) for k in range(nb)]
        except np.linalg.LinAlgError:
            break  # boundary reached; fall through to the best iterate
        # Schur complement M_ij = sum_k <A_i, Herm(X A_j S^-1)> drives both
        # predictor and corrector solves.
        m_mat = np.zeros((prog.m, prog.m))
        for k in range(nb):
            w_k = np.einsum(
                "ab,jbc,cd->jad", x[k], prog.a[k], s_inv[k], optimize=True
            )
            w_k = (w_k + np.conj(np.swapaxes(w_k, 1, 2))) / 2
            m_mat += np.einsum("iab,jba->ij", prog.a[k], w_k, optimize=True).real
        m_mat = (m_mat + m_mat.T) / 2
        m_mat += np.eye(prog.m) * (1e-14 * max(1.0, float(np.trace(m_mat)) / prog.m))
        # Feeding the primal residual back keeps A(X) = b from drifting.
        rp = prog.b.copy()
        for k in range(nb):
            rp -= np.einsum("iab,ba->i", prog.a[k], x[k], optimize=True).real

        def newton(nu: float, corr=None):
            rhs = -rp.copy()
            r_blocks = []
            for k in range(nb):
                r = nu * s_inv[k] - x[k]
                if corr is not None:
                    r = r - corr[k]
                r_blocks.append(r)
                rhs += np.einsum("iab,ba->i", prog.a[k], r, optimize=True).real
            dy = np.linalg.solve(m_mat, -rhs)
            ds = [-_adjoint(prog.a[k], dy) for k in range(nb)]
            dx = [
                _herm(r_blocks[k] - _herm(x[k] @ ds[k] @ s_inv[k]))
                for k in range(nb)
            ]
            return dx, dy, ds

        dx_a, dy_a, ds_a = newton(0.0)
        ap = min(1.0, 0.98 * _max_step(x, dx_a))
        ad = min(1.0, 0.98 * _max_step(s, ds_a))
        mu_aff = sum(
            _inner(x[k] + ap * dx_a[k], s[k] + ad * ds_a[k]) for k in range(nb)
        ) / total
        sigma = min(1.0, max(mu_aff / mu, 0.0) ** 3) if mu > 0 else 0.1
        corr = [_herm(dx_a[k] @ ds_a[k] @ s_inv[k]) for k in range(nb)]
        dx, dy, ds = newton(sigma * mu, corr)
        ap = min(1.0, 0.98 * _max_step(x, dx))
        ad = min(1.0, 0.98 * _max_step(s, ds))
        x = [_herm(x[k] + ap * dx[k]) for k in range(nb)]
        y = y + ad * dy

    merit, x, y, s, iteration, gap = best
    if merit <= GAP_ACCEPT:
        return x, y, s, iteration, gap
    raise ConvergenceError(
        f"interior-point solver stalled with merit {merit:.3e} after {iteration} iterations"
    )


def _min_eig(mats) -> float:
    return min(float(np.linalg.eigvalsh(_herm(m)).min()) for m in mats)


def _primal_residual(prog: _Program, x_blocks) -> float:
    res = -prog.b.copy()
    for k in range(len(prog.c)):
        res += np.einsum("iab,ba->i", prog.a[k], x_blocks[k], optimize=True).real
    return float(np.abs(res).max(initial=0.0))


def solve_guessing(ensemble: Ensemble) -> SdpSolution:
    """Optimal guessing probability over all measurements.

    Primal: maximize sum_x p_x tr(M_x rho_x) over POVMs; dual: minimize
    tr Y over Y >= p_x rho_x.  Both optimizers are returned.
    """
    d = ensemble.state_dim
    n = ensemble.size
    basis = _hermitian_basis(d)
    m = len(basis)
    weighted = [p * s.mat for p, s in zip(ensemble.probs, ensemble.states)]
    c_blocks = [-wx for wx in weighted]
    a_stack = np.stack(basis)
    a_stacks = [a_stack for _ in range(n)]
    b_vec = [float(np.trace(e).real) for e in basis]
    x_start = [np.eye(d, dtype=complex) / n for _ in range(n)]
    top = max(float(np.linalg.eigvalsh(wx).max()) for wx in weighted)
    y_dual0 = (1.1 * top + 0.1) * np.eye(d)
    y_start = [-_inner(e, y_dual0) for e in basis]
    prog = _Program(c_blocks, a_stacks, b_vec, x_start, y_start)
    x, y, s, iterations, gap_ip = _solve_program(prog)
    povm = [_herm(mx) for mx in x]
    y_matrix = -_adjoint(a_stack, y)
    primal = sum(_inner(wx, mx) for wx, mx in zip(weighted, povm))
    dual = float(np.trace(y_matrix).real)
    slack_mats = povm + [y_matrix - wx for wx in weighted]
    return SdpSolution(
        SdpShape.GUESSING,
        primal,
        dual,
        {f"povm_{i}": mx for i, mx in enumerate(povm)},
        {"dual_operator": y_matrix},
        abs(primal - dual),
        _min_eig(slack_mats),
        iterations,
        _primal_residual(prog, x),
    )


def solve_min_entropy(state: DensityOperator) -> SdpSolution:
    """min tr(sigma) subject to 1_A (x) sigma >= rho_AB, sigma >= 0.

    The optimized minimal-family entropy at alpha = inf equals
    -log2(primal value).  Dual: max tr(rho X) over X >= 0 with
    tr_A X <= 1_B.
    """
    if len(state.profile) != 2:
        raise ValueError(f"min-entropy program needs a bipartite state, got {state.profile}")
    d_a, d_b = state.profile
    d_ab = d_a * d_b
    rho = state.mat
    basis = _hermitian_basis(d_ab)
    eye_a = np.eye(d_a, dtype=complex)

    def ptr_a(mat: np.ndarray) -> np.ndarray:
        return np.einsum("ibic->bc", mat.reshape(d_a, d_b, d_a, d_b))

    c_blocks = [np.eye(d_b, dtype=complex), np.zeros((d_ab, d_ab), dtype=complex)]
    a_sigma = np.stack([-ptr_a(e) for e in basis])
    a_slack = np.stack(basis)
    b_vec = [-_inner(e, rho) for e in basis]
    top = float(np.linalg.eigvalsh(rho).max())
    sigma0 = (1.1 * top + 0.1) * np.eye(d_b, dtype=complex)
    slack0 = np.kron(eye_a, sigma0) - rho
    witness0 = -0.5 / d_a * np.eye(d_ab)
    y_start = [_inner(e, witness0) for e in basis]
    prog = _Program(c_blocks, [a_sigma, a_slack], b_vec, [sigma0, slack0], y_start)
    x, y, s, iterations, gap_ip = _solve_program(prog)
    sigma = _herm(x[0])
    witness = -_adjoint(a_slack, y)
    primal = float(np.trace(sigma).real)
    dual = _inner(rho, witness)
    slack_mats = [
        sigma,
        np.kron(eye_a, sigma) - rho,
        witness,
        np.eye(d_b) - ptr_a(witness),
    ]
    return SdpSolution(
        SdpShape.MIN_ENTROPY,
        primal,
        dual,
        {"sigma": sigma, "slack": _herm(x[1])},
        {"witness": witness},
        abs(primal - dual),
        _min_eig(slack_mats),
        iterations,
        _primal_residual(prog, x),
    )


def _purified_projector(tau: DensityOperator) -> np.ndarray:
    psi = mat_pow(tau.op, 0.5).mat.reshape(-1)
    return np.outer(psi, psi.conj())


def solve_fidelity_primal(tau: DensityOperator) -> SdpSolution:
    """sup_sigma F(tau_AC, 1_A (x) sigma_C)^2 as a semidefinite program.

    Variables are a PSD operator W on the doubled space (purified
    dimension (|A||C|)^2, which is what caps usable |A||C|) and the
    marginal sigma; the dual variables are the certificate pair (Z, mu).
    """
    if len(tau.profile) != 2:
        raise ValueError(f"fidelity program needs a bipartite state, got {tau.profile}")
    d_a, d_c = tau.profile
    d = d_a * d_c
    tau_pur = _purified_projector(tau)
    basis = _hermitian_basis(d)
    m = len(basis)

    def ptr_a(mat: np.ndarray) -> np.ndarray:
        return np.einsum("ibic->bc", mat.reshape(d_a, d_c, d_a, d_c))

    eye_big = np.eye(d, dtype=complex)
    a_w = np.stack([np.kron(e, eye_big) for e in basis] + [np.zeros((d * d, d * d), complex)])
    a_sigma = np.stack([-ptr_a(e) for e in basis] + [np.eye(d_c, dtype=complex)])
    a_t1 = np.stack(list(basis) + [np.zeros((d, d), complex)])
    a_t2 = np.stack([np.zeros((1, 1), complex)] * m + [np.ones((1, 1), complex)])
    b_vec = [0.0] * m + [1.0]
    c_blocks = [
        -tau_pur,
        np.zeros((d_c, d_c), complex),
        np.zeros((d, d), complex),
        np.zeros((1, 1), complex),
    ]
    sigma0 = np.eye(d_c, dtype=complex) / (2 * d_c)
    w_scale = 1.0 / (4 * d_c * d)
    w0 = w_scale * np.eye(d * d, dtype=complex)
    t10 = np.kron(np.eye(d_a, dtype=complex), sigma0) - w_scale * d * np.eye(d)
    t20 = np.array([[0.5]], dtype=complex)
    z0 = 1.1 * np.eye(d)
    mu0 = 1.1 * d_a + 0.1
    y_start = [-_inner(e, z0) for e in basis] + [-mu0]
    prog = _Program(
        c_blocks, [a_w, a_sigma, a_t1, a_t2], b_vec, [w0, sigma0, t10, t20], y_start
    )
    x, y, s, iterations, gap_ip = _solve_program(prog)
    w_opt = _herm(x[0])
    sigma = _herm(x[1])
    z_matrix = -_adjoint(np.stack(basis), y[:m])
    mu = -float(y[-1])
    primal = _inner(tau_pur, w_opt)
    slack_mats = [
        w_opt,
        sigma,
        np.kron(np.eye(d_a, dtype=complex), sigma) - np.einsum(
            "ajbj->ab", w_opt.reshape(d, d, d, d)
        ),
        np.kron(z_matrix, eye_big) - tau_pur,
        mu * np.eye(d_c) - ptr_a(z_matrix),
    ]
    return SdpSolution(
        SdpShape.FIDELITY_PRIMAL,
        primal,
        mu,
        {"w": w_opt, "sigma": sigma},
        {"z": z_matrix, "mu": mu},
        abs(primal - mu),
        min(_min_eig(slack_mats), 1.0 - float(np.trace(sigma).real)),
        iterations,
        _primal_residual(prog, x),
    )


@dataclass(frozen=True)
class CertificateReport:
    """Explicit dual candidate built from the closed-form marginal.

    mu_star is exactly the squared pretty-good overlap with the lifted
    optimal marginal; the candidate upper-bounds the program value
    precisely when tau commutes with that lifted marginal, so ``feasible``
    tracks ``commutes`` rather than holding unconditionally.
    """

    mu_star: float
    z_star: np.ndarray
    feasible: bool
    matches_fpg: bool
    min_eig_lifted: float
    min_eig_partial: float
    commutator: float
    f_pg_squared: float

    @property
    def commutes(self) -> bool:
        return self.commutator <= 1e-10

    def to_dict(self) -> dict:
        return {
            "mu_star": self.mu_star,
            "feasible": self.feasible,
            "matches_fpg": self.matches_fpg,
            "min_eig_lifted": self.min_eig_lifted,
            "min_eig_partial": self.min_eig_partial,
            "commutator": self.commutator,
            "f_pg_squared": self.f_pg_squared,
        }


def verify_fidelity_certificate(tau: DensityOperator) -> CertificateReport:
    """Build and test the explicit dual pair (mu*, Z*).

    sigma* is the closed-form optimized marginal at index 1/2; the
    candidate is mu* = (tr sqrt(tau) sqrt(1 (x) sigma*))^2 and
    Z* = tr(sqrt(tau) sqrt(1 (x) sigma*)) * Herm(tau^(1/2) (1 (x)
    sigma*)^(-1/2)) with the inverse on the support.  The Hermitian part
    is the identity map whenever [tau, 1 (x) sigma*] = 0, in which case
    the pair is dual feasible and ties the program value to the squared
    pretty-good overlap; for non-commuting tau feasibility fails (it would
    force the squared pretty-good overlap above the true optimum).
    """
    if len(tau.profile) != 2:
        raise ValueError(f"certificate needs a bipartite state, got {tau.profile}")
    d_a, d_c = tau.profile
    d = d_a * d_c
    sqrt_tau = mat_pow(tau.op, 0.5)
    sigma_hat = partial_trace(sqrt_tau, tau.profile, [1])
    sigma_star_raw = sigma_hat.mat @ sigma_hat.mat
    sigma_star = sigma_star_raw / np.trace(sigma_star_raw).real
    lifted = HermitianOperator(np.kron(np.eye(d_a, dtype=complex), sigma_star))
    lifted_half = mat_pow(lifted, 0.5)
    lifted_inv_half = mat_pow(lifted, -0.5)
    overlap = float(np.trace(sqrt_tau.mat @ lifted_half.mat).real)
    mu_star = overlap**2
    raw = sqrt_tau.mat @ lifted_inv_half.mat
    z_star = overlap * _herm(raw)
    tau_pur = _purified_projector(tau)
    min_eig_lifted = float(
        np.linalg.eigvalsh(_herm(np.kron(z_star, np.eye(d)) - tau_pur)).min()
    )
    partial = partial_trace(HermitianOperator(z_star), tau.profile, [1]).mat
    min_eig_partial = float(
        np.linalg.eigvalsh(_herm(mu_star * np.eye(d_c) - partial)).min()
    )
    feasible = min_eig_lifted >= -FEASIBILITY_SLACK and min_eig_partial >= -FEASIBILITY_SLACK
    from .pretty_good import pretty_good_overlap

    f_pg = pretty_good_overlap(tau.op, lifted)
    matches = abs(mu_star - f_pg**2) <= 1e-10 * max(1.0, f_pg**2)
    comm = float(
        np.abs(
            np.linalg.eigvalsh(1j * (tau.mat @ lifted.mat - lifted.mat @ tau.mat))
        ).max(initial=0.0)
    )
    return CertificateReport(
        mu_star,
        z_star,
        feasible,
        matches,
        min_eig_lifted,
        min_eig_partial,
        comm,
        f_pg**2,
    )
