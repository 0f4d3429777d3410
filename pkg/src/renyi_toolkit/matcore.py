"""Dense complex-matrix kernel.

Hermitian eigendecomposition, positive-semidefinite matrix powers with
generalized-inverse conventions, Schatten (quasi-)norms, Kronecker
products, partial traces and commutator norms.  Everything operates on
small dense matrices (dimensions up to a few hundred); all functions are
pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "MatrixError",
    "DimensionError",
    "ConvergenceError",
    "HermitianOperator",
    "EigenDecomposition",
    "as_matrix",
    "as_operator",
    "eigh",
    "eigh_jacobi",
    "mat_pow",
    "tr_pow",
    "rank_tolerance",
    "schatten_norm",
    "tensor",
    "partial_trace",
    "commutator_norm",
    "matrix_to_json",
    "matrix_from_json",
]

# Relative tolerance admitted for the anti-Hermitian part of inputs.
HERMITICITY_TOL = 1e-12

# Eigenvalues at or below dim * ||M||_inf * RANK_TOL_FACTOR count as zero
# in every generalized inverse / support projector; one global convention
# keeps the supports of different operators mutually consistent.
RANK_TOL_FACTOR = 1e-12


class MatrixError(ValueError):
    """Raised when a matrix violates a structural precondition."""


class DimensionError(MatrixError):
    """Raised when matrix or tensor-factor dimensions are inconsistent."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative kernel exceeds its iteration cap."""


class EigenDecomposition(NamedTuple):
    """Spectral decomposition M = V diag(w) V^dag with w ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(value) -> np.ndarray:
    """Coerce input to a complex 2-D ndarray without copying when possible."""
    if isinstance(value, HermitianOperator):
        return value.mat
    mat = np.asarray(value, dtype=complex)
    if mat.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={mat.ndim}")
    return mat


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dense square matrix certified Hermitian at construction.

    The stored form is exactly (M + M^dag)/2; construction rejects inputs
    whose anti-Hermitian part exceeds ``HERMITICITY_TOL`` relative to the
    operator norm.  The eigendecomposition is computed once on demand and
    cached, which is what makes repeated matrix powers of the same operator
    cheap.
    """

    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"operator must be square, got shape {mat.shape}")
        scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
        drift = float(np.abs(mat - mat.conj().T).max(initial=0.0))
        if drift > 2 * HERMITICITY_TOL * scale * mat.shape[0]:
            raise MatrixError(
                f"matrix is not Hermitian: anti-Hermitian part {drift:.3e} "
                f"exceeds tolerance for scale {scale:.3e}"
            )
        herm = (mat + mat.conj().T) / 2
        herm.flags.writeable = False
        object.__setattr__(self, "mat", herm)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        return eigh(self.mat)

    @classmethod
    def from_eig(cls, eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> "HermitianOperator":
        """Build V diag(w) V^dag with the eigendecomposition pre-cached."""
        w = np.asarray(eigenvalues, dtype=float)
        v = np.asarray(eigenvectors, dtype=complex)
        op = cls((v * w) @ v.conj().T)
        order = np.argsort(w, kind="stable")
        op.__dict__["eig"] = EigenDecomposition(w[order], v[:, order])
        return op

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def __matmul__(self, other):
        return self.mat @ as_matrix(other)

    def __rmatmul__(self, other):
        return as_matrix(other) @ self.mat


def as_operator(value) -> HermitianOperator:
    """Coerce a matrix-like value (or pass through) to a HermitianOperator."""
    if isinstance(value, HermitianOperator):
        return value
    op = getattr(value, "op", None)
    if isinstance(op, HermitianOperator):
        return op
    return HermitianOperator(as_matrix(value))


def eigh(M) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Backed by LAPACK; ``eigh_jacobi`` provides the library's self-contained
    reference path and the two are cross-validated in the test suite.
    """
    mat = M.mat if isinstance(M, HermitianOperator) else as_matrix(M)
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    return EigenDecomposition(w, v)


def eigh_jacobi(M, max_sweeps: int = 60, tol: float = 1e-15) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition for complex Hermitian matrices.

    Sweeps zero out one off-diagonal entry at a time with 2x2 complex
    rotations until the off-diagonal Frobenius mass falls below
    ``tol * ||M||_F``.  Quadratic convergence makes the sweep cap
    unreachable for any matrix of dimension <= 64.

    Raises:
        ConvergenceError: the off-diagonal mass failed to vanish within
            ``max_sweeps`` sweeps.
    """
    A = np.array(as_matrix(M), dtype=complex)
    n = A.shape[0]
    if n != A.shape[1]:
        raise DimensionError("eigh_jacobi requires a square matrix")
    A = (A + A.conj().T) / 2
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        return EigenDecomposition(np.diag(A).real.copy(), V)
    threshold = tol * norm
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= threshold:
            w = np.diag(A).real.copy()
            order = np.argsort(w, kind="stable")
            return EigenDecomposition(w[order], V[:, order])
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= threshold / n:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / abs(apq)
                # Real rotation angle for the phase-aligned 2x2 block.
                tau = (aqq - app) / (2 * abs(apq))
                t = np.sign(tau) / (abs(tau) + np.sqrt(1 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1 + t * t)
                s = t * c
                # J diagonalizes the (p,q) block of A under A -> J^dag A J.
                J = np.array([[c, s * phase], [-s * np.conj(phase), c]], dtype=complex)
                A[:, [p, q]] = A[:, [p, q]] @ J
                A[[p, q], :] = J.conj().T @ A[[p, q], :]
                V[:, [p, q]] = V[:, [p, q]] @ J
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    raise ConvergenceError(
        f"Jacobi eigensolver did not converge within {max_sweeps} sweeps (dim={n})"
    )


def rank_tolerance(eigenvalues: np.ndarray, dim: int) -> float:
    """Support cutoff dim * ||M||_inf * 1e-12 from a spectrum."""
    top = float(np.abs(eigenvalues).max(initial=0.0))
    return dim * top * RANK_TOL_FACTOR


def _checked_psd_spectrum(op: HermitianOperator, neg_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    w, v = op.eig
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w[0] < -neg_tol * scale:
        raise MatrixError(
            f"operator is not positive semidefinite: min eigenvalue {w[0]:.3e}"
        )
    return np.maximum(w, 0.0), v


def mat_pow(M, p: float) -> HermitianOperator:
    """Matrix power of a PSD operator with generalized-inverse conventions.

    Eigenvalues at or below the rank tolerance map to zero for every
    exponent, so negative powers act as generalized inverses and ``p = 0``
    yields the support projector.
    """
    op = as_operator(M)
    w, v = _checked_psd_spectrum(op)
    cutoff = rank_tolerance(w, op.dim)
    wp = np.zeros_like(w)
    mask = w > cutoff
    if p == 0:
        wp[mask] = 1.0
    else:
        wp[mask] = w[mask] ** p
    return HermitianOperator.from_eig(wp, v)


def tr_pow(M, s: float) -> float:
    """tr(M^s) of a PSD operator over its support (junk eigenvalues dropped)."""
    op = as_operator(M)
    w, _ = _checked_psd_spectrum(op)
    cutoff = rank_tolerance(w, op.dim)
    w = w[w > cutoff]
    if w.size == 0:
        return 0.0
    if s == 0:
        return float(w.size)
    return float(np.sum(w**s))


def support_projector(M) -> HermitianOperator:
    """Projector onto the support of a PSD operator."""
    return mat_pow(M, 0.0)


def singular_values_onesided(X: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Singular values by one-sided (Hestenes) Jacobi, descending.

    Orthogonalizes column pairs with 2x2 rotations until all column inner
    products vanish relative to the column norms.  For matrices whose
    columns are individually scaled over many decades this preserves the
    *relative* accuracy of every singular value, which a conventional SVD
    of the assembled product does not.
    """
    A = np.array(X, dtype=complex)
    rows, cols = A.shape
    if cols == 0 or rows == 0:
        return np.zeros(min(rows, cols))
    # Columns whose norm collapses this far below the largest are either
    # structural zeros being orthogonalized away or contribute below any
    # tolerance used in this library; freezing them avoids cycling between
    # linearly dependent columns.
    floor_rel = 1e-130
    for _ in range(max_sweeps):
        converged = True
        norms = np.sum(np.abs(A) ** 2, axis=0)
        floor = norms.max(initial=0.0) * floor_rel**2
        A[:, norms <= floor] = 0.0
        for i in range(cols - 1):
            ci = A[:, i]
            ni = float(np.vdot(ci, ci).real)
            for j in range(i + 1, cols):
                cj = A[:, j]
                nj = float(np.vdot(cj, cj).real)
                cij = complex(np.vdot(ci, cj))
                if ni <= floor or nj <= floor or abs(cij) <= tol * np.sqrt(ni * nj):
                    continue
                converged = False
                phase = cij / abs(cij)
                tau = (nj - ni) / (2 * abs(cij))
                t = np.sign(tau) / (abs(tau) + np.sqrt(1 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1 + t * t)
                s = t * c
                new_i = c * ci - s * np.conj(phase) * cj
                new_j = s * phase * ci + c * cj
                A[:, i] = new_i
                A[:, j] = new_j
                ci = A[:, i]
                ni = float(np.vdot(ci, ci).real)
        if converged:
            break
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise ConvergenceError(f"one-sided Jacobi SVD did not converge for shape {A.shape}")
    sv = np.sqrt(np.sum(np.abs(A) ** 2, axis=0))
    sv.sort()
    return sv[::-1]


def graded_product_sv(
    w_left: np.ndarray,
    v_left: np.ndarray,
    p_left: float,
    w_right: np.ndarray,
    v_right: np.ndarray,
    p_right: float,
) -> np.ndarray:
    """Singular values of left^p_left @ right^p_right from spectral data.

    The spectra must already be clamped (non-negative); entries at or below
    zero are treated as exact kernel directions.  The product is assembled
    in the graded form diag(w_l^p) U diag(w_r^p) with U a submatrix of a
    unitary, so the one-sided Jacobi SVD resolves singular values across
    the full dynamic range.  Singular values beyond min(rank_l, rank_r) are
    structural zeros and are returned as exact zeros.
    """
    left_idx = np.flatnonzero(w_left > 0)
    right_idx = np.flatnonzero(w_right > 0)
    total = min(len(w_left), len(w_right))
    if len(left_idx) == 0 or len(right_idx) == 0:
        return np.zeros(total)
    u = v_left[:, left_idx].conj().T @ v_right[:, right_idx]
    x = (w_left[left_idx] ** p_left)[:, None] * u * (w_right[right_idx] ** p_right)[None, :]
    sv = singular_values_onesided(x)
    k = min(len(left_idx), len(right_idx))
    out = np.zeros(total)
    out[: min(k, len(sv))] = sv[: min(k, len(sv))]
    return out


def schatten_norm(L, p: float) -> float:
    """Schatten p-(quasi-)norm (tr |L|^p)^(1/p) of any linear operator.

    ``p = inf`` gives the operator norm, ``p = 1`` the trace norm; values
    in (0, 1) are quasi-norms.  Evaluation runs in log space so that very
    large finite ``p`` does not overflow.
    """
    if not p > 0:
        raise ValueError(f"Schatten norm requires p > 0, got {p}")
    mat = as_matrix(L)
    sv = np.linalg.svd(mat, compute_uv=False)
    top = float(sv.max(initial=0.0))
    if top == 0.0:
        return 0.0
    if np.isinf(p):
        return top
    sv = sv[sv > max(mat.shape) * top * RANK_TOL_FACTOR]
    logs = p * np.log(sv / top)
    return float(top * np.exp(np.log(np.exp(logs).sum()) / p))


def tensor(M1, M2) -> HermitianOperator:
    """Kronecker product of two Hermitian operators."""
    return HermitianOperator(np.kron(as_matrix(M1), as_matrix(M2)))


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim, dtype=complex))


def check_profile(profile: Sequence[int], dim: int) -> tuple[int, ...]:
    factors = tuple(int(f) for f in profile)
    if any(f <= 0 for f in factors):
        raise DimensionError(f"profile factors must be positive, got {factors}")
    if int(np.prod(factors)) != dim:
        raise DimensionError(f"profile {factors} does not multiply to dimension {dim}")
    return factors


def partial_trace(M, profile: Sequence[int], keep: Iterable[int]) -> HermitianOperator:
    """Trace out all tensor factors not listed in ``keep``.

    ``profile`` lists the subsystem dimensions in tensor order; ``keep`` is
    a set of factor indices.  The result is Hermitian and has the same
    trace as the input.
    """
    mat = as_matrix(M)
    factors = check_profile(profile, mat.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(factors) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for profile {factors}")
    n = len(factors)
    tensor_form = mat.reshape(factors + factors)
    for axis in reversed(range(n)):
        if axis in keep:
            continue
        current_n = tensor_form.ndim // 2
        tensor_form = np.trace(tensor_form, axis1=axis, axis2=axis + current_n)
    d_keep = int(np.prod([factors[k] for k in keep])) if keep else 1
    return HermitianOperator(tensor_form.reshape(d_keep, d_keep))


def commutator_norm(M, N) -> float:
    """Operator norm of the commutator [M, N] of two Hermitian operators."""
    a = as_matrix(M)
    b = as_matrix(N)
    if a.shape != b.shape:
        raise DimensionError(f"commutator of mismatched shapes {a.shape} vs {b.shape}")
    comm = a @ b - b @ a
    # i[M, N] is Hermitian for Hermitian M, N.
    return float(np.abs(np.linalg.eigvalsh(1j * comm)).max(initial=0.0))


def matrix_to_json(M) -> dict:
    """Interchange form {"dim": n, "re": [[...]], "im": [[...]]}."""
    mat = as_matrix(M)
    return {
        "dim": int(mat.shape[0]),
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
    }


def matrix_from_json(data: dict) -> np.ndarray:
    dim = int(data["dim"])
    mat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    if mat.shape != (dim, dim):
        raise DimensionError(f"matrix payload shape {mat.shape} does not match dim {dim}")
    return mat
