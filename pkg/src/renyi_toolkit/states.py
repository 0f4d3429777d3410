"""State-level constructions.

Density operators with tensor-factor profiles, ensembles, canonical
purifications, classically coherent purifications, Gram matrices, the
cyclic shift unitary, and seeded random generators with documented
stream splitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matcore import (
    DimensionError,
    HermitianOperator,
    MatrixError,
    as_matrix,
    check_profile,
    mat_pow,
    partial_trace,
    tensor,
)

__all__ = [
    "DensityOperator",
    "PureState",
    "Ensemble",
    "substream",
    "random_density",
    "random_density_from",
    "random_pure_from",
    "random_hermitian_from",
    "random_psd_from",
    "random_ensemble_from",
    "canonical_purification",
    "cq_state",
    "classically_coherent_purification",
    "gram_matrix",
    "shift_unitary",
    "maximally_entangled",
    "maximally_mixed",
]

TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-10

# Fixed second key word so that substreams derived from small user seeds do
# not collide with the raw counter-based streams of other tools.
_KEY_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace operator with a factor profile."""

    op: HermitianOperator
    profile: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.op, HermitianOperator):
            object.__setattr__(self, "op", HermitianOperator(as_matrix(self.op)))
        profile = self.profile or (self.op.dim,)
        object.__setattr__(self, "profile", check_profile(profile, self.op.dim))
        tr = self.op.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise MatrixError(f"density operator must have unit trace, got {tr}")
        w, v = self.op.eig
        if w[0] < -NEG_EIG_TOL:
            raise MatrixError(f"density operator has negative eigenvalue {w[0]:.3e}")
        if w[0] < 0.0:
            # Clamp rounding-level negatives so downstream powers are clean.
            self.op.__dict__["eig"] = type(self.op.eig)(np.maximum(w, 0.0), v)

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    @property
    def dim(self) -> int:
        return self.op.dim

    def factor_dim(self, index: int) -> int:
        return self.profile[index]

    def reduce(self, keep: Sequence[int]) -> "DensityOperator":
        """Partial trace keeping the listed factors."""
        reduced = partial_trace(self.op, self.profile, keep)
        new_profile = tuple(self.profile[k] for k in sorted(set(keep)))
        return DensityOperator(reduced, new_profile)

    def with_profile(self, profile: Sequence[int]) -> "DensityOperator":
        return DensityOperator(self.op, tuple(profile))


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector with a tensor-factor profile."""

    amplitudes: np.ndarray = field(repr=False)
    profile: tuple[int, ...] = ()

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-12:
            raise MatrixError(f"pure state must be normalized, got norm {norm}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        profile = self.profile or (amps.size,)
        object.__setattr__(self, "profile", check_profile(profile, amps.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityOperator:
        proj = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(HermitianOperator(proj), self.profile)

    def reduce(self, keep: Sequence[int]) -> DensityOperator:
        """Reduced state on the kept factors, contracted without forming
        the full projector."""
        keep = sorted(set(int(k) for k in keep))
        psi = self.amplitudes.reshape(self.profile)
        dropped = [i for i in range(len(self.profile)) if i not in keep]
        rho = np.tensordot(psi, psi.conj(), axes=(dropped, dropped))
        d = int(np.prod([self.profile[k] for k in keep]))
        new_profile = tuple(self.profile[k] for k in keep)
        return DensityOperator(HermitianOperator(rho.reshape(d, d)), new_profile)

    def regroup(self, groups: Sequence[Sequence[int]]) -> "PureState":
        """Merge consecutive factors into coarser ones (profile reshaping)."""
        new_profile = []
        flat = []
        for g in groups:
            flat.extend(g)
            new_profile.append(int(np.prod([self.profile[i] for i in g])))
        if flat != list(range(len(self.profile))):
            raise DimensionError("groups must partition the factors in order")
        return PureState(self.amplitudes, tuple(new_profile))


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Probability vector paired with density operators on a common space."""

    probs: np.ndarray
    states: tuple[DensityOperator, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != probs.size:
            raise DimensionError("ensemble needs one state per probability")
        if probs.min(initial=0.0) < 0 or abs(probs.sum() - 1.0) > 1e-12:
            raise MatrixError(f"probabilities must be a distribution, got {probs}")
        dims = {s.dim for s in self.states}
        if len(dims) > 1:
            raise DimensionError(f"ensemble states live on different spaces: {dims}")

    @property
    def size(self) -> int:
        return self.probs.size

    @property
    def state_dim(self) -> int:
        return self.states[0].dim

    def average_state(self) -> DensityOperator:
        avg = sum(p * s.mat for p, s in zip(self.probs, self.states))
        return DensityOperator(HermitianOperator(avg), (self.state_dim,))


def substream(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic counter-based substream for a master seed.

    Built on Philox so the bit-stream is fixed across platforms; each
    distinct ``stream`` index tuple yields an independent stream, which is
    what makes parallel and serial harness runs agree exactly.
    """
    counter = list(stream[:3]) + [0] * (4 - min(3, len(stream)))
    key = [np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(_KEY_SALT)]
    bitgen = np.random.Philox(counter=np.array(counter[:4], dtype=np.uint64), key=key)
    return np.random.Generator(bitgen)


def random_density_from(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must satisfy 1 <= rank <= dim, got {rank} for dim {dim}")
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    raw = g @ g.conj().T
    return DensityOperator(HermitianOperator(raw / np.trace(raw).real), (dim,))


def random_density(dim: int, rank: int | None = None, seed: int = 0) -> DensityOperator:
    """Wishart-style random state G G^dag / tr, deterministic in ``seed``."""
    return random_density_from(substream(seed), dim, rank)


def random_pure_from(rng: np.random.Generator, profile: Sequence[int]) -> PureState:
    profile = tuple(int(p) for p in profile)
    dim = int(np.prod(profile))
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(v / np.linalg.norm(v), profile)


def random_hermitian_from(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianOperator:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (m + m.conj().T) / 2)


def random_psd_from(rng: np.random.Generator, dim: int, rank: int | None = None, scale: float = 1.0) -> HermitianOperator:
    rank = dim if rank is None else int(rank)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return HermitianOperator(scale * (g @ g.conj().T) / dim)


def random_ensemble_from(
    rng: np.random.Generator,
    n_states: int,
    dim: int,
    ranks: Sequence[int] | None = None,
) -> Ensemble:
    probs = rng.dirichlet(np.ones(n_states))
    if ranks is None:
        ranks = [int(rng.integers(1, dim + 1)) for _ in range(n_states)]
    states = tuple(random_density_from(rng, dim, r) for r in ranks)
    return Ensemble(probs, states)


def maximally_mixed(profile: Sequence[int]) -> DensityOperator:
    profile = tuple(int(p) for p in profile)
    dim = int(np.prod(profile))
    return DensityOperator(HermitianOperator(np.eye(dim, dtype=complex) / dim), profile)


def maximally_entangled(dim: int) -> PureState:
    """(1/sqrt(d)) sum_k |k>|k> on a (d, d) profile."""
    v = np.eye(dim, dtype=complex).ravel() / np.sqrt(dim)
    return PureState(v, (dim, dim))


def canonical_purification(rho: DensityOperator) -> PureState:
    """Purify with respect to the unnormalized vector sum_k |k>|k>.

    The output lives on the original factors plus one purifying factor of
    the same total dimension, so tracing out the last factor recovers the
    input exactly.
    """
    root = mat_pow(rho.op, 0.5)
    amps = root.mat.reshape(-1)
    return PureState(amps, rho.profile + (rho.dim,))


def cq_state(ensemble: Ensemble) -> DensityOperator:
    """Classical-quantum state sum_x p_x |x><x| (x) rho_x on X (x) B."""
    n = ensemble.size
    d = ensemble.state_dim
    out = np.zeros((n * d, n * d), dtype=complex)
    for x, (p, state) in enumerate(zip(ensemble.probs, ensemble.states)):
        out[x * d : (x + 1) * d, x * d : (x + 1) * d] = p * state.mat
    return DensityOperator(HermitianOperator(out), (n, d))


def _purification_matrices(ensemble: Ensemble) -> list[np.ndarray]:
    # |xi_x> = (sqrt(rho_x) (x) 1)|Omega> stored as its d x d coefficient matrix.
    return [mat_pow(s.op, 0.5).mat for s in ensemble.states]


def classically_coherent_purification(ensemble: Ensemble) -> PureState:
    """sum_x sqrt(p_x) |x>_X |x>_X' |xi_x>_BB' with canonical |xi_x>.

    Profile (n, n, d, d): tracing out the primed factors (X', B') yields
    ``cq_state``; tracing out B leaves a state whose (X, X') part carries
    the classical label coherently.
    """
    n = ensemble.size
    d = ensemble.state_dim
    xis = _purification_matrices(ensemble)
    amps = np.zeros((n, n, d, d), dtype=complex)
    for x, (p, xi) in enumerate(zip(ensemble.probs, xis)):
        amps[x, x] = np.sqrt(p) * xi
    return PureState(amps.reshape(-1), (n, n, d, d))


def gram_matrix(ensemble: Ensemble) -> HermitianOperator:
    """Generalized Gram matrix on X' (x) B'.

    Block (x, x') holds sqrt(p_x p_x') tr_B |xi_x><xi_x'|, with the row
    index as the ket index; for pure ensemble members the compression onto
    the purification vectors recovers the textbook Gram matrix of pairwise
    overlaps.  The output is PSD with unit trace.
    """
    n = ensemble.size
    d = ensemble.state_dim
    xis = _purification_matrices(ensemble)
    sqrt_p = np.sqrt(ensemble.probs)
    out = np.zeros((n * d, n * d), dtype=complex)
    for x in range(n):
        for xp in range(n):
            # tr_B |xi_x><xi_x'| = conj(sqrt(rho_x) sqrt(rho_x')) for the
            # canonical purification.
            block = (xis[x] @ xis[xp]).conj()
            out[x * d : (x + 1) * d, xp * d : (xp + 1) * d] = sqrt_p[x] * sqrt_p[xp] * block
    return HermitianOperator(out)


def shift_unitary(dim_x: int) -> np.ndarray:
    """Controlled cyclic shift sum_{x',x} |x-x'><x| (x) |x'><x'| on X (x) X'.

    Arithmetic inside the ket is modulo ``dim_x``; conjugating the
    classically coherent marginal by it concentrates the X register on
    |0> and leaves the Gram matrix on the primed factors.
    """
    n = dim_x
    u = np.zeros((n * n, n * n), dtype=complex)
    for x in range(n):
        for xp in range(n):
            u[((x - xp) % n) * n + xp, x * n + xp] = 1.0
    return u
