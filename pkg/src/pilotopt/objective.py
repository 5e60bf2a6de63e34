"""A-optimal design objective for pilot selection.

Placing pilots with per-pilot SNR ``alpha`` on a set S updates the information
matrix ``A = diag(1/lambda) + alpha * sum_{i in S} u_i^H u_i`` where ``u_i`` is
the i-th row of the dominant eigenbasis.  The design objective is
``trace(A^{-1})``, the estimation MSE inside the retained subspace; the energy
discarded by the rank truncation is reported separately as an MSE floor.

The inverse ``A^{-1}`` is maintained explicitly (it is r x r with r << M*N) and
updated by the Sherman-Morrison formula, which makes add/remove/swap deltas
O(r^2) instead of a refactorization.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelStatistics, GridConfig
from .errors import (
    BudgetError,
    CandidateError,
    ComplexityGuardError,
    DegenerateUpdateError,
    InvalidSpecError,
)

# Dense P x P error covariances are diagnostics; refuse beyond this grid size.
MAX_DENSE_GRID = 4096


def compute_alpha(beta: float, N: int, K: int, noise_var: float) -> float:
    """Pilot SNR ``alpha = beta * N / (K * noise_var)``.

    ``beta`` is the fraction of block power given to pilots, so the per-pilot
    symbol power is ``beta * N / K`` and alpha is that power over the noise.
    """
    if K < 1 or int(K) != K:
        raise BudgetError(f"pilot budget must be a positive integer, got {K}")
    if beta <= 0 or N < 1 or noise_var <= 0:
        raise InvalidSpecError("beta, N and noise_var must be positive")
    return beta * N / (K * noise_var)


def noise_var_from_snr_db(snr_db: float) -> float:
    """Noise variance for a given symbol SNR in dB, at unit symbol power."""
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class DesignProblem:
    """Immutable inputs of one pilot design instance.

    ``rows`` is the P x r matrix whose i-th row is the grid cell i restricted
    to the dominant channel subspace; ``prior`` holds the r dominant
    eigenvalues.  ``mse_floor_total`` is the truncated covariance energy that
    no pilot placement can recover.
    """

    grid: GridConfig
    rows: np.ndarray
    prior: np.ndarray
    pilot_snr: float
    budget: int
    power_fraction: float
    noise_var: float
    mse_floor_total: float = 0.0

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.complex128)
        prior = np.asarray(self.prior, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != self.grid.size:
            raise InvalidSpecError(
                f"rows must be (P, r) with P = {self.grid.size}, got {rows.shape}"
            )
        if prior.shape != (rows.shape[1],):
            raise InvalidSpecError("prior length must match the subspace rank")
        if np.any(prior <= 0):
            raise InvalidSpecError("prior eigenvalues must be positive")
        if not 1 <= self.budget <= self.grid.size:
            raise BudgetError(f"budget {self.budget} outside [1, {self.grid.size}]")
        if self.power_fraction <= 0:
            raise InvalidSpecError("power_fraction must be positive")
        if self.power_fraction > 1 + 1e-12:
            warnings.warn(
                f"power_fraction {self.power_fraction:g} > 1: pilot power exceeds "
                "the block budget (happens when K > N with unit pilot power)",
                stacklevel=2,
            )
        expected = compute_alpha(self.power_fraction, self.grid.N, self.budget, self.noise_var)
        if abs(self.pilot_snr - expected) > 1e-9 * max(expected, 1.0):
            raise InvalidSpecError(
                f"pilot_snr {self.pilot_snr:g} inconsistent with "
                f"beta*N/(K*noise_var) = {expected:g}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "prior", prior)

    @property
    def rank(self) -> int:
        return self.rows.shape[1]

    @property
    def pilot_power(self) -> float:
        """Per-pilot symbol power ``sigma_p^2 = beta * N / K``."""
        return self.power_fraction * self.grid.N / self.budget

    def with_budget(self, K: int) -> "DesignProblem":
        """Same statistics and power fraction, different pilot count."""
        return DesignProblem(
            grid=self.grid,
            rows=self.rows,
            prior=self.prior,
            pilot_snr=compute_alpha(self.power_fraction, self.grid.N, K, self.noise_var),
            budget=K,
            power_fraction=self.power_fraction,
            noise_var=self.noise_var,
            mse_floor_total=self.mse_floor_total,
        )


def make_design_problem(
    stats: ChannelStatistics,
    K: int,
    snr_db: float | None = None,
    noise_var: float | None = None,
    beta: float | None = None,
) -> DesignProblem:
    """Assemble a design problem from channel statistics.

    Exactly one of ``snr_db`` / ``noise_var`` must be given; SNR in dB is
    mapped to ``noise_var = 10^(-SNR/10)`` at unit symbol power.  ``beta``
    defaults to ``K/N`` so the per-pilot power is 1 (the block average).
    """
    if (snr_db is None) == (noise_var is None):
        raise InvalidSpecError("specify exactly one of snr_db or noise_var")
    if noise_var is None:
        noise_var = noise_var_from_snr_db(snr_db)
    if noise_var <= 0:
        raise InvalidSpecError("noise_var must be positive")
    if beta is None:
        beta = K / stats.grid.N
    return DesignProblem(
        grid=stats.grid,
        rows=stats.eigvecs,
        prior=stats.eigvals,
        pilot_snr=compute_alpha(beta, stats.grid.N, K, noise_var),
        budget=K,
        power_fraction=beta,
        noise_var=noise_var,
        mse_floor_total=stats.truncated_power,
    )


@dataclass(frozen=True)
class PilotPattern:
    """A binary pilot placement: K distinct flat indices on the grid."""

    indices: tuple
    grid: GridConfig

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise InvalidSpecError("pilot indices must be distinct")
        if idx and not all(0 <= i < self.grid.size for i in idx):
            raise InvalidSpecError("pilot index outside the grid")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    def __len__(self) -> int:
        return len(self.indices)

    def mask(self) -> np.ndarray:
        c = np.zeros(self.grid.size)
        c[list(self.indices)] = 1.0
        return c

    def cells(self) -> list:
        """Pilot positions as (m, n) pairs."""
        return [self.grid.cell(k) for k in self.indices]


@dataclass(frozen=True)
class FractionalAllocation:
    """Box-constrained pilot weights summing to the budget K."""

    weights: np.ndarray
    budget: int
    converged: bool = field(default=True, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-9) or np.any(w > 1 + 1e-9):
            raise InvalidSpecError("allocation weights must lie in [0, 1]")
        if abs(w.sum() - self.budget) > 1e-6:
            raise InvalidSpecError(
                f"allocation weights sum to {w.sum():.9f}, expected {self.budget}"
            )
        object.__setattr__(self, "weights", w)


def _weight_vector(problem: DesignProblem, pattern) -> np.ndarray:
    if isinstance(pattern, PilotPattern):
        if pattern.grid != problem.grid:
            raise InvalidSpecError("pattern grid does not match the problem grid")
        return pattern.mask()
    if isinstance(pattern, FractionalAllocation):
        w = pattern.weights
    else:
        w = np.asarray(pattern, dtype=float)
    if w.shape != (problem.grid.size,):
        raise InvalidSpecError(f"weights must have length {problem.grid.size}")
    return w


def build_A(problem: DesignProblem, pattern) -> np.ndarray:
    """Information matrix ``A = diag(1/prior) + alpha * rows^H diag(w) rows``."""
    A = np.diag(1.0 / problem.prior).astype(np.complex128)
    if isinstance(pattern, PilotPattern):
        if pattern.grid != problem.grid:
            raise InvalidSpecError("pattern grid does not match the problem grid")
        U_sel = problem.rows[list(pattern.indices)]
        A += problem.pilot_snr * U_sel.conj().T @ U_sel
    else:
        w = _weight_vector(problem, pattern)
        U = problem.rows
        A += problem.pilot_snr * (U.conj().T * w) @ U
    return 0.5 * (A + A.conj().T)


def _trace_inverse(A: np.ndarray) -> float:
    return float(np.trace(np.linalg.inv(A)).real)


def objective_value(problem: DesignProblem, pattern) -> float:
    """The design objective ``trace(A^{-1})`` for a pattern or allocation."""
    return _trace_inverse(build_A(problem, pattern))


def average_mse(problem: DesignProblem, objective: float) -> float:
    """Per-cell MSE: subspace objective plus truncation floor, over M*N."""
    return (objective + problem.mse_floor_total) / problem.grid.size


@dataclass
class ObjectiveState:
    """Mutable objective bookkeeping owned by a single optimizer run."""

    problem: DesignProblem
    A_inv: np.ndarray
    value: float
    selected: set

    @classmethod
    def empty(cls, problem: DesignProblem) -> "ObjectiveState":
        A_inv = np.diag(problem.prior).astype(np.complex128)
        return cls(problem, A_inv, float(problem.prior.sum()), set())

    @classmethod
    def from_pattern(cls, problem: DesignProblem, pattern: PilotPattern) -> "ObjectiveState":
        A_inv = np.linalg.inv(build_A(problem, pattern))
        A_inv = 0.5 * (A_inv + A_inv.conj().T)
        return cls(problem, A_inv, float(np.trace(A_inv).real), set(pattern.indices))

    def pattern(self) -> PilotPattern:
        return PilotPattern(tuple(sorted(self.selected)), self.problem.grid)


def _update_terms(state: ObjectiveState, j: int):
    """Return (z, quad, norm2) for index j: z = A_inv w_j, quad = w_j^H z."""
    w = state.problem.rows[j].conj()
    z = state.A_inv @ w
    quad = float(np.real(w.conj() @ z))
    return z, quad, float(np.real(np.vdot(z, z)))


def marginal_gain(state: ObjectiveState, j: int, problem: DesignProblem | None = None) -> float:
    """Objective decrease from adding candidate j:
    ``alpha * u_j A^{-2} u_j^H / (1 + alpha * u_j A^{-1} u_j^H)``."""
    if j in state.selected:
        raise CandidateError(f"index {j} is already selected")
    problem = problem or state.problem
    _, quad, norm2 = _update_terms(state, j)
    return problem.pilot_snr * norm2 / (1.0 + problem.pilot_snr * quad)


def gains_for_candidates(A_inv: np.ndarray, rows: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorized marginal gains for every row in ``rows`` against ``A_inv``."""
    Z = (rows @ A_inv).conj()
    norm2 = np.einsum("ij,ij->i", Z, Z.conj()).real
    quad = np.einsum("ij,ij->i", rows, Z).real
    return alpha * norm2 / (1.0 + alpha * quad)


def rank_one_update(state: ObjectiveState, j: int, sign: str) -> ObjectiveState:
    """Sherman-Morrison add ('add') or remove ('remove') of index j, in place."""
    alpha = state.problem.pilot_snr
    if sign == "add":
        if j in state.selected:
            raise CandidateError(f"cannot add {j}: already selected")
        z, quad, _ = _update_terms(state, j)
        denom = 1.0 + alpha * quad
        state.A_inv -= (alpha / denom) * np.outer(z, z.conj())
        state.selected.add(j)
    elif sign == "remove":
        if j not in state.selected:
            raise CandidateError(f"cannot remove {j}: not selected")
        z, quad, _ = _update_terms(state, j)
        denom = 1.0 - alpha * quad
        if denom <= 1e-12:
            raise DegenerateUpdateError(
                f"removal of {j} hit denominator {denom:g}; state is inconsistent"
            )
        state.A_inv += (alpha / denom) * np.outer(z, z.conj())
        state.selected.discard(j)
    else:
        raise ValueError(f"sign must be 'add' or 'remove', got {sign!r}")
    # Symmetrize to suppress drift over long update chains.
    state.A_inv = 0.5 * (state.A_inv + state.A_inv.conj().T)
    state.value = float(np.trace(state.A_inv).real)
    return state


def removal_terms(state: ObjectiveState, i: int):
    """Objective increase and downdated inverse for removing selected index i."""
    alpha = state.problem.pilot_snr
    z, quad, norm2 = _update_terms(state, i)
    denom = 1.0 - alpha * quad
    if denom <= 1e-12:
        raise DegenerateUpdateError(f"removal of {i} hit denominator {denom:g}")
    increase = alpha * norm2 / denom
    A_inv_without = state.A_inv + (alpha / denom) * np.outer(z, z.conj())
    return increase, 0.5 * (A_inv_without + A_inv_without.conj().T)


def swap_delta(state: ObjectiveState, i: int, j: int, problem: DesignProblem | None = None) -> float:
    """Exact objective change of swapping selected i for unselected j.

    Negative means the swap improves.  Composed from two rank-one updates, no
    refactorization.
    """
    if i not in state.selected:
        raise CandidateError(f"swap source {i} is not selected")
    if j in state.selected:
        raise CandidateError(f"swap target {j} is already selected")
    problem = problem or state.problem
    increase, A_inv_without = removal_terms(state, i)
    gain = gains_for_candidates(A_inv_without, problem.rows[j : j + 1], problem.pilot_snr)[0]
    return increase - float(gain)


def objective_gradient(problem: DesignProblem, allocation) -> np.ndarray:
    """Gradient of the relaxed objective: ``-alpha * u_i A^{-2} u_i^H`` per cell."""
    A_inv = np.linalg.inv(build_A(problem, allocation))
    A_inv = 0.5 * (A_inv + A_inv.conj().T)
    Z = (problem.rows @ A_inv).conj()
    return -problem.pilot_snr * np.einsum("ij,ij->i", Z, Z.conj()).real


def error_covariance(problem: DesignProblem, pattern) -> np.ndarray:
    """Full error covariance ``U_r A^{-1} U_r^H``; diagnostics only."""
    if problem.grid.size > MAX_DENSE_GRID:
        raise ComplexityGuardError(
            f"refusing {problem.grid.size}^2 error covariance (limit {MAX_DENSE_GRID})"
        )
    A_inv = np.linalg.inv(build_A(problem, pattern))
    C_e = problem.rows @ A_inv @ problem.rows.conj().T
    return 0.5 * (C_e + C_e.conj().T)
