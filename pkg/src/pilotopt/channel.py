"""Second-order statistics of a doubly dispersive WSSUS channel on a finite
time-frequency grid.

The channel is separable: the grid covariance factors as a Kronecker product
``C_g = C_t (x) C_f`` of a symbol-axis correlation ``C_t`` and a subcarrier-axis
correlation ``C_f``, both Toeplitz with unit diagonal.  Eigendecomposing the
two small factors gives the eigenpairs of the full ``MN x MN`` covariance at
``O(M^3 + N^3)`` cost; the dominant pairs form the reduced-rank basis used by
the design objective and the LMMSE estimator.
"""

import warnings
from dataclasses import dataclass
from enum import Enum
from math import sqrt

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import j0

from .errors import ComplexityGuardError, InvalidSpecError, NumericError

# Eigenvalues below this fraction of the largest one are always dropped from
# the reduced-rank basis, regardless of the energy threshold.
EIGENVALUE_FLOOR = 1e-12

# Diagnostic helpers refuse to materialize covariances larger than this.
MAX_DENSE_GRID = 4096


class DelayProfile(str, Enum):
    UNIFORM = "uniform"
    TRUNCATED_EXPONENTIAL = "truncated_exponential"


class DopplerSpectrum(str, Enum):
    UNIFORM = "uniform"
    JAKES = "jakes"


@dataclass(frozen=True)
class GridConfig:
    """An M-subcarrier by N-symbol time-frequency grid.

    Cells are vectorized column-major by symbol: cell ``(m, n)`` (0-based)
    maps to flat index ``k = n*M + m``.
    """

    M: int
    N: int

    def __post_init__(self):
        if int(self.M) != self.M or int(self.N) != self.N:
            raise InvalidSpecError("grid dimensions must be integers")
        if self.M < 1 or self.N < 1:
            raise InvalidSpecError(f"grid dimensions must be >= 1, got {self.M}x{self.N}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", int(self.N))

    @property
    def size(self) -> int:
        return self.M * self.N

    def flat_index(self, m: int, n: int) -> int:
        if not (0 <= m < self.M and 0 <= n < self.N):
            raise InvalidSpecError(f"cell ({m}, {n}) outside {self.M}x{self.N} grid")
        return n * self.M + m

    def cell(self, k: int) -> tuple[int, int]:
        if not (0 <= k < self.size):
            raise InvalidSpecError(f"flat index {k} outside grid of size {self.size}")
        return k % self.M, k // self.M


@dataclass(frozen=True)
class ScatteringSpec:
    """Parametric scattering function of an underspread WSSUS channel.

    ``spreading_factor`` is the delay-Doppler area ``tau_D * nu_D``.  The
    normalized spreads ``d_f = F*tau_D`` and ``d_t = T*nu_D`` satisfy
    ``d_f * d_t = time_bandwidth * spreading_factor``; by default the product
    is split symmetrically.  The delay profile is either uniform on the
    symmetric support or a truncated exponential on ``[0, tau_D]`` with RMS
    delay ``rms_fraction * tau_D``; the Doppler spectrum is uniform or Jakes.
    """

    spreading_factor: float
    delay_profile: DelayProfile = DelayProfile.TRUNCATED_EXPONENTIAL
    doppler_spectrum: DopplerSpectrum = DopplerSpectrum.JAKES
    rms_fraction: float = 0.25
    rank_energy_threshold: float = 0.9999
    time_bandwidth: float = 1.0
    normalized_delay_spread: float | None = None
    normalized_doppler_spread: float | None = None

    def __post_init__(self):
        if self.spreading_factor <= 0:
            raise InvalidSpecError("spreading_factor must be positive")
        if self.time_bandwidth <= 0:
            raise InvalidSpecError("time_bandwidth must be positive")
        if self.rms_fraction <= 0:
            raise InvalidSpecError("rms_fraction must be positive")
        if not 0 < self.rank_energy_threshold <= 1:
            raise InvalidSpecError("rank_energy_threshold must be in (0, 1]")

        product = self.time_bandwidth * self.spreading_factor
        d_f = self.normalized_delay_spread
        d_t = self.normalized_doppler_spread
        if d_f is None and d_t is None:
            d_f = d_t = sqrt(product)
        elif d_f is None:
            d_f = product / d_t
        elif d_t is None:
            d_t = product / d_f
        elif abs(d_f * d_t - product) > 1e-9 * max(product, 1.0):
            raise InvalidSpecError(
                f"d_f*d_t = {d_f * d_t:g} inconsistent with "
                f"time_bandwidth*spreading_factor = {product:g}"
            )
        if d_f <= 0 or d_t <= 0:
            raise InvalidSpecError("normalized spreads must be positive")
        object.__setattr__(self, "normalized_delay_spread", float(d_f))
        object.__setattr__(self, "normalized_doppler_spread", float(d_t))
        object.__setattr__(self, "delay_profile", DelayProfile(self.delay_profile))
        object.__setattr__(self, "doppler_spectrum", DopplerSpectrum(self.doppler_spectrum))

        if self.spreading_factor >= 0.1:
            warnings.warn(
                f"spreading factor {self.spreading_factor:g} >= 0.1 violates the "
                "underspread assumption; results may be meaningless",
                stacklevel=2,
            )


def delay_correlation(spec: ScatteringSpec, delta_m) -> np.ndarray:
    """Correlation across subcarriers at lag ``delta_m``.

    Fourier transform of the normalized delay profile:
    ``r_f(dm) = integral p_tau(tau) * exp(-j*2*pi*dm*F*tau) dtau``.

    Uniform profile on the symmetric support gives ``sinc(dm * d_f)``.  The
    truncated exponential on ``[0, tau_D]`` with rate ``1/(rho*tau_D)`` has the
    closed form ``(1 - exp(-(1/rho + j*2*pi*dm*d_f))) / (1/rho + j*2*pi*dm*d_f)``
    divided by the profile mass ``rho * (1 - exp(-1/rho))``.
    """
    dm = np.asarray(delta_m, dtype=float)
    d_f = spec.normalized_delay_spread
    if spec.delay_profile is DelayProfile.UNIFORM:
        out = np.sinc(dm * d_f).astype(np.complex128)
    else:
        rho = spec.rms_fraction
        denom_rate = 1.0 / rho + 2j * np.pi * dm * d_f
        numer = (1.0 - np.exp(-denom_rate)) / denom_rate
        mass = rho * (1.0 - np.exp(-1.0 / rho))
        out = numer / mass
    out = np.where(dm == 0, 1.0 + 0.0j, out)
    return out


def doppler_correlation(spec: ScatteringSpec, delta_n) -> np.ndarray:
    """Correlation across OFDM symbols at lag ``delta_n``.

    ``r_t(dn) = integral p_nu(nu) * exp(+j*2*pi*dn*T*nu) dnu`` over the
    symmetric Doppler support.  Uniform spectrum gives ``sinc(dn * d_t)``;
    the Jakes spectrum gives ``J0(pi * d_t * dn)``.  Both are real and even.
    """
    dn = np.asarray(delta_n, dtype=float)
    d_t = spec.normalized_doppler_spread
    if spec.doppler_spectrum is DopplerSpectrum.UNIFORM:
        out = np.sinc(dn * d_t)
    else:
        out = j0(np.pi * d_t * dn)
    out = np.where(dn == 0, 1.0, out)
    return np.asarray(out, dtype=float)


def build_freq_correlation(spec: ScatteringSpec, M: int) -> np.ndarray:
    """Hermitian Toeplitz subcarrier correlation matrix ``C_f`` (M x M)."""
    if M < 1 or int(M) != M:
        raise InvalidSpecError(f"M must be a positive integer, got {M}")
    first_col = delay_correlation(spec, np.arange(M))
    return toeplitz(first_col, first_col.conj())


def build_time_correlation(spec: ScatteringSpec, N: int) -> np.ndarray:
    """Symmetric Toeplitz symbol correlation matrix ``C_t`` (N x N), real."""
    if N < 1 or int(N) != N:
        raise InvalidSpecError(f"N must be a positive integer, got {N}")
    first_col = doppler_correlation(spec, np.arange(N))
    return toeplitz(first_col)


@dataclass(frozen=True)
class ChannelStatistics:
    """Kronecker factors and dominant eigenpairs of the grid covariance.

    ``eigvecs`` has orthonormal columns spanning the dominant subspace of
    ``C_g = C_t (x) C_f``; ``eigvals`` are the matching eigenvalues in
    descending order.  ``total_power`` is ``trace(C_g) = M*N``.
    """

    grid: GridConfig
    freq_corr: np.ndarray
    time_corr: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    effective_rank: int
    total_power: float

    @property
    def truncated_power(self) -> float:
        """Covariance energy discarded by the rank truncation."""
        return max(self.total_power - float(self.eigvals.sum()), 0.0)


def _factor_eigh(matrix: np.ndarray, label: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        vals, vecs = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition of {label} correlation failed: {exc}") from exc
    # Correlation matrices are PSD; clip the tolerated numerical negativity.
    floor = -1e-10 * vals[-1]
    if vals[0] < floor:
        raise NumericError(
            f"{label} correlation has eigenvalue {vals[0]:g} below the PSD tolerance"
        )
    return np.clip(vals, 0.0, None), vecs


def build_statistics(grid: GridConfig, spec: ScatteringSpec) -> ChannelStatistics:
    """Build factor correlations and the reduced-rank eigenbasis of ``C_g``.

    The eigenvalues of ``C_t (x) C_f`` are all products of factor eigenvalues
    and the eigenvectors are Kronecker products of factor eigenvectors.  The
    smallest rank ``r`` whose retained energy reaches the requested threshold
    is kept; eigenvalues below ``1e-12`` of the largest are always dropped.
    """
    C_f = build_freq_correlation(spec, grid.M)
    C_t = build_time_correlation(spec, grid.N)
    f_vals, f_vecs = _factor_eigh(C_f, "frequency")
    t_vals, t_vecs = _factor_eigh(C_t, "time")

    products = np.outer(t_vals, f_vals).ravel()  # index a*M + b -> t[a]*f[b]
    order = np.argsort(-products, kind="stable")
    sorted_vals = products[order]

    total = float(np.trace(C_f).real * np.trace(C_t).real)
    cumulative = np.cumsum(sorted_vals)
    # The float cumsum can land a hair under the analytic trace at eta = 1.
    target = min(spec.rank_energy_threshold * total, float(cumulative[-1]))
    rank = int(np.searchsorted(cumulative, target) + 1)
    rank = min(rank, len(sorted_vals))
    significant = int(np.sum(sorted_vals >= EIGENVALUE_FLOOR * sorted_vals[0]))
    rank = max(1, min(rank, significant))

    eigvals = sorted_vals[:rank].copy()
    eigvecs = np.empty((grid.size, rank), dtype=np.complex128)
    for col, flat in enumerate(order[:rank]):
        a, b = divmod(int(flat), grid.M)
        eigvecs[:, col] = np.kron(t_vecs[:, a], f_vecs[:, b])

    return ChannelStatistics(
        grid=grid,
        freq_corr=C_f,
        time_corr=C_t,
        eigvals=eigvals,
        eigvecs=eigvecs,
        effective_rank=rank,
        total_power=total,
    )


def full_covariance(stats: ChannelStatistics) -> np.ndarray:
    """Dense ``C_g = C_t (x) C_f``; diagnostics only, refused for large grids."""
    if stats.grid.size > MAX_DENSE_GRID:
        raise ComplexityGuardError(
            f"refusing to form a {stats.grid.size}^2 covariance (limit {MAX_DENSE_GRID})"
        )
    return np.kron(stats.time_corr, stats.freq_corr)


def covariance_columns(stats: ChannelStatistics, indices) -> np.ndarray:
    """Columns ``C_g[:, indices]`` assembled from the Kronecker factors."""
    idx = np.asarray(indices, dtype=int)
    m_idx, n_idx = idx % stats.grid.M, idx // stats.grid.M
    cols = stats.time_corr[:, n_idx][:, None, :] * stats.freq_corr[:, m_idx][None, :, :]
    return cols.reshape(stats.grid.size, len(idx))
