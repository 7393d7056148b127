"""Q-function, number distribution p(m) and phase distribution p(phi)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .exceptions import ConsistencyError, DomainError, GridTooCoarseError
from .specfun import SpinJ
from .states import DensityMatrix, _check_theta, _frozen, coherent_amplitudes

DEFAULT_GRID = 1024
TWO_PI = 2.0 * math.pi


def default_grid(j) -> int:
    return max(DEFAULT_GRID, min_grid(j))


def min_grid(j) -> int:
    """Smallest grid that resolves harmonics up to 2j (4j + 2 points)."""
    return 2 * SpinJ.of(j).twice_j + 2


def phase_grid(n_grid: int) -> np.ndarray:
    """Uniform, endpoint-exclusive grid on [-pi, pi)."""
    return -math.pi + TWO_PI * np.arange(n_grid) / n_grid


@dataclass(frozen=True)
class PhaseKernel:
    """Weights K[j+m, j+m'] turning rho into Fourier coefficients of p(phi)."""

    j: SpinJ
    K: np.ndarray


@dataclass(frozen=True)
class NumberDistribution:
    j: SpinJ
    p: np.ndarray

    @property
    def m_values(self) -> np.ndarray:
        return self.j.m_values

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p))


@dataclass(frozen=True)
class PhaseDistribution:
    """p(phi) as Fourier coefficients plus samples on a uniform grid.

    ``fourier[k + K]`` holds c_k for k = -K..K, where K = 2j for densities
    built from a state.  ``j`` is None for densities built from raw samples.
    """

    j: Optional[SpinJ]
    fourier: np.ndarray
    grid_phi: np.ndarray
    grid_p: np.ndarray

    def __post_init__(self):
        for name in ("fourier", "grid_phi", "grid_p"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n_grid(self) -> int:
        return len(self.grid_phi)

    @property
    def step(self) -> float:
        return TWO_PI / self.n_grid

    @property
    def max_harmonic(self) -> int:
        return (len(self.fourier) - 1) // 2

    def coefficient(self, k: int) -> complex:
        K = self.max_harmonic
        return complex(self.fourier[k + K]) if abs(k) <= K else 0j

    def integral(self) -> float:
        """Trapezoid integral over the circle (exact for band-limited densities)."""
        return float(np.sum(self.grid_p) * self.step)

    @classmethod
    def from_samples(cls, grid_p, j=None) -> "PhaseDistribution":
        """Wrap samples of a density on :func:`phase_grid`; coefficients come from an FFT."""
        p = np.asarray(grid_p, dtype=float)
        n = len(p)
        phi = phase_grid(n)
        K = (n - 1) // 2 if j is None else SpinJ.of(j).twice_j
        if j is not None and n < 2 * K + 2:
            raise GridTooCoarseError(f"{n} samples cannot carry harmonics up to {K}")
        k = np.arange(-K, K + 1)
        # c_k = (1/n) sum_i p_i exp(-i k phi_i), with phi_i = -pi + 2 pi i / n
        fft = np.fft.fft(p) / n
        coeffs = fft[k % n] * np.where(k % 2, -1.0, 1.0)
        return cls(None if j is None else SpinJ.of(j), coeffs, phi, p)


def q_function(rho, theta: float, phi: float) -> float:
    """Husimi Q(theta, phi) = <theta, phi| rho |theta, phi>."""
    rho = DensityMatrix.coerce(rho)
    _check_theta(theta)
    v = coherent_amplitudes(rho.j, theta, phi)
    q = np.vdot(v, rho.rho @ v)
    if abs(q.imag) > 1e-13:
        raise ConsistencyError(f"Q-function has imaginary part {q.imag!r}")
    return float(q.real)


def _q_grid(rho: DensityMatrix, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Q on the product grid, shape (len(thetas), len(phis))."""
    k = np.arange(rho.j.dim)
    phase = np.exp(-1j * np.outer(phis, k))
    out = np.empty((len(thetas), len(phis)))
    for t, theta in enumerate(thetas):
        vecs = phase * coherent_amplitudes(rho.j, float(theta), 0.0)[None, :]
        out[t] = np.real(np.sum(vecs.conj() * (vecs @ rho.rho.T), axis=1))
    return out


def q_normalization_check(rho, n_theta: int, n_phi: int) -> float:
    """(2j+1)/(4 pi) times the integral of Q over the sphere.

    Gauss-Legendre in cos(theta), trapezoid in phi; exact once
    n_theta >= j + 1 and n_phi >= 2j + 1.
    """
    rho = DensityMatrix.coerce(rho)
    if n_theta < 8 or n_phi < 8:
        raise DomainError("quadrature sizes must be at least 8")
    u, w = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(u)
    phis = TWO_PI * np.arange(n_phi) / n_phi
    q = _q_grid(rho, thetas, phis)
    integral = float(w @ q.sum(axis=1)) * TWO_PI / n_phi
    return rho.j.dim / (4 * math.pi) * integral


def number_distribution(rho) -> NumberDistribution:
    """p(m) = <j,m| rho |j,m>."""
    rho = DensityMatrix.coerce(rho)
    p = np.real(np.diagonal(rho.rho)).copy()
    if np.any(p < -1e-10):
        raise ConsistencyError(f"negative population {p.min()!r}")
    p[(p < 0) & (p > -1e-14)] = 0.0
    return NumberDistribution(rho.j, p)


def number_moments(rho) -> tuple[float, float]:
    """Mean and variance of the excitation number j + m."""
    dist = number_distribution(rho)
    n = np.arange(dist.j.dim, dtype=float)
    mean = float(dist.p @ n)
    var = float(dist.p @ (n - mean) ** 2)
    return mean, var


@lru_cache(maxsize=32)
def _kernel_matrix(twice_j: int) -> np.ndarray:
    # K = (2j+1)/(4 pi) sqrt(C(2j,j+m) C(2j,j+m')) 2 B(j+s+1, j-s+1), s = (m+m')/2.
    # The (2j)!/(2j+1)! left over after expanding C and B cancels the (2j+1),
    # so K = exp(L(s) - (L(m) + L(m'))/2) / (2 pi) with L(x) = ln (j+x)! (j-x)!.
    # L(m) - (L(m)+L(m))/2 is exactly zero in floating point, so K(m,m) = 1/(2 pi).
    i = np.arange(twice_j + 1, dtype=float)
    lm = gammaln(i + 1) + gammaln(twice_j - i + 1)
    half_sum = (i[:, None] + i[None, :]) / 2
    ls = gammaln(half_sum + 1) + gammaln(twice_j - half_sum + 1)
    K = np.exp(ls - 0.5 * (lm[:, None] + lm[None, :])) / TWO_PI
    K.flags.writeable = False
    return K


def phase_kernel(j) -> PhaseKernel:
    j = SpinJ.of(j)
    return PhaseKernel(j, _kernel_matrix(j.twice_j))


def _fourier_coefficients(rho: DensityMatrix) -> np.ndarray:
    tj = rho.j.twice_j
    weighted = rho.rho * _kernel_matrix(tj)
    pos = np.array([np.sum(np.diagonal(weighted, offset=-k)) for k in range(tj + 1)])
    pos[0] = pos[0].real
    return np.concatenate([pos[:0:-1].conj(), pos])


def _synthesize(fourier: np.ndarray, n_grid: int) -> np.ndarray:
    """Evaluate sum_k c_k exp(i k phi) on :func:`phase_grid` as a real array."""
    K = (len(fourier) - 1) // 2
    k = np.arange(1, K + 1)
    i = np.arange(n_grid)
    # k * phi_i = -k pi + 2 pi ((k i) mod n) / n keeps the argument small.
    arg = TWO_PI * ((np.outer(i, k)) % n_grid) / n_grid
    sign = np.where(k % 2, -1.0, 1.0)
    terms = np.exp(1j * arg) @ (sign * fourier[K + 1:])
    return fourier[K].real + 2.0 * terms.real


def phase_distribution(rho, n_grid: Optional[int] = None) -> PhaseDistribution:
    """p(phi) from the closed-form Beta-function kernel."""
    rho = DensityMatrix.coerce(rho)
    n_grid = default_grid(rho.j) if n_grid is None else int(n_grid)
    if n_grid < min_grid(rho.j):
        raise GridTooCoarseError(f"n_grid={n_grid} is below 4j+2={min_grid(rho.j)} for j={rho.j}")
    coeffs = _fourier_coefficients(rho)
    return PhaseDistribution(rho.j, coeffs, phase_grid(n_grid), _synthesize(coeffs, n_grid))


def oracle_theta_nodes(j) -> int:
    """Default Gauss-Legendre node count for :func:`phase_distribution_oracle`."""
    return 2 * SpinJ.of(j).twice_j + 48


def phase_distribution_oracle(rho, n_grid: Optional[int] = None, n_theta: Optional[int] = None) -> PhaseDistribution:
    """p(phi) by integrating Q(theta, phi) sin(theta) over theta numerically.

    Shares nothing with :func:`phase_distribution` beyond the coherent-state
    amplitudes.  The theta integral uses Gauss-Legendre nodes in theta itself:
    terms with odd m + m' carry sqrt(1 - u^2) in u = cos(theta), which
    Gauss-Legendre in u cannot integrate exactly, whereas in theta the
    integrand is entire and the rule converges geometrically.
    """
    rho = DensityMatrix.coerce(rho)
    n_grid = default_grid(rho.j) if n_grid is None else int(n_grid)
    n_theta = oracle_theta_nodes(rho.j) if n_theta is None else int(n_theta)
    if n_theta < rho.j.twice_j + 2:
        raise DomainError(f"n_theta={n_theta} is below 2j+2 for j={rho.j}")
    x, w = np.polynomial.legendre.leggauss(n_theta)
    thetas = (x + 1) * (math.pi / 2)
    weights = w * (math.pi / 2) * np.sin(thetas)
    phis = phase_grid(n_grid)
    q = _q_grid(rho, thetas, phis)
    p = rho.j.dim / (4 * math.pi) * (weights @ q)
    if n_grid >= min_grid(rho.j):
        return PhaseDistribution.from_samples(p, j=rho.j)
    return PhaseDistribution(rho.j, np.array([1.0 / TWO_PI + 0j]), phis, p)
