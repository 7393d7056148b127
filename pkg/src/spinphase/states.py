"""Spin-j states in the |j,m> basis: coherent, squeezed and cat states."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exceptions import DegenerateStateError, DomainError
from .specfun import SpinJ, ln_binomial_row, wigner_d_m0_pi2_column

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-14
# Amplitudes below exp(-745) flush to exact zero.
_LOG_FLOOR = -745.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector over m = -j..j.

    ``normalization`` is the constant the raw superposition was scaled by
    (1 for states that are normalized analytically).
    """

    j: SpinJ
    amplitudes: np.ndarray
    normalization: float = 1.0

    def __post_init__(self):
        j = SpinJ.of(self.j)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (j.dim,):
            raise DomainError(f"expected {j.dim} amplitudes for j={j}, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized: sum |c_m|^2 = {norm!r}")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one operator indexed ``rho[j+m, j+m']``."""

    j: SpinJ
    rho: np.ndarray

    def __post_init__(self):
        j = SpinJ.of(self.j)
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (j.dim, j.dim):
            raise DomainError(f"expected a {j.dim}x{j.dim} matrix for j={j}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "rho", _frozen(rho))

    @classmethod
    def coerce(cls, state) -> "DensityMatrix":
        if isinstance(state, cls):
            return state
        if isinstance(state, PureState):
            return density_of(state)
        raise TypeError(f"expected a DensityMatrix or PureState, got {type(state).__name__}")


@dataclass(frozen=True)
class CoherentSpec:
    """One coherent-state component |theta, phi> with complex ``weight``."""

    theta: float
    phi: float
    weight: complex = field(default=1.0)

    def __post_init__(self):
        _check_theta(self.theta)
        if not math.isfinite(self.phi):
            raise DomainError(f"phi must be finite, got {self.phi!r}")
        object.__setattr__(self, "weight", complex(self.weight))


def _check_theta(theta: float) -> None:
    if not (0.0 <= theta <= math.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")


def _half_angle_logs(theta: float) -> tuple:
    """ln sin(theta/2), ln cos(theta/2) in extended precision (-inf at the poles)."""
    s = math.sin(theta / 2)
    c = 0.0 if theta == math.pi else math.cos(theta / 2)
    with np.errstate(divide="ignore"):
        return np.log(np.longdouble(s)), np.log(np.longdouble(c))


@lru_cache(maxsize=64)
def _log_binomials(n: int) -> np.ndarray:
    if n > 2000:
        return ln_binomial_row(n).astype(np.longdouble)
    return np.array([np.log(np.longdouble(math.comb(n, i))) for i in range(n + 1)])


def coherent_amplitudes(j, theta: float, phi: float) -> np.ndarray:
    """Unvalidated amplitude vector of |theta, phi> (shared by states and Q-function)."""
    j = SpinJ.of(j)
    n = j.twice_j
    k = np.arange(n + 1)  # k = j + m
    ls, lc = _half_angle_logs(theta)
    # Exponents reach several hundred at large j; long double keeps the
    # relative error of exp(...) near one double ulp.
    lbin = _log_binomials(n)
    with np.errstate(invalid="ignore"):
        logmag = 0.5 * lbin + np.where(k > 0, k * ls, 0) + np.where(n - k > 0, (n - k) * lc, 0)
    mag = np.where(logmag < _LOG_FLOOR, 0.0, np.exp(np.maximum(logmag, _LOG_FLOOR)).astype(float))
    return mag * np.exp(-1j * k * phi)


def coherent_state(j, theta: float, phi: float) -> PureState:
    """Atomic coherent state |theta, phi>."""
    _check_theta(theta)
    return PureState(SpinJ.of(j), coherent_amplitudes(j, theta, phi))


def squeezed_state(j, zeta: float) -> PureState:
    """Atomic squeezed state: tanh(2 zeta)^(J_z/2) applied to exp(-i pi/2 J_y)|j,0>, normalized."""
    j = SpinJ.of(j)
    if isinstance(zeta, complex):
        raise DomainError("complex zeta is not supported; pass |zeta|")
    if not j.is_integer or j.twice_j == 0:
        raise DomainError(f"squeezed state needs a positive integer j, got j={j}")
    if not zeta > 0:
        raise DomainError(f"zeta must be positive, got {zeta!r}")
    d = wigner_d_m0_pi2_column(j)
    half_log_t = 0.5 * math.log(math.tanh(2.0 * zeta))
    raw = np.exp(j.m_values * half_log_t) * d
    norm = float(np.sqrt(np.sum(raw * raw)))
    return PureState(j, (raw / norm).astype(complex), normalization=1.0 / norm)


def cat_state(j, components: Sequence[CoherentSpec]) -> PureState:
    """Normalized superposition sum_k w_k |theta_k, phi_k>."""
    j = SpinJ.of(j)
    components = list(components)
    if not components:
        raise DomainError("cat_state needs at least one component")
    weights = np.array([c.weight for c in components], dtype=complex)
    if not np.any(weights != 0):
        raise DomainError("cat_state needs at least one nonzero weight")
    vecs = np.array([coherent_amplitudes(j, c.theta, c.phi) for c in components])
    gram = vecs.conj() @ vecs.T
    norm2 = float(np.real(weights.conj() @ gram @ weights))
    if not norm2 > 1e-28:
        raise DegenerateStateError(f"superposition cancels: squared norm {norm2!r}")
    raw = weights @ vecs
    nc = 1.0 / math.sqrt(norm2)
    amps = raw * nc
    # Gram-matrix norm and direct norm differ only by rounding; absorb it.
    amps = amps / math.sqrt(float(np.vdot(amps, amps).real))
    return PureState(j, amps, normalization=nc)


def density_of(state: PureState) -> DensityMatrix:
    """Pure-state projector rho[m, m'] = c_m conj(c_m')."""
    c = state.amplitudes
    return DensityMatrix(state.j, np.outer(c, c.conj()))


def diagonal_mixture(j, probs) -> DensityMatrix:
    """Diagonal density matrix with populations ``probs`` over m = -j..j."""
    j = SpinJ.of(j)
    p = np.asarray(probs, dtype=float)
    if p.shape != (j.dim,):
        raise DomainError(f"expected {j.dim} probabilities for j={j}, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise DomainError("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise DomainError(f"probabilities sum to {p.sum()!r}, expected 1")
    return DensityMatrix(j, np.diag(p).astype(complex))


def maximally_mixed(j) -> DensityMatrix:
    j = SpinJ.of(j)
    return diagonal_mixture(j, np.full(j.dim, 1.0 / j.dim))


def basis_state(j, m) -> PureState:
    j = SpinJ.of(j)
    amps = np.zeros(j.dim, dtype=complex)
    amps[j.index(m)] = 1.0
    return PureState(j, amps)
