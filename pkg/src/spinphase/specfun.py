"""Special functions for spin-j numerics.

Log-domain gamma/factorial/binomial/Beta helpers and the Wigner rotation
matrix d^j(pi/2).  Angular-momentum labels are carried as *twice* their
value so half-integer spins stay exact integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .exceptions import DomainError

Number = Union[int, float, Fraction]

# math.comb is exact; above this size log-gamma differences are cheaper and still accurate.
_EXACT_COMB_LIMIT = 2000


def _twice(value, what: str) -> int:
    """Return ``2*value`` as an int, rejecting anything that is not a half-integer."""
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"{what} must be finite, got {value!r}")
        value = Fraction(value)
    twice = Fraction(value) * 2
    if twice.denominator != 1:
        raise DomainError(f"{what} must be an integer or half-integer, got {value!r}")
    return int(twice)


@dataclass(frozen=True)
class SpinJ:
    """Angular momentum quantum number j, stored as ``twice_j``."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, (int, np.integer)) or isinstance(self.twice_j, bool):
            raise DomainError(f"twice_j must be an int, got {self.twice_j!r}")
        if self.twice_j < 0:
            raise DomainError(f"twice_j must be non-negative, got {self.twice_j}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @classmethod
    def of(cls, value) -> "SpinJ":
        """Coerce ``value`` (SpinJ, number or string like ``"21/2"``) to SpinJ."""
        if isinstance(value, cls):
            return value
        return cls(_twice(value, "j"))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_j % 2 == 0

    @property
    def twice_m_values(self) -> np.ndarray:
        return np.arange(-self.twice_j, self.twice_j + 1, 2)

    @property
    def m_values(self) -> np.ndarray:
        """m = -j..j as floats, in basis order."""
        return self.twice_m_values / 2

    def index(self, m) -> int:
        """Basis index of level ``m`` (i.e. j+m)."""
        tm = MLevel.of(m).twice_m
        self.check_m(tm)
        return (self.twice_j + tm) // 2

    def check_m(self, twice_m: int) -> None:
        if abs(twice_m) > self.twice_j or (self.twice_j - twice_m) % 2:
            raise DomainError(f"m={twice_m / 2} is not a valid level for j={self.j}")

    def __str__(self):
        return str(self.twice_j // 2) if self.is_integer else f"{self.twice_j}/2"


@dataclass(frozen=True)
class MLevel:
    """Magnetic quantum number m, stored as ``twice_m``."""

    twice_m: int

    @classmethod
    def of(cls, value) -> "MLevel":
        if isinstance(value, cls):
            return value
        return cls(_twice(value, "m"))

    @property
    def m(self) -> float:
        return self.twice_m / 2

    def __float__(self):
        return self.m


@dataclass(frozen=True)
class SignedLogValue:
    """A real number held as ``sign * exp(log_magnitude)``.

    ``log_magnitude`` is kept in long double: a double-precision log of a
    magnitude near 1e-300 would already lose ~1e-13 relative on the way back.
    """

    sign: int
    log_magnitude: float

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, np.log(np.longdouble(abs(x))))

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * float(np.exp(np.longdouble(self.log_magnitude)))

    def __float__(self):
        return self.value

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue(0, -math.inf)
        return SignedLogValue(self.sign * other.sign, self.log_magnitude + other.log_magnitude)


def signed_log_sum(terms: Iterable[SignedLogValue]) -> float:
    """Sum signed-log terms: rescale by the largest, add smallest-first with compensation.

    Uses Neumaier's form of Kahan summation, which also survives a large
    term cancelling the running total.
    """
    live = sorted((t for t in terms if t.sign != 0), key=lambda t: t.log_magnitude)
    if not live:
        return 0.0
    top = live[-1].log_magnitude
    total = 0.0
    comp = 0.0
    for t in live:
        x = t.sign * float(np.exp(t.log_magnitude - top))
        s = total + x
        if abs(total) >= abs(x):
            comp += (total - s) + x
        else:
            comp += (x - s) + total
        total = s
    return (total + comp) * float(np.exp(np.longdouble(top)))


_LD = np.longdouble
# Bernoulli numbers B_2..B_16 for the Stirling tail B_2k / (2k (2k-1) z^(2k-1)).
_BERNOULLI = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
)
_STIRLING = tuple(
    _LD(b.numerator) / _LD(b.denominator * (2 * k + 2) * (2 * k + 1)) for k, b in enumerate(_BERNOULLI)
)
_HALF_LN_2PI = _LD("0.918938533204672741780329736405617639861")
_STIRLING_FROM = 20


def _ln_gamma_ld(x) -> np.longdouble:
    z = _LD(x)
    shift = _LD(1)
    while z < _STIRLING_FROM:
        shift *= z
        z += 1
    inv = 1 / z
    inv2 = inv * inv
    tail = _LD(0)
    for c in reversed(_STIRLING):
        tail = tail * inv2 + c
    return (z - _LD(0.5)) * np.log(z) - z + _HALF_LN_2PI + tail * inv - np.log(shift)


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0.

    Stirling series in extended precision (argument shifted up to 20 first),
    rounded to double once at the end.
    """
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    if x == 1 or x == 2:
        return 0.0
    return float(_ln_gamma_ld(x))


def ln_factorial(n: int) -> float:
    if n < 0 or int(n) != n:
        raise DomainError(f"ln_factorial requires a non-negative integer, got {n!r}")
    return ln_gamma(int(n) + 1)


def ln_binomial(n: int, k: int) -> float:
    """ln C(n, k) for 0 <= k <= n."""
    if n < 0 or int(n) != n or int(k) != k:
        raise DomainError(f"ln_binomial requires integers n >= 0, got n={n!r}, k={k!r}")
    n, k = int(n), int(k)
    if not 0 <= k <= n:
        raise DomainError(f"ln_binomial requires 0 <= k <= n, got n={n}, k={k}")
    if n <= _EXACT_COMB_LIMIT:
        return math.log(math.comb(n, k))
    return float(_ln_gamma_ld(n + 1) - _ln_gamma_ld(k + 1) - _ln_gamma_ld(n - k + 1))


def ln_binomial_row(n: int) -> np.ndarray:
    """Vector of ln C(n, k) for k = 0..n."""
    return np.array([ln_binomial(n, k) for k in range(n + 1)])


def beta_fn(x: float, y: float) -> float:
    """Euler Beta function B(x, y) for x, y > 0 (half-integers welcome)."""
    if not (x > 0 and y > 0):
        raise DomainError(f"beta_fn requires x, y > 0, got ({x!r}, {y!r})")
    a, b = (x, y) if x <= y else (y, x)
    return float(np.exp(_ln_gamma_ld(a) + _ln_gamma_ld(b) - _ln_gamma_ld(a + b)))


@lru_cache(maxsize=64)
def _risbo_pi2(twice_j: int) -> np.ndarray:
    # Couples spin (n-1)/2 with spin 1/2 one step at a time; every step is a
    # bounded combination of the previous matrix, so no cancellation blows up.
    c = s = math.sqrt(0.5)
    u11, u21, u12, u22 = c, s, -s, c
    d = np.ones((1, 1))
    for n in range(1, twice_j + 1):
        idx = np.arange(n + 1, dtype=float)
        si = np.sqrt(idx)[:, None]
        sni = np.sqrt(n - idx)[:, None]
        sk = np.sqrt(idx)[None, :]
        snk = np.sqrt(n - idx)[None, :]

        a = np.zeros((n + 1, n + 1))
        b = np.zeros((n + 1, n + 1))
        cc = np.zeros((n + 1, n + 1))
        e = np.zeros((n + 1, n + 1))
        a[1:, 1:] = d
        b[:n, 1:] = d
        cc[1:, :n] = d
        e[:n, :n] = d
        d = (sk * (u11 * si * a + u21 * sni * b) + snk * (u12 * si * cc + u22 * sni * e)) / n
    d.flags.writeable = False
    return d


def wigner_d_pi2_matrix(j) -> np.ndarray:
    """Full d^j(pi/2) as a read-only array indexed ``[j+m, j+m']``."""
    return _risbo_pi2(SpinJ.of(j).twice_j)


def wigner_d_pi2(j, m, mp) -> float:
    """Rotation matrix element d^j_{m,m'}(pi/2)."""
    spin = SpinJ.of(j)
    tm, tmp = MLevel.of(m).twice_m, MLevel.of(mp).twice_m
    spin.check_m(tm)
    spin.check_m(tmp)
    d = _risbo_pi2(spin.twice_j)
    return float(d[(spin.twice_j + tm) // 2, (spin.twice_j + tmp) // 2])


def wigner_d_pi2_sum(j, m, mp) -> float:
    """d^j_{m,m'}(pi/2) straight from the alternating factorial sum.

    Each term is formed in signed-log form and the terms are summed with
    compensation.  The sum cancels catastrophically once 2j grows past ~40;
    it is kept as a small-j cross-check for :func:`wigner_d_pi2`.
    """
    spin = SpinJ.of(j)
    tj = spin.twice_j
    tm, tmp = MLevel.of(m).twice_m, MLevel.of(mp).twice_m
    spin.check_m(tm)
    spin.check_m(tmp)
    jpm, jmm = (tj + tm) // 2, (tj - tm) // 2
    jpmp, jmmp = (tj + tmp) // 2, (tj - tmp) // 2
    shift = (tmp - tm) // 2
    log_pref = 0.5 * (
        ln_factorial(jpm) + ln_factorial(jmm) + ln_factorial(jpmp) + ln_factorial(jmmp)
    ) - 0.5 * tj * math.log(2.0)
    terms = []
    for q in range(max(0, -shift), min(jmmp, jpm) + 1):
        log_den = (
            ln_factorial(jmmp - q) + ln_factorial(q) + ln_factorial(q + shift) + ln_factorial(jpm - q)
        )
        terms.append(SignedLogValue(-1 if q % 2 else 1, log_pref - log_den))
    return signed_log_sum(terms)


def wigner_d_m0_pi2(j, m) -> float:
    """d^j_{m,0}(pi/2) for integer j; exactly zero when j+m is odd."""
    spin = SpinJ.of(j)
    if not spin.is_integer:
        raise DomainError(f"d^j_(m0) needs integer j, got j={spin}")
    tm = MLevel.of(m).twice_m
    spin.check_m(tm)
    if ((spin.twice_j + tm) // 2) % 2:
        return 0.0
    return wigner_d_pi2(spin, MLevel(tm), MLevel(0))


def wigner_d_m0_pi2_column(j) -> np.ndarray:
    """Vector of d^j_{m,0}(pi/2) over m = -j..j with parity zeros enforced."""
    spin = SpinJ.of(j)
    if not spin.is_integer:
        raise DomainError(f"d^j_(m0) needs integer j, got j={spin}")
    col = np.array(_risbo_pi2(spin.twice_j)[:, spin.twice_j // 2])
    col[1::2] = 0.0
    return col
