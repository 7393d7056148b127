"""Acceptance checks, shared by ``spinphase check`` and the test suite.

Each check returns a :class:`CheckResult`; tolerances are fixed here.
"""
from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path

import numpy as np

from .analysis import fwhm, local_maxima, number_width, peak_fwhm_at, scaling_fit
from .distributions import (
    number_distribution,
    number_moments,
    phase_distribution,
    phase_distribution_oracle,
    phase_kernel,
    q_normalization_check,
)
from .specfun import SpinJ, wigner_d_pi2_matrix
from .states import CoherentSpec, DensityMatrix, cat_state, coherent_state, density_of, maximally_mixed, squeezed_state

PI = math.pi
ZETA = 2.6892
COHERENT_FACTOR = 3.29
SQUEEZED_FACTOR = 2.12
SWEEP = (10, 20, 40, 80, 160)


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str


def cat_components():
    return [CoherentSpec(PI / 4, PI / 4), CoherentSpec(PI / 4, PI / 4 + PI / 8)]


def mixed_state(j) -> DensityMatrix:
    """Convex mix of the coherent, cat and maximally mixed states (has coherences)."""
    rho = (
        0.5 * density_of(coherent_state(j, PI / 4, PI / 4)).rho
        + 0.25 * density_of(cat_state(j, cat_components())).rho
        + 0.25 * maximally_mixed(j).rho
    )
    return DensityMatrix(j, rho)


def canonical_states(j) -> dict:
    return {
        "coherent": density_of(coherent_state(j, PI / 4, PI / 4)),
        "squeezed": density_of(squeezed_state(j, ZETA)),
        "cat": density_of(cat_state(j, cat_components())),
        "mixed": mixed_state(j),
    }


def binomial_pm(j: int, alpha: float) -> np.ndarray:
    """Closed-form coherent-state p(m), straight from the binomial law."""
    n = 2 * j
    s, c = math.sin(alpha / 2), math.cos(alpha / 2)
    return np.array([math.comb(n, k) * s ** (2 * k) * c ** (2 * n - 2 * k) for k in range(n + 1)])


def cat_pm(j: int, normalization: float) -> np.ndarray:
    """Closed-form p(m) of the two-component cat state."""
    n = 2 * j
    s, c = math.sin(PI / 8), math.cos(PI / 8)
    return np.array([
        2 * normalization**2 * math.comb(n, k) * s ** (2 * k) * c ** (2 * n - 2 * k) * (1 + math.cos(k * PI / 8))
        for k in range(n + 1)
    ])


def wigner_d_exact(twice_j: int, twice_m: int, twice_mp: int) -> float:
    """d^j_{m,m'}(pi/2) from the factorial sum in exact rational arithmetic."""
    jpm, jmm = (twice_j + twice_m) // 2, (twice_j - twice_m) // 2
    jpmp, jmmp = (twice_j + twice_mp) // 2, (twice_j - twice_mp) // 2
    shift = (twice_mp - twice_m) // 2
    total = Fraction(0)
    for q in range(max(0, -shift), min(jmmp, jpm) + 1):
        den = factorial(jmmp - q) * factorial(q) * factorial(q + shift) * factorial(jpm - q)
        total += Fraction(-1 if q % 2 else 1, den)
    if total == 0:
        return 0.0
    # d^2 = S^2 (j+m)!(j-m)!(j+m')!(j-m')! / 2^(2j), rounded once
    sq = total * total * factorial(jpm) * factorial(jmm) * factorial(jpmp) * factorial(jmmp) / 2**twice_j
    return math.copysign(math.sqrt(sq), total)


def _check(number, title, failures, detail_ok):
    return CheckResult(number, title, not failures, "; ".join(failures[:5]) if failures else detail_ok)


def check_normalization() -> CheckResult:
    failures, worst = [], [0.0, 0.0, 0.0]
    for j in (1, 10, 20, 50):
        for name, rho in canonical_states(j).items():
            pm = number_distribution(rho).p
            r1 = abs(math.fsum(pm) - 1)
            r2 = abs(phase_distribution(rho).integral() - 1)
            r3 = abs(q_normalization_check(rho, max(8, 2 * j + 2), max(8, 4 * j + 2)) - 1)
            worst = [max(a, b) for a, b in zip(worst, (r1, r2, r3))]
            if r1 > 1e-12 or r2 > 1e-12 or r3 > 1e-10:
                failures.append(f"{name} j={j}: {r1:.2e} {r2:.2e} {r3:.2e}")
    return _check(1, "normalization", failures, "max residuals p(m) %.1e, p(phi) %.1e, Q %.1e" % tuple(worst))


def check_oracle() -> CheckResult:
    failures, worst = [], 0.0
    for j in (1, 10, 20):
        for name, rho in canonical_states(j).items():
            diff = np.max(np.abs(phase_distribution(rho).grid_p - phase_distribution_oracle(rho).grid_p))
            worst = max(worst, diff)
            if diff > 1e-10:
                failures.append(f"{name} j={j}: {diff:.2e}")
    return _check(2, "oracle equivalence", failures, f"max |analytic - quadrature| = {worst:.1e}")


def check_coherent_closed_forms() -> CheckResult:
    failures, worst = [], [0.0, 0.0, 0.0]
    for j in (10, 20, 100):
        for alpha in (PI / 8, PI / 4, PI / 2):
            rho = density_of(coherent_state(j, alpha, PI / 4))
            p = number_distribution(rho).p
            ref = binomial_pm(j, alpha)
            mask = ref > 1e-280
            rel = float(np.max(np.abs(p[mask] / ref[mask] - 1)))
            mean, var = number_moments(rho)
            dm, dv = abs(mean - j * (1 - math.cos(alpha))), abs(var - j / 2 * math.sin(alpha) ** 2)
            worst = [max(a, b) for a, b in zip(worst, (rel, dm, dv))]
            if rel > 1e-13 or dm > 1e-10 or dv > 1e-10:
                failures.append(f"j={j} alpha={alpha:.4f}: rel {rel:.2e} mean {dm:.2e} var {dv:.2e}")
    return _check(3, "coherent closed forms", failures, "max rel p(m) %.1e, mean %.1e, var %.1e" % tuple(worst))


def coherent_phase_widths(js=SWEEP) -> list[float]:
    return [fwhm(phase_distribution(coherent_state(j, PI / 4, PI / 4))) for j in js]


def check_complementarity() -> CheckResult:
    widths = coherent_phase_widths()
    fit = scaling_fit(SWEEP, widths)
    factor160 = widths[-1] * math.sqrt(SWEEP[-1])
    nwidths = [number_width(number_distribution(coherent_state(j, PI / 4, PI / 4))) for j in SWEEP]
    nfit = scaling_fit(SWEEP, nwidths)
    failures = []
    if not -0.55 <= fit.exponent <= -0.45:
        failures.append(f"phase exponent {fit.exponent:.4f}")
    if abs(factor160 / COHERENT_FACTOR - 1) > 0.10:
        failures.append(f"FWHM*sqrt(j) at j=160 is {factor160:.4f}")
    if not 0.45 <= nfit.exponent <= 0.55:
        failures.append(f"number exponent {nfit.exponent:.4f}")
    return _check(
        4, "complementarity scaling", failures,
        f"phase exponent {fit.exponent:.4f}, FWHM*sqrt(160) {factor160:.4f}, number exponent {nfit.exponent:.4f}",
    )


def check_squeezed_doublet() -> CheckResult:
    failures, factors = [], []
    for j in (10, 20):
        dist = phase_distribution(density_of(squeezed_state(j, ZETA)))
        peaks = local_maxima(dist)
        locs = sorted(float(dist.grid_phi[i]) for i in peaks)
        if len(peaks) != 2:
            failures.append(f"j={j}: {len(peaks)} local maxima")
            continue
        for loc, target in zip(locs, (-PI / 2, PI / 2)):
            if abs(loc - target) > dist.step:
                failures.append(f"j={j}: peak at {loc:.5f}, expected {target:.5f}")
        w = [peak_fwhm_at(dist, c, PI / 2) for c in (PI / 2, -PI / 2)]
        f = w[0] * math.sqrt(j)
        factors.append(f)
        if abs(f / SQUEEZED_FACTOR - 1) > 0.15:
            failures.append(f"j={j}: per-peak FWHM*sqrt(j) {f:.4f}")
        coh = fwhm(phase_distribution(coherent_state(j, PI / 4, PI / 4))) * math.sqrt(j)
        if not f < coh:
            failures.append(f"j={j}: squeezed factor {f:.4f} not below coherent {coh:.4f}")
    return _check(5, "squeezed doublet", failures, "per-peak FWHM*sqrt(j): " + ", ".join(f"{f:.4f}" for f in factors))


def check_parity_zeros() -> CheckResult:
    failures = []
    for j in (2, 10, 20):
        p = number_distribution(density_of(squeezed_state(j, ZETA))).p
        odd = p[1::2]
        if np.any(odd > 1e-15 * p.max()):
            failures.append(f"j={j}: max odd p(m) {odd.max():.2e}")
    return _check(6, "squeezed parity zeros", failures, "p(m) = 0 for every j+m odd")


def check_cat_interference() -> CheckResult:
    failures, details = [], []
    for j in (10, 20, 30):
        st = cat_state(j, cat_components())
        p = number_distribution(density_of(st)).p
        diff = float(np.max(np.abs(p - cat_pm(j, st.normalization))))
        if diff > 1e-12:
            failures.append(f"j={j}: |p - closed form| {diff:.2e}")
        if p[8] > 1e-14:
            failures.append(f"j={j}: p at j+m=8 is {p[8]:.2e}")
    dist = phase_distribution(density_of(cat_state(30, cat_components())))
    peaks = sorted(float(dist.grid_phi[i]) for i in local_maxima(dist))
    details.append("j=30 peaks at " + ", ".join(f"{x / PI:.4f}pi" for x in peaks))
    if len(peaks) != 2:
        failures.append(f"j=30: {len(peaks)} local maxima in p(phi)")
    else:
        for loc, target in zip(peaks, (PI / 4, PI / 4 + PI / 8)):
            steps = abs(loc - target) / dist.step
            if steps > 2:
                failures.append(f"j=30: peak at {loc / PI:.4f}pi is {steps:.1f} grid steps from {target / PI:.4f}pi")
    return _check(7, "cat interference", failures, "; ".join(details))


def check_special_functions() -> CheckResult:
    failures, worst = [], [0.0, 0.0, 0.0]
    for tj in range(0, 101):
        d = wigner_d_pi2_matrix(SpinJ(tj))
        err = float(np.max(np.abs(np.sum(d * d, axis=0) - 1)))
        worst[0] = max(worst[0], err)
        if err > 1e-10:
            failures.append(f"unitarity 2j={tj}: {err:.2e}")
    for tj in range(0, 61):
        d = wigner_d_pi2_matrix(SpinJ(tj))
        for a in range(tj + 1):
            for b in range(tj + 1):
                err = abs(d[a, b] - wigner_d_exact(tj, 2 * a - tj, 2 * b - tj))
                worst[1] = max(worst[1], err)
                if err > 1e-12:
                    failures.append(f"exact d 2j={tj} ({a},{b}): {err:.2e}")
    for tj in range(0, 401):
        err = float(np.max(np.abs(np.diag(phase_kernel(SpinJ(tj)).K) - 1 / (2 * PI))))
        worst[2] = max(worst[2], err)
        if err > 1e-13:
            failures.append(f"K(m,m) 2j={tj}: {err:.2e}")
    return _check(8, "special functions", failures, "unitarity %.1e, exact d %.1e, K diag %.1e" % tuple(worst))


def check_determinism() -> CheckResult:
    from .cli import RunConfig, run

    failures = []
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "a", Path(tmp) / "b"]
        for out in dirs:
            for n in (1, 2, 3):
                run(RunConfig(command="figure", figure=n, output_path=str(out)))
        names = sorted(p.name for p in dirs[0].iterdir())
        if names != sorted(p.name for p in dirs[1].iterdir()):
            failures.append("file sets differ")
        for name in names:
            if (dirs[0] / name).read_bytes() != (dirs[1] / name).read_bytes():
                failures.append(f"{name} differs")
    return _check(9, "determinism", failures, f"{len(names)} figure files byte-identical")


CHECKS = (
    check_normalization,
    check_oracle,
    check_coherent_closed_forms,
    check_complementarity,
    check_squeezed_doublet,
    check_parity_zeros,
    check_cat_interference,
    check_special_functions,
    check_determinism,
)


def run_all() -> list[CheckResult]:
    return [check() for check in CHECKS]


def format_table(results) -> str:
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.number}. {r.title}: {r.detail}")
    return "\n".join(lines)
