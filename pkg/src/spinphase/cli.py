"""Command-line front end: ``spinphase coherent|squeezed|cat|figure|check``."""
from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .distributions import default_grid, number_distribution, phase_distribution
from .exceptions import ConsistencyError, SpinPhaseError, DomainError
from .io import write_dataset
from .specfun import SpinJ
from .states import CoherentSpec, cat_state, coherent_state, density_of, squeezed_state

COMMANDS = ("coherent", "squeezed", "cat", "figure", "check")
FIG_ZETA = 2.6892

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_ANGLE_RE = re.compile(r"^([+-]?\d*)pi(?:/(\d+))?$")


def parse_angle(text: str) -> float:
    """Radians from ``"0.5"``, ``"pi"``, ``"3pi/8"``, ``"-pi/2"`` and the like."""
    token = str(text).strip().replace(" ", "")
    match = _ANGLE_RE.match(token)
    if match:
        num, den = match.groups()
        p = {"": 1, "+": 1, "-": -1}.get(num)
        p = int(num) if p is None else p
        q = int(den) if den else 1
        if q == 0:
            raise DomainError(f"cannot parse angle {text!r}: zero denominator")
        return p * math.pi / q
    try:
        value = float(token)
    except ValueError:
        raise DomainError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise DomainError(f"cannot parse angle {text!r}: not finite")
    return value


def parse_component(text: str) -> CoherentSpec:
    parts = [s.strip() for s in str(text).split(",")]
    if len(parts) not in (2, 3):
        raise DomainError(f"component must be theta,phi[,weight], got {text!r}")
    weight = complex(parts[2].replace(" ", "")) if len(parts) == 3 else 1.0
    return CoherentSpec(parse_angle(parts[0]), parse_angle(parts[1]), weight)


@dataclass
class RunConfig:
    command: str
    j: Optional[SpinJ] = None
    theta: Optional[float] = None
    phi: Optional[float] = None
    zeta: Optional[float] = None
    components: list = field(default_factory=list)
    n_grid: Optional[int] = None
    output_path: str = "."
    format: str = "csv"
    figure: Optional[int] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise DomainError(f"unknown format {self.format!r}")
        need = {
            "coherent": ("j", "theta", "phi"),
            "squeezed": ("j", "zeta"),
            "cat": ("j", "components"),
            "figure": ("figure",),
            "check": (),
        }[self.command]
        missing = [name for name in need if getattr(self, name) in (None, [])]
        if missing:
            raise DomainError(f"{self.command} requires --{', --'.join(missing)}")
        if self.command == "figure" and self.figure not in (1, 2, 3):
            raise DomainError(f"figure must be 1, 2 or 3, got {self.figure!r}")
        if self.n_grid is not None and self.j is not None and self.n_grid < 2 * self.j.twice_j + 2:
            raise DomainError(f"--grid {self.n_grid} is below 4j+2 for j={self.j}")


def _j_label(j: SpinJ) -> str:
    return str(j).replace("/", "_")


def _residual_tol(j: SpinJ) -> float:
    return 1e-12 if j.j <= 60 else 1e-9


def state_datasets(state, meta: dict, n_grid: Optional[int] = None, want=("pm", "pphi")):
    """Build (kind, distribution, metadata) triples for one state."""
    rho = density_of(state)
    j = state.j
    n_grid = default_grid(j) if n_grid is None else n_grid
    pm = number_distribution(rho)
    pphi = phase_distribution(rho, n_grid)
    res_m = abs(math.fsum(pm.p) - 1.0)
    res_phi = abs(pphi.integral() - 1.0)
    tol = _residual_tol(j)
    if res_m > tol or res_phi > tol:
        raise ConsistencyError(
            f"normalization residuals {res_m:.3g} (p_m), {res_phi:.3g} (p_phi) exceed {tol:g}"
        )
    full = {"j": str(j), **meta, "n_grid": n_grid, "residual_sum_p_m": res_m, "residual_integral_p_phi": res_phi}
    out = []
    if "pm" in want:
        out.append(("pm", pm, full))
    if "pphi" in want:
        out.append(("pphi", pphi, full))
    return out


def figure_datasets(number: int, n_grid: Optional[int] = None):
    """Datasets for figure 1, 2 or 3 as (filename stem, distribution, metadata)."""
    q = math.pi / 4
    out = []
    if number == 1:
        for j in (10, 20, 30):
            st = coherent_state(j, q, q)
            meta = {"figure": 1, "state": "coherent", "theta": q, "phi": q}
            out += [(f"fig1_j{j}_{k}", d, m) for k, d, m in state_datasets(st, meta, n_grid)]
    elif number == 2:
        for j in (2, 10, 20):
            st = squeezed_state(j, FIG_ZETA)
            want = ("pm", "pphi") if j in (10, 20) else ("pphi",)
            meta = {"figure": 2, "state": "squeezed", "zeta": FIG_ZETA, "normalization": st.normalization}
            out += [(f"fig2_j{j}_{k}", d, m) for k, d, m in state_datasets(st, meta, n_grid, want)]
    elif number == 3:
        comps = [CoherentSpec(q, q), CoherentSpec(q, q + math.pi / 8)]
        for j in (10, 20, 30):
            st = cat_state(j, comps)
            meta = {
                "figure": 3,
                "state": "cat",
                "components": ";".join(f"{c.theta!r},{c.phi!r},{c.weight!r}" for c in comps),
                "normalization": st.normalization,
            }
            out += [(f"fig3_j{j}_{k}", d, m) for k, d, m in state_datasets(st, meta, n_grid)]
    else:
        raise DomainError(f"figure must be 1, 2 or 3, got {number!r}")
    return out


def _build_state(config: RunConfig):
    if config.command == "coherent":
        st = coherent_state(config.j, config.theta, config.phi)
        return st, {"state": "coherent", "theta": config.theta, "phi": config.phi}
    if config.command == "squeezed":
        st = squeezed_state(config.j, config.zeta)
        return st, {"state": "squeezed", "zeta": config.zeta, "normalization": st.normalization}
    st = cat_state(config.j, config.components)
    comps = ";".join(f"{c.theta!r},{c.phi!r},{c.weight!r}" for c in config.components)
    return st, {"state": "cat", "components": comps, "normalization": st.normalization}


def run(config: RunConfig) -> tuple[int, list[Path]]:
    """Execute a validated config; returns (exit status, files written)."""
    config.validate()
    if config.command == "check":
        from .acceptance import format_table, run_all

        results = run_all()
        print(format_table(results))
        return (EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED), []
    out_dir = Path(config.output_path)
    if config.command == "figure":
        datasets = figure_datasets(config.figure, config.n_grid)
    else:
        state, meta = _build_state(config)
        stem = f"{config.command}_j{_j_label(config.j)}"
        datasets = [(f"{stem}_{k}", d, m) for k, d, m in state_datasets(state, meta, config.n_grid)]
    written = [
        write_dataset(out_dir / f"{stem}.{config.format}", dist, meta, config.format)
        for stem, dist, meta in datasets
    ]
    return EXIT_OK, written


def _arg(fn):
    def wrapped(text):
        try:
            return fn(text)
        except (SpinPhaseError, ValueError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    wrapped.__name__ = fn.__name__
    return wrapped


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--j", type=_arg(SpinJ.of), help="spin j, e.g. 10 or 21/2")
    common.add_argument("--theta", type=_arg(parse_angle), help="polar angle (radians or e.g. pi/4)")
    common.add_argument("--phi", type=_arg(parse_angle), help="azimuth (radians or e.g. pi/4)")
    common.add_argument("--zeta", type=float, help="squeezing parameter (> 0)")
    common.add_argument(
        "--component", dest="components", action="append", default=[], type=_arg(parse_component),
        help="theta,phi[,weight] of one coherent component (repeatable)",
    )
    common.add_argument("--grid", dest="n_grid", type=int, help="number of phase grid points")
    common.add_argument("--out", dest="output_path", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="spinphase", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coherent", parents=[common], help="atomic coherent state |theta, phi>")
    sub.add_parser("squeezed", parents=[common], help="atomic squeezed state |zeta>")
    sub.add_parser("cat", parents=[common], help="superposition of coherent states")
    fig = sub.add_parser("figure", parents=[common], help="datasets for figure 1, 2 or 3")
    fig.add_argument("figure", type=int, choices=(1, 2, 3))
    sub.add_parser("check", parents=[common], help="run the acceptance checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(**vars(args))
    try:
        status, written = run(config)
    except ConsistencyError as exc:
        print(f"spinphase: numerical consistency failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SpinPhaseError as exc:
        print(f"spinphase: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(path)
    return status


if __name__ == "__main__":
    sys.exit(main())
