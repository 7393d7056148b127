"""Dataset writers for number and phase distributions (CSV and JSON)."""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .distributions import NumberDistribution, PhaseDistribution

FORMAT_TAG = "spinphase v1"
# Negative rounding noise down to this size is written as 0.
CLIP_TOL = 1e-12


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _clip(p: np.ndarray) -> np.ndarray:
    p = np.array(p, dtype=float)
    p[(p < 0) & (p >= -CLIP_TOL)] = 0.0
    return p


def number_rows(dist: NumberDistribution):
    header = ["m", "p_m"]
    p = _clip(dist.p)
    rows = [[float(m), float(v)] for m, v in zip(dist.m_values, p)]
    return header, rows, {"sum_p_m": math.fsum(p)}


def phase_rows(dist: PhaseDistribution):
    header = ["phi", "phi_over_pi", "p_phi"]
    p = _clip(dist.grid_p)
    rows = [[float(phi), float(phi / math.pi), float(v)] for phi, v in zip(dist.grid_phi, p)]
    return header, rows, {"integral_p_phi": math.fsum(p) * dist.step}


def render_csv(header, rows, meta: dict, footer: dict) -> str:
    lines = [f"# {FORMAT_TAG}"]
    lines += [f"# {k}={_fmt(v)}" for k, v in meta.items()]
    lines.append(",".join(header))
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    lines += [f"# footer {k}={_fmt(v)}" for k, v in footer.items()]
    return "\n".join(lines) + "\n"


def render_json(header, rows, meta: dict, footer: dict) -> str:
    doc = {
        "format": FORMAT_TAG,
        "meta": meta,
        "rows": [dict(zip(header, row)) for row in rows],
        "footer": footer,
    }
    return json.dumps(doc, indent=1) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_dataset(path, dist, meta: dict, fmt: str = "csv") -> Path:
    """Write a number or phase distribution with metadata and a footer of totals."""
    if isinstance(dist, NumberDistribution):
        header, rows, footer = number_rows(dist)
    elif isinstance(dist, PhaseDistribution):
        header, rows, footer = phase_rows(dist)
    else:
        raise TypeError(f"cannot write {type(dist).__name__}")
    render = {"csv": render_csv, "json": render_json}[fmt]
    return write_atomic(path, render(header, rows, meta, footer))


def read_csv(path):
    """Parse a dataset written by :func:`write_dataset`; returns (meta, header, rows, footer)."""
    meta, footer, rows, header = {}, {}, [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# footer "):
            k, v = line[len("# footer "):].split("=", 1)
            footer[k] = float(v)
        elif line.startswith("# ") and "=" in line:
            k, v = line[2:].split("=", 1)
            meta[k] = v
        elif line.startswith("#"):
            continue
        elif header is None:
            header = line.split(",")
        else:
            rows.append([float(x) for x in line.split(",")])
    return meta, header, np.array(rows), footer
