"""Figure rendering from magiclab CSV output.

Input is consumed strictly through the published CSV schemas; figures are
written as deterministic vector files (fixed SVG hash salt, no timestamp
metadata), so identical input bytes give identical output bytes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SWEEP_COLUMNS = [
    "n", "D", "p", "q", "alpha", "seed", "t", "K", "K_prime", "max_block",
    "cpx_log2", "order_param_term", "ee_half_cut",
]
PERC_COLUMNS = ["realization", "p", "sigma", "n_clusters", "max_s", "max_d", "spanning"]
SP_COLUMNS = ["n", "p", "shot", "d_star", "trivial"]

KINDS = ("order_param", "collapse", "histogram", "sp_decay", "perc")


class SchemaError(ValueError):
    """Input columns do not match the expected CSV schema."""


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    out: str
    sidecar: str | None = None  # collapse parameters (JSON with critical, nu)
    column: str = "max_block"  # histogram column
    control: str | None = None  # sweep x axis; inferred when absent

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _read_csv(path: str, expected: list) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected columns {expected}")
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            raise SchemaError(
                f"{path}: column mismatch (missing {missing or 'none'}, "
                f"unexpected {extra or 'none'})"
            )
        return [dict(zip(header, row)) for row in reader]


def _style():
    plt.rcParams.update({
        "svg.hashsalt": "magiclab",
        "figure.figsize": (4.8, 3.4),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
    })


def _save(fig, out: str):
    fig.savefig(out, metadata={"Date": None} if out.endswith(".svg") else None)
    plt.close(fig)


def _sweep_points(rows, control):
    if control is None:
        alphas = {r["alpha"] for r in rows}
        control = "alpha" if len(alphas) > 1 else "p"
    buckets = {}
    for r in rows:
        key = (int(r["n"]), float(r[control]))
        buckets.setdefault(key, []).append(float(r["order_param_term"]))
    pts = {}
    for (n, x), vals in sorted(buckets.items()):
        m = sum(vals) / len(vals)
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        pts.setdefault(n, []).append((x, m, se))
    return control, pts


def render(spec: PlotSpec) -> str:
    """Draw the figure and return the output path."""
    _style()
    if spec.kind in ("order_param", "collapse"):
        rows = [r for path in spec.inputs for r in _read_csv(path, SWEEP_COLUMNS)]
        control, pts = _sweep_points(rows, spec.control)
        fig, ax = plt.subplots()
        if spec.kind == "order_param":
            for n, series in pts.items():
                xs, ys, es = zip(*series) if series else ((), (), ())
                ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, lw=1, label=f"n={n}")
            ax.set_xlabel(control)
        else:
            params = {"critical": 0.0, "nu": 1.0}
            if spec.sidecar:
                with open(spec.sidecar) as fh:
                    params.update(json.load(fh))
            c, nu = params["critical"], params["nu"]
            for n, series in pts.items():
                xs = [(x - c) * n ** (1.0 / nu) for x, _, _ in series]
                ys = [y for _, y, _ in series]
                es = [e for _, _, e in series]
                ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, lw=0.8, label=f"n={n}")
            ax.set_xlabel(f"({control} - {c:.3g}) n^(1/{nu:.3g})")
        ax.set_ylabel("log2 CPX / t")
        if pts:
            ax.legend()
        _save(fig, spec.out)
        return spec.out

    if spec.kind == "histogram":
        rows = [r for path in spec.inputs for r in _read_csv(path, SWEEP_COLUMNS)]
        if spec.column not in SWEEP_COLUMNS:
            raise SchemaError(f"histogram column {spec.column!r} not in schema")
        fig, ax = plt.subplots()
        groups = {}
        for r in rows:
            groups.setdefault(int(r["n"]), []).append(float(r[spec.column]))
        for n, vals in sorted(groups.items()):
            top = max(vals) if vals else 1.0
            bins = np.arange(-0.5, top + 1.5, 1.0)
            ax.hist(vals, bins=bins, histtype="step", density=True, label=f"n={n}")
        ax.set_xlabel(spec.column)
        ax.set_ylabel("frequency")
        ax.legend()
        _save(fig, spec.out)
        return spec.out

    if spec.kind == "sp_decay":
        rows = [r for path in spec.inputs for r in _read_csv(path, SP_COLUMNS)]
        fig, ax = plt.subplots()
        groups = {}
        for r in rows:
            groups.setdefault(int(r["n"]), []).append(int(r["d_star"]))
        for n, ds in sorted(groups.items()):
            arr = np.array(ds)
            dmax = max((d for d in ds if d > 0), default=1)
            depths = np.arange(1, dmax + 1)
            surv = np.array([np.mean((arr < 0) | (arr > d)) for d in depths])
            keep = surv > 0
            ax.semilogy(depths[keep], surv[keep], marker=".", ms=3, lw=0.8, label=f"n={n}")
            fit = _exp_fit(depths[keep], surv[keep], len(ds))
            if fit is not None:
                c, g = fit
                ax.semilogy(depths, c * np.exp(-g * depths), ls="--", lw=0.8,
                            color=ax.lines[-1].get_color())
        ax.set_xlabel("block depth d")
        ax.set_ylabel("1 - P(SP)")
        ax.legend()
        _save(fig, spec.out)
        return spec.out

    # perc: one curve per input file
    fig, ax = plt.subplots()
    for path in spec.inputs:
        rows = _read_csv(path, PERC_COLUMNS)
        buckets = {}
        for r in rows:
            buckets.setdefault(float(r["p"]), []).append(int(r["spanning"]))
        xs = sorted(buckets)
        ys = [np.mean(buckets[x]) for x in xs]
        label = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
        ax.plot(xs, ys, marker="o", ms=3, lw=1, label=label)
    ax.set_xlabel("p")
    ax.set_ylabel("spanning probability")
    ax.legend()
    _save(fig, spec.out)
    return spec.out


def _exp_fit(depths, surv, shots):
    """Weighted least squares of log survival, matching the harness fit."""
    keep = surv > 5.0 / shots
    if keep.sum() < 3:
        return None
    x = np.asarray(depths, float)[keep]
    y = np.log(surv[keep])
    w = surv[keep] * shots
    wx = np.sum(w * x) / np.sum(w)
    wy = np.sum(w * y) / np.sum(w)
    den = np.sum(w * (x - wx) ** 2)
    if den <= 0:
        return None
    slope = np.sum(w * (x - wx) * (y - wy)) / den
    return math.exp(wy - slope * wx), -slope
