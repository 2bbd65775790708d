"""Experiment orchestration: sweeps, statistics, persistence.

Every (grid point, realization) task derives its own counter-based random
streams from (master seed, grid index, realization index), so results are a
pure function of the configuration and seed no matter how many workers run
or in which order tasks complete.  Circuit generation, compiler coins and
the entanglement companion simulation draw from separate streams.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .circuit import ModelParams, generate
from .msr import cpx_pbc, order_parameter_term, partition
from .pbc import CoinRng, compile_circuit, restrict_to_msr
from .percolation import find_ccs, map_circuit, random_lattice
from .splab import tcb_experiment
from .stitch import stitch
from .tableau import StabilizerTableau

SWEEP_HEADER = "n,D,p,q,alpha,seed,t,K,K_prime,max_block,cpx_log2,order_param_term,ee_half_cut"
PERC_HEADER = "realization,p,sigma,n_clusters,max_s,max_d,spanning"
SP_HEADER = "n,p,shot,d_star,trivial"

SWEEP_KINDS = ("sweep_p_fixed_qD", "sweep_p_fixed_q", "sweep_alpha")


@dataclass
class ExperimentConfig:
    kind: str = "sweep_p_fixed_qD"
    n_values: tuple = (16, 32, 64)
    p_values: tuple = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
    alpha_values: tuple = ()
    q: float = 0.1  # fixed-q sweeps and the alpha sweep
    qd: float = 1.0  # fixed-qD sweeps: q = qd / D
    p: float = 0.08  # alpha sweep monitor rate
    depth_rule: str = "n"  # or an integer depth
    realizations: int = 300
    seed: int = 1
    threads: int = 1
    out: str = "sweep.csv"
    preselect: bool = False
    sigma: float = 0.05
    retain_log_base: float = math.e
    sp_shots: int = 2000
    sp_d_max: int = 120

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        cfg = cls()
        for key, val in data.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            if isinstance(getattr(cfg, key), tuple):
                val = tuple(val)
            setattr(cfg, key, val)
        return cfg

    def depth_for(self, n: int) -> int:
        if self.depth_rule == "n":
            return n
        return int(self.depth_rule)

    def grid(self):
        """(grid index, ModelParams) for every sweep point."""
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        pts = []
        if self.kind == "sweep_p_fixed_qD":
            for n in self.n_values:
                d = self.depth_for(n)
                for p in self.p_values:
                    pts.append(ModelParams(n, d, p, self.qd / d))
        elif self.kind == "sweep_p_fixed_q":
            for n in self.n_values:
                for p in self.p_values:
                    pts.append(ModelParams(n, self.depth_for(n), p, self.q))
        elif self.kind == "sweep_alpha":
            for n in self.n_values:
                for a in self.alpha_values:
                    pts.append(
                        ModelParams(
                            n, self.depth_for(n), self.p, self.q, a, "t_correlated"
                        )
                    )
        else:
            raise ValueError(f"{self.kind!r} is not a sweep kind")
        if not pts:
            raise ValueError("empty sweep grid")
        return list(enumerate(pts))


def run_realization(params: ModelParams, master_seed: int, grid_index: int,
                    realization: int, preselect: bool = False,
                    retain_log_base: float = math.e) -> dict:
    """Generate, cluster, stitch, compile and analyze one circuit."""
    rng_circ = np.random.default_rng([master_seed, grid_index, realization, 0])
    rng_coin = np.random.default_rng([master_seed, grid_index, realization, 1])
    rng_ee = np.random.default_rng([master_seed, grid_index, realization, 2])
    circuit = generate(params, rng_circ)
    t_total = circuit.t_count
    lattice = map_circuit(circuit)
    clusters = find_ccs(lattice, retain_log_base)
    cpx = 0
    k = k_prime = max_block = 0
    for cc in clusters:
        if not cc.retained:
            continue
        sub = stitch(cc, circuit, lattice)
        res = compile_circuit(sub, CoinRng(rng_coin), preselect=preselect)
        part = partition(restrict_to_msr(res), res.t)
        cpx += cpx_pbc(part)
        k += part.k
        k_prime += part.k_prime
        max_block = max(max_block, part.max_block())
    ee = _clifford_skeleton_ee(circuit, rng_ee)
    return {
        "n": params.n,
        "D": params.depth,
        "p": params.p,
        "q": params.q,
        "alpha": params.alpha,
        "seed": realization,
        "t": t_total,
        "K": k,
        "K_prime": k_prime,
        "max_block": max_block,
        "cpx_log2": math.log2(cpx) if cpx > 0 else 0.0,
        "order_param_term": order_parameter_term(cpx, t_total),
        "ee_half_cut": ee,
    }


def _clifford_skeleton_ee(circuit, rng) -> int:
    """Half-cut entropy of the circuit with its T gates dropped.

    The tableau cannot absorb T gates; the companion observable is the
    usual monitored-Clifford entanglement, whose transition the magic
    sweeps are compared against.
    """
    tab = StabilizerTableau(circuit.n, track_phases=False)
    for e in circuit.events:
        if e.kind == "gate":
            tab.apply_gate(e.gate, e.qubits)
        elif e.kind == "monitor":
            tab.measure_z(e.qubits[0], coin=1 if rng.random() < 0.5 else -1)
    return tab.entanglement_entropy(circuit.n // 2)


def _format_row(row: dict) -> str:
    return ",".join(
        [
            str(row["n"]),
            str(row["D"]),
            repr(float(row["p"])),
            repr(float(row["q"])),
            repr(float(row["alpha"])),
            str(row["seed"]),
            str(row["t"]),
            str(row["K"]),
            str(row["K_prime"]),
            str(row["max_block"]),
            repr(float(row["cpx_log2"])),
            repr(float(row["order_param_term"])),
            str(row["ee_half_cut"]),
        ]
    )


def _sweep_task(args):
    gi, params, seed, ri, preselect, base = args
    row = run_realization(params, seed, gi, ri, preselect, base)
    return (gi, ri), _format_row(row)


def run_sweep(config: ExperimentConfig, progress=None) -> list[str]:
    """Execute every grid point; returns the CSV lines in task order."""
    grid = config.grid()
    tasks = [
        (gi, params, config.seed, ri, config.preselect, config.retain_log_base)
        for gi, params in grid
        for ri in range(config.realizations)
    ]
    results = {}
    nworkers = config.threads if config.threads > 0 else (os.cpu_count() or 1)
    if nworkers > 1:
        import multiprocessing as mp

        with mp.Pool(nworkers) as pool:
            for key, line in pool.imap_unordered(_sweep_task, tasks, chunksize=4):
                results[key] = line
                if progress:
                    progress(len(results), len(tasks))
    else:
        for task in tasks:
            key, line = _sweep_task(task)
            results[key] = line
            if progress:
                progress(len(results), len(tasks))
    lines = [results[key] for key in sorted(results)]
    return lines


def write_csv(path: str, header: str, lines: list[str], config=None, wall: float = 0.0):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for line in lines:
            fh.write(line + "\n")
    if config is not None:
        manifest = {
            "config": asdict(config) if hasattr(config, "__dataclass_fields__") else config,
            "rows": len(lines),
            "wall_seconds": round(wall, 3),
            "version": _version(),
        }
        with open(path + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, default=list)
            fh.write("\n")


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("magiclab")
    except Exception:
        return "unknown"


# -- percolation statistics ---------------------------------------------------


def run_perc(sizes, p_values, sigma, realizations, master_seed) -> list[str]:
    """Spanning statistics on directly sampled lattices."""
    lines = []
    for si, n in enumerate(sizes):
        for pi, p in enumerate(p_values):
            for ri in range(realizations):
                rng = np.random.default_rng([master_seed, si, pi, ri])
                lat = random_lattice(n, n, p, sigma, rng)
                clusters = find_ccs(lat)
                ccs = [c for c in clusters if c.touches_final]
                span = any(c.spanning for c in ccs)
                max_s = max((c.s for c in ccs), default=0)
                max_d = max((c.d for c in ccs), default=0)
                lines.append(
                    f"{ri},{p!r},{sigma!r},{len(clusters)},{max_s},{max_d},{int(span)}"
                )
    return lines


def run_sp(n_values, p, shots, d_max, master_seed) -> list[str]:
    """Purification-depth records for the TCB experiment."""
    lines = []
    for ni, n in enumerate(n_values):
        rng = np.random.default_rng([master_seed, ni])
        res = tcb_experiment(n, p, d_max, shots, rng)
        for shot, d in enumerate(res.d_star):
            lines.append(f"{n},{p!r},{shot},{d},0")
    return lines


# -- finite-size scaling -------------------------------------------------------


@dataclass
class FssResult:
    critical: float
    nu: float
    quality: float
    critical_err: float = 0.0
    nu_err: float = 0.0


def collapse_quality(points, critical: float, nu: float) -> float:
    """Houdayer-Hartmann style master-curve residual.

    points: (n, x, y, dy) tuples.  Each point is compared against a local
    linear fit through the nearest scaled neighbors from other system
    sizes; the quality is the mean squared residual in units of the
    combined uncertainty.
    """
    scaled = [((x - critical) * n ** (1.0 / nu), y, dy, n) for n, x, y, dy in points]
    scaled.sort(key=lambda r: r[0])
    total = 0.0
    count = 0
    for i, (xs, y, dy, n) in enumerate(scaled):
        nbrs = []
        for j in range(i - 1, -1, -1):
            if scaled[j][3] != n:
                nbrs.append(scaled[j])
                break
        for j in range(i + 1, len(scaled)):
            if scaled[j][3] != n:
                nbrs.append(scaled[j])
                break
        if len(nbrs) < 2:
            continue
        (x1, y1, d1, _), (x2, y2, d2, _) = nbrs
        if x2 == x1:
            yhat = 0.5 * (y1 + y2)
            dhat2 = 0.25 * (d1 * d1 + d2 * d2)
        else:
            w = (xs - x1) / (x2 - x1)
            yhat = y1 + w * (y2 - y1)
            dhat2 = (1 - w) ** 2 * d1 * d1 + w * w * d2 * d2
        total += (y - yhat) ** 2 / (dy * dy + dhat2 + 1e-18)
        count += 1
    if count == 0:
        raise ValueError("not enough overlapping points for a collapse")
    return total / count


def fss_collapse(points, critical_range, nu_range=(0.5, 2.5), bootstrap: int = 40,
                 seed: int = 0) -> FssResult:
    """Minimize the collapse quality over (critical point, exponent).

    points: (n, x, y, dy) with at least three distinct sizes.  Bootstrap
    errors come from refitting Gaussian-resampled y values.
    """
    from scipy.optimize import minimize

    sizes = {p[0] for p in points}
    if len(sizes) < 3:
        raise ValueError("need at least three system sizes")

    def objective(v, pts):
        c, nu = v
        if not (critical_range[0] <= c <= critical_range[1]) or not (
            nu_range[0] <= nu <= nu_range[1]
        ):
            return 1e9
        try:
            return collapse_quality(pts, c, nu)
        except ValueError:
            return 1e9

    def fit(pts):
        best = None
        for c0 in np.linspace(critical_range[0], critical_range[1], 5)[1:-1]:
            for nu0 in (0.8, 1.2, 1.8):
                r = minimize(
                    objective,
                    [c0, nu0],
                    args=(pts,),
                    method="Nelder-Mead",
                    options={"xatol": 1e-4, "fatol": 1e-6, "maxiter": 400},
                )
                if best is None or r.fun < best.fun:
                    best = r
        return best

    best = fit(points)
    rng = np.random.default_rng(seed)
    boots = []
    for _ in range(bootstrap):
        resampled = [
            (n, x, y + rng.normal(0.0, dy if dy > 0 else 1e-6), dy)
            for n, x, y, dy in points
        ]
        b = fit(resampled)
        boots.append((b.x[0], b.x[1]))
    boots = np.array(boots) if boots else np.zeros((1, 2))
    return FssResult(
        float(best.x[0]),
        float(best.x[1]),
        float(best.fun),
        float(np.std(boots[:, 0])),
        float(np.std(boots[:, 1])),
    )


def aggregate_sweep(lines, control: str = "p"):
    """Group CSV lines into (n, x, mean, se) collapse points."""
    cols = SWEEP_HEADER.split(",")
    idx = {c: i for i, c in enumerate(cols)}
    buckets: dict[tuple, list[float]] = {}
    for line in lines:
        parts = line.split(",")
        n = int(parts[idx["n"]])
        x = float(parts[idx[control]])
        buckets.setdefault((n, x), []).append(float(parts[idx["order_param_term"]]))
    points = []
    for (n, x), vals in sorted(buckets.items()):
        m = sum(vals) / len(vals)
        if len(vals) > 1:
            var = sum((v - m) ** 2 for v in vals) / (len(vals) - 1)
            se = math.sqrt(var / len(vals))
        else:
            se = 0.0
        points.append((n, x, m, se))
    return points
