"""Stabilizer purification of a single injected T gate.

After T acts on a qubit whose Z is undetermined, the state encodes one
logical qubit: the code group is the updated stabilizer group, the logical
pair is (evolved Z on the T qubit, the generator it anti-commuted with).  A
later monitor purifies exactly when it measures that logical qubit, i.e.
lands in one of the three logical cosets; anything else either updates the
code or is trivial.  The TCB experiment measures how deep a block of
monitored random Cliffords must be for purification, and the closed forms
give the layer probability and characteristic time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordGate, sample_c2
from .gf2 import gf2_in_span
from .pauli import PauliOperator, phase_mul, sp_raw
from .tableau import StabilizerTableau

SP = "sp"
NSP_UPDATE = "nsp_update"
TRIVIAL = "trivial"


@dataclass
class CodeState:
    """One logical qubit tracked through Cliffords and monitors."""

    n: int
    gens: list  # n-1 raw (x, z, phase) triples
    zbar: tuple  # evolved Z on the T qubit
    xbar: tuple  # evolved anti-commuting generator
    purified: bool = False
    d_star: int | None = None

    def check_invariants(self):
        zb, xb = self.zbar, self.xbar
        if sp_raw(zb[0], zb[1], xb[0], xb[1]) != 1:
            raise AssertionError("logicals must anti-commute")
        for g in self.gens:
            if sp_raw(g[0], g[1], zb[0], zb[1]) or sp_raw(g[0], g[1], xb[0], xb[1]):
                raise AssertionError("logicals must commute with the code group")
        vecs = [x | (z << self.n) for x, z, _ in self.gens]
        from .gf2 import gf2_rank

        if gf2_rank(vecs) != len(self.gens):
            raise AssertionError("code generators must stay independent")


def inject_t(tableau: StabilizerTableau, qubit: int) -> CodeState | None:
    """Build the logical-qubit picture after T on one qubit.

    Returns None when Z on that qubit is already determined (the T gate
    injects no magic).
    """
    n = tableau.n
    pz = PauliOperator.single(n, qubit, "Z")
    mask = tableau.anticommutation_mask(pz) >> n
    if mask == 0:
        return None
    p = (mask & -mask).bit_length() - 1
    s1 = tableau.stabilizer(p)
    gens = []
    for i in range(n):
        if i == p:
            continue
        row = tableau.stabilizer(i)
        if (mask >> i) & 1:
            x, z, ph = phase_mul(s1.x, s1.z, s1.phase, row.x, row.z, row.phase)
            gens.append((x, z, ph))
        else:
            gens.append((row.x, row.z, row.phase))
    return CodeState(n, gens, (pz.x, pz.z, pz.phase), (s1.x, s1.z, s1.phase))


def step_clifford(cs: CodeState, gate: CliffordGate, qubits):
    """Conjugate the code group and both logicals by a gate."""
    if cs.purified:
        raise ValueError("code already purified")
    cs.gens = [gate.conjugate_raw(x, z, p, qubits, True) for x, z, p in cs.gens]
    cs.zbar = gate.conjugate_raw(*cs.zbar, qubits, True)
    cs.xbar = gate.conjugate_raw(*cs.xbar, qubits, True)


def step_monitor(cs: CodeState, qubit: int, coin: int = 1) -> str:
    """Process one Z monitor; returns SP, NSP_UPDATE or TRIVIAL."""
    if cs.purified:
        raise ValueError("code already purified")
    n = cs.n
    zx, zz = 0, 1 << qubit
    anti = [i for i, g in enumerate(cs.gens) if sp_raw(zx, zz, g[0], g[1])]
    if anti:
        p = anti[0]
        gp = cs.gens[p]
        for i in anti[1:]:
            g = cs.gens[i]
            cs.gens[i] = phase_mul(g[0], g[1], g[2], gp[0], gp[1], gp[2])
        if sp_raw(zx, zz, cs.zbar[0], cs.zbar[1]):
            cs.zbar = phase_mul(*cs.zbar, gp[0], gp[1], gp[2])
        if sp_raw(zx, zz, cs.xbar[0], cs.xbar[1]):
            cs.xbar = phase_mul(*cs.xbar, gp[0], gp[1], gp[2])
        cs.gens[p] = (zx, zz, 0 if coin >= 0 else 2)
        return NSP_UPDATE
    vec = zx | (zz << n)
    if gf2_in_span(vec, [x | (z << n) for x, z, _ in cs.gens]):
        return TRIVIAL
    hits_x = sp_raw(zx, zz, cs.xbar[0], cs.xbar[1])
    hits_z = sp_raw(zx, zz, cs.zbar[0], cs.zbar[1])
    if not (hits_x or hits_z):
        raise AssertionError("monitor outside code and logicals: corrupted tracking")
    cs.purified = True
    return SP


def _brick_layer(tableau: StabilizerTableau, parity: int, rng, code: CodeState | None = None):
    n = tableau.n
    for a in range(parity % 2, n - 1, 2):
        g = sample_c2(rng)
        tableau.apply_gate(g, (a, a + 1))
        if code is not None and not code.purified:
            step_clifford(code, g, (a, a + 1))


@dataclass
class TcbResult:
    n: int
    p: float
    depths: np.ndarray
    p_sp: np.ndarray
    se: np.ndarray
    gamma: float
    gamma_se: float
    d_star: list
    n_trivial: int
    shots: int


def tcb_experiment(
    n: int,
    p: float,
    d_max: int,
    shots: int,
    rng,
    scramble_depth: int | None = None,
) -> TcbResult:
    """Scramble, inject one non-trivial T, monitor until purification.

    Each shot scrambles depth n^2 with monitors at rate p, injects a T on a
    qubit where it creates magic (trivial draws are counted and redrawn),
    then alternates monitor slots and Clifford layers up to d_max,
    recording the purification depth d* (or -1 when censored).
    """
    if scramble_depth is None:
        scramble_depth = n * n
    d_star: list[int] = []
    n_trivial = 0
    for _ in range(shots):
        code = None
        while code is None:
            tab = StabilizerTableau(n, track_phases=False)
            for layer in range(scramble_depth):
                _brick_layer(tab, layer, rng)
                for q in range(n):
                    if rng.random() < p:
                        tab.measure_z(q, coin=1 if rng.random() < 0.5 else -1)
            order = rng.permutation(n)
            for q in order:
                code = inject_t(tab, int(q))
                if code is not None:
                    break
                n_trivial += 1
        hit = -1
        for d in range(1, d_max + 1):
            for q in range(n):
                if rng.random() < p:
                    ev = step_monitor(code, q, coin=1 if rng.random() < 0.5 else -1)
                    if ev == SP:
                        hit = d
                        break
            if hit >= 0:
                break
            # the code state is a complete description; the scrambling
            # tableau is no longer needed once the T is injected
            for a in range(d % 2, n - 1, 2):
                step_clifford(code, sample_c2(rng), (a, a + 1))
        d_star.append(hit)
    depths = np.arange(1, d_max + 1)
    arr = np.array(d_star)
    cdf = np.array([(arr > 0) & (arr <= d) for d in depths]).mean(axis=1)
    se = np.sqrt(np.maximum(cdf * (1 - cdf), 1e-12) / shots)
    gamma, gamma_se = fit_decay_rate(depths, cdf, shots)
    return TcbResult(n, p, depths, cdf, se, gamma, gamma_se, d_star, n_trivial, shots)


def fit_decay_rate(depths, p_sp, shots) -> tuple[float, float]:
    """Weighted least squares of log(1 - P(SP)) vs depth.

    Only depths where the survival estimate exceeds 5/shots enter; weights
    are the surviving counts.  Returns (rate, standard error).
    """
    surv = 1.0 - np.asarray(p_sp)
    keep = surv > 5.0 / shots
    if keep.sum() < 3:
        raise ValueError("too few uncensored depths for a decay fit")
    x = np.asarray(depths, dtype=float)[keep]
    y = np.log(surv[keep])
    w = surv[keep] * shots
    wx = np.sum(w * x) / np.sum(w)
    wy = np.sum(w * y) / np.sum(w)
    cov = np.sum(w * (x - wx) * (y - wy))
    var = np.sum(w * (x - wx) ** 2)
    slope = cov / var
    resid = y - (wy + slope * (x - wx))
    dof = max(len(x) - 2, 1)
    slope_se = math.sqrt(max(np.sum(w * resid**2) / dof, 0.0) / var)
    return -slope, slope_se


# -- closed forms ------------------------------------------------------------


def sp_fraction(gamma: float) -> float:
    """Fraction of favorable monitor combinations for gamma pairs."""
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    return 1.5 * 2.0**gamma / (4.0**gamma - 1.0)


@dataclass
class SpTheory:
    f: float
    layer_prob: float  # chance a layer of monitors purifies
    tau_sp: float

    def p_sp(self, d, p):
        d = np.asarray(d, dtype=float)
        return 1.0 - (1.0 - p) * (1.0 - self.layer_prob) ** (d - 1.0)


def sp_theory(gamma: float, p: float, w: float) -> SpTheory:
    """Closed-form layer purification probability and characteristic time.

    At f = 1 the log is singular and tau is reported as infinity; p_sp
    still gives the exact depth dependence there.
    """
    f = sp_fraction(gamma)
    layer = 1.0 - (1.0 - f) ** (p * w)
    if f >= 1.0 or p * w == 0:
        tau = math.inf
    else:
        tau = -1.0 / (p * w * math.log(1.0 - f))
    return SpTheory(f, layer, tau)


def single_layer_sp(p: float, q: float, n: int) -> float:
    """Chance that one layer purifies all its freshly injected T gates."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("probabilities out of range")
    return p ** (q * n)
