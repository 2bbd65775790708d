"""Honeycomb bond percolation view of a monitored circuit.

Nodes are gate endpoints (layer, qubit) plus start markers at layer 0 and
output markers at layer D+1.  A 2-qubit gate is a vertical bond, cut when
the gate is separable; each qubit-line segment between consecutive
touchpoints is an oblique bond, cut when any monitor lands in the slots it
spans.  Clusters connected to the final-time boundary are the circuit
clusters (CCs) that matter for output sampling.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .circuit import Circuit
from .clifford import is_separable


class UnionFind:
    """Array union-find with path halving and union by size."""

    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class HoneycombLattice:
    n: int
    depth: int
    node_coord: list  # (layer, qubit) per node id; layer 0 start, depth+1 output
    node_id: dict  # (layer, qubit) -> id
    bonds: list  # (id1, id2) present bonds only
    n_vertical: int = 0
    cut_vertical: int = 0
    n_oblique: int = 0
    cut_oblique: int = 0

    def occupancy(self) -> tuple[float, float]:
        """Fraction of present (vertical, oblique) bonds."""
        pv = 1.0 - self.cut_vertical / self.n_vertical if self.n_vertical else 1.0
        po = 1.0 - self.cut_oblique / self.n_oblique if self.n_oblique else 1.0
        return pv, po


@dataclass
class CircuitCluster:
    nodes: list
    qubits: set
    s: int
    d: int
    touches_final: bool
    touches_start: bool
    retained: bool = False

    @property
    def radius(self) -> int:
        return self.s + self.d

    @property
    def spanning(self) -> bool:
        return self.touches_final and self.touches_start


def _build_lattice(n, depth, gate_layers, separable_flags, cut_slots, output_qubits):
    """Assemble nodes and present bonds.

    gate_layers: list of (layer, a) gate anchors (gate on (a, a+1));
    separable_flags: parallel list of bools; cut_slots: set of (layer, qubit)
    monitored slots.
    """
    node_coord = []
    node_id = {}

    def nid(layer, qubit):
        key = (layer, qubit)
        i = node_id.get(key)
        if i is None:
            i = len(node_coord)
            node_id[key] = i
            node_coord.append(key)
        return i

    touch = [[0] for _ in range(n)]  # per-qubit touch layers, start marker at 0
    for q in range(n):
        nid(0, q)
    bonds = []
    n_vert = cut_vert = 0
    for (layer, a), sep in zip(gate_layers, separable_flags):
        ia, ib = nid(layer, a), nid(layer, a + 1)
        touch[a].append(layer)
        touch[a + 1].append(layer)
        n_vert += 1
        if sep:
            cut_vert += 1
        else:
            bonds.append((ia, ib))
    out_set = set(output_qubits)
    n_obl = cut_obl = 0
    for q in range(n):
        layers = touch[q]
        if q in out_set:
            layers = layers + [depth + 1]
            nid(depth + 1, q)
        for l1, l2 in zip(layers, layers[1:]):
            n_obl += 1
            cut = any((s, q) in cut_slots for s in range(max(l1, 1), min(l2, depth + 1)))
            if cut:
                cut_obl += 1
            else:
                bonds.append((node_id[(l1, q)], node_id[(l2, q)]))
    return HoneycombLattice(
        n, depth, node_coord, node_id, bonds, n_vert, cut_vert, n_obl, cut_obl
    )


def map_circuit(circuit: Circuit) -> HoneycombLattice:
    """Deterministic lattice of a circuit: separable gates and monitors cut."""
    gate_layers = []
    sep_flags = []
    cut_slots = set()
    for e in circuit.events:
        if e.kind == "gate":
            if e.gate.arity != 2:
                raise ValueError("lattice mapping expects generated (2-qubit) circuits")
            gate_layers.append((e.layer, e.qubits[0]))
            sep_flags.append(is_separable(e.gate))
        elif e.kind == "monitor":
            cut_slots.add((e.layer, e.qubits[0]))
    return _build_lattice(
        circuit.n, circuit.depth, gate_layers, sep_flags, cut_slots, circuit.output_qubits
    )


def random_lattice(n: int, depth: int, p: float, sigma: float, rng) -> HoneycombLattice:
    """Sample bond occupancies directly: p0 = 1 - sigma, p1 = p2 = 1 - p."""
    gate_layers = []
    sep_flags = []
    for layer in range(1, depth + 1):
        off = (layer - 1) % 2
        for a in range(off, n - 1, 2):
            gate_layers.append((layer, a))
            sep_flags.append(bool(rng.random() < sigma))
    cut_slots = set()
    mat = rng.random((depth, n))
    for layer in range(1, depth + 1):
        row = mat[layer - 1]
        for q in range(n):
            if row[q] < p:
                cut_slots.add((layer, q))
    return _build_lattice(n, depth, gate_layers, sep_flags, cut_slots, tuple(range(n)))


def cluster_labels(lattice: HoneycombLattice) -> list[int]:
    """Root label per node; the decomposition partitions all nodes."""
    uf = UnionFind(len(lattice.node_coord))
    for a, b in lattice.bonds:
        uf.union(a, b)
    return [uf.find(i) for i in range(len(lattice.node_coord))]


def find_ccs(lattice: HoneycombLattice, retain_log_base: float = math.e):
    """All clusters with extents and flags, final-boundary ones first.

    Width s and depth d are bounding-box extents of the gate nodes (layers
    1..D); clusters made of bare boundary markers get s = d = 1.  A cluster
    is retained when it touches the final boundary and min(s, d) exceeds
    log base `retain_log_base` of n (natural log by default).
    """
    labels = cluster_labels(lattice)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    threshold = math.log(lattice.n, retain_log_base) if lattice.n > 1 else 0.0
    clusters = []
    for members in groups.values():
        qmin = qmax = None
        lmin = lmax = None
        touches_final = touches_start = False
        qubits = set()
        for i in members:
            layer, q = lattice.node_coord[i]
            qubits.add(q)
            if layer == 0:
                touches_start = True
            elif layer == lattice.depth + 1:
                touches_final = True
            else:
                qmin = q if qmin is None else min(qmin, q)
                qmax = q if qmax is None else max(qmax, q)
                lmin = layer if lmin is None else min(lmin, layer)
                lmax = layer if lmax is None else max(lmax, layer)
        if qmin is None:
            s = d = 1
        else:
            s = qmax - qmin + 1
            d = lmax - lmin + 1
        cc = CircuitCluster(members, qubits, s, d, touches_final, touches_start)
        cc.retained = touches_final and min(s, d) > threshold
        clusters.append(cc)
    clusters.sort(key=lambda c: (not c.touches_final, -len(c.nodes)))
    return clusters


def kappa_honeycomb(p0: float, p1: float, p2: float) -> float:
    """Criticality indicator; the critical surface is its zero set."""
    for v in (p0, p1, p2):
        if not 0.0 <= v <= 1.0:
            raise ValueError("bond probabilities must lie in [0, 1]")
    return p0 + p1 + p2 + (1 - p0) * (1 - p1) * (1 - p2) - 2


def critical_p_tn(sigma: float) -> float:
    """Monitoring rate where kappa(1-sigma, 1-p, 1-p) vanishes.

    Reduces to the quadratic sigma p^2 - 2 p + (1 - sigma) = 0; the root in
    [0, 1] is returned (0.5 in the square-lattice limit sigma = 0).
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    if sigma == 0.0:
        return 0.5
    disc = 4.0 - 4.0 * sigma * (1.0 - sigma)
    p = (2.0 - math.sqrt(disc)) / (2.0 * sigma)
    if not 0.0 <= p <= 1.0:
        raise ValueError("no root in [0, 1]")
    return p


def cpx_tn(cluster: CircuitCluster) -> int:
    """Tensor-network runtime proxy 2^min(s, d) as an exact integer."""
    return 1 << min(cluster.s, cluster.d)


def typ_cpx_tn(realizations) -> float:
    """Mean over realizations of sum_CC min(s,d) * ln 2 (natural log)."""
    if not realizations:
        raise ValueError("no realizations")
    total = 0.0
    for clusters in realizations:
        total += sum(
            min(c.s, c.d) * math.log(2.0) for c in clusters if c.touches_final
        )
    return total / len(realizations)


def radius_tail(radii, min_points: int = 3) -> float:
    """Exponential decay rate of the radius survival function.

    Least-squares slope of log S(k) over the largest decade of counts,
    i.e. the k range where the survival count stays within a factor 10 of
    its maximum.
    """
    radii = sorted(radii)
    if not radii:
        raise ValueError("no radius samples")
    n = len(radii)
    ks = []
    logs = []
    for k in range(1, radii[-1] + 1):
        surv = n - bisect.bisect_left(radii, k)
        if surv <= 0:
            break
        # largest decade of counts; extend for near-degenerate tails
        if surv * 10 >= n or len(ks) < min_points:
            ks.append(float(k))
            logs.append(math.log(surv / n))
    if len(ks) < min_points:
        raise ValueError("insufficient tail data for a decay fit")
    kbar = sum(ks) / len(ks)
    lbar = sum(logs) / len(logs)
    num = sum((k - kbar) * (l - lbar) for k, l in zip(ks, logs))
    den = sum((k - kbar) ** 2 for k in ks)
    lam = -num / den
    if lam <= 0:
        raise ValueError("survival function does not decay")
    return lam
