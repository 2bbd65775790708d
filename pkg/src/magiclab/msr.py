"""Disjoint-support blocks of the restricted FinalList and the runtime proxy.

Blocks are connected components of the support-overlap graph over MSR
qubits, computed on an equivalent FinalList with reduced supports.
Recombining commuting members never changes the measured group, and the
sequential evaluation order makes one reduction rule canonical: a
measurement is interchangeable with itself times any product of EARLIER
measurements, whose outcomes are already in hand when it is performed.
Each member therefore greedily sheds weight against its predecessors;
single-qubit members are additionally quotiented through every member on
their qubit (they pin that qubit's component for anything commuting), and
the two passes iterate to a fixpoint.

Gadget and monitor outcomes are classically known numbers, so a block
needs quantum evaluation only if some member still carries a retained
output in its composition; the proxy sums 2^size over those blocks, and
the order parameter is the realization average of log2(proxy)/t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pbc import OUTPUT, Member


@dataclass
class MsrBlock:
    support: int  # qubit bitmask over the MSR
    members: list[int]  # indices into the reduced FinalList
    has_output: bool

    @property
    def size(self) -> int:
        return self.support.bit_count()


@dataclass
class MsrPartition:
    t: int
    blocks: list[MsrBlock]

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def k_prime(self) -> int:
        return sum(1 for b in self.blocks if b.has_output)

    def sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def max_block(self) -> int:
        return max((b.size for b in self.blocks), default=0)


def _support_reduce(vecs, deps):
    """Sequential greedy reduction plus singleton quotienting, to a fixpoint.

    deps carries, per member, a bitmask of the retained output measurements
    entering its composition; recombination XORs it along.
    """
    k = len(vecs)
    outer = True
    while outer:
        outer = False
        # each member sheds weight against earlier members only
        for i in range(k):
            changed = True
            while changed:
                changed = False
                xi, zi = vecs[i]
                si = xi | zi
                wi = si.bit_count()
                for j in range(i):
                    xj, zj = vecs[j]
                    if not ((xj | zj) & si):
                        continue
                    nx, nz = xi ^ xj, zi ^ zj
                    w = (nx | nz).bit_count()
                    if w < wi:
                        if w == 0:
                            raise AssertionError("reduction collapsed an independent member")
                        vecs[i] = (nx, nz)
                        deps[i] ^= deps[j]
                        xi, zi, si, wi = nx, nz, nx | nz, w
                        changed = True
                        outer = True
        # single-qubit members strip their qubit from every other member;
        # a commuting member sharing the qubit must carry the identical
        # component there, so the product always drops the qubit
        for i in range(k):
            xi, zi = vecs[i]
            si = xi | zi
            if si == 0 or si.bit_count() != 1:
                continue
            for j in range(k):
                if j == i:
                    continue
                xj, zj = vecs[j]
                if (xj | zj) & si:
                    nx, nz = xj ^ xi, zj ^ zi
                    if (nx | nz) & si or (nx | nz) == 0:
                        raise AssertionError("singleton quotient failed to strip")
                    vecs[j] = (nx, nz)
                    deps[j] ^= deps[i]
                    outer = True
    return vecs, deps


def partition(members: list[Member], t: int) -> MsrPartition:
    """Reduce supports, then split by support overlap.

    Gadget and monitor outcomes are classically known numbers, so only
    blocks whose members still carry an output dependency after the
    recombination need a quantum evaluation.
    """
    deps = [
        (1 << i) if m.kind == OUTPUT else 0 for i, m in enumerate(members)
    ]
    vecs, deps = _support_reduce([(m.x, m.z) for m in members], deps)
    supports = [x | z for x, z in vecs]
    # union-find over MSR qubits through shared supports
    parent = list(range(t))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for sup in supports:
        if sup == 0:
            continue
        first = (sup & -sup).bit_length() - 1
        bits = sup & (sup - 1)
        while bits:
            q = (bits & -bits).bit_length() - 1
            bits &= bits - 1
            ra, rb = find(first), find(q)
            if ra != rb:
                parent[rb] = ra
    groups: dict[int, MsrBlock] = {}
    for i, sup in enumerate(supports):
        if sup == 0:
            continue
        root = find((sup & -sup).bit_length() - 1)
        blk = groups.get(root)
        if blk is None:
            blk = MsrBlock(0, [], False)
            groups[root] = blk
        blk.support |= sup
        blk.members.append(i)
        if deps[i]:
            blk.has_output = True
    return MsrPartition(t, list(groups.values()))


def cpx_pbc(part: MsrPartition) -> int:
    """Sum of 2^size over output-carrying blocks, exact integer; 0 if none."""
    return sum(1 << b.size for b in part.blocks if b.has_output)


def order_parameter_term(cpx: int, t: int) -> float:
    """Per-realization contribution log2(cpx)/t; zero-magic cases give 0."""
    if t <= 0 or cpx <= 0:
        return 0.0
    return math.log2(cpx) / t


def order_parameter(samples) -> tuple[float, float]:
    """Mean and standard error of log2(cpx)/t over (cpx, t) samples."""
    if not samples:
        raise ValueError("no samples")
    terms = [order_parameter_term(c, t) for c, t in samples]
    m = sum(terms) / len(terms)
    if len(terms) == 1:
        return m, 0.0
    var = sum((v - m) ** 2 for v in terms) / (len(terms) - 1)
    return m, math.sqrt(var / len(terms))


def block_histogram(partitions) -> dict[int, float]:
    """Block-size frequencies averaged over realizations."""
    counts: dict[int, float] = {}
    nreal = 0
    for part in partitions:
        nreal += 1
        for b in part.blocks:
            counts[b.size] = counts.get(b.size, 0.0) + 1.0
    if nreal == 0:
        raise ValueError("no realizations")
    return {s: c / nreal for s, c in sorted(counts.items())}
