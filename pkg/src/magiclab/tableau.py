"""Stabilizer tableau simulation, bit-packed column-wise.

Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers; the tableau stores,
per qubit, the x and z column as a 2n-bit integer, so applying a 2-qubit gate
is a constant number of big-int operations regardless of n.  Row phases (the
i-exponent of the row word) live in two bit planes.  Phase tracking can be
switched off for sign-blind workloads (entanglement sweeps), which skips the
deterministic-outcome computation entirely.
"""

from __future__ import annotations

from .gf2 import gf2_rank
from .pauli import PauliOperator, phase_mul
from .clifford import CliffordGate

_gate_plan_cache: dict = {}


def _gate_plan(gate: CliffordGate):
    """Column-update plan: XOR lists per output column and phase patterns."""
    plan = _gate_plan_cache.get(gate)
    if plan is None:
        k = gate.arity
        # out_cols[i] = list of input column slots feeding output slot i,
        # slots ordered (x_0, z_0, x_1, z_1)
        out_cols = [[] for _ in range(2 * k)]
        for j in range(2 * k):
            lx, lz, _ = gate.img[j]
            for q in range(k):
                if (lx >> q) & 1:
                    out_cols[2 * q].append(j)
                if (lz >> q) & 1:
                    out_cols[2 * q + 1].append(j)
        phase_pats = []
        for pat in range(1, 1 << (2 * k)):
            dp = gate.table_fwd[pat][2]
            if dp:
                phase_pats.append((pat, dp))
        plan = (out_cols, tuple(phase_pats))
        _gate_plan_cache[gate] = plan
    return plan


class StabilizerTableau:
    """Pure stabilizer state on n qubits with destabilizer bookkeeping."""

    __slots__ = ("n", "xcol", "zcol", "plo", "phi", "track_phases")

    def __init__(self, n: int, track_phases: bool = True):
        self.n = n
        self.xcol = [1 << r for r in range(n)]
        self.zcol = [1 << (n + r) for r in range(n)]
        self.plo = 0
        self.phi = 0
        self.track_phases = track_phases

    # -- row access ----------------------------------------------------------

    def row(self, r: int) -> PauliOperator:
        x = z = 0
        for j in range(self.n):
            x |= ((self.xcol[j] >> r) & 1) << j
            z |= ((self.zcol[j] >> r) & 1) << j
        p = ((self.plo >> r) & 1) | (((self.phi >> r) & 1) << 1)
        return PauliOperator(self.n, x, z, p)

    def stabilizer(self, i: int) -> PauliOperator:
        return self.row(self.n + i)

    def destabilizer(self, i: int) -> PauliOperator:
        return self.row(i)

    def stabilizer_rows(self) -> list[PauliOperator]:
        return [self.row(self.n + i) for i in range(self.n)]

    def destabilizer_rows(self) -> list[PauliOperator]:
        return [self.row(i) for i in range(self.n)]

    # -- phase planes ----------------------------------------------------------

    def _add_phase(self, mask: int, dp: int):
        if dp & 1:
            carry = self.plo & mask
            self.plo ^= mask
            self.phi ^= carry
        if dp & 2:
            self.phi ^= mask

    def _row_phase(self, r: int) -> int:
        return ((self.plo >> r) & 1) | (((self.phi >> r) & 1) << 1)

    # -- gates ----------------------------------------------------------

    def apply_gate(self, gate: CliffordGate, qubits):
        """Conjugate every row by the gate (state update |psi> -> C|psi>)."""
        k = gate.arity
        if len(qubits) != k:
            raise ValueError("qubit count does not match gate arity")
        cols = []
        for q in qubits:
            cols.append(self.xcol[q])
            cols.append(self.zcol[q])
        out_cols, phase_pats = _gate_plan(gate)
        if self.track_phases and phase_pats:
            full = (1 << (2 * self.n)) - 1
            for pat, dp in phase_pats:
                m = full
                for i in range(2 * k):
                    m &= cols[i] if (pat >> i) & 1 else ~cols[i]
                if m:
                    self._add_phase(m & full, dp)
        for i, q in enumerate(qubits):
            acc = 0
            for j in out_cols[2 * i]:
                acc ^= cols[j]
            self.xcol[q] = acc
            acc = 0
            for j in out_cols[2 * i + 1]:
                acc ^= cols[j]
            self.zcol[q] = acc

    # -- measurement ----------------------------------------------------------

    def anticommutation_mask(self, pauli: PauliOperator) -> int:
        """Bitmask over rows that anti-commute with the operator."""
        m = 0
        bits = pauli.z
        while bits:
            j = (bits & -bits).bit_length() - 1
            bits &= bits - 1
            m ^= self.xcol[j]
        bits = pauli.x
        while bits:
            j = (bits & -bits).bit_length() - 1
            bits &= bits - 1
            m ^= self.zcol[j]
        return m

    def measure(self, pauli: PauliOperator, coin: int = 1):
        """Measure a Hermitian Pauli; returns (outcome, deterministic).

        coin is the +-1 outcome used when the result is genuinely random.
        With track_phases off, deterministic outcomes are reported as None.
        """
        if not pauli.is_hermitian():
            raise ValueError("measurement operator must be Hermitian")
        n = self.n
        m = self.anticommutation_mask(pauli)
        stab_mask = m >> n
        if stab_mask == 0:
            if not self.track_phases:
                return None, True
            prod = (0, 0, 0)
            dmask = m & ((1 << n) - 1)
            while dmask:
                i = (dmask & -dmask).bit_length() - 1
                dmask &= dmask - 1
                row = self.row(n + i)
                prod = phase_mul(*prod, row.x, row.z, row.phase)
            if prod[0] != pauli.x or prod[1] != pauli.z:
                raise AssertionError("tableau corrupted: bad deterministic product")
            outcome = 1 if prod[2] == pauli.phase else -1
            return outcome, True
        p = (stab_mask & -stab_mask).bit_length() - 1
        rp = n + p
        pivot = self.row(rp)
        fix = m & ~(1 << rp) & ~(1 << p)
        if fix:
            if self.track_phases:
                parity = 0
                bits = pivot.x
                while bits:
                    j = (bits & -bits).bit_length() - 1
                    bits &= bits - 1
                    parity ^= self.zcol[j]
                self._add_phase(fix, pivot.phase)
                self._add_phase(fix & parity, 2)
            bits = pivot.x
            while bits:
                j = (bits & -bits).bit_length() - 1
                bits &= bits - 1
                self.xcol[j] ^= fix
            bits = pivot.z
            while bits:
                j = (bits & -bits).bit_length() - 1
                bits &= bits - 1
                self.zcol[j] ^= fix
        # destabilizer p <- old stabilizer p; stabilizer p <- outcome * P
        outcome = 1 if coin >= 0 else -1
        dbit, sbit = 1 << p, 1 << rp
        clear = ~(dbit | sbit)
        for j in range(n):
            self.xcol[j] &= clear
            self.zcol[j] &= clear
        for bits, col, newbit in (
            (pivot.x, self.xcol, dbit),
            (pivot.z, self.zcol, dbit),
            (pauli.x, self.xcol, sbit),
            (pauli.z, self.zcol, sbit),
        ):
            while bits:
                j = (bits & -bits).bit_length() - 1
                bits &= bits - 1
                col[j] |= newbit
        if self.track_phases:
            self.plo = (self.plo & ~dbit) | ((pivot.phase & 1) << p)
            self.phi = (self.phi & ~dbit) | (((pivot.phase >> 1) & 1) << p)
            ph = (pauli.phase + (0 if outcome == 1 else 2)) & 3
            self.plo = (self.plo & ~sbit) | ((ph & 1) << rp)
            self.phi = (self.phi & ~sbit) | (((ph >> 1) & 1) << rp)
        return outcome, False

    def measure_z(self, qubit: int, coin: int = 1):
        return self.measure(PauliOperator.single(self.n, qubit, "Z"), coin)

    # -- diagnostics ----------------------------------------------------------

    def entanglement_entropy(self, cut: int) -> int:
        """Bipartite entropy in bits for A = qubits 0..cut-1.

        Equals |A| minus the number of independent stabilizer generators
        supported entirely inside A, computed as a GF(2) rank of the rows
        projected onto the complement.
        """
        n = self.n
        if not 0 <= cut <= n:
            raise ValueError("cut out of range")
        nb = n - cut
        if cut == 0 or nb == 0:
            return 0
        proj = []
        for i in range(n):
            row = self.row(n + i)
            xb = row.x >> cut
            zb = row.z >> cut
            proj.append(xb | (zb << nb))
        rank_b = gf2_rank(proj)
        return cut - (n - rank_b)

    def check_invariants(self):
        """Symplectic relations of the full tableau; raises on violation."""
        rows = [self.row(r) for r in range(2 * self.n)]
        n = self.n
        for i in range(2 * n):
            if not rows[i].is_hermitian():
                raise AssertionError(f"row {i} not Hermitian")
            for j in range(i, 2 * n):
                want = 1 if (i < n and j == i + n) else 0
                if rows[i].symplectic_product(rows[j]) != want:
                    raise AssertionError(f"symplectic relation broken at {i},{j}")


def entanglement_entropy(tableau: StabilizerTableau, cut: int) -> int:
    return tableau.entanglement_entropy(cut)
