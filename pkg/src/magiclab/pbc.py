"""Compilation of monitored Clifford+T circuits to Pauli-based form.

The pipeline is gadgetize -> commute_cliffords -> reduce -> restrict_to_msr.
T gates become magic-state gadgets (parity measurement Z_c Z_a, the
two-qubit Clifford U, and an S^dag on the target conditioned on a +1 parity
outcome).  Every measurement is pulled back to time zero through the
Cliffords that precede it (M -> C^dag M C), then processed in temporal
order against the dummy Z group of the computational register:

  (a) anti-commuting with an earlier performed measurement N (dummy or
      retained): the measurement outcome is a fair coin lambda and the
      measurement is replaced by the Clifford V = (sigma N + lambda M)/sqrt2,
      which conjugates everything processed later;
  (b) a signed product of earlier measurements: the outcome is computed,
      nothing is retained;
  (c) otherwise it joins the FinalList.

The engine keeps one frame of letter images: pushing circuit gates composes
on the input side, absorbing V rotations on the output side, so extracting
a measurement is O(1) row products no matter how many gates and
replacements precede it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Event
from .clifford import CliffordGate, SDG, U_GADGET
from .pauli import PauliOperator

DUMMY = "dummy"
GADGET = "gadget"
MONITOR = "monitor"
OUTPUT = "output"


class InconsistentRecordError(ValueError):
    """A recorded monitor outcome contradicts its deterministic value."""


class CompilerInvariantError(AssertionError):
    """Internal invariant breach; signals a corrupted tableau or frame."""


class CoinRng:
    """Fair +-1 coins from a numpy Generator."""

    def __init__(self, rng):
        self.rng = rng
        self.consumed = 0

    def draw(self) -> int:
        self.consumed += 1
        return 1 if self.rng.integers(0, 2) else -1


class CoinTape:
    """Replay of a fixed coin sequence, +1 past the end (for enumeration)."""

    def __init__(self, seq=()):
        self.seq = tuple(seq)
        self.consumed = 0

    def draw(self) -> int:
        v = self.seq[self.consumed] if self.consumed < len(self.seq) else 1
        self.consumed += 1
        return v


@dataclass
class Member:
    """A retained FinalList entry on the n+t qubit register."""

    x: int
    z: int
    phase: int
    kind: str
    outcome: int | None
    source: int = -1  # monitor index, ancilla index, or output qubit

    def pauli(self, nq: int) -> PauliOperator:
        return PauliOperator(nq, self.x, self.z, self.phase)

    def sign(self, nq: int) -> int:
        return self.pauli(nq).sign()


@dataclass
class GadgetizedCircuit:
    """Event rewrite of a circuit: dummies, gadgets, pending Cliffords."""

    n: int
    t: int
    events: list  # ("dummy", q) ("gate", gate, qubits) ("gm", c, a)
    #               ("sdg_if_plus", c, a) ("monitor", q, mindex) ("output", q)
    monitor_outcomes: list
    output_qubits: tuple

    @property
    def nq(self) -> int:
        return self.n + self.t


def gadgetize(circuit: Circuit) -> GadgetizedCircuit:
    """Replace T gates by gadgets, prepend dummies, append outputs."""
    t = circuit.t_count
    events = [(DUMMY, q) for q in range(circuit.n)]
    ancilla = circuit.n
    for e in circuit.events:
        if e.kind == "gate":
            events.append(("gate", e.gate, e.qubits))
        elif e.kind == "t":
            c = e.qubits[0]
            events.append(("gm", c, ancilla))
            events.append(("gate", U_GADGET, (c, ancilla)))
            events.append(("sdg_if_plus", c, ancilla))
            ancilla += 1
        elif e.kind == "monitor":
            events.append((MONITOR, e.qubits[0], e.mindex))
        elif e.kind == "output":
            events.append((OUTPUT, e.qubits[0]))
    return GadgetizedCircuit(
        circuit.n, t, events, list(circuit.monitor_outcomes), circuit.output_qubits
    )


class _Frame:
    """Images of the letters X_q, Z_q under the accumulated conjugation."""

    __slots__ = ("nq", "fx", "fz", "fp")

    def __init__(self, nq: int):
        self.nq = nq
        self.fx = [0] * (2 * nq)
        self.fz = [0] * (2 * nq)
        self.fp = [0] * (2 * nq)
        for q in range(nq):
            self.fx[2 * q] = 1 << q
            self.fz[2 * q + 1] = 1 << q

    def push_gate(self, gate: CliffordGate, qubits):
        """Compose conjugation by the gate on the input side."""
        fx, fz, fp = self.fx, self.fz, self.fp
        k = gate.arity
        new = []
        for i in range(2 * k):
            lx, lz, lp = gate.inv[i]
            ax = az = 0
            ap = lp
            for lq in range(k):
                r = 2 * qubits[lq]
                if (lx >> lq) & 1:
                    ap += fp[r] + 2 * (az & fx[r]).bit_count()
                    ax ^= fx[r]
                    az ^= fz[r]
                if (lz >> lq) & 1:
                    ap += fp[r + 1] + 2 * (az & fx[r + 1]).bit_count()
                    ax ^= fx[r + 1]
                    az ^= fz[r + 1]
            new.append((ax, az, ap & 3))
        for i in range(2 * k):
            r = 2 * qubits[i // 2] + (i & 1)
            fx[r], fz[r], fp[r] = new[i]

    def push_v(self, nx, nz, np_, sigma, mx, mz, mp, lam):
        """Compose conjugation by V = (sigma N + lambda M)/sqrt2 on the output side.

        A row anti-commuting with exactly one of N, M picks up
        sigma*lambda*(-1)^[anti with N] and is multiplied by N M; a row
        anti-commuting with both flips sign.
        """
        wx = nx ^ mx
        wz = nz ^ mz
        wp = (np_ + mp + 2 * (nz & mx).bit_count()) & 3
        base = 0 if sigma == lam else 2
        fx, fz, fp = self.fx, self.fz, self.fp
        for i in range(len(fx)):
            vx = fx[i]
            vz = fz[i]
            s1 = ((vx & nz).bit_count() + (vz & nx).bit_count()) & 1
            s2 = ((vx & mz).bit_count() + (vz & mx).bit_count()) & 1
            if s1 ^ s2:
                fp[i] = (
                    fp[i] + wp + base + 2 * s1 + 2 * (vz & wx).bit_count()
                ) & 3
                fx[i] = vx ^ wx
                fz[i] = vz ^ wz
            elif s1:
                fp[i] = (fp[i] + 2) & 3

    def push_sdg(self, c: int):
        self.push_gate(SDG, (c,))

    def z_image(self, q: int):
        r = 2 * q + 1
        return self.fx[r], self.fz[r], self.fp[r]


@dataclass
class PbcResult:
    """FinalList plus everything needed to evaluate or analyze the PBC."""

    n: int
    t: int
    members: list  # retained Members in processing order (dummies excluded)
    monitor_outcomes: list
    output_bits: dict  # output qubit -> +-1 (resolved under this coin branch)
    output_mode: dict  # output qubit -> "coin" | "deterministic" | "member"
    n_v_events: int = 0
    coins_consumed: int = 0
    preselect: bool = False

    @property
    def nq(self) -> int:
        return self.n + self.t

    def final_list(self) -> list:
        return self.members


def reduce_measurements(
    gadgetized: GadgetizedCircuit,
    coins,
    preselect: bool = False,
    validate: bool = False,
    minimize_v: bool = True,
) -> PbcResult:
    """Run the measurement-reduction loop; see the module docstring.

    Monitor outcomes present in the record are honored (a deterministic
    contradiction raises InconsistentRecordError); missing ones are filled
    with the coin stream or the computed deterministic value.

    minimize_v exploits a freedom in the V replacement: any already
    performed measurement with a known outcome works as the partner N, and
    V = (sigma N + lambda M)/sqrt2 maps the pre-measurement state to the
    lambda branch for every choice.  Reducing N M modulo the commutant of
    M in the measured group before composing V keeps the conjugation from
    spreading support that the group could cancel anyway.
    """
    n, t, nq = gadgetized.n, gadgetized.t, gadgetized.nq
    frame = _Frame(nq)
    members: list[Member] = []
    monitor_out = list(gadgetized.monitor_outcomes)
    output_bits: dict[int, int] = {}
    output_mode: dict[int, str] = {}
    n_v = 0

    # echelon basis over dummies + retained members; an entry is the product
    # of actual performed measurements with its combined known outcome
    comp_mask = (1 << n) - 1
    basis: dict[int, tuple[int, int, int, int, int]] = {}
    for q in range(n):
        basis[nq + q] = (0, 1 << q, 0, 1, 0)  # (x, z, phase, outcome, memid=-)

    def first_anticommuting(mx, mz):
        dummy_hits = mx & comp_mask
        if dummy_hits:
            k = (dummy_hits & -dummy_hits).bit_length() - 1
            return (0, 1 << k, 0, 1)  # dummy Z_k, outcome +1
        for mem in members:
            if ((mx & mem.z).bit_count() + (mz & mem.x).bit_count()) & 1:
                if mem.outcome is None:
                    raise CompilerInvariantError(
                        "anti-commutation with an unresolved measurement"
                    )
                return (mem.x, mem.z, mem.phase, mem.outcome)
        return None

    def reduce_vec(mx, mz, mp):
        """Reduce against the basis; returns (residual x, z, phase, sign)."""
        sign = 1
        v = mx | (mz << nq)
        while v:
            b = v.bit_length() - 1
            entry = basis.get(b)
            if entry is None:
                break
            ex, ez, ep, eo, _ = entry
            mp = mp + ep + 2 * (mz & ex).bit_count()
            mx ^= ex
            mz ^= ez
            sign *= eo
            v = mx | (mz << nq)
        return mx, mz, mp & 3, sign

    def minimized_partner(hit, mx, mz):
        """Shrink supp(N M) by absorbing group elements commuting with M."""
        nx, nz, nph, sigma = hit
        wx, wz = nx ^ mx, nz ^ mz
        entries = [(0, 1 << q, 0, 1) for q in range(n)]
        entries.extend((m.x, m.z, m.phase, m.outcome) for m in members)
        changed = True
        while changed:
            changed = False
            wsup = wx | wz
            wt = wsup.bit_count()
            for ex, ez, ep, eo in entries:
                if eo is None or not ((ex | ez) & wsup):
                    continue
                if ((ex & mz).bit_count() + (ez & mx).bit_count()) & 1:
                    continue  # W must stay anti-commuting with M
                cx, cz = wx ^ ex, wz ^ ez
                if (cx | cz).bit_count() < wt:
                    nph = (nph + ep + 2 * (nz & ex).bit_count()) & 3
                    nx ^= ex
                    nz ^= ez
                    sigma *= eo
                    wx, wz = cx, cz
                    wsup = wx | wz
                    wt = wsup.bit_count()
                    changed = True
        return nx, nz, nph, sigma

    def process(mx, mz, mp, kind, recorded, source):
        nonlocal n_v
        hit = first_anticommuting(mx, mz)
        if hit is not None:
            if recorded is not None:
                lam = recorded
            elif preselect and kind == GADGET:
                lam = -1
            else:
                lam = coins.draw()
            if minimize_v:
                hit = minimized_partner(hit, mx, mz)
            frame.push_v(hit[0], hit[1], hit[2], hit[3], mx, mz, mp, lam)
            n_v += 1
            return lam, "coin"
        rx, rz, rp, sign = reduce_vec(mx, mz, mp)
        if rx == 0 and rz == 0:
            if rp & 1:
                raise CompilerInvariantError("non-Hermitian residual")
            out = sign * (1 if rp == 0 else -1)
            if recorded is not None and recorded != out:
                raise InconsistentRecordError(
                    f"{kind} outcome {recorded} contradicts deterministic {out}"
                )
            return out, "deterministic"
        if recorded is not None:
            out = recorded
        elif preselect and kind == GADGET:
            out = -1
        else:
            out = coins.draw()
        mem = Member(mx, mz, mp, kind, out, source)
        members.append(mem)
        memid = len(members) - 1
        if validate:
            if mx & comp_mask:
                raise CompilerInvariantError("member anti-commutes with a dummy")
            _validate_append(members, nq, memid)
        pivot = (rx | (rz << nq)).bit_length() - 1
        basis[pivot] = (rx, rz, rp, sign * out, memid)
        return out, "member"

    gadget_outcome: dict[int, int] = {}
    for ev in gadgetized.events:
        tag = ev[0]
        if tag == "gate":
            frame.push_gate(ev[1], ev[2])
        elif tag == DUMMY:
            pass  # pre-seeded in the basis
        elif tag == "gm":
            c, a = ev[1], ev[2]
            zx, zz, zp = frame.z_image(c)
            ax, az, ap = frame.z_image(a)
            mp = (zp + ap + 2 * (zz & ax).bit_count()) & 3
            out, _ = process(zx ^ ax, zz ^ az, mp, GADGET, None, a)
            gadget_outcome[a] = out
        elif tag == "sdg_if_plus":
            if gadget_outcome[ev[2]] == 1 and not preselect:
                frame.push_sdg(ev[1])
        elif tag == MONITOR:
            q, mindex = ev[1], ev[2]
            mx, mz, mp = frame.z_image(q)
            res, _ = process(mx, mz, mp, MONITOR, monitor_out[mindex], mindex)
            monitor_out[mindex] = res
        elif tag == OUTPUT:
            q = ev[1]
            mx, mz, mp = frame.z_image(q)
            res, mode = process(mx, mz, mp, OUTPUT, None, q)
            output_bits[q] = res
            output_mode[q] = mode
        else:
            raise ValueError(f"unknown gadgetized event {tag!r}")
    return PbcResult(
        n,
        t,
        members,
        monitor_out,
        output_bits,
        output_mode,
        n_v,
        getattr(coins, "consumed", 0),
        preselect,
    )


def _validate_append(members, nq, memid):
    """Debug check: commutation with dummies and all earlier members.

    GF(2) independence needs no extra work here: a member is only appended
    when its echelon residual against dummies and earlier members is
    nonzero.
    """
    new = members[memid]
    for mem in members[:memid]:
        if ((new.x & mem.z).bit_count() + (new.z & mem.x).bit_count()) & 1:
            raise CompilerInvariantError("FinalList members must commute")


def compile_circuit(
    circuit: Circuit,
    coins,
    preselect: bool = False,
    validate: bool = False,
    minimize_v: bool = True,
) -> PbcResult:
    """Full pipeline: gadgetize then reduce."""
    return reduce_measurements(gadgetize(circuit), coins, preselect, validate, minimize_v)


# -- commute_cliffords: materialized pulled-back operators -------------------


@dataclass
class CommutedMeasurements:
    """Time-zero forms of all measurements, conditional S^dag unresolved.

    Each entry is (kind, x, z, phase, aux) where aux is the monitor index,
    the gadget ancilla, or the output qubit.  Entries reflect conjugation by
    the unconditional circuit Cliffords (including gadget Us) only; the
    adaptive corrections are applied during reduction.
    """

    n: int
    t: int
    entries: list
    monitor_outcomes: list
    output_qubits: tuple


def commute_cliffords(gadgetized: GadgetizedCircuit) -> CommutedMeasurements:
    nq = gadgetized.nq
    frame = _Frame(nq)
    entries = []
    for ev in gadgetized.events:
        tag = ev[0]
        if tag == "gate":
            frame.push_gate(ev[1], ev[2])
        elif tag == DUMMY:
            entries.append((DUMMY, 0, 1 << ev[1], 0, ev[1]))
        elif tag == "gm":
            c, a = ev[1], ev[2]
            zx, zz, zp = frame.z_image(c)
            ax, az, ap = frame.z_image(a)
            mp = (zp + ap + 2 * (zz & ax).bit_count()) & 3
            entries.append((GADGET, zx ^ ax, zz ^ az, mp, a))
        elif tag == "sdg_if_plus":
            pass
        elif tag == MONITOR:
            mx, mz, mp = frame.z_image(ev[1])
            entries.append((MONITOR, mx, mz, mp, ev[2]))
        elif tag == OUTPUT:
            mx, mz, mp = frame.z_image(ev[1])
            entries.append((OUTPUT, mx, mz, mp, ev[1]))
    return CommutedMeasurements(
        gadgetized.n,
        gadgetized.t,
        entries,
        list(gadgetized.monitor_outcomes),
        gadgetized.output_qubits,
    )


# -- restriction to the magic state register ---------------------------------


def restrict_to_msr(result: PbcResult) -> list[Member]:
    """Drop the computational-register Z part of every retained member.

    Members commute with the dummy group, so their computational part lies
    in +-<Z_1..Z_n> and evaluates to +1 on |0..0>; what remains acts on the
    t MSR qubits only.  A member with trivial MSR part would have been
    deleted as deterministic, but is handled defensively.
    """
    n, t = result.n, result.t
    comp_mask = (1 << n) - 1
    tmask = (1 << t) - 1
    out = []
    for mem in result.members:
        if mem.x & comp_mask:
            raise CompilerInvariantError(
                "restricted member acts with X on the computational register"
            )
        rx = (mem.x >> n) & tmask
        rz = (mem.z >> n) & tmask
        if rx == 0 and rz == 0:
            continue  # fully classical; outcome already known
        out.append(Member(rx, rz, mem.phase, mem.kind, mem.outcome, mem.source))
    return out


def dump_final_list(result: PbcResult) -> str:
    """Text form of the restricted FinalList: sign, Pauli, kind, outcome."""
    lines = []
    for mem in restrict_to_msr(result):
        p = PauliOperator(result.t, mem.x, mem.z, mem.phase)
        sign = "+" if p.sign() > 0 else "-"
        body = p.label().lstrip("+-i")
        out = "?" if mem.outcome is None else f"{mem.outcome:+d}"
        lines.append(f"{sign}{body} {mem.kind} {out}")
    return "\n".join(lines) + ("\n" if lines else "")
