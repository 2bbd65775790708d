"""Monitored Clifford+T brickwork circuits.

A circuit is an ordered event list over n qubits and D gate layers.  Layer l
(1-based) carries 2-qubit gates on pairs (off, off+1), (off+2, off+3), ...
with off = (l-1) % 2 and open boundaries; the slot following layer l holds
per-qubit T and monitor events, with a monitor always ordered directly after
a T on the same qubit.  The final time step measures every output qubit in
the Z basis.

Monitor outcomes are stored per monitor index; generation leaves them
unassigned (None) and the compiler or an explicit record fills them in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clifford import CliffordGate, sample_c2, gate_from_token


@dataclass(frozen=True)
class ModelParams:
    n: int
    depth: int
    p: float
    q: float
    alpha: float = 0.0
    model: str = "uncorrelated"  # or "t_correlated"

    def __post_init__(self):
        if self.n < 1 or self.depth < 1:
            raise ValueError("n and depth must be positive")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError("p and q must lie in [0, 1]")
        if self.model not in ("uncorrelated", "t_correlated"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "t_correlated":
            if self.alpha < 0:
                raise ValueError("alpha must be non-negative")
            pp, pm = self.p_plus, self.p_minus
            if not (0.0 <= pm <= 1.0 and 0.0 <= pp <= 1.0):
                raise ValueError(
                    f"alpha={self.alpha} out of range: p+={pp:.4f}, p-={pm:.4f}"
                )
        elif self.alpha != 0.0:
            raise ValueError("alpha is only meaningful for t_correlated")

    @property
    def p_minus(self) -> float:
        return self.p - self.alpha * self.q

    @property
    def p_plus(self) -> float:
        return self.p_minus + self.alpha


def alpha_max(p: float, q: float) -> float:
    """Largest admissible T-monitor correlation for given rates."""
    if q >= 1.0:
        return p / q if q > 0 else 0.0
    bound = (1.0 - p) / (1.0 - q)
    return min(bound, p / q) if q > 0 else bound


@dataclass(frozen=True)
class Event:
    kind: str  # "gate", "t", "monitor", "output"
    layer: int
    qubits: tuple[int, ...]
    gate: CliffordGate | None = None
    mindex: int | None = None  # monitor slot in the outcome record


@dataclass
class Circuit:
    n: int
    depth: int
    events: list[Event] = field(default_factory=list)
    monitor_outcomes: list[int | None] = field(default_factory=list)
    output_qubits: tuple[int, ...] = ()

    @property
    def n_monitors(self) -> int:
        return len(self.monitor_outcomes)

    @property
    def t_count(self) -> int:
        return sum(1 for e in self.events if e.kind == "t")

    def monitor_rate_events(self) -> list[Event]:
        return [e for e in self.events if e.kind == "monitor"]

    def copy_with_outcomes(self, outcomes) -> "Circuit":
        if len(outcomes) != self.n_monitors:
            raise ValueError("outcome record length mismatch")
        return Circuit(self.n, self.depth, self.events, list(outcomes), self.output_qubits)

    # -- text form, one event per line (debug/golden interface) ------------

    def serialize(self) -> str:
        lines = [f"circuit {self.n} {self.depth}"]
        for e in self.events:
            if e.kind == "gate":
                qs = " ".join(str(q) for q in e.qubits)
                lines.append(f"gate {e.layer} {qs} {e.gate.token()}")
            elif e.kind == "t":
                lines.append(f"t {e.layer} {e.qubits[0]}")
            elif e.kind == "monitor":
                out = self.monitor_outcomes[e.mindex]
                lines.append(f"monitor {e.layer} {e.qubits[0]} {out if out is not None else '?'}")
            elif e.kind == "output":
                lines.append(f"output {e.qubits[0]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "Circuit":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "circuit":
            raise ValueError("not a circuit dump")
        circ = cls(int(head[1]), int(head[2]))
        outputs = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "gate":
                layer = int(parts[1])
                qs = tuple(int(v) for v in parts[2:-1])
                circ.events.append(Event("gate", layer, qs, gate_from_token(parts[-1])))
            elif parts[0] == "t":
                circ.events.append(Event("t", int(parts[1]), (int(parts[2]),)))
            elif parts[0] == "monitor":
                idx = len(circ.monitor_outcomes)
                circ.events.append(Event("monitor", int(parts[1]), (int(parts[2]),), mindex=idx))
                circ.monitor_outcomes.append(None if parts[3] == "?" else int(parts[3]))
            elif parts[0] == "output":
                q = int(parts[1])
                circ.events.append(Event("output", circ.depth + 1, (q,)))
                outputs.append(q)
        circ.output_qubits = tuple(outputs)
        return circ


def generate(params: ModelParams, rng) -> Circuit:
    """Draw one circuit realization.

    Uncorrelated model: per qubit per slot, T with probability q and monitor
    with probability p, independently.  T-correlated model: monitor with
    probability p_plus right after a T on the same qubit, p_minus otherwise,
    keeping the total monitor rate at p.
    """
    n, depth = params.n, params.depth
    circ = Circuit(n, depth)
    correlated = params.model == "t_correlated"
    for layer in range(1, depth + 1):
        off = (layer - 1) % 2
        for a in range(off, n - 1, 2):
            circ.events.append(Event("gate", layer, (a, a + 1), sample_c2(rng)))
        for q in range(n):
            has_t = rng.random() < params.q
            if correlated:
                p_mon = params.p_plus if has_t else params.p_minus
            else:
                p_mon = params.p
            has_mon = rng.random() < p_mon
            if has_t:
                circ.events.append(Event("t", layer, (q,)))
            if has_mon:
                idx = len(circ.monitor_outcomes)
                circ.events.append(Event("monitor", layer, (q,), mindex=idx))
                circ.monitor_outcomes.append(None)
    circ.output_qubits = tuple(range(n))
    for q in range(n):
        circ.events.append(Event("output", depth + 1, (q,)))
    return circ


def expected_t_count(params: ModelParams) -> float:
    """Mean number of T gates: one slot per qubit per layer at rate q."""
    return params.q * params.depth * params.n
