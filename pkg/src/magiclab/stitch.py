"""Reconnect a circuit cluster into a standalone simulable circuit.

A qubit line can leave the cluster at one monitor and re-enter at a later
one; the idle stretch in between evolves in some other cluster and is
irrelevant here.  Both boundary monitors are kept and the stretch is
replaced by a direct connection, with an X gate inserted when the recorded
exit and re-entry outcomes disagree (both are Z measurements, so a flip is
all that can separate them).  Unrecorded boundary outcomes are treated as
matching; the compiler then assigns the re-entry outcome consistently.
"""

from __future__ import annotations

from .circuit import Circuit, Event
from .clifford import X, is_separable, separable_factors
from .percolation import CircuitCluster, HoneycombLattice


def stitch(cluster: CircuitCluster, circuit: Circuit, lattice: HoneycombLattice) -> Circuit:
    member = [False] * len(lattice.node_coord)
    for i in cluster.nodes:
        member[i] = True

    def in_cluster(layer, qubit):
        i = lattice.node_id.get((layer, qubit))
        return i is not None and member[i]

    # split each qubit line into monitor-delimited pieces and mark the
    # in-cluster ones; a piece is in the cluster iff any of its touchpoints
    # (start marker, gate endpoint, output marker) is
    piece_in = {q: [in_cluster(0, q)] for q in range(circuit.n)}
    event_piece = {}
    for k, e in enumerate(circuit.events):
        if e.kind == "gate":
            for q in e.qubits:
                if in_cluster(e.layer, q):
                    piece_in[q][-1] = True
        elif e.kind == "t":
            q = e.qubits[0]
            event_piece[k] = len(piece_in[q]) - 1
        elif e.kind == "monitor":
            q = e.qubits[0]
            event_piece[k] = len(piece_in[q]) - 1  # piece to the left
            piece_in[q].append(False)
        elif e.kind == "output":
            q = e.qubits[0]
            if in_cluster(circuit.depth + 1, q):
                piece_in[q][-1] = True

    qubits = sorted(
        q for q in range(circuit.n) if any(piece_in[q])
    )
    relabel = {q: i for i, q in enumerate(qubits)}
    sub = Circuit(len(qubits), circuit.depth)
    outputs = []
    pending_exit = {}  # qubit -> outcome of the monitor that closed the line

    def record_monitor(e):
        idx = len(sub.monitor_outcomes)
        sub.monitor_outcomes.append(circuit.monitor_outcomes[e.mindex])
        sub.events.append(Event("monitor", e.layer, (relabel[e.qubits[0]],), mindex=idx))

    for k, e in enumerate(circuit.events):
        if e.kind == "gate":
            a, b = e.qubits
            in_a, in_b = in_cluster(e.layer, a), in_cluster(e.layer, b)
            if not (in_a or in_b):
                continue
            if is_separable(e.gate):
                ua, ub = separable_factors(e.gate)
                if in_a:
                    sub.events.append(Event("gate", e.layer, (relabel[a],), ua))
                if in_b:
                    sub.events.append(Event("gate", e.layer, (relabel[b],), ub))
            else:
                if not (in_a and in_b):
                    raise AssertionError("entangling gate straddles the cluster boundary")
                sub.events.append(Event("gate", e.layer, (relabel[a], relabel[b]), e.gate))
        elif e.kind == "t":
            q = e.qubits[0]
            if piece_in[q][event_piece[k]]:
                sub.events.append(Event("t", e.layer, (relabel[q],)))
        elif e.kind == "monitor":
            q = e.qubits[0]
            left = piece_in[q][event_piece[k]]
            right = piece_in[q][event_piece[k] + 1]
            if not (left or right):
                continue
            lam = circuit.monitor_outcomes[e.mindex]
            if right and not left:
                # re-entry: reconcile with the exit outcome (start state is
                # an implicit +1 when the line was never in the cluster)
                prev = pending_exit.pop(q, 1)
                if lam is not None and prev is not None and lam != prev:
                    sub.events.append(Event("gate", e.layer, (relabel[q],), X))
            record_monitor(e)
            if left and not right:
                pending_exit[q] = lam
        elif e.kind == "output":
            q = e.qubits[0]
            if in_cluster(circuit.depth + 1, q):
                sub.events.append(Event("output", e.layer, (relabel[q],)))
                outputs.append(relabel[q])
    sub.output_qubits = tuple(outputs)
    return sub
