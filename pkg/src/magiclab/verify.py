"""Dense cross-checks of the PBC pipeline on oracle-sized instances.

The central check reconstructs a circuit's output distribution from its
compiled form: enumerate every coin branch of the compiler exactly, weight
each branch by 2^-(#V replacements) times the joint probability of the
retained measurement outcomes on the magic register, and accumulate the
resolved output bits.  The result must match the dense simulation of the
original circuit postselected on the same monitor record.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, ModelParams, generate
from .oracle import DenseState, is_stabilizer, output_distribution, run_circuit
from .pauli import PauliOperator
from .pbc import (
    GADGET,
    MONITOR,
    OUTPUT,
    CoinTape,
    InconsistentRecordError,
    PbcResult,
    compile_circuit,
    restrict_to_msr,
)


class TooManyCoins(RuntimeError):
    pass


def enumerate_branches(circuit: Circuit, preselect: bool = False, max_coins: int = 12):
    """All coin branches of the compiler for a fixed circuit and record.

    Yields (tape, PbcResult-or-None); None marks a branch killed by an
    inconsistent record (weight zero).  Branching follows the coins a run
    actually consumes, so adaptive S^dag paths with different coin counts
    are handled exactly.
    """
    stack = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) > max_coins:
            raise TooManyCoins(f"more than {max_coins} coins")
        tape = CoinTape(prefix)
        try:
            res = compile_circuit(circuit, tape, preselect=preselect)
        except InconsistentRecordError:
            if tape.consumed > len(prefix):
                stack.append(prefix + (1,))
                stack.append(prefix + (-1,))
            else:
                yield prefix, None
            continue
        if tape.consumed > len(prefix):
            stack.append(prefix + (1,))
            stack.append(prefix + (-1,))
        else:
            yield prefix, res


@dataclass
class BranchEvaluation:
    weight: float
    bits: tuple
    msr_state_pre_output: DenseState | None


def evaluate_branch(result: PbcResult, circuit: Circuit) -> BranchEvaluation | None:
    """Weight and resolved output bits of one compiled branch.

    Returns None for a zero-weight branch.  Retained gadget measurements
    are asserted to be unbiased, which the construction guarantees.
    """
    t = result.t
    members = restrict_to_msr(result)
    state = DenseState.magic_register(t) if t else DenseState(0, np.array([1.0 + 0j]))
    weight = 0.5 ** result.n_v_events
    pre_output = None
    for mem in members:
        if mem.kind == OUTPUT and pre_output is None:
            pre_output = state.copy()
        p = PauliOperator(t, mem.x, mem.z, mem.phase)
        w = state.project_pauli(p, mem.outcome)
        if mem.kind == GADGET and abs(w - 0.5) > 1e-9:
            raise AssertionError("retained gadget measurement is biased")
        if w == 0.0:
            return None
        weight *= w
    if pre_output is None:
        pre_output = state.copy()
    bits = tuple(result.output_bits[q] for q in circuit.output_qubits)
    return BranchEvaluation(weight, bits, pre_output)


def pbc_output_distribution(circuit: Circuit, preselect: bool = False, max_coins: int = 12):
    """(distribution over output bitstrings, total branch weight).

    The circuit's monitor record must be fully assigned and consistent;
    the distribution is conditioned on it.
    """
    dist: dict[tuple, float] = {}
    total = 0.0
    for _, res in enumerate_branches(circuit, preselect, max_coins):
        if res is None:
            continue
        ev = evaluate_branch(res, circuit)
        if ev is None:
            continue
        dist[ev.bits] = dist.get(ev.bits, 0.0) + ev.weight
        total += ev.weight
    if total <= 0.0:
        raise ValueError("record has zero probability in every branch")
    vec = np.zeros(2 ** len(circuit.output_qubits))
    for bits, w in dist.items():
        idx = 0
        for pos, b in enumerate(bits):
            if b == -1:
                idx |= 1 << pos
        vec[idx] = w / total
    return vec, total


def direct_output_distribution(circuit: Circuit):
    """Dense reference: postselect the record, measure the outputs."""
    state, prob, _ = run_circuit(circuit)
    return output_distribution(state, circuit.output_qubits), prob, state


def distribution_check(circuit: Circuit, preselect: bool = False, max_coins: int = 12):
    """Total variation distance between PBC and direct distributions."""
    direct, _, _ = direct_output_distribution(circuit)
    pbc, _ = pbc_output_distribution(circuit, preselect, max_coins)
    return 0.5 * float(np.sum(np.abs(direct - pbc)))


def theorem1_check(circuit: Circuit, max_coins: int = 12) -> bool:
    """Stabilizerness of the circuit output vs of the PBC output.

    Returns True when the dense verdict on the pre-output state agrees with
    the verdict on the projected magic register in every live branch.
    """
    state, _, _ = run_circuit(circuit)
    direct_stab = is_stabilizer(state)
    agree = True
    for _, res in enumerate_branches(circuit, False, max_coins):
        if res is None:
            continue
        ev = evaluate_branch(res, circuit)
        if ev is None:
            continue
        if res.t == 0:
            pbc_stab = True
        else:
            pbc_stab = is_stabilizer(ev.msr_state_pre_output)
        if pbc_stab != direct_stab:
            agree = False
    return agree


def sample_record(circuit: Circuit, rng) -> Circuit:
    """Born-sample a consistent monitor record; returns a recorded copy."""
    _, _, outcomes = run_circuit(circuit, rng=rng)
    return circuit.copy_with_outcomes(outcomes)


def random_instance(rng, n_max: int = 6, d_max: int = 6, q_choices=(0.0, 0.1, 0.3),
                    p_choices=(0.0, 0.2, 0.5), t_cap: int = 6):
    """A random small circuit with a sampled record and few enough coins."""
    while True:
        n = int(rng.integers(2, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        q = float(rng.choice(q_choices))
        p = float(rng.choice(p_choices))
        params = ModelParams(n, d, p, q)
        circ = generate(params, rng)
        if circ.t_count > t_cap:
            continue
        return sample_record(circ, rng)
