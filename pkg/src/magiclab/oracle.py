"""Dense state-vector reference for small instances.

Qubit 0 is the least significant index bit.  Clifford gates are mapped to
matrices by enumerating the 1- and 2-qubit Clifford groups once (BFS over a
generating set, phase-normalized) and keying them by their Pauli-image
signature, so any CliffordGate built from images resolves to its unitary.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .clifford import CliffordGate
from .pauli import PauliOperator

ATOL = 1e-9
NORM_ATOL = 1e-12

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_Y = 1j * _X @ _Z
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1.0, 1j])

MAGIC_STATE = np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)


def _kron_lsb(mats):
    """Tensor product with mats[0] acting on the least significant qubit."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(m, out)
    return out


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    mats = []
    for j in range(p.n):
        xb, zb = (p.x >> j) & 1, (p.z >> j) & 1
        word = np.eye(2, dtype=complex)
        if xb:
            word = word @ _X
        if zb:
            word = word @ _Z
        mats.append(word)
    return (1j ** p.phase) * _kron_lsb(mats)


def _canonical(mat: np.ndarray) -> bytes:
    flat = mat.ravel()
    k = int(np.flatnonzero(np.abs(flat) > 1e-6)[0])
    u = flat[k]
    arr = np.round(mat * (np.conj(u) / abs(u)), 9) + 0.0
    return arr.tobytes()


_sig_tables: dict = {}


def _sig_table(k: int):
    tab = _sig_tables.get(k)
    if tab is None:
        letters = []
        for q in range(k):
            letters.append(pauli_matrix(PauliOperator.single(k, q, "X")))
            letters.append(pauli_matrix(PauliOperator.single(k, q, "Z")))
        words = {}
        for x in range(1 << k):
            for z in range(1 << k):
                words[(x, z)] = pauli_matrix(PauliOperator(k, x, z, ((x & z).bit_count()) & 3))
        tab = (letters, words)
        _sig_tables[k] = tab
    return tab


def _image_signature(mat: np.ndarray, k: int):
    """Pauli images of the letters under conjugation by mat."""
    letters, words = _sig_table(k)
    dim = 2 ** k
    sig = []
    for lmat in letters:
        v = mat @ lmat @ mat.conj().T
        for (x, z), w in words.items():
            tr = np.trace(w.conj().T @ v) / dim
            if abs(tr) > 0.5:
                val = complex(tr)
                ph = int(np.round(np.angle(val) / (np.pi / 2))) & 3
                sig.append((x, z, (ph + (x & z).bit_count()) & 3))
                break
        else:
            raise AssertionError("conjugated letter is not a Pauli")
    return tuple(sig)


_matrix_registry: dict = {}


def _build_registry():
    if _matrix_registry:
        return
    # 1-qubit group from {H, S}
    seen = {}
    frontier = [np.eye(2, dtype=complex)]
    seen[_canonical(frontier[0])] = frontier[0]
    gens1 = [_H, _S]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens1:
                cand = g @ m
                key = _canonical(cand)
                if key not in seen:
                    seen[key] = cand
                    nxt.append(cand)
        frontier = nxt
    assert len(seen) == 24
    for m in seen.values():
        _matrix_registry[_image_signature(m, 1)] = m
    # 2-qubit group from local generators and CX
    cx = np.zeros((4, 4), dtype=complex)
    for c in (0, 1):
        for t in (0, 1):
            cx[((t ^ c) << 1) | c, (t << 1) | c] = 1.0
    gens2 = [_kron_lsb([_H, _I]), _kron_lsb([_I, _H]), _kron_lsb([_S, _I]), _kron_lsb([_I, _S]), cx]
    seen2 = {}
    eye4 = np.eye(4, dtype=complex)
    seen2[_canonical(eye4)] = eye4
    frontier = [eye4]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens2:
                cand = g @ m
                key = _canonical(cand)
                if key not in seen2:
                    seen2[key] = cand
                    nxt.append(cand)
        frontier = nxt
    assert len(seen2) == 11520
    for m in seen2.values():
        _matrix_registry[_image_signature(m, 2)] = m


def gate_matrix(gate: CliffordGate) -> np.ndarray:
    """Unitary of a CliffordGate (up to global phase), via its images."""
    _build_registry()
    try:
        return _matrix_registry[gate.img]
    except KeyError:
        raise KeyError(f"no matrix for gate {gate.token()}") from None


class DenseState:
    """Normalized dense state on m qubits (m <= 14)."""

    def __init__(self, n: int, vec: np.ndarray | None = None):
        if n > 14:
            raise ValueError("dense oracle is limited to 14 qubits")
        self.n = n
        if vec is None:
            vec = np.zeros(2 ** n, dtype=complex)
            vec[0] = 1.0
        self.vec = np.asarray(vec, dtype=complex).reshape(2 ** n)

    @classmethod
    def computational(cls, n: int) -> "DenseState":
        return cls(n)

    @classmethod
    def magic_register(cls, t: int) -> "DenseState":
        vec = np.array([1.0 + 0j])
        for _ in range(t):
            vec = np.kron(MAGIC_STATE, vec)
        return cls(t, vec if t else np.array([1.0 + 0j]))

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.vec.copy())

    def norm_check(self):
        if abs(np.vdot(self.vec, self.vec).real - 1.0) > NORM_ATOL * 100:
            raise AssertionError("state norm drifted")

    def apply_matrix(self, mat: np.ndarray, qubits):
        k = len(qubits)
        axes = [self.n - 1 - q for q in qubits]  # numpy axis of each qubit
        tensor = self.vec.reshape([2] * self.n)
        tensor = np.moveaxis(tensor, axes, range(k))
        shape = tensor.shape
        # gate matrix is indexed with qubits[0] as the fast bit
        mat_t = mat.reshape([2] * (2 * k))
        perm = [k - 1 - i for i in range(k)] + [2 * k - 1 - i for i in range(k)]
        mat_nd = np.transpose(mat_t, perm).reshape(2 ** k, 2 ** k)
        tensor = (mat_nd @ tensor.reshape(2 ** k, -1)).reshape(shape)
        tensor = np.moveaxis(tensor, range(k), axes)
        self.vec = tensor.reshape(2 ** self.n)

    def apply_gate(self, gate: CliffordGate, qubits):
        self.apply_matrix(gate_matrix(gate), qubits)

    def apply_t(self, qubit: int):
        idx = np.arange(2 ** self.n)
        phase = np.where((idx >> qubit) & 1, np.exp(1j * np.pi / 4), 1.0)
        self.vec = self.vec * phase

    def apply_pauli(self, p: PauliOperator):
        idx = np.arange(2 ** self.n)
        src = idx ^ p.x
        signs = 1.0 - 2.0 * (np.bitwise_count(src & p.z) & 1)
        self.vec = (1j ** p.phase) * signs * self.vec[src]

    def expectation(self, p: PauliOperator) -> complex:
        idx = np.arange(2 ** self.n)
        src = idx ^ p.x
        signs = 1.0 - 2.0 * (np.bitwise_count(src & p.z) & 1)
        return complex((1j ** p.phase) * np.vdot(self.vec, signs * self.vec[src]))

    def project_pauli(self, p: PauliOperator, outcome: int) -> float:
        """Apply (1 + outcome*P)/2, renormalize; returns the branch weight."""
        work = self.copy()
        work.apply_pauli(p)
        new = 0.5 * (self.vec + outcome * work.vec)
        prob = float(np.vdot(new, new).real)
        if prob < 1e-14:
            return 0.0
        self.vec = new / np.sqrt(prob)
        return prob


def run_circuit(circuit: Circuit, monitor_outcomes=None, rng=None):
    """Execute a circuit exactly up to (not including) the output layer.

    Monitors with a recorded outcome are projected onto it (postselection);
    unrecorded monitors are Born-sampled with rng.  Returns
    (state, record_probability, outcomes).
    """
    state = DenseState(circuit.n)
    if monitor_outcomes is None:
        monitor_outcomes = list(circuit.monitor_outcomes)
    else:
        monitor_outcomes = list(monitor_outcomes)
    prob = 1.0
    for e in circuit.events:
        if e.kind == "gate":
            state.apply_gate(e.gate, e.qubits)
        elif e.kind == "t":
            state.apply_t(e.qubits[0])
        elif e.kind == "monitor":
            pz = PauliOperator.single(circuit.n, e.qubits[0], "Z")
            out = monitor_outcomes[e.mindex]
            if out is None:
                p_plus = 0.5 * (1.0 + state.expectation(pz).real)
                out = 1 if rng.random() < p_plus else -1
                monitor_outcomes[e.mindex] = out
            w = state.project_pauli(pz, out)
            if w == 0.0:
                raise ValueError("zero-probability monitor record")
            prob *= w
        elif e.kind == "output":
            pass
    state.norm_check()
    return state, prob, monitor_outcomes


def output_distribution(state: DenseState, qubits=None) -> np.ndarray:
    """Probability vector over the listed qubits (all by default)."""
    probs = np.abs(state.vec) ** 2
    if qubits is None or tuple(qubits) == tuple(range(state.n)):
        return probs
    qubits = list(qubits)
    idx = np.arange(2 ** state.n)
    key = np.zeros_like(idx)
    for pos, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << pos
    out = np.zeros(2 ** len(qubits))
    np.add.at(out, key, probs)
    return out


def _wht_inplace(a: np.ndarray):
    h = 1
    m = a.shape[0]
    while h < m:
        for start in range(0, m, 2 * h):
            x = a[start:start + h].copy()
            y = a[start + h:start + 2 * h].copy()
            a[start:start + h] = x + y
            a[start + h:start + 2 * h] = x - y
        h *= 2


def is_stabilizer(state: DenseState, atol: float = ATOL) -> bool:
    """True iff exactly 2^m Pauli expectations have unit modulus.

    The scan over all 4^m Paulis is organized as one Walsh-Hadamard
    transform per X-mask, so it stays cheap up to m = 10.
    """
    m = state.n
    if m > 10:
        raise ValueError("stabilizer scan limited to 10 qubits")
    count = 0
    dim = 2 ** m
    for x in range(dim):
        g = state.vec * np.conj(state.vec[np.arange(dim) ^ x])
        _wht_inplace(g)
        count += int(np.sum(np.abs(np.abs(g) - 1.0) < atol))
    return count == dim


def schmidt_rank_2q(mat: np.ndarray, atol: float = ATOL) -> int:
    """Operator-Schmidt rank of a 2-qubit unitary; 1, 2 or 4 for Cliffords."""
    u = np.asarray(mat, dtype=complex)
    if u.shape != (4, 4) or not np.allclose(u @ u.conj().T, np.eye(4), atol=1e-9):
        raise ValueError("input must be a 4x4 unitary")
    # reshuffle: R[(i0,j0),(i1,j1)] = U[(i1,i0),(j1,j0)] with qubit0 fast
    t = u.reshape(2, 2, 2, 2)  # [i1, i0, j1, j0]
    r = np.transpose(t, (1, 3, 0, 2)).reshape(4, 4)
    svals = np.linalg.svd(r, compute_uv=False)
    return int(np.sum(svals > atol))
