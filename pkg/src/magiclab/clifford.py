"""1- and 2-qubit Clifford gates as signed Pauli images.

A gate C on k qubits is stored through the images C L C^dag of the local
letters L in (X_0, Z_0, X_1, Z_1), each a signed local Pauli, plus the images
of C^dag (used when commuting measurements backwards).  Uniform sampling over
the 2-qubit Clifford group modulo phase factors the group into the order-720
symplectic part, enumerated exhaustively once, and 16 independent sign bits:
720 * 16 = 11520 elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .pauli import phase_mul, sp_raw

# local Pauli letters, basis order: X_0, Z_0, X_1, Z_1
_LETTER_VECS = ((1, 0), (0, 1), (2, 0), (0, 2))  # (x, z) local masks


def _vec_to_xz(v: int) -> tuple[int, int]:
    """Unpack a 4-bit symplectic vector (x0,z0,x1,z1) into local x/z masks."""
    return (v & 1) | ((v >> 2) & 1) << 1, ((v >> 1) & 1) | ((v >> 3) & 1) << 1


def _sp4(u: int, v: int) -> int:
    ux, uz = _vec_to_xz(u)
    vx, vz = _vec_to_xz(v)
    return sp_raw(ux, uz, vx, vz)


@lru_cache(maxsize=1)
def symplectic_group_2q() -> tuple[tuple[int, int, int, int], ...]:
    """All 720 elements of Sp(4, F_2), each as image vectors of the letters."""
    elems = []
    vecs = range(1, 16)
    for v1 in vecs:
        for v2 in vecs:
            if _sp4(v1, v2) != 1:
                continue
            for v3 in vecs:
                if _sp4(v1, v3) or _sp4(v2, v3):
                    continue
                for v4 in vecs:
                    if _sp4(v3, v4) != 1 or _sp4(v1, v4) or _sp4(v2, v4):
                        continue
                    elems.append((v1, v2, v3, v4))
    assert len(elems) == 720
    return tuple(elems)


def _mul_word(acc, triple):
    return phase_mul(acc[0], acc[1], acc[2], triple[0], triple[1], triple[2])


def _conj_table(images: tuple[tuple[int, int, int], ...], k: int):
    """Map each local input pattern to (x, z, dphase) under conjugation.

    Pattern bit order: x0, z0, x1, z1; the conjugated word is the ordered
    product of letter images raised to the pattern bits.
    """
    table = []
    for pat in range(1 << (2 * k)):
        acc = (0, 0, 0)
        for i in range(2 * k):
            if (pat >> i) & 1:
                acc = _mul_word(acc, images[i])
        table.append(acc)
    return tuple(table)


@dataclass(frozen=True)
class CliffordGate:
    """Clifford on 1 or 2 local qubits, defined by its letter images."""

    arity: int
    img: tuple[tuple[int, int, int], ...]  # C L C^dag as (x, z, phase) triples
    inv: tuple[tuple[int, int, int], ...]  # C^dag L C
    table_fwd: tuple = field(repr=False, default=())
    table_inv: tuple = field(repr=False, default=())
    name: str = ""

    @classmethod
    def from_images(cls, images, name: str = "") -> "CliffordGate":
        k = len(images) // 2
        img = tuple((x, z, p & 3) for x, z, p in images)
        for x, z, p in img:
            if (p + (x & z).bit_count()) % 2:
                raise ValueError("gate image is not Hermitian")
        for i in range(2 * k):
            for j in range(i + 1, 2 * k):
                want = 1 if (j == i + 1 and i % 2 == 0) else 0
                have = sp_raw(img[i][0], img[i][1], img[j][0], img[j][1])
                if want != have:
                    raise ValueError("images violate symplectic relations")
        inv = _invert_images(img, k)
        gate = cls(k, img, inv, _conj_table(img, k), _conj_table(inv, k), name)
        return gate

    def conjugate_raw(self, x: int, z: int, phase: int, qubits, forward: bool):
        """Conjugate a raw word: forward gives C P C^dag, else C^dag P C."""
        pat = 0
        clear = 0
        for i, q in enumerate(qubits):
            pat |= ((x >> q) & 1) << (2 * i)
            pat |= ((z >> q) & 1) << (2 * i + 1)
            clear |= 1 << q
        lx, lz, dp = (self.table_fwd if forward else self.table_inv)[pat]
        x &= ~clear
        z &= ~clear
        for i, q in enumerate(qubits):
            x |= ((lx >> i) & 1) << q
            z |= ((lz >> i) & 1) << q
        return x, z, (phase + dp) & 3

    def token(self) -> str:
        """Stable text id for circuit serialization."""
        if self.name:
            return self.name
        return "g" + ",".join(f"{x:x}.{z:x}.{p}" for x, z, p in self.img)


def _invert_images(img, k):
    """Images of C^dag from those of C via the inverse symplectic map."""
    dim = 2 * k
    # rows of the symplectic matrix: image vector of each letter
    rows = []
    for x, z, _ in img:
        v = 0
        for i in range(k):
            v |= ((x >> i) & 1) << (2 * i)
            v |= ((z >> i) & 1) << (2 * i + 1)
        rows.append(v)
    inv_rows = _gf2_inverse(rows, dim)
    fwd_table = _conj_table(img, k)
    out = []
    for i in range(dim):
        x, z = _vec_to_xz(inv_rows[i]) if k == 2 else ((inv_rows[i] & 1), (inv_rows[i] >> 1) & 1)
        p = (x & z).bit_count() & 3  # positive-sign canonical word
        # fix the sign so that C (C^dag L C) C^dag == +L
        pat = 0
        for q in range(k):
            pat |= ((x >> q) & 1) << (2 * q)
            pat |= ((z >> q) & 1) << (2 * q + 1)
        fx, fz, fp = fwd_table[pat]
        lx, lz = _LETTER_VECS[i]
        if (fx, fz) != (lx, lz):
            raise AssertionError("inverse image reconstruction failed")
        want = (lx & lz).bit_count() & 3
        if (fp + p - want) & 3:
            p = (p + 2) & 3
        out.append((x, z, p))
    return tuple(out)


def _gf2_inverse(rows, dim):
    """Invert a dim x dim GF(2) matrix given as row bitmasks."""
    aug = [rows[i] | (1 << (dim + i)) for i in range(dim)]
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, dim) if (aug[i] >> c) & 1), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(dim):
            if i != r and (aug[i] >> c) & 1:
                aug[i] ^= aug[r]
        r += 1
    # left half is now the identity, right half holds the inverse row-aligned
    return [aug[i] >> dim for i in range(dim)]


_c2_cache: dict[tuple[int, int], CliffordGate] = {}


def c2_element(sym_index: int, signs: int) -> CliffordGate:
    """The 2-qubit Clifford with given symplectic part and sign pattern."""
    key = (sym_index, signs)
    gate = _c2_cache.get(key)
    if gate is None:
        vecs = symplectic_group_2q()[sym_index]
        images = []
        for i, v in enumerate(vecs):
            x, z = _vec_to_xz(v)
            p = ((x & z).bit_count() + 2 * ((signs >> i) & 1)) & 3
            images.append((x, z, p))
        gate = CliffordGate.from_images(images, name=f"c2:{sym_index}:{signs}")
        _c2_cache[key] = gate
    return gate


def sample_c2(rng) -> CliffordGate:
    """Uniform draw from the 11520-element 2-qubit Clifford group mod phase."""
    sym_index = int(rng.integers(0, 720))
    signs = int(rng.integers(0, 16))
    return c2_element(sym_index, signs)


def all_c2() -> list[CliffordGate]:
    """Exhaustive enumeration of C_2 mod phase (11520 gates)."""
    return [c2_element(s, b) for s in range(720) for b in range(16)]


def is_separable(gate: CliffordGate) -> bool:
    """True iff the gate is a tensor product of single-qubit Cliffords."""
    if gate.arity != 2:
        raise ValueError("separability is defined for 2-qubit gates")
    for i, (x, z, _) in enumerate(gate.img):
        q = i // 2
        if (x | z) & ~(1 << q):
            return False
    return True


def separable_factors(gate: CliffordGate) -> tuple[CliffordGate, CliffordGate]:
    """Split a separable 2-qubit gate into its single-qubit factors."""
    if not is_separable(gate):
        raise ValueError("gate is not separable")
    facs = []
    for q in (0, 1):
        images = []
        for i in (2 * q, 2 * q + 1):
            x, z, p = gate.img[i]
            images.append(((x >> q) & 1, (z >> q) & 1, p))
        facs.append(CliffordGate.from_images(images, name=f"{gate.token()}[{q}]"))
    return facs[0], facs[1]


def conjugate(p, gate: CliffordGate, qubits):
    """Heisenberg update C^dag P C of a PauliOperator."""
    from .pauli import PauliOperator

    x, z, phase = gate.conjugate_raw(p.x, p.z, p.phase, tuple(qubits), False)
    return PauliOperator(p.n, x, z, phase)


def gate_from_token(token: str) -> CliffordGate:
    if token in NAMED_GATES:
        return NAMED_GATES[token]
    if token.startswith("c2:"):
        _, s, b = token.split(":")
        return c2_element(int(s), int(b))
    if token.startswith("g"):
        images = []
        for part in token[1:].split(","):
            x, z, p = part.split(".")
            images.append((int(x, 16), int(z, 16), int(p)))
        return CliffordGate.from_images(images)
    raise ValueError(f"unknown gate token {token!r}")


def _g1(name, ix, iz):
    return CliffordGate.from_images([ix, iz], name=name)


# single-qubit images as (x, z, phase): Y = (1, 1, 1), -Y = (1, 1, 3)
I1 = _g1("I", (1, 0, 0), (0, 1, 0))
H = _g1("H", (0, 1, 0), (1, 0, 0))
S = _g1("S", (1, 1, 1), (0, 1, 0))
SDG = _g1("SDG", (1, 1, 3), (0, 1, 0))
X = _g1("X", (1, 0, 0), (0, 1, 2))
Y = _g1("Y", (1, 0, 2), (0, 1, 2))
Z = _g1("Z", (1, 0, 2), (0, 1, 0))

CX = CliffordGate.from_images(
    [(3, 0, 0), (0, 1, 0), (2, 0, 0), (0, 3, 0)], name="CX"
)
SWAP = CliffordGate.from_images(
    [(2, 0, 0), (0, 2, 0), (1, 0, 0), (0, 1, 0)], name="SWAP"
)
CZ = CliffordGate.from_images(
    [(1, 2, 0), (0, 1, 0), (2, 1, 0), (0, 2, 0)], name="CZ"
)
# exp(-i pi/4 Z_0 X_1): the magic-state gadget Clifford, qubit 0 = target
U_GADGET = CliffordGate.from_images(
    [(3, 1, 1), (0, 1, 0), (2, 0, 0), (2, 3, 3)], name="UGAD"
)

NAMED_GATES = {
    g.name: g for g in (I1, H, S, SDG, X, Y, Z, CX, SWAP, CZ, U_GADGET)
}
