"""Bit-packed n-qubit Pauli operators.

A Pauli is stored as two integer bitmasks ``x`` and ``z`` (bit j set when the
word contains X_j resp. Z_j) together with an integer ``phase``, the exponent
of i in

    P = i^phase * prod_j X_j^{x_j} Z_j^{z_j},

with the convention Y = i X Z.  All group arithmetic reduces to XOR, AND and
popcounts on machine integers, which is what makes the O(t^3) GF(2) work in
the compiler affordable in pure Python.
"""

from __future__ import annotations

from dataclasses import dataclass

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_CHAR_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


def phase_mul(x1: int, z1: int, p1: int, x2: int, z2: int, p2: int) -> tuple[int, int, int]:
    """Multiply two Pauli words given as raw (x, z, phase) triples."""
    phase = (p1 + p2 + 2 * (z1 & x2).bit_count()) & 3
    return x1 ^ x2, z1 ^ z2, phase


def sp_raw(x1: int, z1: int, x2: int, z2: int) -> int:
    """Symplectic product of two raw Pauli words: 0 commute, 1 anti-commute."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) & 1


@dataclass(frozen=True)
class PauliOperator:
    """Immutable n-qubit Pauli with i-exponent phase (Y = iXZ convention)."""

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit vector exceeds qubit count")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse e.g. '+XIZ', '-iYY'.  Letter order is qubit 0 first."""
        body = label
        phase = 0
        if body.startswith(("+", "-")):
            if body[0] == "-":
                phase = 2
            body = body[1:]
        if body.startswith("i"):
            phase += 1
            body = body[1:]
        x = z = 0
        for j, ch in enumerate(body):
            xb, zb = _CHAR_BITS[ch]
            x |= xb << j
            z |= zb << j
            if xb and zb:
                phase += 1  # Y contributes its own factor of i
        return cls(len(body), x, z, phase & 3)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 1) -> "PauliOperator":
        xb, zb = _CHAR_BITS[kind]
        phase = (1 if kind == "Y" else 0) + (0 if sign > 0 else 2)
        return cls(n, xb << qubit, zb << qubit, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    # -- structure ---------------------------------------------------------

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    def is_hermitian(self) -> bool:
        return (self.phase + self.y_count) % 2 == 0

    def sign(self) -> int:
        """+1 or -1 prefactor of the tensor-product form; Hermitian only."""
        k = (self.phase - self.y_count) & 3
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise ValueError("sign undefined for non-Hermitian Pauli")

    def support(self) -> list[int]:
        bits = self.x | self.z
        return [j for j in range(self.n) if (bits >> j) & 1]

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    # -- algebra -----------------------------------------------------------

    def multiply(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        x, z, phase = phase_mul(self.x, self.z, self.phase, other.x, other.z, other.phase)
        return PauliOperator(self.n, x, z, phase)

    __mul__ = multiply

    def symplectic_product(self, other: "PauliOperator") -> int:
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return sp_raw(self.x, self.z, other.x, other.z)

    def commutes_with(self, other: "PauliOperator") -> bool:
        return self.symplectic_product(other) == 0

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def label(self) -> str:
        chars = []
        for j in range(self.n):
            chars.append(_PAULI_CHARS[((self.x >> j) & 1, (self.z >> j) & 1)])
        k = (self.phase - self.y_count) & 3
        pre = {0: "+", 1: "+i", 2: "-", 3: "-i"}[k]
        return pre + "".join(chars)

    def __repr__(self):
        return f"PauliOperator({self.label()!r})"


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    """0 if [P,Q] = 0, 1 if {P,Q} = 0."""
    return p.symplectic_product(q)


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    return p.multiply(q)
