"""Decomposition of a Pauli over stabilizer generators and flip operators.

The generator basis is brought to a bipartite normal form for the cut left
of the operator's first qubit: GF(2) elimination sorts generators into
A-local, straddling and B-local classes (the straddling count is twice the
entanglement entropy across the cut), B-local generators are column-reduced
so no more than two touch the target qubit, and flip operators are solved
with support constraints keeping the A-local and far-B pairs away from it.
Finally the straddling pair basis is re-paired so that the operator's
cut-crossing component touches every straddling pair; the count of pairs
with a nonzero exponent then tracks twice the entropy with O(1) slack, and
the count is exact in the constructed gauge because the decomposition is
unique once the basis is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pauli import PauliOperator
from .tableau import StabilizerTableau


def _pack(x: int, z: int, n: int) -> int:
    return x | (z << n)


def _swap(v: int, n: int) -> int:
    """Functional mask: sp(u, v) = popcount(u & swap(v)) mod 2."""
    mask = (1 << n) - 1
    return ((v >> n) & mask) | ((v & mask) << n)


def _sp(u: int, v: int, n: int) -> int:
    return (u & _swap(v, n)).bit_count() & 1


def _proj(v: int, qmask: int, n: int) -> int:
    return v & (qmask | (qmask << n))


def _echelon_split(vecs, n, qmask, helpers=()):
    """(vectors reducible into qmask, remainder spanning the complement).

    Eliminates on the complement projection; "local" vectors are supported
    inside qmask after row operations, the rest keep independent
    complement projections.  Helper rows join the elimination basis but are
    not returned; callers pass rows whose qmask-complement part is zero so
    that using them never disturbs the projection being eliminated.
    """
    comp = ((1 << n) - 1) & ~qmask
    basis: dict[int, int] = {}
    for h in helpers:
        r = h
        while True:
            pr = _proj(r, comp, n)
            if pr == 0:
                break
            b = pr.bit_length() - 1
            if b in basis:
                r ^= basis[b]
            else:
                basis[b] = r
                break
    local = []
    out = []
    for v in vecs:
        r = v
        while True:
            pr = _proj(r, comp, n)
            if pr == 0:
                if r:
                    local.append(r)
                break
            b = pr.bit_length() - 1
            if b in basis:
                r ^= basis[b]
            else:
                basis[b] = r
                out.append(r)
                break
    return local, out


def _solve_affine(constraints, rhs, var_mask):
    """One GF(2) solution x subset var_mask of popcount(x & c_i) = rhs_i."""
    pivots = []  # (pivot bit, reduced row, rhs)
    for c, r in zip(constraints, rhs):
        c &= var_mask
        for pb, pc, pr in pivots:
            if (c >> pb) & 1:
                c ^= pc
                r ^= pr
        if c == 0:
            if r:
                return None
            continue
        pivots.append((c.bit_length() - 1, c, r))
    x = 0
    for pb, pc, pr in reversed(pivots):
        val = pr ^ ((x & pc).bit_count() & 1)
        if val:
            x |= 1 << pb
    return x


@dataclass
class NormalForm:
    """Symplectic basis adapted to a cut and a target qubit.

    gens/flips are aligned lists ordered (A-local, far-B, target-B,
    straddling); straddle pairs occupy the last n_straddle slots.
    """

    n: int
    gens: list[int]
    flips: list[int]
    n_a: int
    n_far: int
    n_jb: int
    n_straddle: int

    def straddle_slots(self):
        start = self.n_a + self.n_far + self.n_jb
        return range(start, start + self.n_straddle)

    def check_pairing(self):
        n = self.n
        for i, f in enumerate(self.flips):
            for k, g in enumerate(self.gens):
                if _sp(f, g, n) != (1 if i == k else 0):
                    raise AssertionError(f"pairing broken at flip {i}, gen {k}")
            for k in range(i + 1, len(self.flips)):
                if _sp(f, self.flips[k], n):
                    raise AssertionError(f"flips {i},{k} anti-commute")


def bipartite_normal_form(stab_vecs, n: int, cut: int, target: int | None = None) -> NormalForm:
    """Class-split generators for A = qubits < cut and build localized flips."""
    amask = (1 << cut) - 1
    full = (1 << n) - 1
    bmask = full & ~amask
    alocal, rest = _echelon_split(stab_vecs, n, amask)
    blocal, straddle = _echelon_split(rest, n, bmask, helpers=alocal)
    jb: list[int] = []
    if target is not None:
        far, jb = _echelon_split(blocal, n, full & ~(1 << target))
        blocal = far
    gens = alocal + blocal + jb + straddle
    if len(gens) != len(stab_vecs):
        raise AssertionError("normal form lost rank")

    n_a, n_far, n_jb = len(alocal), len(blocal), len(jb)
    flips: list[int] = [0] * len(gens)
    var_all = (1 << (2 * n)) - 1
    if target is None:
        var_local = var_all
    else:
        # the pair count only cares about target-qubit support, so the
        # A-local and far-B flips are merely kept off that qubit
        offmask = ((1 << n) - 1) & ~(1 << target)
        var_local = offmask | (offmask << n)
    n_local = n_a + n_far

    done: list[int] = []
    for idx in range(len(gens)):
        vmask = var_local if idx < n_local else var_all
        constraints = [_swap(g, n) for g in gens] + [_swap(f, n) for f in done]
        rhs = [1 if k == idx else 0 for k in range(len(gens))] + [0] * len(done)
        x = _solve_affine(constraints, rhs, vmask)
        if x is None and vmask != var_all:
            x = _solve_affine(constraints, rhs, var_all)
        if x is None:
            raise AssertionError("flip construction infeasible")
        flips[idx] = x
        done.append(x)
    return NormalForm(n, gens, flips, n_a, n_far, n_jb, len(straddle))


def _spread_straddle(nf: NormalForm, mv: int):
    """Re-pair the straddle block so mv touches every straddling pair.

    Uses the elementary symplectic moves (g_i += g_k with f_k += f_i, and
    f_i += f_k with g_k += g_i), which keep the straddling class intact
    since straddle generators have independent projections on both sides of
    the cut.  No-op when the operator has no straddle component.
    """
    n = nf.n
    slots = list(nf.straddle_slots())
    coord = {
        i: (_sp(mv, nf.flips[i], n), _sp(mv, nf.gens[i], n)) for i in slots
    }
    live = [i for i in slots if coord[i] != (0, 0)]
    if not live:
        return
    k = live[0]
    for i in slots:
        if coord[i] != (0, 0):
            continue
        ak, bk = coord[k]
        if bk:
            nf.gens[i] ^= nf.gens[k]
            nf.flips[k] ^= nf.flips[i]
        else:
            nf.flips[i] ^= nf.flips[k]
            nf.gens[k] ^= nf.gens[i]
        coord[i] = (_sp(mv, nf.flips[i], n), _sp(mv, nf.gens[i], n))
        coord[k] = (_sp(mv, nf.flips[k], n), _sp(mv, nf.gens[k], n))
        if coord[i] == (0, 0) or coord[k] == (0, 0):
            raise AssertionError("straddle spreading failed")


@dataclass
class PauliDecomposition:
    alpha_bits: int  # generator exponents
    beta_bits: int  # flip exponents
    gamma: int  # pairs with a nonzero exponent

    def pairs(self):
        used = self.alpha_bits | self.beta_bits
        return [i for i in range(used.bit_length()) if (used >> i) & 1]


def decompose_pauli(tableau: StabilizerTableau, m: PauliOperator) -> PauliDecomposition:
    """Express a Hermitian Pauli over the normal-form pairs of its cut.

    The expression is unique once the basis is fixed: the generator
    exponent of pair i is sp(M, flip_i) and the flip exponent is
    sp(M, gen_i).  The reconstruction is asserted before returning.
    """
    if not m.is_hermitian():
        raise ValueError("operator must be Hermitian")
    if m.is_identity():
        return PauliDecomposition(0, 0, 0)
    n = tableau.n
    j = min(m.support())
    vecs = [_pack(r.x, r.z, n) for r in tableau.stabilizer_rows()]
    nf = bipartite_normal_form(vecs, n, j, target=j)
    mv = _pack(m.x, m.z, n)
    _spread_straddle(nf, mv)
    alpha = beta = 0
    for i, (g, f) in enumerate(zip(nf.gens, nf.flips)):
        if _sp(mv, f, n):
            alpha |= 1 << i
        if _sp(mv, g, n):
            beta |= 1 << i
    dec = PauliDecomposition(alpha, beta, (alpha | beta).bit_count())
    acc = 0
    for i in dec.pairs():
        if (alpha >> i) & 1:
            acc ^= nf.gens[i]
        if (beta >> i) & 1:
            acc ^= nf.flips[i]
    if acc != mv:
        raise AssertionError("decomposition does not reconstruct the operator")
    return dec


def gamma_profile(tableau: StabilizerTableau, qubit: int) -> tuple[int, int]:
    """(gamma, 2 * entanglement entropy) for the Z operator on one qubit."""
    m = PauliOperator.single(tableau.n, qubit, "Z")
    dec = decompose_pauli(tableau, m)
    return dec.gamma, 2 * tableau.entanglement_entropy(qubit)
