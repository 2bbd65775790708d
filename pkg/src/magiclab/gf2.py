"""GF(2) linear algebra on int bitmasks."""

from __future__ import annotations


def gf2_rank(rows: list[int]) -> int:
    """Rank of a set of bit-vector rows via elimination on the top bit."""
    basis: dict[int, int] = {}
    rank = 0
    for v in rows:
        while v:
            b = v.bit_length() - 1
            if b in basis:
                v ^= basis[b]
            else:
                basis[b] = v
                rank += 1
                break
    return rank


def gf2_in_span(vec: int, rows: list[int]) -> bool:
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            b = v.bit_length() - 1
            if b in basis:
                v ^= basis[b]
            else:
                basis[b] = v
                break
    v = vec
    while v:
        b = v.bit_length() - 1
        if b not in basis:
            return False
        v ^= basis[b]
    return True


def gf2_solve(rows: list[int], ncols: int, target: int) -> int | None:
    """Solve x . rows = target over GF(2); returns a row-combination bitmask.

    rows are bit vectors of width ncols; the solution marks which rows XOR to
    target, or None when the system is inconsistent.
    """
    basis: dict[int, tuple[int, int]] = {}
    for i, v in enumerate(rows):
        tag = 1 << i
        while v:
            b = v.bit_length() - 1
            if b in basis:
                bv, bt = basis[b]
                v ^= bv
                tag ^= bt
            else:
                basis[b] = (v, tag)
                break
    v, tag = target, 0
    while v:
        b = v.bit_length() - 1
        if b not in basis:
            return None
        bv, bt = basis[b]
        v ^= bv
        tag ^= bt
    return tag
