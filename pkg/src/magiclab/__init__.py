"""Monitored Clifford+T circuits, Pauli-based compilation and magic sweeps."""

__all__ = [
    "pauli",
    "clifford",
    "tableau",
    "decompose",
    "circuit",
    "percolation",
    "stitch",
    "pbc",
    "msr",
    "splab",
    "oracle",
    "verify",
    "harness",
    "cli",
]
