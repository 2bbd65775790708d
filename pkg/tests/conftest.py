import numpy as np
import pytest

from magiclab import clifford as cl
from magiclab.tableau import StabilizerTableau


def brickwork_scramble(n, depth, p, rng, track_phases=True):
    """Monitored random-Clifford tableau evolution used across tests."""
    tab = StabilizerTableau(n, track_phases=track_phases)
    for layer in range(depth):
        for a in range(layer % 2, n - 1, 2):
            tab.apply_gate(cl.sample_c2(rng), (a, a + 1))
        if p > 0:
            for q in range(n):
                if rng.random() < p:
                    tab.measure_z(q, coin=1 if rng.random() < 0.5 else -1)
    return tab


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
