import numpy as np
import pytest
from scipy.stats import chisquare

from magiclab.circuit import (Circuit, ModelParams, alpha_max, expected_t_count,
                              generate)


def test_param_validation():
    with pytest.raises(ValueError):
        ModelParams(4, 4, 1.5, 0.0)
    with pytest.raises(ValueError):
        ModelParams(4, 4, 0.1, 0.2, alpha=0.9, model="t_correlated")  # p_minus < 0
    with pytest.raises(ValueError):
        ModelParams(4, 4, 0.1, 0.0, alpha=0.5)  # alpha without correlation
    prm = ModelParams(4, 4, 0.3, 0.1, alpha=0.5, model="t_correlated")
    assert abs(prm.p_minus - 0.25) < 1e-15 and abs(prm.p_plus - 0.75) < 1e-15


def test_expected_t_count_values():
    assert expected_t_count(ModelParams(32, 32, 0.1, 1 / 32)) == 32
    assert expected_t_count(ModelParams(8, 8, 0.1, 0.0)) == 0


def test_empirical_t_count(rng):
    params = ModelParams(8, 8, 0.0, 0.2)
    counts = [generate(params, rng).t_count for _ in range(2000)]
    mean = np.mean(counts)
    # binomial over n*D slots
    se = np.sqrt(0.2 * 0.8 * 64 / len(counts))
    assert abs(mean - expected_t_count(params)) < 3 * se


def test_brickwork_structure(rng):
    circ = generate(ModelParams(6, 5, 0.1, 0.1), rng)
    for e in circ.events:
        if e.kind == "gate":
            a, b = e.qubits
            assert b == a + 1
            assert a % 2 == (e.layer - 1) % 2
    outs = [e for e in circ.events if e.kind == "output"]
    assert len(outs) == 6
    assert circ.events[-6:] == outs


def test_monitor_follows_t_on_same_qubit(rng):
    params = ModelParams(4, 6, 0.9, 0.9, alpha=0.0)
    circ = generate(params, rng)
    seen = {}
    for i, e in enumerate(circ.events):
        if e.kind in ("t", "monitor"):
            key = (e.layer, e.qubits[0])
            if e.kind == "t":
                assert key not in seen
                seen[key] = i
            elif key in seen:
                assert i > seen[key]


def test_reproducibility():
    params = ModelParams(6, 6, 0.3, 0.2)
    a = generate(params, np.random.default_rng(5)).serialize()
    b = generate(params, np.random.default_rng(5)).serialize()
    assert a == b


def test_serialize_roundtrip(rng):
    circ = generate(ModelParams(5, 4, 0.4, 0.3), rng)
    circ.monitor_outcomes = [1 if rng.random() < 0.5 else -1 for _ in circ.monitor_outcomes]
    text = circ.serialize()
    back = Circuit.deserialize(text)
    assert back.serialize() == text
    assert back.n == circ.n and back.t_count == circ.t_count


def test_alpha_zero_matches_uncorrelated(rng):
    # two-sample comparison of T/monitor counts across the two models
    n, d, p, q = 8, 8, 0.3, 0.25
    unc = ModelParams(n, d, p, q)
    cor = ModelParams(n, d, p, q, alpha=0.0, model="t_correlated")
    slots = 10_000

    def stats(params):
        t = m = joint = 0
        total = 0
        while total < slots:
            c = generate(params, rng)
            tset = {(e.layer, e.qubits[0]) for e in c.events if e.kind == "t"}
            mset = {(e.layer, e.qubits[0]) for e in c.events if e.kind == "monitor"}
            t += len(tset)
            m += len(mset)
            joint += len(tset & mset)
            total += n * d
        return np.array([t, m, joint]) / total

    su, sc = stats(unc), stats(cor)
    for i, rate in enumerate([q, p, p * q]):
        se = np.sqrt(rate * (1 - rate) / slots)
        assert abs(su[i] - sc[i]) < 4 * np.sqrt(2) * se + 1e-12


def test_alpha_max_perfect_monitoring(rng):
    p, q = 0.3, 0.1
    a = alpha_max(p, q)
    params = ModelParams(8, 8, p, q, alpha=a, model="t_correlated")
    assert abs(params.p_plus - 1.0) < 1e-12
    for _ in range(50):
        c = generate(params, rng)
        tset = {(e.layer, e.qubits[0]) for e in c.events if e.kind == "t"}
        mset = {(e.layer, e.qubits[0]) for e in c.events if e.kind == "monitor"}
        assert tset <= mset  # every T immediately monitored


def test_q_zero_monitor_rate(rng):
    p = 0.4
    params = ModelParams(8, 8, p, 0.0, alpha=0.0, model="t_correlated")
    assert params.p_minus == p
    mons = 0
    total = 0
    for _ in range(300):
        c = generate(params, rng)
        mons += c.n_monitors
        total += 64
    se = np.sqrt(p * (1 - p) / total)
    assert abs(mons / total - p) < 3 * se


def test_total_monitor_rate_law_of_total_probability(rng):
    # empirical monitor rate equals p in the correlated model
    p, q, a = 0.3, 0.2, 0.8
    params = ModelParams(8, 8, p, q, alpha=a, model="t_correlated")
    mons = total = 0
    for _ in range(400):
        c = generate(params, rng)
        mons += c.n_monitors
        total += 64
    se = np.sqrt(p * (1 - p) / total)
    assert abs(mons / total - p) < 3 * se


def test_generation_matches_golden():
    # frozen serialization pins both the text format and the sampling
    # stream; regenerate the file deliberately if either changes
    import os
    golden = os.path.join(os.path.dirname(__file__), "golden_circuit.txt")
    circ = generate(ModelParams(6, 4, 0.3, 0.25), np.random.default_rng(2026))
    assert circ.serialize() == open(golden).read()
