import math

import numpy as np
import pytest

from conftest import brickwork_scramble
from magiclab import clifford as cl
from magiclab import oracle as orc
from magiclab import splab as sl
from magiclab.pauli import PauliOperator
from magiclab.tableau import StabilizerTableau


def test_inject_on_vacuum_trivial():
    assert sl.inject_t(StabilizerTableau(1), 0) is None


def test_inject_on_plus():
    tab = StabilizerTableau(1)
    tab.apply_gate(cl.H, (0,))
    cs = sl.inject_t(tab, 0)
    assert cs is not None and cs.gens == []
    assert (cs.zbar[0], cs.zbar[1]) == (0, 1)  # Z
    assert (cs.xbar[0], cs.xbar[1]) == (1, 0)  # X
    cs.check_invariants()


def test_trivial_iff_dense_stabilizer(rng):
    for _ in range(25):
        n = int(rng.integers(2, 7))
        tab = StabilizerTableau(n)
        st = orc.DenseState(n)
        for layer in range(2 * n):
            for a in range(layer % 2, n - 1, 2):
                g = cl.sample_c2(rng)
                tab.apply_gate(g, (a, a + 1))
                st.apply_gate(g, (a, a + 1))
            for q in range(n):
                if rng.random() < 0.15:
                    out, _ = tab.measure_z(q, coin=1 if rng.random() < 0.5 else -1)
                    st.project_pauli(PauliOperator.single(n, q, "Z"), out)
        c = int(rng.integers(0, n))
        cs = sl.inject_t(tab, c)
        st.apply_t(c)
        assert (cs is None) == orc.is_stabilizer(st)


def test_step_clifford_identity_like(rng):
    tab = brickwork_scramble(4, 8, 0.0, rng)
    cs = None
    for q in range(4):
        cs = sl.inject_t(tab, q)
        if cs:
            break
    before = (list(cs.gens), cs.zbar, cs.xbar)
    sl.step_clifford(cs, cl.I1, (0,))
    assert (cs.gens, cs.zbar, cs.xbar) == before
    # disjoint-support gate leaves rows outside its qubits untouched
    sl.step_clifford(cs, cl.CX, (2, 3))
    cs.check_invariants()


def test_step_invariants_random(rng):
    for _ in range(15):
        n = 6
        tab = brickwork_scramble(n, 2 * n, 0.1, rng)
        cs = None
        for q in rng.permutation(n):
            cs = sl.inject_t(tab, int(q))
            if cs:
                break
        for step in range(12):
            if cs.purified:
                break
            if rng.random() < 0.5:
                a = int(rng.integers(0, n - 1))
                sl.step_clifford(cs, cl.sample_c2(rng), (a, a + 1))
            else:
                sl.step_monitor(cs, int(rng.integers(0, n)),
                                coin=1 if rng.random() < 0.5 else -1)
            if not cs.purified:
                cs.check_invariants()


def test_monitor_on_t_qubit_purifies():
    tab = StabilizerTableau(3)
    for q in range(3):
        tab.apply_gate(cl.H, (q,))
    cs = sl.inject_t(tab, 1)
    assert sl.step_monitor(cs, 1) == sl.SP
    assert cs.purified


def test_monitor_outside_lightcone_never_sp(rng):
    # fresh product state: T on qubit 0, monitors elsewhere are trivial or
    # code updates, never purification
    for _ in range(30):
        tab = StabilizerTableau(4)
        tab.apply_gate(cl.H, (0,))
        cs = sl.inject_t(tab, 0)
        ev = sl.step_monitor(cs, int(rng.integers(1, 4)))
        assert ev in (sl.TRIVIAL, sl.NSP_UPDATE)


def test_sp_iff_dense_stabilizer(rng):
    # at each monitor step the tracked verdict matches the dense state
    for trial in range(12):
        n = int(rng.integers(2, 6))
        tab = StabilizerTableau(n)
        st = orc.DenseState(n)
        rng2 = np.random.default_rng(int(rng.integers(1 << 30)))
        for layer in range(2 * n):
            for a in range(layer % 2, n - 1, 2):
                g = cl.sample_c2(rng2)
                tab.apply_gate(g, (a, a + 1))
                st.apply_gate(g, (a, a + 1))
        cs = None
        for q in rng2.permutation(n):
            cs = sl.inject_t(tab, int(q))
            if cs:
                st.apply_t(int(q))
                break
        if cs is None:
            continue
        for step in range(10):
            if cs.purified:
                break
            q = int(rng2.integers(0, n))
            pz = PauliOperator.single(n, q, "Z")
            exp = st.expectation(pz).real
            coin = 1 if rng2.random() < 0.5 else -1
            if abs(exp) > 1 - 1e-9:
                outcome = 1 if exp > 0 else -1
            else:
                outcome = coin if abs(exp) < 1e-9 else (
                    1 if rng2.random() < (1 + exp) / 2 else -1)
            ev = sl.step_monitor(cs, q, outcome)
            st.project_pauli(pz, outcome)
            assert (ev == sl.SP) == orc.is_stabilizer(st), (trial, step, ev)
            if ev != sl.SP:
                a = int(rng2.integers(0, n - 1))
                g = cl.sample_c2(rng2)
                sl.step_clifford(cs, g, (a, a + 1))
                st.apply_gate(g, (a, a + 1))


def test_theory_closed_forms():
    assert sl.sp_fraction(1) == 1.0
    assert abs(sl.sp_fraction(2) - 0.4) < 1e-15
    th = sl.sp_theory(2, 0.5, 2)
    assert abs(float(th.p_sp(1, 0.5)) - 0.5) < 1e-15  # P(SP) at d=1 is p
    assert sl.sp_theory(1, 0.3, 4).tau_sp == math.inf  # singular-f sentinel
    assert float(sl.sp_theory(1, 0.3, 4).p_sp(2, 0.3)) == 1.0
    assert sl.sp_theory(2, 0.0, 4).tau_sp == math.inf
    th2 = sl.sp_theory(3, 0.2, 3)
    assert abs(th2.tau_sp + 1 / (0.6 * math.log(1 - sl.sp_fraction(3)))) < 1e-12


def test_theory_p_zero():
    th = sl.sp_theory(4, 0.0, 5)
    assert float(th.p_sp(50, 0.0)) == 0.0


def test_single_layer_sp_values():
    assert sl.single_layer_sp(0.3, 0.0, 12) == 1.0
    assert sl.single_layer_sp(1.0, 0.7, 12) == 1.0
    assert abs(sl.single_layer_sp(0.5, 1.0, 10) - 9.765625e-4) < 1e-12
    with pytest.raises(ValueError):
        sl.single_layer_sp(1.5, 0.5, 4)


def test_tcb_p_zero_never_purifies():
    res = sl.tcb_experiment(5, 0.0, 8, 40, np.random.default_rng(3))
    assert res.p_sp[-1] == 0.0


def test_tcb_monotone_and_censoring(rng):
    res = sl.tcb_experiment(8, 0.25, 40, 300, rng)
    assert np.all(np.diff(res.p_sp) >= 0)
    assert all(d == -1 or 1 <= d <= 40 for d in res.d_star)
    assert res.gamma > 0
