import numpy as np
import pytest
from scipy.stats import chisquare

from magiclab import clifford as cl
from magiclab.pauli import PauliOperator


def test_c2_census():
    gates = cl.all_c2()
    assert len(gates) == 11520
    assert sum(cl.is_separable(g) for g in gates) == 576


def test_sampled_separable_fraction(rng):
    draws = 100_000
    hits = sum(cl.is_separable(cl.sample_c2(rng)) for _ in range(draws))
    frac = hits / draws
    se = np.sqrt(0.05 * 0.95 / draws)
    assert abs(frac - 0.05) < 3 * se


def test_separable_examples():
    assert cl.is_separable(_tensor(cl.H, cl.S))
    assert not cl.is_separable(cl.CX)
    assert not cl.is_separable(cl.SWAP)
    with pytest.raises(ValueError):
        cl.is_separable(cl.H)


def _tensor(u0, u1):
    imgs = []
    for q, u in ((0, u0), (1, u1)):
        for i in range(2):
            x, z, p = u.img[i]
            imgs.append((x << q, z << q, p))
    return cl.CliffordGate.from_images(imgs)


def test_separable_factors_roundtrip(rng):
    for _ in range(50):
        g = cl.sample_c2(rng)
        if not cl.is_separable(g):
            continue
        u0, u1 = cl.separable_factors(g)
        assert _tensor(u0, u1).img == g.img


def test_image_of_x_uniform_over_signed_paulis(rng):
    # exact exhaustive count: each of the 30 signed non-identity 2-qubit
    # Paulis appears 11520/30 = 384 times as the image of X (x) I
    counts = {}
    for g in cl.all_c2():
        counts[g.img[0]] = counts.get(g.img[0], 0) + 1
    assert len(counts) == 30
    assert set(counts.values()) == {384}
    # chi-square over a finite sample of draws
    draws = [cl.sample_c2(rng).img[0] for _ in range(30_000)]
    keys = sorted(counts)
    obs = [sum(1 for d in draws if d == k) for k in keys]
    assert chisquare(obs).pvalue > 1e-4


def test_identical_seeds_identical_gates():
    g1 = cl.sample_c2(np.random.default_rng(777))
    g2 = cl.sample_c2(np.random.default_rng(777))
    assert g1 is g2  # cached by (symplectic index, signs)


def test_gate_token_roundtrip(rng):
    for _ in range(20):
        g = cl.sample_c2(rng)
        assert cl.gate_from_token(g.token()).img == g.img
    assert cl.gate_from_token("H") is cl.H
    custom = cl.CliffordGate.from_images(list(cl.U_GADGET.img))
    assert cl.gate_from_token(custom.token()).img == cl.U_GADGET.img


def test_bad_images_rejected():
    with pytest.raises(ValueError):
        cl.CliffordGate.from_images([(1, 0, 0), (1, 0, 0)])  # not symplectic
    with pytest.raises(ValueError):
        cl.CliffordGate.from_images([(1, 1, 0), (0, 1, 0)])  # non-Hermitian image


def test_conjugate_named_op():
    z = PauliOperator.single(2, 0, "Z")
    assert cl.conjugate(z, cl.H, (0,)).label() == "+XI"
    z2 = PauliOperator.single(2, 1, "Z")
    assert cl.conjugate(z2, cl.CX, (0, 1)).label() == "+ZZ"
