import numpy as np

from magiclab import oracle as orc
from magiclab import verify as vf
from magiclab.circuit import ModelParams, generate
from magiclab.clifford import X as X_GATE
from magiclab.percolation import find_ccs, map_circuit
from magiclab.stitch import stitch


def _final_clusters(circ):
    lat = map_circuit(circ)
    return lat, [c for c in find_ccs(lat) if c.touches_final]


def test_no_reentry_copies_verbatim(rng):
    # a no-monitor circuit has one spanning cluster; stitching reproduces it
    while True:
        circ = generate(ModelParams(4, 4, 0.0, 0.2), rng)
        lat, ccs = _final_clusters(circ)
        if len(ccs) == 1 and lat.cut_vertical == 0:
            break
    sub = stitch(ccs[0], circ, lat)
    assert sub.serialize() == circ.serialize()


def test_x_inserted_on_outcome_flip(rng):
    # build until some cluster has a re-entrant line with differing outcomes;
    # flipping the recorded outcomes toggles the X insertions
    found = 0
    for _ in range(300):
        circ = generate(ModelParams(5, 5, 0.5, 0.0), rng)
        circ = vf.sample_record(circ, rng)
        lat, ccs = _final_clusters(circ)
        for cc in ccs:
            sub = stitch(cc, circ, lat)
            n_x = sum(1 for e in sub.events if e.kind == "gate" and e.gate is X_GATE)
            # recompute with all outcomes forced +1: no flips anywhere
            forced = circ.copy_with_outcomes([1] * circ.n_monitors)
            sub2 = stitch(cc, forced, lat)
            assert not any(e.kind == "gate" and e.gate is X_GATE for e in sub2.events)
            found += n_x > 0
    assert found > 0


def test_stitched_distribution_matches_marginal(rng):
    tested = 0
    for _ in range(40):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(2, 7))
        circ = generate(ModelParams(n, d, float(rng.choice([0.3, 0.5])), 0.0), rng)
        circ = vf.sample_record(circ, rng)
        lat, ccs = _final_clusters(circ)
        state, _, _ = orc.run_circuit(circ)
        for cc in ccs:
            sub = stitch(cc, circ, lat)
            if not sub.output_qubits:
                continue
            orig_qubits = sorted(
                q for q in range(circ.n)
                if lat.node_id.get((circ.depth + 1, q)) in set(cc.nodes)
            )
            direct = orc.output_distribution(state, orig_qubits)
            sub_state, _, _ = orc.run_circuit(sub)
            stitched = orc.output_distribution(sub_state, sub.output_qubits)
            assert 0.5 * np.abs(direct - stitched).sum() < 1e-9
            tested += 1
    assert tested > 30
