import cmath
import math

import numpy as np
import pytest

from qbs_sim.states import (
    H,
    V,
    Mode,
    StateError,
    TwoPhotonState,
    dump_state,
    ensemble_probability,
    fidelity,
    load_state,
    make_state,
    marginal_probability,
    mix,
)

CH, CV = Mode("c", H), Mode("c", V)
AH, AV = Mode("a", H), Mode("a", V)


def bell():
    return make_state([((CH, AH), 1.0), ((CV, AV), 1.0)])


def random_state(rng, n_paths=4):
    keys = [
        (Mode("c", cp), Mode(p, tp))
        for cp in (H, V)
        for p in "abcd"[:n_paths]
        for tp in (H, V)
    ]
    amps = rng.normal(size=len(keys)) + 1j * rng.normal(size=len(keys))
    return make_state(zip(keys, amps))


def test_bell_state_amplitudes():
    s = bell()
    r = 1.0 / math.sqrt(2.0)
    assert s.amplitudes[(CH, AH)] == pytest.approx(r)
    assert s.amplitudes[(CV, AV)] == pytest.approx(r)


def test_single_term_identity():
    s = make_state([((CH, AH), 1.0)])
    assert s.amplitudes[(CH, AH)] == pytest.approx(1.0)


def test_3_4_5_normalization():
    s = make_state([((CH, AH), 3.0), ((CH, AV), 4.0)])
    assert s.amplitudes[(CH, AH)] == pytest.approx(0.6)
    assert s.amplitudes[(CH, AV)] == pytest.approx(0.8)


def test_duplicate_keys_summed_before_normalization():
    s = make_state([((CH, AH), 0.5), ((CH, AH), 0.5), ((CV, AV), 1.0)])
    assert s.amplitudes[(CH, AH)] == pytest.approx(1.0 / math.sqrt(2.0))


def test_all_zero_rejected():
    with pytest.raises(StateError):
        make_state([((CH, AH), 1.0), ((CH, AH), -1.0)])
    with pytest.raises(StateError):
        make_state([])


def test_normalization_invariant():
    rng = np.random.default_rng(1)
    for _ in range(50):
        assert abs(random_state(rng).norm_squared() - 1.0) < 1e-12


def test_fidelity_identity_and_orthogonality():
    s = bell()
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)
    hh = make_state([((CH, AH), 1.0)])
    vv = make_state([((CV, AV), 1.0)])
    assert fidelity(hh, vv) == 0.0


def test_fidelity_global_phase_and_symmetry():
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = random_state(rng)
        phi = rng.uniform(0, 2 * math.pi)
        rotated = TwoPhotonState(
            {k: a * cmath.exp(1j * phi) for k, a in s.amplitudes.items()}
        )
        assert fidelity(s, rotated) == pytest.approx(1.0, abs=1e-10)
        t = random_state(rng)
        assert fidelity(s, t) == pytest.approx(fidelity(t, s), abs=1e-12)


def test_marginal_bell_corroborative_h():
    assert marginal_probability(bell(), lambda cm, tm: cm.pol == H) == pytest.approx(0.5)


def test_marginal_always_true_is_one():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = random_state(rng)
        assert marginal_probability(s, lambda cm, tm: True) == pytest.approx(1.0)


def test_marginal_partition_sums_to_one():
    rng = np.random.default_rng(4)
    s = random_state(rng)
    total = sum(
        marginal_probability(s, lambda cm, tm, p=p: tm.path == p) for p in "abcd"
    )
    assert total == pytest.approx(1.0, abs=1e-12)


def test_mixture_symmetric():
    hh = make_state([((CH, AH), 1.0)])
    vv = make_state([((CV, AV), 1.0)])
    m = mix([(0.5, hh), (0.5, vv)])
    assert ensemble_probability(m, lambda cm, tm: cm.pol == H) == pytest.approx(0.5)
    assert ensemble_probability(m, lambda cm, tm: tm.pol == V) == pytest.approx(0.5)


def test_single_component_mixture_degenerate():
    s = bell()
    m = mix([(1.0, s)])
    pred = lambda cm, tm: cm.pol == H
    assert ensemble_probability(m, pred) == pytest.approx(marginal_probability(s, pred))


def test_mixture_negative_weight_rejected():
    with pytest.raises(StateError):
        mix([(-0.1, bell()), (1.1, bell())])


def test_mixture_weights_must_sum_to_one():
    with pytest.raises(StateError):
        mix([(0.4, bell()), (0.4, bell())])


def test_ensemble_probability_affine_in_weights():
    rng = np.random.default_rng(5)
    s1, s2 = random_state(rng), random_state(rng)
    pred = lambda cm, tm: tm.path == "a"
    for w in (0.0, 0.25, 0.7, 1.0):
        m = mix([(w, s1), (1.0 - w, s2)])
        expected = w * marginal_probability(s1, pred) + (1 - w) * marginal_probability(
            s2, pred
        )
        assert ensemble_probability(m, pred) == pytest.approx(expected, abs=1e-12)


def test_dump_load_round_trip():
    rng = np.random.default_rng(6)
    s = random_state(rng)
    t = load_state(dump_state(s))
    assert fidelity(s, t) == pytest.approx(1.0, abs=1e-12)
    assert dump_state(t) == dump_state(s)
