import itertools

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from polaraug import bp
from polaraug.codec import assemble_input, encode
from polaraug.construction import ConfigurationError, construct

llrs = st.floats(-30, 30, allow_nan=False)


def box_plus_mp(a, b):
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    return float(mpmath.log((1 + mpmath.exp(a + b)) / (mpmath.exp(a) + mpmath.exp(b))))


def test_box_plus_examples():
    assert bp.box_plus(2.0, 3.0) == pytest.approx(1.693453660970895, abs=1e-12)
    assert bp.box_plus(1.7, bp.CLIP) == pytest.approx(1.7, abs=1e-12)
    for b in (-40.0, -3.0, 0.0, 12.0):
        assert bp.box_plus(0.0, b) == 0.0


@given(llrs, llrs)
def test_box_plus_matches_direct_formula(a, b):
    assert bp.box_plus(a, b) == pytest.approx(box_plus_mp(a, b), abs=1e-9)


@given(llrs, llrs)
def test_box_plus_properties(a, b):
    f = bp.box_plus(a, b)
    assert f == bp.box_plus(b, a)
    assert abs(f) <= min(abs(a), abs(b)) + 1e-12
    if abs(f) > 1e-12:
        assert np.sign(f) == np.sign(a) * np.sign(b)


def test_box_plus_no_overflow():
    f = bp.box_plus(np.array([1e6, -1e6, 1e300]), np.array([1e6, 1e6, -5.0]))
    assert np.all(np.isfinite(f))
    assert np.all(np.abs(f) <= bp.CLIP)


def test_pe_update_zero():
    assert bp.pe_update(0.0, 0.0, 0.0, 0.0) == (0.0, 0.0, 0.0, 0.0)


def test_pe_update_example():
    l1, l2, r1, r2 = bp.pe_update(2.0, 3.0, 0.0, 0.0)
    assert l1 == pytest.approx(1.693453660970895, abs=1e-12)
    assert (l2, r1, r2) == (3.0, 0.0, 0.0)


small = st.floats(-10, 10, allow_nan=False)


@given(small, small, small)
def test_pe_update_frozen_limit(l1, l2, r2):
    # known-zero upper input: lower node sees the sum, upper output is plain f
    lo1, lo2, ro1, ro2 = bp.pe_update(l1, l2, bp.FROZEN_LLR, r2)
    assert lo2 == pytest.approx(np.clip(l1 + l2, -bp.CLIP, bp.CLIP), abs=1e-6)
    assert lo1 == pytest.approx(box_plus_mp(l1, l2 + r2), abs=1e-9)
    assert ro1 == pytest.approx(np.clip(l2 + r2, -bp.CLIP, bp.CLIP), abs=1e-6)


def test_pe_update_sc_f_limit():
    # zero R inputs: L outputs are the SC f and g(u=0) updates
    l1, l2 = 1.3, -0.4
    lo1, lo2, _, _ = bp.pe_update(l1, l2, 0.0, 0.0)
    assert lo1 == pytest.approx(box_plus_mp(l1, l2), abs=1e-12)
    assert lo2 == pytest.approx(l2, abs=1e-12)


def test_n2_exact_marginals():
    # single PE is a tree: BP equals brute-force marginals
    rng = np.random.default_rng(5)
    for _ in range(20):
        ch = rng.normal(0, 3, 2)
        prior = rng.normal(0, 3, 2)
        state = bp.BpState.zeros(2)
        bc = bp.BoundaryCondition(prior, ch)
        for _ in range(2):
            bp.iterate(state, bc)
        post = np.zeros((2, 2))
        for u in itertools.product([0, 1], repeat=2):
            x = encode(np.array(u)).astype(float)
            w = np.exp(0.5 * np.sum((1 - 2 * x) * ch) + 0.5 * np.sum((1 - 2 * np.array(u)) * prior))
            for i in range(2):
                post[i, u[i]] += w
        exact = np.log(post[:, 0] / post[:, 1]) - prior
        assert bp.posterior(state, 0) - prior == pytest.approx(exact, abs=1e-9)


def test_state_shape_and_zero_fixed_point():
    state = bp.BpState.zeros(64)
    assert state.l_msg.shape == state.r_msg.shape == (7, 64)
    bc = bp.BoundaryCondition(np.zeros(64), np.zeros(64))
    for _ in range(3):
        bp.iterate(state, bc)
    assert not state.l_msg.any() and not state.r_msg.any()


def _frame(N=256, K=128, seed=0):
    spec = construct(N, K)
    rng = np.random.default_rng(seed)
    info = rng.integers(0, 2, K, dtype=np.uint8)
    u = assemble_input(spec, info)
    return spec, u, encode(u), rng


def test_noiseless_one_iteration():
    spec, u, x, _ = _frame()
    state = bp.BpState.zeros(spec.n_total)
    bc = bp.BoundaryCondition(bp.frozen_priors(spec), bp.FROZEN_LLR * (1 - 2.0 * x))
    bp.iterate(state, bc)
    u_hat, x_hat = bp.harden(state, bc)
    assert np.array_equal(u_hat, u) and np.array_equal(x_hat, x)
    assert bp.converged(u_hat, x_hat)


def test_iterate_deterministic_and_bounded():
    spec, u, x, rng = _frame()
    ch = 2 * (1 - 2.0 * x + rng.normal(0, 0.9, x.size)) / 0.81
    bc = bp.BoundaryCondition(bp.frozen_priors(spec), ch)
    a, b = bp.BpState.zeros(256), bp.BpState.zeros(256)
    for _ in range(10):
        bp.iterate(a, bc)
        bp.iterate(b, bc)
    assert a.l_msg.tobytes() == b.l_msg.tobytes() and a.r_msg.tobytes() == b.r_msg.tobytes()
    for m in (a.l_msg, a.r_msg):
        assert not np.isnan(m).any() and np.abs(m).max() <= bp.CLIP


def test_batch_matches_single():
    spec = construct(128, 64)
    rng = np.random.default_rng(1)
    ch = rng.normal(1.0, 1.2, (5, 128)) * 2
    u_b, it_b = bp.bp_decode(spec, ch, 20, early_stop=True)
    for i in range(5):
        u_s, it_s = bp.bp_decode(spec, ch[i], 20, early_stop=True)
        assert np.array_equal(u_s, u_b[i]) and it_s == it_b[i]


def test_harden_ties():
    assert bp.hard([3.2, -0.1, 0.0]).tolist() == [0, 1, 0]


def test_frozen_positions_decide_zero():
    spec = construct(256, 128)
    rng = np.random.default_rng(2)
    info = rng.integers(0, 2, (40, 128), dtype=np.uint8)
    x = encode(assemble_input(spec, info))
    sigma2 = 0.5
    ch = 2 * ((1 - 2.0 * x) + rng.normal(0, np.sqrt(sigma2), x.shape)) / sigma2
    u_hat, _ = bp.bp_decode(spec, ch, 30)
    assert not u_hat[:, list(spec.frozen_set)].any()


def test_converged():
    z = np.zeros(8, dtype=np.uint8)
    assert bp.converged(z, z)
    u = np.random.default_rng(0).integers(0, 2, 8, dtype=np.uint8)
    assert bp.converged(u, encode(u))
    e = z.copy()
    e[-1] = 1
    assert not bp.converged(e, z)


@pytest.mark.parametrize("lengths, count", [
    ([4096], 24576),
    ([256, 4096], 25600),
    ([256, 2048, 1024], 17408),
    ([128] * 4 + [1024] * 4, 22272),
])
def test_pe_count(lengths, count):
    assert bp.pe_count(lengths) == count


def test_pe_count_rejects():
    with pytest.raises(ConfigurationError):
        bp.pe_count([3072])


def test_early_stop_same_decision_on_clean_frames():
    spec, u, x, rng = _frame(512, 256, 4)
    ch = 2 * (1 - 2.0 * x + rng.normal(0, 0.5, x.size)) / 0.25
    full, it_full = bp.bp_decode(spec, ch, 40)
    early, it_early = bp.bp_decode(spec, ch, 40, early_stop=True)
    assert np.array_equal(full, u) and np.array_equal(early, u)
    assert it_early < it_full == 40
