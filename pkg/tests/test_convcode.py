import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qppturbo.convcode import (
    ConstituentSpec, encode_from_state, encode_tailbiting, fundamental_paths, tailbiting_state,
    weight2_event_weight,
)

LTE = ConstituentSpec.lte()
NU2 = ConstituentSpec(2, 0b111, 0b101)
NU4 = ConstituentSpec(4, 0b10011, 0b11011)


def shift_register_reference(fb, ff, nu, bits, state_bits):
    """Direct delay-line model: a[t] = u[t] + sum fb_k a[t-k], p[t] = sum ff_k a[t-k]."""
    hist = list(state_bits)  # hist[j] = a[t-1-j]
    out = []
    for u in bits:
        a = u
        for k in range(1, nu + 1):
            if (fb >> k) & 1:
                a ^= hist[k - 1]
        p = a
        for k in range(1, nu + 1):
            if (ff >> k) & 1:
                p ^= hist[k - 1]
        out.append(p)
        hist = [a] + hist[:-1]
    return out, hist


@pytest.mark.parametrize("spec", [LTE, NU2, NU4])
def test_encoder_matches_delay_line(spec):
    rng = np.random.default_rng(1)
    for _ in range(20):
        bits = rng.integers(0, 2, 50)
        s = int(rng.integers(0, spec.n_states))
        hist = [(s >> j) & 1 for j in range(spec.nu)]
        ref, end_hist = shift_register_reference(spec.feedback_taps, spec.feedforward_taps, spec.nu, bits, hist)
        par, end = encode_from_state(spec, bits, s)
        assert par.tolist() == ref
        assert end == sum(b << j for j, b in enumerate(end_hist))


def test_zero_input():
    par, end = encode_from_state(LTE, np.zeros(30, dtype=np.uint8), 0)
    assert not par.any() and end == 0


def test_weight2_events_lte():
    u = np.zeros(12, dtype=np.uint8)
    u[[0, 7]] = 1
    par, end = encode_from_state(LTE, u, 0)
    assert (int(par.sum()), end) == (6, 0)
    u = np.zeros(20, dtype=np.uint8)
    u[[0, 14]] = 1
    par, end = encode_from_state(LTE, u, 0)
    assert (int(par.sum()), end) == (10, 0)


def test_weight2_event_weight_examples():
    assert weight2_event_weight(LTE, 1) == 6
    assert weight2_event_weight(LTE, 2) == 10
    assert weight2_event_weight(NU4, 1) == 10


@pytest.mark.parametrize("spec", [NU2, LTE, NU4])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_weight2_parity_formula(spec, k):
    sep = k * spec.cycle_length
    u = np.zeros(sep + 5, dtype=np.uint8)
    u[[0, sep]] = 1
    par, end = encode_from_state(spec, u, 0)
    assert end == 0
    assert int(par.sum()) == 2 + k * 2 ** (spec.nu - 1)
    assert weight2_event_weight(spec, k) == 2 + k * 2 ** (spec.nu - 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(0, 2**32), st.sampled_from([NU2, LTE, NU4]))
def test_gf2_linearity(n, seed, spec):
    rng = np.random.default_rng(seed)
    u, v = rng.integers(0, 2, (2, n))
    s, t = rng.integers(0, spec.n_states, 2)
    pu, eu = encode_from_state(spec, u, int(s))
    pv, ev = encode_from_state(spec, v, int(t))
    pw, ew = encode_from_state(spec, u ^ v, int(s) ^ int(t))
    assert np.array_equal(pw, pu ^ pv)
    assert ew == eu ^ ev


@pytest.mark.parametrize("spec", [NU2, LTE, NU4])
def test_feedback_register_is_maximal(spec):
    nxt, _ = spec.tables
    s, seen = 1, set()
    while s not in seen:
        seen.add(s)
        s = int(nxt[s, 0])
    assert len(seen) == spec.cycle_length and 0 not in seen


def test_non_primitive_rejected():
    with pytest.raises(ValueError):
        ConstituentSpec(3, 0b1111, 0b1011)
    with pytest.raises(ValueError):
        ConstituentSpec(3, 0b1101, 0b0011)


def test_tailbiting_examples():
    assert not encode_tailbiting(LTE, np.zeros(40, dtype=np.uint8)).any()
    u = np.zeros(40, dtype=np.uint8)
    u[[0, 7]] = 1
    assert np.array_equal(encode_tailbiting(LTE, u), encode_from_state(LTE, u, 0)[0])


def test_tailbiting_singular_when_period_divides_length():
    u = np.zeros(42, dtype=np.uint8)
    u[3] = 1
    assert tailbiting_state(LTE, u) is None
    assert encode_tailbiting(LTE, u) is None
    u = np.zeros(43, dtype=np.uint8)
    u[3] = 1
    assert encode_tailbiting(LTE, u) is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(8, 80), st.integers(0, 2**32))
def test_tailbiting_start_equals_end(n, seed):
    if n % 7 == 0:
        return
    u = np.random.default_rng(seed).integers(0, 2, n)
    s0 = tailbiting_state(LTE, u)
    _, end = encode_from_state(LTE, u, s0)
    assert end == s0


@settings(max_examples=40, deadline=None)
@given(st.integers(8, 80), st.integers(0, 2**32), st.integers(0, 79))
def test_tailbiting_shift_equivariance(n, seed, k):
    if n % 7 == 0:
        return
    u = np.random.default_rng(seed).integers(0, 2, n)
    k %= n
    assert np.array_equal(encode_tailbiting(LTE, np.roll(u, k)), np.roll(encode_tailbiting(LTE, u), k))


def test_fundamental_paths_self_terminate():
    events = fundamental_paths(LTE, 3, 33, 50)
    assert events
    for e in events:
        u = np.zeros(e.span + 3, dtype=np.uint8)
        u[list(e.offsets)] = 1
        par, end = encode_from_state(LTE, u, 0)
        assert end == 0
        assert int(par.sum()) == e.parity_weight
        # does not touch state 0 before its end
        s = 0
        for t in range(e.span - 1):
            s = int(LTE.tables[0][s, u[t]])
            assert s != 0
    assert any(e.offsets == (0, 8, 12) and e.parity_weight == 7 for e in events)
