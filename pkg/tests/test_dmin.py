import itertools

import numpy as np
import pytest

from qppturbo.convcode import ConstituentSpec
from qppturbo.dmin import (
    BudgetExhausted, EstimatorConfig, codeword_weight, cost_to_go, default_cap, estimate_dmin, exact_dmin,
    gap_tables, lte_regression,
)
from qppturbo.permpoly import Qpp
from qppturbo.turbo import dual_constraints, turbo_encode

LTE = ConstituentSpec.lte()


def code_basis(q, mode):
    """Codeword bit vectors (as Python ints) for a basis of the admissible inputs."""
    N = q.modulus
    if mode == "dual":
        # GF(2) elimination on the syndrome signatures: a position whose
        # signature reduces to zero closes a kernel vector of the constraints
        pivots, inputs = {}, []
        for i, sig in enumerate(dual_constraints(q, LTE).signatures):
            v, used = int(sig), 1 << i
            for bit in sorted(pivots, reverse=True):
                if (v >> bit) & 1:
                    v ^= pivots[bit][0]
                    used ^= pivots[bit][1]
            if v:
                pivots[v.bit_length() - 1] = (v, used)
            else:
                inputs.append(used)
    else:
        inputs = [1 << i for i in range(N)]
    basis = []
    for mask in inputs:
        u = np.array([(mask >> i) & 1 for i in range(N)], dtype=np.uint8)
        cw = turbo_encode(q, LTE, mode, u)
        assert cw is not None
        basis.append(int("".join(map(str, cw.bits()[::-1].tolist())), 2))
    return basis


def brute_force_spectrum(q, mode):
    """(d_min, multiplicity) by Gray-code enumeration of the whole code."""
    basis = code_basis(q, mode)
    best, count, cur = None, 0, 0
    for k in range(1, 1 << len(basis)):
        cur ^= basis[(k & -k).bit_length() - 1]
        w = cur.bit_count()
        if best is None or w < best:
            best, count = w, 1
        elif w == best:
            count += 1
    return best, count


def test_code_basis_spans_admissible_inputs():
    q = Qpp(16, 3, 4)
    assert len(code_basis(q, "dual")) == 16 - 6


@pytest.mark.parametrize("N,f1,f2", [(16, 3, 4), (18, 5, 6), (20, 3, 10), (24, 5, 6)])
def test_exact_matches_brute_force_dual(N, f1, f2):
    q = Qpp(N, f1, f2)
    r = exact_dmin(q, LTE, "dual", weight_cap=40)
    assert (r.dmin, r.multiplicity) == brute_force_spectrum(q, "dual")
    assert r.exact


@pytest.mark.parametrize("N,f1,f2", [(16, 3, 4), (18, 5, 6), (20, 3, 10)])
def test_exact_matches_brute_force_tailbiting(N, f1, f2):
    q = Qpp(N, f1, f2)
    expected = brute_force_spectrum(q, "tailbiting")
    for qc in (True, False):
        r = exact_dmin(q, LTE, "tailbiting", weight_cap=40, quasi_cyclic=qc)
        assert (r.dmin, r.multiplicity) == expected


def test_exact_lte_40():
    r = exact_dmin(Qpp(40, 3, 10))
    assert (r.dmin, r.multiplicity, r.exact) == (17, 11, True)


def test_exact_lte_48():
    r = exact_dmin(Qpp(48, 7, 12))
    assert (r.dmin, r.multiplicity) == (17, 16)


def test_cap_below_dmin_finds_nothing():
    r = exact_dmin(Qpp(40, 3, 10), weight_cap=5)
    assert not r.found and r.multiplicity == 0 and r.weight_cap_used == 5


def test_bad_cap():
    with pytest.raises(ValueError):
        exact_dmin(Qpp(40, 3, 10), weight_cap=0)


def test_tailbiting_rejects_multiple_of_period():
    with pytest.raises(ValueError):
        exact_dmin(Qpp(56, 3, 14), LTE, "tailbiting")


@pytest.mark.parametrize("N,f1,f2", [(32, 3, 8), (40, 3, 10), (48, 7, 12), (60, 7, 30), (64, 7, 16)])
def test_quasi_cyclic_counting_agrees(N, f1, f2):
    q = Qpp(N, f1, f2)
    a = exact_dmin(q, LTE, "tailbiting", weight_cap=30, quasi_cyclic=True)
    b = exact_dmin(q, LTE, "tailbiting", weight_cap=30, quasi_cyclic=False)
    assert (a.dmin, a.multiplicity) == (b.dmin, b.multiplicity)


@pytest.mark.parametrize("mode", ["dual", "tailbiting"])
def test_witnesses_reencode(mode):
    q = Qpp(64, 7, 16)
    r = exact_dmin(q, LTE, mode, weight_cap=30)
    assert r.witnesses
    for w in r.witnesses:
        assert codeword_weight(q, LTE, mode, w) == r.dmin


def test_deterministic():
    q = Qpp(56, 19, 42)
    assert exact_dmin(q).to_dict() | {"nodes": 0} == exact_dmin(q).to_dict() | {"nodes": 0}
    assert estimate_dmin(q).to_dict() == estimate_dmin(q).to_dict()


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted) as info:
        exact_dmin(Qpp(128, 15, 32), budget=1000)
    assert "budget" in info.value.partial.note


@pytest.mark.parametrize("N,f1,f2", [(40, 3, 10), (64, 7, 16), (72, 5, 18), (96, 11, 24)])
def test_sandwich(N, f1, f2):
    q = Qpp(N, f1, f2)
    exact = exact_dmin(q)
    est = estimate_dmin(q)
    assert exact.dmin <= est.dmin <= default_cap(q, LTE)
    assert codeword_weight(q, LTE, "dual", est.witnesses[0]) == est.dmin


def test_estimator_light_config():
    q = Qpp(2048, 21, 128)
    r = estimate_dmin(q, LTE, "dual", EstimatorConfig(step=0))
    assert r.dmin is not None and r.dmin <= 50 and not r.exact
    assert codeword_weight(q, LTE, "dual", r.witnesses[0]) == r.dmin


def test_gap_tables_match_encoder():
    gp, gs = gap_tables(LTE, 20)
    nxt, par = LTE.tables
    for s in range(8):
        st, w = s, 0
        for k in range(1, 21):
            w += int(par[st, 0])
            st = int(nxt[st, 0])
            assert (gp[s, k], gs[s, k]) == (w, st)


def test_cost_to_go_brute_force():
    mc = cost_to_go(LTE, 6)
    nxt, par = LTE.tables
    for r in range(7):
        for s in range(8):
            best = {}
            for bits in itertools.product((0, 1), repeat=r):
                st, c = s, 0
                for b in bits:
                    c += b + 2 * int(par[st, b])
                    st = int(nxt[st, b])
                best[st] = min(best.get(st, 1 << 40), c)
            for z in range(8):
                assert mc[r, s, z] == best.get(z, 1 << 40)


def test_regression_small_rows():
    rows = [(40, 3, 10, 17, 11), (48, 7, 12, 17, 16), (504, 55, 84, 38, 1)]
    out = lte_regression(rows, exact_max_n=64)
    assert [r.passed for r in out] == [True, True, None]
    assert out[2].method == "skipped"
    bad = lte_regression([(40, 3, 10, 18, 11)], exact_max_n=64)
    assert bad[0].passed is False
    short = lte_regression([(128, 15, 32, 21, 51)], budget=1000)
    assert short[0].passed is None and "budget" in short[0].note
