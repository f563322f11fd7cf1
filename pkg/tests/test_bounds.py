import pytest
from hypothesis import given
from hypothesis import strategies as st

from qppturbo.bounds import (
    any_class_bound, best_bound, class_min_f2, cubic_class_bound, cubic_universal_bound, iter_any_class_bound,
    nine_input_bound, nine_input_class_bound, quadratic_class_bound, quadratic_universal_bound,
    weight4_table_bounds,
)
from qppturbo.convcode import ConstituentSpec
from qppturbo.permpoly import Qpp, factorize, is_quadratic_pp, least_inverse_degree


def test_any_class_examples():
    assert any_class_bound(496) == (0, 38)
    assert any_class_bound(1696) == (1, 50)
    assert any_class_bound(1008) is None
    assert dict(factorize(1008)) == {2: 4, 3: 2, 7: 1}


def test_any_class_iterator_lists_all_l():
    pairs = list(iter_any_class_bound(1696, l_max=3))
    assert pairs == [(1, 50), (2, 62), (3, 74)]


def test_nine_input_examples():
    assert nine_input_bound(2112) == 51
    assert nine_input_bound(6016) is None
    assert nine_input_bound(4288) == 51


def test_quadratic_universal_examples():
    assert quadratic_universal_bound(3) == 50
    assert quadratic_universal_bound(4) == 82
    assert quadratic_universal_bound(2) == 34


def test_quadratic_class_examples():
    assert quadratic_class_bound(1376) == (0, 38)
    assert quadratic_class_bound(896) == (1, 50)
    assert quadratic_class_bound(40) == (0, 38)


def test_cubic_class_examples():
    assert cubic_class_bound(496) == (0, 38)
    assert cubic_class_bound(1504) == (1, 50)
    assert cubic_class_bound(1008) is None


def test_cubic_universal_examples():
    assert cubic_universal_bound(496, 3) == 50
    assert cubic_universal_bound(2048, 3) is None
    assert cubic_universal_bound(40, 3) == 50


def test_table_examples():
    assert (28, 1) in weight4_table_bounds(28, "any")
    assert weight4_table_bounds(64, "quadratic") == []
    assert (44, 4) in weight4_table_bounds(252, "any")
    with pytest.raises(ValueError):
        weight4_table_bounds(40, "cubic")


def test_weight9_examples():
    assert nine_input_class_bound(5504, "cubic") == 51
    assert nine_input_class_bound(6016, "cubic") == 51
    assert nine_input_class_bound(40, "quadratic") == 51


def test_class_min_f2_is_minimal():
    # every f2 admissible for the class at N is a multiple of class_min_f2
    for N, cls, L in [(5504, "cubic", 3), (6016, "cubic", 3), (2048, "quadratic", 2), (96, "quadratic", 2)]:
        m = class_min_f2(N, cls)
        admissible = [f2 for f2 in range(1, N) if is_quadratic_pp(N, 1, f2) or is_quadratic_pp(N, 2, f2)]
        in_class = []
        for f2 in admissible:
            f1 = 1 if is_quadratic_pp(N, 1, f2) else 2
            if least_inverse_degree(Qpp(N, f1, f2))[0] <= L:
                in_class.append(f2)
        assert in_class and all(f2 % m == 0 for f2 in in_class)
        assert m in in_class


def test_best_bound_examples():
    assert best_bound(5504, 3, "quadratic").combined_bound == 50
    assert best_bound(496, 3, "any").combined_bound == 38


def test_best_bound_6144_cubic():
    rep = best_bound(6144, 3, "cubic")
    # neither the nine-input condition nor the cubic length-independent caps
    # hold, so only the cubic class bound at l = 5 applies
    applicable = {e.rule: e.bound for e in rep.entries if e.applicable}
    assert "nine_input_class" not in applicable and "cubic_universal" not in applicable
    assert rep.combined_bound == 98
    assert 51 <= rep.combined_bound


def test_best_bound_non_lte_uses_length_independent_bound_only():
    spec = ConstituentSpec(4, 0b10011, 0b11011)
    rep = best_bound(40, 4, "quadratic", spec)
    assert {e.rule for e in rep.entries} == {"quadratic_universal"}
    assert rep.combined_bound == 82
    rep = best_bound(40, 4, "any", spec)
    assert rep.combined_bound is None


def test_cubic_universal_flag():
    assert any(e.rule == "cubic_universal" for e in best_bound(496, 3, "cubic").entries)
    rep = best_bound(496, 3, "cubic", use_cubic_universal=False)
    assert not any(e.rule == "cubic_universal" for e in rep.entries)


def test_bad_arguments():
    with pytest.raises(ValueError):
        best_bound(40, 3, "quartic")
    with pytest.raises(ValueError):
        best_bound(40, 7, "any")


def test_report_roundtrip():
    rep = best_bound(1696, 3, "any")
    d = rep.to_dict()
    assert d["combined_bound"] == min(e["bound"] for e in d["entries"] if e["applicable"])
    assert d["entries"][0]["params"] == {"l": 1}


@given(st.integers(0, 12), st.integers(0, 12), st.sampled_from([1, 5, 11, 15, 31, 77]))
def test_any_class_monotone_in_power_of_two(a, b, odd):
    lo, hi = sorted((a, b))
    r1, r2 = any_class_bound(2**lo * odd), any_class_bound(2**hi * odd)
    if r1 is not None and r2 is not None:
        assert r1[0] <= r2[0]


@given(st.integers(8, 10**6))
def test_quadratic_class_never_looser(N):
    q = best_bound(N, 3, "quadratic").combined_bound
    a = best_bound(N, 3, "any").combined_bound
    if q is not None and a is not None:
        assert q <= a


@given(st.integers(8, 10**6), st.sampled_from(["any", "quadratic", "cubic"]))
def test_bounds_are_pure(N, cls):
    assert best_bound(N, 3, cls).to_dict() == best_bound(N, 3, cls).to_dict()


def test_cubic_class_cap_solves_exponent_inequality():
    # n_2 <= l + 3 + max(ceil((n_2 - 3) / 3), 1) has largest solution floor(3l/2) + 4
    for l in range(12):
        ok = [n for n in range(2, 60) if n <= l + 3 + max(-(-(n - 3) // 3), 1)]
        assert max(ok) == 3 * l // 2 + 4
    # exact d_min 51 at these cubic-inverse lengths rules out a 50 cap at l = 1
    for N in (4288, 4544, 6080):
        assert cubic_class_bound(N) == (2, 62)
