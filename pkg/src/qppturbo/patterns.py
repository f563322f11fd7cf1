"""Critical low-input-weight codeword templates for QPP turbo codes.

A template is a set of constituent fundamental paths on both encoders whose
systematic 1-positions are tied together through the interleaver.  Positions
are given in the upper (natural-order) index space; the lower encoder sees
position i at time g(i), where g is the inverse permutation.  Each template is
a codeword exactly when one closing congruence holds; the congruence reduces
to a polynomial condition in (f1, f2, g1, ..., gL) that does not depend on
where the template is anchored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convcode import ConstituentSpec, fundamental_paths, weight2_event_weight
from .permpoly import PermPoly, Qpp
from .turbo import turbo_encode

LTE_B, LTE_C = 8, 12


@dataclass
class CriticalPattern:
    template: str
    params: dict
    anchor: int
    input_positions: list[int]
    # fundamental paths as (start, span) in upper index space and lower time space
    upper_paths: list[tuple[int, int]]
    lower_paths: list[tuple[int, int]]
    predicted_weight_cap: int
    congruence_holds: bool
    residues: dict = field(default_factory=dict)

    @property
    def input_weight(self) -> int:
        return len(self.input_positions)

    def wraps(self, N: int) -> bool:
        return any(s + span >= N for s, span in self.upper_paths + self.lower_paths)

    def input_word(self, N: int) -> np.ndarray:
        u = np.zeros(N, dtype=np.uint8)
        for i in self.input_positions:
            u[i % N] ^= 1
        return u


def _check_inverse(q: Qpp, g: PermPoly):
    if g.modulus != q.modulus:
        raise ValueError("inverse has a different modulus")
    for x in (0, 1, 2, q.modulus - 1, q.modulus // 3):
        if g(q(x)) != x % q.modulus:
            raise ValueError(f"{g} does not invert {q}")


def _coef(g: PermPoly, k: int) -> int:
    return g.coeffs[k - 1] if k <= len(g.coeffs) else 0


class _Builder:
    """Collects paths while a template is traced through f and g.

    Upper paths live in upper index space, lower paths in lower time space;
    upper index i is seen by the lower encoder at time g(i), and lower time t
    carries upper index f(t).
    """

    def __init__(self, q: Qpp, g: PermPoly):
        self.N = q.modulus
        self.upper = []
        self.lower = []
        self.inputs = []

    def up(self, i: int, offsets) -> list[int]:
        lo = min(offsets)
        members = [(i + o) % self.N for o in offsets]
        self.upper.append(((i + lo) % self.N, max(offsets) - lo))
        self.inputs += members
        return members

    def lo(self, t: int, offsets) -> list[int]:
        lo = min(offsets)
        self.lower.append(((t + lo) % self.N, max(offsets) - lo))
        return [(t + o) % self.N for o in offsets]


def _trace_two_triple(q, g, x, a, b, c):
    # two upper (0, b, c) paths; three lower pairs of span a
    B = _Builder(q, g)
    first = B.up(x, (0, b, c))
    ends = [q(B.lo(g(i), (0, a))[1]) for i in first]
    second = B.up(ends[0], (0, b, c))
    return B, sorted(second) == sorted(ends)


def _trace_six_triple(q, g, x, b, c):
    # three (0, b, c) paths on each encoder
    B = _Builder(q, g)
    first = B.up(x, (0, b, c))
    rows = [B.lo(g(i), (0, b, c)) for i in first]
    closes = True
    for k in (1, 2):
        members = [q(r[k]) for r in rows]
        path = B.up(members[0], (0, b, c))
        closes &= sorted(path) == sorted(members)
    return B, closes


def _trace_pair_square(q, g, x, a, b, c, d):
    # upper pairs of spans a and d, lower pairs of spans c and b
    B = _Builder(q, g)
    N = q.modulus
    p, r = B.up(x, (0, a))
    w1 = q(B.lo(g(p), (0, c))[1])
    w2 = q(B.lo(g(r), (0, b))[1])
    B.up(w1, (0, d))
    return B, (w2 - w1) % N == d % N


def _trace_pair_chain(q, g, x, a):
    # x is a lower time; lower pairs a, 2a, a and upper pairs a, 2a, a
    B = _Builder(q, g)
    N = q.modulus
    t0, t1 = B.lo(x, (0, a))
    e1 = B.up(q(t0), (0, a))[1]
    e2 = B.up(q(t1), (0, 2 * a))[1]
    s1 = q(B.lo(g(e1), (0, 2 * a))[1])
    s2 = q(B.lo(g(e2), (0, a))[1])
    B.up(s1, (0, a))
    return B, (s2 - s1) % N == a % N


def _trace_pair_chain_mirror(q, g, x, a):
    # x is a lower time; lower pairs a, 2a, a and upper pairs 2a, a, a
    B = _Builder(q, g)
    N = q.modulus
    t0, t1 = B.lo(x, (0, a))
    e1 = B.up(q(t0), (0, 2 * a))[1]
    e2 = B.up(q(t1), (0, a))[1]
    s1 = q(B.lo(g(e1), (0, -a))[1])
    s2 = q(B.lo(g(e2), (0, -2 * a))[1])
    B.up(s2, (0, a))
    return B, (s1 - s2) % N == a % N


def _pattern(template, params, x, traced, cap, holds, N, residues=None):
    B, closes = traced
    return CriticalPattern(
        template=template,
        params=dict(params),
        anchor=x % N,
        input_positions=list(B.inputs),
        upper_paths=list(B.upper),
        lower_paths=list(B.lower),
        predicted_weight_cap=cap,
        congruence_holds=holds,
        residues=dict(residues or {}, closes=closes),
    )


def _w3(spec: ConstituentSpec, b: int, c: int) -> int:
    for ev in fundamental_paths(spec, 3, c + 2, 64, min_weight=3):
        if ev.offsets == (0, b, c):
            return ev.parity_weight
    raise ValueError(f"(0, {b}, {c}) is not a fundamental path")


# --- congruence residues (anchored at 0) ---------------------------------


def two_triple_residues(q: Qpp, g: PermPoly, l: int) -> tuple[int, int]:
    """Residues of 2 a f2 g(b) and 2 a f2 g(c) with a = 7 * 2^l."""
    N, a = q.modulus, 7 * 2**l
    return (2 * a * q.f2 * g(LTE_B)) % N, (2 * a * q.f2 * g(LTE_C)) % N


def six_triple_residues(q: Qpp, g: PermPoly) -> tuple[int, ...]:
    N, f2 = q.modulus, q.f2
    return tuple((2 * s * f2 * g(t)) % N for s in (LTE_B, LTE_C) for t in (LTE_B, LTE_C))


def pair_square_residue(q: Qpp, g: PermPoly, a: int, b: int, c: int, d: int) -> int:
    N, f1, f2 = q.modulus, q.f1, q.f2
    return ((b * b - c * c) * f2 + (b - c) * f1 + a - d + 2 * b * f2 * g(a)) % N


def pair_chain_residue(q: Qpp, g: PermPoly, a: int) -> int:
    N, f1, f2 = q.modulus, q.f1, q.f2
    return (4 * a**3 * f2 * _coef(g, 2) * (1 + 2 * f1 + 2 * a * f2)) % N


def pair_chain_mirror_residue(q: Qpp, g: PermPoly, a: int) -> int:
    N, f1, f2 = q.modulus, q.f1, q.f2
    return (4 * a**3 * f2 * _coef(g, 2) * (1 - 2 * f1 - 2 * a * f2)) % N


def pair_chain_cubic_residue(q: Qpp, g: PermPoly, a: int) -> int:
    N, f1, f2 = q.modulus, q.f1, q.f2
    g2, g3 = _coef(g, 2), _coef(g, 3)
    return (4 * a**3 * f2 * (g2 * (1 + 2 * f1 + 2 * a * f2) + 3 * g3 * a * (1 + f1 + a * f2) ** 2)) % N


# --- template checks -------------------------------------------------------


def two_triple_check(q: Qpp, g: PermPoly, l: int = 0, x: int = 0,
               spec: ConstituentSpec | None = None) -> CriticalPattern | None:
    """Input-weight-6 template: two upper (0, 8, 12) paths and three lower pairs of span 7 * 2^l."""
    spec = spec or ConstituentSpec.lte()
    if spec != ConstituentSpec.lte():
        raise NotImplementedError("this template is defined for the LTE constituent pair only")
    _check_inverse(q, g)
    a = 7 * 2**l
    res = two_triple_residues(q, g, l)
    holds = res == (0, 0)
    if not holds:
        return None
    cap = 6 + 3 * weight2_event_weight(spec, 2**l) + 2 * _w3(spec, LTE_B, LTE_C)
    return _pattern("two_triple", {"a": a, "b": LTE_B, "c": LTE_C, "l": l}, x,
                    _trace_two_triple(q, g, x, a, LTE_B, LTE_C), cap, holds, q.modulus,
                    {"r_b": res[0], "r_c": res[1]})


def six_triple_check(q: Qpp, g: PermPoly, x: int = 0,
               spec: ConstituentSpec | None = None) -> CriticalPattern | None:
    """Input-weight-9 template: three (0, 8, 12) paths on each encoder."""
    spec = spec or ConstituentSpec.lte()
    if spec != ConstituentSpec.lte():
        raise NotImplementedError("this template is defined for the LTE constituent pair only")
    _check_inverse(q, g)
    res = six_triple_residues(q, g)
    holds = not any(res)
    if not holds:
        return None
    cap = 9 + 6 * _w3(spec, LTE_B, LTE_C)
    return _pattern("six_triple", {"b": LTE_B, "c": LTE_C}, x, _trace_six_triple(q, g, x, LTE_B, LTE_C),
                    cap, holds, q.modulus, dict(zip(("r_bb", "r_bc", "r_cb", "r_cc"), res)))


# (|a'|, |b'|) for each row of the weight-4 template table
PAIR_SQUARE_ROWS = ((1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1))


def pair_square_cap(nu: int, ap: int, bp: int) -> int:
    return 12 + 2**nu * (ap + bp)


def pair_square_check(q: Qpp, g: PermPoly, row: int, x: int = 0,
               spec: ConstituentSpec | None = None) -> CriticalPattern | None:
    """Input-weight-4 template with c = b, d = a, a = +-a'(2^nu - 1), b = +-b'(2^nu - 1).

    ``row`` indexes PAIR_SQUARE_ROWS from 1.  All four sign choices are tried and the
    first one whose congruence holds is returned.
    """
    spec = spec or ConstituentSpec.lte()
    _check_inverse(q, g)
    ap, bp = PAIR_SQUARE_ROWS[row - 1]
    m = spec.cycle_length
    for sa in (1, -1):
        for sb in (1, -1):
            a, b = sa * ap * m, sb * bp * m
            r = pair_square_residue(q, g, a, b, b, a)
            if r == 0:
                cap = pair_square_cap(spec.nu, ap, bp)
                return _pattern("pair_square", {"a": a, "b": b, "c": b, "d": a, "row": row}, x,
                                _trace_pair_square(q, g, x, a, b, b, a), cap, True, q.modulus, {"closing": r})
    return None


def pair_chain_cap(nu: int) -> int:
    return 2 * (2 ** (nu + 1) + 9)


def pair_chain_check(q: Qpp, g2: PermPoly, x: int = 0,
                spec: ConstituentSpec | None = None) -> CriticalPattern | None:
    """Input-weight-6 templates built from weight-2 paths of spans a, 2a, a (a = 2^nu - 1).

    The chain template is returned when its congruence holds, else the mirror
    template.  If both hold and the chain cancels to zero at every anchor, the
    mirror is returned instead.
    """
    spec = spec or ConstituentSpec.lte()
    _check_inverse(q, g2)
    if g2.degree > 2:
        raise ValueError("expected an inverse of degree at most two")
    a = spec.cycle_length
    cap = pair_chain_cap(spec.nu)
    res = {"chain": pair_chain_residue(q, g2, a), "mirror": pair_chain_mirror_residue(q, g2, a)}
    found = []
    if res["chain"] == 0:
        found.append(_pattern("pair_chain", {"a": a}, x, _trace_pair_chain(q, g2, x, a), cap, True, q.modulus, res))
    if res["mirror"] == 0:
        found.append(_pattern("pair_chain_mirror", {"a": a}, x, _trace_pair_chain_mirror(q, g2, x, a), cap, True,
                              q.modulus, res))
    # when both close, skip a template that cancels to zero at every anchor
    for p in found:
        if q.modulus < wrap_free_threshold(p) or place_pattern(p, q, g2) is not None:
            return p
    return found[0] if found else None


def pair_chain_cubic_check(q: Qpp, g: PermPoly, x: int = 0,
                     spec: ConstituentSpec | None = None) -> CriticalPattern | None:
    """The span a, 2a, a template when the inverse has degree three."""
    spec = spec or ConstituentSpec.lte()
    _check_inverse(q, g)
    if g.degree > 3:
        raise ValueError("expected an inverse of degree at most three")
    a = spec.cycle_length
    r = pair_chain_cubic_residue(q, g, a)
    if r:
        return None
    return _pattern("pair_chain", {"a": a, "cubic": True}, x, _trace_pair_chain(q, g, x, a), pair_chain_cap(spec.nu),
                    True, q.modulus, {"cubic_chain": r})


_TRACERS = {
    "two_triple": lambda q, g, x, p: _trace_two_triple(q, g, x, p["a"], p["b"], p["c"]),
    "six_triple": lambda q, g, x, p: _trace_six_triple(q, g, x, p["b"], p["c"]),
    "pair_square": lambda q, g, x, p: _trace_pair_square(q, g, x, p["a"], p["b"], p["c"], p["d"]),
    "pair_chain": lambda q, g, x, p: _trace_pair_chain(q, g, x, p["a"]),
    "pair_chain_mirror": lambda q, g, x, p: _trace_pair_chain_mirror(q, g, x, p["a"]),
}


def retrace(p: CriticalPattern, q: Qpp, g: PermPoly, x: int) -> CriticalPattern:
    """The same template anchored at x; ``residues['closes']`` is the direct check there."""
    traced = _TRACERS[p.template](q, g, x, p.params)
    return _pattern(p.template, p.params, x, traced, p.predicted_weight_cap, p.congruence_holds,
                    q.modulus, {k: v for k, v in p.residues.items() if k != "closes"})


def total_span(p: CriticalPattern) -> int:
    return sum(span for _, span in p.upper_paths + p.lower_paths)


def wrap_free_threshold(p: CriticalPattern) -> int:
    """Smallest N for which some anchor keeps every path inside the block."""
    return total_span(p) + 1


def place_pattern(p: CriticalPattern, q: Qpp, g: PermPoly, nu: int | None = None) -> np.ndarray | None:
    """Input word of the first anchor (scanning upwards from 0) with no wrapping path.

    Coinciding positions cancel; the word is still the sum of the template's
    paths, so its weight stays within the cap, but anchors where everything
    cancels (as with a reducible QPP) are skipped.  Returns None when N is
    below the wrap-free threshold of the template or no anchor qualifies.
    """
    if not p.congruence_holds:
        return None
    N = q.modulus
    if N < wrap_free_threshold(p):
        return None
    for x in range(N):
        cand = retrace(p, q, g, x)
        if cand.residues["closes"] and not cand.wraps(N):
            u = cand.input_word(N)
            if u.any():
                return u
    return None


def encode_pattern(p: CriticalPattern, q: Qpp, g: PermPoly, spec: ConstituentSpec | None = None):
    """Place and dual-terminate a template; returns the codeword or None."""
    spec = spec or ConstituentSpec.lte()
    u = place_pattern(p, q, g, spec.nu)
    if u is None or not u.any():
        return None
    return turbo_encode(q, spec, "dual", u)


def all_patterns(q: Qpp, g: PermPoly, spec: ConstituentSpec | None = None, l_max: int = 2):
    """Every template whose congruence holds for this interleaver and inverse."""
    spec = spec or ConstituentSpec.lte()
    out = []
    lte = spec == ConstituentSpec.lte()
    if lte:
        for l in range(l_max + 1):
            p = two_triple_check(q, g, l, spec=spec)
            if p:
                out.append(p)
        p = six_triple_check(q, g, spec=spec)
        if p:
            out.append(p)
    for row in range(1, len(PAIR_SQUARE_ROWS) + 1):
        p = pair_square_check(q, g, row, spec=spec)
        if p:
            out.append(p)
    if g.degree <= 2:
        p = pair_chain_check(q, g, spec=spec)
    elif g.degree == 3:
        p = pair_chain_cubic_check(q, g, spec=spec)
    else:
        p = None
    if p:
        out.append(p)
    return out
