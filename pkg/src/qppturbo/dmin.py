"""Minimum distance and multiplicity of QPP turbo codes.

``exact_dmin`` enumerates every codeword up to a weight cap.  Each codeword
u is reached from the constituent side with the smaller parity weight: its
input weight plus twice that side's parity weight is at most the total
weight, so a depth-first search over one trellis with cost ``input + 2 *
parity`` and an admissible cost-to-go bound visits it.  The other side is then
evaluated in closed form from the sorted interleaved positions.

``estimate_dmin`` searches a restricted set: codewords whose 1-positions split
into short self-terminating events on both encoders.  It also tries the
critical templates from :mod:`qppturbo.patterns`.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .bounds import best_bound, inverse_class_of
from .convcode import ConstituentSpec, TerminationMode, fundamental_paths
from .permpoly import Qpp, inverse, least_inverse_degree, permutation, qc_period
from .turbo import impulse_end_states, turbo_encode

log = logging.getLogger(__name__)

DEFAULT_CAP = 60
NO_BUDGET = 2**62


@dataclass
class DminResult:
    dmin: int | None
    multiplicity: int
    exact: bool
    witnesses: list[list[int]] = field(default_factory=list)
    weight_cap_used: int = 0
    nodes: int = 0
    note: str = ""

    @property
    def found(self) -> bool:
        return self.dmin is not None

    def to_dict(self) -> dict:
        return {
            "dmin": self.dmin,
            "multiplicity": self.multiplicity,
            "exact": self.exact,
            "witnesses": self.witnesses,
            "weight_cap_used": self.weight_cap_used,
            "nodes": self.nodes,
            "note": self.note,
        }


class BudgetExhausted(RuntimeError):
    """Raised when a search runs out of nodes; carries the best result so far."""

    def __init__(self, partial: DminResult):
        super().__init__(f"node budget exhausted (best so far: {partial.dmin})")
        self.partial = partial


@dataclass
class _Tables:
    N: int
    f: np.ndarray
    finv: np.ndarray
    nxt: np.ndarray
    par: np.ndarray
    gp: np.ndarray
    gs: np.ndarray
    ends: np.ndarray
    tb: np.ndarray


def gap_tables(spec: ConstituentSpec, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Parity weight and state after k zero inputs, for every start state."""
    nxt, par = spec.tables
    S = spec.n_states
    gp = np.zeros((S, N + 1), dtype=np.int64)
    gs = np.zeros((S, N + 1), dtype=np.int64)
    for s in range(S):
        st, w = s, 0
        gs[s, 0] = s
        for k in range(1, N + 1):
            w += par[st, 0]
            st = nxt[st, 0]
            gp[s, k] = w
            gs[s, k] = st
    return gp, gs


def cost_to_go(spec: ConstituentSpec, N: int) -> np.ndarray:
    """mc[r, s, z]: least ``input + 2 * parity`` over r steps from state s to state z."""
    nxt, par = spec.tables
    S = spec.n_states
    inf = 1 << 40
    mc = np.full((N + 1, S, S), inf, dtype=np.int64)
    mc[0, np.arange(S), np.arange(S)] = 0
    for r in range(1, N + 1):
        best = np.full((S, S), inf, dtype=np.int64)
        for b in (0, 1):
            c = (b + 2 * par[:, b])[:, None] + mc[r - 1, nxt[:, b], :]
            np.minimum(best, c, out=best)
        mc[r] = best
    return mc


def _tables(q: Qpp, spec: ConstituentSpec, mode: TerminationMode) -> _Tables:
    N = q.modulus
    f = permutation(q).astype(np.int64)
    finv = np.empty(N, dtype=np.int64)
    finv[f] = np.arange(N)
    nxt, par = spec.tables
    gp, gs = gap_tables(spec, N)
    ends = impulse_end_states(spec, N)
    if mode is TerminationMode.DUAL:
        tb = np.array([-1], dtype=np.int64)
    else:
        if N % spec.cycle_length == 0:
            raise ValueError(f"no tailbiting solution exists for N={N} (multiple of {spec.cycle_length})")
        tb = np.zeros(spec.n_states, dtype=np.int64)
        for b in range(spec.n_states):
            tb[b] = _circular_start(spec, N, b)
    return _Tables(N, f, finv, nxt, par, gp, gs, ends, tb)


def _circular_start(spec: ConstituentSpec, N: int, b: int) -> int:
    # start state s with A^N s + b = s; brute force over the 2^nu states
    nxt, _ = spec.tables
    for s in range(spec.n_states):
        st = s
        for _ in range(N % spec.cycle_length):
            st = nxt[st, 0]
        if st ^ b == s:
            return s
    raise AssertionError("tailbiting system should be solvable")


def _upper_shift(q: Qpp) -> int:
    """Upper-index shift matching a lower-time shift by the quasi-cyclic period."""
    P = qc_period(q)
    return (q.f1 * P + q.f2 * P * P) % q.modulus


def exact_dmin(q: Qpp, spec: ConstituentSpec | None = None, mode="dual", weight_cap: int | None = None,
               budget: int | None = None, quasi_cyclic: bool = True, step: int = 4) -> DminResult:
    """Exact minimum distance and multiplicity among codewords of weight <= weight_cap.

    The cap is approached by iterative deepening in increments of ``step``,
    so cheap low caps rule out light codewords before heavier searches run.
    With tailbiting and ``quasi_cyclic`` only codewords through one
    representative position per shift orbit are enumerated and the count is
    scaled by orbit bookkeeping.  Raises :class:`BudgetExhausted` if the node
    budget runs out.
    """
    spec = spec or ConstituentSpec.lte()
    mode = TerminationMode(mode)
    if weight_cap is None:
        weight_cap = default_cap(q, spec)
    if weight_cap < 1:
        raise ValueError("weight_cap must be >= 1")
    budget = NO_BUDGET if budget is None else int(budget)
    tabs = _tables(q, spec, mode)
    mc = cost_to_go(spec, q.modulus)
    caps = list(range(min(weight_cap, 4 * spec.nu + 2), weight_cap, step)) + [weight_cap]
    nodes = 0
    for cap in caps:
        res = _run_exact(q, spec, mode, tabs, mc, cap, budget - nodes, quasi_cyclic)
        nodes += res.nodes
        res.nodes = nodes
        if res.found:
            res.weight_cap_used = weight_cap
            return res
    return DminResult(None, 0, False, [], weight_cap, nodes, "no codeword within the weight cap")


def _run_exact(q, spec, mode, tabs: _Tables, mc, cap, budget, quasi_cyclic) -> DminResult:
    N = q.modulus
    S = spec.n_states
    res = np.array([cap, 0, 0, 0, 0], dtype=np.int64)
    cnt = np.zeros(cap + 2, dtype=np.int64)
    wit = np.zeros((64, cap + 2), dtype=np.int64)
    ident = np.arange(N, dtype=np.int64)
    starts = np.array([0] if mode is TerminationMode.DUAL else list(range(S)), dtype=np.int64)
    sig_u = tabs.ends[tabs.finv]
    sig_l = tabs.ends[tabs.f]
    use_qc = quasi_cyclic and mode is TerminationMode.TAILBITING
    if use_qc:
        period = math.gcd(_upper_shift(q), N)
        forced = [(r, int(tabs.finv[r])) for r in range(period)]
    else:
        period = None
        forced = [(-1, -1)]
    for fu, fl in forced:
        _kernels.side_search(starts, fu, N, mc, tabs.finv, ident, sig_u, tabs.tb, tabs.gp, tabs.gs,
                             tabs.nxt, tabs.par, res, cnt, wit, False, budget)
        _kernels.side_search(starts, fl, N, mc, tabs.f, tabs.f, sig_l, tabs.tb, tabs.gp, tabs.gs,
                             tabs.nxt, tabs.par, res, cnt, wit, True, budget)
        if res[3]:
            break
    found = bool(res[1] > 0 or cnt.any())
    dmin = int(res[0]) if found else None
    if use_qc:
        mult = sum(Fraction(int(c) * (N // period), w) for w, c in enumerate(cnt) if c)
        assert mult.denominator == 1, mult
        mult = int(mult)
    else:
        mult = int(cnt.sum())
    witnesses = [sorted(int(x) for x in wit[k, 1:1 + wit[k, 0]]) for k in range(min(res[1], len(wit)))]
    out = DminResult(dmin, mult, bool(found and not res[3]), witnesses, cap, int(res[2]))
    if res[3]:
        out.note = "node budget exhausted"
        raise BudgetExhausted(out)
    log.debug("exact N=%d cap=%d nodes=%d dmin=%s", N, cap, res[2], dmin)
    return out


def default_cap(q: Qpp, spec: ConstituentSpec) -> int:
    """Best bound for the interleaver's inverse class, else 60."""
    L, _ = least_inverse_degree(q)
    lte = spec == ConstituentSpec.lte()
    rep = best_bound(q.modulus, spec.nu, inverse_class_of(L), spec if lte else None)
    return rep.combined_bound or DEFAULT_CAP


def codeword_weight(q: Qpp, spec: ConstituentSpec, mode, positions) -> int | None:
    """Weight of the codeword with the given upper 1-positions, or None if inadmissible."""
    u = np.zeros(q.modulus, dtype=np.uint8)
    u[list(positions)] = 1
    cw = turbo_encode(q, spec, mode, u)
    return None if cw is None else cw.weight


# --- estimator -------------------------------------------------------------


@dataclass
class EstimatorConfig:
    max_input_weight: int = 7
    event_weights: tuple[int, ...] = (2, 3)
    max_span: int = 32
    weight_cap: int | None = None
    use_patterns: bool = True
    budget: int | None = None
    max_witnesses: int = 1 << 16
    # cap increments for iterative deepening; 0 runs one pass at the full cap
    step: int = 4

    @classmethod
    def for_length(cls, N: int) -> "EstimatorConfig":
        """Defaults that reproduce the exact values on short blocks and scale to long ones."""
        if N <= 256:
            return cls(max_input_weight=8, event_weights=(2, 3, 4, 5, 6), max_span=N - 1)
        # long blocks: plain branch and bound tightens faster than deepening
        return cls(step=0)


def _event_inventory(spec, N, weights, max_span, max_parity):
    events = fundamental_paths(spec, max(weights), min(max_span, N - 1) + 1, max_parity,
                               min_weight=min(weights))
    return [e for e in events if e.input_weight in weights and e.span < N]


def _anchored(events):
    rows = []
    for e in events:
        for j, o in enumerate(e.offsets):
            rows.append(([x - o for k, x in enumerate(e.offsets) if k != j], e.parity_weight))
    rows.sort(key=lambda r: (r[1], len(r[0])))
    K = max((len(r[0]) for r in rows), default=1)
    rel = np.zeros((max(len(rows), 1), max(K, 1)), dtype=np.int64)
    nrel = np.zeros(max(len(rows), 1), dtype=np.int64)
    apar = np.full(max(len(rows), 1), 1 << 40, dtype=np.int64)
    for i, (r, p) in enumerate(rows):
        rel[i, :len(r)] = r
        nrel[i] = len(r)
        apar[i] = p
    return rel, nrel, apar


def _cover_bound(events, size=64):
    # least parity that can cover o positions on one side
    best = {}
    for e in events:
        best[e.input_weight] = min(best.get(e.input_weight, 1 << 40), e.parity_weight)
    lbc = np.zeros(size, dtype=np.int64)
    for o in range(1, size):
        lbc[o] = min((p + lbc[max(0, o - w)] for w, p in best.items()), default=1 << 40)
    return lbc


def estimate_dmin(q: Qpp, spec: ConstituentSpec | None = None, mode="dual",
                  config: EstimatorConfig | None = None) -> DminResult:
    """Upper bound on d_min with a witness, from templates and event covers.

    The event-cover search finds every codeword of weight <= cap whose
    1-positions split into events from the inventory on both encoders and
    whose input weight is at most ``max_input_weight``.  The result is never
    marked exact.
    """
    spec = spec or ConstituentSpec.lte()
    mode = TerminationMode(mode)
    N = q.modulus
    config = config or EstimatorConfig.for_length(N)
    cap = config.weight_cap or max(default_cap(q, spec), DEFAULT_CAP)
    best_w, best_pos = None, []

    if config.use_patterns:
        for w, pos in _pattern_witnesses(q, spec, mode):
            if w <= cap and (best_w is None or w < best_w):
                best_w, best_pos = w, pos
    # the cover search rediscovers template codewords, so its cap stays inclusive
    if best_w is not None:
        cap = min(cap, best_w)

    tabs = _tables(q, spec, mode)
    cover_w, cover_cws, nodes = None, set(), 0
    budget = NO_BUDGET if config.budget is None else int(config.budget)
    # deepen the cap so light codewords are found before the heavy searches
    caps = [cap]
    if config.step > 0:
        caps = list(range(min(cap, 4 * spec.nu + 2), cap, config.step)) + [cap]
    notes = []
    for c in caps:
        w, cws, n, flags = _cover_run(q, tabs, spec, config, c, budget - nodes)
        nodes += n
        notes += flags
        if w is not None or flags:
            cover_w, cover_cws = w, cws
            break
    note = "; ".join(notes)
    if best_w is None and cover_w is None:
        return DminResult(None, 0, False, [], cap, nodes, note or "no codeword found within the cap")
    if cover_w is not None and (best_w is None or cover_w <= best_w):
        if best_w == cover_w:
            cover_cws.add(tuple(best_pos))
        best_w, cws = cover_w, cover_cws
    else:
        cws = {tuple(best_pos)}
    witnesses = [list(c) for c in sorted(cws)]
    return DminResult(best_w, len(witnesses), False, witnesses, cap, nodes, note)


def _cover_run(q, tabs, spec, config, cap, budget):
    N = q.modulus
    events = _event_inventory(spec, N, config.event_weights, config.max_span, cap)
    if not events:
        return None, set(), 0, []
    rel, nrel, apar = _anchored(events)
    lbc = _cover_bound(events, config.max_input_weight + 2)
    # closed structures are evaluated at every shift by the period, which
    # is exact in either termination mode
    P = qc_period(q)
    res = np.array([cap, 0, 0, 0, 0], dtype=np.int64)
    cnt = np.zeros(config.max_input_weight + 2, dtype=np.int64)
    wit = np.zeros((config.max_witnesses, config.max_input_weight + 1), dtype=np.int64)
    roots = np.arange(P, dtype=np.int64)
    _kernels.cover_search(roots, tabs.f, tabs.finv, N, P, config.max_input_weight, rel, nrel, apar,
                          lbc, tabs.ends, tabs.ends, tabs.tb, tabs.gp, tabs.gs, tabs.nxt, tabs.par,
                          res, cnt, wit, budget)
    flags = []
    if res[3]:
        flags.append("node budget exhausted")
    if res[4]:
        flags.append("witness store full, multiplicity truncated")
    if not res[1]:
        return None, set(), int(res[2]), flags
    cws = {tuple(int(x) for x in wit[k, 1:1 + wit[k, 0]]) for k in range(min(res[1], len(wit)))}
    return int(res[0]), cws, int(res[2]), flags


def _pattern_witnesses(q: Qpp, spec: ConstituentSpec, mode: TerminationMode):
    from .patterns import all_patterns, place_pattern

    if mode is not TerminationMode.DUAL:
        return
    try:
        L, _ = least_inverse_degree(q)
        if L > 6:
            return
        g = inverse(q)
    except ValueError:
        return
    for p in all_patterns(q, g, spec):
        u = place_pattern(p, q, g, spec.nu)
        if u is None or not u.any():
            continue
        cw = turbo_encode(q, spec, mode, u)
        if cw is not None:
            yield cw.weight, [int(i) for i in np.flatnonzero(u)]


# --- regression against the embedded table --------------------------------


@dataclass
class RegressionRow:
    N: int
    f1: int
    f2: int
    expected_dmin: int
    expected_mult: int
    dmin: int | None
    multiplicity: int | None
    method: str
    passed: bool | None
    note: str = ""

    def to_dict(self):
        return dict(self.__dict__)


def lte_regression(rows, exact_max_n: int = 128, estimate_max_n: int = 0, budget: int | None = None,
                   spec: ConstituentSpec | None = None, threads: int = 1) -> list[RegressionRow]:
    """Compare computed values with table rows ``(N, f1, f2, dmin, mult)``.

    Rows with N <= exact_max_n are searched exactly and must match both values;
    rows up to estimate_max_n get the estimator, which must match d_min and
    may report a smaller multiplicity.  Other rows are skipped (passed=None),
    as are rows whose search runs out of budget (note says so).
    """
    spec = spec or ConstituentSpec.lte()

    def one(row):
        N, f1, f2, d, m = row
        q = Qpp(N, f1, f2)
        try:
            if N <= exact_max_n:
                r = exact_dmin(q, spec, "dual", budget=budget)
                ok = r.dmin == d and r.multiplicity == m
                return RegressionRow(N, f1, f2, d, m, r.dmin, r.multiplicity, "exact", ok)
            if N <= estimate_max_n:
                r = estimate_dmin(q, spec, "dual", _with_budget(EstimatorConfig.for_length(N), budget))
                ok = r.dmin == d and r.multiplicity <= m
                return RegressionRow(N, f1, f2, d, m, r.dmin, r.multiplicity, "estimate", ok, r.note)
        except BudgetExhausted as exc:
            p = exc.partial
            return RegressionRow(N, f1, f2, d, m, p.dmin, p.multiplicity, "exact", None, "node budget exhausted")
        return RegressionRow(N, f1, f2, d, m, None, None, "skipped", None)

    rows = [r.as_tuple() if hasattr(r, "as_tuple") else tuple(r) for r in rows]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, rows))
    return [one(r) for r in rows]


def _with_budget(config: EstimatorConfig, budget):
    if budget is not None:
        config.budget = int(budget)
    return config


def _env_budget() -> int | None:
    v = os.environ.get("QPP_BUDGET_NODES")
    return int(v) if v else None
