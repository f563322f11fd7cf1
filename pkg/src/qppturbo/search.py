"""Exhaustive search over the QPPs of one length.

Phase one bounds every candidate from above with the estimator.  Phase two
runs the exact search on the candidates whose estimate is not below the best
exact distance seen so far, in decreasing order of estimate.  A candidate is
only dropped on a concrete codeword lighter than a distance some other QPP
is known to reach exactly.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .bounds import BoundReport, best_bound, inverse_class_of
from .convcode import ConstituentSpec
from .dmin import BudgetExhausted, DminResult, EstimatorConfig, default_cap, estimate_dmin, exact_dmin
from .permpoly import Qpp, factorize, is_irreducible, is_quadratic_pp, least_inverse_degree

log = logging.getLogger(__name__)

_CLASS_MAX_DEGREE = {"any": None, "quadratic": 2, "cubic": 3}


@dataclass
class SearchConfig:
    N: int
    irreducible_only: bool = True
    # 'any', 'quadratic' (inverse degree <= 2), 'cubic' (<= 3)
    inverse_class: str = "any"
    # keep only QPPs whose least inverse degree is at least this
    min_inverse_degree: int | None = None
    weight_cap: int | None = None
    budget: int | None = None
    # exact evaluation is attempted only up to this length
    exact_max_n: int = 256
    # at most this many candidates get the exact search (None: no limit)
    exact_top: int | None = None
    mode: str = "dual"
    spec: ConstituentSpec = field(default_factory=ConstituentSpec.lte)
    estimator: EstimatorConfig | None = None
    threads: int | None = None

    def __post_init__(self):
        if self.inverse_class not in _CLASS_MAX_DEGREE:
            raise ValueError(f"unknown inverse class {self.inverse_class!r}")
        if self.N < 8:
            raise ValueError("search needs N >= 8")


@dataclass
class SearchHit:
    qpp: Qpp
    result: DminResult
    bound: BoundReport
    inverse_degree: int

    def sort_key(self):
        d = self.result.dmin if self.result.dmin is not None else 1 << 30
        # unresolved candidates sort first so the exact phase reaches them
        return (-d, self.result.multiplicity, self.qpp.f2, self.qpp.f1)

    def to_dict(self) -> dict:
        return {
            "N": self.qpp.modulus,
            "f1": self.qpp.f1,
            "f2": self.qpp.f2,
            "dmin": self.result.dmin,
            "multiplicity": self.result.multiplicity,
            "exact": self.result.exact,
            "bound": self.bound.combined_bound,
            "inverse_degree": self.inverse_degree,
        }


def _degree_for_f2(N: int, f2: int) -> int:
    # the least inverse degree depends on f2 only; any unit f1 will do
    f1 = 1 if is_quadratic_pp(N, 1, f2) else 2
    return least_inverse_degree(Qpp(N, f1, f2))[0]


def _degree_ok(L: int, config: SearchConfig) -> bool:
    top = _CLASS_MAX_DEGREE[config.inverse_class]
    if top is not None and L > top:
        return False
    return config.min_inverse_degree is None or L >= config.min_inverse_degree


def enumerate_qpps(config: SearchConfig):
    """Yield every admissible QPP of length N passing the filters, once each."""
    N = config.N
    fac = factorize(N)
    # every odd prime of N divides f2, and 2 does too unless N = 2 * odd
    step = 1
    for p in fac:
        if p != 2 or fac[2] > 1:
            step *= p
    for f2 in range(step, N, step):
        if config.irreducible_only and N // math.gcd(2 * f2, N) == 1:
            continue
        L = None
        for f1 in range(1, N):
            if not is_quadratic_pp(N, f1, f2):
                continue
            if L is None:
                L = _degree_for_f2(N, f2)
                if not _degree_ok(L, config):
                    break
            q = Qpp(N, f1, f2)
            if config.irreducible_only and not is_irreducible(q):
                continue
            yield q


def _threads(config: SearchConfig) -> int:
    return config.threads or os.cpu_count() or 1


def run_search(config: SearchConfig) -> list[SearchHit]:
    """Evaluate every candidate and rank by (d_min desc, multiplicity asc, f2 asc, f1 asc)."""
    spec = config.spec
    lte = spec == ConstituentSpec.lte()
    cands = list(enumerate_qpps(config))
    log.info("N=%d: %d candidates", config.N, len(cands))
    if not cands:
        return []
    bound_cache: dict[int, tuple[int, BoundReport]] = {}

    def bound_of(q):
        if q.f2 not in bound_cache:
            L = _degree_for_f2(q.modulus, q.f2)
            bound_cache[q.f2] = (L, best_bound(q.modulus, spec.nu, inverse_class_of(L), spec if lte else None))
        return bound_cache[q.f2]

    # screening only needs concrete witnesses, so the light default inventory will do
    est_cfg = config.estimator or EstimatorConfig()
    if config.weight_cap is not None:
        est_cfg = EstimatorConfig(**{**est_cfg.__dict__, "weight_cap": config.weight_cap})
    if config.budget is not None:
        est_cfg = EstimatorConfig(**{**est_cfg.__dict__, "budget": config.budget})

    def estimate(q):
        return estimate_dmin(q, spec, config.mode, est_cfg)

    with ThreadPoolExecutor(_threads(config)) as pool:
        estimates = list(pool.map(estimate, cands))
    hits = []
    for q, r in zip(cands, estimates):
        L, rep = bound_of(q)
        hits.append(SearchHit(q, r, rep, L))

    if config.N <= config.exact_max_n:
        _exact_phase(hits, config)
    hits.sort(key=SearchHit.sort_key)
    return hits


def _exact_phase(hits: list[SearchHit], config: SearchConfig):
    order = sorted(hits, key=SearchHit.sort_key)
    best = None
    done = 0
    for h in order:
        est = h.result.dmin
        if est is None:
            est = default_cap(h.qpp, config.spec)
        if best is not None and est < best:
            # a concrete codeword of weight est < best rules it out
            break
        if config.exact_top is not None and done >= config.exact_top:
            break
        try:
            r = exact_dmin(h.qpp, config.spec, config.mode, weight_cap=est, budget=config.budget)
        except BudgetExhausted as exc:
            log.warning("exact search for %s ran out of budget", h.qpp)
            h.result.note = exc.partial.note
            continue
        done += 1
        if r.found:
            h.result = r
            best = r.dmin if best is None else max(best, r.dmin)


__all__ = ["SearchConfig", "SearchHit", "enumerate_qpps", "run_search"]
