"""Upper bounds on the best achievable minimum distance of QPP turbo codes.

Every bound is a function of the prime factorization of N, the encoder memory
nu and the inverse-degree class of the interleavers considered.  The bounds
marked LTE-only assume feedback 1 + D^2 + D^3 and feedforward 1 + D + D^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .convcode import ConstituentSpec
from .permpoly import factorize, required_f2_exponents

INVERSE_CLASSES = ("any", "quadratic", "cubic")
_CLASS_DEGREE = {"quadratic": 2, "cubic": 3}


def _caps_hold(fac, caps: dict, other: int) -> bool:
    return all(e <= caps.get(p, other) for p, e in fac.items())


def iter_any_class_bound(N: int, l_max: int = 64):
    """All (l, 38 + 12 l) pairs with n_2 <= l + 4, n_7 <= 2 and n_p <= 1 otherwise."""
    fac = factorize(N)
    for l in range(l_max + 1):
        if _caps_hold(fac, {2: l + 4, 7: 2}, 1):
            yield l, 38 + 12 * l


def any_class_bound(N: int):
    return next(iter_any_class_bound(N), None)


def nine_input_bound(N: int):
    """51 when n_2 <= 6, n_3 <= 2 and n_p <= 1 for every other prime."""
    return 51 if _caps_hold(factorize(N), {2: 6, 3: 2}, 1) else None


def quadratic_universal_bound(nu: int) -> int:
    """Length-independent bound for QPPs with a quadratic inverse."""
    return 2 * (2 ** (nu + 1) + 9)


def iter_quadratic_class_bound(N: int, l_max: int = 64):
    fac = factorize(N)
    for l in range(l_max + 1):
        if _caps_hold(fac, {2: 2 * l + 5, 7: 3}, 1):
            yield l, 38 + 12 * l


def quadratic_class_bound(N: int):
    """Quadratic-inverse class: n_2 <= 2l + 5, n_7 <= 3, n_p <= 1 otherwise."""
    return next(iter_quadratic_class_bound(N), None)


def iter_cubic_class_bound(N: int, l_max: int = 64):
    fac = factorize(N)
    for l in range(l_max + 1):
        # largest n_2 with n_2 <= l + 3 + max(ceil((n_2 - 3) / 3), 1)
        if _caps_hold(fac, {2: 3 * l // 2 + 4, 7: 2}, 1):
            yield l, 38 + 12 * l


def cubic_class_bound(N: int):
    """Cubic-inverse class: n_2 <= floor(3l/2) + 4, n_7 <= 2, n_p <= 1 otherwise."""
    return next(iter_cubic_class_bound(N), None)


def cubic_universal_bound(N: int, nu: int):
    """Cubic-inverse class bound 2 (2^(nu+1) + 9) under per-prime exponent caps.

    Odd primes p are capped at ceil(9 n_p(2^nu - 1) / 2) + 2, the same for
    p in {3, 5} and for the remaining primes.
    """
    fac = factorize(N)
    m = factorize(2**nu - 1)
    for p, e in fac.items():
        cap = 4 if p == 2 else -(-9 * m[p] // 2) + 2
        if e > cap:
            return None
    return quadratic_universal_bound(nu)


# (n_2 cap, n_3 cap, n_7 cap, other cap, bound, pattern rows)
TABLE_ANY = (
    (2, 1, 3, 1, 28, "(1,1)"),
    (3, 1, 3, 1, 36, "(1,2),(2,1)"),
    (4, 1, 3, 1, 44, "(2,2)"),
    (2, 2, 3, 1, 44, "(1,3),(3,1)"),
)
TABLE_QUADRATIC = (
    (2, 1, 5, 1, 28, "(1,1)"),
    (3, 1, 5, 1, 36, "(1,2),(2,1)"),
    (5, 1, 5, 1, 44, "(2,2)"),
    (2, 2, 5, 1, 44, "(1,3),(3,1)"),
)


def weight4_table_bounds(N: int, inverse_class: str = "any") -> list[tuple[int, int]]:
    """(bound, row) for every applicable row of the nu = 3 weight-4 pattern tables.

    Rows are numbered from 1.
    """
    if inverse_class not in ("any", "quadratic"):
        raise ValueError("table bounds exist for classes 'any' and 'quadratic' only")
    rows = TABLE_QUADRATIC if inverse_class == "quadratic" else TABLE_ANY
    fac = factorize(N)
    out = []
    for i, (c2, c3, c7, co, bound, _) in enumerate(rows, start=1):
        if _caps_hold(fac, {2: c2, 3: c3, 7: c7}, co):
            out.append((bound, i))
    return out


def class_min_f2(N: int, inverse_class) -> int:
    """Smallest f2 (as a product of prime powers) admissible for the class.

    Combines the validity requirement (every odd prime of N, and 2 unless
    N = 2 * odd, divides f2) with the least-degree exponent requirements for
    an inverse of degree L.  Every admissible f2 of the class is a multiple.
    """
    fac = factorize(N)
    exps = {p: 1 for p in fac if not (p == 2 and fac[2] == 1)}
    L = _class_degree(inverse_class)
    if L is not None:
        for p, e in required_f2_exponents(N, L).items():
            exps[p] = max(exps.get(p, 0), e)
    return math.prod(p ** min(e, fac[p]) for p, e in exps.items())


def _class_degree(inverse_class):
    if inverse_class == "any":
        return None
    if isinstance(inverse_class, int):
        return inverse_class
    if inverse_class in _CLASS_DEGREE:
        return _CLASS_DEGREE[inverse_class]
    raise ValueError(f"unknown inverse class {inverse_class!r}")


def nine_input_class_bound(N: int, inverse_class) -> int | None:
    """51 if 96 f2 = 0 mod N for every f2 the class admits at this N.

    ``inverse_class`` is 'any', 'quadratic', 'cubic' or an integer degree L
    (interleavers whose inverse degree is at most L).
    """
    return 51 if (96 * class_min_f2(N, inverse_class)) % N == 0 else None


@dataclass
class BoundEntry:
    rule: str
    applicable: bool
    bound: int | None
    params: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    N: int
    nu: int
    inverse_class: str
    entries: list[BoundEntry]

    @property
    def combined_bound(self) -> int | None:
        vals = [e.bound for e in self.entries if e.applicable and e.bound is not None]
        return min(vals) if vals else None

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "nu": self.nu,
            "inverse_class": self.inverse_class,
            "combined_bound": self.combined_bound,
            "entries": [
                {"rule": e.rule, "applicable": e.applicable, "bound": e.bound, "params": e.params}
                for e in self.entries
            ],
        }


def _is_lte(spec: ConstituentSpec | None, nu: int) -> bool:
    if spec is None:
        return nu == 3
    return spec == ConstituentSpec.lte()


def best_bound(N: int, nu: int = 3, inverse_class: str = "any",
               spec: ConstituentSpec | None = None, use_cubic_universal: bool = True) -> BoundReport:
    """Evaluate every bound that applies to the class and take the minimum."""
    if inverse_class not in INVERSE_CLASSES:
        raise ValueError(f"unknown inverse class {inverse_class!r}")
    if not 2 <= nu <= 6:
        raise ValueError("nu must be in 2..6")
    lte = _is_lte(spec, nu)
    entries = []

    def add(name, value, **params):
        if isinstance(value, tuple):
            params["l"] = value[0]
            value = value[1]
        entries.append(BoundEntry(name, value is not None, value, params))

    if lte:
        add("any_class", any_class_bound(N))
        add("nine_input", nine_input_bound(N))
        for bound, row in weight4_table_bounds(N, "any"):
            add("table_any", bound, table_row=row)
        add("nine_input_class", nine_input_class_bound(N, inverse_class), inverse_class=inverse_class)
    if inverse_class == "quadratic":
        add("quadratic_universal", quadratic_universal_bound(nu), nu=nu)
        if lte:
            add("quadratic_class", quadratic_class_bound(N))
            for bound, row in weight4_table_bounds(N, "quadratic"):
                add("table_quadratic", bound, table_row=row)
    if inverse_class == "cubic":
        if lte:
            add("cubic_class", cubic_class_bound(N))
        if use_cubic_universal:
            add("cubic_universal", cubic_universal_bound(N, nu), nu=nu)
    return BoundReport(N, nu, inverse_class, entries)


def inverse_class_of(L: int) -> str:
    """Bound class for an interleaver whose least inverse degree is L."""
    return {1: "quadratic", 2: "quadratic", 3: "cubic"}.get(L, "any")


__all__ = [
    "BoundEntry", "BoundReport", "any_class_bound", "best_bound", "class_min_f2", "cubic_class_bound",
    "cubic_universal_bound", "inverse_class_of", "iter_any_class_bound", "iter_cubic_class_bound",
    "iter_quadratic_class_bound", "nine_input_bound", "nine_input_class_bound", "quadratic_class_bound",
    "quadratic_universal_bound", "weight4_table_bounds",
]
