"""Permutation polynomials over the integer ring Z_N.

Quadratic permutation polynomials (QPPs) ``f(x) = f1*x + f2*x**2 mod N`` and
their polynomial inverses, together with the number-theoretic helpers they
need (prime factorization, validity, irreducibility, least inverse degree).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_MODULUS = 2**50

# increments of the 2*3*5 wheel, starting from 7
_WHEEL = (4, 2, 4, 2, 4, 6, 2, 6)


class Factorization(dict):
    """Prime -> exponent map of a positive integer.

    Absent primes have exponent 0, so ``fac[p]`` is always safe to read.
    """

    def __missing__(self, p):
        return 0

    @property
    def value(self) -> int:
        return math.prod(p**e for p, e in self.items())

    @property
    def radical(self) -> int:
        return math.prod(self)

    def __repr__(self):
        return "Factorization(%s)" % dict.__repr__(self)


def factorize(n: int) -> Factorization:
    """Exact prime factorization of ``1 <= n <= 2**50`` by wheel trial division."""
    n = int(n)
    if not 1 <= n <= MAX_MODULUS:
        raise ValueError(f"n={n} outside [1, 2**50]")
    fac = Factorization()
    for p in (2, 3, 5):
        while n % p == 0:
            fac[p] += 1
            n //= p
    p = 7
    i = 0
    while p * p <= n:
        while n % p == 0:
            fac[p] += 1
            n //= p
        p += _WHEEL[i]
        i = (i + 1) % 8
    if n > 1:
        fac[n] += 1
    return fac


def valuation(n: int, p: int) -> int:
    """Exponent of the prime p in n (n > 0)."""
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _check_modulus(N):
    if not 2 <= N <= MAX_MODULUS:
        raise ValueError(f"modulus N={N} outside [2, 2**50]")


def is_quadratic_pp(N: int, f1: int, f2: int) -> bool:
    """Coefficient test for ``f1*x + f2*x**2`` to permute Z_N.

    ``f2 == 0`` is not quadratic and is rejected; a linear polynomial is a
    permutation iff ``gcd(f1, N) == 1`` (see :meth:`Qpp.is_permutation`).
    """
    _check_modulus(N)
    f1 %= N
    f2 %= N
    if f2 == 0:
        return False
    fac = factorize(N)
    if fac[2] != 1:
        return math.gcd(f1, N) == 1 and all(f2 % p == 0 for p in fac)
    # N = 2 * odd
    if (f1 + f2) % 2 == 0 or math.gcd(f1, N // 2) != 1:
        return False
    return all(f2 % p == 0 for p in fac if p != 2)


def count_valid_pairs(N: int) -> int:
    """Number of pairs (f1, f2) in [0, N)**2 with ``f2 != 0`` that give a QPP."""
    _check_modulus(N)
    fac = factorize(N)
    if fac[2] != 1:
        # gcd(f1, N) = 1 and rad(N) | f2
        return _totient(fac) * (N // fac.radical - 1)
    # N = 2M, M odd: f1 ranges over units of M with parity opposite to f2,
    # which is phi(M) choices for each admissible f2
    odd = Factorization({p: e for p, e in fac.items() if p != 2})
    return _totient(odd) * (N // odd.radical - 1)


def _totient(fac: Factorization) -> int:
    return math.prod(p ** (e - 1) * (p - 1) for p, e in fac.items())


def _poly_eval(coeffs, N, xs):
    """Horner evaluation of sum(c_k x^k, k=1..L) mod N over an int array."""
    if N < 2**31:
        acc = np.zeros_like(xs)
        for c in reversed(coeffs):
            acc = (acc + c) % N
            acc = (acc * xs) % N
        return acc
    out = []
    for x in xs.tolist():
        acc = 0
        for c in reversed(coeffs):
            acc = (acc + c) * x % N
        out.append(acc)
    return np.array(out, dtype=object)


@dataclass(frozen=True)
class PermPoly:
    """Polynomial ``g1*x + ... + gL*x**L`` over Z_N (no constant term)."""

    modulus: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.modulus)
        cs = tuple(int(c) % self.modulus for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            cs = (0,)
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) if self.coeffs != (0,) else 0

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc + c) * x % self.modulus
        return acc

    def evaluate(self, xs=None) -> np.ndarray:
        if xs is None:
            xs = np.arange(self.modulus, dtype=np.int64)
        return _poly_eval(self.coeffs, self.modulus, np.asarray(xs))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs, start=1):
            if c:
                terms.append(("" if c == 1 else str(c)) + "x" + (f"^{k}" if k > 1 else ""))
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class Qpp:
    """``f(x) = f1*x + f2*x**2 mod N``; coefficients are reduced into [0, N)."""

    modulus: int
    f1: int
    f2: int

    def __post_init__(self):
        _check_modulus(self.modulus)
        object.__setattr__(self, "f1", int(self.f1) % self.modulus)
        object.__setattr__(self, "f2", int(self.f2) % self.modulus)

    @property
    def N(self) -> int:
        return self.modulus

    @property
    def coeffs(self) -> tuple[int, int]:
        return (self.f1, self.f2)

    @cached_property
    def is_valid(self) -> bool:
        """True when the quadratic coefficient test passes."""
        return is_quadratic_pp(self.modulus, self.f1, self.f2)

    @property
    def is_permutation(self) -> bool:
        if self.f2 == 0:
            return math.gcd(self.f1, self.modulus) == 1
        return self.is_valid

    def __call__(self, x: int) -> int:
        return (self.f1 + self.f2 * x) * x % self.modulus

    def evaluate(self, xs=None) -> np.ndarray:
        if xs is None:
            xs = np.arange(self.modulus, dtype=np.int64)
        return _poly_eval(self.coeffs, self.modulus, np.asarray(xs))

    def as_permpoly(self) -> PermPoly:
        return PermPoly(self.modulus, self.coeffs)

    def __str__(self):
        return f"{self.f1}x + {self.f2}x^2 (mod {self.modulus})"


def is_irreducible(q: Qpp) -> bool:
    """A QPP is irreducible (not equivalent to any LPP) iff N / gcd(2 f2, N) != 1."""
    return q.f2 != 0 and qc_period(q) != 1


def qc_period(q: Qpp) -> int:
    """Quasi-cyclic period N / gcd(2 f2, N) of the tailbiting turbo code."""
    return q.modulus // math.gcd(2 * q.f2, q.modulus)


def _phi_factorization(k: int) -> Factorization:
    # phi(k) = k (k+1) ... (2k-2); phi(1) is the empty product
    fac = Factorization()
    for m in range(k, 2 * k - 1):
        for p, e in factorize(m).items():
            fac[p] += e
    return fac


def _required_f2_exponent(n_N: int, p: int, L: int) -> int:
    """Least exponent of p in f2 that allows an inverse of degree L."""
    n_phi = _phi_factorization(L + 1)[p]
    if p == 2 and n_N <= 1:
        return 0
    if p != 2 and n_N == 0:
        return 0
    return max(-((n_phi - n_N) // L), 1)


def required_f2_exponents(N: int, L: int) -> Factorization:
    """Per-prime minimum exponents of f2 for an inverse of degree <= L to exist."""
    fac = factorize(N)
    req = Factorization()
    for p, n in fac.items():
        e = _required_f2_exponent(n, p, L)
        if e:
            req[p] = e
    return req


def least_inverse_degree(q: Qpp) -> tuple[int, int]:
    """Smallest inverse degree L and the number ``prod gcd(k!, N)`` of such inverses."""
    if not q.is_permutation:
        raise ValueError(f"{q} is not a permutation polynomial")
    N = q.modulus
    fac = factorize(N)
    L = 1
    while True:
        ok = True
        for p, n in fac.items():
            have = valuation(q.f2, p) if q.f2 else n
            if have < _required_f2_exponent(n, p, L):
                ok = False
                break
        if ok:
            break
        L += 1
    count = math.prod(math.gcd(math.factorial(k), N) for k in range(1, L + 1))
    return L, count


# --- inverse construction -------------------------------------------------


def _solve_mod_prime_power(rows, rhs, p, e):
    """Particular solution and null-space generators of A g = b over Z/p^e.

    Returns None if the system is inconsistent.  Elimination always pivots on
    the entry of least p-adic valuation in the remaining block, which keeps
    every step invertible over the local ring.
    """
    mod = p**e
    A = [[a % mod for a in r] for r in rows]
    b = [v % mod for v in rhs]
    ncol = len(A[0]) if A else 0
    pivots = []  # (row, col, valuation)
    r0 = 0
    cols = list(range(ncol))
    for _ in range(ncol):
        best = None
        for i in range(r0, len(A)):
            for j in cols:
                if A[i][j]:
                    v = valuation(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[r0], A[i] = A[i], A[r0]
        b[r0], b[i] = b[i], b[r0]
        unit = A[r0][j] // p**v
        inv = pow(unit, -1, mod)
        A[r0] = [a * inv % mod for a in A[r0]]
        b[r0] = b[r0] * inv % mod
        # A[r0][j] == p^v now; clear column j elsewhere
        for k in range(len(A)):
            if k != r0 and A[k][j]:
                factor = A[k][j] // p**v
                A[k] = [(x - factor * y) % mod for x, y in zip(A[k], A[r0])]
                b[k] = (b[k] - factor * b[r0]) % mod
        pivots.append((r0, j, v))
        cols.remove(j)
        r0 += 1
    for k in range(r0, len(A)):
        if b[k]:
            return None
    # back substitution with free columns set to zero
    g = [0] * ncol
    for r, j, v in reversed(pivots):
        s = b[r] - sum(A[r][c] * g[c] for c in range(ncol) if c != j)
        s %= mod
        if s % p**v:
            return None
        g[j] = (s // p**v) % mod
    return g


def _null_polys(N: int, L: int):
    """Generators of the polynomials of degree <= L, zero constant, vanishing on Z_N.

    Uses the falling-factorial basis: ``(N/gcd(k!, N)) * x(x-1)...(x-k+1)``.
    """
    gens = []
    for k in range(1, L + 1):
        m = N // math.gcd(math.factorial(k), N)
        if m == N:
            continue
        # expand m * x(x-1)...(x-k+1)
        poly = [1]
        for r in range(k):
            nxt = [0] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= r * c
            poly = nxt
        coeffs = [(m * c) % N for c in poly[1 : L + 1]]
        coeffs += [0] * (L - len(coeffs))
        gens.append((N // m, coeffs))
    return gens


def _particular_inverse(q: Qpp, L: int):
    N = q.modulus
    fac = factorize(N)
    parts = []
    for p, e in fac.items():
        mod = p**e
        ys = [q(x) % mod for x in range(mod)]
        rows = [[pow(y, k, mod) for k in range(1, L + 1)] for y in ys]
        sol = _solve_mod_prime_power(rows, list(range(mod)), p, e)
        if sol is None:
            return None
        parts.append((mod, sol))
    coeffs = []
    for k in range(L):
        x = 0
        for mod, sol in parts:
            m = N // mod
            x += sol[k] * m * pow(m, -1, mod)
        coeffs.append(x % N)
    return coeffs


def all_inverses(q: Qpp, L: int, limit: int = 1 << 16) -> list[PermPoly]:
    """Every inverse polynomial of degree <= L (as coefficient vectors mod N).

    Raises if the count exceeds ``limit``.
    """
    base = _particular_inverse(q, L)
    if base is None:
        return []
    N = q.modulus
    gens = _null_polys(N, L)
    total = math.prod(order for order, _ in gens)
    if total > limit:
        raise ValueError(f"{total} inverses exceed limit {limit}")
    seen = set()
    for ks in itertools.product(*(range(order) for order, _ in gens)):
        c = list(base)
        for kk, (_, gen) in zip(ks, gens):
            c = [(a + kk * g) % N for a, g in zip(c, gen)]
        seen.add(tuple(c))
    return [PermPoly(N, c) for c in sorted(seen)]


def find_inverse(q: Qpp, L: int) -> PermPoly | None:
    """An inverse g with ``g(f(x)) = x`` for all x and degree <= L, or None.

    Among all such inverses the coefficient-wise lexicographically smallest
    (g1, g2, ...) one is returned, so the answer is deterministic.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not q.is_permutation:
        raise ValueError(f"{q} is not a permutation polynomial")
    base = _particular_inverse(q, L)
    if base is None:
        return None
    try:
        return all_inverses(q, L)[0]
    except ValueError:
        return PermPoly(q.modulus, base)


def inverse(q: Qpp) -> PermPoly:
    """Least-degree inverse polynomial of a QPP."""
    L, _ = least_inverse_degree(q)
    g = find_inverse(q, L)
    assert g is not None
    return g


def permutation(poly: Qpp | PermPoly) -> np.ndarray:
    """Index map ``x -> poly(x)`` over Z_N; raises if it is not a bijection."""
    values = poly.evaluate()
    N = poly.modulus
    if isinstance(poly, Qpp) and not poly.is_permutation:
        raise ValueError(f"{poly} is not a permutation polynomial")
    values = np.asarray(values, dtype=np.int64)
    seen = np.zeros(N, dtype=bool)
    seen[values] = True
    if not seen.all():
        raise ValueError(f"{poly} is not a permutation polynomial")
    return values
