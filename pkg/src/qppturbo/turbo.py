"""Rate-1/3 parallel concatenation of two identical constituent encoders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convcode import ConstituentSpec, TerminationMode, encode_from_state, encode_tailbiting
from .permpoly import Qpp, permutation


@dataclass
class TurboCodeword:
    systematic: np.ndarray
    parity_upper: np.ndarray
    parity_lower: np.ndarray
    termination: TerminationMode

    @property
    def weight(self) -> int:
        return int(self.systematic.sum()) + int(self.parity_upper.sum()) + int(self.parity_lower.sum())

    def bits(self) -> np.ndarray:
        return np.concatenate([self.systematic, self.parity_upper, self.parity_lower])


def interleave(q: Qpp, bits, inverse: bool = False) -> np.ndarray:
    """Lower encoder input: ``v[t] = u[f(t)]``, or ``u[f^-1(t)]`` with ``inverse``."""
    perm = permutation(q)
    u = np.asarray(bits)
    if inverse:
        out = np.empty_like(u)
        out[perm] = u
        return out
    return u[perm]


def turbo_encode(q: Qpp, spec: ConstituentSpec, mode, bits, inverse_interleave: bool = False):
    """Encode ``bits``; returns None if the termination cannot be met."""
    mode = TerminationMode(mode)
    u = np.asarray(bits, dtype=np.uint8)
    if u.ndim != 1 or len(u) != q.modulus:
        raise ValueError(f"input length {u.shape} does not match N={q.modulus}")
    v = interleave(q, u, inverse_interleave)
    if mode is TerminationMode.DUAL:
        p1, s1 = encode_from_state(spec, u, 0)
        p2, s2 = encode_from_state(spec, v, 0)
        if s1 or s2:
            return None
    else:
        p1 = encode_tailbiting(spec, u)
        p2 = encode_tailbiting(spec, v)
        if p1 is None or p2 is None:
            return None
    return TurboCodeword(u.copy(), p1, p2, mode)


def impulse_end_states(spec: ConstituentSpec, N: int) -> np.ndarray:
    """End state after N clocks from state 0 for a single 1 at time t."""
    nxt, _ = spec.tables
    out = np.zeros(N, dtype=np.int64)
    # walk backwards: impulse at N-1 ends in step(0,1); earlier ones get more zero clocks
    s = int(nxt[0, 1])
    for t in range(N - 1, -1, -1):
        out[t] = s
        s = int(nxt[s, 0])
    return out


@dataclass
class DualConstraints:
    """Linear map u -> (upper end state, lower end state) over GF(2).

    ``signatures[i]`` packs the contribution of a 1 at input position i as
    ``upper | lower << nu``; an input terminates both trellises iff the XOR of
    its signatures is zero.
    """

    nu: int
    signatures: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """2 nu x N binary matrix whose kernel is the set of admissible inputs."""
        rows = [(self.signatures >> j) & 1 for j in range(2 * self.nu)]
        return np.array(rows, dtype=np.uint8)

    @property
    def rank(self) -> int:
        basis = []
        for v in sorted(set(int(x) for x in self.signatures)):
            for b in basis:
                v = min(v, v ^ b)
            if v:
                basis.append(v)
        return len(basis)

    def syndrome(self, bits) -> int:
        idx = np.flatnonzero(np.asarray(bits))
        acc = 0
        for x in self.signatures[idx].tolist():
            acc ^= x
        return acc

    def satisfied(self, bits) -> bool:
        return self.syndrome(bits) == 0


def dual_constraints(q: Qpp, spec: ConstituentSpec, N: int | None = None,
                     inverse_interleave: bool = False) -> DualConstraints:
    N = q.modulus if N is None else N
    if N != q.modulus:
        raise ValueError("length does not match the interleaver")
    ends = impulse_end_states(spec, N)
    perm = permutation(q)
    lower_time = np.empty(N, dtype=np.int64)
    if inverse_interleave:
        lower_time = perm.copy()
    else:
        lower_time[perm] = np.arange(N)
    sig = ends | (ends[lower_time] << spec.nu)
    return DualConstraints(spec.nu, sig)
