"""Rate-1 recursive systematic convolutional constituent encoder.

Tap masks hold polynomial coefficients with bit k for D**k.  The register
state is a nu-bit integer whose bit j holds the feedback bit from j+1 steps
ago, so bit 0 is the most recent one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np


class TerminationMode(str, Enum):
    TAILBITING = "tailbiting"
    DUAL = "dual"


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class ConstituentSpec:
    nu: int
    feedback_taps: int
    feedforward_taps: int

    def __post_init__(self):
        nu = self.nu
        if nu < 1:
            raise ValueError("nu must be >= 1")
        for name, taps in (("feedback", self.feedback_taps), ("feedforward", self.feedforward_taps)):
            if taps >> (nu + 1) or not (taps >> nu) & 1 or not taps & 1:
                raise ValueError(f"{name} taps {taps:#b} must have degree {nu} with D^0 and D^{nu} set")
        if not self.is_primitive():
            raise ValueError(f"feedback taps {self.feedback_taps:#b} are not primitive")

    @classmethod
    def lte(cls) -> "ConstituentSpec":
        """Feedback 1 + D^2 + D^3, feedforward 1 + D + D^3."""
        return cls(3, 0b1101, 0b1011)

    @property
    def n_states(self) -> int:
        return 1 << self.nu

    @property
    def cycle_length(self) -> int:
        """Period 2^nu - 1 of the autonomous feedback register."""
        return (1 << self.nu) - 1

    def _feedback_bit(self, state: int) -> int:
        # taps D^1..D^nu act on state bits 0..nu-1
        return _parity(state & (self.feedback_taps >> 1))

    def step(self, state: int, bit: int) -> tuple[int, int]:
        """One clock: returns (next_state, parity_bit)."""
        a = bit ^ self._feedback_bit(state)
        p = a ^ _parity(state & (self.feedforward_taps >> 1))
        return ((state << 1) | a) & (self.n_states - 1), p

    def is_primitive(self) -> bool:
        """Zero-input register visits all 2^nu - 1 nonzero states starting from 1."""
        s, seen = 1, 0
        while True:
            s = ((s << 1) | self._feedback_bit(s)) & ((1 << self.nu) - 1)
            seen += 1
            if s == 1 or s == 0:
                break
        return s == 1 and seen == self.cycle_length

    @cached_property
    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """(next_state, parity) lookup tables indexed [state, input_bit]."""
        nxt = np.zeros((self.n_states, 2), dtype=np.int64)
        par = np.zeros((self.n_states, 2), dtype=np.int64)
        for s in range(self.n_states):
            for b in (0, 1):
                nxt[s, b], par[s, b] = self.step(s, b)
        return nxt, par


def encode_from_state(spec: ConstituentSpec, bits, start_state: int = 0) -> tuple[np.ndarray, int]:
    """Parity sequence and end state for an input bit vector."""
    nxt, par = spec.tables
    u = np.asarray(bits, dtype=np.int64)
    out = np.zeros(len(u), dtype=np.uint8)
    s = int(start_state)
    for t, b in enumerate(u.tolist()):
        out[t] = par[s, b]
        s = int(nxt[s, b])
    return out, s


def _zero_input_run(spec: ConstituentSpec, state: int, steps: int) -> int:
    nxt, _ = spec.tables
    # the autonomous map has period dividing 2^nu - 1
    for _ in range(steps % spec.cycle_length):
        state = int(nxt[state, 0])
    return state


def tailbiting_state(spec: ConstituentSpec, bits) -> int | None:
    """Solve (I + A^N) s = b over GF(2) for the circular start state.

    b is the end state reached from state 0.  Returns None when I + A^N is
    singular, which happens exactly when 2^nu - 1 divides N.
    """
    n = len(bits)
    _, b = encode_from_state(spec, bits, 0)
    rows = []
    for j in range(spec.nu):
        col = (1 << j) ^ _zero_input_run(spec, 1 << j, n)
        rows.append(col)
    # columns of I + A^N as bitmasks; gaussian elimination on the augmented system
    nu = spec.nu
    mat = [sum(((rows[c] >> r) & 1) << c for c in range(nu)) | (((b >> r) & 1) << nu) for r in range(nu)]
    pivot_row = 0
    where = [-1] * nu
    for c in range(nu):
        sel = next((r for r in range(pivot_row, nu) if (mat[r] >> c) & 1), None)
        if sel is None:
            return None
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        for r in range(nu):
            if r != pivot_row and (mat[r] >> c) & 1:
                mat[r] ^= mat[pivot_row]
        where[c] = pivot_row
        pivot_row += 1
    return sum(((mat[where[c]] >> nu) & 1) << c for c in range(nu))


def encode_tailbiting(spec: ConstituentSpec, bits) -> np.ndarray | None:
    """Parity of the circular encoding whose start and end states agree."""
    s0 = tailbiting_state(spec, bits)
    if s0 is None:
        return None
    parity, end = encode_from_state(spec, bits, s0)
    assert end == s0
    return parity


def weight2_event_weight(spec: ConstituentSpec, multiple: int) -> int:
    """Parity weight of the input-weight-2 path with separation k (2^nu - 1)."""
    if multiple < 1:
        raise ValueError("multiple must be >= 1")
    sep = multiple * spec.cycle_length
    u = np.zeros(sep + 1, dtype=np.int64)
    u[0] = u[sep] = 1
    parity, end = encode_from_state(spec, u, 0)
    assert end == 0
    return int(parity.sum())


@dataclass(frozen=True)
class Event:
    """Self-terminating detour: leaves state 0 at offset 0 and returns at ``span``."""

    offsets: tuple[int, ...]
    span: int
    parity_weight: int

    @property
    def input_weight(self) -> int:
        return len(self.offsets)


def min_parity_to_zero(spec: ConstituentSpec, horizon: int) -> np.ndarray:
    """Table [steps, state] of the least parity weight reaching state 0 in <= steps."""
    nxt, par = spec.tables
    inf = 1 << 30
    mc = np.full((horizon + 1, spec.n_states), inf, dtype=np.int64)
    mc[0, 0] = 0
    for k in range(1, horizon + 1):
        mc[k, 0] = 0
        for s in range(1, spec.n_states):
            for b in (0, 1):
                c = par[s, b] + mc[k - 1, nxt[s, b]]
                if c < mc[k, s]:
                    mc[k, s] = c
    return mc


def fundamental_paths(spec: ConstituentSpec, max_weight: int, max_span: int, max_parity: int,
                      min_weight: int = 2) -> list[Event]:
    """All self-terminating events within the given input weight, span and parity caps."""
    nxt, par = spec.tables
    mc = min_parity_to_zero(spec, max_span)
    out = []

    def walk(s, t, ins, pw):
        # state s at time t (not yet clocked), ins: offsets so far
        rem = max_span - t
        if rem <= 0 or pw + mc[rem, s] > max_parity:
            return
        for b in (0, 1):
            if b and len(ins) >= max_weight:
                continue
            ns, p = int(nxt[s, b]), int(par[s, b])
            ni = ins + (t,) if b else ins
            if ns == 0:
                if len(ni) >= min_weight and pw + p <= max_parity:
                    out.append(Event(ni, t + 1, pw + p))
            else:
                walk(ns, t + 1, ni, pw + p)

    s1, p1 = spec.step(0, 1)
    if s1 == 0:
        if min_weight <= 1 and p1 <= max_parity:
            out.append(Event((0,), 1, p1))
    else:
        walk(s1, 1, (0,), p1)
    out.sort(key=lambda e: (e.parity_weight, e.span, e.offsets))
    return out
