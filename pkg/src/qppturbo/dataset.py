"""Embedded reference table of LTE interleavers with exact d_min and multiplicity."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

TABLE_FILE = "lte_table.txt"
TABLE_VERSION = 1
TABLE_ROWS = 188
TABLE_SHA256 = "6fa048536b56f52f895aadfc4bb8f82bb3ae8d257aaa4ba5245e96fe4c8e64e8"


@dataclass(frozen=True)
class LteRow:
    N: int
    f1: int
    f2: int
    dmin: int
    multiplicity: int

    def as_tuple(self):
        return (self.N, self.f1, self.f2, self.dmin, self.multiplicity)


class DatasetError(RuntimeError):
    pass


def lte_table_text() -> str:
    return resources.files("qppturbo.data").joinpath(TABLE_FILE).read_text()


def load_lte_table(verify: bool = True) -> list[LteRow]:
    text = lte_table_text()
    if verify:
        digest = hashlib.sha256(text.encode()).hexdigest()
        if digest != TABLE_SHA256:
            raise DatasetError(f"{TABLE_FILE} checksum mismatch: {digest}")
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(LteRow(*(int(x) for x in line.split())))
    if verify and len(rows) != TABLE_ROWS:
        raise DatasetError(f"expected {TABLE_ROWS} rows, found {len(rows)}")
    return rows


def lte_qpp_for(N: int):
    """(f1, f2) of the standard interleaver of length N, or None."""
    for r in load_lte_table():
        if r.N == N:
            return r.f1, r.f2
    return None
