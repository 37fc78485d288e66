"""Bit-packed linear algebra over GF(2).

Vectors are packed into Python ints (bit i is coordinate i), so a row XOR is
a single big-int operation regardless of length.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations

from .sieve import SmoothRelation


@dataclass(frozen=True)
class Gf2Vector:
    bits: int
    length: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> Gf2Vector:
        bits = 0
        for i, v in enumerate(values):
            if v & 1:
                bits |= 1 << i
        return cls(bits, len(values))

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: Gf2Vector) -> Gf2Vector:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return Gf2Vector(self.bits ^ other.bits, self.length)

    def __bool__(self) -> bool:
        return self.bits != 0

    def support(self) -> list[int]:
        """Indices of the set coordinates."""
        out, b, i = [], self.bits, 0
        while b:
            if b & 1:
                out.append(i)
            b >>= 1
            i += 1
        return out


@dataclass(frozen=True)
class Gf2Matrix:
    """Matrix whose column i is the parity vector of relation i.

    ``rows[j]`` has one bit per relation; row 0 is the sign row.
    """

    rows: tuple[Gf2Vector, ...]
    num_cols: int

    def __post_init__(self):
        if any(r.length != self.num_cols for r in self.rows):
            raise ValueError("row length must equal num_cols")

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Gf2Vector], num_rows: int) -> Gf2Matrix:
        rows = [0] * num_rows
        for i, col in enumerate(columns):
            for j in col.support():
                rows[j] |= 1 << i
        return cls(tuple(Gf2Vector(r, len(columns)) for r in rows), len(columns))

    def column(self, i: int) -> Gf2Vector:
        bits = 0
        for j, row in enumerate(self.rows):
            if (row.bits >> i) & 1:
                bits |= 1 << j
        return Gf2Vector(bits, self.num_rows)

    def columns(self) -> list[Gf2Vector]:
        return [self.column(i) for i in range(self.num_cols)]

    def __matmul__(self, v: Gf2Vector) -> Gf2Vector:
        if v.length != self.num_cols:
            raise ValueError("dimension mismatch")
        bits = 0
        for j, row in enumerate(self.rows):
            if (row.bits & v.bits).bit_count() & 1:
                bits |= 1 << j
        return Gf2Vector(bits, self.num_rows)


def parity_vector(relation: SmoothRelation) -> Gf2Vector:
    """Exponents mod 2, with the sign in bit 0."""
    bits = int(relation.sign_negative)
    for j, e in enumerate(relation.exponents, start=1):
        if e & 1:
            bits |= 1 << j
    return Gf2Vector(bits, len(relation.exponents) + 1)


def build_matrix(relations: Sequence[SmoothRelation], fb_size: int) -> Gf2Matrix:
    if not relations:
        raise ValueError("need at least one relation")
    cols = []
    for rel in relations:
        v = parity_vector(rel)
        if v.length != fb_size:
            raise ValueError(f"relation for x={rel.x} has {v.length} slots, expected {fb_size}")
        cols.append(v)
    return Gf2Matrix.from_columns(cols, fb_size)


def kernel_basis(m: Gf2Matrix) -> list[Gf2Vector]:
    """Basis of the right null space ``{e : M e = 0 (mod 2)}``.

    Elimination runs over the columns (one packed word per relation), each
    carrying a history word recording which original columns were XORed in.
    A column that reduces to zero contributes its history as a kernel vector.
    """
    pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, history)
    basis = []
    for i, col in enumerate(m.columns()):
        v, h = col.bits, 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = (v, h)
                break
            pv, ph = pivots[top]
            v ^= pv
            h ^= ph
        else:
            basis.append(Gf2Vector(h, m.num_cols))
    return basis


def enumerate_dependencies(basis: Sequence[Gf2Vector], limit: int) -> Iterator[Gf2Vector]:
    """Yield up to ``limit`` distinct nonzero kernel vectors.

    Order: each basis vector, then XORs of pairs ``(i, j)`` with ``i < j``.
    """
    if limit <= 0:
        return
    seen = set()

    def fresh(vectors: Iterable[Gf2Vector]) -> Iterator[Gf2Vector]:
        for v in vectors:
            if v and v.bits not in seen:
                seen.add(v.bits)
                yield v

    candidates = fresh(
        v
        for group in (basis, (a ^ b for a, b in combinations(basis, 2)))
        for v in group
    )
    for count, v in enumerate(candidates, start=1):
        yield v
        if count >= limit:
            return
