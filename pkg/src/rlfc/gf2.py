"""Linear algebra over GF(2) with integer-bitset row representation.

A length-k coefficient vector is stored as a Python int: bit i (LSB first)
is the coefficient applied to source packet i.  XOR is vector addition,
``int.bit_count`` is Hamming weight, and the lowest set bit of a reduced
row is its pivot column.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Tuple

__all__ = [
    "CodingVector",
    "ReducedBasis",
    "SingularMatrixError",
    "bounded_combination_member",
    "invert",
    "rank",
]


class SingularMatrixError(ValueError):
    """Raised when a matrix inverse is requested but the rows are dependent."""


def _check_bits(bits: int, k: int) -> None:
    if k < 1:
        raise ValueError(f"vector length must be >= 1, got {k}")
    if bits < 0 or bits >> k:
        raise ValueError(f"coefficient bits {bits:#x} do not fit in {k} positions")


@dataclass(frozen=True, slots=True)
class CodingVector:
    """Immutable length-k coefficient vector over GF(2)."""

    k: int
    bits: int

    def __post_init__(self) -> None:
        _check_bits(self.bits, self.k)

    @classmethod
    def zero(cls, k: int) -> "CodingVector":
        return cls(k, 0)

    @classmethod
    def unit(cls, k: int, index: int) -> "CodingVector":
        if not 0 <= index < k:
            raise ValueError(f"unit index {index} out of range for k={k}")
        return cls(k, 1 << index)

    @classmethod
    def random(cls, k: int, rng) -> "CodingVector":
        return cls(k, rng.getrandbits(k))

    @classmethod
    def from_string(cls, text: str) -> "CodingVector":
        """Parse "110" as coefficients g1=1, g2=1, g3=0 (leftmost char first)."""
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"expected a nonempty string of 0/1, got {text!r}")
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
        return cls(len(text), bits)

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.k))

    @classmethod
    def from_bytes(cls, k: int, data: bytes) -> "CodingVector":
        expected = (k + 7) // 8
        if len(data) != expected:
            raise ValueError(f"need {expected} bytes for k={k}, got {len(data)}")
        return cls(k, int.from_bytes(data, "little"))

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.k + 7) // 8, "little")

    def bit(self, index: int) -> int:
        if not 0 <= index < self.k:
            raise ValueError(f"bit index {index} out of range for k={self.k}")
        return self.bits >> index & 1

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __xor__(self, other: "CodingVector") -> "CodingVector":
        if self.k != other.k:
            raise ValueError(f"length mismatch: {self.k} vs {other.k}")
        return CodingVector(self.k, self.bits ^ other.bits)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"CodingVector({self.to_string()!r})"


def _rank_bits(rows: Iterable[int]) -> int:
    pending = list(rows)
    r = 0
    while pending:
        row = pending.pop()
        if not row:
            continue
        r += 1
        low = row & -row
        pending = [p ^ row if p & low else p for p in pending]
    return r


def rank(rows: Iterable[CodingVector]) -> int:
    """Rank of the given vectors via batch Gaussian elimination."""
    return _rank_bits(v.bits for v in rows)


def invert(rows: List[CodingVector]) -> List[CodingVector]:
    """Inverse of the k x k matrix whose rows are the given vectors.

    Augments each row with an identity tag, reduces to the identity, and
    returns the tags as the inverse rows.  Raises SingularMatrixError when
    the rows are linearly dependent.
    """
    if not rows:
        raise ValueError("cannot invert an empty matrix")
    k = rows[0].k
    if len(rows) != k or any(v.k != k for v in rows):
        raise ValueError(f"need exactly {k} rows of length {k}")
    # combined row layout: [tag bits | original bits], original in the low half
    work = [v.bits | 1 << (k + i) for i, v in enumerate(rows)]
    reduced: List[int] = []
    mask = (1 << k) - 1
    for row in work:
        for r in reduced:
            low = r & -r & mask
            if row & low:
                row ^= r
        if row & mask == 0:
            raise SingularMatrixError("rows are linearly dependent")
        for i, r in enumerate(reduced):
            low = row & -row & mask
            if r & low:
                reduced[i] = r ^ row
        reduced.append(row)
    reduced.sort(key=lambda r: r & -r & mask)
    return [CodingVector(k, r >> k) for r in reduced]


def bounded_combination_member(
    candidate: CodingVector,
    transmitted: List[CodingVector],
    gamma: int,
) -> bool:
    """Whether candidate equals the XOR of at most gamma of the given vectors.

    The empty combination contributes the zero vector, so the zero candidate
    is always a member.  Checks all subsets of size <= gamma directly.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    k = candidate.k
    if any(v.k != k for v in transmitted):
        raise ValueError("transmitted vectors must match candidate length")
    target = candidate.bits
    pool = [v.bits for v in transmitted]
    for size in range(0, min(gamma, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            acc = 0
            for b in combo:
                acc ^= b
            if acc == target:
                return True
    return False


class ReducedBasis:
    """Incrementally maintained basis in reduced row echelon form.

    Rows are kept fully reduced against one another: each pivot column
    (the lowest set bit of its row) appears in no other row.  Insertion is
    O(rank) integer operations.
    """

    __slots__ = ("k", "_rows")

    def __init__(self, k: int) -> None:
        if k < 1:
            raise ValueError(f"vector length must be >= 1, got {k}")
        self.k = k
        self._rows: dict[int, int] = {}  # pivot column -> row bits

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivot_columns(self) -> Tuple[int, ...]:
        return tuple(sorted(self._rows))

    def pivot_rows(self) -> List[CodingVector]:
        """Current rows in reduced form, ordered by pivot column."""
        return [CodingVector(self.k, self._rows[p]) for p in sorted(self._rows)]

    def _reduce_bits(self, bits: int) -> int:
        rows = self._rows
        for pivot in sorted(rows):
            if bits >> pivot & 1:
                bits ^= rows[pivot]
        return bits

    def reduce(self, vector: CodingVector) -> CodingVector:
        """Residual of vector after elimination by the current rows."""
        if vector.k != self.k:
            raise ValueError(f"length mismatch: {vector.k} vs {self.k}")
        return CodingVector(self.k, self._reduce_bits(vector.bits))

    def _insert_bits(self, bits: int) -> bool:
        """Reduce raw bits and insert the residual.  True when rank grew."""
        residual = self._reduce_bits(bits)
        if residual == 0:
            return False
        pivot = (residual & -residual).bit_length() - 1
        rows = self._rows
        # clear the new pivot column from every existing row
        for p, row in rows.items():
            if row >> pivot & 1:
                rows[p] = row ^ residual
        rows[pivot] = residual
        return True

    def reduce_and_insert(self, vector: CodingVector) -> Tuple[bool, CodingVector]:
        """Insert the residual of vector if nonzero.

        Returns (innovative, residual).  The residual is the zero vector
        exactly when the input already lies in the span.
        """
        if vector.k != self.k:
            raise ValueError(f"length mismatch: {vector.k} vs {self.k}")
        residual = self._reduce_bits(vector.bits)
        if residual == 0:
            return False, CodingVector.zero(self.k)
        self._insert_bits(residual)
        return True, CodingVector(self.k, residual)

    def __contains__(self, vector: CodingVector) -> bool:
        return self._reduce_bits(vector.bits) == 0

    def __len__(self) -> int:
        return len(self._rows)
