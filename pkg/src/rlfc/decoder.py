"""Receiver side: rank tracking, on-the-fly elimination, packet recovery.

Each stored row is a single integer laying payload bits above the k
coefficient bits, so Gaussian elimination XORs coefficients and payloads in
lockstep.  Rows stay mutually reduced (each pivot column appears in exactly
one row); at rank k the coefficient half is the identity and the payload
half reads out the source packets directly.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass
from typing import List

from .encoder import Codeword
from .gf2 import CodingVector

__all__ = [
    "DecoderState",
    "InsufficientRankError",
    "ReceiveOutcome",
]


class InsufficientRankError(RuntimeError):
    """Recovery was requested before the decoder reached full rank."""


@dataclass(frozen=True, slots=True)
class ReceiveOutcome:
    """Result of absorbing one codeword.

    kind is "dependent" when the residual vanished, "complete" when the
    arrival was innovative and brought the rank to k, "innovative"
    otherwise.
    """

    kind: str
    rank_after: int

    @property
    def innovative(self) -> bool:
        return self.kind != "dependent"

    @property
    def complete(self) -> bool:
        return self.kind == "complete"


class DecoderState:
    """Accumulates codewords for one generation until the rank reaches k."""

    __slots__ = ("k", "payload_len", "received_count", "_rows", "_pivots", "_mask")

    def __init__(self, k: int, payload_len: int) -> None:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if payload_len < 1:
            raise ValueError(f"payload_len must be >= 1, got {payload_len}")
        self.k = k
        self.payload_len = payload_len
        self.received_count = 0
        self._rows: dict[int, int] = {}  # pivot column -> combined row
        self._pivots: List[int] = []  # sorted pivot columns
        self._mask = (1 << k) - 1

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def is_complete(self) -> bool:
        return len(self._pivots) == self.k

    def _receive_ints(self, bits: int, payload_int: int) -> bool:
        """Absorb a raw (coefficient bits, payload int) pair; True if rank grew."""
        self.received_count += 1
        rows = self._rows
        row = payload_int << self.k | bits
        for pivot in self._pivots:
            if row >> pivot & 1:
                row ^= rows[pivot]
        coeffs = row & self._mask
        if coeffs == 0:
            return False
        pivot = (coeffs & -coeffs).bit_length() - 1
        for p in self._pivots:
            if rows[p] >> pivot & 1:
                rows[p] ^= row
        rows[pivot] = row
        insort(self._pivots, pivot)
        return True

    def receive(self, codeword: Codeword) -> ReceiveOutcome:
        """Eliminate a codeword against the stored rows and keep any residual."""
        if codeword.coeffs.k != self.k:
            raise ValueError(
                f"codeword k {codeword.coeffs.k} does not match decoder k {self.k}"
            )
        if len(codeword.payload) != self.payload_len:
            raise ValueError(
                f"payload length {len(codeword.payload)} does not match "
                f"decoder payload_len {self.payload_len}"
            )
        innovative = self._receive_ints(
            codeword.coeffs.bits, int.from_bytes(codeword.payload, "little")
        )
        rank = len(self._pivots)
        if not innovative:
            kind = "dependent"
        elif rank == self.k:
            kind = "complete"
        else:
            kind = "innovative"
        return ReceiveOutcome(kind, rank)

    def coefficient_rows(self) -> List[CodingVector]:
        """Reduced coefficient rows in pivot order."""
        return [
            CodingVector(self.k, self._rows[p] & self._mask) for p in self._pivots
        ]

    def blockack_report(self) -> List[CodingVector]:
        """Basis snapshot a receiver sends back when one codeword short.

        Callable at any rank; the transmitter needs it at rank k-1 to build
        the finishing codeword.
        """
        return self.coefficient_rows()

    def recover_packets(self) -> List[bytes]:
        """Source packets in order; requires full rank.

        At rank k every pivot row's coefficient half is a unit vector, so
        the payload half above it is the packet for that pivot column.
        """
        if len(self._pivots) < self.k:
            raise InsufficientRankError(
                f"rank {len(self._pivots)} < k {self.k}: need more innovative codewords"
            )
        out = []
        for p in self._pivots:
            row = self._rows[p]
            assert row & self._mask == 1 << p
            out.append((row >> self.k).to_bytes(self.payload_len, "little"))
        return out
