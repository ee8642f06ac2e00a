"""Fountain-code transmitter side: source generations, draw rules, wire format.

Coefficient draws come in three flavours:

* traditional: uniform over all of GF(2)^k, zero vector included
* gamma-constrained: uniform over GF(2)^k minus every XOR of at most gamma
  previously transmitted vectors (the empty XOR bans the zero vector), used
  while the feasibility slack q^k - X(U) stays positive, falling back to an
  unconstrained draw afterwards or when the rejection budget runs out
* ack-assisted: given the receiver's reduced basis one step short of full
  rank, deterministically emit the unit vector on the lowest column missing
  from the basis pivots, which is innovative by construction
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple

from . import analytics
from .gf2 import CodingVector, ReducedBasis

__all__ = [
    "Codeword",
    "Encoder",
    "SourceGeneration",
    "combine_payloads",
    "deserialize_codeword",
    "serialize_codeword",
]

_MAX_K = 0xFFFF
_MAX_PAYLOAD = 0xFFFF
_MAX_SEQ = 0xFFFFFFFF


def _xor_selected(packet_ints: List[int], bits: int) -> int:
    acc = 0
    while bits:
        low = bits & -bits
        acc ^= packet_ints[low.bit_length() - 1]
        bits ^= low
    return acc


@dataclass(frozen=True, slots=True)
class SourceGeneration:
    """An ordered block of k equal-length source packets."""

    packets: Tuple[bytes, ...]

    def __post_init__(self) -> None:
        if not self.packets:
            raise ValueError("a generation needs at least one packet")
        if len(self.packets) > _MAX_K:
            raise ValueError(f"at most {_MAX_K} packets per generation")
        length = len(self.packets[0])
        if length < 1 or length > _MAX_PAYLOAD:
            raise ValueError(f"packet length must be in [1, {_MAX_PAYLOAD}]")
        if any(len(p) != length for p in self.packets):
            raise ValueError("all packets in a generation must share one length")

    @classmethod
    def random(cls, k: int, payload_len: int, rng) -> "SourceGeneration":
        return cls(tuple(rng.randbytes(payload_len) for _ in range(k)))

    @property
    def k(self) -> int:
        return len(self.packets)

    @property
    def payload_len(self) -> int:
        return len(self.packets[0])


@dataclass(frozen=True, slots=True)
class Codeword:
    """One transmission: coefficient vector, combined payload, sequence tag.

    constrained is False when the draw had to abandon the combination rule
    (budget exhausted or the feasibility slack went nonpositive); the wire
    format does not carry it.
    """

    coeffs: CodingVector
    payload: bytes
    seq: int
    constrained: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.seq <= _MAX_SEQ:
            raise ValueError(f"seq must fit in 32 bits, got {self.seq}")
        if len(self.payload) > _MAX_PAYLOAD:
            raise ValueError(f"payload longer than {_MAX_PAYLOAD} bytes")


def combine_payloads(coeffs: CodingVector, generation: SourceGeneration) -> bytes:
    """XOR of the generation packets selected by the coefficient bits."""
    if coeffs.k != generation.k:
        raise ValueError(f"coefficient length {coeffs.k} != generation k {generation.k}")
    ints = [int.from_bytes(p, "little") for p in generation.packets]
    return _xor_selected(ints, coeffs.bits).to_bytes(generation.payload_len, "little")


def serialize_codeword(codeword: Codeword) -> bytes:
    """Wire form: k u16, seq u32, packed coefficient bits, length u16, payload.

    All integers little-endian; coefficient bit i lands in bit i % 8 of
    coefficient byte i // 8.
    """
    coeffs = codeword.coeffs
    return b"".join(
        (
            struct.pack("<HI", coeffs.k, codeword.seq),
            coeffs.to_bytes(),
            struct.pack("<H", len(codeword.payload)),
            codeword.payload,
        )
    )


def deserialize_codeword(data: bytes, offset: int = 0) -> Tuple[Codeword, int]:
    """Parse one codeword at offset; returns (codeword, next_offset)."""
    if offset < 0 or len(data) - offset < 6:
        raise ValueError("truncated codeword header")
    k, seq = struct.unpack_from("<HI", data, offset)
    if k < 1:
        raise ValueError("codeword k field must be >= 1")
    offset += 6
    nbytes = (k + 7) // 8
    if len(data) - offset < nbytes + 2:
        raise ValueError("truncated coefficient block")
    coeffs = CodingVector.from_bytes(k, data[offset : offset + nbytes])
    offset += nbytes
    (length,) = struct.unpack_from("<H", data, offset)
    offset += 2
    if len(data) - offset < length:
        raise ValueError("truncated payload")
    payload = bytes(data[offset : offset + length])
    return Codeword(coeffs, payload, seq), offset + length


class _ExclusionIndex:
    """All XORs of at most gamma history vectors, maintained incrementally.

    layers[i] holds the values reachable as XORs of exactly i history
    entries; adding vector v extends layer i with {x ^ v for x in layer
    i-1}, since those are precisely the i-subsets containing v.  members is
    the union, giving O(1) rejection checks.
    """

    __slots__ = ("gamma", "layers", "members")

    def __init__(self, gamma: int) -> None:
        self.gamma = gamma
        self.layers: List[set] = [{0}] + [set() for _ in range(gamma)]
        self.members = {0}

    def add(self, bits: int) -> None:
        layers = self.layers
        members = self.members
        for size in range(self.gamma, 0, -1):
            prev = layers[size - 1]
            if prev:
                grown = {x ^ bits for x in prev}
                layers[size] |= grown
                members |= grown


class Encoder:
    """Transmitter state for one generation under one draw rule family.

    Every emission, whatever the rule, is appended to the transmitted
    history; the constrained rule excludes combinations over that full
    history, including ack-assisted and fallback emissions.
    """

    def __init__(
        self,
        generation: SourceGeneration,
        gamma: int = 0,
        rng: Optional[random.Random] = None,
    ) -> None:
        if gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        self.generation = generation
        self.gamma = gamma
        self.rng = rng if rng is not None else random.Random()
        self.k = generation.k
        self._payload_len = generation.payload_len
        self._packet_ints = [int.from_bytes(p, "little") for p in generation.packets]
        self._history: List[int] = []
        self._space = 1 << self.k
        self._index: Optional[_ExclusionIndex] = _ExclusionIndex(gamma)
        # C(U, i) for i = 0..gamma at the current history size U
        self._combs = [1] + [0] * gamma
        self._infeasible_at = analytics.infeasible_from(self.k, 2, gamma)

    @property
    def transmitted_count(self) -> int:
        return len(self._history)

    def transmitted(self) -> List[CodingVector]:
        return [CodingVector(self.k, bits) for bits in self._history]

    def _record(self, bits: int) -> None:
        self._history.append(bits)
        index = self._index
        if index is None:
            return
        threshold = self._infeasible_at
        if threshold is not None and len(self._history) >= threshold:
            # no future draw can be constrained, stop paying for the index
            self._index = None
            return
        index.add(bits)
        combs = self._combs
        for i in range(self.gamma, 0, -1):
            combs[i] += combs[i - 1]

    def _emit_traditional(self) -> Tuple[int, int]:
        bits = self.rng.getrandbits(self.k)
        self._record(bits)
        return bits, _xor_selected(self._packet_ints, bits)

    def _draw_constrained(self) -> Tuple[int, bool]:
        threshold = self._infeasible_at
        if threshold is not None and len(self._history) >= threshold:
            return self.rng.getrandbits(self.k), False
        members = self._index.members
        getbits = self.rng.getrandbits
        k = self.k
        slack = self._space - sum(self._combs)
        budget = max(1000, (self._space << 6) // slack)
        for _ in range(budget):
            bits = getbits(k)
            if bits not in members:
                return bits, True
        return getbits(k), False

    def _emit_constrained(self) -> Tuple[int, int, bool]:
        bits, constrained = self._draw_constrained()
        self._record(bits)
        return bits, _xor_selected(self._packet_ints, bits), constrained

    def _emit_assisting(self, report_bits: List[int]) -> Tuple[int, int]:
        pivots = 0
        for row in report_bits:
            if row:
                pivots |= row & -row
        missing = ~pivots & (self._space - 1)
        if not missing:
            raise ValueError("reported basis already spans the full space")
        bits = missing & -missing
        self._record(bits)
        return bits, _xor_selected(self._packet_ints, bits)

    def _wrap(self, bits: int, payload_int: int, constrained: bool = True) -> Codeword:
        return Codeword(
            coeffs=CodingVector(self.k, bits),
            payload=payload_int.to_bytes(self._payload_len, "little"),
            seq=len(self._history) - 1,
            constrained=constrained,
        )

    def next_traditional(self) -> Codeword:
        """Uniform unconstrained draw; the zero vector is a legal outcome."""
        bits, payload = self._emit_traditional()
        return self._wrap(bits, payload)

    def next_gamma_constrained(self) -> Codeword:
        """Rejection-sampled draw outside the combination exclusion set."""
        bits, payload, constrained = self._emit_constrained()
        return self._wrap(bits, payload, constrained)

    def next_blockack(self, report: List[CodingVector]) -> Codeword:
        """Guaranteed-innovative emission for a receiver that reported its basis.

        The report must not already span the full space.  The emitted vector
        is the unit vector on the lowest column absent from the report's
        pivot set, so it is deterministic for a given report.
        """
        k = self.k
        if any(v.k != k for v in report):
            raise ValueError("report vector length does not match the generation")
        basis = ReducedBasis(k)
        for v in report:
            basis.reduce_and_insert(v)
        rows = [row.bits for row in basis.pivot_rows()]
        bits, payload = self._emit_assisting(rows)
        return self._wrap(bits, payload)
