"""Erasure-channel Monte Carlo driver for the three transmission schemes.

Determinism contract: run r of a simulation seeded s always uses the RNG
``random.Random(first 8 bytes of sha256(s || r))`` with both values packed
as u64 little-endian, so results are byte-for-byte reproducible for a given
(config, runs) regardless of worker count, scheduling, or process start
method.
"""

from __future__ import annotations

import hashlib
import multiprocessing
import random
import statistics
import struct
from collections import Counter
from dataclasses import dataclass
from math import sqrt
from typing import List, Optional, Tuple

from .decoder import DecoderState
from .encoder import (
    Codeword,
    Encoder,
    SourceGeneration,
    deserialize_codeword,
    serialize_codeword,
)
from .gf2 import CodingVector

__all__ = [
    "ChannelConfig",
    "ConfigError",
    "SCHEMES",
    "SCHEME_BLOCKACK",
    "SCHEME_GAMMA",
    "SCHEME_TRADITIONAL",
    "SessionLimitError",
    "SessionResult",
    "SimReport",
    "TraceData",
    "load_trace",
    "monte_carlo",
    "run_session",
    "substream",
    "write_trace",
]

SCHEME_TRADITIONAL = "traditional"
SCHEME_GAMMA = "gamma_constrained"
SCHEME_BLOCKACK = "gamma_blockack"
SCHEMES = (SCHEME_TRADITIONAL, SCHEME_GAMMA, SCHEME_BLOCKACK)

_SESSION_CAP = 1_000_000
_MAX_SEED = (1 << 64) - 1


class ConfigError(ValueError):
    """A channel or simulation parameter is out of contract."""


class SessionLimitError(RuntimeError):
    """A single session exceeded the transmission safety cap."""


@dataclass(frozen=True, slots=True)
class ChannelConfig:
    """One multicast erasure channel and the transmission scheme driving it.

    gamma is ignored for the traditional scheme.  p must stay below 1 so
    sessions terminate.  seed feeds the per-run substream derivation.
    """

    k: int
    scheme: str
    gamma: int = 0
    p: float = 0.0
    receivers: int = 1
    payload_len: int = 1024
    seed: int = 0

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(
                f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}"
            )
        if not 1 <= self.k <= 0xFFFF:
            raise ConfigError(f"k must be in [1, 65535], got {self.k}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if not 0.0 <= self.p < 1.0:
            raise ConfigError(f"erasure probability must be in [0, 1), got {self.p}")
        if self.receivers < 1:
            raise ConfigError(f"receivers must be >= 1, got {self.receivers}")
        if self.scheme == SCHEME_BLOCKACK and self.receivers != 1:
            raise ConfigError("gamma_blockack runs point-to-point (receivers=1)")
        if not 1 <= self.payload_len <= 0xFFFF:
            raise ConfigError(
                f"payload_len must be in [1, 65535], got {self.payload_len}"
            )
        if not 0 <= self.seed <= _MAX_SEED:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")


@dataclass(frozen=True, slots=True)
class SessionResult:
    """Outcome of one session; the session runs until every receiver decodes."""

    total_transmissions: int
    per_receiver_received: Tuple[int, ...]
    per_receiver_excess: Tuple[int, ...]
    blockack_sent: Tuple[bool, ...]
    fallback_transmissions: int


def substream(seed: int, run_index: int) -> random.Random:
    """Independent per-run RNG derived by hashing (seed, run_index)."""
    digest = hashlib.sha256(struct.pack("<QQ", seed, run_index)).digest()
    return random.Random(int.from_bytes(digest[:8], "little"))


def run_session(
    cfg: ChannelConfig,
    rng: random.Random,
    trace: Optional[List[Codeword]] = None,
) -> SessionResult:
    """Transmit one fresh generation until every receiver reaches rank k.

    Each transmission is erased independently per receiver with probability
    cfg.p; receivers that complete stop consuming.  Under gamma_blockack
    the single receiver reports its reduced basis on first hitting rank
    k-1, before the next transmission; the report is assumed delivered
    reliably, is sent once per session, and the transmitter rebuilds the
    finishing codeword from that same report until one gets through.
    """
    k = cfg.k
    generation = SourceGeneration.random(k, cfg.payload_len, rng)
    traditional = cfg.scheme == SCHEME_TRADITIONAL
    blockack = cfg.scheme == SCHEME_BLOCKACK
    encoder = Encoder(generation, gamma=0 if traditional else cfg.gamma, rng=rng)
    decoders = [DecoderState(k, cfg.payload_len) for _ in range(cfg.receivers)]
    active = list(range(cfg.receivers))
    p = cfg.p
    report_rows: Optional[List[int]] = None
    total = 0
    fallbacks = 0
    while active:
        if total >= _SESSION_CAP:
            raise SessionLimitError(
                f"session exceeded {_SESSION_CAP} transmissions; cfg={cfg}"
            )
        if blockack and report_rows is None and decoders[0].rank == k - 1:
            report_rows = [v.bits for v in decoders[0].blockack_report()]
        if report_rows is not None:
            bits, payload_int = encoder._emit_assisting(report_rows)
            constrained = True
        elif traditional:
            bits, payload_int = encoder._emit_traditional()
            constrained = True
        else:
            bits, payload_int, constrained = encoder._emit_constrained()
            if not constrained:
                fallbacks += 1
        total += 1
        if trace is not None:
            trace.append(
                Codeword(
                    coeffs=CodingVector(k, bits),
                    payload=payload_int.to_bytes(cfg.payload_len, "little"),
                    seq=total - 1,
                    constrained=constrained,
                )
            )
        still = []
        for idx in active:
            if p and rng.random() < p:
                still.append(idx)
                continue
            dec = decoders[idx]
            dec._receive_ints(bits, payload_int)
            if dec.rank < k:
                still.append(idx)
        active = still
    acked = report_rows is not None
    return SessionResult(
        total_transmissions=total,
        per_receiver_received=tuple(d.received_count for d in decoders),
        per_receiver_excess=tuple(d.received_count - k for d in decoders),
        blockack_sent=tuple(acked and i == 0 for i in range(cfg.receivers)),
        fallback_transmissions=fallbacks,
    )


@dataclass(frozen=True)
class SimReport:
    """Aggregate statistics over all runs of one configuration.

    mean/stddev/ci95_halfwidth describe total transmissions per session;
    the excess statistics pool every receiver of every run.  fallback_rate
    is the fraction of transmissions that abandoned the combination rule;
    ack_rate the fraction of sessions that issued a report.
    """

    config: ChannelConfig
    runs: int
    mean_transmissions: float
    stddev: float
    ci95_halfwidth: float
    mean_excess: float
    empirical_excess_pmf: Tuple[Tuple[int, float], ...]
    stddev_excess: float
    ci95_excess: float
    fallback_rate: float
    ack_rate: float


def _run_block(args) -> List[SessionResult]:
    cfg, start, stop = args
    return [run_session(cfg, substream(cfg.seed, i)) for i in range(start, stop)]


def _aggregate(cfg: ChannelConfig, runs: int, results) -> SimReport:
    totals: List[int] = []
    excesses: List[int] = []
    fallbacks = 0
    acks = 0
    for res in results:
        totals.append(res.total_transmissions)
        excesses.extend(res.per_receiver_excess)
        fallbacks += res.fallback_transmissions
        acks += any(res.blockack_sent)
    n = len(totals)
    m = len(excesses)
    # statistics.stdev on ints goes through exact rationals: reproducible
    stddev = statistics.stdev(totals) if n > 1 else 0.0
    stddev_excess = statistics.stdev(excesses) if m > 1 else 0.0
    counts = Counter(excesses)
    pmf = tuple((delta, counts[delta] / m) for delta in sorted(counts))
    return SimReport(
        config=cfg,
        runs=runs,
        mean_transmissions=sum(totals) / n,
        stddev=stddev,
        ci95_halfwidth=1.96 * stddev / sqrt(n),
        mean_excess=sum(excesses) / m,
        empirical_excess_pmf=pmf,
        stddev_excess=stddev_excess,
        ci95_excess=1.96 * stddev_excess / sqrt(m),
        fallback_rate=fallbacks / sum(totals),
        ack_rate=acks / n,
    )


def monte_carlo(
    cfg: ChannelConfig,
    runs: int,
    jobs: int = 1,
    trace: Optional[List[Codeword]] = None,
) -> SimReport:
    """Run independent sessions and aggregate.

    Results depend only on (cfg, runs): per-run substreams make jobs a pure
    throughput knob.  A trace list may only be supplied for single-run
    simulations, since the wire stream carries no session delimiter.
    """
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if trace is not None and runs != 1:
        raise ConfigError("tracing requires runs=1")
    if jobs == 1 or runs == 1:
        results = (
            run_session(cfg, substream(cfg.seed, i), trace if i == 0 else None)
            for i in range(runs)
        )
        return _aggregate(cfg, runs, results)
    jobs = min(jobs, runs)
    bounds = [runs * j // jobs for j in range(jobs + 1)]
    blocks = [(cfg, bounds[j], bounds[j + 1]) for j in range(jobs)]
    with multiprocessing.Pool(jobs) as pool:
        chunks = pool.map(_run_block, blocks)
    return _aggregate(cfg, runs, (r for chunk in chunks for r in chunk))


_TRACE_HEADER = struct.Struct("<4sHHQ")
_TRACE_MAGIC = b"RLFC"
TRACE_VERSION = 1


@dataclass(frozen=True, slots=True)
class TraceData:
    """Parsed transmission trace: format version, dimension, seed, codewords."""

    version: int
    k: int
    seed: int
    codewords: Tuple[Codeword, ...]


def write_trace(path, k: int, seed: int, codewords) -> None:
    """Write a binary transmission trace.

    Layout: magic "RLFC", version u16, k u16, seed u64 (all little-endian),
    then each codeword in wire form back to back.
    """
    if not 1 <= k <= 0xFFFF:
        raise ValueError(f"k must be in [1, 65535], got {k}")
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    blob = bytearray(_TRACE_HEADER.pack(_TRACE_MAGIC, TRACE_VERSION, k, seed))
    for cw in codewords:
        if cw.coeffs.k != k:
            raise ValueError(f"codeword k {cw.coeffs.k} does not match trace k {k}")
        blob += serialize_codeword(cw)
    with open(path, "wb") as fh:
        fh.write(blob)


def load_trace(path) -> TraceData:
    """Parse a trace written by write_trace; validates magic and dimensions."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _TRACE_HEADER.size:
        raise ValueError("truncated trace header")
    magic, version, k, seed = _TRACE_HEADER.unpack_from(data, 0)
    if magic != _TRACE_MAGIC:
        raise ValueError(f"bad trace magic {magic!r}")
    if version != TRACE_VERSION:
        raise ValueError(f"unsupported trace version {version}")
    offset = _TRACE_HEADER.size
    codewords = []
    while offset < len(data):
        cw, offset = deserialize_codeword(data, offset)
        if cw.coeffs.k != k:
            raise ValueError(
                f"codeword k {cw.coeffs.k} does not match trace header k {k}"
            )
        codewords.append(cw)
    return TraceData(version, k, seed, tuple(codewords))
