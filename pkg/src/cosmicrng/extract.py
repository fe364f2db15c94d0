"""RNG core: map detection times to time-bin codes, histogram them, score min-entropy.

A free-running clock divides time into windows of ``t_window_ps``; each
window splits into ``n_bins`` equal bins and the bin index of a detection
is the emitted code (one code per window at most, identity code assignment,
one code per output byte).  All arithmetic is integer picoseconds: the
window is deliberately not a whole number of TDC ticks, so working in ticks
would accumulate phase error, while in ps the bin assignment is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .photonsim import TimestampSeries

DEFAULT_WINDOW_PS = 40_960  # 40.96 ns clock period
DEFAULT_N_BINS = 256


@dataclass(frozen=True)
class ExtractionConfig:
    """Clock window and bin count for time-bin extraction."""

    t_window_ps: int = DEFAULT_WINDOW_PS
    n_bins: int = DEFAULT_N_BINS

    def __post_init__(self):
        if self.t_window_ps <= 0:
            raise ValueError("t_window_ps must be positive")
        if self.n_bins < 2 or self.n_bins & (self.n_bins - 1):
            raise ValueError(f"n_bins must be a power of two >= 2, got {self.n_bins}")
        if self.n_bins > 256:
            raise ValueError("n_bins > 256 cannot be packed one code per byte")
        if self.t_window_ps % self.n_bins:
            raise ValueError(
                f"t_window_ps = {self.t_window_ps} is not divisible by n_bins = {self.n_bins}"
            )

    @property
    def bin_width_ps(self) -> int:
        return self.t_window_ps // self.n_bins

    @property
    def bits_per_code(self) -> int:
        return self.n_bins.bit_length() - 1


@dataclass(eq=False)
class BitstreamRecord:
    """Extracted codes plus diagnostics.

    ``n_cycles_observed`` counts the clock cycles spanned by the acquisition;
    ``n_collisions`` counts events dropped because their cycle had already
    emitted a code (always 0 for dead-time-compliant input).
    """

    codes: np.ndarray
    bytes: bytes
    n_cycles_observed: int
    n_collisions: int


@dataclass(eq=False)
class BinHistogram:
    counts: np.ndarray
    total: int


def extract_bits(series: TimestampSeries, cfg: ExtractionConfig = ExtractionConfig()) -> BitstreamRecord:
    """Assign each detection its time-bin code; keep the first event per clock cycle.

    For an event at t: cycle = t // T_W, code = (t mod T_W) // (T_W / n_bins).
    Later events in an already-coded cycle are dropped and counted as
    collisions (the detector would have been dead).
    """
    t = series.times_ps
    if t.size and np.any(np.diff(t) <= 0):
        raise ValueError("input timestamps must be strictly increasing")
    cycles = t // cfg.t_window_ps
    codes = (t % cfg.t_window_ps) // cfg.bin_width_ps
    first_in_cycle = np.r_[True, np.diff(cycles) > 0] if t.size else np.empty(0, dtype=bool)
    kept = codes[first_in_cycle].astype(np.uint8)
    return BitstreamRecord(
        codes=kept,
        bytes=kept.tobytes(),
        n_cycles_observed=int(series.duration_ps // cfg.t_window_ps),
        n_collisions=int(t.size - kept.size),
    )


def histogram(rec: BitstreamRecord | np.ndarray, n_bins: int = DEFAULT_N_BINS) -> BinHistogram:
    """Occupancy count per bin index (accepts a record or a bare code array)."""
    codes = np.asarray(getattr(rec, "codes", rec))
    if codes.size and int(codes.max()) >= n_bins:
        raise ValueError(f"code {int(codes.max())} out of range for n_bins = {n_bins}")
    counts = np.bincount(codes, minlength=n_bins).astype(np.int64)
    return BinHistogram(counts=counts, total=int(counts.sum()))


def min_entropy(h: BinHistogram) -> float:
    """Per-bit min-entropy of the empirical bin distribution, in [0, 1].

    H = -log2(max_i P_i) / log2(n_bins): the min-entropy of the code
    distribution normalized by the code width in bits.
    """
    if h.total <= 0:
        raise ValueError("histogram is empty")
    n_bins = len(h.counts)
    max_p = float(h.counts.max()) / h.total
    return -np.log2(max_p) / np.log2(n_bins)


def unpack_bits_msb(data: bytes | np.ndarray) -> np.ndarray:
    """Byte string -> array of bits, most significant bit of each byte first."""
    arr = np.frombuffer(data, dtype=np.uint8) if isinstance(data, (bytes, bytearray)) else np.asarray(data, dtype=np.uint8)
    return np.unpackbits(arr)


def write_bitstream(path: str | Path, rec: BitstreamRecord) -> None:
    Path(path).write_bytes(rec.bytes)


def read_bitstream(path: str | Path) -> np.ndarray:
    """Raw byte file -> code array (one code per byte)."""
    return np.frombuffer(Path(path).read_bytes(), dtype=np.uint8)


def histogram_csv(h: BinHistogram) -> str:
    """Histogram as ``bin,count,probability`` CSV (the bin-occupancy plot data)."""
    lines = ["bin,count,probability\n"]
    total = h.total if h.total else 1
    for i, c in enumerate(h.counts):
        lines.append(f"{i},{int(c)},{int(c) / total:.10g}\n")
    return "".join(lines)
