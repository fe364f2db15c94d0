"""Synthetic detection timestamp streams: Poisson arrivals, TDC quantization, dead time.

Stands in for the telescope + single-photon detector + time-to-digital
converter chain.  Signal and background are both Poissonian, so only their
summed rate is observable; arrivals are drawn as one homogeneous process
and optionally labeled by origin for diagnostics.  All timestamps are
integer picoseconds on the TDC tick grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_DEAD_TIME_PS = 45_000  # detector recovery time, 45 ns
DEFAULT_TICK_PS = 25  # TDC resolution

# Event-count guard: expected arrivals above this abort instead of thrashing memory.
MAX_EXPECTED_EVENTS = 2**28

RNG_ALGORITHM = "pcg64"  # numpy PCG64; seeded streams are platform-stable

CPT1_MAGIC = b"CPT1\x00\x00\x00\x00"

_DRAW_CHUNK = 1 << 16


class CapacityError(ValueError):
    """Requested stream would exceed the event-count capacity."""


@dataclass(frozen=True)
class SimConfig:
    """Configuration for one simulated acquisition run."""

    signal_rate_hz: float
    background_rate_hz: float
    duration_s: float
    dead_time_ps: int = DEFAULT_DEAD_TIME_PS
    tick_ps: int = DEFAULT_TICK_PS
    seed: int = 0
    label_origins: bool = False

    def __post_init__(self):
        if self.signal_rate_hz < 0 or self.background_rate_hz < 0:
            raise ValueError("rates must be >= 0")
        if self.duration_s <= 0:
            raise ValueError("duration must be positive")
        if self.dead_time_ps < 0:
            raise ValueError("dead_time_ps must be >= 0")
        if self.tick_ps <= 0:
            raise ValueError("tick_ps must be positive")

    @property
    def total_rate_hz(self) -> float:
        return self.signal_rate_hz + self.background_rate_hz


@dataclass(eq=False)
class TimestampSeries:
    """Strictly increasing detection times in integer picoseconds on the tick grid.

    ``origins`` (optional diagnostics) holds 0 for signal and 1 for
    background, aligned with ``times_ps``.
    """

    times_ps: np.ndarray
    tick_ps: int
    duration_ps: int
    origins: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.times_ps = np.asarray(self.times_ps, dtype=np.int64)
        if self.times_ps.ndim != 1:
            raise ValueError("times_ps must be one-dimensional")
        if self.times_ps.size:
            if self.times_ps[0] < 0:
                raise ValueError("timestamps must be non-negative")
            if np.any(np.diff(self.times_ps) <= 0):
                raise ValueError("timestamps must be strictly increasing")
            if np.any(self.times_ps % self.tick_ps):
                raise ValueError(f"timestamps must be multiples of tick_ps = {self.tick_ps}")
            if self.times_ps[-1] >= self.duration_ps:
                raise ValueError("timestamps must be < duration_ps")
        if self.origins is not None and len(self.origins) != len(self.times_ps):
            raise ValueError("origins must align with times_ps")

    def __len__(self) -> int:
        return self.times_ps.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimestampSeries):
            return NotImplemented
        return (
            self.tick_ps == other.tick_ps
            and self.duration_ps == other.duration_ps
            and np.array_equal(self.times_ps, other.times_ps)
        )


def _greedy_keep_mask(times: np.ndarray, dead_ps: int) -> np.ndarray:
    """Boolean mask of events kept by a non-paralyzable dead-time scan.

    Greedy keep-first: an event survives iff it is >= dead_ps after the last
    surviving event.  Implemented as iterative passes; each pass drops the
    first offender of every run of too-close events, so the result equals
    the sequential scan.
    """
    keep = np.ones(times.size, dtype=bool)
    if times.size < 2 or dead_ps <= 0:
        return keep
    while True:
        kept_idx = np.flatnonzero(keep)
        gaps = np.diff(times[kept_idx])
        bad = np.flatnonzero(gaps < dead_ps) + 1  # positions within kept_idx
        if bad.size == 0:
            return keep
        # only offenders whose predecessor survives this pass
        leaders = bad[np.r_[True, np.diff(bad) != 1]]
        keep[kept_idx[leaders]] = False


def apply_dead_time(series: TimestampSeries, dead_time_ps: int) -> TimestampSeries:
    """Filter a series through a non-paralyzable detector dead time.

    Keeps an event iff it is at least ``dead_time_ps`` after the last kept
    event (boundary gaps equal to the dead time survive); the first event is
    always kept.
    """
    if dead_time_ps < 0:
        raise ValueError("dead_time_ps must be >= 0")
    t = series.times_ps
    if t.size and np.any(np.diff(t) <= 0):
        raise ValueError("input timestamps must be strictly increasing")
    keep = _greedy_keep_mask(t, dead_time_ps)
    return TimestampSeries(
        times_ps=t[keep],
        tick_ps=series.tick_ps,
        duration_ps=series.duration_ps,
        origins=None if series.origins is None else series.origins[keep],
    )


def simulate_stream(config: SimConfig) -> TimestampSeries:
    """Simulate one acquisition: Poisson arrivals, tick quantization, dead-time filter.

    Arrival gaps are exponential at the summed rate, drawn from a seeded
    PCG64 generator in fixed-size chunks (the chunking is part of the
    deterministic contract: one config, one stream, on any platform).
    Arrivals are floored to the tick grid, coincident ticks collapse to a
    single detection, and the dead-time scan runs last.
    """
    rate = config.total_rate_hz
    duration_ps = int(round(config.duration_s * 1e12))
    if rate * config.duration_s > MAX_EXPECTED_EVENTS:
        raise CapacityError(
            f"expected {rate * config.duration_s:.3g} events exceeds capacity {MAX_EXPECTED_EVENTS}"
        )
    if rate == 0.0:
        return TimestampSeries(np.empty(0, dtype=np.int64), config.tick_ps, duration_ps)

    rng = np.random.Generator(np.random.PCG64(config.seed))
    scale_ps = 1e12 / rate
    chunks = []
    t_last = 0.0
    while t_last < duration_ps:
        gaps = rng.exponential(scale=scale_ps, size=_DRAW_CHUNK)
        arrivals = t_last + np.cumsum(gaps)
        chunks.append(arrivals)
        t_last = arrivals[-1]
    arrivals = np.concatenate(chunks)
    arrivals = arrivals[arrivals < duration_ps]

    ticks = (arrivals / config.tick_ps).astype(np.int64)
    times = ticks * config.tick_ps
    fresh = np.r_[True, np.diff(times) > 0]  # coincident ticks: one detection
    times = times[fresh]

    origins = None
    if config.label_origins and times.size:
        p_bg = config.background_rate_hz / rate
        origins = (rng.random(times.size) < p_bg).astype(np.uint8)

    series = TimestampSeries(times, config.tick_ps, duration_ps, origins=origins)
    return apply_dead_time(series, config.dead_time_ps)


def write_timestamps(path: str | Path, series: TimestampSeries) -> None:
    """Write a series to disk: binary tick-count format for ``.cpt1``, text otherwise.

    The binary layout is an 8-byte magic followed by unsigned 64-bit
    little-endian tick counts (units of tick_ps), strictly increasing.  The
    text format is one decimal picosecond value per line.
    """
    path = Path(path)
    if path.suffix == ".cpt1":
        ticks = (series.times_ps // series.tick_ps).astype("<u8")
        path.write_bytes(CPT1_MAGIC + ticks.tobytes())
    else:
        path.write_text("".join(f"{t}\n" for t in series.times_ps), encoding="ascii")


def read_timestamps(
    path: str | Path,
    tick_ps: int = DEFAULT_TICK_PS,
    duration_ps: int | None = None,
) -> TimestampSeries:
    """Read a timestamp file (binary or text detected by magic).

    Neither format carries the tick size or acquisition duration, so they
    are supplied by the caller (the run manifest records both); the default
    duration is one tick past the last event.
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw[: len(CPT1_MAGIC)] == CPT1_MAGIC:
        ticks = np.frombuffer(raw[len(CPT1_MAGIC):], dtype="<u8")
        times = ticks.astype(np.int64) * tick_ps
    else:
        times = np.array(
            [int(line) for line in raw.decode("ascii").split()], dtype=np.int64
        )
    if duration_ps is None:
        duration_ps = int(times[-1]) + tick_ps if times.size else tick_ps
    return TimestampSeries(times, tick_ps, duration_ps)
