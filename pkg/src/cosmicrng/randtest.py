"""Randomness certification: eight tests from the NIST SP 800-22 battery.

Each test maps a binary sequence to one or two p-values; a sequence passes
a test when every p-value is at least ``ALPHA`` (0.01).  ``run_battery``
aggregates many equal-length sequences the way the NIST suite's assessment
does: per-test pass proportion with its three-sigma acceptance band, and a
chi-square check that the p-values are uniform on [0, 1].

Sequences can be given as numpy arrays, lists, or '0'/'1' strings.  Bits
unpacked from the extraction pipeline's byte files use the most significant
bit of each byte first (see ``extract.unpack_bits_msb``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .special import erfc, igamc, normal_cdf

ALPHA = 0.01
UNIFORMITY_ALPHA = 1e-4
MIN_SEQUENCES_FOR_UNIFORMITY = 55

BATTERY_TEST_NAMES = (
    "Frequency",
    "BlockFrequency",
    "CumulativeSums",
    "Runs",
    "LongestRun",
    "FFT",
    "Serial",
    "ApproximateEntropy",
)


@dataclass(frozen=True)
class TestResult:
    test_name: str
    p_values: tuple[float, ...]
    passed: bool


def _result(name: str, *p_values: float) -> TestResult:
    ps = tuple(min(1.0, max(0.0, p)) for p in p_values)
    return TestResult(test_name=name, p_values=ps, passed=all(p >= ALPHA for p in ps))


def as_bits(seq) -> np.ndarray:
    """Coerce a sequence of bits ('0'/'1' string, list, or array) to uint8."""
    if isinstance(seq, str):
        arr = np.frombuffer(seq.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(seq, dtype=np.uint8)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("bit sequence must be non-empty and one-dimensional")
    if arr.max() > 1:
        raise ValueError("bit sequence may contain only 0 and 1")
    return arr


def _require(n: int, minimum: int, test: str) -> None:
    if n < minimum:
        raise ValueError(f"{test} requires at least {minimum} bits, got {n}")


def frequency_test(seq) -> TestResult:
    """Monobit test: S = sum(2b - 1), p = erfc(|S| / sqrt(2n))."""
    bits = as_bits(seq)
    n = bits.size
    s = 2.0 * int(bits.sum()) - n
    return _result("Frequency", erfc(abs(s) / math.sqrt(n) / math.sqrt(2.0)))


def block_frequency_test(seq, m_block: int = 128) -> TestResult:
    """Proportion of ones within m-bit blocks; chi-square against 1/2 per block."""
    bits = as_bits(seq)
    n = bits.size
    if m_block < 1:
        raise ValueError("m_block must be >= 1")
    if m_block > n:
        raise ValueError(f"block frequency requires n >= m_block = {m_block}, got {n}")
    n_blocks = n // m_block
    pi = bits[: n_blocks * m_block].reshape(n_blocks, m_block).mean(axis=1)
    chi2 = 4.0 * m_block * float(((pi - 0.5) ** 2).sum())
    return _result("BlockFrequency", igamc(n_blocks / 2.0, chi2 / 2.0))


def runs_test(seq) -> TestResult:
    """Total number of runs versus its expectation under independence.

    Skipped (p = 0) when the ones fraction already fails the monobit
    prerequisite |pi - 1/2| >= 2/sqrt(n).
    """
    bits = as_bits(seq)
    n = bits.size
    _require(n, 100, "runs test")
    pi = float(bits.mean())
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return _result("Runs", 0.0)
    v = int(np.count_nonzero(np.diff(bits))) + 1
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return _result("Runs", erfc(num / den))


_LONGEST_RUN_REGIMES = (
    # (min_n, block_m, lowest class, highest class, class probabilities)
    (128, 8, 1, 4, (0.2148, 0.3672, 0.2305, 0.1875)),
    (6272, 128, 4, 9, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (750_000, 10_000, 10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
)


def _longest_one_runs_per_block(blocks: np.ndarray) -> np.ndarray:
    """Longest run of ones in each row of a 0/1 matrix."""
    n_blocks, m = blocks.shape
    # separate rows with a zero column, then run-length encode the flat array
    flat = np.concatenate([blocks, np.zeros((n_blocks, 1), dtype=np.uint8)], axis=1).ravel()
    edges = np.diff(np.r_[np.uint8(0), flat])
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == 255)  # uint8 wraparound of -1
    longest = np.zeros(n_blocks, dtype=np.int64)
    np.maximum.at(longest, starts // (m + 1), ends - starts)
    return longest


def longest_run_test(seq) -> TestResult:
    """Distribution of the longest run of ones per block, chi-square over NIST classes."""
    bits = as_bits(seq)
    n = bits.size
    _require(n, 128, "longest-run test")
    for min_n, m, lo, hi, pis in reversed(_LONGEST_RUN_REGIMES):
        if n >= min_n:
            break
    n_blocks = n // m
    blocks = bits[: n_blocks * m].reshape(n_blocks, m)
    longest = np.clip(_longest_one_runs_per_block(blocks), lo, hi)
    counts = np.bincount(longest - lo, minlength=hi - lo + 1)
    expected = n_blocks * np.asarray(pis)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    k = len(pis) - 1
    return _result("LongestRun", igamc(k / 2.0, chi2 / 2.0))


def _cusum_p(z: int, n: int) -> float:
    zn = z / math.sqrt(n)
    k1 = np.arange(math.floor((-n / z + 1) / 4), math.floor((n / z - 1) / 4) + 1)
    k2 = np.arange(math.floor((-n / z - 3) / 4), math.floor((n / z - 1) / 4) + 1)
    phi = np.vectorize(normal_cdf)
    p = 1.0
    if k1.size:
        p -= float((phi((4 * k1 + 1) * zn) - phi((4 * k1 - 1) * zn)).sum())
    if k2.size:
        p += float((phi((4 * k2 + 3) * zn) - phi((4 * k2 + 1) * zn)).sum())
    return p


def cumulative_sums_test(seq, direction: str = "both") -> TestResult:
    """Maximum excursion of the +-1 random walk, forward and/or backward."""
    bits = as_bits(seq)
    n = bits.size
    _require(n, 100, "cumulative-sums test")
    if direction not in ("forward", "backward", "both"):
        raise ValueError(f"direction must be forward, backward, or both, got {direction!r}")
    x = bits.astype(np.int64) * 2 - 1
    ps = []
    if direction in ("forward", "both"):
        ps.append(_cusum_p(int(np.abs(np.cumsum(x)).max()), n))
    if direction in ("backward", "both"):
        ps.append(_cusum_p(int(np.abs(np.cumsum(x[::-1])).max()), n))
    return _result("CumulativeSums", *ps)


def spectral_dft_test(seq) -> TestResult:
    """Discrete Fourier transform test: fraction of low peaks versus the 95% threshold."""
    bits = as_bits(seq)
    n = bits.size
    _require(n, 1000, "spectral test")
    x = bits.astype(np.float64) * 2.0 - 1.0
    mods = np.abs(np.fft.rfft(x)[: n // 2])
    threshold = math.sqrt(n * math.log(1.0 / 0.05))
    n0 = 0.95 * n / 2.0
    n1 = int((mods < threshold).sum())
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return _result("FFT", erfc(abs(d) / math.sqrt(2.0)))


def _pattern_counts(bits: np.ndarray, m: int) -> np.ndarray:
    """Occurrences of each m-bit pattern in the cyclically extended sequence."""
    n = bits.size
    ext = np.concatenate([bits, bits[: m - 1]]) if m > 1 else bits
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j : j + n]
    return np.bincount(idx, minlength=1 << m)


def _psi_squared(counts: np.ndarray, n: int) -> float:
    m_patterns = counts.size
    return float(m_patterns / n * (counts.astype(np.float64) ** 2).sum() - n)


def serial_test(seq, m: int = 16) -> TestResult:
    """Overlapping m-bit pattern uniformity via first and second psi^2 differences.

    Returns two p-values for m >= 2; for m = 1 the first difference alone is
    defined and the test reduces to the monobit statistic.
    """
    bits = as_bits(seq)
    n = bits.size
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < 1 << (m + 3):
        raise ValueError(
            f"serial test with m = {m} requires at least {1 << (m + 3)} bits "
            f"(m < log2(n) - 2), got {n}"
        )
    counts_m = _pattern_counts(bits, m)
    psi_m = _psi_squared(counts_m, n)
    counts_m1 = counts_m.reshape(-1, 2).sum(axis=1)
    psi_m1 = _psi_squared(counts_m1, n) if m >= 2 else 0.0
    d1 = psi_m - psi_m1
    if m == 1:
        return _result("Serial", igamc(0.5, d1 / 2.0))
    psi_m2 = _psi_squared(counts_m1.reshape(-1, 2).sum(axis=1), n) if m >= 3 else 0.0
    d2 = psi_m - 2.0 * psi_m1 + psi_m2
    return _result(
        "Serial",
        igamc(2.0 ** (m - 2), d1 / 2.0),
        igamc(2.0 ** (m - 3), d2 / 2.0),
    )


def approximate_entropy_test(seq, m: int = 10) -> TestResult:
    """Approximate entropy of overlapping m- and (m+1)-bit patterns versus ln 2."""
    bits = as_bits(seq)
    n = bits.size
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < 1 << (m + 6):
        raise ValueError(
            f"approximate-entropy test with m = {m} requires at least {1 << (m + 6)} bits "
            f"(m < log2(n) - 5), got {n}"
        )

    def phi(k: int) -> float:
        counts = _pattern_counts(bits, k)
        pos = counts[counts > 0].astype(np.float64) / n
        return float((pos * np.log(pos)).sum())

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return _result("ApproximateEntropy", igamc(2.0 ** (m - 1), chi2 / 2.0))


@dataclass(frozen=True)
class TestSummary:
    """Aggregate outcome of one test across a set of sequences."""

    p_uniformity: float | None
    proportion: float
    proportion_band: tuple[float, float]
    passed: bool


@dataclass(frozen=True)
class BatteryReport:
    n_sequences: int
    sequence_length: int
    results: dict[str, TestSummary]
    passed: bool
    warnings: tuple[str, ...] = ()

    def as_json_dict(self) -> dict:
        return {
            name: {
                "p_uniformity": s.p_uniformity,
                "proportion": s.proportion,
                "proportion_band": [s.proportion_band[0], s.proportion_band[1]],
                "pass": s.passed,
            }
            for name, s in self.results.items()
        }


def _uniformity_p(p_values: np.ndarray) -> float:
    """Chi-square test that p-values are uniform over ten equal deciles."""
    counts = np.histogram(p_values, bins=10, range=(0.0, 1.0))[0]
    expected = p_values.size / 10.0
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    return igamc(4.5, chi2 / 2.0)


def run_battery(
    sequences: Iterable,
    m_block: int = 128,
    m_serial: int = 16,
    m_apen: int = 10,
) -> BatteryReport:
    """Run all eight tests over equal-length sequences and aggregate NIST-style.

    Per test: the pass proportion (a sequence passes when all of the test's
    p-values are >= 0.01) with the binomial three-sigma band around 0.99,
    and the p-value uniformity chi-square.  For tests that produce several
    p-values per sequence the uniformity is computed per p-value slot and
    the worst outcome is reported.  Uniformity needs at least 55 sequences;
    with fewer, it is omitted with a warning and only proportions count.
    """
    bit_arrays = [as_bits(s) for s in sequences]
    if not bit_arrays:
        raise ValueError("battery requires at least one sequence")
    n = bit_arrays[0].size
    if any(b.size != n for b in bit_arrays):
        raise ValueError("all sequences must have the same length")

    warnings: list[str] = []
    uniformity_ok = len(bit_arrays) >= MIN_SEQUENCES_FOR_UNIFORMITY
    if not uniformity_ok:
        warnings.append(
            f"{len(bit_arrays)} sequences < {MIN_SEQUENCES_FOR_UNIFORMITY}: "
            "p-value uniformity not assessed"
        )

    tests: list[tuple[str, Callable[[np.ndarray], TestResult]]] = [
        ("Frequency", frequency_test),
        ("BlockFrequency", lambda s: block_frequency_test(s, m_block)),
        ("CumulativeSums", cumulative_sums_test),
        ("Runs", runs_test),
        ("LongestRun", longest_run_test),
        ("FFT", spectral_dft_test),
        ("Serial", lambda s: serial_test(s, m_serial)),
        ("ApproximateEntropy", lambda s: approximate_entropy_test(s, m_apen)),
    ]

    s_count = len(bit_arrays)
    p_hat = 1.0 - ALPHA
    half_band = 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / s_count)
    band = (p_hat - half_band, p_hat + half_band)

    results: dict[str, TestSummary] = {}
    for name, fn in tests:
        per_seq = [fn(b) for b in bit_arrays]
        proportion = sum(r.passed for r in per_seq) / s_count
        p_uniformity = None
        if uniformity_ok:
            n_slots = len(per_seq[0].p_values)
            p_uniformity = min(
                _uniformity_p(np.array([r.p_values[slot] for r in per_seq]))
                for slot in range(n_slots)
            )
        ok = proportion >= band[0] and (p_uniformity is None or p_uniformity >= UNIFORMITY_ALPHA)
        results[name] = TestSummary(p_uniformity, proportion, band, ok)

    return BatteryReport(
        n_sequences=s_count,
        sequence_length=n,
        results=results,
        passed=all(s.passed for s in results.values()),
        warnings=tuple(warnings),
    )


def split_sequences(bits: np.ndarray, n_sequences: int, seq_len: int) -> list[np.ndarray]:
    """Cut a bit array into ``n_sequences`` consecutive sequences of ``seq_len`` bits."""
    needed = n_sequences * seq_len
    if bits.size < needed:
        raise ValueError(f"need {needed} bits for {n_sequences} x {seq_len}, got {bits.size}")
    return [bits[i * seq_len : (i + 1) * seq_len] for i in range(n_sequences)]
