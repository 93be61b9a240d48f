"""
Billiard spectrum {alpha m^2 + n^2 : m, n >= 1} and its minimal gaps.

Levels carry outward-rounded enclosures [lo, hi] / 2**bits built from a
fixed-point enclosure of alpha. They are produced as a stream: a heap merge
over the per-m sequences, holding one pending level per row. A level is
released only once its enclosure is disjoint from both neighbours. When two
neighbours overlap the stream is regenerated at twice the precision and the
levels already released are skipped, so precision never drops along the
stream. Candidate minimal gaps whose enclosures overlap are compared exactly
in Z[alpha].
"""
import heapq
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from contextlib import closing
from dataclasses import dataclass
from math import isqrt
from typing import Iterator, List, Optional, Sequence, Tuple

import mpmath

from arithmetic.conf import get_setting
from arithmetic.exceptions import PrecisionCapExceededError
from arithmetic.qfield import QuadElem, fixed_point_bounds

logger = logging.getLogger(__name__)

# Working precision is at least 2 log2(lambda_max) + SEPARATION_BITS.
SEPARATION_BITS = 64
BOUND_GROWTH = 1.25

# (lo, hi, m, n); sorting on the tuple is total and independent of partitioning.
RawLevel = Tuple[int, int, int, int]


@dataclass(frozen=True)
class SpectrumLevel:
    m: int
    n: int
    lo: int
    hi: int
    bits: int

    def exact(self, alpha: QuadElem) -> QuadElem:
        return alpha * (self.m * self.m) + self.n * self.n

    def scaled(self, bits: int) -> Tuple[int, int]:
        """(lo, hi) rescaled to a finer precision"""
        shift = bits - self.bits
        if shift < 0:
            raise ValueError(f"cannot rescale a {self.bits}-bit enclosure down to {bits} bits")
        return self.lo << shift, self.hi << shift

    def approx(self) -> mpmath.mpf:
        with mpmath.workprec(self.bits + 16):
            return mpmath.ldexp(mpmath.mpf(self.lo + self.hi), -self.bits - 1)


@dataclass(frozen=True)
class GapRecord:
    """Gap between neighbours; upper.bits >= lower.bits along the stream"""

    index: int
    lower: SpectrumLevel
    upper: SpectrumLevel

    @property
    def bits(self) -> int:
        return max(self.lower.bits, self.upper.bits)

    def enclosure_at(self, bits: int) -> Tuple[int, int]:
        lower_lo, lower_hi = self.lower.scaled(bits)
        upper_lo, upper_hi = self.upper.scaled(bits)
        return upper_lo - lower_hi, upper_hi - lower_lo

    @property
    def lo(self) -> int:
        return self.enclosure_at(self.bits)[0]

    @property
    def hi(self) -> int:
        return self.enclosure_at(self.bits)[1]

    @property
    def pair(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return (self.lower.m, self.lower.n), (self.upper.m, self.upper.n)

    def coefficients(self) -> Tuple[int, int]:
        """(a, b) with gap = a * alpha + b"""
        return self.upper.m ** 2 - self.lower.m ** 2, self.upper.n ** 2 - self.lower.n ** 2

    def exact(self, alpha: QuadElem) -> QuadElem:
        a, b = self.coefficients()
        return alpha * a + b

    def approx(self) -> mpmath.mpf:
        lo, hi = self.enclosure_at(self.bits)
        with mpmath.workprec(self.bits + 16):
            return mpmath.ldexp(mpmath.mpf(lo + hi), -self.bits - 1)


@dataclass(frozen=True)
class ProfileRow:
    N: int
    gap: Optional[GapRecord]


def _check_alpha(alpha: QuadElem):
    if alpha.is_rational or alpha.sign() <= 0:
        raise ValueError(f"alpha must be a positive irrational, got {alpha}")


def _count_below(alpha_hi: int, bound: int, scale: int) -> int:
    """Number of levels certainly <= bound"""
    total, m = 0, 1
    top = bound * scale
    while True:
        rest = top - alpha_hi * m * m
        if rest < scale:
            return total
        total += isqrt(rest // scale)
        m += 1


def _level_bound(alpha: QuadElem, count: int) -> int:
    """An integer X with at least `count` levels <= X"""
    alpha_lo, alpha_hi = fixed_point_bounds(alpha, SEPARATION_BITS)
    scale = 1 << SEPARATION_BITS
    approx = alpha_hi / scale
    # Weyl growth plus the boundary terms of the lattice count.
    bound = math.ceil(4 * math.sqrt(approx) * count / math.pi + 2 * (1 + approx) * math.sqrt(count) + approx + 1)
    while _count_below(alpha_hi, bound, scale) < count:
        bound = math.ceil(bound * BOUND_GROWTH)
    return bound


def _m_limit(alpha_lo: int, bound: int, scale: int) -> int:
    """Largest m whose first level may lie below bound"""
    return isqrt((bound - 1) * scale // alpha_lo) if bound > 1 else 0


def _levels_for_m(m: int, alpha_lo: int, alpha_hi: int, scale: int, start: int, stop: int) -> Iterator[RawLevel]:
    """Row m, restricted to levels whose lower end lies in [start, stop)"""
    base_lo, base_hi = alpha_lo * m * m, alpha_hi * m * m
    n = max(1, isqrt(max(start - base_lo, 0) // scale))
    while base_lo + n * n * scale < start:
        n += 1
    while True:
        shift = n * n * scale
        if base_lo + shift >= stop:
            return
        yield base_lo + shift, base_hi + shift, m, n
        n += 1


def _merge_partition(m_range: range, alpha_lo: int, alpha_hi: int, scale: int,
                     start: int, stop: int) -> Iterator[RawLevel]:
    """Lazy k-way heap merge of the sorted per-m sequences in one m-range"""
    streams = [_levels_for_m(m, alpha_lo, alpha_hi, scale, start, stop) for m in m_range]
    return heapq.merge(*streams)


def _partitions(m_max: int, workers: int) -> List[range]:
    workers = max(1, min(workers, m_max))
    step = -(-m_max // workers)
    return [range(start, min(start + step, m_max + 1)) for start in range(1, m_max + 1, step)]


def _raw_stream(alpha_lo: int, alpha_hi: int, bound: int, bits: int, count: int, workers: int) -> Iterator[RawLevel]:
    """
    Every level with lower end <= bound, in tuple order.

    With several partitions the value axis is cut into windows of about
    QA_SPECTRUM_WINDOW_LEVELS levels. Each window is generated per partition
    on the pool and merged before the next one starts.
    """
    scale = 1 << bits
    top = bound * scale + 1
    parts = _partitions(_m_limit(alpha_lo, bound, scale), workers)
    if len(parts) == 1:
        yield from _merge_partition(parts[0], alpha_lo, alpha_hi, scale, 0, top)
        return

    windows = -(-count // get_setting('QA_SPECTRUM_WINDOW_LEVELS', 1 << 15))
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        for k in range(windows):
            start, stop = top * k // windows, top * (k + 1) // windows

            def generate(part, start=start, stop=stop):
                return list(_merge_partition(part, alpha_lo, alpha_hi, scale, start, stop))

            yield from heapq.merge(*pool.map(generate, parts))


def required_precision(bound: int) -> int:
    """Precision rule: 2 log2(lambda_max) + SEPARATION_BITS"""
    return 2 * bound.bit_length() + SEPARATION_BITS


def _certified_levels(alpha: QuadElem, count: int, bound: int, bits: int, cap: int,
                      workers: int) -> Iterator[SpectrumLevel]:
    released = 0
    while True:
        if bits > cap:
            raise PrecisionCapExceededError(f"spectrum needs more than the {cap}-bit cap (asked for {bits})")
        alpha_lo, alpha_hi = fixed_point_bounds(alpha, bits)
        pending, position, overlap = None, 0, False
        with closing(_raw_stream(alpha_lo, alpha_hi, bound, bits, count, workers)) as stream:
            for lo, hi, m, n in stream:
                if pending is not None:
                    if lo <= pending.hi:
                        logger.info(f"Level enclosures overlap near (m, n) = ({m}, {n}) at {bits} bits")
                        overlap = True
                        break
                    if position == released:
                        yield pending
                        released += 1
                        if released == count:
                            return
                    position += 1
                pending = SpectrumLevel(m=m, n=n, lo=lo, hi=hi, bits=bits)
        if not overlap:
            if pending is not None and position == released:
                yield pending
                released += 1
            if released == count:
                return
            raise ArithmeticError(f"level bound {bound} produced only {released} of {count} levels")
        bits *= 2


def enumerate_levels(alpha: QuadElem, count: int, precision_bits: int = None,
                     workers: int = None) -> Iterator[SpectrumLevel]:
    """
    Stream of the first `count` levels of {alpha m^2 + n^2} in strictly
    increasing order.

    The m-range is split into `workers` contiguous partitions generated on a
    thread pool; the stream does not depend on the partitioning.
    """
    _check_alpha(alpha)
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    workers = workers or get_setting('QA_SPECTRUM_WORKERS', 1)
    cap = get_setting('QA_SPECTRUM_PRECISION_CAP_BITS', 8192)

    bound = _level_bound(alpha, count)
    bits = max(precision_bits or get_setting('QA_DEFAULT_PRECISION_BITS', 192), required_precision(bound))
    if bits > cap:
        raise PrecisionCapExceededError(f"spectrum needs more than the {cap}-bit cap (asked for {bits})")
    logger.info(f"Enumerating {count} levels of {alpha} m^2 + n^2 from {bits} bits")
    return _certified_levels(alpha, count, bound, bits, cap, workers)


def _smaller_gap(candidate: GapRecord, best: GapRecord, alpha: QuadElem) -> bool:
    """Strictly smaller; ties keep the earlier index"""
    bits = max(candidate.bits, best.bits)
    candidate_lo, candidate_hi = candidate.enclosure_at(bits)
    best_lo, best_hi = best.enclosure_at(bits)
    if candidate_hi < best_lo:
        return True
    if candidate_lo > best_hi:
        return False
    a1, b1 = candidate.coefficients()
    a2, b2 = best.coefficients()
    return (alpha * (a1 - a2) + (b1 - b2)).sign() < 0


def min_gap_profile(alpha: QuadElem, checkpoints: Sequence[int], precision_bits: int = None,
                    workers: int = None) -> List[ProfileRow]:
    """delta_min(N) with its argmin gap for each checkpoint N, in one pass over the stream"""
    checkpoints = list(checkpoints)
    if not checkpoints:
        raise ValueError("at least one checkpoint is required")
    if checkpoints[0] < 1 or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError(f"checkpoints must be strictly increasing positive integers, got {checkpoints}")

    rows = []
    pending = iter(checkpoints)
    target = next(pending)
    previous = best = None
    for N, level in enumerate(enumerate_levels(alpha, checkpoints[-1], precision_bits, workers), start=1):
        if previous is not None:
            gap = GapRecord(index=N - 1, lower=previous, upper=level)
            if best is None or _smaller_gap(gap, best, alpha):
                best = gap
        if N == target:
            rows.append(ProfileRow(N=N, gap=best))
            target = next(pending, None)
        previous = level
    return rows


def weyl_check(alpha: QuadElem, N: int, precision_bits: int = None) -> float:
    """lambda_N * pi / (4 sqrt(alpha) N), which tends to 1"""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if N < 10 ** 4:
        logger.warning(f"weyl_check with N={N}: boundary terms are not yet negligible")
    (last,) = deque(enumerate_levels(alpha, N, precision_bits), maxlen=1)
    return weyl_ratio(alpha, last, N)


def weyl_ratio(alpha: QuadElem, level: SpectrumLevel, N: int) -> float:
    """lambda_N * pi / (4 sqrt(alpha) N) for a known N-th level"""
    alpha_lo, alpha_hi = fixed_point_bounds(alpha, 64)
    with mpmath.workprec(64):
        root_alpha = mpmath.sqrt(mpmath.ldexp(mpmath.mpf(alpha_lo + alpha_hi), -65))
        ratio = level.approx() * mpmath.pi / (4 * root_alpha * N)
    return float(ratio)
