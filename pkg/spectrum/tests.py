import csv
import io
import itertools
import json
import unittest
from collections.abc import Iterator
from fractions import Fraction
from io import StringIO

from decouple import config
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from arithmetic.exceptions import PrecisionCapExceededError
from arithmetic.qfield import field_for, fixed_point_bounds

from .serializers import CSV_COLUMNS, ProfileRowSerializer
from .services import (
    GapRecord,
    SpectrumLevel,
    _certified_levels,
    _level_bound,
    enumerate_levels,
    min_gap_profile,
    weyl_check,
)

SLOW_TESTS = config('QA_SLOW_TESTS', default=False, cast=bool)

K2 = field_for(2)
K5 = field_for(5)
ROOT2 = K2.sqrt_d()
ZETA2 = K2.element(3, 2)
GOLDEN = K5.element(Fraction(1, 2), Fraction(1, 2))


def naive_levels(alpha, count):
    """Sort-everything oracle: exact values of the first `count` levels"""
    approx = float(alpha.u) + float(alpha.v) * alpha.field.D ** 0.5
    cutoff = 4.0
    while True:
        candidates = [
            (m, n) for m in range(1, int((cutoff / approx) ** 0.5) + 2)
            for n in range(1, int(cutoff ** 0.5) + 2)
            if approx * m * m + n * n <= cutoff
        ]
        if len(candidates) >= count + 20:
            break
        cutoff *= 1.5
    exact = sorted((alpha * (m * m) + n * n, m, n) for m, n in candidates)
    return exact[:count]


def naive_min_gap(alpha, count):
    """(index, pair, gap) of the first smallest gap among the first `count` levels"""
    levels = naive_levels(alpha, count)
    best = None
    for i in range(len(levels) - 1):
        gap = levels[i + 1][0] - levels[i][0]
        if best is None or gap < best[2]:
            pair = ((levels[i][1], levels[i][2]), (levels[i + 1][1], levels[i + 1][2]))
            best = (i + 1, pair, gap)
    return best


class EnumerateLevelsTest(SimpleTestCase):
    def test_first_levels_of_root_two(self):
        levels = list(enumerate_levels(ROOT2, 3))
        self.assertEqual([(level.m, level.n) for level in levels], [(1, 1), (1, 2), (2, 1)])
        self.assertEqual(levels[2].exact(ROOT2), 4 * ROOT2 + 1)

    def test_first_level(self):
        (level,) = enumerate_levels(ZETA2, 1)
        self.assertEqual((level.m, level.n), (1, 1))
        self.assertEqual(level.exact(ZETA2), ZETA2 + 1)

    def test_strictly_increasing_enclosures(self):
        levels = list(enumerate_levels(GOLDEN, 2000))
        for lower, upper in zip(levels, levels[1:]):
            self.assertLess(lower.hi, upper.lo)
            self.assertLess(lower.exact(GOLDEN), upper.exact(GOLDEN))

    def test_enclosures_contain_exact_values(self):
        for level in enumerate_levels(ROOT2, 50):
            scale = 2 ** level.bits
            value = level.exact(ROOT2)
            self.assertLessEqual(K2.element(Fraction(level.lo, scale)), value)
            self.assertLessEqual(value, K2.element(Fraction(level.hi, scale)))

    def test_matches_oracle(self):
        for alpha in (ROOT2, GOLDEN, ZETA2):
            levels = enumerate_levels(alpha, 300)
            expected = [(m, n) for _, m, n in naive_levels(alpha, 300)]
            self.assertEqual([(level.m, level.n) for level in levels], expected)

    def test_independent_of_worker_count(self):
        single = list(enumerate_levels(ROOT2, 3000, workers=1))
        self.assertEqual(list(enumerate_levels(ROOT2, 3000, workers=4)), single)
        self.assertEqual(list(enumerate_levels(ROOT2, 3000, workers=7)), single)

    @override_settings(QA_SPECTRUM_WINDOW_LEVELS=100)
    def test_windowed_generation_matches_single_worker(self):
        single = list(enumerate_levels(GOLDEN, 1500, workers=1))
        self.assertEqual(list(enumerate_levels(GOLDEN, 1500, workers=3)), single)

    def test_is_a_lazy_stream(self):
        stream = enumerate_levels(ROOT2, 10 ** 6)
        self.assertIsInstance(stream, Iterator)
        first = list(itertools.islice(stream, 3))
        self.assertEqual([(level.m, level.n) for level in first], [(1, 1), (1, 2), (2, 1)])

    def test_overlap_raises_precision_mid_stream(self):
        count = 300
        levels = list(_certified_levels(ROOT2, count, _level_bound(ROOT2, count), 8, 8192, 1))
        expected = [(m, n) for _, m, n in naive_levels(ROOT2, count)]
        self.assertEqual([(level.m, level.n) for level in levels], expected)
        self.assertEqual(levels[0].bits, 8)
        self.assertGreater(levels[-1].bits, 8)
        for lower, upper in zip(levels, levels[1:]):
            self.assertLessEqual(lower.bits, upper.bits)
            self.assertLess(lower.scaled(upper.bits)[1], upper.lo)

    def test_gap_across_precisions(self):
        lower_lo, lower_hi = fixed_point_bounds(ROOT2 + 1, 8)
        upper_lo, upper_hi = fixed_point_bounds(ROOT2 + 4, 16)
        gap = GapRecord(
            index=1,
            lower=SpectrumLevel(m=1, n=1, lo=lower_lo, hi=lower_hi, bits=8),
            upper=SpectrumLevel(m=1, n=2, lo=upper_lo, hi=upper_hi, bits=16),
        )
        self.assertEqual(gap.bits, 16)
        self.assertLessEqual(gap.lo, 3 << 16)
        self.assertGreaterEqual(gap.hi, 3 << 16)
        self.assertEqual(gap.exact(ROOT2), K2.element(3))

    def test_precision_rule(self):
        levels = list(enumerate_levels(ROOT2, 100, precision_bits=40))
        self.assertGreaterEqual(levels[0].bits, 2 * 7 + 64)

    def test_rejects_rational_and_negative(self):
        with self.assertRaises(ValueError):
            enumerate_levels(K2.element(3), 10)
        with self.assertRaises(ValueError):
            enumerate_levels(-ROOT2, 10)
        with self.assertRaises(ValueError):
            enumerate_levels(ROOT2, 0)

    @override_settings(QA_SPECTRUM_PRECISION_CAP_BITS=64)
    def test_precision_cap(self):
        with self.assertRaises(PrecisionCapExceededError):
            enumerate_levels(ROOT2, 10)


class MinGapProfileTest(SimpleTestCase):
    def test_matches_oracle(self):
        for alpha in (ROOT2, GOLDEN, ZETA2):
            rows = min_gap_profile(alpha, [10, 100, 400])
            for row in rows:
                index, pair, gap = naive_min_gap(alpha, row.N)
                self.assertEqual(row.gap.index, index)
                self.assertEqual(row.gap.pair, pair)
                self.assertEqual(row.gap.exact(alpha), gap)

    def test_non_increasing(self):
        rows = min_gap_profile(ROOT2, [2, 10, 100, 1000])
        gaps = [row.gap.exact(ROOT2) for row in rows]
        for earlier, later in zip(gaps, gaps[1:]):
            self.assertLessEqual(later, earlier)

    def test_gaps_are_positive(self):
        for row in min_gap_profile(GOLDEN, [50, 500]):
            self.assertGreater(row.gap.lo, 0)
            self.assertGreater(row.gap.exact(GOLDEN), 0)

    def test_single_level_has_no_gap(self):
        (row,) = min_gap_profile(ROOT2, [1])
        self.assertIsNone(row.gap)
        self.assertIsNone(ProfileRowSerializer(ProfileRowSerializer.flatten(row)).data['delta_min'])

    def test_three_levels(self):
        (row,) = min_gap_profile(ROOT2, [3])
        # 4 sqrt(2) + 1 - (sqrt(2) + 4) = 3 sqrt(2) - 3 < 3
        self.assertEqual(row.gap.index, 2)
        self.assertEqual(row.gap.exact(ROOT2), 3 * ROOT2 - 3)

    def test_bad_checkpoints(self):
        for checkpoints in ([], [10, 10], [100, 10], [0, 5]):
            with self.assertRaises(ValueError):
                min_gap_profile(ROOT2, checkpoints)

    def test_row_serializer(self):
        (row,) = min_gap_profile(ROOT2, [3])
        data = ProfileRowSerializer(ProfileRowSerializer.flatten(row)).data
        self.assertEqual((data['m1'], data['n1'], data['m2'], data['n2']), (1, 2, 2, 1))
        self.assertTrue(data['delta_min']['approx'].startswith('1.2426406871'))

    @unittest.skipUnless(SLOW_TESTS, "set QA_SLOW_TESTS=True to run")
    def test_matches_oracle_at_ten_thousand(self):
        for alpha in (ROOT2, ZETA2):
            (row,) = min_gap_profile(alpha, [10 ** 4])
            index, pair, gap = naive_min_gap(alpha, 10 ** 4)
            self.assertEqual((row.gap.index, row.gap.pair), (index, pair))
            self.assertEqual(row.gap.exact(alpha), gap)


class WeylCheckTest(SimpleTestCase):
    def test_ten_thousand(self):
        ratio = weyl_check(ROOT2, 10 ** 4)
        self.assertGreater(ratio, 0.95)
        self.assertLess(ratio, 1.05)

    @unittest.skipUnless(SLOW_TESTS, "set QA_SLOW_TESTS=True to run")
    def test_hundred_thousand(self):
        ratio = weyl_check(ROOT2, 10 ** 5)
        self.assertGreater(ratio, 0.98)
        self.assertLess(ratio, 1.02)

    @unittest.skipUnless(SLOW_TESTS, "set QA_SLOW_TESTS=True to run")
    def test_approaches_one(self):
        small = weyl_check(ROOT2, 10 ** 4)
        large = weyl_check(ROOT2, 4 * 10 ** 4)
        self.assertLess(abs(large - 1), abs(small - 1))


class SpectrumCommandTest(SimpleTestCase):
    def run_spectrum(self, *args):
        out = StringIO()
        call_command('spectrum', '--alpha', 'sqrt(2)', '--D', '2', *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_csv(self):
        text = self.run_spectrum('--checkpoints', '10,100', '--format', 'csv')
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(rows[0], list(CSV_COLUMNS))
        self.assertEqual([row[0] for row in rows[1:]], ['10', '100'])

    def test_json_with_weyl(self):
        data = json.loads(self.run_spectrum('--levels', '200', '--checkpoints', '20', '--weyl'))
        self.assertEqual(data['levels'], 200)
        self.assertEqual([row['N'] for row in data['rows']], [20, 200])
        self.assertGreater(data['weyl_ratio'], 0.8)

    def test_workers_and_background_agree(self):
        plain = self.run_spectrum('--levels', '500')
        self.assertEqual(self.run_spectrum('--levels', '500', '--workers', '3'), plain)
        self.assertEqual(self.run_spectrum('--levels', '500', '--background'), plain)

    def test_checkpoint_beyond_levels(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_spectrum('--levels', '10', '--checkpoints', '5,20')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_checkpoint_list(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_spectrum('--checkpoints', '10,ten')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_rational_alpha(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('spectrum', '--alpha', '2', '--D', '2', '--levels', '5', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
