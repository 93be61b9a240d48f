import json
import math
import random
from fractions import Fraction
from io import StringIO
from math import isqrt

import mpmath
from mpmath import iv
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from .exceptions import (
    ConstructionError,
    FieldMismatchError,
    NonIntegralError,
    NotSquareFreeError,
    UndecidableComparisonError,
)
from .numtheory import (
    PrimeBlock,
    crt_smallest_M,
    euler_phi,
    mobius,
    select_block,
    select_blocks,
)
from .pell import cf_sqrt, fundamental_unit_solution, unit_zeta
from .qfield import (
    FieldDesc,
    Ordering,
    PowerProduct,
    QuadElem,
    compare_abs,
    eval_interval,
    field_for,
    fixed_point_bounds,
    interval_bounds,
    iv_precision,
)
from .serializers import DecimalIntegerField, PellSolutionSerializer
from .tracefact import (
    cyclotomic_value,
    magnitude_bounds,
    phi_psi,
    trace_power,
    twisted_trace_power,
)

K2 = field_for(2)
K3 = field_for(3)
K5 = field_for(5)
ZETA2 = K2.element(3, 2)
GOLDEN = K5.element(Fraction(1, 2), Fraction(1, 2))

ODD_SQUARE_FREE = [L for L in range(1, 106, 2) if mobius(L) != 0]
SQUARE_FREE_TWISTED = [L for L in range(1, 71) if mobius(L) != 0]


def random_integral(rng, height=100):
    """Integral element with non-zero coordinates; half-integral for D = 5, 13 about half the time"""
    D = rng.choice((2, 3, 5, 7, 13))
    field = field_for(D)
    if D % 4 == 1 and rng.random() < 0.5:
        a, b = (rng.randrange(-height, height) * 2 + 1 for _ in range(2))
        return field.element(Fraction(a, 2), Fraction(b, 2))
    a, b = (rng.choice((-1, 1)) * rng.randint(1, height) for _ in range(2))
    return field.element(a, b)


class FieldDescTest(SimpleTestCase):
    def test_rejects_non_square_free(self):
        for D in (4, 8, 12, 18):
            with self.assertRaises(NotSquareFreeError):
                FieldDesc(D)

    def test_rejects_small_d(self):
        with self.assertRaises(NotSquareFreeError):
            FieldDesc(1)

    def test_field_mismatch(self):
        with self.assertRaises(FieldMismatchError):
            K2.sqrt_d() + K3.sqrt_d()


class QuadElemArithmeticTest(SimpleTestCase):
    def test_unit_times_conjugate(self):
        self.assertEqual(ZETA2 * ZETA2.conjugate(), K2.one())

    def test_square_of_one_plus_root_two(self):
        x = K2.element(1, 1)
        self.assertEqual(x * x, ZETA2)

    def test_conjugate_pair_sums_to_trace(self):
        self.assertEqual(GOLDEN + GOLDEN.conjugate(), K5.one())

    def test_division(self):
        self.assertEqual(K2.element(17, 12) / ZETA2, ZETA2)
        with self.assertRaises(ZeroDivisionError):
            ZETA2 / K2.element(0)

    def test_norm_and_trace(self):
        self.assertEqual(ZETA2.norm(), 1)
        self.assertEqual(ZETA2.trace(), 6)
        self.assertEqual(K2.sqrt_d().norm(), -2)

    def test_twisted_trace(self):
        self.assertEqual(ZETA2.twisted_trace(), 8)
        self.assertEqual(K2.element(17, 12).twisted_trace(), 48)
        self.assertEqual(K2.element(7).twisted_trace(), 0)
        self.assertEqual(ZETA2.twisted_trace(), ZETA2.sqrt_d_mul().trace())

    def test_powers(self):
        self.assertEqual(ZETA2.pow_int(2), K2.element(17, 12))
        self.assertEqual(ZETA2.pow_int(3), K2.element(99, 70))
        self.assertEqual(GOLDEN.pow_int(0), K5.one())
        self.assertEqual(GOLDEN.pow_int(7).norm(), GOLDEN.norm() ** 7)
        self.assertEqual(ZETA2 ** -1, ZETA2.conjugate())

    def test_powers_of_integral_stay_integral(self):
        for k in range(12):
            self.assertTrue(GOLDEN.pow_int(k).is_integral().is_integral)

    def test_sign(self):
        self.assertEqual(K2.element(3, -2).sign(), 1)
        self.assertEqual(K2.element(1, -1).sign(), -1)
        self.assertEqual(K2.element(0).sign(), 0)
        self.assertLess(K2.sqrt_d(), Fraction(3, 2))


class IntegralityTest(SimpleTestCase):
    def test_golden_ratio_is_integral(self):
        witness = GOLDEN.is_integral()
        self.assertTrue(witness.is_integral)
        self.assertEqual(witness.trace, 1)
        self.assertEqual(witness.norm, -1)

    def test_half_root_two_is_not_integral(self):
        witness = K2.element(Fraction(1, 2), Fraction(1, 2)).is_integral()
        self.assertFalse(witness.is_integral)
        self.assertEqual(witness.norm, Fraction(-1, 4))

    def test_rational_integer(self):
        self.assertTrue(K3.element(5).is_integral().is_integral)

    def test_clear_denominator(self):
        self.assertEqual(K2.element(0, Fraction(1, 3)).clear_denominator(), (3, K2.sqrt_d()))
        self.assertEqual(GOLDEN.clear_denominator(), (1, GOLDEN))
        self.assertEqual(K3.element(Fraction(7, 2)).clear_denominator(), (2, K3.element(7)))
        self.assertEqual(K5.element(Fraction(1, 4), Fraction(1, 4)).clear_denominator(), (2, GOLDEN))

    def test_clear_denominator_is_minimal(self):
        x = K5.element(Fraction(5, 12), Fraction(7, 18))
        A, y = x.clear_denominator()
        self.assertTrue(y.is_integral().is_integral)
        for q in (2, 3, 5):
            if A % q == 0:
                self.assertFalse(((A // q) * x).is_integral().is_integral)


class TextFormTest(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(QuadElem.parse('3+2*sqrt(2)', 2), ZETA2)
        self.assertEqual(QuadElem.parse('(1+sqrt(5))/2', 5), GOLDEN)
        self.assertEqual(QuadElem.parse('1/2+1/2*sqrt(5)', 5), GOLDEN)
        self.assertEqual(QuadElem.parse('sqrt(2)', 2), K2.sqrt_d())
        self.assertEqual(QuadElem.parse('3', 2), K2.element(3))

    def test_parse_rejects_other_fields(self):
        with self.assertRaises(FieldMismatchError):
            QuadElem.parse('sqrt(7)', 5)

    def test_parse_rejects_arbitrary_code(self):
        with self.assertRaises(ValueError):
            QuadElem.parse('__import__("os")', 2)

    def test_canonical_text(self):
        self.assertEqual(str(ZETA2), '3 + 2*sqrt(2)')
        self.assertEqual(str(GOLDEN), '1/2 + 1/2*sqrt(5)')
        self.assertEqual(str(K2.sqrt_d()), 'sqrt(2)')
        self.assertEqual(str(-K2.sqrt_d()), '-sqrt(2)')
        self.assertEqual(str(K2.element(7)), '7')
        self.assertEqual(str(K2.element(3, -2)), '3 - 2*sqrt(2)')

    def test_rationalizes_denominators(self):
        self.assertEqual(QuadElem.parse('1/(1+sqrt(2))', 2), K2.element(-1, 1))
        self.assertEqual(QuadElem.parse('2/(3-sqrt(5))', 5), K5.element(Fraction(3, 2), Fraction(1, 2)))

    def test_powers_rejected(self):
        for text in ('2**10**10', 'sqrt(2)**2', '(1+sqrt(2))**3'):
            with self.assertRaises(ValueError):
                QuadElem.parse(text, 2)

    def test_text_round_trip(self):
        for x in (ZETA2, GOLDEN, K2.element(Fraction(-5, 3), Fraction(2, 7))):
            self.assertEqual(QuadElem.parse(str(x), x.field.D), x)


class IntervalTest(SimpleTestCase):
    def test_sqrt_two_enclosure(self):
        lo, hi = interval_bounds(eval_interval(K2.sqrt_d(), 64))
        with mpmath.workprec(256):
            root = mpmath.sqrt(2)
        self.assertTrue(lo <= root <= hi)
        self.assertLessEqual(hi - lo, mpmath.ldexp(1, -62))

    def test_zeta_enclosure(self):
        lo, hi = interval_bounds(eval_interval(ZETA2, 64))
        self.assertAlmostEqual(float(lo), 5.828427124746190, places=12)
        self.assertAlmostEqual(float(hi), 5.828427124746190, places=12)

    def test_zero(self):
        lo, hi = interval_bounds(eval_interval(K2.element(0), 64))
        self.assertEqual((lo, hi), (0, 0))

    def test_refinement_narrows(self):
        rng = random.Random(7)
        for _ in range(200):
            x = K2.element(Fraction(rng.randint(-500, 500), rng.randint(1, 40)),
                           Fraction(rng.randint(-500, 500), rng.randint(1, 40)))
            coarse = interval_bounds(eval_interval(x, 40))
            fine = interval_bounds(eval_interval(x, 80))
            with mpmath.workprec(300):
                exact = mpmath.mpf(x.u.numerator) / x.u.denominator \
                    + mpmath.mpf(x.v.numerator) / x.v.denominator * mpmath.sqrt(2)
            self.assertTrue(fine[0] <= exact <= fine[1])
            self.assertLessEqual(fine[1] - fine[0], coarse[1] - coarse[0])

    def test_restores_interval_precision(self):
        before = iv.prec
        with iv_precision(300):
            self.assertEqual(iv.prec, 300)
            eval_interval(ZETA2, 64)
            self.assertEqual(iv.prec, 300)
        self.assertEqual(iv.prec, before)
        self.assertIs(compare_abs(K2.sqrt_d(), Fraction(3, 2)), Ordering.LT)
        self.assertEqual(iv.prec, before)

    def test_cancellation_keeps_relative_precision(self):
        tiny = ZETA2.conjugate().pow_int(40)
        lo, hi = interval_bounds(eval_interval(tiny, 64))
        self.assertGreater(lo, 0)
        self.assertLess((hi - lo) / lo, mpmath.ldexp(1, -60))

    def test_precision_floor(self):
        with self.assertRaises(ValueError):
            eval_interval(ZETA2, 16)

    def test_fixed_point_bounds(self):
        self.assertEqual(fixed_point_bounds(K2.sqrt_d(), 10), (1448, 1449))


class CompareAbsTest(SimpleTestCase):
    def test_large_power_against_two(self):
        self.assertIs(compare_abs(PowerProduct.of((ZETA2, 70)), 2), Ordering.GT)

    def test_root_two_against_rational(self):
        self.assertIs(compare_abs(K2.sqrt_d(), Fraction(3, 2)), Ordering.LT)

    def test_equal_rationals(self):
        self.assertIs(compare_abs(Fraction(-3, 4), Fraction(3, 4)), Ordering.EQ)

    def test_zeta_ratio_against_alpha_ratio(self):
        alpha = K2.sqrt_d()
        left = PowerProduct.of((ZETA2, 35), (ZETA2.conjugate(), -35))
        right = PowerProduct.of((2, 1), (alpha.conjugate(), 12), (alpha, -12))
        self.assertIs(compare_abs(left, right), Ordering.GT)

    def test_exact_equality_is_undecidable(self):
        with self.assertRaises(UndecidableComparisonError):
            compare_abs(PowerProduct.of((K2.sqrt_d(), 2)), 2, cap_bits=256)


class PellTest(SimpleTestCase):
    def test_continued_fractions(self):
        self.assertEqual((cf_sqrt(2).a0, cf_sqrt(2).period), (1, (2,)))
        self.assertEqual((cf_sqrt(3).a0, cf_sqrt(3).period), (1, (1, 2)))
        self.assertEqual((cf_sqrt(13).a0, cf_sqrt(13).period), (3, (1, 1, 1, 1, 6)))

    def test_perfect_square_rejected(self):
        with self.assertRaises(NotSquareFreeError):
            cf_sqrt(4)

    def test_fundamental_solutions(self):
        solution = fundamental_unit_solution(2)
        self.assertEqual((solution.x, solution.y), (3, 2))
        solution = fundamental_unit_solution(5, -1)
        self.assertEqual((solution.x, solution.y, solution.norm), (2, 1, -1))
        solution = fundamental_unit_solution(13)
        self.assertEqual((solution.x, solution.y), (649, 180))
        self.assertEqual(649 ** 2 - 13 * 180 ** 2, 1)

    def test_no_negative_norm_for_even_period(self):
        with self.assertRaises(ConstructionError):
            fundamental_unit_solution(3, -1)

    def test_unit_zeta(self):
        self.assertEqual(unit_zeta(2), ZETA2)
        self.assertEqual(unit_zeta(3), K3.element(2, 1))
        self.assertEqual(unit_zeta(5), K5.element(9, 4))
        self.assertEqual(unit_zeta(5, norm=-1), K5.element(2, 1))

    def test_units_have_norm_one(self):
        for D in (2, 3, 5, 6, 7, 13, 61):
            zeta = unit_zeta(D)
            self.assertEqual(zeta * zeta.conjugate(), zeta.field.one())
            lo, _ = interval_bounds(eval_interval(zeta, 64))
            self.assertGreater(lo, 1)

    def test_fundamentality_against_search(self):
        for D in range(2, 101):
            if isqrt(D) ** 2 == D or any(D % (p * p) == 0 for p in (2, 3, 5, 7)):
                continue
            solution = fundamental_unit_solution(D)
            for y in range(1, min(solution.y, 10 ** 4)):
                x = isqrt(1 + D * y * y)
                self.assertNotEqual(x * x, 1 + D * y * y, f"smaller solution for D={D}")


class NumberTheoryTest(SimpleTestCase):
    def test_mobius_and_phi(self):
        self.assertEqual((mobius(1), euler_phi(1)), (1, 1))
        self.assertEqual((mobius(15), euler_phi(15)), (1, 8))
        self.assertEqual(mobius(12), 0)
        self.assertEqual(mobius(30), -1)
        self.assertEqual(euler_phi(323323), 6 * 10 * 12 * 16 * 18)

    def test_blocks_quarter(self):
        blocks = select_blocks('1/4')
        self.assertEqual(blocks.L.primes, (3,))
        self.assertEqual(blocks.Lp.primes, (5, 7))
        self.assertEqual(blocks.L.totient_ratio, Fraction(2, 3))
        self.assertEqual(blocks.Lp.totient_ratio, Fraction(24, 35))

    def test_blocks_fifteen_hundredths(self):
        blocks = select_blocks('0.15')
        self.assertEqual(blocks.L.primes, (3, 5))
        self.assertEqual(blocks.Lp.primes, (7, 11, 13, 17, 19))
        self.assertEqual(blocks.Lp.product, 323323)
        for block in (blocks.L, blocks.Lp):
            self.assertTrue(Fraction(1, 2) < block.totient_ratio < Fraction(1, 2) + Fraction(3, 20))

    def test_blocks_one_hundredth(self):
        block = select_block(Fraction(1, 100))
        self.assertEqual(block.primes, (3, 5, 17))
        self.assertEqual(block.totient_ratio, Fraction(128, 255))

    def test_blocks_are_deterministic_and_disjoint(self):
        first, second = select_blocks(Fraction(1, 8)), select_blocks(Fraction(1, 8))
        self.assertEqual(first, second)
        self.assertFalse(set(first.L.primes) & set(first.Lp.primes))

    def test_eps_out_of_range(self):
        for eps in ('0', '1/2', '-1/4', '3/4'):
            with self.assertRaises(ValueError):
                select_blocks(eps)

    @override_settings(QA_BLOCK_BUDGET=10)
    def test_budget_warning(self):
        with self.assertLogs('arithmetic.numtheory', level='WARNING'):
            select_blocks('1/4')

    def test_crt_known_values(self):
        self.assertEqual(crt_smallest_M(3, 35), (35, 12, 1))
        self.assertEqual(crt_smallest_M(2, 35), (35, 18, 1))
        self.assertEqual(crt_smallest_M(3, 1), (2, 1, 2))

    def test_crt_is_smallest(self):
        for L, Lp in ((3, 35), (15, 77), (5, 21), (2, 15)):
            M, m1, m2 = crt_smallest_M(L, Lp)
            self.assertEqual(M + 1, m1 * L)
            self.assertEqual(M, m2 * Lp)
            self.assertFalse(any((k + 1) % L == 0 and k % Lp == 0 for k in range(1, M)))

    def test_crt_needs_coprime(self):
        with self.assertRaises(ValueError):
            crt_smallest_M(3, 15)

    def test_prime_block(self):
        block = PrimeBlock((7, 5))
        self.assertEqual(block.primes, (5, 7))
        self.assertEqual(block.product, 35)


class TraceFactorizationTest(SimpleTestCase):
    def test_trace_powers(self):
        self.assertEqual(trace_power(ZETA2, 3), 198)
        self.assertEqual(twisted_trace_power(ZETA2, 2), 48)
        self.assertEqual(trace_power(GOLDEN, 1), GOLDEN.trace())

    def test_non_integral_rejected(self):
        with self.assertRaises(NonIntegralError):
            trace_power(K2.element(Fraction(1, 2), 1), 3)

    def test_untwisted_l3(self):
        fact = phi_psi(ZETA2, 3)
        self.assertEqual((fact.phi_part, fact.psi_part, fact.total), (33, 6, 198))
        self.assertEqual(fact.phi_part, ZETA2.pow_int(2).trace() - ZETA2.norm())

    def test_twisted_l2(self):
        fact = phi_psi(ZETA2, 2, twisted=True)
        self.assertEqual((fact.phi_part, fact.psi_part, fact.total), (6, 8, 48))

    def test_twisted_l1(self):
        omega = K3.element(4, 7)
        fact = phi_psi(omega, 1, twisted=True)
        self.assertEqual((fact.phi_part, fact.psi_part), (omega.twisted_trace(), 1))

    def test_preconditions(self):
        with self.assertRaises(ValueError):
            phi_psi(ZETA2, 6)
        with self.assertRaises(ValueError):
            phi_psi(ZETA2, 9)
        with self.assertRaises(ConstructionError):
            phi_psi(K2.element(5), 3, twisted=True)
        with self.assertRaises(ConstructionError):
            phi_psi(K2.element(0, 1), 3)

    def test_identity_on_random_integers(self):
        rng = random.Random(2024)
        for _ in range(200):
            omega = random_integral(rng)
            for L in ODD_SQUARE_FREE:
                fact = phi_psi(omega, L)
                self.assertEqual(fact.phi_part * fact.psi_part, trace_power(omega, L), (omega, L))
            for L in SQUARE_FREE_TWISTED:
                fact = phi_psi(omega, L, twisted=True)
                self.assertEqual(fact.phi_part * fact.psi_part, twisted_trace_power(omega, L), (omega, L))

    def test_divisibility(self):
        rng = random.Random(99)
        for _ in range(200):
            omega = random_integral(rng)
            for ell in range(1, 16):
                self.assertEqual(twisted_trace_power(omega, ell) % int(omega.twisted_trace()), 0)
                if ell % 2:
                    self.assertEqual(trace_power(omega, ell) % int(omega.trace()), 0)

    def test_half_integral_elements_are_sampled(self):
        rng = random.Random(2024)
        sample = [random_integral(rng) for _ in range(200)]
        self.assertTrue(any(omega.u.denominator == 2 for omega in sample))
        self.assertEqual({omega.field.D for omega in sample}, {2, 3, 5, 7, 13})

    def test_cyclotomic_cross_check(self):
        for omega in (ZETA2, K3.element(2, 1), GOLDEN, K2.element(4, 1)):
            for L in (3, 5, 15):
                self.assertEqual(phi_psi(omega, L).phi_part, cyclotomic_value(omega, L))
            for L in (2, 3, 6):
                self.assertEqual(phi_psi(omega, L, twisted=True).phi_part,
                                 cyclotomic_value(omega, L, twisted=True))


class MagnitudeBoundsTest(SimpleTestCase):
    def test_zeta_l3(self):
        report = magnitude_bounds(phi_psi(ZETA2, 3))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(math.exp(report.phi_log_ratio[0]), 0.9714, places=3)

    def test_zeta_l2_twisted(self):
        report = magnitude_bounds(phi_psi(ZETA2, 2, twisted=True))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(math.exp(report.psi_log_ratio[0]), 0.9706, places=3)

    def test_powers_of_units(self):
        for D in (2, 3, 5):
            for k in (3, 4):
                omega = unit_zeta(D).pow_int(k)
                for L in (3, 15):
                    self.assertTrue(magnitude_bounds(phi_psi(omega, L)).passed)

    def test_precondition(self):
        with self.assertRaises(ConstructionError):
            magnitude_bounds(phi_psi(K2.element(5, 1), 3))
        with self.assertRaises(ConstructionError):
            magnitude_bounds(phi_psi(ZETA2, 1, twisted=True))


class SerializerTest(SimpleTestCase):
    def test_decimal_integer_field(self):
        field = DecimalIntegerField()
        big = 3 ** 5000
        self.assertEqual(field.to_representation(big), str(big))
        self.assertEqual(field.to_internal_value(str(big)), big)
        self.assertEqual(field.to_internal_value(-12), -12)

    def test_decimal_integer_field_rejects_garbage(self):
        field = DecimalIntegerField()
        for value in ('abc', True, 1.5, '1e5'):
            with self.assertRaises(Exception):
                field.to_internal_value(value)

    def test_pell_serializer(self):
        data = PellSolutionSerializer(fundamental_unit_solution(13)).data
        self.assertEqual(data['x'], '649')
        self.assertEqual(data['y'], '180')
        self.assertEqual(data['norm'], 1)


class ArithmeticCommandTest(SimpleTestCase):
    def test_pell_command(self):
        out = StringIO()
        call_command('pell', '--D', '2', stdout=out)
        self.assertEqual(json.loads(out.getvalue()), {'x': '3', 'y': '2', 'D': '2', 'norm': 1})

    def test_pell_command_negative_norm(self):
        out = StringIO()
        call_command('pell', '--D', '5', '--norm', '-1', stdout=out)
        self.assertEqual(json.loads(out.getvalue())['x'], '2')

    def test_pell_command_rejects_square(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('pell', '--D', '4', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_select_primes_command(self):
        out = StringIO()
        call_command('select_primes', '--eps', '1/4', stdout=out)
        data = json.loads(out.getvalue())
        self.assertEqual(data['L']['primes'], [3])
        self.assertEqual(data['Lprime']['product'], '35')
        self.assertEqual(data['L']['ratio'], '2/3')
        self.assertEqual(data['M'], '35')
