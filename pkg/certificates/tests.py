import json
import random
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import replace
from fractions import Fraction
from io import StringIO
from math import isqrt
from pathlib import Path

import mpmath
from decouple import config
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from arithmetic.exceptions import ConstructionError, IdentityCheckError
from arithmetic.management.base import JsonCommand
from arithmetic.qfield import eval_interval, field_for, interval_bounds
from manage import main

from .construct import (
    choose_n,
    construct,
    inequalities_hold,
    prepare_alpha,
    square_class_test,
    square_decompose,
    strong_sequence,
    symmetric_construct,
    twisted_construct,
)
from .explain import explain_certificate
from .records import Mode
from .serializers import CertificateSerializer, VerificationReportSerializer
from .verification import approximation_error, resource_bound_bits, verify_certificate

SLOW_TESTS = config('QA_SLOW_TESTS', default=False, cast=bool)

K2 = field_for(2)
K3 = field_for(3)
K5 = field_for(5)
ROOT2 = K2.sqrt_d()
ZETA2 = K2.element(3, 2)
GOLDEN = K5.element(Fraction(1, 2), Fraction(1, 2))


def round_trip(cert):
    """Serialize a certificate to JSON text and load it back"""
    data = json.loads(json.dumps(CertificateSerializer(cert).data))
    serializer = CertificateSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def square_root_search(alpha, height=200, max_A=50):
    """Brute force: some integral beta of coordinate height <= height and A <= max_A with beta^2 = A alpha"""
    D = alpha.field.D
    # beta = (x + y sqrt(D)) / h, with x = y (mod 2) when h = 2
    h = 2 if D % 4 == 1 else 1
    for A in range(1, max_A + 1):
        target = A * alpha
        u, v = target.u * h * h, target.v * h * h
        if u.denominator != 1 or v.denominator != 1:
            continue
        u, v = int(u), int(v)
        for x in range(-h * height, h * height + 1):
            if x == 0:
                if v == 0 and u >= 0 and u % D == 0:
                    y = isqrt(u // D)
                    if y * y == u // D and y <= h * height and y % h == 0:
                        return True
                continue
            if v % (2 * x):
                continue
            y = v // (2 * x)
            if abs(y) <= h * height and x * x + D * y * y == u and (x - y) % h == 0:
                return True
    return False


def random_square_class_samples(rng, count):
    """(alpha, in_class) pairs: beta^2 / A, and such elements times -1, sqrt(D) or 1 + sqrt(D)"""
    samples = []
    for _ in range(count):
        field = field_for(rng.choice((2, 3, 5)))
        beta = field.element(rng.randint(-12, 12) or 1, rng.randint(-12, 12) or 1)
        alpha = beta * beta / rng.randint(1, 50)
        samples.append((alpha, True))
        twist = rng.choice((field.element(-1), field.sqrt_d(), field.element(1, 1)))
        samples.append((alpha * twist, False))
    return samples


class PrepareAlphaTest(SimpleTestCase):
    def test_integral_alpha_is_kept(self):
        self.assertEqual(prepare_alpha(ROOT2), (1, ROOT2))

    def test_denominator_is_cleared(self):
        A, alpha_int = prepare_alpha(K2.element(Fraction(1, 3), Fraction(1, 6)))
        self.assertEqual(A, 6)
        self.assertEqual(alpha_int, K2.element(2, 1))

    def test_golden_ratio_is_already_integral(self):
        self.assertEqual(prepare_alpha(GOLDEN), (1, GOLDEN))

    def test_rejects_rational_and_negative(self):
        with self.assertRaises(ConstructionError):
            prepare_alpha(K2.element(3))
        with self.assertRaises(ConstructionError):
            prepare_alpha(-ROOT2)


class SymmetricConstructionTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cert = symmetric_construct(ROOT2, Fraction(1, 4))

    def test_parameters(self):
        p = self.cert.params
        self.assertEqual((p.L, p.Lprime), (3, 35))
        self.assertEqual((p.M, p.m1, p.m2), (35, 12, 1))
        self.assertEqual(p.n, 1)
        self.assertEqual(p.N, 105)
        self.assertEqual(p.zeta, ZETA2)
        self.assertEqual(p.consistency_errors(), [])

    def test_splits_multiply_out(self):
        self.assertEqual(self.cert.P_split[0] * self.cert.P_split[1], self.cert.P)
        self.assertEqual(self.cert.Q_split[0] * self.cert.Q_split[1], self.cert.Q)

    def test_traces(self):
        zeta_105 = ZETA2.pow_int(105)
        self.assertEqual(self.cert.P, (2 ** 18 * zeta_105).trace())
        self.assertEqual(self.cert.Q, (2 ** 17 * ROOT2 * zeta_105).trace())

    def test_self_verified(self):
        self.assertTrue(self.cert.verified)
        self.assertEqual(
            set(self.cert.checks),
            {'params', 'size', 'split_product', 'approx', 'split_P', 'split_Q', 'q_magnitude'},
        )
        self.assertEqual(self.cert.claimed_exponent, Fraction(3, 4))

    def test_independent_verification(self):
        report = verify_certificate(self.cert, ROOT2)
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.induced_P, self.cert.P)
        self.assertEqual(report.induced_Q, self.cert.Q)

    def test_error_enclosure_is_small(self):
        bound = self.cert.error_bound
        self.assertLess(float(bound['approx']), 1e-50)
        self.assertEqual(bound['precision_bits'], 192)

    def test_chosen_n_is_minimal_and_satisfies_inequalities(self):
        p = self.cert.params
        args = (p.alpha_int, p.zeta, p.eps, p.L, p.Lprime, p.M, p.m1, p.m2)
        self.assertEqual(choose_n(*args), 1)
        self.assertTrue(inequalities_hold(*args, 1))

    def test_sizes_within_resource_bound(self):
        bound = resource_bound_bits(self.cert.params)
        self.assertLessEqual(self.cert.P.bit_length(), bound)
        self.assertLessEqual(self.cert.Q.bit_length(), bound)

    def test_explain(self):
        lines = explain_certificate(self.cert)
        self.assertIn("M = 35 = 12*L - 1 = 1*L', n = 1, N = n*L*L' = 105", lines)
        self.assertTrue(any('equals the homogenized cyclotomic value: True' in line for line in lines))


class OtherAlphaConstructionTest(SimpleTestCase):
    def test_golden_ratio(self):
        cert = construct(GOLDEN, '1/4')
        self.assertTrue(cert.verified, cert.checks)
        self.assertEqual(cert.zeta, K5.element(9, 4))

    def test_golden_ratio_with_negative_norm_unit(self):
        cert = construct(GOLDEN, '1/4', norm=-1)
        self.assertEqual(cert.zeta, K5.element(2, 1))
        self.assertTrue(cert.verified, cert.checks)

    def test_two_plus_root_three(self):
        cert = construct(K3.element(2, 1), Fraction(1, 4))
        self.assertTrue(cert.verified, cert.checks)

    def test_non_integral_alpha(self):
        alpha = K2.element(Fraction(1, 2), Fraction(1, 3))
        cert = construct(alpha, Fraction(1, 4))
        self.assertEqual(cert.A, 6)
        self.assertTrue(cert.verified, cert.checks)
        self.assertEqual(cert.induced_pair, (cert.P, 6 * cert.Q))

    def test_bad_eps(self):
        for eps in ('0', '1/2', '-1/4', '3/4'):
            with self.assertRaises(ValueError):
                construct(ROOT2, eps)

    def test_strong_mode_is_not_even(self):
        with self.assertRaises(ConstructionError):
            construct(ROOT2, '1/4', Mode.STRONG)

    @unittest.skipUnless(SLOW_TESTS, "set QA_SLOW_TESTS=True to run")
    def test_smaller_eps(self):
        cert = construct(ROOT2, Fraction(1, 5))
        self.assertEqual(cert.params.L, 15)
        self.assertEqual(cert.params.Lprime, 17017)
        self.assertTrue(cert.verified, cert.checks)


class TwistedConstructionTest(SimpleTestCase):
    def test_twisted_p(self):
        cert = twisted_construct(ROOT2, Fraction(1, 4), 'P')
        p = cert.params
        self.assertEqual(cert.mode, 'twisted-p')
        self.assertEqual((p.L, p.Lprime), (2, 3))
        self.assertEqual((p.M, p.m1, p.m2), (3, 2, 1))
        self.assertTrue(cert.verified, cert.checks)

    def test_twisted_q(self):
        cert = twisted_construct(GOLDEN, Fraction(1, 4), 'Q')
        p = cert.params
        self.assertEqual((p.L, p.Lprime), (3, 2))
        self.assertEqual((p.M, p.m1, p.m2), (2, 1, 1))
        self.assertTrue(cert.verified, cert.checks)

    def test_twisted_traces_used(self):
        cert = construct(ROOT2, '1/4', 'twisted-p')
        p = cert.params
        omega_P = p.alpha_int.pow_int(p.m1) * p.zeta.pow_int(p.n * p.Lprime)
        self.assertEqual(cert.P, omega_P.pow_int(2).twisted_trace())

    def test_both_sides_two_is_impossible(self):
        with self.assertRaises(ConstructionError):
            twisted_construct(ROOT2, Fraction(1, 4), 'both')


class SquareClassTest(SimpleTestCase):
    def test_membership(self):
        self.assertTrue(square_class_test(ZETA2))
        self.assertTrue(square_class_test(K5.element(Fraction(7, 2), Fraction(3, 2))))
        self.assertTrue(square_class_test(K3.element(2, 1)))
        self.assertTrue(square_class_test(K2.element(9)))
        self.assertFalse(square_class_test(ROOT2))
        self.assertFalse(square_class_test(K2.element(1, 1)))
        self.assertFalse(square_class_test(-ZETA2))

    def test_decompose(self):
        self.assertEqual(square_decompose(ZETA2), (1, K2.element(1, 1)))
        self.assertEqual(
            square_decompose(K5.element(Fraction(7, 2), Fraction(3, 2))),
            (1, K5.element(Fraction(3, 2), Fraction(1, 2))),
        )
        self.assertEqual(square_decompose(K2.element(9)), (1, K2.element(3)))
        self.assertEqual(square_decompose(K3.element(2, 1)), (2, K3.element(1, 1)))

    def test_decompose_identity(self):
        for alpha in (ZETA2, K3.element(2, 1), K5.element(Fraction(7, 2), Fraction(3, 2)),
                      K2.element(Fraction(3, 4), Fraction(1, 2))):
            A, beta = square_decompose(alpha)
            self.assertEqual(beta * beta, A * alpha)
            self.assertTrue(beta.is_integral().is_integral)
            self.assertEqual(beta.sign(), 1)

    def test_decompose_rejects_non_member(self):
        with self.assertRaises(ConstructionError):
            square_decompose(ROOT2)

    def test_agrees_with_brute_force_search(self):
        rng = random.Random(31)
        for alpha, in_class in random_square_class_samples(rng, 50):
            self.assertEqual(square_class_test(alpha), in_class, alpha)
            self.assertEqual(square_root_search(alpha), in_class, alpha)
            if in_class:
                A, beta = square_decompose(alpha)
                self.assertEqual(beta * beta, A * alpha)
                self.assertTrue(beta.is_integral().is_integral)


class StrongConstructionTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.certs = strong_sequence(ZETA2, 1, 30)

    def test_first_terms(self):
        first, second = self.certs[:2]
        self.assertEqual((first.P, first.Q), (280, 48))
        self.assertEqual(first.P_split, (20, 14))
        self.assertEqual(first.Q_split, (8, 6))
        self.assertEqual((second.P, second.Q), (9512, 1632))

    def test_parameters(self):
        p = self.certs[0].params
        self.assertEqual(p.mode, Mode.STRONG)
        self.assertEqual(p.beta, K2.element(1, 1))
        self.assertEqual((p.L, p.Lprime, p.M, p.N), (2, 2, 0, 2))
        self.assertEqual(self.certs[0].claimed_exponent, 1)

    def test_error(self):
        approx = float(self.certs[0].error_bound['approx'])
        self.assertGreater(approx, 0.2354)
        self.assertLess(approx, 0.2356)

    def test_error_times_q_is_bounded(self):
        # |alpha Q - P| * |Q| tends to D |alpha - conj(alpha)| = 8 sqrt(2)
        for cert in self.certs:
            product = float(cert.error_bound['approx']) * cert.Q
            self.assertGreater(product, 3)
            self.assertLess(product, 16)

    def test_all_verified_without_flags(self):
        for cert in self.certs:
            self.assertTrue(cert.verified, (cert.params.n, cert.checks))
            self.assertEqual(cert.flags, ())

    def test_product_identity(self):
        alpha_int = self.certs[0].params.alpha_int
        for cert in self.certs:
            zeta_2n = ZETA2.pow_int(2 * cert.params.n)
            self.assertEqual(cert.P, (alpha_int * zeta_2n).twisted_trace())
            self.assertEqual(cert.Q, zeta_2n.twisted_trace())

    def test_non_member_rejected(self):
        with self.assertRaises(ConstructionError):
            strong_sequence(ROOT2, 1, 2)

    def test_error_decays_like_zeta_squared(self):
        # alpha Q_n - P_n = sqrt(2) (conj(alpha) - alpha) conj(zeta)^(2n), and N(zeta) = 1
        self.assertEqual(len(self.certs), 30)
        for cert in self.certs:
            error = approximation_error(cert.params.alpha_int, cert.P, cert.Q)
            self.assertEqual(abs(error) * ZETA2.pow_int(2 * cert.params.n), K2.element(8), cert.params.n)
            lo, hi = interval_bounds(eval_interval(error * ZETA2.pow_int(2 * cert.params.n), 64))
            self.assertTrue(lo <= -8 <= hi)
            self.assertLess(hi - lo, mpmath.ldexp(8, -60))

    def test_denominator_growth_tends_to_zeta_squared(self):
        zeta_squared = ZETA2.pow_int(2)
        for previous, cert in zip(self.certs[4:], self.certs[5:]):
            ratio = K2.element(Fraction(cert.Q, previous.Q)) / zeta_squared
            self.assertGreater(ratio, K2.element(Fraction(99, 100)), cert.params.n)
            self.assertLess(ratio, K2.element(Fraction(101, 100)), cert.params.n)

    def test_rational_alpha_rejected(self):
        self.assertTrue(square_class_test(K2.element(2)))
        with self.assertRaises(ConstructionError):
            strong_sequence(K2.element(2), 1, 2)
        with self.assertRaises(ConstructionError):
            strong_sequence(K2.element(9), 1, 1)

    def test_bad_range(self):
        with self.assertRaises(ValueError):
            strong_sequence(ZETA2, 3, 2)
        with self.assertRaises(ValueError):
            strong_sequence(ZETA2, 0, 2)

    def test_non_integral_alpha(self):
        alpha = K2.element(Fraction(3, 4), Fraction(1, 2))
        certs = strong_sequence(alpha, 1, 3)
        A = certs[0].A
        self.assertGreater(A, 1)
        for cert in certs:
            self.assertTrue(cert.verified, cert.checks)
            self.assertEqual(cert.induced_pair, (cert.P, A * cert.Q))


class VerificationTest(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cert = symmetric_construct(ROOT2, Fraction(1, 4))
        cls.strong = strong_sequence(ZETA2, 1, 1)[0]

    def test_tampered_p(self):
        report = verify_certificate(replace(self.cert, P=self.cert.P + 1))
        self.assertFalse(report.passed)
        self.assertFalse(report.checks['split_product'].passed)

    def test_tampered_strong_q(self):
        report = verify_certificate(replace(self.strong, Q=49, Q_split=(7, 7)))
        self.assertFalse(report.passed)
        self.assertTrue(report.checks['split_product'].passed)
        self.assertFalse(report.checks['approx'].passed)

    def test_overclaimed_exponent(self):
        report = verify_certificate(replace(self.cert, claimed_exponent=Fraction(9, 10)))
        self.assertFalse(report.checks['approx'].passed)

    def test_wrong_alpha(self):
        report = verify_certificate(self.cert, K2.element(1, 1))
        self.assertFalse(report.checks['alpha'].passed)

    def test_inconsistent_params(self):
        params = replace(self.cert.params, M=34)
        report = verify_certificate(replace(self.cert, params=params))
        self.assertFalse(report.checks['params'].passed)
        self.assertNotIn('approx', report.checks)

    def test_oversized_integers(self):
        huge = self.cert.P << 100_000
        report = verify_certificate(replace(self.cert, P=huge, P_split=(huge, 1)))
        self.assertFalse(report.checks['size'].passed)
        self.assertNotIn('approx', report.checks)

    def test_report_serializer(self):
        data = VerificationReportSerializer(verify_certificate(self.strong)).data
        self.assertTrue(data['passed'])
        self.assertEqual(data['induced_P'], '280')
        self.assertEqual(data['induced_Q_split'], ['8', '6'])
        self.assertEqual(data['checks']['split_P']['skipped'], False)


class CertificateSerializerTest(SimpleTestCase):
    def test_json_round_trip_verifies(self):
        for cert in (symmetric_construct(ROOT2, '1/4'), strong_sequence(ZETA2, 2, 2)[0],
                     twisted_construct(GOLDEN, '1/4', 'Q')):
            loaded = round_trip(cert)
            self.assertEqual(loaded.P, cert.P)
            self.assertEqual(loaded.params.alpha_int, cert.params.alpha_int)
            self.assertTrue(verify_certificate(loaded).passed)

    def test_integers_are_decimal_strings(self):
        data = CertificateSerializer(strong_sequence(ZETA2, 1, 1)[0]).data
        self.assertEqual(data['P'], '280')
        self.assertEqual(data['Q_split'], ['8', '6'])
        self.assertEqual(data['params']['N'], '2')
        self.assertEqual(data['alpha'], '3 + 2*sqrt(2)')
        self.assertEqual(data['mode'], 'strong')

    def test_rejects_non_square_free_block(self):
        data = json.loads(json.dumps(CertificateSerializer(strong_sequence(ZETA2, 1, 1)[0]).data))
        data['params']['L'] = '4'
        serializer = CertificateSerializer(data=data)
        self.assertFalse(serializer.is_valid())

    def test_rejects_strong_without_beta(self):
        data = json.loads(json.dumps(CertificateSerializer(strong_sequence(ZETA2, 1, 1)[0]).data))
        data['beta'] = None
        self.assertFalse(CertificateSerializer(data=data).is_valid())

    def test_rejects_field_mismatch(self):
        data = json.loads(json.dumps(CertificateSerializer(strong_sequence(ZETA2, 1, 1)[0]).data))
        data['D'] = '3'
        self.assertFalse(CertificateSerializer(data=data).is_valid())


class CertificateCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name: str) -> str:
        return str(Path(self.tmp.name) / name)

    def test_construct_then_verify(self):
        target = self.path('cert.json')
        call_command('construct', '--alpha', 'sqrt(2)', '--D', '2', '--eps', '1/4',
                     '--output', target, stdout=StringIO(), stderr=StringIO())
        self.assertEqual(json.loads(Path(target).read_text())['params']['Lprime'], '35')

        out = StringIO()
        call_command('verify', '--cert', target, '--alpha', 'sqrt(2)', stdout=out)
        self.assertTrue(json.loads(out.getvalue())['passed'])

    def test_construct_explain(self):
        err = StringIO()
        call_command('construct', '--alpha', '(1+sqrt(5))/2', '--D', '5', '--eps', '1/4',
                     '--mode', 'twisted-q', '--explain', stdout=StringIO(), stderr=err)
        self.assertIn('twisted trace', err.getvalue())

    def test_construct_background_matches_inline(self):
        inline, queued = StringIO(), StringIO()
        call_command('construct', '--alpha', 'sqrt(2)', '--D', '2', '--eps', '1/4', stdout=inline)
        call_command('construct', '--alpha', 'sqrt(2)', '--D', '2', '--eps', '1/4', '--background', stdout=queued)
        self.assertEqual(json.loads(queued.getvalue()), json.loads(inline.getvalue()))

    def test_explain_with_background_is_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('construct', '--alpha', 'sqrt(2)', '--D', '2', '--eps', '1/4',
                         '--explain', '--background', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_construct_field_mismatch(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('construct', '--alpha', 'sqrt(7)', '--D', '5', '--eps', '1/4', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_construct_rational_alpha(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('construct', '--alpha', '5/3', '--D', '5', '--eps', '1/4', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_strong(self):
        out = StringIO()
        call_command('strong', '--alpha', '3+2*sqrt(2)', '--D', '2', '--n-from', '1', '--n-to', '1', stdout=out)
        data = json.loads(out.getvalue())
        self.assertEqual((data['P'], data['Q']), ('280', '48'))
        self.assertEqual(data['beta'], '1 + sqrt(2)')

    def test_strong_range_round_trip(self):
        target = self.path('strong.json')
        call_command('strong', '--alpha', '3+2*sqrt(2)', '--D', '2', '--n-from', '1', '--n-to', '4',
                     '--output', target, stdout=StringIO(), stderr=StringIO())
        out = StringIO()
        call_command('verify', '--cert', target, stdout=out)
        reports = json.loads(out.getvalue())
        self.assertEqual(len(reports), 4)
        self.assertTrue(all(report['passed'] for report in reports))

    def test_strong_non_member(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('strong', '--alpha', 'sqrt(2)', '--D', '2', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_verify_tampered_exits_one(self):
        cert = strong_sequence(ZETA2, 1, 1)[0]
        data = json.loads(json.dumps(CertificateSerializer(cert).data))
        data['P'] = '281'
        target = self.path('tampered.json')
        Path(target).write_text(json.dumps(data))
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', '--cert', target, stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertFalse(json.loads(out.getvalue())['checks']['split_product']['passed'])

    def test_verify_bad_json(self):
        target = self.path('broken.json')
        Path(target).write_text('{"alpha": ')
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', '--cert', target, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_verify_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', '--cert', self.path('absent.json'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_decompose(self):
        out = StringIO()
        call_command('decompose', '--alpha', '2+sqrt(3)', '--D', '3', stdout=out)
        data = json.loads(out.getvalue())
        self.assertEqual(data['A'], '2')
        self.assertEqual(data['beta'], '1 + sqrt(3)')
        self.assertTrue(data['identity_verified'])

    def test_decompose_non_member(self):
        out = StringIO()
        call_command('decompose', '--alpha', 'sqrt(2)', '--D', '2', stdout=out)
        data = json.loads(out.getvalue())
        self.assertFalse(data['in_square_class'])
        self.assertIsNone(data['A'])


class ManageMainTest(SimpleTestCase):
    def run_main(self, *args):
        out, err = StringIO(), StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(['manage.py', *args])
        return code, out.getvalue()

    def test_success(self):
        code, out = self.run_main('pell', '--D', '2')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['x'], '3')

    def test_hyphenated_name(self):
        code, out = self.run_main('select-primes', '--eps', '1/4')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['M'], '35')

    def test_usage_errors(self):
        self.assertEqual(self.run_main('pell', '--D', '4')[0], 2)
        self.assertEqual(self.run_main('construct', '--alpha', 'sqrt(7)', '--D', '5', '--eps', '1/4')[0], 2)
        self.assertEqual(self.run_main('strong', '--D', '2')[0], 2)
        self.assertEqual(self.run_main('no-such-command')[0], 2)

    @override_settings(QA_SPECTRUM_PRECISION_CAP_BITS=64)
    def test_numeric_failure(self):
        code, _ = self.run_main('spectrum', '--alpha', 'sqrt(2)', '--D', '2', '--levels', '10')
        self.assertEqual(code, 3)

    def test_broken_identity_is_a_numeric_failure(self):
        class BrokenIdentityCommand(JsonCommand):
            def handle(self, *args, **options):
                raise IdentityCheckError("twisted trace product identity failed at n=1")

        with self.assertRaises(CommandError) as ctx:
            BrokenIdentityCommand(stdout=StringIO(), stderr=StringIO()).execute(
                force_color=False, no_color=False, skip_checks=True,
            )
        self.assertEqual(ctx.exception.returncode, 3)

    def test_rational_alpha_for_strong_is_a_usage_error(self):
        self.assertEqual(self.run_main('strong', '--alpha', '2', '--D', '2')[0], 2)

    def test_verification_failure(self):
        data = json.loads(json.dumps(CertificateSerializer(strong_sequence(ZETA2, 1, 1)[0]).data))
        data['Q_split'] = ['6', '8']
        data['Q'] = '49'
        with tempfile.TemporaryDirectory() as tmp:
            target = str(Path(tmp) / 'cert.json')
            Path(target).write_text(json.dumps(data))
            code, out = self.run_main('verify', '--cert', target)
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(out)['passed'])

    def test_strong_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = str(Path(tmp) / 'cert.json')
            self.assertEqual(self.run_main('strong', '--alpha', '3+2*sqrt(2)', '--D', '2', '--output', target)[0], 0)
            self.assertEqual(self.run_main('verify', '--cert', target)[0], 0)
