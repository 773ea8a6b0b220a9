import logging
import unittest

from unittest_parametrize import ParametrizedTestCase, parametrize

from lib.costmodel import (
    TimingProfile,
    choose_eta,
    cost_row,
    expensive_count,
    fermat_fft_count,
    full_multiply_count,
    ks_bitsize,
    plan_expected_count,
    ssa_count,
    table_report,
    twiddle_multiply_count,
)
from lib.errors import NoValidEta, OutOfRange, ProfileFormatError
from lib.multiplier import plan_parameters

logging.disable(logging.CRITICAL)

PRIMES_2_30 = [(2097208, 3), (74, 4), (54, 5), (562, 5), (131090, 5)]

# (n, r, lambda, log2 N, count / N, Kronecker bits)
COST_ROWS = [
    (1 << 30, 2097208, 3, 25, 22, 376),
    (1 << 30, 74, 4, 26, 19, 288),
    (1 << 30, 54, 5, 25, 16, 544),
    (1 << 30, 562, 5, 24, 13, 800),
    (1 << 30, 131090, 5, 23, 13, 1312),
    (1 << 36, 2097208, 3, 31, 25, 376),
    (1 << 36, 2072, 4, 31, 22, 448),
    (1 << 36, 54, 5, 31, 19, 544),
    (1 << 36, 562, 5, 30, 16, 800),
    (1 << 36, 131090, 5, 29, 16, 1312),
    (1 << 36, 102, 6, 30, 16, 1280),
    (1 << 36, 562, 6, 29, 16, 1664),
    (1 << 40, 2097208, 3, 35, 28, 376),
    (1 << 40, 2072, 4, 35, 22, 448),
    (1 << 40, 54, 5, 35, 19, 544),
    (1 << 40, 562, 5, 34, 19, 800),
    (1 << 40, 131090, 5, 33, 19, 1312),
    (1 << 40, 102, 6, 34, 16, 1280),
    (1 << 40, 562, 6, 33, 16, 1664),
    (1 << 46, 2072, 4, 41, 28, 448),
    (1 << 46, 54, 5, 41, 22, 544),
    (1 << 46, 884, 5, 40, 22, 800),
    (1 << 46, 131090, 5, 39, 22, 1312),
    (1 << 46, 562, 6, 39, 19, 1664),
    (1 << 50, 884, 5, 44, 25, 800),
    (1 << 56, 884, 5, 50, 28, 800),
]


class CountTest(ParametrizedTestCase):
    @parametrize(
        'big_n, radix_log, expected',
        [(32, 5, 0), (1024, 5, 1024), (1 << 26, 5, 5 << 26), (2, 5, 0)],
    )
    def test_fermat_fft_count(self, big_n, radix_log, expected):
        self.assertEqual(fermat_fft_count(big_n, radix_log), expected)

    def test_length_must_be_power_of_two(self):
        with self.assertRaises(OutOfRange):
            fermat_fft_count(24, 3)
        with self.assertRaises(OutOfRange):
            full_multiply_count(0, 3)

    def test_multiply_counts(self):
        self.assertEqual(full_multiply_count(32, 3), 224)
        self.assertEqual(full_multiply_count(32, 3, cyclic_top=True), 160)
        self.assertEqual(twiddle_multiply_count(32, 3), 160)
        self.assertEqual(full_multiply_count(1 << 26, 4), 19 << 26)

    @parametrize(
        'r, lam, expected',
        [(74, 4, 288), (54, 5, 544), (2, 1, 6), (2097208, 3, 376)],
    )
    def test_ks_bitsize(self, r, lam, expected):
        self.assertEqual(ks_bitsize(r, lam), expected)

    def test_ks_bitsize_is_monotone(self):
        for lam in range(1, 8):
            sizes = [ks_bitsize(r, lam) for r in range(2, 300, 2)]
            self.assertEqual(sizes, sorted(sizes))
            self.assertLess(ks_bitsize(74, lam), ks_bitsize(74, lam + 1))

    @parametrize(
        'n, expected',
        [
            (1 << 30, 1 << 16),
            (1 << 40, 1 << 21),
            (1 << 46, 1 << 24),
            (1 << 50, 1 << 26),
            (1 << 56, 1 << 29),
        ],
    )
    def test_ssa_count(self, n, expected):
        self.assertEqual(ssa_count(n), expected)


class EtaTest(ParametrizedTestCase):
    @parametrize('n, r, lam, log_n, factor, ks_bits', COST_ROWS)
    def test_table_rows(self, n, r, lam, log_n, factor, ks_bits):
        eta, big_n, count = expensive_count(n, r, lam)
        self.assertEqual(big_n, 1 << log_n)
        self.assertEqual(eta * big_n, 2 * n)
        self.assertEqual(count, factor << log_n)
        self.assertEqual(ks_bitsize(r, lam), ks_bits)

    @parametrize('n, r, lam, log_n, factor, ks_bits', COST_ROWS)
    def test_eta_is_maximal(self, n, r, lam, log_n, factor, ks_bits):
        eta = choose_eta(n, r, lam)
        floor_bits = (r ** (1 << lam)).bit_length() - 1
        self.assertLessEqual(2 * eta, floor_bits)
        self.assertGreater(4 * eta, floor_bits)

    def test_strict_budget(self):
        self.assertEqual(choose_eta(1024, 2, 4), 8)
        self.assertEqual(choose_eta(1024, 2, 4, 'strict'), 2)
        self.assertEqual(choose_eta(1 << 30, 74, 4, 'strict'), 32)

    def test_no_valid_eta(self):
        with self.assertRaises(NoValidEta):
            choose_eta(1, 2, 1, 'strict')
        with self.assertRaises(OutOfRange):
            choose_eta(1024, 74, 4, 'loose')


class ProfileTest(unittest.TestCase):
    def setUp(self):
        self.profile = TimingProfile.parse(
            '# mpz_mul timings\n'
            'bits=256 seconds=1e-6\n'
            '\n'
            'bits=1024 seconds=4e-6\n'
        )

    def test_interpolation(self):
        self.assertEqual(self.profile(256), 1e-6)
        self.assertAlmostEqual(self.profile(512), 2.5e-6)
        self.assertEqual(self.profile(1024), 4e-6)

    def test_interpolation_between_inner_points(self):
        profile = TimingProfile((256, 1024, 4096), (1e-6, 4e-6, 16e-6))
        self.assertAlmostEqual(profile(2048), 10e-6)
        self.assertAlmostEqual(profile(1024), 4e-6)
        self.assertIsInstance(profile(300), float)

    def test_clamped_outside_range(self):
        self.assertEqual(self.profile(100), 1e-6)
        self.assertEqual(self.profile(1 << 20), 4e-6)

    def test_malformed_profiles(self):
        for text in (
            '',
            '# only a comment\n',
            'bits=abc seconds=1\n',
            'bits=10 seconds=1.2.3\n',
            'bits=20 seconds=1\nbits=10 seconds=2\n',
        ):
            with self.assertRaises(ProfileFormatError):
                TimingProfile.parse(text)


class ReportTest(unittest.TestCase):
    def test_default_primes_reproduce_table(self):
        reports = table_report(1 << 30, PRIMES_2_30)
        self.assertEqual(
            [report.count_factor for report in reports], [22, 19, 16, 13, 13]
        )
        self.assertEqual(
            [report.ks_bits for report in reports], [376, 288, 544, 800, 1312]
        )
        self.assertEqual(reports[1].prime, '74^16+1')
        self.assertIsNone(reports[1].est_time_s)

    def test_constant_profile_gives_count(self):
        report = cost_row(1 << 30, 562, 5, TimingProfile((1,), (1.0,)))
        self.assertEqual(report.est_time_s, report.expensive_count)
        self.assertEqual(report.as_dict()['expensive_count'], 13 << 24)
        self.assertEqual(report.as_dict()['lambda'], 5)
        self.assertEqual(report.as_dict()['est_time_s'], 13 << 24)

    def test_record_fields(self):
        report = cost_row(1 << 30, 74, 4)
        self.assertEqual(
            list(report.as_dict()),
            [
                'n',
                'r',
                'lambda',
                'eta',
                'big_n',
                'expensive_count',
                'ks_bits',
            ],
        )

    def test_empty_report(self):
        self.assertEqual(table_report(1 << 30, []), [])

    def test_plan_without_levels(self):
        self.assertEqual(plan_expected_count(plan_parameters(100)), 0)
