import logging
import os
import random
import unittest

import mock
from unittest_parametrize import ParametrizedTestCase, parametrize

from lib.gfp import make_params
from lib.multiplier import PlanConfig
from lib.selfcheck import (
    CheckResult,
    check_fft,
    check_field,
    check_multiply,
    check_negacyclic,
    check_shifts,
    run_selfcheck,
)

logging.disable(logging.CRITICAL)

P74 = make_params(74, 4)
SMALL = PlanConfig(base_case_bits=64)


def _fake_multiply_check(bits, samples, rng, config):
    return CheckResult(f'multiply-{bits}', samples, int(bits == 1024))


class ChecksTest(ParametrizedTestCase):
    def setUp(self):
        self.rng = random.Random(7)

    def test_field(self):
        result = check_field(P74, 50, self.rng)
        self.assertEqual(result.name, 'field-74^16+1')
        self.assertTrue(result.passed)

    def test_shifts(self):
        result = check_shifts(P74, self.rng)
        self.assertEqual(result.samples, 32)
        self.assertTrue(result.passed)

    @parametrize('length', [(2,), (8,), (32,)])
    def test_transforms(self, length):
        self.assertTrue(check_fft(P74, length, self.rng).passed)
        result = check_negacyclic(P74, length, self.rng)
        self.assertEqual(result.name, f'half-dft-{length}')
        self.assertTrue(result.passed)

    def test_multiply(self):
        result = check_multiply(256, 2, self.rng, SMALL)
        self.assertEqual(result, CheckResult('multiply-256', 2, 0))

    def test_multiply_failures_are_counted(self):
        with mock.patch('lib.selfcheck.multiply', return_value=0):
            result = check_multiply(128, 3, self.rng, SMALL)
        self.assertEqual(result.failures, 3)
        self.assertFalse(result.passed)


class RunTest(unittest.TestCase):
    @mock.patch('lib.selfcheck.logging')
    @mock.patch(
        'lib.selfcheck.check_multiply', side_effect=_fake_multiply_check
    )
    def test_reports_every_layer(self, check_multiply_mock, logging_mock):
        results = run_selfcheck(samples=10, seed=3)
        self.assertEqual(
            [result.name for result in results],
            [
                'field-74^16+1',
                'shifts-74^16+1',
                'fft-2',
                'half-dft-2',
                'fft-8',
                'half-dft-8',
                'fft-32',
                'half-dft-32',
                'multiply-256',
                'multiply-1024',
            ],
        )
        self.assertEqual(check_multiply_mock.call_count, 2)
        self.assertFalse(results[-1].passed)
        self.assertTrue(all(result.passed for result in results[:-1]))
        logging_mock.warning.assert_called_once()


@unittest.skipUnless(
    os.getenv('GFPMUL_LONG_TESTS'), 'set GFPMUL_LONG_TESTS to run'
)
class FullRunTest(unittest.TestCase):
    def test_default_run_passes(self):
        results = run_selfcheck(samples=50)
        self.assertTrue(all(result.passed for result in results))
