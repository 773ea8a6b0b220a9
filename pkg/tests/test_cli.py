import logging
import tempfile
import unittest
from pathlib import Path

import mock
from click.testing import CliRunner

from lib.selfcheck import CheckResult
from tools.gfpmul.__main__ import main

logging.disable(logging.CRITICAL)

PLAN_TEXT = (
    'level 0: r=118 lambda=3 eta=16 N=32 beta=2\n'
    'level 1: r=118 lambda=3 eta=14 N=4 beta=0\n'
)
PRIME_TABLE_TEXT = (
    '# min_bits max_bits r lambda\n'
    '2^16 2^32 74 4\n'
    '2^32 2^64 884 5\n'
    '2^64 2^128 1084 6\n'
    '2^128 2^256 1738 7\n'
    '2^256 2^512 1348 8\n'
)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def write(self, name: str, text: str) -> str:
        path = Path(self.tmpdir.name) / name
        path.write_text(text)
        return str(path)

    def invoke(self, *args):
        return self.runner.invoke(main, list(args))


class MulCommandTest(CliTest):
    def test_small_product(self):
        a = self.write('a.hex', '2\n')
        result = self.invoke('mul', a, a, '--check')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.output, '4\n')

    def test_product_with_plan_file(self):
        x = (1 << 256) - 1
        a = self.write('a.hex', format(x, 'x'))
        b = self.write('b.hex', '0x' + format(x - 12345, 'X'))
        plan = self.write('plan.txt', PLAN_TEXT)
        result = self.invoke('mul', a, b, '--plan', plan)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.output.strip(), format(x * (x - 12345), 'x'))

    def test_oracle_mismatch(self):
        a = self.write('a.hex', '3')
        with mock.patch(
            'tools.gfpmul.__main__.oracle_product', return_value=5
        ):
            result = self.invoke('mul', a, a, '--check')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('Error', result.output)

    def test_bad_input(self):
        a = self.write('a.hex', 'xyz')
        result = self.invoke('mul', a, a)
        self.assertEqual(result.exit_code, 1)
        self.assertIn('a.hex', result.output)

    def test_bad_plan(self):
        a = self.write('a.hex', 'ff')
        plan = self.write('plan.txt', 'level 0: r=74\n')
        result = self.invoke('mul', a, a, '--plan', plan)
        self.assertEqual(result.exit_code, 1)

    def test_missing_operand(self):
        result = self.invoke('mul', str(Path(self.tmpdir.name) / 'none'))
        self.assertEqual(result.exit_code, 2)


class PrimesCommandTest(CliTest):
    def test_search(self):
        result = self.invoke(
            'primes-search', '--lambda', '4', '--min-bits', '90'
        )
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.output, 'r=74 p=74^16+1 bits=100\n')

    def test_search_records(self):
        result = self.invoke(
            '--format',
            'records',
            'primes-search',
            '--lambda',
            '4',
            '--min-bits',
            '90',
        )
        self.assertEqual(result.output, 'prime r=74 lambda=4 bits=100\n')

    def test_count(self):
        result = self.invoke(
            'primes-count', '--lambda', '2', '--lo', '4', '--hi', '20'
        )
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.output, 'count=4\n')

    def test_count_records_with_workers(self):
        result = self.invoke(
            '--jobs',
            '2',
            '--format',
            'records',
            'primes-count',
            '--lambda',
            '2',
            '--lo',
            '16',
            '--hi',
            '80',
        )
        self.assertEqual(
            result.output, 'count lambda=2 lo=16 hi=80 count=11\n'
        )

    def test_count_rejects_empty_window(self):
        result = self.invoke(
            'primes-count', '--lambda', '2', '--lo', '20', '--hi', '4'
        )
        self.assertEqual(result.exit_code, 1)


class DensityCommandTest(CliTest):
    def test_requires_lambda(self):
        result = self.invoke('density')
        self.assertEqual(result.exit_code, 2)

    def test_constant_and_windows(self):
        result = self.invoke(
            'density', '--lambda', '2', '--K', '100', '--window'
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn('lambda=2 C=', result.output)
        self.assertIn('[4, 20]: r=4', result.output)
        self.assertIn('[16, 80]: r=16', result.output)

    def test_records(self):
        result = self.invoke(
            '--format', 'records', 'density', '--lambda', '3', '--K', '0'
        )
        self.assertEqual(
            result.output,
            'constant lambda=3 K=0 constant=1 constant_2K=1 '
            'stabilization=0\n',
        )

    def test_table1_records(self):
        result = self.invoke(
            '--format',
            'records',
            'density',
            '--lambda',
            '2',
            '--K',
            '100',
            '--table1',
        )
        self.assertEqual(result.exit_code, 0)
        first, second = result.output.splitlines()
        self.assertRegex(
            first,
            r'^density lambda=2 lo=4 hi=20 count=4 estimate=[0-9.]+$',
        )
        self.assertRegex(
            second,
            r'^density lambda=2 lo=16 hi=80 count=11 estimate=[0-9.]+$',
        )

    def test_survey_alias(self):
        result = self.invoke(
            'density', '--lambda', '2', '--K', '100', '--survey'
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn('[4, 20]', result.output)
        self.assertIn('expected', result.output)


class CostCommandTest(CliTest):
    def test_default_primes(self):
        result = self.invoke('cost', '--n', str(1 << 30))
        self.assertEqual(result.exit_code, 0)
        self.assertIn('74^16+1', result.output)
        self.assertIn('2^26*19', result.output)
        self.assertIn('2^24*13', result.output)
        self.assertIn('approximate): 2^16', result.output)

    def test_prime_file_and_records(self):
        primes = self.write('primes.txt', PRIME_TABLE_TEXT)
        result = self.invoke(
            '--format',
            'records',
            'cost',
            '--n',
            str(1 << 30),
            '--primes',
            primes,
        )
        self.assertEqual(result.exit_code, 0)
        lines = result.output.splitlines()
        self.assertEqual(len(lines), 5)
        self.assertEqual(
            lines[0],
            'cost n=1073741824 r=74 lambda=4 eta=32 big_n=67108864 '
            'expensive_count=1275068416 ks_bits=288',
        )

    def test_default_records(self):
        result = self.invoke(
            '--format', 'records', 'cost', '--n', str(1 << 30)
        )
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(
            result.output.splitlines()[0],
            'cost n=1073741824 r=2097208 lambda=3 eta=64 big_n=33554432 '
            'expensive_count=738197504 ks_bits=376',
        )

    def test_profile_records(self):
        profile = self.write('profile.txt', 'bits=288 seconds=1e-6\n')
        result = self.invoke(
            '--format',
            'records',
            'cost',
            '--n',
            str(1 << 30),
            '--profile',
            profile,
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn(
            'r=74 lambda=4 eta=32 big_n=67108864 expensive_count=1275068416 '
            'ks_bits=288 est_time_s=1275.07',
            result.output,
        )

    def test_profile(self):
        profile = self.write('profile.txt', 'bits=288 seconds=1e-6\n')
        result = self.invoke(
            'cost', '--n', str(1 << 30), '--profile', profile
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn('est. time', result.output)

    def test_unknown_size_needs_primes(self):
        result = self.invoke('cost', '--n', '1000')
        self.assertEqual(result.exit_code, 1)

    def test_bad_profile(self):
        profile = self.write('profile.txt', 'seconds=1\n')
        result = self.invoke(
            'cost', '--n', str(1 << 30), '--profile', profile
        )
        self.assertEqual(result.exit_code, 1)


class PlanCommandTest(CliTest):
    def test_direct(self):
        result = self.invoke('plan', '--n', '100')
        self.assertEqual(
            result.output, '# 100 bits are multiplied directly\n'
        )

    def test_levels(self):
        result = self.invoke('plan', '--n', str(1 << 20))
        self.assertEqual(result.exit_code, 0)
        self.assertTrue(result.output.startswith('level 0: r='))
        self.assertIn('lambda=5 eta=128 N=16384 beta=0', result.output)


class SelfcheckCommandTest(CliTest):
    @mock.patch(
        'tools.gfpmul.__main__.run_selfcheck',
        return_value=[CheckResult('fft-8', 8, 0)],
    )
    def test_passing(self, run_mock):
        result = self.invoke('selfcheck', '--samples', '5', '--seed', '2')
        self.assertEqual(result.exit_code, 0)
        self.assertIn('ok', result.output)
        self.assertIn('fft-8', result.output)
        run_mock.assert_called_once_with(5, 2)

    @mock.patch(
        'tools.gfpmul.__main__.run_selfcheck',
        return_value=[CheckResult('fft-8', 8, 3)],
    )
    def test_failing(self, run_mock):
        result = self.invoke('--format', 'records', 'selfcheck')
        self.assertEqual(result.exit_code, 1)
        self.assertIn(
            'check name=fft-8 samples=8 failures=3 passed=false',
            result.output,
        )


class BenchCommandTest(CliTest):
    def test_direct_plan(self):
        result = self.invoke('bench', '--n', '100', '--reps', '2')
        self.assertEqual(result.exit_code, 0)
        self.assertIn(
            'expected level-0 count per multiplication: 0', result.output
        )
        self.assertIn('time: wall=', result.output)
