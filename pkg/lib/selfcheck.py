"""Oracle-equivalence checks run by ``gfpmul selfcheck``."""

import logging
import random
from dataclasses import dataclass

from lib.gfp import (
    add,
    decode,
    encode,
    make_params,
    mul_by_r_power,
    mul_generic,
    schoolbook,
    sub,
)
from lib.multiplier import PlanConfig, multiply, precompute
from lib.reference import (
    naive_dft,
    naive_negacyclic,
    naive_value,
    oracle_product,
)
from lib.transform import (
    EvalVector,
    build_twiddle_table,
    half_dft,
    pointwise_product,
    principal_root,
    radix2_fft,
)

CHECK_PRIME = (74, 4)
CHECK_LENGTHS = (2, 8, 32)
CHECK_BITS = (256, 1024)
CHECK_CONFIG = PlanConfig(base_case_bits=64, schoolbook_threshold=8)


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _element(rng, params):
    return encode(rng.randrange(params.p), params)


def check_field(params, samples: int, rng) -> CheckResult:
    p = params.p
    failures = 0
    for _ in range(samples):
        a, b = _element(rng, params), _element(rng, params)
        x, y = naive_value(a, params), naive_value(b, params)
        if (
            decode(schoolbook(a, b, params), params) != x * y % p
            or decode(add(a, b, params), params) != (x + y) % p
            or decode(sub(a, b, params), params) != (x - y) % p
        ):
            failures += 1
    return CheckResult(f'field-{params}', samples, failures)


def check_shifts(params, rng) -> CheckResult:
    a = _element(rng, params)
    failures = 0
    shifts = 2 * params.size
    for j in range(shifts):
        power = encode(pow(params.r, j, params.p), params)
        if mul_by_r_power(a, j, params) != mul_generic(a, power, params):
            failures += 1
    return CheckResult(f'shifts-{params}', shifts, failures)


def check_fft(params, length: int, rng) -> CheckResult:
    values = tuple(_element(rng, params) for _ in range(length))
    omega = principal_root(params, length)
    got = radix2_fft(EvalVector(values), omega, params)
    expected = naive_dft(values, omega, params)
    failures = sum(
        decode(v, params) != e for v, e in zip(got.values, expected)
    )
    return CheckResult(f'fft-{length}', length, failures)


def check_negacyclic(params, length: int, rng) -> CheckResult:
    table = build_twiddle_table(params, 2 * length)
    a = tuple(_element(rng, params) for _ in range(length))
    b = tuple(_element(rng, params) for _ in range(length))
    fa = half_dft(EvalVector(a), table, params)
    fb = half_dft(EvalVector(b), table, params)
    back = half_dft(fa, table, params, 'inverse')
    product = half_dft(
        pointwise_product(fa, fb, params), table, params, 'inverse'
    )
    expected = naive_negacyclic(
        [naive_value(x, params) for x in a],
        [naive_value(x, params) for x in b],
        params,
    )
    failures = int(back.values != a)
    failures += sum(
        decode(v, params) != e for v, e in zip(product.values, expected)
    )
    return CheckResult(f'half-dft-{length}', length + 1, failures)


def check_multiply(bits: int, samples: int, rng, config) -> CheckResult:
    plan = precompute(bits, config)
    failures = 0
    for _ in range(samples):
        a, b = rng.getrandbits(bits), rng.getrandbits(bits)
        if multiply(a, b, plan) != oracle_product(a, b):
            failures += 1
    return CheckResult(f'multiply-{bits}', samples, failures)


def run_selfcheck(
    samples: int = 100, seed: int = 0, config: PlanConfig = CHECK_CONFIG
) -> list[CheckResult]:
    rng = random.Random(seed)
    params = make_params(*CHECK_PRIME)
    results = [check_field(params, samples, rng), check_shifts(params, rng)]
    for length in CHECK_LENGTHS:
        results.append(check_fft(params, length, rng))
        results.append(check_negacyclic(params, length, rng))
    for bits in CHECK_BITS:
        results.append(
            check_multiply(bits, max(1, samples // 50), rng, config)
        )
    for result in results:
        if not result.passed:
            logging.warning(
                '%s: %d of %d samples failed',
                result.name,
                result.failures,
                result.samples,
            )
    return results
