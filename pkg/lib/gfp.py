"""Arithmetic in Z/pZ for p = r^(2^lambda) + 1 in radix-r form.

An element is the vector of its 2^lambda base-r digits, least significant
first. The single value p - 1 = r^(2^lambda) has no such expansion and is
carried as a flag over all-zero digits.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import log2
from typing import Callable

from lib import counters
from lib.errors import CompositeModulus, OddBase, OutOfRange, ShiftOutOfRange
from lib.primes import is_gfp_prime


@dataclass(frozen=True)
class GfpParams:
    r: int
    lam: int
    p: int
    coeff_bits: int
    p_bits: int

    @property
    def size(self) -> int:
        return 1 << self.lam

    @property
    def floor_bits(self) -> int:
        return self.p.bit_length() - 1

    def s_bound(self, gamma: int) -> float:
        """Upper bound 2^(lambda+1) (gamma + 2 log2 lambda + 1) on log2 p."""
        return (2 << self.lam) * (gamma + 2 * log2(self.lam) + 1)

    def __str__(self):
        return f'{self.r}^{self.size}+1'


@dataclass(frozen=True)
class GfpElement:
    coeffs: tuple[int, ...]
    minus_one: bool = False


@lru_cache(maxsize=256)
def make_params(r: int, lam: int) -> GfpParams:
    if r & 1:
        raise OddBase(f'Base {r} is odd')
    if r < 2 or lam < 1:
        raise OutOfRange(f'Need r >= 2 and lambda >= 1, got {r}, {lam}')
    if not is_gfp_prime(r, lam):
        raise CompositeModulus(f'{r}^{1 << lam}+1 is not prime')
    p = r ** (1 << lam) + 1
    return GfpParams(
        r=r,
        lam=lam,
        p=p,
        coeff_bits=(r - 1).bit_length(),
        p_bits=(p - 1).bit_length(),
    )


def zero(params: GfpParams) -> GfpElement:
    return GfpElement((0,) * params.size)


def one(params: GfpParams) -> GfpElement:
    return GfpElement((1,) + (0,) * (params.size - 1))


def minus_one(params: GfpParams) -> GfpElement:
    return GfpElement((0,) * params.size, True)


def encode(x: int, params: GfpParams) -> GfpElement:
    if not 0 <= x < params.p:
        raise OutOfRange(f'{x} is not in [0, {params.p})')
    if x == params.p - 1:
        return minus_one(params)
    digits = []
    for _ in range(params.size):
        x, digit = divmod(x, params.r)
        digits.append(digit)
    return GfpElement(tuple(digits))


def lift(x: int, params: GfpParams) -> GfpElement:
    """Element congruent to any integer, negative ones included."""
    return encode(x % params.p, params)


def decode(e: GfpElement, params: GfpParams) -> int:
    if e.minus_one:
        return params.p - 1
    value = 0
    for digit in reversed(e.coeffs):
        value = value * params.r + digit
    return value


def is_canonical(e: GfpElement, params: GfpParams) -> bool:
    if len(e.coeffs) != params.size:
        return False
    if e.minus_one:
        return not any(e.coeffs)
    return all(0 <= digit < params.r for digit in e.coeffs)


def signed_digits(e: GfpElement) -> list[int]:
    """Digits of ``e`` with p - 1 written as -1."""
    digits = list(e.coeffs)
    if e.minus_one:
        digits[0] = -1
    return digits


def _propagate(digits: list[int], params: GfpParams) -> GfpElement:
    # Carries out of the top digit re-enter at the bottom negated, since
    # r^(2^lambda) = -1.
    r = params.r
    while True:
        carry = 0
        for i, digit in enumerate(digits):
            carry, digits[i] = divmod(digit + carry, r)
        if carry == 0:
            return GfpElement(tuple(digits))
        if carry == 1 and not any(digits):
            return minus_one(params)
        digits[0] -= carry


def normalize(raw, params: GfpParams) -> GfpElement:
    """Canonical element congruent to sum(raw[i] * r^i) modulo p.

    ``raw`` may be longer than 2^lambda; position i + 2^lambda folds onto
    position i with a sign change.
    """
    size = params.size
    digits = [0] * size
    for i, value in enumerate(raw):
        wraps, position = divmod(i, size)
        digits[position] += -value if wraps & 1 else value
    return _propagate(digits, params)


def add(a: GfpElement, b: GfpElement, params: GfpParams) -> GfpElement:
    counters.record('additions')
    digits = [x + y for x, y in zip(signed_digits(a), signed_digits(b))]
    return _propagate(digits, params)


def sub(a: GfpElement, b: GfpElement, params: GfpParams) -> GfpElement:
    counters.record('additions')
    digits = [x - y for x, y in zip(signed_digits(a), signed_digits(b))]
    return _propagate(digits, params)


def neg(a: GfpElement, params: GfpParams) -> GfpElement:
    return _propagate([-digit for digit in signed_digits(a)], params)


def mul_by_r_power(a: GfpElement, j: int, params: GfpParams) -> GfpElement:
    """a * r^j as a negacyclic shift of the digits."""
    size = params.size
    if not 0 <= j < 2 * size:
        raise ShiftOutOfRange(f'Shift {j} outside [0, {2 * size})')
    counters.record('cheap_shifts')
    if j == 0:
        return a
    sign = -1 if j >= size else 1
    j %= size
    digits = signed_digits(a)
    shifted = [0] * size
    for i, digit in enumerate(digits):
        if i + j < size:
            shifted[i + j] = sign * digit
        else:
            shifted[i + j - size] = -sign * digit
    return _propagate(shifted, params)


def schoolbook(a: GfpElement, b: GfpElement, params: GfpParams) -> GfpElement:
    """Negacyclic convolution of the digit vectors, then normalize."""
    if a.minus_one:
        return neg(b, params)
    if b.minus_one:
        return neg(a, params)
    size = params.size
    counters.record('coeff_muls', size * size)
    product = [0] * (2 * size - 1)
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in enumerate(b.coeffs):
            product[i + j] += x * y
    return normalize(product, params)


Strategy = Callable[[GfpElement, GfpElement], GfpElement]


def mul_generic(
    a: GfpElement,
    b: GfpElement,
    params: GfpParams,
    strategy: str | Strategy = 'schoolbook',
) -> GfpElement:
    if strategy == 'schoolbook':
        return schoolbook(a, b, params)
    return strategy(a, b)


def pow_elem(a: GfpElement, exponent: int, params: GfpParams) -> GfpElement:
    result = one(params)
    base = a
    while exponent:
        if exponent & 1:
            result = schoolbook(result, base, params)
        base = schoolbook(base, base, params)
        exponent >>= 1
    return result


def inv_pow2(k: int, params: GfpParams) -> GfpElement:
    if k < 0 or (1 << k) >= params.p:
        raise OutOfRange(f'2^{k} is not below p')
    return encode(pow(2, -k, params.p), params)
