"""Discrete Fourier transforms over a generalized Fermat prime field.

The large-radix transform splits a length-N transform into blocks of
length 2^(lambda+1). Inside a block the root is r itself, so every twiddle
is a negacyclic shift; only the twiddles between blocks are general field
multiplications and they are the ones counted as expensive.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Protocol

from sympy import factorint

from lib import counters
from lib.errors import (
    CheapModeViolation,
    FactorizationFailure,
    LengthMismatch,
    OrderUnavailable,
    PhaseMismatch,
    TableTooSmall,
)
from lib.gfp import (
    GfpElement,
    GfpParams,
    add,
    decode,
    encode,
    mul_by_r_power,
    mul_generic,
    sub,
)


class Phase(Enum):
    COEFF = 'coeff'
    EVAL = 'eval'


@dataclass(frozen=True)
class EvalVector:
    values: tuple[GfpElement, ...]
    phase: Phase = Phase.COEFF

    def __post_init__(self):
        size = len(self.values)
        if size < 1 or size & (size - 1):
            raise LengthMismatch(f'Length {size} is not a power of two')

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class TwiddleTable:
    params: GfpParams
    order: int
    powers: tuple[GfpElement, ...]
    inverse_weights: tuple[GfpElement, ...]
    transformed: tuple | None = None
    transformed_inverse: tuple | None = None

    @property
    def length(self) -> int:
        """Length of the half-DFT served by this table."""
        return self.order // 2

    @property
    def root(self) -> GfpElement:
        return self.powers[1 % self.order]

    def with_images(self, transformed, transformed_inverse):
        return replace(
            self,
            transformed=tuple(transformed),
            transformed_inverse=tuple(transformed_inverse),
        )


class ElementMultiplier(Protocol):
    def multiply(self, a: GfpElement, b: GfpElement) -> GfpElement: ...

    def multiply_twiddle(
        self, a: GfpElement, table: TwiddleTable, index: int
    ) -> GfpElement: ...

    def multiply_weight(
        self, a: GfpElement, table: TwiddleTable, index: int
    ) -> GfpElement: ...


class GenericMultiplier:
    """Field products through :func:`lib.gfp.mul_generic`."""

    def __init__(self, params: GfpParams, strategy='schoolbook'):
        self.params = params
        self.strategy = strategy

    def multiply(self, a, b):
        return mul_generic(a, b, self.params, self.strategy)

    def multiply_twiddle(self, a, table, index):
        return self.multiply(a, table.powers[index])

    def multiply_weight(self, a, table, index):
        return self.multiply(a, table.inverse_weights[index])


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


@lru_cache(maxsize=128)
def generator_value(params: GfpParams) -> int:
    # p - 1 = r^(2^lambda) has the same prime divisors as r.
    factors = factorint(params.r)
    product = 1
    for q, e in factors.items():
        product *= q**e
    if product != params.r:
        raise FactorizationFailure(f'Could not factor r={params.r}')

    p = params.p
    g = 2
    while g < p:
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
        g += 1
    raise FactorizationFailure(f'No generator found modulo {params}')


def find_generator(params: GfpParams) -> GfpElement:
    return encode(generator_value(params), params)


@lru_cache(maxsize=128)
def root_value(params: GfpParams, two_n: int) -> int:
    p = params.p
    if not _is_power_of_two(two_n) or (p - 1) % two_n:
        raise OrderUnavailable(f'No element of order {two_n} modulo {params}')

    radix = 2 << params.lam
    if two_n <= radix:
        return pow(params.r, radix // two_n, p)

    h = pow(generator_value(params), (p - 1) // two_n, p)
    target = pow(h, two_n // radix, p)
    power = params.r
    for m in range(1, radix, 2):
        if power == target:
            break
        power = power * params.r * params.r % p
    else:
        raise OrderUnavailable(f'Root of order {two_n} is not aligned with r')
    root = pow(h, pow(m, -1, radix), p)
    logging.debug('Root of order %d modulo %s is %d', two_n, params, root)
    return root


def principal_root(params: GfpParams, two_n: int) -> GfpElement:
    """Root of exact order two_n whose two_n/2^(lambda+1) power is r."""
    return encode(root_value(params, two_n), params)


def build_twiddle_table(params: GfpParams, two_n: int) -> TwiddleTable:
    if two_n < 2:
        raise TableTooSmall(f'Table order {two_n} is below 2')
    p = params.p
    omega = root_value(params, two_n)
    powers = []
    value = 1
    for _ in range(two_n):
        powers.append(encode(value, params))
        value = value * omega % p

    length = two_n // 2
    inverse_root = pow(omega, -1, p)
    weight = pow(length, -1, p)
    weights = []
    for _ in range(length):
        weights.append(encode(weight, params))
        weight = weight * inverse_root % p
    return TwiddleTable(params, two_n, tuple(powers), tuple(weights))


def _r_exponent(omega: GfpElement, params: GfpParams) -> int:
    value = decode(omega, params)
    radix = 2 << params.lam
    power = 1
    for e in range(radix):
        if power == value:
            return e
        power = power * params.r % params.p
    raise CheapModeViolation(f'Root is not a power of r modulo {params}')


def _cheap_radix2(values: list, exponent: int, params: GfpParams) -> list:
    """DFT at the root r^exponent, twiddles applied as shifts."""
    size = len(values)
    if size == 1:
        return list(values)
    radix = 2 << params.lam
    half = size // 2
    even = _cheap_radix2(values[0::2], 2 * exponent % radix, params)
    odd = _cheap_radix2(values[1::2], 2 * exponent % radix, params)
    out = [None] * size
    for k in range(half):
        t = mul_by_r_power(odd[k], exponent * k % radix, params)
        out[k] = add(even[k], t, params)
        out[k + half] = sub(even[k], t, params)
    return out


def _generic_radix2(values: list, root: int, params, multiplier) -> list:
    size = len(values)
    if size == 1:
        return list(values)
    p = params.p
    half = size // 2
    even = _generic_radix2(values[0::2], root * root % p, params, multiplier)
    odd = _generic_radix2(values[1::2], root * root % p, params, multiplier)
    out = [None] * size
    twiddle = 1
    for k in range(half):
        if k:
            counters.record('expensive_muls')
            t = multiplier.multiply(odd[k], encode(twiddle, params))
        else:
            t = odd[k]
        out[k] = add(even[k], t, params)
        out[k + half] = sub(even[k], t, params)
        twiddle = twiddle * root % p
    return out


def _flip(phase: Phase) -> Phase:
    return Phase.EVAL if phase is Phase.COEFF else Phase.COEFF


def radix2_fft(
    v: EvalVector,
    omega: GfpElement,
    params: GfpParams,
    twiddle_mode: str = 'generic',
    multiplier: ElementMultiplier | None = None,
) -> EvalVector:
    """values[i] = P(omega^i) by decimation in time."""
    if twiddle_mode == 'cheap-r':
        exponent = _r_exponent(omega, params)
        values = _cheap_radix2(list(v.values), exponent, params)
    else:
        multiplier = multiplier or GenericMultiplier(params)
        root = decode(omega, params)
        values = _generic_radix2(list(v.values), root, params, multiplier)
    return EvalVector(tuple(values), _flip(v.phase))


def large_radix_fft(
    v: EvalVector,
    table: TwiddleTable,
    params: GfpParams,
    multiplier: ElementMultiplier | None = None,
    inverse: bool = False,
) -> EvalVector:
    """Length-N DFT at the table root raised to order/N.

    The inverse variant uses the inverse root and is not scaled.
    """
    size = len(v)
    if table.order < 2 * size:
        raise TableTooSmall(
            f'Table of order {table.order} cannot serve length {size}'
        )
    multiplier = multiplier or GenericMultiplier(params)
    radix = 2 << params.lam
    order = table.order
    sign = -1 if inverse else 1

    def transform(values: list, unit: int) -> list:
        n = len(values)
        if n <= radix:
            step = radix // n
            exponent = step if not inverse else (radix - step) % radix
            return _cheap_radix2(values, exponent, params)

        m = n // radix
        columns = [
            transform(values[j::radix], unit * radix) for j in range(radix)
        ]
        for j in range(radix):
            column = columns[j]
            for k in range(m):
                counters.record('expensive_muls')
                index = sign * unit * j * k % order
                column[k] = multiplier.multiply_twiddle(
                    column[k], table, index
                )

        out = [None] * n
        exponent = 1 if not inverse else radix - 1
        for k in range(m):
            row = [columns[j][k] for j in range(radix)]
            block = _cheap_radix2(row, exponent, params)
            for k2, value in enumerate(block):
                out[k + m * k2] = value
        return out

    values = transform(list(v.values), order // size)
    return EvalVector(
        tuple(values), Phase.COEFF if inverse else Phase.EVAL
    )


def half_dft(
    v: EvalVector,
    table: TwiddleTable,
    params: GfpParams,
    direction: str = 'forward',
    multiplier: ElementMultiplier | None = None,
) -> EvalVector:
    """Evaluate P mod (X^N + 1) at the odd powers of a 2N-th root, or undo it.

    The inverse folds the 1/N scaling into its post-weights.
    """
    size = len(v)
    if table.order < 2 * size:
        raise TableTooSmall(
            f'Table of order {table.order} cannot serve length {size}'
        )
    if table.order != 2 * size:
        raise LengthMismatch(
            f'Half-DFT of length {size} needs a table of order {2 * size}'
        )
    multiplier = multiplier or GenericMultiplier(params)

    if direction == 'forward':
        if v.phase is not Phase.COEFF:
            raise PhaseMismatch('Forward half-DFT expects coefficients')
        weighted = []
        for i, value in enumerate(v.values):
            counters.record('expensive_muls')
            weighted.append(multiplier.multiply_twiddle(value, table, i))
        return large_radix_fft(
            EvalVector(tuple(weighted)), table, params, multiplier
        )

    if v.phase is not Phase.EVAL:
        raise PhaseMismatch('Inverse half-DFT expects evaluations')
    unweighted = large_radix_fft(v, table, params, multiplier, inverse=True)
    values = []
    for i, value in enumerate(unweighted.values):
        counters.record('expensive_muls')
        values.append(multiplier.multiply_weight(value, table, i))
    return EvalVector(tuple(values), Phase.COEFF)


def pointwise_product(
    a: EvalVector,
    b: EvalVector,
    params: GfpParams,
    multiplier: ElementMultiplier | None = None,
) -> EvalVector:
    if a.phase is not Phase.EVAL or b.phase is not Phase.EVAL:
        raise PhaseMismatch('Pointwise product expects evaluations')
    if len(a) != len(b):
        raise LengthMismatch(f'Lengths {len(a)} and {len(b)} differ')
    multiplier = multiplier or GenericMultiplier(params)
    values = []
    for x, y in zip(a.values, b.values):
        counters.record('expensive_muls')
        values.append(multiplier.multiply(x, y))
    return EvalVector(tuple(values), Phase.EVAL)
