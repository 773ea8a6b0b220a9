"""Integer multiplication through FFTs over generalized Fermat prime fields.

A plan is a chain of levels. Level 0 multiplies integers: they are cut into
eta-bit chunks, transformed with a half-DFT over the level's field, and
multiplied pointwise. Each pointwise product is a product in the level's
field and goes one level down, either through Kronecker substitution (an
integer product, handled like level 0) or by grouping beta digits into a
chunk and running a negacyclic transform over the next field. The last
level multiplies its field elements directly.
"""

import logging
import math
import operator
import re
from dataclasses import dataclass, replace

from lib import counters
from lib.errors import (
    NoValidBeta,
    OutOfRange,
    Overflow,
    PlanFormatError,
    PrimeNotFound,
    SearchExhausted,
)
from lib.gfp import (
    GfpElement,
    GfpParams,
    decode,
    inv_pow2,
    lift,
    make_params,
    neg,
    normalize,
    schoolbook,
    signed_digits,
)
from lib.primes import DEFAULT_SCAN_LIMIT, gamma, min_base, next_gfp
from lib.transform import (
    EvalVector,
    TwiddleTable,
    build_twiddle_table,
    half_dft,
    large_radix_fft,
    pointwise_product,
)

PLAN_LINE = re.compile(
    r'^level (\d+): r=(\d+) lambda=(\d+) eta=(\d+) N=(\d+) beta=(\d+)$'
)


@dataclass(frozen=True)
class PlanConfig:
    gamma_shape: str = 'identity'
    prime_mode: str = 'practical'
    base_case_bits: int = 4096
    schoolbook_threshold: int = 64
    use_grouping: bool = True
    cache_transformed: bool = True
    cyclic_top: bool = False
    search_multiplier: int = 4
    top_lambda: int = 0
    scan_limit: int = DEFAULT_SCAN_LIMIT

    @classmethod
    def from_settings(cls, **overrides) -> 'PlanConfig':
        from settings import settings

        values = dict(
            gamma_shape=settings['gamma_shape'],
            prime_mode=settings['prime_mode'],
            base_case_bits=settings['base_case_bits'],
            schoolbook_threshold=settings['schoolbook_threshold'],
            use_grouping=settings['use_grouping'],
            cache_transformed=settings['cache_transformed_twiddles'],
            cyclic_top=settings['cyclic_top'],
            search_multiplier=settings['search_multiplier'],
            top_lambda=settings['top_lambda'],
            scan_limit=settings['scan_ceiling'],
        )
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class PlanLevel:
    index: int
    params: GfpParams
    eta: int
    big_n: int
    beta: int = 0
    table: TwiddleTable | None = None

    @property
    def capacity(self) -> int:
        """Largest operand size in bits at an integer level."""
        return self.big_n * self.eta // 2


@dataclass(frozen=True)
class MultiplyPlan:
    levels: tuple[PlanLevel, ...]
    top_n: int
    config: PlanConfig = PlanConfig()

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def capacity(self) -> int:
        return self.levels[0].capacity if self.levels else self.top_n

    def is_grouped(self, index: int) -> bool:
        """Whether the level is reached by grouping the previous digits."""
        return index > 0 and self.levels[index - 1].beta > 0


@dataclass(frozen=True)
class PreparedOperand:
    element: GfpElement
    image: EvalVector | None


def _next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def _log2_exact(x: int) -> int:
    return x.bit_length() - 1


def lambda_for(size_bits: float) -> int:
    """Smallest lambda >= 2 with 2^lambda >= log2(size_bits)."""
    if size_bits <= 4:
        return 2
    return max(2, math.ceil(math.log2(math.log2(size_bits))))


def mu_for(gamma_value: int) -> int:
    """Smallest power of two at or above gamma / 2."""
    return _next_pow2(math.ceil(gamma_value / 2))


def ks_stride(params: GfpParams) -> int:
    return 2 * params.coeff_bits + params.lam


def ks_size(params: GfpParams) -> int:
    return ks_stride(params) * params.size


def _select_base(lam: int, bits: int, two_n: int, config: PlanConfig) -> int:
    """Smallest suitable r for a field of at least ``bits`` bits.

    The field must also hold a root of unity of order ``two_n``.
    """
    r = min_base(lam, bits)
    ceiling = None
    if config.prime_mode == 'theoretical':
        ceiling = r * (1 + lam * lam) * config.search_multiplier
    try:
        while True:
            r = next_gfp(
                r, lam, scan_limit=config.scan_limit, ceiling=ceiling
            )
            if (r ** (1 << lam)) % two_n == 0:
                return r
            r += 2
    except SearchExhausted as e:
        raise PrimeNotFound(
            f'No prime r^{1 << lam}+1 of {bits} bits with order {two_n}'
        ) from e


def _integer_level(index: int, n: int, config: PlanConfig, lam: int = 0):
    lam = lam or lambda_for(n)
    eta = (1 << lam) * mu_for(gamma(lam, config.gamma_shape))
    big_n = _next_pow2(-(-2 * n // eta))
    bits = 2 * eta + _log2_exact(big_n)
    r = _select_base(lam, bits, 2 * big_n, config)
    logging.debug(
        'Level %d: n=%d lambda=%d eta=%d N=%d r=%d',
        index,
        n,
        lam,
        eta,
        big_n,
        r,
    )
    return PlanLevel(index, make_params(r, lam), eta, big_n)


def choose_beta(
    level_params: GfpParams, next_lambda: int, gamma_shape: str = 'identity'
) -> int:
    """Largest power of two beta grouping digits of ``level_params``.

    Requires 2 beta log2 r + lambda - log2 beta <= 2 gamma(l') 2^l'.
    """
    bound = 2 * gamma(next_lambda, gamma_shape) * (1 << next_lambda)
    log_r = math.log2(level_params.r)

    def fits(beta: int) -> bool:
        return (
            2 * beta * log_r + level_params.lam - math.log2(beta) <= bound
        )

    if not fits(1):
        raise NoValidBeta(
            f'No grouping of {level_params} fits lambda={next_lambda}'
        )
    beta = 1
    while beta < level_params.size and fits(2 * beta):
        beta *= 2
    return beta


def _grouped_level(index: int, parent: GfpParams, config: PlanConfig):
    next_lambda = lambda_for(math.log2(parent.p))
    beta = choose_beta(parent, next_lambda, config.gamma_shape)
    length = parent.size // beta
    eta = beta * parent.coeff_bits
    bits = 2 * eta + _log2_exact(length) + 1
    r = _select_base(next_lambda, bits, 2 * length, config)
    logging.debug(
        'Level %d: grouping beta=%d of %s into %d^%d+1',
        index,
        beta,
        parent,
        r,
        1 << next_lambda,
    )
    return beta, PlanLevel(index, make_params(r, next_lambda), eta, length)


def validate_level(level: PlanLevel) -> None:
    budget = 2 * level.eta + _log2_exact(level.big_n)
    if budget > level.params.floor_bits:
        raise PlanFormatError(
            f'Level {level.index} needs {budget} bits, '
            f'{level.params} has {level.params.floor_bits}'
        )
    if (level.params.p - 1) % (2 * level.big_n):
        raise PlanFormatError(
            f'Level {level.index}: 2N={2 * level.big_n} does not divide p-1'
        )


def validate_chain(levels) -> None:
    """Each level must be able to serve the products of the one above."""
    for level in levels:
        validate_level(level)
    for above, level in zip(levels, levels[1:]):
        if not above.beta:
            if level.capacity < ks_size(above.params):
                raise PlanFormatError(
                    f'Level {level.index} cannot hold the packed products '
                    f'of {above.params}'
                )
            continue
        length = above.params.size // above.beta
        eta = above.beta * above.params.coeff_bits
        needed = 2 * eta + _log2_exact(length) + 1
        if (level.big_n, level.eta) != (length, eta):
            raise PlanFormatError(
                f'Level {level.index} must use N={length} eta={eta}'
            )
        if needed > level.params.floor_bits:
            raise PlanFormatError(
                f'Level {level.index} needs {needed} bits for grouping'
            )


def plan_parameters(n: int, config: PlanConfig = PlanConfig()) -> MultiplyPlan:
    """Chain of levels for n-bit operands, without twiddle tables."""
    if n < 1:
        raise OutOfRange(f'Bit size {n} must be positive')
    if n < config.base_case_bits:
        return MultiplyPlan((), n, config)

    levels = [_integer_level(0, n, config, config.top_lambda)]
    served = n
    while True:
        current = levels[-1]
        s_next = ks_size(current.params)
        if s_next < config.base_case_bits or s_next >= served:
            break
        index = current.index + 1
        following = None
        if config.use_grouping:
            try:
                beta, following = _grouped_level(
                    index, current.params, config
                )
            except NoValidBeta:
                logging.debug('Level %d: no grouping, using Kronecker', index)
            else:
                levels[-1] = replace(current, beta=beta)
        if following is None:
            following = _integer_level(index, s_next, config)
        levels.append(following)
        served = s_next

    validate_chain(levels)
    return MultiplyPlan(tuple(levels), n, config)


def _attach_tables(plan: MultiplyPlan) -> MultiplyPlan:
    levels = [
        replace(
            level, table=build_twiddle_table(level.params, 2 * level.big_n)
        )
        for level in plan.levels
    ]
    if plan.config.cache_transformed and len(levels) >= 2:
        for index in reversed(range(len(levels) - 1)):
            partial = replace(plan, levels=tuple(levels))
            table = levels[index].table
            transformed = [
                prepare_operand(x, partial, index) for x in table.powers
            ]
            inverse = [
                prepare_operand(x, partial, index)
                for x in table.inverse_weights
            ]
            levels[index] = replace(
                levels[index], table=table.with_images(transformed, inverse)
            )
    return replace(plan, levels=tuple(levels))


def precompute(n: int, config: PlanConfig = PlanConfig()) -> MultiplyPlan:
    """Primes, roots and twiddle tables for multiplying n-bit integers."""
    return _attach_tables(plan_parameters(n, config))


def precompute_from_levels(
    specs, config: PlanConfig = PlanConfig()
) -> MultiplyPlan:
    """Rebuild a plan from ``(r, lambda, eta, N, beta)`` rows."""
    levels = []
    for index, (r, lam, eta, big_n, beta) in enumerate(specs):
        levels.append(PlanLevel(index, make_params(r, lam), eta, big_n, beta))
    if levels and levels[-1].beta:
        raise PlanFormatError('The last level cannot group its digits')
    validate_chain(levels)
    top_n = levels[0].capacity if levels else 0
    return _attach_tables(MultiplyPlan(tuple(levels), top_n, config))


def serialize_plan(plan: MultiplyPlan) -> str:
    return ''.join(
        f'level {level.index}: r={level.params.r} lambda={level.params.lam} '
        f'eta={level.eta} N={level.big_n} beta={level.beta}\n'
        for level in plan.levels
    )


def parse_plan(text: str) -> list[tuple[int, int, int, int, int]]:
    specs = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        match = PLAN_LINE.match(line)
        if not match:
            raise PlanFormatError(f'Malformed plan line: {line!r}')
        index, *values = (int(group) for group in match.groups())
        if index != len(specs):
            raise PlanFormatError(f'Expected level {len(specs)}, got {index}')
        specs.append(tuple(values))
    return specs


# Chunk packing


def join_chunks(chunks, width: int) -> int:
    """Integer whose width-bit digits, least significant first, are given."""
    if not chunks:
        return 0
    digits = (format(c, f'0{width}b') for c in reversed(chunks))
    return int(''.join(digits), 2)


def split_chunks(x: int, width: int, count: int) -> list[int]:
    if x < 0 or x.bit_length() > width * count:
        raise Overflow(f'{x.bit_length()} bits do not fit {count}x{width}')
    bits = format(x, 'b').zfill(width * count)
    total = len(bits)
    return [
        int(bits[total - (k + 1) * width : total - k * width], 2)
        for k in range(count)
    ]


def recompose(coefficients, eta: int) -> int:
    """Evaluate the coefficient polynomial at 2^eta, propagating carries."""
    mask = (1 << eta) - 1
    digits = []
    carry = 0
    for c in coefficients:
        carry += c
        digits.append(carry & mask)
        carry >>= eta
    return join_chunks(digits, eta) + (carry << (eta * len(digits)))


# Field element products


def kronecker_multiply(
    a: GfpElement, b: GfpElement, params: GfpParams, inner=operator.mul
) -> GfpElement:
    """Field product through one integer product of packed digits."""
    if a.minus_one:
        return neg(b, params)
    if b.minus_one:
        return neg(a, params)
    stride = ks_stride(params)
    x = join_chunks(a.coeffs, stride)
    y = join_chunks(b.coeffs, stride)
    product = inner(x, y)
    return normalize(split_chunks(product, stride, 2 * params.size), params)


def group_coefficients(
    e: GfpElement, beta: int, params: GfpParams
) -> list[int]:
    """Digits of ``e`` regrouped in radix r^beta."""
    if beta < 1 or params.size % beta:
        raise OutOfRange(f'beta={beta} does not divide {params.size}')
    digits = signed_digits(e)
    chunks = []
    for start in range(0, params.size, beta):
        value = 0
        for digit in reversed(digits[start : start + beta]):
            value = value * params.r + digit
        chunks.append(value)
    return chunks


def ungroup_coefficients(chunks, beta: int, params: GfpParams) -> GfpElement:
    raw = [0] * params.size
    for j, chunk in enumerate(chunks):
        raw[j * beta] = chunk
    return normalize(raw, params)


class LevelMultiplier:
    """Products in the field of one plan level, computed one level down."""

    def __init__(self, plan: MultiplyPlan, index: int):
        self.plan = plan
        self.index = index

    def multiply(self, a, b):
        with counters.at_level(self.index + 1):
            return multiply_elements(a, b, self.plan, self.index)

    def _prepared(self, a, prepared: PreparedOperand):
        with counters.at_level(self.index + 1):
            return multiply_prepared(a, prepared, self.plan, self.index)

    def multiply_twiddle(self, a, table, index):
        if table.transformed is not None:
            return self._prepared(a, table.transformed[index])
        return self.multiply(a, table.powers[index])

    def multiply_weight(self, a, table, index):
        if table.transformed_inverse is not None:
            return self._prepared(a, table.transformed_inverse[index])
        return self.multiply(a, table.inverse_weights[index])


def multiply_elements(
    a: GfpElement, b: GfpElement, plan: MultiplyPlan, index: int
) -> GfpElement:
    level = plan.levels[index]
    params = level.params
    if index + 1 == plan.depth:
        if params.size <= plan.config.schoolbook_threshold:
            return schoolbook(a, b, params)
        return kronecker_multiply(a, b, params)
    if level.beta:
        product = recursive_level_multiply(
            group_coefficients(a, level.beta, params),
            group_coefficients(b, level.beta, params),
            plan,
            index + 1,
        )
        return ungroup_coefficients(product, level.beta, params)
    return kronecker_multiply(
        a,
        b,
        params,
        lambda x, y: integer_multiply(x, y, plan, index + 1),
    )


def _forward_operand(a: GfpElement, plan: MultiplyPlan, index: int):
    level = plan.levels[index]
    if level.beta:
        chunks = group_coefficients(a, level.beta, level.params)
        return _chunk_forward(chunks, plan, index + 1)
    packed = join_chunks(a.coeffs, ks_stride(level.params))
    return _integer_forward(packed, plan, index + 1)


def _finish_operand(c: EvalVector, plan: MultiplyPlan, index: int):
    level = plan.levels[index]
    params = level.params
    if level.beta:
        chunks = _chunk_finish(c, plan, index + 1)
        return ungroup_coefficients(chunks, level.beta, params)
    product = _integer_finish(c, plan, index + 1)
    stride = ks_stride(params)
    return normalize(split_chunks(product, stride, 2 * params.size), params)


def prepare_operand(
    e: GfpElement, plan: MultiplyPlan, index: int
) -> PreparedOperand:
    """Forward image of ``e`` one level below ``index``."""
    if e.minus_one:
        return PreparedOperand(e, None)
    return PreparedOperand(e, _forward_operand(e, plan, index))


def multiply_prepared(
    a: GfpElement, prepared: PreparedOperand, plan: MultiplyPlan, index: int
) -> GfpElement:
    params = plan.levels[index].params
    if prepared.image is None:
        return neg(a, params)
    if a.minus_one:
        return neg(prepared.element, params)
    fa = _forward_operand(a, plan, index)
    below = plan.levels[index + 1].params
    product = pointwise_product(
        fa, prepared.image, below, LevelMultiplier(plan, index + 1)
    )
    return _finish_operand(product, plan, index)


def _chunk_forward(chunks, plan: MultiplyPlan, index: int) -> EvalVector:
    level = plan.levels[index]
    values = EvalVector(tuple(lift(x, level.params) for x in chunks))
    return half_dft(
        values,
        level.table,
        level.params,
        'forward',
        LevelMultiplier(plan, index),
    )


def _chunk_finish(c: EvalVector, plan: MultiplyPlan, index: int) -> list:
    level = plan.levels[index]
    p = level.params.p
    values = half_dft(
        c, level.table, level.params, 'inverse', LevelMultiplier(plan, index)
    )
    centered = []
    for v in values.values:
        x = decode(v, level.params)
        centered.append(x - p if x > p // 2 else x)
    return centered


def recursive_level_multiply(A, B, plan: MultiplyPlan, index: int) -> list:
    """Negacyclic product of chunk polynomials over the field of ``index``.

    Returns the product's chunks as signed integers.
    """
    level = plan.levels[index]
    if len(A) != level.big_n or len(B) != level.big_n:
        raise Overflow(f'Level {index} multiplies {level.big_n} chunks')
    fa = _chunk_forward(A, plan, index)
    fb = _chunk_forward(B, plan, index)
    product = pointwise_product(
        fa, fb, level.params, LevelMultiplier(plan, index)
    )
    return _chunk_finish(product, plan, index)


def _integer_forward(x: int, plan: MultiplyPlan, index: int) -> EvalVector:
    level = plan.levels[index]
    chunks = split_chunks(x, level.eta, level.big_n)
    values = EvalVector(tuple(lift(c, level.params) for c in chunks))
    multiplier = LevelMultiplier(plan, index)
    if index == 0 and plan.config.cyclic_top:
        return large_radix_fft(values, level.table, level.params, multiplier)
    return half_dft(
        values, level.table, level.params, 'forward', multiplier
    )


def _integer_finish(c: EvalVector, plan: MultiplyPlan, index: int) -> int:
    level = plan.levels[index]
    params = level.params
    multiplier = LevelMultiplier(plan, index)
    if index == 0 and plan.config.cyclic_top:
        unscaled = large_radix_fft(
            c, level.table, params, multiplier, inverse=True
        )
        scale = inv_pow2(_log2_exact(level.big_n), params)
        values = []
        for v in unscaled.values:
            counters.record('expensive_muls')
            values.append(multiplier.multiply(v, scale))
    else:
        values = half_dft(
            c, level.table, params, 'inverse', multiplier
        ).values
    return recompose([decode(v, params) for v in values], level.eta)


def integer_multiply(a: int, b: int, plan: MultiplyPlan, index: int) -> int:
    level = plan.levels[index]
    if max(a.bit_length(), b.bit_length()) > level.capacity:
        raise Overflow(
            f'Level {index} multiplies operands of {level.capacity} bits'
        )
    fa = _integer_forward(a, plan, index)
    fb = _integer_forward(b, plan, index)
    product = pointwise_product(
        fa, fb, level.params, LevelMultiplier(plan, index)
    )
    return _integer_finish(product, plan, index)


def multiply(a: int, b: int, plan: MultiplyPlan) -> int:
    """Exact product a * b."""
    if a < 0 or b < 0:
        raise OutOfRange('Operands must be non-negative')
    if not plan.levels:
        return a * b
    if max(a.bit_length(), b.bit_length()) > plan.capacity:
        raise Overflow(
            f'Plan multiplies operands of at most {plan.capacity} bits'
        )
    with counters.at_level(0):
        return integer_multiply(a, b, plan, 0)
