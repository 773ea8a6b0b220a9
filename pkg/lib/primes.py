"""Generalized Fermat primes r^(2^lambda) + 1.

Primality testing, searching and counting over even bases, and the
Bateman-Horn style density estimates (the constant C_lambda, the
expectancy E and the windowed expectancy Delta) used to judge whether a
prime can be found in a window [X, X(1 + lambda^2)].
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np
from sympy import integer_nthroot

from lib.errors import OutOfRange, SearchExhausted

DEFAULT_TRIAL_BOUND = 1 << 16
DEFAULT_ROUNDS = 25
DEFAULT_SCAN_LIMIT = 10**6
DEFAULT_DENSITY_K = 10**6
SEGMENT_SIZE = 1 << 22

# Strong pseudoprime bases; the first twelve certify every n < 2^64.
SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113,
)  # fmt: skip
DETERMINISTIC_LIMIT = 1 << 64

# Primes used for each range of input bit sizes.
PRIME_RANGES = (
    (1 << 16, 1 << 32, 74, 4),
    (1 << 32, 1 << 64, 884, 5),
    (1 << 64, 1 << 128, 1084, 6),
    (1 << 128, 1 << 256, 1738, 7),
    (1 << 256, 1 << 512, 1348, 8),
)


def gamma(lam: int, shape: str = 'identity') -> int:
    """The coefficient size sequence gamma(lambda) of the window bounds."""
    if shape == 'identity':
        return lam
    if shape == 'hyp2-upper':
        value = lam * math.log2(lam) / 2 - lam / 4 if lam > 1 else 0
        return max(lam, math.ceil(value))
    if shape == 'subexponential':
        return 1 << math.ceil(math.sqrt(lam))
    if shape == 'exponential':
        return 1 << lam
    raise KeyError(shape)


GAMMA_SHAPES = ('identity', 'hyp2-upper', 'subexponential', 'exponential')


def _strong_probable_prime(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    x = pow(base, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(
    n: int,
    rounds: int = DEFAULT_ROUNDS,
    form_modulus: int = 2,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
) -> bool:
    """Trial division by k*form_modulus + 1, then strong pseudoprime tests.

    Every odd prime factor of a generalized Fermat number is of that form,
    so only those candidates are tried. The answer is exact below 2^64.
    """
    if n < 2:
        return False
    if n in SMALL_PRIMES:
        return True
    if not n & 1:
        return False
    q = form_modulus + 1
    while q <= trial_bound:
        if q * q > n:
            return True
        if n % q == 0:
            return False
        q += form_modulus
    if n < DETERMINISTIC_LIMIT:
        bases = SMALL_PRIMES[:12]
    else:
        bases = SMALL_PRIMES[: max(rounds, 1)]
    return all(_strong_probable_prime(n, a) for a in bases if a % n)


def is_gfp_prime(
    r: int,
    lam: int,
    rounds: int = DEFAULT_ROUNDS,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
) -> bool:
    if r < 2 or r & 1 or lam < 1:
        return False
    p = r ** (1 << lam) + 1
    return is_probable_prime(
        p, rounds=rounds, form_modulus=2 << lam, trial_bound=trial_bound
    )


@dataclass(frozen=True)
class SearchWindow:
    lam: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.lam < 1 or self.lo > self.hi:
            raise OutOfRange(
                f'Invalid window [{self.lo}, {self.hi}] for lambda={self.lam}'
            )

    @classmethod
    def from_start(cls, lam: int, x: int) -> 'SearchWindow':
        return cls(lam, x, x * (1 + lam * lam))

    def candidates(self) -> range:
        first = self.lo + (self.lo & 1)
        return range(max(first, 2), self.hi + 1, 2)


def _count_range(lam: int, bases: range, rounds: int, trial_bound: int):
    return sum(
        1 for r in bases if is_gfp_prime(r, lam, rounds, trial_bound)
    )


def _split(bases: range, parts: int) -> list[range]:
    step = bases.step * parts
    return [
        range(bases.start + i * bases.step, bases.stop, step)
        for i in range(parts)
    ]


def count_gfp(
    window: SearchWindow,
    jobs: int = 1,
    rounds: int = DEFAULT_ROUNDS,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
) -> int:
    """Number of even r in the window with r^(2^lambda) + 1 prime."""
    bases = window.candidates()
    if jobs <= 1 or len(bases) < 2 * jobs:
        return _count_range(window.lam, bases, rounds, trial_bound)

    logging.debug(
        'Counting %d candidates for lambda=%d on %d workers',
        len(bases),
        window.lam,
        jobs,
    )
    parts = _split(bases, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        counts = pool.map(
            _count_range,
            [window.lam] * len(parts),
            parts,
            [rounds] * len(parts),
            [trial_bound] * len(parts),
        )
    return sum(counts)


def next_gfp(
    r_start: int,
    lam: int,
    direction: str = 'up',
    scan_limit: int = DEFAULT_SCAN_LIMIT,
    ceiling: int | None = None,
    rounds: int = DEFAULT_ROUNDS,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
) -> int:
    """Closest even r from r_start in the given direction giving a prime.

    At most ``scan_limit`` candidates are examined and, scanning up, none
    above ``ceiling``.
    """
    if direction not in ('up', 'down'):
        raise KeyError(direction)
    step = 2 if direction == 'up' else -2
    r = max(r_start, 2)
    if r & 1:
        r += 1 if direction == 'up' else -1

    for _ in range(scan_limit):
        if r < 2 or (ceiling is not None and r > ceiling):
            break
        if is_gfp_prime(r, lam, rounds, trial_bound):
            logging.debug(
                'Found %d^%d+1 scanning from %d', r, 1 << lam, r_start
            )
            return r
        r += step

    raise SearchExhausted(
        f'No generalized Fermat prime with lambda={lam} '
        f'scanning {direction} from {r_start}'
    )


def smallest_gfp_with_bits(
    lam: int,
    min_bits: int,
    scan_limit: int = DEFAULT_SCAN_LIMIT,
) -> int:
    """Smallest even r with r^(2^lambda) >= 2^min_bits and a prime."""
    return next_gfp(min_base(lam, min_bits), lam, scan_limit=scan_limit)


def min_base(lam: int, min_bits: int) -> int:
    """Smallest r with r^(2^lambda) >= 2^min_bits."""
    root, exact = integer_nthroot(1 << min_bits, 1 << lam)
    return max(2, int(root) if exact else int(root) + 1)


def verify_prime_ranges() -> list[tuple[int, int, int, int, bool]]:
    return [
        (lo, hi, r, lam, is_gfp_prime(r, lam))
        for lo, hi, r, lam in PRIME_RANGES
    ]


# Density estimates


@dataclass(frozen=True)
class DensityParams:
    lam: int
    K: int = DEFAULT_DENSITY_K
    gamma_shape: str = 'identity'

    def __post_init__(self):
        if self.lam < 1 or self.K < 0:
            raise OutOfRange(f'Invalid density parameters {self}')

    @classmethod
    def from_settings(cls, lam: int) -> 'DensityParams':
        from settings import settings

        return cls(
            lam=lam,
            K=settings['density_k'],
            gamma_shape=settings['gamma_shape'],
        )


@dataclass(frozen=True)
class ConstantReport:
    lam: int
    K: int
    value: float
    value_2k: float
    stabilization: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            'stabilization',
            abs(self.value_2k - self.value) / self.value,
        )


def _small_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, isqrt(limit) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return np.flatnonzero(sieve)


def segmented_primes(limit: int, segment: int = SEGMENT_SIZE):
    """Yield arrays of the primes up to ``limit``, one segment at a time."""
    base = _small_primes(isqrt(limit) + 1)
    for lo in range(0, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        sieve = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            sieve[: min(2, hi)] = False
        for q in base:
            q = int(q)
            if q * q >= hi:
                break
            start = max(q * q, -(-lo // q) * q)
            sieve[start - lo :: q] = False
        yield lo + np.flatnonzero(sieve).astype(np.int64)


def _partial_logs(lam: int, cutoffs: tuple[int, ...]) -> list[tuple]:
    """log t(K, lambda) and log u(K, lambda) for each K in ``cutoffs``."""
    modulus = 2 << lam
    weight = float(1 << lam)
    limits = [k * modulus + 1 for k in cutoffs]
    log_t = [0.0] * len(cutoffs)
    log_u = [0.0] * len(cutoffs)

    for chunk in segmented_primes(max(limits)):
        odd = chunk[chunk > 2]
        if not odd.size:
            continue
        forms = odd[(odd - 1) % modulus == 0]
        for i, limit in enumerate(limits):
            if odd[0] > limit:
                continue
            log_u[i] += float(np.log1p(-1.0 / odd[odd <= limit]).sum())
            selected = forms[forms <= limit]
            log_t[i] += float(np.log1p(-weight / selected).sum())
        logging.debug('Sieved primes up to %d', int(chunk[-1]))
    return list(zip(log_t, log_u))


@lru_cache(maxsize=64)
def _constant(lam: int, K: int) -> float:
    if K == 0:
        return 1.0
    ((log_t, log_u),) = _partial_logs(lam, (K,))
    return math.exp(log_t - log_u)


def c_lambda(dp: DensityParams) -> float:
    """t(K, lambda) / u(K, lambda).

    t runs over the primes k*2^(lambda+1) + 1 with k <= K and u over the
    odd primes up to K*2^(lambda+1) + 1.
    """
    return _constant(dp.lam, dp.K)


def c_lambda_report(dp: DensityParams) -> ConstantReport:
    if dp.K == 0:
        return ConstantReport(dp.lam, 0, 1.0, 1.0)
    (t1, u1), (t2, u2) = _partial_logs(dp.lam, (dp.K, 2 * dp.K))
    return ConstantReport(
        dp.lam, dp.K, math.exp(t1 - u1), math.exp(t2 - u2)
    )


def _inverse_log_sum(lo: int, hi: int, chunk: int = SEGMENT_SIZE) -> float:
    """Sum of 1/log r for r in [lo, hi]."""
    total = 0.0
    for start in range(max(lo, 2), hi + 1, chunk):
        stop = min(start + chunk, hi + 1)
        total += float((1.0 / np.log(np.arange(start, stop))).sum())
    return total


def expectancy(R: int, dp: DensityParams) -> float:
    """E(R, lambda) = C_lambda / 2^lambda * sum_{r=2}^{R} 1 / log r."""
    if R < 2:
        raise OutOfRange(f'R={R} must be at least 2')
    return c_lambda(dp) / (1 << dp.lam) * _inverse_log_sum(2, R)


def delta(R: int, dp: DensityParams) -> float:
    """E(R(1 + lambda^2)) - E(R), the expected count in the window."""
    if R < 2:
        raise OutOfRange(f'R={R} must be at least 2')
    hi = R * (1 + dp.lam * dp.lam)
    return c_lambda(dp) / (1 << dp.lam) * _inverse_log_sum(R + 1, hi)


def delta_asymptotic(R: int, dp: DensityParams) -> float:
    """Closed form C * R/2^lambda * ((1+l^2)/log(R(1+l^2)) - 1/log R)."""
    if R < 2:
        raise OutOfRange(f'R={R} must be at least 2')
    spread = 1 + dp.lam * dp.lam
    return (
        c_lambda(dp)
        * R
        / (1 << dp.lam)
        * (spread / math.log(R * spread) - 1 / math.log(R))
    )


@dataclass(frozen=True)
class DensityRow:
    lam: int
    lo: int
    hi: int
    count: int
    expected: float
    estimate: float

    def as_record(self) -> dict:
        return {
            'lambda': self.lam,
            'lo': self.lo,
            'hi': self.hi,
            'count': self.count,
            'estimate': self.estimate,
        }


def density_row(lam: int, x: int, dp: DensityParams, jobs: int = 1):
    window = SearchWindow.from_start(lam, x)
    return DensityRow(
        lam=lam,
        lo=window.lo,
        hi=window.hi,
        count=count_gfp(window, jobs=jobs),
        expected=delta(x, dp),
        estimate=delta_asymptotic(x, dp),
    )


def density_rows(
    lambdas, K: int = DEFAULT_DENSITY_K, jobs: int = 1, wide: bool = True
) -> list[DensityRow]:
    """Counts and estimates for the windows starting at 2^l and 2^(2l)."""
    rows = []
    for lam in lambdas:
        dp = DensityParams(lam, K)
        starts = [1 << lam, 1 << (2 * lam)] if wide else [1 << lam]
        rows.extend(density_row(lam, x, dp, jobs=jobs) for x in starts)
    return rows


@dataclass(frozen=True)
class WindowSample:
    x: int
    hi: int
    found: bool
    first_r: int | None


@dataclass(frozen=True)
class WindowReport:
    lam: int
    gamma_shape: str
    gamma: int
    samples: tuple[WindowSample, ...]

    @property
    def holds(self) -> bool:
        return all(sample.found for sample in self.samples)


def sample_starts(lam: int, gamma_value: int, samples: int) -> list[int]:
    """Start points from 2^gamma to 2^(2 gamma), geometrically spaced."""
    samples = max(samples, 2)
    starts = {
        round(2 ** (gamma_value * (1 + i / (samples - 1))))
        for i in range(samples)
    }
    starts |= {1 << gamma_value, 1 << (2 * gamma_value)}
    return sorted(starts)


def hypothesis_window_check(
    lam: int, gamma_shape: str = 'identity', samples: int = 2
) -> WindowReport:
    """Whether a prime exists in [X, X(1 + lambda^2)] for sampled X."""
    gamma_value = gamma(lam, gamma_shape)
    results = []
    for x in sample_starts(lam, gamma_value, samples):
        hi = x * (1 + lam * lam)
        try:
            r = next_gfp(x, lam, ceiling=hi, scan_limit=(hi - x) // 2 + 2)
        except SearchExhausted:
            logging.warning(
                'No prime r^%d+1 with r in [%d, %d]', 1 << lam, x, hi
            )
            results.append(WindowSample(x, hi, False, None))
        else:
            results.append(WindowSample(x, hi, True, r))
    return WindowReport(lam, gamma_shape, gamma_value, tuple(results))
