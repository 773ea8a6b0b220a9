"""Closed-form operation counts for the FFT multiplier.

Only the general field multiplications performed by the top level are
modelled. Shifts by powers of r and additions are linear and left out.
"""

import logging
import math
import re
from dataclasses import asdict, dataclass

import numpy as np

from lib.errors import NoValidEta, OutOfRange, ProfileFormatError

PROFILE_LINE = re.compile(r'^bits=(\d+)\s+seconds=([0-9.eE+-]+)$')

BUDGETS = ('coefficient', 'strict')


def _log2_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise OutOfRange(f'{n} is not a power of two')
    return n.bit_length() - 1


def _stages(big_n: int, lam: int) -> int:
    """ceil(log_{2^(lambda+1)} N), at least one block."""
    return max(1, -(-_log2_pow2(big_n) // (lam + 1)))


def fermat_fft_count(big_n: int, radix_log: int) -> int:
    """Expensive multiplications of one length-N large-radix transform."""
    stages = max(1, -(-_log2_pow2(big_n) // radix_log))
    return big_n * (stages - 1)


def full_multiply_count(big_n: int, lam: int, cyclic_top=False) -> int:
    """Three transforms, the half-DFT weights and the pointwise products."""
    stages = _stages(big_n, lam)
    if cyclic_top:
        return big_n * (3 * stages - 1)
    return big_n * (3 * stages + 1)


def twiddle_multiply_count(big_n: int, lam: int) -> int:
    """Count when one operand's forward image is precomputed."""
    return big_n * (2 * _stages(big_n, lam) + 1)


def ks_bitsize(r: int, lam: int) -> int:
    """Bit size of the Kronecker-packed operand of a field product."""
    return (2 * (r - 1).bit_length() + lam) << lam


def _floor_log2_p(r: int, lam: int) -> int:
    return (r ** (1 << lam)).bit_length() - 1


def choose_eta(n: int, r: int, lam: int, budget: str = 'coefficient') -> int:
    """Largest power-of-two chunk size allowed by the bit budget.

    ``coefficient`` only asks 2 eta <= floor(log2 p); ``strict`` also
    leaves room for the log2 N bits of the coefficient sums.
    """
    if budget not in BUDGETS:
        raise OutOfRange(f'Unknown budget {budget!r}')
    floor_bits = _floor_log2_p(r, lam)

    def fits(eta: int) -> bool:
        if eta > 2 * n:
            return False
        needed = 2 * eta
        if budget == 'strict':
            needed += _log2_pow2(_transform_length(n, eta))
        return needed <= floor_bits

    if not fits(1):
        raise NoValidEta(f'No chunk size fits {r}^{1 << lam}+1 for n={n}')
    eta = 1
    while fits(2 * eta):
        eta *= 2
    return eta


def _transform_length(n: int, eta: int) -> int:
    return 1 << max(0, (-(-2 * n // eta) - 1).bit_length())


def expensive_count(
    n: int, r: int, lam: int, budget: str = 'coefficient'
) -> tuple[int, int, int]:
    eta = choose_eta(n, r, lam, budget)
    big_n = _transform_length(n, eta)
    return eta, big_n, full_multiply_count(big_n, lam)


def ssa_count(n: int) -> int:
    """Approximate Schonhage-Strassen split count 2^ceil((log2 n + 1) / 2)."""
    return 1 << math.ceil((math.log2(n) + 1) / 2)


@dataclass(frozen=True)
class TimingProfile:
    """Seconds per field multiplication, indexed by Kronecker bit size."""

    sizes: tuple[int, ...]
    seconds: tuple[float, ...]

    def __post_init__(self):
        if len(self.sizes) != len(self.seconds) or not self.sizes:
            raise ProfileFormatError('A profile needs at least one point')
        if any(a >= b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ProfileFormatError('Profile sizes must increase strictly')

    @classmethod
    def parse(cls, text: str) -> 'TimingProfile':
        points = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            match = PROFILE_LINE.match(line)
            if not match:
                raise ProfileFormatError(f'Malformed profile line: {line!r}')
            try:
                points.append((int(match[1]), float(match[2])))
            except ValueError as e:
                raise ProfileFormatError(str(e)) from e
        if not points:
            raise ProfileFormatError('Empty timing profile')
        sizes, seconds = zip(*points)
        return cls(tuple(sizes), tuple(seconds))

    def __call__(self, bits: int) -> float:
        """Piecewise linear in log2(bits), constant outside the range."""
        return float(
            np.interp(np.log2(bits), np.log2(self.sizes), self.seconds)
        )


@dataclass(frozen=True)
class CostReport:
    n: int
    r: int
    lam: int
    eta: int
    big_n: int
    expensive_count: int
    ks_bits: int
    est_time_s: float | None = None

    @property
    def prime(self) -> str:
        return f'{self.r}^{1 << self.lam}+1'

    @property
    def count_factor(self) -> int:
        """The count divided by N."""
        return self.expensive_count // self.big_n

    def as_dict(self) -> dict:
        fields = {
            ('lambda' if key == 'lam' else key): value
            for key, value in asdict(self).items()
        }
        if self.est_time_s is None:
            del fields['est_time_s']
        return fields


def cost_row(
    n: int,
    r: int,
    lam: int,
    profile: TimingProfile | None = None,
    budget: str = 'coefficient',
) -> CostReport:
    eta, big_n, count = expensive_count(n, r, lam, budget)
    ks_bits = ks_bitsize(r, lam)
    est = count * profile(ks_bits) if profile is not None else None
    logging.debug(
        'n=%d %d^%d+1: eta=%d N=%d count=%d',
        n,
        r,
        1 << lam,
        eta,
        big_n,
        count,
    )
    return CostReport(n, r, lam, eta, big_n, count, ks_bits, est)


def table_report(
    n: int,
    primes,
    profile: TimingProfile | None = None,
    budget: str = 'coefficient',
) -> list[CostReport]:
    return [cost_row(n, r, lam, profile, budget) for r, lam in primes]


def plan_expected_count(plan) -> int:
    """Top-level expensive multiplications of one multiplication by plan."""
    if not plan.levels:
        return 0
    top = plan.levels[0]
    return full_multiply_count(
        top.big_n, top.params.lam, plan.config.cyclic_top
    )
