"""Brute-force oracles for the tests and for ``mul --check``.

Nothing here imports the field, transform or multiplier modules: each
oracle is a direct formula over Python integers.
"""

from dataclasses import dataclass

WORD_BITS = 32
WORD_MASK = (1 << WORD_BITS) - 1


@dataclass(frozen=True)
class BigUint:
    """Magnitude as 32-bit words, least significant first."""

    words: tuple[int, ...] = ()

    def __post_init__(self):
        if self.words and self.words[-1] == 0:
            raise ValueError('BigUint words must not end with a zero word')

    @classmethod
    def from_int(cls, x: int) -> 'BigUint':
        if x < 0:
            raise ValueError('BigUint is unsigned')
        words = []
        while x:
            words.append(x & WORD_MASK)
            x >>= WORD_BITS
        return cls(tuple(words))

    def to_int(self) -> int:
        value = 0
        for word in reversed(self.words):
            value = (value << WORD_BITS) | word
        return value


def _trim(words: list[int]) -> tuple[int, ...]:
    while words and words[-1] == 0:
        words.pop()
    return tuple(words)


def schoolbook_mul(a: BigUint, b: BigUint) -> BigUint:
    if not a.words or not b.words:
        return BigUint()
    out = [0] * (len(a.words) + len(b.words))
    for i, x in enumerate(a.words):
        carry = 0
        for j, y in enumerate(b.words):
            t = out[i + j] + x * y + carry
            out[i + j] = t & WORD_MASK
            carry = t >> WORD_BITS
        k = i + len(b.words)
        while carry:
            t = out[k] + carry
            out[k] = t & WORD_MASK
            carry = t >> WORD_BITS
            k += 1
    return BigUint(_trim(out))


def oracle_product(a: int, b: int) -> int:
    return schoolbook_mul(BigUint.from_int(a), BigUint.from_int(b)).to_int()


def naive_value(e, params) -> int:
    """Integer value of an element, read digit by digit."""
    if e.minus_one:
        return params.p - 1
    return sum(digit * params.r**i for i, digit in enumerate(e.coeffs))


def naive_dft(values, omega, params) -> list[int]:
    """out[i] = sum_j values[j] * omega^(i j) mod p, as integers."""
    p = params.p
    w = naive_value(omega, params)
    points = [naive_value(v, params) for v in values]
    return [
        sum(v * pow(w, i * j, p) for j, v in enumerate(points)) % p
        for i in range(len(points))
    ]


def naive_negacyclic(a, b, params) -> list[int]:
    """Product of integer sequences modulo (X^N + 1, p)."""
    p = params.p
    if len(a) != len(b):
        raise ValueError('Operands must have the same length')
    size = len(a)
    out = [0] * size
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < size:
                out[i + j] += x * y
            else:
                out[i + j - size] -= x * y
    return [c % p for c in out]
