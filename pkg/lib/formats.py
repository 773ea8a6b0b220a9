"""Text formats read and written by the command line tool."""

import re
from dataclasses import dataclass
from pathlib import Path

from lib.errors import InputFormatError

HEX_DIGITS = re.compile(r'^(?:0[xX])?[0-9a-fA-F]+$')


@dataclass(frozen=True)
class PrimeRange:
    lo: int | None
    hi: int | None
    r: int
    lam: int

    def covers(self, n: int) -> bool:
        return self.lo is None or self.lo <= n <= self.hi


def parse_hex(text: str) -> int:
    """Big-endian hexadecimal integer; whitespace anywhere is ignored."""
    digits = ''.join(text.split())
    if not HEX_DIGITS.match(digits):
        raise InputFormatError('Expected a hexadecimal integer')
    return int(digits, 16)


def read_hex(path) -> int:
    try:
        return parse_hex(Path(path).read_text())
    except InputFormatError as e:
        raise InputFormatError(f'{path}: {e}') from e


def format_hex(x: int) -> str:
    return format(x, 'x')


def parse_bit_size(text: str) -> int:
    """A decimal integer or a power of two written ``2^k``."""
    base, caret, exponent = text.partition('^')
    if caret:
        if base != '2':
            raise ValueError(f'Unsupported bit size {text!r}')
        return 1 << int(exponent)
    return int(text)


def parse_prime_ranges(text: str) -> list[PrimeRange]:
    """Rows of lines ``[min_bits max_bits] r lambda``.

    A row without bounds applies to every input size.
    """
    rows = []
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 4):
            raise InputFormatError(f'Line {number}: expected 2 or 4 fields')
        try:
            bounds = [parse_bit_size(bound) for bound in fields[:-2]]
            r, lam = (int(value) for value in fields[-2:])
        except ValueError as e:
            raise InputFormatError(f'Line {number}: {e}') from e
        lo, hi = bounds or (None, None)
        rows.append(PrimeRange(lo, hi, r, lam))
    return rows


def parse_prime_table(text: str) -> list[tuple[int, int]]:
    """(r, lambda) pairs of every row, in file order."""
    return [(row.r, row.lam) for row in parse_prime_ranges(text)]


def read_prime_table(path) -> list[tuple[int, int]]:
    return parse_prime_table(Path(path).read_text())


def primes_for_size(path, n: int) -> list[tuple[int, int]]:
    """(r, lambda) pairs of the rows whose bounds contain n."""
    return [
        (row.r, row.lam)
        for row in parse_prime_ranges(Path(path).read_text())
        if row.covers(n)
    ]


def _record_value(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f'{value:.6g}'
    return str(value)


def record_line(kind: str, fields: dict) -> str:
    """One machine-readable line: ``kind key=value ...``."""
    body = ' '.join(
        f'{key}={_record_value(value)}' for key, value in fields.items()
    )
    return f'{kind} {body}' if body else kind
