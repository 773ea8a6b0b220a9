"""Operation counters for the transforms and the multiplier.

Counting is off unless a :func:`counting` block is active. Events are
attributed to the recursion level set with :func:`at_level`, so the
top-level numbers can be compared with the closed forms of the cost model.
"""

from collections import Counter, defaultdict
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass

EVENTS = ('expensive_muls', 'cheap_shifts', 'additions', 'coeff_muls')

_active = ContextVar('gfpmul_counter', default=None)
_level = ContextVar('gfpmul_level', default=0)


@dataclass(frozen=True)
class CounterReport:
    expensive_muls: int = 0
    cheap_shifts: int = 0
    additions: int = 0
    coeff_muls: int = 0

    def as_dict(self) -> dict:
        return {event: getattr(self, event) for event in EVENTS}


class OpCounter:
    def __init__(self):
        self._counts = defaultdict(Counter)

    def bump(self, event: str, amount: int = 1) -> None:
        if event not in EVENTS:
            raise KeyError(event)
        self._counts[_level.get()][event] += amount

    def levels(self) -> list[int]:
        return sorted(self._counts)

    def report(self, level: int = 0) -> CounterReport:
        return CounterReport(**self._counts.get(level, Counter()))

    def total(self) -> CounterReport:
        merged = Counter()
        for counts in self._counts.values():
            merged.update(counts)
        return CounterReport(**merged)


def record(event: str, amount: int = 1) -> None:
    counter = _active.get()
    if counter is not None:
        counter.bump(event, amount)


def current_level() -> int:
    return _level.get()


@contextmanager
def counting():
    counter = OpCounter()
    token = _active.set(counter)
    try:
        yield counter
    finally:
        _active.reset(token)


@contextmanager
def at_level(index: int):
    token = _level.set(index)
    try:
        yield
    finally:
        _level.reset(token)
