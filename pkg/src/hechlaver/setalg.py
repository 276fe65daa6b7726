"""Exact arithmetic on eventually periodic subsets of the naturals.

A set is stored as two bit words: ``prefix`` gives membership of
``0 .. t-1`` and ``period`` repeats forever from ``t`` on.  Every
constructor brings the pair into canonical form (minimal period, then
minimal prefix), so equality and hashing are plain word comparison.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence


class Card(str, enum.Enum):
    EMPTY = "empty"
    FINITE = "finiteNonempty"
    INFINITE_COINFINITE = "infiniteCoinfinite"
    COFINITE = "cofinite"
    ALL = "all"


def _primitive_root(word: str) -> str:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def _check_word(word: str, what: str) -> None:
    if any(ch not in "01" for ch in word):
        raise ValueError(f"{what} must be a 0/1 word, got {word!r}")


class PeriodicSet:
    """An eventually periodic subset of the naturals in canonical form."""

    __slots__ = ("prefix", "period")

    def __init__(self, prefix: str = "", period: str = "0"):
        prefix = "".join(prefix) if not isinstance(prefix, str) else prefix
        period = "".join(period) if not isinstance(period, str) else period
        _check_word(prefix, "prefix")
        _check_word(period, "period")
        if not period:
            raise ValueError("period must be nonempty")
        period = _primitive_root(period)
        # a prefix bit that agrees with the rotated tail is absorbed into it
        while prefix and prefix[-1] == period[-1]:
            period = period[-1] + period[:-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def __setattr__(self, name, value):
        raise AttributeError("PeriodicSet is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def all(cls) -> "PeriodicSet":
        return cls("", "1")

    @classmethod
    def empty(cls) -> "PeriodicSet":
        return cls("", "0")

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "PeriodicSet":
        elems = set(elements)
        if any(e < 0 for e in elems):
            raise ValueError("naturals only")
        size = max(elems) + 1 if elems else 0
        return cls("".join("1" if i in elems else "0" for i in range(size)), "0")

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "PeriodicSet":
        return cls.finite(excluded).complement()

    @classmethod
    def above(cls, n: int) -> "PeriodicSet":
        """The interval (n, oo); ``above(-1)`` is everything."""
        return cls("0" * (n + 1), "1")

    @classmethod
    def residue(cls, r: int, m: int) -> "PeriodicSet":
        """The class ``{n : n = r mod m}``."""
        if m <= 0:
            raise ValueError("modulus must be positive")
        r %= m
        return cls("", "".join("1" if i == r else "0" for i in range(m)))

    @classmethod
    def from_bits(cls, bits: Sequence[bool], t: int) -> "PeriodicSet":
        """Build from an explicit bitmap whose entries ``t:`` form one period."""
        word = "".join("1" if b else "0" for b in bits)
        return cls(word[:t], word[t:])

    # -- basic queries ------------------------------------------------

    @property
    def t(self) -> int:
        return len(self.prefix)

    @property
    def p(self) -> int:
        return len(self.period)

    def bit(self, n: int) -> bool:
        if n < 0:
            return False
        if n < len(self.prefix):
            return self.prefix[n] == "1"
        return self.period[(n - len(self.prefix)) % len(self.period)] == "1"

    member = bit

    def __contains__(self, n) -> bool:
        return isinstance(n, int) and self.bit(n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PeriodicSet):
            return NotImplemented
        return self.prefix == other.prefix and self.period == other.period

    def __hash__(self) -> int:
        return hash((self.prefix, self.period))

    def __repr__(self) -> str:
        return f'(per "{self.prefix}" "{self.period}")'

    def literal(self) -> str:
        return repr(self)

    def describe(self) -> str:
        """Human-oriented rendering, e.g. ``{1, 3, 5}`` or ``N minus {0}``."""
        card = self.cardinality()
        if card is Card.EMPTY:
            return "{}"
        if card is Card.ALL:
            return "N"
        if card is Card.FINITE:
            return "{" + ", ".join(map(str, self.elements())) + "}"
        if card is Card.COFINITE:
            return "N minus {" + ", ".join(map(str, self.complement().elements())) + "}"
        return repr(self)

    # -- boolean algebra ----------------------------------------------

    def _combine(self, other: "PeriodicSet", op) -> "PeriodicSet":
        t = max(self.t, other.t)
        p = math.lcm(self.p, other.p)
        bits = [op(self.bit(n), other.bit(n)) for n in range(t + p)]
        return PeriodicSet.from_bits(bits, t)

    def complement(self) -> "PeriodicSet":
        flip = str.maketrans("01", "10")
        return PeriodicSet(self.prefix.translate(flip), self.period.translate(flip))

    def union(self, other):
        return self._combine(other, lambda a, b: a or b)

    def intersect(self, other):
        return self._combine(other, lambda a, b: a and b)

    def difference(self, other):
        return self._combine(other, lambda a, b: a and not b)

    def symmetric_difference(self, other):
        return self._combine(other, lambda a, b: a != b)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symmetric_difference

    def __invert__(self):
        return self.complement()

    def issubset(self, other: "PeriodicSet") -> bool:
        return (self - other).is_empty()

    __le__ = issubset

    def isdisjoint(self, other: "PeriodicSet") -> bool:
        return (self & other).is_empty()

    def shift(self, c: int) -> "PeriodicSet":
        """``{n + c : n in self}`` for ``c >= 0``."""
        if c < 0:
            raise ValueError("shift must be nonnegative")
        return PeriodicSet("0" * c + self.prefix, self.period)

    # -- cardinality ----------------------------------------------------

    def cardinality(self) -> Card:
        if "0" not in self.period:
            return Card.ALL if "0" not in self.prefix else Card.COFINITE
        if "1" not in self.period:
            return Card.EMPTY if "1" not in self.prefix else Card.FINITE
        return Card.INFINITE_COINFINITE

    def is_empty(self) -> bool:
        return self.cardinality() is Card.EMPTY

    def is_finite(self) -> bool:
        return "1" not in self.period

    def is_infinite(self) -> bool:
        return "1" in self.period

    def is_cofinite(self) -> bool:
        return "0" not in self.period

    def __len__(self) -> int:
        if self.is_infinite():
            raise OverflowError("set is infinite")
        return self.prefix.count("1")

    def __bool__(self) -> bool:
        return not self.is_empty()

    def density(self) -> Fraction:
        return Fraction(self.period.count("1"), len(self.period))

    # -- element access -------------------------------------------------

    def min_above(self, n: int) -> Optional[int]:
        """Least element strictly greater than ``n``, or None."""
        start = max(n + 1, 0)
        t = len(self.prefix)
        for i in range(start, t):
            if self.prefix[i] == "1":
                return i
        base = max(start, t)
        for i in range(base, base + len(self.period)):
            if self.bit(i):
                return i
        return None

    def min(self) -> Optional[int]:
        return self.min_above(-1)

    def max(self) -> int:
        if self.is_infinite():
            raise ValueError("infinite set has no maximum")
        if not self:
            raise ValueError("empty set has no maximum")
        return self.prefix.rindex("1")

    def nth(self, k: int) -> int:
        """The k-th smallest element (0-based)."""
        if k < 0:
            raise IndexError("negative index")
        head = [i for i, ch in enumerate(self.prefix) if ch == "1"]
        if k < len(head):
            return head[k]
        k -= len(head)
        ones = [i for i, ch in enumerate(self.period) if ch == "1"]
        if not ones:
            raise IndexError("index beyond a finite set")
        cycle, j = divmod(k, len(ones))
        return len(self.prefix) + cycle * len(self.period) + ones[j]

    def elements(self, limit: Optional[int] = None) -> Iterator[int]:
        """Iterate elements in increasing order (below ``limit`` if given)."""
        if limit is None and self.is_infinite():
            raise ValueError("infinite set needs a limit")
        n = -1
        while True:
            n = self.min_above(n)
            if n is None or (limit is not None and n >= limit):
                return
            yield n

    def bitmap(self, length: int) -> list[bool]:
        return [self.bit(n) for n in range(length)]


ALL = PeriodicSet.all()
EMPTY = PeriodicSet.empty()


def normalize(prefix: str, period: str) -> PeriodicSet:
    return PeriodicSet(prefix, period)


_OPS = {
    "union": PeriodicSet.union,
    "intersect": PeriodicSet.intersect,
    "difference": PeriodicSet.difference,
}


def boolean_op(kind: str, a: PeriodicSet, b: Optional[PeriodicSet] = None) -> PeriodicSet:
    if kind == "complement":
        return a.complement()
    if b is None:
        raise TypeError(f"{kind} needs two operands")
    return _OPS[kind](a, b)


def union_all(sets: Iterable[PeriodicSet]) -> PeriodicSet:
    out = EMPTY
    for s in sets:
        out = out | s
    return out


def intersect_all(sets: Iterable[PeriodicSet]) -> PeriodicSet:
    out = ALL
    for s in sets:
        out = out & s
    return out


def refine(sets: Sequence[PeriodicSet]) -> list[tuple[PeriodicSet, frozenset]]:
    """Common refinement of ``sets``.

    Returns the atoms of the boolean algebra generated by ``sets`` as pairs
    ``(cell, signature)`` where ``signature`` holds the indices of the input
    sets containing the cell.  Cells are nonempty, pairwise disjoint, cover
    the naturals, and are ordered by least element.
    """
    t = max((s.t for s in sets), default=0)
    p = 1
    for s in sets:
        p = math.lcm(p, s.p)
    span = t + p
    groups: dict[frozenset, list[bool]] = {}
    order: list[frozenset] = []
    for n in range(span):
        sig = frozenset(i for i, s in enumerate(sets) if s.bit(n))
        if sig not in groups:
            groups[sig] = [False] * span
            order.append(sig)
        groups[sig][n] = True
    return [(PeriodicSet.from_bits(groups[sig], t), sig) for sig in order]


def lcm_period(sets: Iterable[PeriodicSet]) -> int:
    p = 1
    for s in sets:
        p = math.lcm(p, s.p)
    return p
