"""Filters on the naturals, restricted to eventually periodic sets.

Three kinds are provided: the Frechet (cofinite) filter, the density-one
filter, and a lazily decided ultrafilter.  All of them extend the cofinite
filter.  On the eventually periodic algebra a set has density one exactly
when it is cofinite, so the first two agree on every set this package can
build; they are kept apart because they are different filters in general.
"""
from __future__ import annotations

from typing import Optional

from .setalg import ALL, Card, PeriodicSet


class Filter:
    """Base class: membership in F and in F^+ (positive sets)."""

    kind = "abstract"

    def in_filter(self, s: PeriodicSet) -> bool:
        raise NotImplementedError

    def is_positive(self, s: PeriodicSet) -> bool:
        return not self.in_filter(s.complement())

    def core(self) -> PeriodicSet:
        """A set in the filter from which greedy choices are drawn."""
        return ALL

    def spec(self) -> str:
        return self.kind

    def __repr__(self) -> str:
        return f"<{type(self).__name__}>"


class Frechet(Filter):
    kind = "frechet"

    def in_filter(self, s):
        return s.cardinality() in (Card.COFINITE, Card.ALL)

    def is_positive(self, s):
        return s.is_infinite()


class Density(Filter):
    kind = "density"

    def in_filter(self, s):
        return s.density() == 1

    def is_positive(self, s):
        return s.density() > 0


class LazyUltra(Filter):
    """An ultrafilter on the eventually periodic algebra, decided on demand.

    The handle keeps an infinite ``kernel``.  A queried set is accepted iff
    it meets the kernel in an infinite set, in which case the kernel is
    narrowed to the intersection; otherwise the set is removed from the
    kernel.  Every answer stays valid for the rest of the handle's life, so
    the answers are those of any ultrafilter containing the final kernel.

    Not safe for interleaved use: one solve or extraction owns the handle.
    """

    kind = "ultra"

    def __init__(self, seed: Optional[PeriodicSet] = None):
        seed = ALL if seed is None else seed
        if not seed.is_infinite():
            raise ValueError("ultrafilter seed must be infinite")
        self.seed = seed
        self.kernel = seed
        self.log: list[tuple[PeriodicSet, bool]] = []
        self._verdicts: dict[PeriodicSet, bool] = {}
        self._expected: Optional[list] = None

    def decide(self, s: PeriodicSet) -> bool:
        if s in self._verdicts:
            return self._verdicts[s]
        meet = self.kernel & s
        verdict = meet.is_infinite()
        if self._expected is not None:
            k = len(self.log)
            if k >= len(self._expected) or self._expected[k] != (s, verdict):
                raise ValueError(f"run diverges from the recorded decisions at query {k}")
        self.kernel = meet if verdict else self.kernel - s
        self._verdicts[s] = verdict
        self.log.append((s, verdict))
        return verdict

    in_filter = decide

    def is_positive(self, s):
        # F = F^+ for an ultrafilter; deciding s itself keeps the log minimal
        return self.decide(s)

    def core(self):
        return self.kernel

    def spec(self) -> str:
        return "ultra" if self.seed == ALL else f"ultra:{self.seed.literal()}"

    def replay(self, log) -> list[str]:
        """Re-issue a decision log in order; returns the mismatches found."""
        problems = []
        for s, verdict in log:
            got = self.decide(s)
            if got != verdict:
                problems.append(f"decision for {s.literal()} replayed as {got}, logged {verdict}")
        return problems

    @classmethod
    def replayed(cls, log, seed: Optional[PeriodicSet] = None) -> "LazyUltra":
        handle = cls(seed)
        problems = handle.replay(log)
        if problems:
            raise ValueError("; ".join(problems))
        return handle

    @classmethod
    def following(cls, log, seed: Optional[PeriodicSet] = None) -> "LazyUltra":
        """A fresh handle that checks each new query against ``log`` as it is asked."""
        handle = cls(seed)
        handle._expected = list(log)
        return handle

    def __repr__(self):
        return f"<LazyUltra kernel={self.kernel.literal()} decisions={len(self.log)}>"


def in_filter(f: Filter, s: PeriodicSet) -> bool:
    return f.in_filter(s)


def is_positive(f: Filter, s: PeriodicSet) -> bool:
    return f.is_positive(s)


def ultra_decide(f: LazyUltra, s: PeriodicSet) -> bool:
    if not isinstance(f, LazyUltra):
        raise TypeError("ultra_decide needs a LazyUltra handle")
    return f.decide(s)


def make_filter(kind: str, seed: Optional[PeriodicSet] = None) -> Filter:
    if kind == "frechet":
        return Frechet()
    if kind == "density":
        return Density()
    if kind == "ultra":
        return LazyUltra(seed)
    raise ValueError(f"unknown filter kind {kind!r}")
