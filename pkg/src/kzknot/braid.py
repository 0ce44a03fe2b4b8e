"""Braid words, their permutations and closures, and a concrete geometric realization.

A braid word on ``n`` strands is a bottom-to-top sequence of letters
``(i, s)`` with ``1 <= i <= n - 1`` and ``s = +1`` (overcrossing, the two
strands circle half way round each other anticlockwise) or ``s = -1``
(clockwise).  Text form is whitespace separated signed integers, so
``"1 1 1"`` is the cube of the first generator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class BraidParseError(ValueError):
    """Raised for malformed braid text; ``position`` is the 1-based token index."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"token {position}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class BraidWord:
    strand_count: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.strand_count < 1:
            raise ValueError("strand_count must be >= 1")
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if not 1 <= i <= self.strand_count - 1:
                raise ValueError(f"generator index {i} out of range for {self.strand_count} strands")
            if s not in (1, -1):
                raise ValueError(f"letter sign must be +1 or -1, got {s}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return render_braid(self)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return concat(self, other)

    @property
    def writhe(self) -> int:
        return sum(s for _, s in self.letters)

    @classmethod
    def from_tokens(cls, tokens: Sequence[int], strand_count: int) -> "BraidWord":
        return cls(strand_count, tuple((abs(k), 1 if k > 0 else -1) for k in tokens))


def parse_braid(text: str, strand_count: int) -> BraidWord:
    if not isinstance(strand_count, int) or strand_count < 1:
        raise BraidParseError(f"strand count must be a positive integer, got {strand_count!r}")
    letters = []
    for pos, token in enumerate(text.split(), start=1):
        try:
            k = int(token)
        except ValueError:
            raise BraidParseError(f"not an integer: {token!r}", pos) from None
        if k == 0:
            raise BraidParseError("zero is not a generator", pos)
        if abs(k) > strand_count - 1:
            raise BraidParseError(
                f"generator {k} out of range for {strand_count} strands (|k| <= {strand_count - 1})", pos
            )
        letters.append((abs(k), 1 if k > 0 else -1))
    return BraidWord(strand_count, tuple(letters))


def render_braid(b: BraidWord) -> str:
    return " ".join(str(i * s) for i, s in b.letters)


def permutation(b: BraidWord) -> tuple[int, ...]:
    """Return ``images`` with ``images[i - 1]`` the top position of the strand
    starting at bottom position ``i`` (1-based values)."""
    at = list(range(1, b.strand_count + 1))  # at[pos - 1] = strand currently at pos
    for i, _ in b.letters:
        at[i - 1], at[i] = at[i], at[i - 1]
    images = [0] * b.strand_count
    for pos, strand in enumerate(at, start=1):
        images[strand - 1] = pos
    return tuple(images)


def permutation_cycles(images: Sequence[int]) -> list[list[int]]:
    seen = set()
    cycles = []
    for start in range(1, len(images) + 1):
        if start in seen:
            continue
        cycle = []
        k = start
        while k not in seen:
            seen.add(k)
            cycle.append(k)
            k = images[k - 1]
        cycles.append(cycle)
    return cycles


def closure_components(b: BraidWord) -> int:
    return len(permutation_cycles(permutation(b)))


def concat(b1: BraidWord, b2: BraidWord) -> BraidWord:
    if b1.strand_count != b2.strand_count:
        raise ValueError(f"strand counts differ: {b1.strand_count} vs {b2.strand_count}")
    return BraidWord(b1.strand_count, b1.letters + b2.letters)


def inverse(b: BraidWord) -> BraidWord:
    return BraidWord(b.strand_count, tuple((i, -s) for i, s in reversed(b.letters)))


def stabilize(b: BraidWord, sign: int) -> BraidWord:
    """Markov stabilization: add a strand on the right and one crossing with it."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = b.strand_count
    return BraidWord(n + 1, b.letters + ((n, sign),))


# -- geometry ---------------------------------------------------------------


@dataclass(frozen=True)
class CrossingSlice:
    """One letter realized on ``[t0, t1]``.

    Strands ``left`` and ``right`` (strand identities, i.e. bottom positions)
    sit at real positions ``x_i < x_{i+1}`` at ``t0``; their relative vector
    ``z_right - z_left`` rotates by ``sign * pi`` around the midpoint.
    ``rest`` maps every other strand to its constant real position.
    """

    t0: float
    t1: float
    left: int
    right: int
    sign: int
    center: float
    radius: float
    rest: tuple[tuple[int, float], ...]

    def _angle(self, t: float) -> tuple[float, float]:
        rate = self.sign * math.pi / (self.t1 - self.t0)
        return rate * (t - self.t0), rate

    def position(self, strand: int, t: float) -> complex:
        if strand in (self.left, self.right):
            theta, _ = self._angle(t)
            u = self.radius * cmath.exp(1j * theta)
            return self.center + u if strand == self.right else self.center - u
        return complex(dict(self.rest)[strand])

    def velocity(self, strand: int, t: float) -> complex:
        if strand in (self.left, self.right):
            theta, rate = self._angle(t)
            du = 1j * rate * self.radius * cmath.exp(1j * theta)
            return du if strand == self.right else -du
        return 0j

    def min_distance(self) -> float:
        """Exact lower bound on pairwise strand distance throughout the slice."""
        bounds = [2 * self.radius]
        xs = [x for _, x in self.rest]
        for x in xs:
            bounds.append(abs(x - self.center) - self.radius)
        xs.sort()
        bounds.extend(b - a for a, b in zip(xs, xs[1:]))
        return min(bounds)


@dataclass(frozen=True)
class BraidGeometry:
    braid: BraidWord
    endpoints: tuple[Fraction, ...]
    slices: tuple[CrossingSlice, ...]

    @property
    def strand_count(self) -> int:
        return self.braid.strand_count

    def slice_index(self, t: float) -> int:
        """Index of the slice containing ``t``; boundaries go to the lower slice."""
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [0, 1]")
        L = len(self.slices)
        return min(max(math.ceil(t * L) - 1, 0), L - 1)

    def positions(self, t: float) -> list[complex]:
        """Positions of strands 1..n (by identity) at time ``t``."""
        if not self.slices:
            return [complex(x) for x in self.endpoints]
        sl = self.slices[self.slice_index(t)]
        return [sl.position(k, t) for k in range(1, self.strand_count + 1)]

    def velocities(self, t: float) -> list[complex]:
        if not self.slices:
            return [0j] * self.strand_count
        sl = self.slices[self.slice_index(t)]
        return [sl.velocity(k, t) for k in range(1, self.strand_count + 1)]

    def min_distance(self) -> float:
        if not self.slices:
            xs = [float(x) for x in self.endpoints]
            return min((b - a for a, b in zip(xs, xs[1:])), default=math.inf)
        return min(sl.min_distance() for sl in self.slices)


def default_endpoints(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(i) for i in range(1, n + 1))


def realize_geometry(b: BraidWord, endpoints: Sequence | None = None) -> BraidGeometry:
    n = b.strand_count
    xs = default_endpoints(n) if endpoints is None else tuple(Fraction(x) for x in endpoints)
    if len(xs) != n:
        raise ValueError(f"expected {n} endpoints, got {len(xs)}")
    if xs[0] <= 0 or any(a >= c for a, c in zip(xs, xs[1:])):
        raise ValueError("endpoints must be positive and strictly increasing")

    L = len(b.letters)
    at = list(range(1, n + 1))
    slices = []
    for k, (i, s) in enumerate(b.letters):
        left, right = at[i - 1], at[i]
        xl, xr = float(xs[i - 1]), float(xs[i])
        rest = tuple((at[p], float(xs[p])) for p in range(n) if p not in (i - 1, i))
        slices.append(CrossingSlice(k / L, (k + 1) / L, left, right, s, (xl + xr) / 2, (xr - xl) / 2, rest))
        at[i - 1], at[i] = right, left
    return BraidGeometry(b, xs, tuple(slices))
