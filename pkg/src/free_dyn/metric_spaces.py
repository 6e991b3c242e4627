"""Pointed metric spaces with exact rational arithmetic.

Three kinds of space are supported: the middle-third Cantor set, the interval
[-1, 1] and small finite metric spaces (used as an oracle substrate).  All of
them are pointed at 0; every distance is an exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InvalidDigit, InvalidMetric, OutOfRange, ParseError, WrongSpace

ALL_ZERO = 0
ALL_TWO = 2


class SpaceKind(enum.Enum):
    CANTOR = "cantor"
    INTERVAL = "interval"
    FINITE = "finite"


@functools.total_ordering
@dataclass(frozen=True)
class CantorPoint:
    """A point of the Cantor set written as ``prefix`` followed by a constant tail.

    Digits are 0 or 2.  The representation is canonicalised on construction:
    trailing digits equal to the tail digit are absorbed into the tail, so two
    CantorPoints are equal exactly when their values are.
    """

    prefix: tuple[int, ...] = ()
    tail: int = ALL_ZERO

    def __post_init__(self):
        digits = tuple(int(d) for d in self.prefix)
        for d in digits:
            if d not in (0, 2):
                raise InvalidDigit(f"ternary digit {d!r} is not in {{0, 2}}")
        if self.tail not in (ALL_ZERO, ALL_TWO):
            raise InvalidDigit(f"tail digit {self.tail!r} is not in {{0, 2}}")
        end = len(digits)
        while end and digits[end - 1] == self.tail:
            end -= 1
        object.__setattr__(self, "prefix", digits[:end])

    @functools.cached_property
    def value(self) -> Fraction:
        n = len(self.prefix)
        num = 0
        for d in self.prefix:
            num = 3 * num + d
        if self.tail == ALL_TWO:
            num += 1
        return Fraction(num, 3**n)

    def digit(self, i: int) -> int:
        """The i-th ternary digit, 1-based."""
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.tail

    def shift(self, m: int = 1) -> "CantorPoint":
        return CantorPoint(self.prefix[m:], self.tail)

    def prepend(self, digits: Sequence[int]) -> "CantorPoint":
        return CantorPoint(tuple(digits) + self.prefix, self.tail)

    @property
    def is_finite(self) -> bool:
        """True when the ternary expansion terminates (tail of zeros)."""
        return self.tail == ALL_ZERO

    def __lt__(self, other):
        if not isinstance(other, CantorPoint):
            return NotImplemented
        return self.value < other.value

    def __str__(self):
        s = "".join(map(str, self.prefix))
        return s + "~2" if self.tail == ALL_TWO else (s or "0")


@functools.total_ordering
@dataclass(frozen=True)
class IntervalPoint:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not -1 <= v <= 1:
            raise OutOfRange(f"{v} is outside [-1, 1]")
        object.__setattr__(self, "value", v)

    @property
    def is_dyadic(self) -> bool:
        d = self.value.denominator
        return d & (d - 1) == 0

    def __lt__(self, other):
        if not isinstance(other, IntervalPoint):
            return NotImplemented
        return self.value < other.value

    def __str__(self):
        return str(self.value)


@functools.total_ordering
@dataclass(frozen=True)
class FinitePoint:
    label: str

    def __lt__(self, other):
        if not isinstance(other, FinitePoint):
            return NotImplemented
        return self.label < other.label

    def __str__(self):
        return self.label


Point = Union[CantorPoint, IntervalPoint, FinitePoint]


class PointedSpace:
    """Common surface of the three space kinds."""

    kind: SpaceKind
    #: True when the metric is |x - y| for an exact real coordinate of each point.
    is_line = False

    @property
    def basepoint(self) -> Point:
        raise NotImplementedError

    def contains(self, p) -> bool:
        raise NotImplementedError

    def check(self, p) -> Point:
        if not self.contains(p):
            raise WrongSpace(f"{p!r} is not a point of {self}")
        return p

    def distance(self, p, q) -> Fraction:
        raise NotImplementedError

    def coordinate(self, p) -> Fraction:
        raise WrongSpace(f"{self} has no line coordinate")

    def sort_key(self, p):
        return p


@dataclass(frozen=True)
class CantorSpace(PointedSpace):
    kind: SpaceKind = field(default=SpaceKind.CANTOR, init=False)
    is_line = True

    @property
    def basepoint(self) -> CantorPoint:
        return CantorPoint()

    def contains(self, p) -> bool:
        return isinstance(p, CantorPoint)

    def coordinate(self, p) -> Fraction:
        return self.check(p).value

    def distance(self, p, q) -> Fraction:
        return abs(self.coordinate(p) - self.coordinate(q))

    def __str__(self):
        return "cantor"


@dataclass(frozen=True)
class IntervalSpace(PointedSpace):
    kind: SpaceKind = field(default=SpaceKind.INTERVAL, init=False)
    lo: Fraction = Fraction(-1)
    hi: Fraction = Fraction(1)
    is_line = True

    @property
    def basepoint(self) -> IntervalPoint:
        return IntervalPoint(Fraction(0))

    def contains(self, p) -> bool:
        return isinstance(p, IntervalPoint) and self.lo <= p.value <= self.hi

    def coordinate(self, p) -> Fraction:
        return self.check(p).value

    def distance(self, p, q) -> Fraction:
        return abs(self.coordinate(p) - self.coordinate(q))

    def __str__(self):
        return "interval"


@dataclass(frozen=True)
class FiniteSpace(PointedSpace):
    """A finite metric space given by labels and a rational distance matrix.

    The metric axioms, including the triangle inequality, are validated on
    construction and :class:`InvalidMetric` is raised on any violation.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    base_index: int = 0
    kind: SpaceKind = field(default=SpaceKind.FINITE, init=False)

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        n = len(labels)
        if n == 0:
            raise InvalidMetric("a pointed space needs at least one point")
        if len(set(labels)) != n:
            raise InvalidMetric("labels must be distinct")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise InvalidMetric("distance matrix must be square and match the labels")
        if not 0 <= self.base_index < n:
            raise InvalidMetric("basepoint index out of range")
        d = tuple(tuple(Fraction(x) for x in row) for row in self.dist)
        for i in range(n):
            if d[i][i] != 0:
                raise InvalidMetric(f"d({labels[i]},{labels[i]}) != 0")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise InvalidMetric(f"asymmetric distance between {labels[i]} and {labels[j]}")
                if d[i][j] <= 0:
                    raise InvalidMetric(f"non-positive distance between {labels[i]} and {labels[j]}")
        for i, j, k in itertools.product(range(n), repeat=3):
            if d[i][k] > d[i][j] + d[j][k]:
                raise InvalidMetric(
                    f"triangle inequality fails: d({labels[i]},{labels[k]}) > "
                    f"d({labels[i]},{labels[j]}) + d({labels[j]},{labels[k]})"
                )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", d)

    @functools.cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.labels)}

    @property
    def basepoint(self) -> FinitePoint:
        return FinitePoint(self.labels[self.base_index])

    @property
    def points(self) -> list[FinitePoint]:
        return [FinitePoint(s) for s in self.labels]

    def contains(self, p) -> bool:
        return isinstance(p, FinitePoint) and p.label in self._index

    def distance(self, p, q) -> Fraction:
        self.check(p)
        self.check(q)
        return self.dist[self._index[p.label]][self._index[q.label]]

    def sort_key(self, p):
        return self._index[p.label]

    def __str__(self):
        return f"finite({len(self.labels)})"


CANTOR = CantorSpace()
INTERVAL = IntervalSpace()


def cantor_from_digits(digits: Iterable[int]) -> CantorPoint:
    return CantorPoint(tuple(digits), ALL_ZERO)


def cantor_value(p: CantorPoint) -> Fraction:
    return p.value


def distance(space: PointedSpace, p: Point, q: Point) -> Fraction:
    return space.distance(p, q)


def dyadic_point(num: int, exp: int) -> IntervalPoint:
    """The dyadic rational ``num / 2**exp`` as a point of [-1, 1]."""
    if exp < 0:
        raise OutOfRange("exponent must be a natural number")
    if abs(num) > 2**exp:
        raise OutOfRange(f"|{num}| > 2^{exp}")
    return IntervalPoint(Fraction(num, 2**exp))


def parse_point(space: PointedSpace, text: str) -> Point:
    """Parse a point literal: ``"02~2"`` on the Cantor set, ``"p/q"`` on the interval."""
    text = text.strip()
    try:
        if space.kind is SpaceKind.CANTOR:
            tail = ALL_ZERO
            if text.endswith("~2"):
                text, tail = text[:-2], ALL_TWO
            if any(c not in "02" for c in text):
                raise ParseError(f"Cantor literal {text!r} may only use digits 0 and 2")
            return CantorPoint(tuple(int(c) for c in text), tail)
        if space.kind is SpaceKind.INTERVAL:
            return space.check(IntervalPoint(Fraction(text)))
        return space.check(FinitePoint(text))
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad point literal {text!r} for {space}: {exc}") from exc


def parse_space(text: str) -> PointedSpace:
    text = text.strip().lower()
    if text == "cantor":
        return CANTOR
    if text == "interval":
        return INTERVAL
    raise ParseError(f"unknown space {text!r}; expected 'cantor' or 'interval'")
