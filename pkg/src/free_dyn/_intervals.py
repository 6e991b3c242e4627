"""Finite unions of real intervals with exact endpoints and open/closed flags."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .maps import DynMap, affine_cells


@dataclass(frozen=True)
class Ivl:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def intersect(self, other: "Ivl") -> "Ivl":
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return Ivl(lo, hi, lc, hc)

    def affine_image(self, slope: Fraction, icpt: Fraction) -> "Ivl":
        a, b = slope * self.lo + icpt, slope * self.hi + icpt
        if slope > 0:
            return Ivl(a, b, self.lo_closed, self.hi_closed)
        if slope < 0:
            return Ivl(b, a, self.hi_closed, self.lo_closed)
        return Ivl(icpt, icpt, True, True)

    def affine_preimage(self, slope: Fraction, icpt: Fraction) -> "Ivl":
        """{x : slope*x + icpt in self} for slope != 0."""
        a, b = (self.lo - icpt) / slope, (self.hi - icpt) / slope
        if slope > 0:
            return Ivl(a, b, self.lo_closed, self.hi_closed)
        return Ivl(b, a, self.hi_closed, self.lo_closed)


def closed(lo, hi) -> Ivl:
    return Ivl(Fraction(lo), Fraction(hi), True, True)


def normalize(ivls: Iterable[Ivl]) -> tuple[Ivl, ...]:
    """Sorted, pairwise disjoint, non-touching representation of a union."""
    items = sorted((i for i in ivls if not i.empty), key=lambda i: (i.lo, not i.lo_closed))
    out: list[Ivl] = []
    for cur in items:
        if out:
            last = out[-1]
            joins = cur.lo < last.hi or (cur.lo == last.hi and (cur.lo_closed or last.hi_closed))
            if joins:
                if cur.hi > last.hi or (cur.hi == last.hi and cur.hi_closed):
                    out[-1] = Ivl(last.lo, cur.hi, last.lo_closed, cur.hi_closed or (cur.hi == last.hi and last.hi_closed))
                continue
        out.append(cur)
    return tuple(out)


def intersect_sets(a: Iterable[Ivl], b: Iterable[Ivl]) -> tuple[Ivl, ...]:
    b = tuple(b)
    return normalize(x.intersect(y) for x in a for y in b)


def image(f: DynMap, ivls: Iterable[Ivl], cap: int = 1 << 16) -> tuple[Ivl, ...]:
    """Exact image of a union of intervals under a piecewise-affine map."""
    out = []
    for iv in ivls:
        for cell in affine_cells(f, iv.lo, iv.hi, cap):
            part = iv.intersect(closed(cell.lo, cell.hi))
            if not part.empty:
                out.append(part.affine_image(cell.slope, cell.intercept))
    return normalize(out)


def preimage(f: DynMap, target: Iterable[Ivl], within: Iterable[Ivl], cap: int = 1 << 16) -> tuple[Ivl, ...]:
    """``within ∩ f^{-1}(target)``, computed cell by cell."""
    target = tuple(target)
    out = []
    for iv in within:
        for cell in affine_cells(f, iv.lo, iv.hi, cap):
            part = iv.intersect(closed(cell.lo, cell.hi))
            if part.empty:
                continue
            for t in target:
                if cell.slope == 0:
                    if not Ivl(cell.intercept, cell.intercept, True, True).intersect(t).empty:
                        out.append(part)
                    continue
                out.append(part.intersect(t.affine_preimage(cell.slope, cell.intercept)))
    return normalize(out)
