"""Lipschitz self-maps in symbolic normal form.

A :class:`DynMap` is one of a handful of closed forms (shift powers on the
Cantor set, zig-zag / tent / halving powers on the interval, the identity) or
an opaque ``GENERIC`` map.  Keeping the closed form around is what makes exact
composition tables, exact Lipschitz constants and exact preimages possible.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .errors import DomainError, ParseError, Unsupported, WrongSpace
from .metric_spaces import CANTOR, INTERVAL, IntervalPoint, PointedSpace, SpaceKind


class Form(enum.Enum):
    IDENTITY = "id"
    SIGMA_POW = "sigma"
    W_POW = "w"
    ZIGZAG = "Z"
    TENT_POW = "tent"
    HALVE_POW = "halve"
    GENERIC = "generic"


_CANTOR_FORMS = {Form.SIGMA_POW, Form.W_POW}
_INTERVAL_FORMS = {Form.ZIGZAG, Form.TENT_POW, Form.HALVE_POW}


@dataclass(frozen=True)
class DynMap:
    space: PointedSpace
    form: Form
    power: int = 0
    label: str = ""
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)
    lip_bound: Optional[Fraction] = None

    def __post_init__(self):
        if self.form in _CANTOR_FORMS and self.space.kind is not SpaceKind.CANTOR:
            raise WrongSpace(f"{self.form.value} lives on the Cantor set")
        if self.form in _INTERVAL_FORMS and self.space.kind is not SpaceKind.INTERVAL:
            raise WrongSpace(f"{self.form.value} lives on the interval")
        if self.form is Form.GENERIC:
            if self.evaluator is None or self.lip_bound is None:
                raise ValueError("generic maps need an evaluator and a Lipschitz bound")
            object.__setattr__(self, "lip_bound", Fraction(self.lip_bound))
        elif self.form is not Form.IDENTITY and self.power < 1:
            raise ValueError(f"{self.form.value} needs a power >= 1")
        if self.form is Form.ZIGZAG and self.power <= 256:
            _check_zigzag_breakpoints(self.power)

    def __call__(self, p):
        return apply(self, p)

    def __str__(self):
        if self.form is Form.IDENTITY:
            return "id"
        if self.form is Form.GENERIC:
            return self.label
        if self.form is Form.ZIGZAG:
            return f"Z_{self.power}"
        return f"{self.form.value}^{self.power}"


def identity(space: PointedSpace = CANTOR) -> DynMap:
    return DynMap(space, Form.IDENTITY)


def sigma(m: int = 1) -> DynMap:
    """Backward shift power: drops the first ``m`` ternary digits."""
    return DynMap(CANTOR, Form.SIGMA_POW, m) if m else identity(CANTOR)


def w(l: int = 1) -> DynMap:
    """Forward shift power ``t -> t / 3**l`` (prepends ``l`` zero digits)."""
    return DynMap(CANTOR, Form.W_POW, l) if l else identity(CANTOR)


def zigzag(p: int) -> DynMap:
    return DynMap(INTERVAL, Form.ZIGZAG, p)


def tent(j: int = 1) -> DynMap:
    """Power of the anti-symmetric tent map on [-1, 1]."""
    return DynMap(INTERVAL, Form.TENT_POW, j) if j else identity(INTERVAL)


def halve(l: int = 1) -> DynMap:
    return DynMap(INTERVAL, Form.HALVE_POW, l) if l else identity(INTERVAL)


def generic(space: PointedSpace, label: str, evaluator: Callable, lip_bound) -> DynMap:
    return DynMap(space, Form.GENERIC, 0, label, evaluator, Fraction(lip_bound))


def zigzag_eval(p: int, x) -> Fraction:
    """Exact value of the p-th zig-zag map at ``x`` in [0, 1].

    Shared breakpoints are evaluated with the left piece.
    """
    x = Fraction(x)
    if p < 1:
        raise ValueError("zig-zag order must be >= 1")
    if not 0 <= x <= 1:
        raise DomainError(f"zig-zag map is defined on [0, 1], got {x}")
    px = p * x
    cell = math.floor(px)
    if cell == px and cell > 0:
        cell -= 1
    if cell % 2 == 0:
        return px - cell
    return cell + 1 - px


def _check_zigzag_breakpoints(p: int) -> None:
    for c in range(1, p):
        x = Fraction(c, p)
        left = p * x - (c - 1) if (c - 1) % 2 == 0 else c - p * x
        right = p * x - c if c % 2 == 0 else c + 1 - p * x
        assert left == right, f"Z_{p} is discontinuous at {x}"


def _tent_pow_eval(j: int, x: Fraction) -> Fraction:
    if x >= 0:
        return zigzag_eval(2**j, x)
    return -zigzag_eval(2**j, -x)


def apply(f: DynMap, p):
    f.space.check(p)
    form = f.form
    if form is Form.IDENTITY:
        return p
    if form is Form.SIGMA_POW:
        return p.shift(f.power)
    if form is Form.W_POW:
        return p.prepend((0,) * f.power)
    if form is Form.ZIGZAG:
        return IntervalPoint(zigzag_eval(f.power, p.value))
    if form is Form.TENT_POW:
        return IntervalPoint(_tent_pow_eval(f.power, p.value))
    if form is Form.HALVE_POW:
        return IntervalPoint(p.value / 2**f.power)
    image = f.evaluator(p)
    if not f.space.contains(image):
        raise DomainError(f"{f} sent {p} outside {f.space}")
    return image


def power(f: DynMap, n: int) -> DynMap:
    """Closed form of the n-fold iterate of ``f``."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    if n == 0:
        return identity(f.space)
    if n == 1 or f.form is Form.IDENTITY:
        return f
    if f.form is Form.ZIGZAG:
        return zigzag(f.power**n)
    if f.form is Form.GENERIC:
        def run(p, f=f, n=n):
            for _ in range(n):
                p = apply(f, p)
            return p

        return generic(f.space, f"({f.label})^{n}", run, f.lip_bound**n)
    return DynMap(f.space, f.form, f.power * n)


def iterate(f: DynMap, n: int, p):
    return apply(power(f, n), p)


def _collapse(pos: Form, neg: Form, m: int, l: int, space) -> DynMap:
    # pos^m o neg^l where pos o neg = Id
    if m > l:
        return DynMap(space, pos, m - l)
    if m == l:
        return identity(space)
    return DynMap(space, neg, l - m)


def compose(outer: DynMap, inner: DynMap) -> DynMap:
    """Normal form of ``outer o inner``.

    Known collapse rules are applied; otherwise a GENERIC composite is built
    whose Lipschitz bound is the product of the two constants.
    """
    if outer.space != inner.space:
        raise WrongSpace(f"cannot compose maps on {outer.space} and {inner.space}")
    space = outer.space
    if outer.form is Form.IDENTITY:
        return inner
    if inner.form is Form.IDENTITY:
        return outer
    pair = (outer.form, inner.form)
    if outer.form is inner.form and outer.form in (
        Form.SIGMA_POW, Form.W_POW, Form.TENT_POW, Form.HALVE_POW
    ):
        return DynMap(space, outer.form, outer.power + inner.power)
    if pair == (Form.ZIGZAG, Form.ZIGZAG):
        return zigzag(outer.power * inner.power)
    if pair == (Form.SIGMA_POW, Form.W_POW):
        return _collapse(Form.SIGMA_POW, Form.W_POW, outer.power, inner.power, space)
    if pair == (Form.TENT_POW, Form.HALVE_POW):
        return _collapse(Form.TENT_POW, Form.HALVE_POW, outer.power, inner.power, space)

    def run(p, outer=outer, inner=inner):
        return apply(outer, apply(inner, p))

    return generic(
        space,
        f"{outer}∘{inner}",
        run,
        lipschitz_constant(outer) * lipschitz_constant(inner),
    )


def lipschitz_constant(f: DynMap) -> Fraction:
    form, k = f.form, f.power
    if form is Form.IDENTITY:
        return Fraction(1)
    if form is Form.SIGMA_POW:
        return Fraction(3**k)
    if form is Form.W_POW:
        return Fraction(1, 3**k)
    if form is Form.ZIGZAG:
        return Fraction(k)
    if form is Form.TENT_POW:
        return Fraction(2**k)
    if form is Form.HALVE_POW:
        return Fraction(1, 2**k)
    return f.lip_bound


def commutes(a: DynMap, b: DynMap) -> bool:
    """Symbolic commutation test on normal forms.

    Only powers of a single base map (or the identity) are recognised; a False
    answer means "not provably commuting", not "non-commuting".
    """
    if a.space != b.space or Form.GENERIC in (a.form, b.form):
        return False
    if Form.IDENTITY in (a.form, b.form):
        return True
    return a.form is b.form


@dataclass(frozen=True)
class MapTuple:
    maps: tuple[DynMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("a map tuple needs at least one map")
        if any(f.space != maps[0].space for f in maps):
            raise WrongSpace("all maps of a tuple must act on the same space")
        object.__setattr__(self, "maps", maps)

    @property
    def space(self) -> PointedSpace:
        return self.maps[0].space

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    def permuted(self, perm: Sequence[int]) -> "MapTuple":
        return MapTuple(tuple(self.maps[i] for i in perm))

    def __str__(self):
        return "(" + ", ".join(map(str, self.maps)) + ")"


def map_tuple(*maps: DynMap) -> MapTuple:
    return MapTuple(tuple(maps))


# -- affine structure of the interval forms ---------------------------------

@dataclass(frozen=True)
class AffineCell:
    """``f(x) = slope * x + intercept`` on the closed cell [lo, hi]."""

    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction


def domain(f: DynMap) -> tuple[Fraction, Fraction]:
    if f.form is Form.ZIGZAG:
        return Fraction(0), Fraction(1)
    return Fraction(f.space.lo), Fraction(f.space.hi)


def affine_cells(f: DynMap, lo, hi, cap: int = 1 << 16) -> Iterator[AffineCell]:
    """The affine pieces of an interval map that meet [lo, hi].

    Raises Unsupported for generic maps or when more than ``cap`` cells would
    be produced.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    dlo, dhi = domain(f)
    lo, hi = max(lo, dlo), min(hi, dhi)
    if lo > hi:
        return
    form = f.form
    if form is Form.IDENTITY:
        yield AffineCell(dlo, dhi, Fraction(1), Fraction(0))
        return
    if form is Form.HALVE_POW:
        yield AffineCell(dlo, dhi, Fraction(1, 2**f.power), Fraction(0))
        return
    if form not in (Form.ZIGZAG, Form.TENT_POW):
        raise Unsupported(f"no affine cell structure for {f}")
    p = f.power if form is Form.ZIGZAG else 2**f.power
    count = 0
    # cells on the non-negative side: [c/p, (c+1)/p]
    if hi >= 0:
        for c in range(max(0, math.floor(max(lo, 0) * p)), min(p - 1, math.floor(hi * p)) + 1):
            count += 1
            if count > cap:
                raise Unsupported(f"{f} has more than {cap} cells on [{lo}, {hi}]")
            slope = Fraction(p if c % 2 == 0 else -p)
            icpt = Fraction(-c if c % 2 == 0 else c + 1)
            yield AffineCell(Fraction(c, p), Fraction(c + 1, p), slope, icpt)
    if form is Form.TENT_POW and lo < 0:
        # mirrored cells [-(c+1)/p, -c/p], f(x) = -Z_p(-x)
        for c in range(max(0, math.floor(-min(hi, 0) * p)), min(p - 1, math.floor(-lo * p)) + 1):
            count += 1
            if count > cap:
                raise Unsupported(f"{f} has more than {cap} cells on [{lo}, {hi}]")
            slope = Fraction(p if c % 2 == 0 else -p)
            icpt = Fraction(c if c % 2 == 0 else -(c + 1))
            yield AffineCell(Fraction(-(c + 1), p), Fraction(-c, p), slope, icpt)


_MAP_RE = re.compile(r"^\s*(sigma|w|tent|f|halve|g|id|Z_)\s*(?:\^\s*(\d+))?\s*(\d+)?\s*$")


def parse_map(text: str, space: Optional[PointedSpace] = None) -> DynMap:
    """Parse a map literal such as ``sigma^3``, ``w^2``, ``Z_5``, ``tent^2``, ``halve^4``, ``id``."""
    m = _MAP_RE.match(text)
    if not m:
        raise ParseError(f"bad map literal {text!r}")
    name, exp, zorder = m.groups()
    if name == "Z_":
        if zorder is None or exp is not None:
            raise ParseError(f"zig-zag literal needs an order, e.g. Z_5 (got {text!r})")
        if int(zorder) < 1:
            raise ParseError("zig-zag order must be >= 1")
        return zigzag(int(zorder))
    if zorder is not None:
        raise ParseError(f"bad map literal {text!r}")
    k = int(exp) if exp is not None else 1
    if name == "id":
        return identity(space or CANTOR)
    build = {"sigma": sigma, "w": w, "tent": tent, "f": tent, "halve": halve, "g": halve}[name]
    if k < 1:
        raise ParseError(f"power must be >= 1 in {text!r}")
    return build(k)


def parse_tuple(texts: Sequence[str]) -> MapTuple:
    parsed = [t for t in texts if t.strip() != "id"]
    space = parse_map(parsed[0]).space if parsed else CANTOR
    return MapTuple(tuple(parse_map(t, space) for t in texts))
