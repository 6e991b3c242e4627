"""Exact disjoint return sets and the family predicates built on them.

For a tuple of maps ``f_1, ..., f_N`` and open sets ``U_0, U_1, ..., U_N`` the
disjoint return set is the set of times ``m`` for which some point of ``U_0``
is sent into every ``U_i`` by ``f_i^m`` simultaneously.  Membership is decided
exactly: on the Cantor set by checking that the digit constraints imposed by
the cylinders are consistent, on the interval by exact interval arithmetic on
piecewise-affine maps.  Every predicate here is truncated at an explicit
horizon and reports PASS / FAIL / INCONCLUSIVE for that finite shadow only.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import _intervals as iv
from ._parallel import pmap
from .errors import (
    BadHorizon,
    BadThreshold,
    HorizonExceeded,
    NotCommuting,
    ParseError,
    Unsupported,
    WrongSpace,
)
from .maps import DynMap, Form, MapTuple, commutes, power, zigzag, tent
from .metric_spaces import CANTOR, INTERVAL, CantorPoint, IntervalPoint, PointedSpace, SpaceKind
from .verdicts import Verdict

DEFAULT_HORIZON = 40
DEFAULT_MIN_COUNT = 3


class SetForm(enum.Enum):
    CYLINDER = "cyl"
    OPEN_INTERVAL = "ivl"
    UNION = "union"


@dataclass(frozen=True)
class OpenSet:
    space: PointedSpace
    form: SetForm
    prefix: tuple[int, ...] = ()
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    parts: tuple["OpenSet", ...] = ()

    def atoms(self) -> tuple["OpenSet", ...]:
        if self.form is SetForm.UNION:
            return tuple(a for p in self.parts for a in p.atoms())
        return (self,)

    def ivls(self) -> tuple[iv.Ivl, ...]:
        """The set as a union of intervals clipped to the interval space."""
        if self.space.kind is not SpaceKind.INTERVAL:
            raise WrongSpace("only interval sets have an interval representation")
        s = self.space
        out = []
        for a in self.atoms():
            out.append(iv.Ivl(a.lo, a.hi).intersect(iv.closed(s.lo, s.hi)))
        return iv.normalize(out)

    def contains(self, p) -> bool:
        if not self.space.contains(p):
            return False
        if self.form is SetForm.UNION:
            return any(part.contains(p) for part in self.parts)
        if self.form is SetForm.CYLINDER:
            return all(p.digit(i + 1) == d for i, d in enumerate(self.prefix))
        return self.lo < p.value < self.hi

    def __str__(self):
        if self.form is SetForm.CYLINDER:
            return "cyl:" + "".join(map(str, self.prefix))
        if self.form is SetForm.OPEN_INTERVAL:
            return f"ivl:{self.lo},{self.hi}"
        return "|".join(str(p) for p in self.parts)


def cylinder(prefix: Sequence[int]) -> OpenSet:
    prefix = tuple(int(d) for d in prefix)
    if any(d not in (0, 2) for d in prefix):
        raise ValueError(f"cylinder digits must be 0 or 2, got {prefix}")
    return OpenSet(CANTOR, SetForm.CYLINDER, prefix=prefix)


def open_interval(lo, hi, space: PointedSpace = INTERVAL) -> OpenSet:
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if hi <= space.lo or lo >= space.hi:
        raise ValueError(f"({lo}, {hi}) misses {space}")
    return OpenSet(space, SetForm.OPEN_INTERVAL, lo=lo, hi=hi)


def union(*sets: OpenSet) -> OpenSet:
    if not sets:
        raise ValueError("empty union")
    if len(sets) == 1:
        return sets[0]
    if any(s.space != sets[0].space for s in sets):
        raise WrongSpace("union members must share a space")
    return OpenSet(sets[0].space, SetForm.UNION, parts=tuple(sets))


def cylinders(length: int) -> list[OpenSet]:
    return [cylinder(w) for w in itertools.product((0, 2), repeat=length)]


def parse_set(text: str) -> OpenSet:
    """Parse ``cyl:02``, ``ivl:1/4,1/2`` or a ``|``-separated union of those."""
    text = text.strip()
    if "|" in text:
        return union(*(parse_set(t) for t in text.split("|")))
    try:
        kind, _, body = text.partition(":")
        if kind == "cyl":
            return cylinder(int(c) for c in body)
        if kind == "ivl":
            lo, hi = body.split(",")
            return open_interval(Fraction(lo), Fraction(hi))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad set literal {text!r}: {exc}") from exc
    raise ParseError(f"bad set literal {text!r}; expected cyl:... or ivl:lo,hi")


# -- exact membership --------------------------------------------------------

def _digit_constraints(f: DynMap, prefix: tuple[int, ...]) -> Optional[dict[int, int]]:
    """Constraints on the digits of x expressing ``f(x) in cylinder(prefix)``.

    Returns None when the preimage is empty.
    """
    if f.form is Form.IDENTITY:
        start, digits = 0, prefix
    elif f.form is Form.SIGMA_POW:
        start, digits = f.power, prefix
    elif f.form is Form.W_POW:
        if any(prefix[: f.power]):
            return None
        start, digits = 0, prefix[f.power:]
    else:
        raise Unsupported(f"no exact cylinder preimage for {f}")
    return {start + i + 1: d for i, d in enumerate(digits)}


def _merge(constraints) -> Optional[dict[int, int]]:
    merged: dict[int, int] = {}
    for c in constraints:
        if c is None:
            return None
        for pos, d in c.items():
            if merged.setdefault(pos, d) != d:
                return None
    return merged


def _cantor_hits(fs: tuple[DynMap, ...], u0: OpenSet, u: tuple[OpenSet, ...]) -> bool:
    for a0 in u0.atoms():
        base = {i + 1: d for i, d in enumerate(a0.prefix)}
        for choice in itertools.product(*(s.atoms() for s in u)):
            if _merge([base] + [_digit_constraints(f, a.prefix) for f, a in zip(fs, choice)]) is not None:
                return True
    return False


def _int_root(n: int, e: int) -> int:
    lo, hi = 1, 1 << (n.bit_length() // e + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**e <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _primitive_root(p: int) -> tuple[int, int]:
    """Write p = q**e with e maximal."""
    for e in range(p.bit_length(), 1, -1):
        q = _int_root(p, e)
        if q > 1 and q**e == p:
            return q, e
    return p, 1


def _forward(base: DynMap, ivls, steps: int):
    for _ in range(steps):
        nxt = iv.image(base, ivls)
        if nxt == ivls:
            break
        ivls = nxt
    return ivls


def _interval_hits(fs: tuple[DynMap, ...], u0: OpenSet, u: tuple[OpenSet, ...]) -> bool:
    reach = u0.ivls()
    pending = []
    for f, target in zip(fs, u):
        if f.form is Form.IDENTITY or f.form is Form.HALVE_POW or (f.form is Form.ZIGZAG and f.power == 1):
            reach = iv.preimage(f, target.ivls(), reach)
            if not reach:
                return False
        elif f.form in (Form.TENT_POW, Form.ZIGZAG):
            pending.append((f, target))
        else:
            raise Unsupported(f"no exact interval preimage for {f}")
    if not pending:
        return bool(reach)

    # All remaining maps are powers of one base map -> propagate forward along
    # the chain of exponents.  Otherwise fall back to cell-by-cell preimages.
    if any(f.form is Form.ZIGZAG for f, _ in pending):
        reach = iv.intersect_sets(reach, [iv.closed(0, 1)])
        orders = [f.power if f.form is Form.ZIGZAG else 2**f.power for f, _ in pending]
        roots = {_primitive_root(p)[0] for p in orders}
        if len(roots) == 1:
            q = roots.pop()
            base = zigzag(q)
            exps = [_primitive_root(p)[1] for p in orders]
        else:
            base = None
    else:
        base = tent(1)
        exps = [f.power for f, _ in pending]

    if base is None:
        for f, target in sorted(pending, key=lambda ft: ft[0].power):
            reach = iv.preimage(f, target.ivls(), reach)
            if not reach:
                return False
        return True

    current = 0
    for e, (_, target) in sorted(zip(exps, pending), key=lambda t: t[0]):
        reach = _forward(base, reach, e - current)
        current = e
        reach = iv.intersect_sets(reach, target.ivls())
        if not reach:
            return False
    return True


@functools.lru_cache(maxsize=1 << 18)
def _hits_cached(fs: tuple[DynMap, ...], u0: OpenSet, u: tuple[OpenSet, ...]) -> bool:
    if u0.space.kind is SpaceKind.CANTOR:
        return _cantor_hits(fs, u0, u)
    if u0.space.kind is SpaceKind.INTERVAL:
        return _interval_hits(fs, u0, u)
    raise Unsupported(f"return sets are not computed on {u0.space}")


def _check_inputs(tup: MapTuple, u0: OpenSet, u: Sequence[OpenSet]) -> tuple[OpenSet, ...]:
    u = tuple(u)
    if len(u) != len(tup):
        raise ValueError(f"need {len(tup)} target sets, got {len(u)}")
    for s in (u0, *u):
        if s.space != tup.space:
            raise WrongSpace(f"set {s} is not on {tup.space}")
    if any(f.form is Form.GENERIC for f in tup):
        raise Unsupported("generic maps have no exact preimages")
    return u


def hits(tup: MapTuple, u0: OpenSet, u: Sequence[OpenSet], m: int) -> bool:
    """Is ``U_0 ∩ f_1^{-m}(U_1) ∩ ... ∩ f_N^{-m}(U_N)`` non-empty?"""
    u = _check_inputs(tup, u0, u)
    fs = tuple(power(f, m) for f in tup)
    return _hits_cached(fs, u0, u)


@dataclass(frozen=True)
class ReturnSetSample:
    tuple: MapTuple
    u0: OpenSet
    u: tuple[OpenSet, ...]
    horizon: int
    members: tuple[int, ...]

    @property
    def m_min(self) -> Optional[int]:
        return self.members[0] if self.members else None

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.members), self.horizon + 1)

    @property
    def cofinite_from(self) -> Optional[int]:
        """Least t such that every m in [t, horizon] is a member."""
        if not self.members or self.members[-1] != self.horizon:
            return None
        t = self.horizon
        present = set(self.members)
        while t - 1 in present:
            t -= 1
        return t


def _member(args):
    tup, u0, u, m = args
    return m if hits(tup, u0, u, m) else None


def disjoint_return_set(tup: MapTuple, u0: OpenSet, u: Sequence[OpenSet], horizon: int = DEFAULT_HORIZON) -> ReturnSetSample:
    if horizon < 0:
        raise BadHorizon("horizon must be >= 0")
    u = _check_inputs(tup, u0, u)
    found = pmap(_member, [(tup, u0, u, m) for m in range(horizon + 1)])
    return ReturnSetSample(tup, u0, u, horizon, tuple(m for m in found if m is not None))


def nonempty_implies_infinite_check(sample: ReturnSetSample, min_count: int = DEFAULT_MIN_COUNT) -> Verdict:
    """Finite shadow of "non-empty return sets are infinite".

    An empty sample, or one with at least ``min_count`` members, is
    CONSISTENT; a non-empty sample with fewer members is INCONCLUSIVE (the
    horizon is too short to say more).  Exact samples on spaces without
    isolated points cannot yield VIOLATION, so it is never returned here.
    """
    n = len(sample.members)
    if n == 0 or n >= min_count:
        return Verdict.CONSISTENT
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class FamilySample:
    """Finite generators of the family of supersets of some return sets."""

    generators: tuple[ReturnSetSample, ...]
    horizon: int

    def __post_init__(self):
        if any(g.horizon != self.horizon for g in self.generators):
            raise BadHorizon("all generators must share the horizon")

    def common_members(self) -> tuple[int, ...]:
        if not self.generators:
            return tuple(range(self.horizon + 1))
        return tuple(sorted(frozenset.intersection(*(frozenset(g.members) for g in self.generators))))


@dataclass
class FamilyReport:
    verdict: Verdict
    samples: list[ReturnSetSample] = field(default_factory=list)
    failures: list = field(default_factory=list)
    checked: int = 0


def _choices(tup: MapTuple, family: Sequence[OpenSet]):
    return [(u0, u) for u0 in family for u in itertools.product(family, repeat=len(tup))]


def check_disjoint_transitive(tup: MapTuple, family: Sequence[OpenSet], horizon: int = DEFAULT_HORIZON) -> FamilyReport:
    samples = [disjoint_return_set(tup, u0, u, horizon) for u0, u in _choices(tup, family)]
    failures = [s for s in samples if not s.members]
    verdict = Verdict.FAIL if failures else Verdict.PASS
    return FamilyReport(verdict, samples, failures, len(samples))


def weakly_mixing_order_r(tup: MapTuple, r: int, family: Sequence[OpenSet], horizon: int = DEFAULT_HORIZON) -> FamilyReport:
    """Order-r weak mixing at a horizon, via intersections of r return sets.

    Every multiset of r choices ``(U_0j, U_j)`` is tested; this is the
    order-r product condition without building the r-fold product space.
    """
    if r < 1:
        raise ValueError("order must be >= 1")
    samples = [disjoint_return_set(tup, u0, u, horizon) for u0, u in _choices(tup, family)]
    member_sets = [frozenset(s.members) for s in samples]
    failures = []
    checked = 0
    for combo in itertools.combinations_with_replacement(range(len(samples)), r):
        checked += 1
        common = frozenset.intersection(*(member_sets[i] for i in combo))
        if not common:
            failures.append(tuple(samples[i] for i in combo))
    verdict = Verdict.FAIL if failures else Verdict.PASS
    return FamilyReport(verdict, samples, failures, checked)


def cofinite_up_to(sample: ReturnSetSample, threshold: int) -> bool:
    if threshold > sample.horizon or threshold < 0:
        raise BadThreshold(f"threshold {threshold} outside [0, {sample.horizon}]")
    present = set(sample.members)
    return all(m in present for m in range(threshold, sample.horizon + 1))


def product_family_intersect(a: ReturnSetSample, b: ReturnSetSample) -> tuple[int, ...]:
    if a.horizon != b.horizon:
        raise BadHorizon(f"horizons differ: {a.horizon} != {b.horizon}")
    return tuple(sorted(set(a.members) & set(b.members)))


# -- filter machinery ----------------------------------------------------------

@dataclass(frozen=True)
class FilterWitness:
    m: int
    w: tuple[OpenSet, ...]


def _restricted_preimage(g: DynMap, target: OpenSet, within: OpenSet, cap: int = 1 << 12) -> OpenSet:
    """``within ∩ g^{-1}(target)`` as an exact OpenSet (assumed non-empty)."""
    if within.space.kind is SpaceKind.CANTOR:
        pieces = []
        for a in within.atoms():
            for b in target.atoms():
                c = _merge([{i + 1: d for i, d in enumerate(a.prefix)}, _digit_constraints(g, b.prefix)])
                if c is None:
                    continue
                length = max(c, default=0)
                free = [p for p in range(1, length + 1) if p not in c]
                if 2 ** len(free) > cap:
                    raise Unsupported(f"preimage splits into more than {cap} cylinders")
                for fill in itertools.product((0, 2), repeat=len(free)):
                    digits = dict(c)
                    digits.update(zip(free, fill))
                    pieces.append(cylinder(digits[p] for p in range(1, length + 1)))
        return union(*pieces)
    ivls = iv.preimage(g, target.ivls(), within.ivls())
    s = within.space
    parts = []
    for piece in ivls:
        if piece.lo == piece.hi:
            continue
        lo = piece.lo - 1 if piece.lo_closed and piece.lo == s.lo else piece.lo
        hi = piece.hi + 1 if piece.hi_closed and piece.hi == s.hi else piece.hi
        parts.append(open_interval(lo, hi, s))
    return union(*parts)


def commutator_filter_witness(
    tup: MapTuple, g: DynMap, U: Sequence[OpenSet], V: Sequence[OpenSet], search_horizon: int = DEFAULT_HORIZON
) -> FilterWitness:
    """Smallest m with ``U_i ∩ g^{-m}(V_i)`` non-empty for all i, and those sets.

    ``g`` must provably commute with every map of the tuple; the returned sets
    ``W_i`` satisfy ``d-N(W_0, W) ⊆ d-N(U_0, U) ∩ d-N(V_0, V)``.
    """
    U, V = tuple(U), tuple(V)
    if len(U) != len(tup) + 1 or len(V) != len(tup) + 1:
        raise ValueError(f"need {len(tup) + 1} sets in U and in V")
    for f in tup:
        if not commutes(g, f):
            raise NotCommuting(f"{g} is not known to commute with {f}")
    single = MapTuple((g,))
    for m in range(search_horizon + 1):
        if all(hits(single, ui, (vi,), m) for ui, vi in zip(U, V)):
            gm = power(g, m)
            return FilterWitness(m, tuple(_restricted_preimage(gm, vi, ui) for ui, vi in zip(U, V)))
    raise HorizonExceeded(f"no common return time of {g} within {search_horizon}")


@dataclass(frozen=True)
class FilterCheck:
    verdict: Verdict
    w_members: tuple[int, ...]
    u_members: tuple[int, ...]
    v_members: tuple[int, ...]
    extra: tuple[int, ...]


def filter_inclusion_check(
    tup: MapTuple, U: Sequence[OpenSet], V: Sequence[OpenSet], W: Sequence[OpenSet], horizon: int = DEFAULT_HORIZON
) -> FilterCheck:
    su = disjoint_return_set(tup, U[0], U[1:], horizon)
    sv = disjoint_return_set(tup, V[0], V[1:], horizon)
    sw = disjoint_return_set(tup, W[0], W[1:], horizon)
    both = set(product_family_intersect(su, sv))
    extra = tuple(m for m in sw.members if m not in both)
    verdict = Verdict.FAIL if extra else Verdict.PASS
    return FilterCheck(verdict, sw.members, su.members, sv.members, extra)
