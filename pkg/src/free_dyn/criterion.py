"""Pointwise checks of the Lipschitz disjoint hypercyclicity criterion.

For maps f_1..f_N, a schedule n_k, test sets M_0..M_N and right-inverse
candidates g_{i,k}, the three conditions are

    (i)   d(f_i^{n_k}(x), 0)                    -> 0   for x in M_0
    (ii)  d(g_{i,k}(x), 0)                      -> 0   for x in M_i
    (iii) d(f_i^{n_k}(g_{j,k}(x)), [i==j] x)    -> 0   for x in M_j

Test sets are finite stand-ins for dense sets, so a PASS is evidence, not a
proof.  Condition (iii) is evaluated through :func:`maps.compose`, so when the
collapse tables apply the diagonal distances are literally zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import NotDistinct
from .maps import DynMap, MapTuple, compose, halve, map_tuple, power, sigma, tent, w
from .metric_spaces import CantorPoint, dyadic_point
from .verdicts import Verdict

DEFAULT_EPS = Fraction(1, 10**9)

CONDITIONS = ("i", "ii", "iii_diag", "iii_cross")

IMPLICATION = (
    "conditions (i)-(iii) for all k imply the linearized operators satisfy the "
    "operator disjoint hypercyclicity criterion along n_k, hence are disjoint mixing"
)


class ConditionVerdict(str, enum.Enum):
    EXACT_ZERO = "EXACT_ZERO"
    BELOW_EPS = "BELOW_EPS"
    DECAYING = "DECAYING"   # above eps at k = K but strictly decreasing over the last 3 steps
    FAIL = "FAIL"

    def __str__(self):
        return self.value


InverseFamily = Callable[[int, int, int], DynMap]   # (i, k, n_k) -> g_{i,k}, i is 0-based


@dataclass(frozen=True)
class CriterionInstance:
    tuple: MapTuple
    test_sets: tuple[tuple, ...]
    inverses: InverseFamily
    schedule: tuple[int, ...]
    eps: Fraction = DEFAULT_EPS
    test_bound: str = ""

    def __post_init__(self):
        n = len(self.tuple)
        if len(self.test_sets) != n + 1:
            raise ValueError(f"need {n + 1} test sets (M_0..M_N), got {len(self.test_sets)}")
        sched = tuple(int(s) for s in self.schedule)
        if not sched or sched[0] < 1 or any(a >= b for a, b in zip(sched, sched[1:])):
            raise ValueError("schedule n_k must be a non-empty strictly increasing list of positive integers")
        space = self.tuple.space
        sets = tuple(tuple(space.check(p) for p in m) for m in self.test_sets)
        object.__setattr__(self, "schedule", sched)
        object.__setattr__(self, "test_sets", sets)
        object.__setattr__(self, "eps", Fraction(self.eps))

    @property
    def K(self) -> int:
        return len(self.schedule)


@dataclass(frozen=True)
class CriterionReport:
    verdict: Verdict
    conditions: dict[str, ConditionVerdict]
    worst_at_K: dict[str, Fraction]
    decay: tuple[dict, ...]
    eps: Fraction
    test_bound: str
    implication: str = IMPLICATION

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "conditions": {c: v.value for c, v in self.conditions.items()},
            "worst_at_K": {c: str(v) for c, v in self.worst_at_K.items()},
            "decay": [{k: str(v) for k, v in row.items()} for row in self.decay],
            "eps": str(self.eps),
            "test_bound": self.test_bound,
            "implication": self.implication,
        }


def _classify(series: Sequence[Fraction], eps: Fraction) -> ConditionVerdict:
    last = series[-1]
    if last == 0:
        return ConditionVerdict.EXACT_ZERO
    if last <= eps:
        return ConditionVerdict.BELOW_EPS
    tail = series[-3:]
    if len(tail) == 3 and tail[0] > tail[1] > tail[2]:
        return ConditionVerdict.DECAYING
    return ConditionVerdict.FAIL


def _worst(space, f: DynMap, points, target=None) -> Fraction:
    base = space.basepoint
    best = Fraction(0)
    for x in points:
        best = max(best, space.distance(f(x), x if target == "self" else base))
    return best


def verify_criterion(inst: CriterionInstance) -> CriterionReport:
    maps = inst.tuple.maps
    space = inst.tuple.space
    n = len(maps)
    m0, ms = inst.test_sets[0], inst.test_sets[1:]
    rows = []
    for k, nk in enumerate(inst.schedule, start=1):
        fpow = [power(f, nk) for f in maps]
        gs = [inst.inverses(i, k, nk) for i in range(n)]
        row = {"k": Fraction(k), "n_k": Fraction(nk)}
        row["i"] = max(_worst(space, fp, m0) for fp in fpow)
        row["ii"] = max(_worst(space, g, m) for g, m in zip(gs, ms))
        diag = cross = Fraction(0)
        for i in range(n):
            for j in range(n):
                h = compose(fpow[i], gs[j])
                if i == j:
                    diag = max(diag, _worst(space, h, ms[j], "self"))
                else:
                    cross = max(cross, _worst(space, h, ms[j]))
        row["iii_diag"] = diag
        row["iii_cross"] = cross
        rows.append(row)
    names = CONDITIONS if n > 1 else CONDITIONS[:3]
    verdicts = {c: _classify([r[c] for r in rows], inst.eps) for c in names}
    overall = Verdict.FAIL if ConditionVerdict.FAIL in verdicts.values() else Verdict.PASS
    return CriterionReport(
        overall,
        verdicts,
        {c: rows[-1][c] for c in names},
        tuple(rows),
        inst.eps,
        inst.test_bound,
    )


def _check_powers(powers: Sequence[int]) -> tuple[int, ...]:
    ps = tuple(int(p) for p in powers)
    if len(set(ps)) != len(ps):
        raise NotDistinct(f"powers must be pairwise distinct, got {ps}")
    if len(ps) < 2:
        raise ValueError("need at least two powers")
    if min(ps) < 1:
        raise ValueError("powers must be positive")
    return ps


def finite_prefix_points(max_len: int) -> tuple[CantorPoint, ...]:
    """Cantor points with a finite ternary expansion of length <= max_len."""
    pts = {CantorPoint(())}
    layer = [()]
    for _ in range(max_len):
        layer = [p + (d,) for p in layer for d in (0, 2)]
        pts.update(CantorPoint(p) for p in layer)
    return tuple(sorted(pts))


def dyadic_points(q: int) -> tuple:
    """All ±r/2^q in [-1, 1]; these include every dyadic with smaller exponent."""
    return tuple(dyadic_point(r, q) for r in range(-(2**q), 2**q + 1))


def _default_schedule(K: int, schedule) -> tuple[int, ...]:
    return tuple(schedule) if schedule is not None else tuple(range(1, K + 1))


def shift_instance(powers, K: int, eps=DEFAULT_EPS, prefix_len: int = 5, schedule=None) -> CriterionInstance:
    ps = _check_powers(powers)
    pts = finite_prefix_points(prefix_len)
    return CriterionInstance(
        map_tuple(*(sigma(p) for p in ps)),
        (pts,) * (len(ps) + 1),
        lambda i, k, nk: w(ps[i] * nk),
        _default_schedule(K, schedule),
        eps,
        f"finite-prefix Cantor points of length <= {prefix_len} ({len(pts)} points)",
    )


def tent_instance(powers, K: int, eps=DEFAULT_EPS, q: int = 5, schedule=None) -> CriterionInstance:
    ps = _check_powers(powers)
    pts = dyadic_points(q)
    return CriterionInstance(
        map_tuple(*(tent(p) for p in ps)),
        (pts,) * (len(ps) + 1),
        lambda i, k, nk: halve(ps[i] * nk),
        _default_schedule(K, schedule),
        eps,
        f"dyadics r/2^{q} in [-1, 1] ({len(pts)} points)",
    )


def shift_powers_experiment(powers, K: int, eps=DEFAULT_EPS, schedule=None) -> CriterionReport:
    return verify_criterion(shift_instance(powers, K, eps, schedule=schedule))


def tent_powers_experiment(powers, K: int, eps=DEFAULT_EPS, schedule=None) -> CriterionReport:
    return verify_criterion(tent_instance(powers, K, eps, schedule=schedule))
