"""Finitely supported elements of the Lipschitz-free space F(M).

A :class:`FreeVector` is a finite combination of point evaluations
``sum a_i delta_{x_i}``; the basepoint evaluation is the zero vector and is
dropped on construction.  Its norm is computed exactly as the optimum of the
Kantorovich–Rubinstein dual LP restricted to ``support ∪ {0}`` (by McShane
extension that restriction loses nothing).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateMolecule, IncompleteFunction, InvalidMetric, WrongSpace
from .lp import ROOT, Arc, solve_transshipment
from .maps import DynMap, apply
from .metric_spaces import Point, PointedSpace, parse_point


class FreeVector:
    __slots__ = ("space", "terms")

    def __init__(self, space: PointedSpace, terms: Mapping[Point, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        base = space.basepoint
        acc: dict = {}
        for p, c in items:
            space.check(p)
            if p == base:
                continue
            acc[p] = acc.get(p, Fraction(0)) + Fraction(c)
        clean = {p: acc[p] for p in sorted(acc, key=space.sort_key) if acc[p] != 0}
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def __setattr__(self, name, value):
        raise AttributeError("FreeVector is immutable")

    @property
    def support(self) -> list:
        return list(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, p) -> Fraction:
        return self.terms.get(p, Fraction(0))

    def _same(self, other: "FreeVector"):
        if not isinstance(other, FreeVector):
            return NotImplemented
        if other.space != self.space:
            raise WrongSpace("vectors live on different spaces")
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return FreeVector(self.space, list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return FreeVector(self.space, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        s = Fraction(scalar)
        return FreeVector(self.space, {p: s * c for p, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __eq__(self, other):
        if not isinstance(other, FreeVector):
            return NotImplemented
        return self.space == other.space and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.space, tuple(self.terms.items())))

    def __repr__(self):
        body = ", ".join(f"{p}: {c}" for p, c in self.terms.items())
        return f"FreeVector({self.space}, {{{body}}})"

    def to_json(self) -> list:
        return [[str(p), str(c)] for p, c in self.terms.items()]

    @classmethod
    def from_json(cls, space: PointedSpace, data) -> "FreeVector":
        return cls(space, [(parse_point(space, str(p)), Fraction(str(c))) for p, c in data])


def zero(space: PointedSpace) -> FreeVector:
    return FreeVector(space)


def delta(space: PointedSpace, x) -> FreeVector:
    return FreeVector(space, [(x, 1)])


def molecule(space: PointedSpace, x, y) -> FreeVector:
    """``(delta_x - delta_y) / d(x, y)``."""
    d = space.distance(x, y)
    if d == 0:
        raise DegenerateMolecule(f"molecule needs distinct points, got {x} twice")
    return FreeVector(space, [(x, 1 / d), (y, -1 / d)])


class LipFunction:
    """A Lip_0 function known on finitely many points.

    The basepoint value is pinned to 0.  The stated Lipschitz bound is checked
    over all stored pairs on construction.
    """

    def __init__(self, space: PointedSpace, values: Mapping, declared_lip=1):
        vals = {space.check(p): Fraction(v) for p, v in values.items()}
        base = space.basepoint
        if vals.setdefault(base, Fraction(0)) != 0:
            raise ValueError("a Lip_0 function vanishes at the basepoint")
        lip = Fraction(declared_lip)
        pts = list(vals)
        for i, x in enumerate(pts):
            for y in pts[i + 1:]:
                if abs(vals[x] - vals[y]) > lip * space.distance(x, y):
                    raise InvalidMetric(f"|g({x}) - g({y})| exceeds {lip} * d({x}, {y})")
        self.space = space
        self.values = MappingProxyType(vals)
        self.declared_lip = lip

    def __call__(self, p) -> Fraction:
        try:
            return self.values[p]
        except KeyError:
            raise IncompleteFunction(f"no value stored at {p}") from None

    def lipschitz_constant(self) -> Fraction:
        pts = list(self.values)
        best = Fraction(0)
        for i, x in enumerate(pts):
            for y in pts[i + 1:]:
                best = max(best, abs(self.values[x] - self.values[y]) / self.space.distance(x, y))
        return best

    def to_json(self) -> list:
        return [[str(p), str(v)] for p, v in self.values.items()]


def pair(g: LipFunction, v: FreeVector) -> Fraction:
    return sum((c * g(p) for p, c in v.terms.items()), Fraction(0))


class LPStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE_IMPOSSIBLE = "INFEASIBLE_IMPOSSIBLE"


@dataclass(frozen=True)
class NormCertificate:
    value: Fraction
    witness_g: LipFunction
    lp_status: LPStatus = LPStatus.OPTIMAL

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "lp_status": self.lp_status.value,
            "witness_g": self.witness_g.to_json(),
        }


def _arcs(space: PointedSpace, pts: list) -> list[Arc]:
    """Star arcs plus every non-redundant pair of support points.

    A pair (x, y) is dropped when some third point z lies metrically between
    them, d(x,z) + d(z,y) = d(x,y): flow on it can be rerouted through z at
    equal cost, and its dual constraint is implied by the other two.
    """
    n = len(pts)
    base = space.basepoint
    arcs = []
    for i, x in enumerate(pts):
        d0 = space.distance(x, base)
        arcs.append(Arc(i, ROOT, d0))
        arcs.append(Arc(ROOT, i, d0))
    if space.is_line:
        coords = sorted(range(n), key=lambda i: space.coordinate(pts[i]))
        pairs = zip(coords, coords[1:])
    else:
        everyone = pts + [base]
        dist = [[space.distance(a, b) for b in everyone] for a in everyone]
        pairs = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if not any(k not in (i, j) and dist[i][k] + dist[k][j] == dist[i][j] for k in range(n + 1))
        ]
    for i, j in pairs:
        d = space.distance(pts[i], pts[j])
        arcs.append(Arc(i, j, d))
        arcs.append(Arc(j, i, d))
    return arcs


def free_norm(v: FreeVector) -> NormCertificate:
    """Exact norm of ``v`` with an optimal 1-Lipschitz dual witness."""
    space = v.space
    pts = v.support
    if not pts:
        return NormCertificate(Fraction(0), LipFunction(space, {}))
    sol = solve_transshipment([v.terms[p] for p in pts], _arcs(space, pts))
    g = LipFunction(space, dict(zip(pts, sol.potential)), 1)
    return NormCertificate(sol.value, g)


def line_norm(v: FreeVector) -> NormCertificate:
    """Closed-form norm on subsets of the real line.

    For M ⊂ R pointed at 0 the norm is the integral of |mass beyond t| over t,
    a finite sum here; the witness follows the sign of that mass.
    """
    space = v.space
    if not space.is_line:
        raise WrongSpace(f"{space} is not a subset of the line")
    coord = {p: space.coordinate(p) for p in v.support}
    zero_c = space.coordinate(space.basepoint)
    g_vals = {}
    total = Fraction(0)
    for side in (1, -1):
        pts = sorted((p for p in coord if (coord[p] - zero_c) * side > 0), key=lambda p: side * coord[p])
        # mass strictly beyond each segment, walking outwards from 0
        beyond = sum((v.terms[p] for p in pts), Fraction(0))
        prev, g = zero_c, Fraction(0)
        for p in pts:
            length = abs(coord[p] - prev)
            sign = (beyond > 0) - (beyond < 0)
            total += abs(beyond) * length
            g += sign * length
            g_vals[p] = g
            prev = coord[p]
            beyond -= v.terms[p]
    return NormCertificate(total, LipFunction(space, g_vals, 1))


def linearize_apply(f: DynMap, v: FreeVector) -> FreeVector:
    """``T_f v = sum a_i delta_{f(x_i)}``; images that collide are summed."""
    if f.space != v.space:
        raise WrongSpace(f"{f} acts on {f.space}, vector lives on {v.space}")
    return FreeVector(v.space, [(apply(f, p), c) for p, c in v.terms.items()])


def operator_norm_probe(f: DynMap, pairs: Sequence[tuple]) -> Fraction:
    """Certified lower bound ``max ||T_f m_{x,y}||`` for the operator norm of T_f."""
    best = Fraction(0)
    for x, y in pairs:
        best = max(best, free_norm(linearize_apply(f, molecule(f.space, x, y))).value)
    return best
