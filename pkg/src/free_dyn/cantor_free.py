"""The free space of the Cantor set as l_1.

Gaps ``I_n = ]a_n, b_n[`` of the middle-third Cantor set are enumerated in
heap order (``I_{2n}`` and ``I_{2n+1}`` are the images of ``I_n`` under the
two contractions ``t/3`` and ``t/3 + 2/3``), which is the enumeration for which
the backward shift acts as ``n -> n // 2``.  ``e_n`` corresponds to the
molecule ``m_{b_n, a_n}`` and the conjugated shift ``S`` acts on l_1 by
``S e_n = 3 e_{n//2}`` (n >= 2) and ``S e_1 = v*`` with ``v* = -3 sum d_n e_n``.

:class:`L1Vector` stores ``sparse + star * v*`` so that ``S`` is computed
exactly even though ``v*`` has infinite support.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .errors import BadIndex, BadRadius
from .free_space import FreeVector, delta, line_norm, linearize_apply, molecule
from .maps import sigma
from .metric_spaces import ALL_TWO, CANTOR, CantorPoint


def level(n: int) -> int:
    return n.bit_length()


def gap_length(n: int) -> Fraction:
    if n < 1:
        raise BadIndex(f"gap indices start at 1, got {n}")
    return Fraction(1, 3 ** level(n))


@functools.lru_cache(maxsize=4096)
def _gap_digits(n: int) -> tuple[int, ...]:
    if n == 1:
        return ()
    return (2 * (n & 1),) + _gap_digits(n >> 1)


@dataclass(frozen=True)
class Gap:
    n: int
    a: Fraction
    b: Fraction
    d: Fraction

    @property
    def left(self) -> CantorPoint:
        return CantorPoint(_gap_digits(self.n) + (0,), ALL_TWO)

    @property
    def right(self) -> CantorPoint:
        return CantorPoint(_gap_digits(self.n) + (2,))


@functools.lru_cache(maxsize=4096)
def gap(n: int) -> Gap:
    """The n-th removed interval, by the recurrence a_{2n} = a_n/3, a_{2n+1} = a_n/3 + 2/3."""
    if n < 1:
        raise BadIndex(f"gap indices start at 1, got {n}")
    if n == 1:
        return Gap(1, Fraction(1, 3), Fraction(2, 3), Fraction(1, 3))
    parent = gap(n >> 1)
    shift = Fraction(2, 3) if n & 1 else Fraction(0)
    a, b = parent.a / 3 + shift, parent.b / 3 + shift
    return Gap(n, a, b, b - a)


assert [(gap(k).a, gap(k).b) for k in (1, 2, 3)] == [
    (Fraction(1, 3), Fraction(2, 3)),
    (Fraction(1, 9), Fraction(2, 9)),
    (Fraction(7, 9), Fraction(8, 9)),
]


def shift_action_on_gaps(n: int) -> int:
    if n < 2:
        raise BadIndex("the shift maps gap n to gap n // 2 only for n >= 2")
    return n // 2


def v_star_coordinate(n: int) -> Fraction:
    return -3 * gap_length(n)


class L1Vector:
    """``sum_n sparse[n] e_n + star * v*`` with exact coefficients."""

    __slots__ = ("sparse", "star")

    def __init__(self, sparse: Mapping[int, object] = (), star=0):
        items = sparse.items() if isinstance(sparse, Mapping) else sparse
        acc: dict[int, Fraction] = {}
        for n, c in items:
            if n < 1:
                raise BadIndex(f"l1 indices start at 1, got {n}")
            acc[n] = acc.get(n, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "sparse", MappingProxyType({n: acc[n] for n in sorted(acc) if acc[n]}))
        object.__setattr__(self, "star", Fraction(star))

    def __setattr__(self, name, value):
        raise AttributeError("L1Vector is immutable")

    def coordinate(self, n: int) -> Fraction:
        return self.sparse.get(n, Fraction(0)) + self.star * v_star_coordinate(n)

    def norm(self) -> Fraction:
        """Exact l_1 norm, using ||v*||_1 = 3."""
        total = Fraction(0)
        star_mass = Fraction(0)
        for n, c in self.sparse.items():
            vs = v_star_coordinate(n)
            total += abs(c + self.star * vs)
            star_mass += abs(vs)
        return total + abs(self.star) * (3 - star_mass)

    @property
    def max_level(self) -> int:
        return max((level(n) for n in self.sparse), default=0)

    def __add__(self, other):
        if not isinstance(other, L1Vector):
            return NotImplemented
        return L1Vector(list(self.sparse.items()) + list(other.sparse.items()), self.star + other.star)

    def __neg__(self):
        return L1Vector({n: -c for n, c in self.sparse.items()}, -self.star)

    def __sub__(self, other):
        if not isinstance(other, L1Vector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        s = Fraction(scalar)
        return L1Vector({n: s * c for n, c in self.sparse.items()}, s * self.star)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, L1Vector):
            return NotImplemented
        return self.star == other.star and dict(self.sparse) == dict(other.sparse)

    def __hash__(self):
        return hash((tuple(self.sparse.items()), self.star))

    def __repr__(self):
        return f"L1Vector({dict(self.sparse)}, star={self.star})"

    def to_json(self) -> dict:
        return {"sparse": {str(n): str(c) for n, c in self.sparse.items()}, "star": str(self.star)}

    @classmethod
    def from_json(cls, data) -> "L1Vector":
        return cls({int(n): Fraction(c) for n, c in data.get("sparse", {}).items()}, Fraction(data.get("star", "0")))


def e(n: int, coef=1) -> L1Vector:
    return L1Vector({n: coef})


V_STAR = L1Vector({}, 1)


def delta_expansion(t: CantorPoint, L: int) -> tuple[L1Vector, Fraction]:
    """Coordinates of delta_t on gaps of level <= L, and the exact discarded mass.

    delta_t has coordinate d_n at every gap with b_n <= t.  The gaps left of a
    Cantor point t have total length t, so the discarded l_1 mass is t minus
    the kept part; it never exceeds (2/3)^L.
    """
    tv = CANTOR.check(t).value
    sparse = {}
    # walk the ternary address tree: node (lo, k, n) is the basic interval
    # [lo, lo + 3^-k] whose middle gap has heap index n
    stack = [(Fraction(0), 0, 1)] if L >= 1 else []
    while stack:
        lo, k, n = stack.pop()
        if lo >= tv:
            continue
        g = gap(n)
        if g.b <= tv:
            sparse[n] = g.d
        if k + 1 < L:
            # appending address digit 0 or 2 moves the leading bit up, inserting 0 or 1 below it
            top = 1 << k
            stack.append((lo, k + 1, n + top))
            stack.append((lo + Fraction(2, 3 ** (k + 1)), k + 1, n + 2 * top))
    v = L1Vector(sparse)
    return v, tv - sum(sparse.values(), Fraction(0))


def godard_phi(n: int) -> FreeVector:
    g = gap(n)
    return molecule(CANTOR, g.right, g.left)


def phi(v: L1Vector) -> FreeVector:
    """Image of ``v`` in F(C); the star part maps exactly to ``-3 star delta_1``."""
    out = FreeVector(CANTOR)
    for n, c in v.sparse.items():
        out = out + c * godard_phi(n)
    if v.star:
        out = out + (-3 * v.star) * delta(CANTOR, CantorPoint((), ALL_TWO))
    return out


def s_sigma_apply(v: L1Vector) -> L1Vector:
    sparse = {}
    star = v.star
    for n, c in v.sparse.items():
        if n == 1:
            star += c
        else:
            sparse[n // 2] = sparse.get(n // 2, Fraction(0)) + 3 * c
    return L1Vector(sparse, star)


def s_sigma_power(v: L1Vector, k: int) -> L1Vector:
    """Closed form of ``S^k v``: e_n goes to 3^k e_{n >> k} while k < level(n), else 3^{level(n)-1} v*."""
    if k < 0:
        raise ValueError("power must be >= 0")
    if k == 0:
        return v
    sparse = {}
    star = v.star
    for n, c in v.sparse.items():
        lv = level(n)
        if k < lv:
            sparse[n >> k] = sparse.get(n >> k, Fraction(0)) + 3**k * c
        else:
            star += 3 ** (lv - 1) * c
    return L1Vector(sparse, star)


def w_lift_power(v: L1Vector, k: int) -> L1Vector:
    """Lift of the forward shift: ``e_n -> 3^{-k} e_{n 2^k}`` (finitely supported v only)."""
    if v.star:
        raise ValueError("the forward-shift lift is only represented on finitely supported vectors")
    return L1Vector({n << k: c / 3**k for n, c in v.sparse.items()})


def m_sigma_column(n: int, rows: int) -> dict[int, Fraction]:
    """Non-zero entries of column n of the matrix of S, restricted to rows 1..rows."""
    if n < 1:
        raise BadIndex("columns start at 1")
    if n == 1:
        return {r: v_star_coordinate(r) for r in range(1, rows + 1)}
    return {n // 2: Fraction(3)} if n // 2 <= rows else {}


@dataclass(frozen=True)
class ConjugacyResidual:
    residual: Fraction
    tail_bound: Fraction


def conjugacy_residual(v: L1Vector, L: int) -> ConjugacyResidual:
    """Compare ``phi(S v)`` (star part truncated at level L+1) with ``T_sigma phi(v)``.

    The free-norm distance is computed exactly; ``tail_bound`` is the exact
    l_1 mass of the discarded part of the star component.
    """
    if v.star:
        raise ValueError("conjugacy residual is defined for finitely supported vectors")
    if v.max_level > L:
        raise ValueError(f"support exceeds level {L}")
    sv = s_sigma_apply(v)
    cut = L + 1
    trunc = dict(sv.sparse)
    if sv.star:
        for n in range(1, 2**cut):
            trunc[n] = trunc.get(n, Fraction(0)) + sv.star * v_star_coordinate(n)
    lhs = phi(L1Vector(trunc))
    rhs = linearize_apply(sigma(), phi(v))
    residual = line_norm(lhs - rhs).value
    return ConjugacyResidual(residual, 3 * abs(sv.star) * Fraction(2, 3) ** cut)


def _annihilator(v: L1Vector) -> Fraction:
    """The linear functional whose kernel is killed by high powers of S."""
    return sum((c * 3 ** (level(n) - 1) for n, c in v.sparse.items()), Fraction(0))


def eventually_null(v: L1Vector, lvl: int) -> L1Vector:
    """Perturb v at one gap of level ``lvl`` so that ``S^k`` kills it for k >= lvl.

    The perturbation has l_1 norm ``|annihilator(v)| / 3^(lvl-1)``.
    """
    a = _annihilator(v)
    if not a:
        return v
    return v + L1Vector({1 << (lvl - 1): -a / 3 ** (lvl - 1)})


@dataclass(frozen=True)
class WitnessResult:
    m: int
    z: L1Vector
    u0_distance: Fraction
    target_distances: tuple[Fraction, ...]
    found: bool


def operator_return_witness(
    powers: Sequence[int],
    u0_center: L1Vector,
    u0_radius,
    targets: Sequence[tuple[L1Vector, object]],
    m: int,
    correction_level: Optional[int] = None,
) -> WitnessResult:
    """Try to certify ``m`` in the disjoint return set of ``S^{p_1}, ..., S^{p_N}`` for balls.

    Each centre c is first moved to a nearby finitely supported vector c' with
    ``S^k c' = 0`` for large k, then ``z = u0' + sum_i W^{p_i m} t_i'`` where W
    is the forward-shift lift (a right inverse of S).  All distances are
    exact; ``found`` is False when some ball constraint fails (which does
    not prove m is outside the return set).
    """
    radii = [Fraction(u0_radius)] + [Fraction(r) for _, r in targets]
    if len(targets) != len(powers) or any(r <= 0 for r in radii):
        raise BadRadius("need one positive radius per ball and one target per power")
    centers = [u0_center] + [c for c, _ in targets]
    if any(c.star for c in centers):
        raise ValueError("ball centres must be finitely supported")
    if correction_level is None:
        correction_level = max(c.max_level for c in centers) + 1
        worst = max(abs(_annihilator(c)) for c in centers)
        while worst / 3 ** (correction_level - 1) > min(radii) / 8:
            correction_level += 1
    u0p, *tps = [eventually_null(c, correction_level) for c in centers]
    z = u0p
    for p, t in zip(powers, tps):
        z = z + w_lift_power(t, p * m)
    u0_dist = (z - u0_center).norm()
    dists = tuple((s_sigma_power(z, p * m) - t).norm() for p, (t, _) in zip(powers, targets))
    found = u0_dist < radii[0] and all(d < r for d, r in zip(dists, radii[1:]))
    return WitnessResult(m, z, u0_dist, dists, found)
