"""Brute-force reference computations used to check the library.

None of these reuse the code paths they check: the free norm is computed by
enumerating LP vertices, Cantor return sets by trying explicit points, gap
endpoints from a closed digit formula.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from free_dyn.maps import apply, identity, power, sigma
from free_dyn.metric_spaces import CANTOR, CantorPoint, FiniteSpace


# -- free norm ---------------------------------------------------------------

def _solve(rows, rhs):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def vertex_norm(space, coeffs: dict) -> Fraction:
    """max sum a_x g(x) over 1-Lipschitz g with g(base) = 0, by vertex enumeration.

    Uses every point of a FiniteSpace (not just the support), so agreement
    also checks that restricting to the support loses nothing.
    """
    base = space.basepoint
    pts = [p for p in space.points if p != base]
    n = len(pts)
    if n == 0:
        return Fraction(0)
    cons = []   # (row, bound) meaning row . g <= bound
    for i, p in enumerate(pts):
        d0 = space.distance(p, base)
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        cons.append((e, d0))
        cons.append(([-x for x in e], d0))
        for j in range(i + 1, n):
            r = [Fraction(0)] * n
            r[i], r[j] = Fraction(1), Fraction(-1)
            dij = space.distance(p, pts[j])
            cons.append((r, dij))
            cons.append(([-x for x in r], dij))
    obj = [Fraction(coeffs.get(p, 0)) for p in pts]
    best = None
    for combo in itertools.combinations(cons, n):
        g = _solve([c[0] for c in combo], [c[1] for c in combo])
        if g is None:
            continue
        if all(sum(a * b for a, b in zip(row, g)) <= bound for row, bound in cons):
            val = sum(a * b for a, b in zip(obj, g))
            best = val if best is None else max(best, val)
    return best


def random_finite_space(rng: random.Random, n: int) -> FiniteSpace:
    """Shortest-path metric of a complete graph with random positive rational weights."""
    d = [[Fraction(0) if i == j else None for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = Fraction(rng.randint(1, 12), rng.randint(1, 4))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return FiniteSpace(tuple(f"p{i}" for i in range(n)), tuple(map(tuple, d)), 0)


# -- gaps --------------------------------------------------------------------

def gap_endpoints(n: int) -> tuple[Fraction, Fraction]:
    """(a_n, b_n) from the binary digits of n: n = 1 beta_1 ... beta_k gives
    b_n = 0.(2 beta_k)...(2 beta_1) 2 in base 3 and a_n = b_n - 3^-(k+1)."""
    bits = bin(n)[3:]
    digits = [2 * int(c) for c in reversed(bits)] + [2]
    b = sum(Fraction(d, 3 ** (i + 1)) for i, d in enumerate(digits))
    return b - Fraction(1, 3 ** len(digits)), b


# -- Cantor return sets -----------------------------------------------------

def _cantor_candidates(positions):
    """Points whose digits at ``positions`` range over {0,2}; other digits 0."""
    positions = sorted(positions)
    for fill in itertools.product((0, 2), repeat=len(positions)):
        digits = [0] * (positions[-1] if positions else 0)
        for p, d in zip(positions, fill):
            digits[p - 1] = d
        yield CantorPoint(tuple(digits))


def _relevant_positions(shifts, u0, us):
    pos = set(range(1, len(u0.prefix) + 1))
    for s, u in zip(shifts, us):
        pos.update(s + i for i in range(1, len(u.prefix) + 1))
    return pos


def shift_hits(powers, u0, us, m) -> bool:
    """Does some point x of u0 have sigma^(p_i m) x in u_i for all i?

    Only digits at constrained positions matter, so trying every assignment of
    those digits (rest zero) is exhaustive.  Membership is tested pointwise.
    """
    shifts = [p * m for p in powers]
    maps = [power(f, m) for f in _shift_maps(powers)]
    for x in _cantor_candidates(_relevant_positions(shifts, u0, us)):
        if u0.contains(x) and all(u.contains(apply(f, x)) for f, u in zip(maps, us)):
            return True
    return False


def _shift_maps(powers):
    return [sigma(p) if p else identity(CANTOR) for p in powers]


def product_pair_hits(powers, u0, v0, us, vs, m) -> bool:
    """Membership of m in the return set of the product tuple (f_i x f_i) on C x C.

    Explicit pairs (x, y) are enumerated and each coordinate map is applied.
    """
    shifts = [p * m for p in powers]
    maps = [power(f, m) for f in _shift_maps(powers)]
    xs = list(_cantor_candidates(_relevant_positions(shifts, u0, us)))
    ys = list(_cantor_candidates(_relevant_positions(shifts, v0, vs)))
    for x in xs:
        if not u0.contains(x):
            continue
        for y in ys:
            if v0.contains(y) and all(
                u.contains(apply(f, x)) and v.contains(apply(f, y)) for f, u, v in zip(maps, us, vs)
            ):
                return True
    return False


def product_weakly_mixing(powers, family, horizon) -> bool:
    """Order-2 weak mixing by building the product system explicitly:
    every product choice (A x B, (C_i x D_i)_i) must have a common return time."""
    n = len(powers)
    for u0, v0 in itertools.product(family, repeat=2):
        for us in itertools.product(family, repeat=n):
            for vs in itertools.product(family, repeat=n):
                if not any(product_pair_hits(powers, u0, v0, us, vs, m) for m in range(horizon + 1)):
                    return False
    return True

