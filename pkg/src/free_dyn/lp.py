"""Exact-rational primal simplex for uncapacitated min-cost transshipment.

The Lipschitz-free norm of a finitely supported vector is the value of

    maximize  sum_x a_x g(x)   s.t.  g(root) = 0,  g(u) - g(v) <= d(u, v),

whose LP dual is a min-cost flow in which every support node x must ship its
coefficient a_x and the root absorbs the imbalance.  We solve that dual with a
dense tableau in :class:`~fractions.Fraction` arithmetic and Bland's rule;
the simplex multipliers of the optimal basis are the optimal ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ROOT = -1


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    cost: Fraction


@dataclass
class FlowSolution:
    value: Fraction
    flow: dict[int, Fraction]       # arc index -> positive flow
    potential: list[Fraction]       # g at each non-root node
    pivots: int


def solve_transshipment(supply: Sequence[Fraction], arcs: Sequence[Arc]) -> FlowSolution:
    """Minimise total cost subject to out-flow minus in-flow = supply at each node.

    Nodes are ``0..len(supply)-1`` plus :data:`ROOT`.  For every node both
    star arcs ``x -> ROOT`` and ``ROOT -> x`` must be present; they seed the
    initial feasible basis so no phase I is needed.
    """
    n = len(supply)
    supply = [Fraction(s) for s in supply]
    arcs = list(arcs)
    to_root, from_root = {}, {}
    for j, a in enumerate(arcs):
        if a.head == ROOT:
            to_root[a.tail] = j
        elif a.tail == ROOT:
            from_root[a.head] = j
    if set(to_root) != set(range(n)) or set(from_root) != set(range(n)):
        raise ValueError("every node needs both star arcs to and from the root")
    if n == 0:
        return FlowSolution(Fraction(0), {}, [], 0)

    ncol = len(arcs)
    cost = [a.cost for a in arcs]
    basis = []
    rows = []
    rhs = []
    for r in range(n):
        sign = 1 if supply[r] >= 0 else -1
        basis.append(to_root[r] if sign > 0 else from_root[r])
        row = [Fraction(0)] * ncol
        for j, a in enumerate(arcs):
            if a.tail == r:
                row[j] += sign
            if a.head == r:
                row[j] -= sign
        rows.append(row)
        rhs.append(sign * supply[r])

    reduced = list(cost)
    for r, j in enumerate(basis):
        cb = cost[j]
        if cb:
            row = rows[r]
            for k in range(ncol):
                if row[k]:
                    reduced[k] -= cb * row[k]

    pivots = 0
    while True:
        enter = next((j for j in range(ncol) if reduced[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(n):
            coef = rows[r][enter]
            if coef > 0:
                ratio = rhs[r] / coef
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            raise ArithmeticError("unbounded transshipment (negative-cost cycle)")
        pivots += 1
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [x / piv for x in prow]
            rows[leave] = prow
            rhs[leave] /= piv
        nz = [k for k in range(ncol) if prow[k]]
        for r in range(n):
            if r == leave:
                continue
            factor = rows[r][enter]
            if factor:
                row = rows[r]
                for k in nz:
                    row[k] -= factor * prow[k]
                rhs[r] -= factor * rhs[leave]
        factor = reduced[enter]
        for k in nz:
            reduced[k] -= factor * prow[k]
        basis[leave] = enter

    flow = {j: rhs[r] for r, j in enumerate(basis) if rhs[r]}
    value = sum((cost[j] * x for j, x in flow.items()), Fraction(0))
    # reduced cost of x -> ROOT is cost - g(x)
    potential = [cost[to_root[r]] - reduced[to_root[r]] for r in range(n)]
    return FlowSolution(value, flow, potential, pivots)
