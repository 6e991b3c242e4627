"""The twelve acceptance criteria, each at its stated tolerance and time budget.

Each test records a one-line PASS/FAIL summary that conftest prints at the end
of the run.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from free_dyn import cantor_free as cf
from free_dyn.criterion import ConditionVerdict, shift_powers_experiment, tent_powers_experiment
from free_dyn.free_space import FreeVector, delta, free_norm, linearize_apply, molecule
from free_dyn.maps import map_tuple, sigma, tent
from free_dyn.metric_spaces import CANTOR, CantorPoint
from free_dyn.return_sets import (
    check_disjoint_transitive,
    commutator_filter_witness,
    cylinder,
    cylinders,
    disjoint_return_set,
    filter_inclusion_check,
    nonempty_implies_infinite_check,
    open_interval,
    weakly_mixing_order_r,
)
from free_dyn.verdicts import Verdict

CRITERIA = {
    1: "gap enumeration",
    2: "shift/molecule law",
    3: "fixed vector",
    4: "matrix agreement",
    5: "free-norm oracle",
    6: "Godard isometry at finite support",
    7: "criterion experiments",
    8: "tent non-transitivity control",
    9: "filter machinery and weak mixing of order 2, 3",
    10: "non-empty return sets are not small",
    11: "operator witnesses for m in [10, 30]",
    12: "product-space oracle for order-2 weak mixing",
}

BUDGET = {1: 1, 2: 5, 3: 1, 4: 1, 5: 30, 6: 30, 7: 10, 8: 1, 9: 60, 10: 10, 11: 10, 12: 30}

TENT_FAMILY = [open_interval(Fraction(1, 4), Fraction(1, 2)), open_interval(Fraction(-1, 2), Fraction(-1, 4))]
SHIFT_TUPLE = map_tuple(sigma(1), sigma(2))


def _finish(num: int, ok: bool, started: float, detail: str = ""):
    elapsed = time.perf_counter() - started
    within = elapsed <= BUDGET[num]
    status = "PASS" if ok and within else "FAIL"
    extra = f"; {detail}" if detail else ""
    ACCEPTANCE_LINES[num] = f"{status}  {num:2d}. {CRITERIA[num]} ({elapsed:.2f}s of {BUDGET[num]}s{extra})"
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, budget {BUDGET[num]}s"


def test_01_gap_enumeration():
    t = time.perf_counter()
    third = Fraction(1, 3)
    ok = [(cf.gap(n).a, cf.gap(n).b) for n in (1, 2, 3)] == [
        (third, 2 * third), (third / 3, 2 * third / 3), (Fraction(7, 9), Fraction(8, 9))
    ]
    for i in range(1, 11):
        lengths = [cf.gap(n).d for n in range(1, 2**10) if cf.level(n) == i]
        ok &= len(lengths) == 2 ** (i - 1) and set(lengths) == {Fraction(1, 3**i)}
    _finish(1, ok, t)


def test_02_shift_molecule_law():
    t = time.perf_counter()
    s = sigma()
    bad = [
        n for n in range(2, 1001)
        if linearize_apply(s, cf.godard_phi(n)) != 3 * cf.godard_phi(n // 2)
    ]
    one = CantorPoint((), 2)
    ok = not bad and linearize_apply(s, cf.godard_phi(1)) == -3 * delta(CANTOR, one)
    _finish(2, ok, t, f"mismatches at {bad[:5]}" if bad else "")


def test_03_fixed_vector():
    t = time.perf_counter()
    ok = cf.s_sigma_apply(cf.V_STAR) == cf.V_STAR and cf.V_STAR.norm() == 3
    _finish(3, ok, t)


def test_04_matrix_agreement():
    t = time.perf_counter()
    ok = True
    for n in range(1, 65):
        col = cf.m_sigma_column(n, 64)
        image = cf.s_sigma_apply(cf.e(n))
        ok &= all(col.get(r, 0) == image.coordinate(r) for r in range(1, 65))
    _finish(4, ok, t)


def test_05_free_norm_oracle():
    t = time.perf_counter()
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(100):
        space = oracles.random_finite_space(rng, rng.randint(2, 4))
        pts = [p for p in space.points if p != space.basepoint]
        coeffs = {p: Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for p in pts}
        mismatches += free_norm(FreeVector(space, coeffs)).value != oracles.vertex_norm(space, coeffs)
    cantor_bad = 0
    for _ in range(100):
        x, y = [CantorPoint(tuple(rng.choice((0, 2)) for _ in range(rng.randint(1, 12))), rng.choice((0, 2))) for _ in range(2)]
        cantor_bad += free_norm(delta(CANTOR, x)).value != CANTOR.distance(x, CANTOR.basepoint)
        if x != y:
            cantor_bad += free_norm(molecule(CANTOR, x, y)).value != 1
    ok = mismatches == 0 and cantor_bad == 0
    _finish(5, ok, t, f"{mismatches} finite-space and {cantor_bad} Cantor mismatches" if not ok else "")


def test_06_godard_isometry():
    t = time.perf_counter()
    rng = random.Random(7)
    bad = 0
    for _ in range(50):
        idx = rng.sample(range(1, 2**7), rng.randint(1, 12))
        v = cf.L1Vector({n: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9)) for n in idx})
        bad += abs(v.norm() - free_norm(cf.phi(v)).value) != 0
    _finish(6, bad == 0, t, f"{bad} mismatches" if bad else "")


def test_07_criterion_experiments():
    t = time.perf_counter()
    shift = shift_powers_experiment((1, 2), 20)
    tent_rep = tent_powers_experiment((1, 2), 20)
    ok = all(
        r.verdict is Verdict.PASS and r.conditions["iii_diag"] is ConditionVerdict.EXACT_ZERO
        for r in (shift, tent_rep)
    )
    _finish(7, ok, t, f"shift {shift.verdict}, tent {tent_rep.verdict}")


def _tent_samples(horizon):
    return check_disjoint_transitive(map_tuple(tent(1)), TENT_FAMILY, horizon)


def test_08_tent_not_transitive():
    t = time.perf_counter()
    rep = _tent_samples(40)
    empty = {(str(s.u0), str(s.u[0])) for s in rep.failures}
    ok = rep.verdict is Verdict.FAIL and ("ivl:1/4,1/2", "ivl:-1/2,-1/4") in empty
    _finish(8, ok, t, f"{len(rep.failures)} of {rep.checked} choices never return")


FILTER_CYLINDERS = [cylinder(())] + cylinders(1) + cylinders(2)


def _filter_cases(sample_size=2000, seed=11):
    """All uniform pairs (U_i = C, V_i = D) plus a seeded sample of mixed choices."""
    cases = [([c] * 3, [d] * 3) for c, d in itertools.product(FILTER_CYLINDERS, repeat=2)]
    rng = random.Random(seed)
    for _ in range(sample_size):
        cases.append(([rng.choice(FILTER_CYLINDERS) for _ in range(3)], [rng.choice(FILTER_CYLINDERS) for _ in range(3)]))
    return cases


def test_09_filter_machinery():
    t = time.perf_counter()
    failures = 0
    cases = _filter_cases()
    for U, V in cases:
        wit = commutator_filter_witness(SHIFT_TUPLE, sigma(), U, V, 20)
        failures += filter_inclusion_check(SHIFT_TUPLE, U, V, wit.w, 20).verdict is not Verdict.PASS
    fam = cylinders(1)
    wm = [weakly_mixing_order_r(SHIFT_TUPLE, r, fam, 20).verdict for r in (2, 3)]
    ok = failures == 0 and wm == [Verdict.PASS, Verdict.PASS]
    _finish(9, ok, t, f"{len(cases)} filter cases, {failures} failed; order 2/3: {wm[0]}/{wm[1]}")


def test_10_nonempty_return_sets_are_not_small():
    t = time.perf_counter()
    samples = [s for s in _tent_samples(40).samples]
    for U, V in _filter_cases(sample_size=200):
        wit = commutator_filter_witness(SHIFT_TUPLE, sigma(), U, V, 20)
        for sets in (U, V, list(wit.w)):
            samples.append(disjoint_return_set(SHIFT_TUPLE, sets[0], sets[1:], 40))
    for r in (2, 3):
        samples += weakly_mixing_order_r(SHIFT_TUPLE, r, cylinders(1), 40).samples
    verdicts = [nonempty_implies_infinite_check(s, 3) for s in samples]
    ok = all(v is Verdict.CONSISTENT for v in verdicts)
    nonempty = sum(1 for s in samples if s.members)
    _finish(10, ok, t, f"{nonempty} non-empty samples, verdicts {sorted(set(map(str, verdicts)))}")


def test_11_operator_witnesses():
    t = time.perf_counter()
    center, radius = cf.e(2, Fraction(1, 2)), Fraction(1, 4)
    missing = [
        m for m in range(10, 31)
        if not cf.operator_return_witness((1, 2), center, radius, [(center, radius)] * 2, m).found
    ]
    _finish(11, not missing, t, f"no witness for m in {missing}" if missing else "")


@pytest.mark.parametrize("powers", [(1,), (1, 2)])
def test_12_product_oracle(powers):
    t = time.perf_counter()
    fam = cylinders(1)
    tup = map_tuple(*(sigma(p) for p in powers))
    ours = weakly_mixing_order_r(tup, 2, fam, 10).verdict is Verdict.PASS
    theirs = oracles.product_weakly_mixing(powers, fam, 10)
    prev = ACCEPTANCE_LINES.get(12, "")
    ok = ours == theirs and not prev.startswith("FAIL")
    _finish(12, ok, t, f"tuples up to {powers}: both {'PASS' if ours else 'FAIL'}" if ours == theirs else f"{powers}: ours {ours}, oracle {theirs}")
