from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from free_dyn import cantor_free as cf
from free_dyn.errors import BadIndex, BadRadius
from free_dyn.free_space import delta, free_norm, line_norm, linearize_apply
from free_dyn.maps import apply, sigma
from free_dyn.metric_spaces import CANTOR, CantorPoint

F = Fraction

sparse_vec = st.dictionaries(
    st.integers(1, 2**7 - 1), st.fractions(min_value=-9, max_value=9, max_denominator=9), max_size=8
).map(cf.L1Vector)
any_vec = st.builds(lambda v, s: v + s * cf.V_STAR, sparse_vec, st.fractions(min_value=-3, max_value=3, max_denominator=4))
cantor_pt = st.builds(
    lambda p, t: CantorPoint(tuple(p), t), st.lists(st.sampled_from((0, 2)), max_size=10), st.sampled_from((0, 2))
)


# -- gaps ----------------------------------------------------------------------

def test_gap_examples():
    assert (cf.gap(1).a, cf.gap(1).b) == (F(1, 3), F(2, 3))
    assert (cf.gap(2).a, cf.gap(2).b) == (F(1, 9), F(2, 9))
    assert (cf.gap(3).a, cf.gap(3).b) == (F(7, 9), F(8, 9))
    assert cf.gap(5).d == F(1, 27) and cf.level(5) == 3
    for bad in (0, -3):
        with pytest.raises(BadIndex):
            cf.gap(bad)
    with pytest.raises(BadIndex):
        cf.shift_action_on_gaps(1)


def test_gaps_match_digit_formula():
    for n in range(1, 2**10):
        g = cf.gap(n)
        assert (g.a, g.b) == oracles.gap_endpoints(n)
        assert g.left.value == g.a and g.right.value == g.b
        assert g.d == cf.gap_length(n)


def test_shift_acts_as_parent_on_gaps():
    s = sigma()
    for n in range(2, 2**10):
        m = cf.shift_action_on_gaps(n)
        assert apply(s, cf.gap(n).left) == cf.gap(m).left
        assert apply(s, cf.gap(n).right) == cf.gap(m).right


@pytest.mark.parametrize("L", range(1, 11))
def test_length_law(L):
    total = sum(cf.gap(n).d for n in range(1, 2**L))
    assert total == 1 - F(2, 3) ** L
    assert sum(abs(cf.v_star_coordinate(n)) for n in range(1, 2**L)) == 3 * total


def test_gaps_are_disjoint_and_avoid_the_cantor_set():
    gs = sorted((cf.gap(n) for n in range(1, 2**8)), key=lambda g: g.a)
    assert all(x.b < y.a for x, y in zip(gs, gs[1:]))


# -- l1 vectors ------------------------------------------------------------------

def test_l1_examples():
    assert cf.V_STAR.norm() == 3
    assert (cf.e(1) + cf.V_STAR).norm() == 2
    assert cf.e(4, F(-1, 2)).norm() == F(1, 2)
    assert cf.V_STAR.coordinate(2) == F(-1, 3)
    with pytest.raises(BadIndex):
        cf.L1Vector({0: 1})
    with pytest.raises(AttributeError):
        cf.V_STAR.star = 0


@given(any_vec)
def test_l1_json_round_trip(v):
    assert cf.L1Vector.from_json(v.to_json()) == v


@given(any_vec, any_vec)
def test_l1_norm_is_a_norm(u, v):
    assert (u + v).norm() <= u.norm() + v.norm()
    assert (-2 * u).norm() == 2 * u.norm()
    assert (u - u).norm() == 0


@given(any_vec)
def test_l1_norm_agrees_with_coordinates(v):
    """Explicit partial sums plus the closed-form remainder of the star tail."""
    L = max(v.max_level, 1) + 4
    head = sum(abs(v.coordinate(n)) for n in range(1, 2**L))
    tail = abs(v.star) * 3 * F(2, 3) ** L
    assert v.norm() == head + tail


# -- delta expansion and the isometry ----------------------------------------------

def test_delta_expansion_examples():
    v, tail = cf.delta_expansion(CantorPoint((2,)), 4)
    assert v.coordinate(1) == F(1, 3)
    assert tail == F(2, 3) - sum(v.sparse.values())
    zero, rest = cf.delta_expansion(CANTOR.basepoint, 6)
    assert zero == cf.L1Vector() and rest == 0


@given(cantor_pt, st.integers(1, 8))
def test_delta_expansion_consistency(t, L):
    v, tail = cf.delta_expansion(t, L)
    kept = {n: cf.gap(n).d for n in range(1, 2**L) if cf.gap(n).b <= t.value}
    assert v == cf.L1Vector(kept)
    assert 0 <= tail <= F(2, 3) ** L
    assert line_norm(delta(CANTOR, t) - cf.phi(v)).value == tail
    assert v.norm() + tail == t.value


def test_godard_phi_examples():
    m = cf.godard_phi(1)
    assert m.coefficient(CantorPoint((2,))) == 3
    assert m.coefficient(CantorPoint((0,), 2)) == -3
    assert free_norm(cf.phi(cf.V_STAR)).value == 3


@given(any_vec)
def test_phi_is_isometric(v):
    assert free_norm(cf.phi(v)).value == v.norm()


@given(sparse_vec)
def test_phi_conjugates_shift_exactly(v):
    assert cf.phi(cf.s_sigma_apply(v)) == linearize_apply(sigma(), cf.phi(v))


# -- the operator S ----------------------------------------------------------------

def test_s_sigma_examples():
    assert cf.s_sigma_apply(cf.e(5)) == cf.e(2, 3)
    assert cf.s_sigma_apply(cf.e(1)) == cf.V_STAR
    assert cf.s_sigma_apply(cf.V_STAR) == cf.V_STAR
    assert cf.s_sigma_power(cf.e(5), 3) == 9 * cf.V_STAR


@given(any_vec, st.integers(0, 12))
def test_power_closed_form(v, k):
    it = v
    for _ in range(k):
        it = cf.s_sigma_apply(it)
    assert cf.s_sigma_power(v, k) == it


@given(sparse_vec, st.integers(0, 10))
def test_forward_lift_is_a_right_inverse(v, k):
    lifted = cf.w_lift_power(v, k)
    assert cf.s_sigma_power(lifted, k) == v
    assert lifted.norm() == v.norm() / 3**k


def test_forward_lift_rejects_star():
    with pytest.raises(ValueError):
        cf.w_lift_power(cf.V_STAR, 1)


def test_matrix_columns():
    assert cf.m_sigma_column(5, 8) == {2: 3}
    assert cf.m_sigma_column(9, 3) == {}
    col = cf.m_sigma_column(1, 4)
    assert col == {1: -1, 2: F(-1, 3), 3: F(-1, 3), 4: F(-1, 9)}
    with pytest.raises(BadIndex):
        cf.m_sigma_column(0, 4)


@given(sparse_vec)
def test_matrix_acts_like_s(v):
    image = cf.s_sigma_apply(v)
    for r in range(1, 65):
        row = sum(cf.m_sigma_column(n, 64).get(r, 0) * c for n, c in v.sparse.items())
        assert row == image.coordinate(r)


# -- conjugacy residual --------------------------------------------------------------

def test_conjugacy_examples():
    r = cf.conjugacy_residual(cf.e(5), 3)
    assert r.residual == 0 and r.tail_bound == 0
    r = cf.conjugacy_residual(cf.e(1), 6)
    assert r.residual <= 3 * F(2, 3) ** 6
    assert r.residual == r.tail_bound
    assert cf.conjugacy_residual(cf.L1Vector(), 4).residual == 0
    with pytest.raises(ValueError):
        cf.conjugacy_residual(cf.e(64), 4)


@given(sparse_vec)
def test_conjugacy_residual_within_tail(v):
    r = cf.conjugacy_residual(v, 7)
    assert r.residual <= r.tail_bound


# -- return witnesses -----------------------------------------------------------------

@given(sparse_vec, st.integers(1, 6))
def test_eventually_null(v, extra):
    lvl = v.max_level + extra
    u = cf.eventually_null(v, lvl)
    assert cf.s_sigma_power(u, lvl) == cf.L1Vector()
    assert (u - v).norm() == abs(cf._annihilator(v)) / 3 ** (lvl - 1)


def test_witness_examples():
    center, radius = cf.e(2, F(1, 2)), F(1, 4)
    res = cf.operator_return_witness((1, 2), center, radius, [(center, radius)] * 2, 12)
    assert res.found and res.m == 12
    assert res.u0_distance < radius and all(d < radius for d in res.target_distances)
    assert not cf.operator_return_witness((1, 2), center, radius, [(center, radius)] * 2, 0).found
    with pytest.raises(BadRadius):
        cf.operator_return_witness((1,), center, 0, [(center, radius)], 3)
    with pytest.raises(BadRadius):
        cf.operator_return_witness((1, 2), center, radius, [(center, radius)], 3)


@pytest.mark.parametrize("m", range(5, 16))
def test_single_power_sweep(m):
    # the corrected centres live at level 5, so S^m kills them from m = 5 on
    res = cf.operator_return_witness((1,), cf.e(3), F(1, 2), [(cf.e(2, -1), F(1, 2))], m)
    assert res.found


@pytest.mark.parametrize("powers", [(1,), (1, 2), (2, 3), (1, 2, 3)])
@pytest.mark.parametrize("m", [7, 9, 14])
def test_witness_soundness(powers, m):
    """Distances recomputed by applying S one step at a time."""
    u0 = cf.e(3, F(1, 3)) + cf.e(6)
    targets = [(cf.e(k + 1, F(1, 2)), F(1, 5)) for k in range(len(powers))]
    res = cf.operator_return_witness(powers, u0, F(1, 5), targets, m)
    assert res.found
    assert (res.z - u0).norm() < F(1, 5)
    for p, (t, r) in zip(powers, targets):
        it = res.z
        for _ in range(p * m):
            it = cf.s_sigma_apply(it)
        assert (it - t).norm() < r
