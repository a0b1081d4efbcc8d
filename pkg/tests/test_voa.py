import pytest

from vybe import (
    ConstructionError,
    LieAlgebraData,
    LieAlgebraError,
    OutOfWindow,
    Q,
    affine_sl2,
    build_current_voa,
    generator_state,
    heisenberg,
    mode_action,
    primed_mode,
    primed_op_mode,
    sl2_lie,
    state,
    verify_voa_axioms,
    virasoro_mode,
)
from vybe.voa import (
    m_dot,
    primed_op_terms,
    primed_terms,
    residue_primed_op_terms,
    residue_primed_terms,
)


def test_heisenberg_level_dimensions():
    assert heisenberg(N=6).dims == [1, 1, 2, 3, 5, 7, 11]


def test_heisenberg_generator_modes():
    V = heisenberg(N=4)
    a = generator_state(V, 0)
    assert mode_action(V, a, 1, a) == V.vacuum
    assert mode_action(V, a, 0, a).is_zero()
    assert mode_action(V, a, -1, a) == state(V, (0, -1), (0, -1))


def test_heisenberg_virasoro_on_low_states():
    V = heisenberg(N=4)
    a1, a2 = generator_state(V, 0, -1), generator_state(V, 0, -2)
    assert virasoro_mode(V, -1, a1) == a2
    assert virasoro_mode(V, 1, a2) == a1 * 2
    assert virasoro_mode(V, 0, a2) == a2 * 2
    assert V.central_charge == 1


def test_sl2_level_one_brackets_and_form():
    V = affine_sl2(k=1, N=3)
    e, h, f = (generator_state(V, i) for i in range(3))
    assert mode_action(V, e, 0, f) == h
    assert mode_action(V, e, 1, f) == V.vacuum
    assert mode_action(V, h, 1, h) == V.vacuum * 2
    assert mode_action(V, h, 0, e) == e * 2
    assert V.central_charge == 1
    assert V.lie.h_dual == 2


def test_sl2_central_charge_at_other_levels():
    # c = 3k / (k + 2)
    assert affine_sl2(k=2, N=1).central_charge == Q("3/2")
    assert affine_sl2(k=Q("1/2"), N=1).central_charge == Q("3/5")


def test_critical_level_is_rejected():
    with pytest.raises(ConstructionError):
        build_current_voa(sl2_lie(), -2, 2)


def test_lie_data_validation():
    with pytest.raises(LieAlgebraError):
        LieAlgebraData(3, [(1, 0, 0, 2), (1, 2, 2, -2), (0, 2, 1, 3)], [[0, 0, 1], [0, 2, 0], [1, 0, 0]])
    with pytest.raises(LieAlgebraError):
        LieAlgebraData(3, [(1, 0, 0, 2), (1, 2, 2, -2), (0, 2, 1, 1)], [[0, 0, 1], [0, 2, 0], [1, 0, 0]], h_dual=3)
    with pytest.raises(ConstructionError):
        LieAlgebraData(1, [], [[0]])


def test_mode_above_window_raises():
    V = heisenberg(N=2)
    a = generator_state(V, 0)
    with pytest.raises(OutOfWindow):
        mode_action(V, generator_state(V, 0, -2), -2, a)


@pytest.mark.parametrize("make", [lambda: heisenberg(N=4), lambda: affine_sl2(N=2)])
def test_primed_closed_forms_match_residue_expansion(make):
    V = make()
    keys = [k for n in range(V.max_degree + 1) for k in V.basis(n)]
    checked = 0
    for a in keys:
        for b in keys:
            for m in range(-2, 3):
                try:
                    closed = primed_terms(V, {a: 1}, m, {b: 1})
                    residue = residue_primed_terms(V, {a: 1}, m, {b: 1})
                    closed_op = primed_op_terms(V, {a: 1}, m, {b: 1})
                    residue_op = residue_primed_op_terms(V, {a: 1}, m, {b: 1})
                except OutOfWindow:
                    continue
                assert closed == residue
                assert closed_op == residue_op
                checked += 1
    assert checked > 50


def test_m_dot_kinds_dispatch():
    V = affine_sl2(N=2)
    e, f = generator_state(V, 0), generator_state(V, 2)
    assert m_dot(V, "plain", e, 0, f) == mode_action(V, f, 0, e)
    assert m_dot(V, "primed", e, 0, f) == primed_mode(V, e, 0, f)
    assert m_dot(V, "primed_op", e, 0, f) == primed_op_mode(V, f, 0, e)


def test_level_one_primed_signs_on_sl2():
    V = affine_sl2(N=2)
    e, f, h = generator_state(V, 0), generator_state(V, 2), generator_state(V, 1)
    assert primed_mode(V, e, 0, f) == -h
    assert primed_op_mode(V, e, 0, f) == h


def test_small_axiom_suite_passes():
    report = verify_voa_axioms(heisenberg(N=3))
    assert report.passed, report.summary()
    assert "virasoro" in report.coverage
