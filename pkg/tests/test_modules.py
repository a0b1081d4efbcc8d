import pytest

from vybe import (
    ConstructionError,
    OutOfWindow,
    Q,
    affine_sl2,
    contragredient,
    fock_module,
    generator_state,
    heisenberg,
    intertwiner_WpW_Vp,
    intertwiner_WWp_Vp,
    mode_action,
    parse_module_descriptor,
    semidirect,
    verify_module_axioms,
    verify_voa_axioms,
    virasoro_mode,
)
from vybe.modules import skew_mode_action


@pytest.mark.parametrize("lam", [1, Q("1/2"), -3])
def test_fock_top_weight_and_zero_mode(lam):
    V = heisenberg(N=3)
    W = fock_module(V, lam)
    a = generator_state(V, 0)
    top = W.top
    assert mode_action(V, a, 0, top) == top * lam
    assert virasoro_mode(V, 0, top) == top * (Q(lam) ** 2 / 2)
    assert W.conformal_weight == Q(lam) ** 2 / 2


def test_fock_module_axioms():
    V = heisenberg(N=3)
    report = verify_module_axioms(fock_module(V, Q("2/3")))
    assert report.passed, report.summary()


def test_fock_needs_abelian_parent():
    with pytest.raises(ConstructionError):
        fock_module(affine_sl2(N=1), 1)


def test_contragredient_generator_pairing():
    V = heisenberg(N=3)
    Vd = contragredient(V)
    a = generator_state(V, 0)
    a_star = Vd.basis_vector(("*", a.sorted_terms()[0][0]))
    vac_star = Vd.basis_vector(("*", V.vacuum_key))
    # a is quasi-primary of weight 1, so its contragredient modes are a'_n = -a_{-n}
    assert mode_action(V, a, 1, a_star) == -vac_star
    assert mode_action(V, a, -1, vac_star) == -a_star


@pytest.mark.parametrize("make", [lambda: heisenberg(N=3), lambda: affine_sl2(N=2)])
def test_contragredient_module_axioms(make):
    report = verify_module_axioms(contragredient(make()))
    assert report.passed, report.summary()


def test_contragredient_rejects_non_integral_weight():
    with pytest.raises(ConstructionError):
        contragredient(fock_module(heisenberg(N=2), 1))


def test_semidirect_product_axioms():
    V = heisenberg(N=3)
    U = semidirect(V, contragredient(V))
    report = verify_voa_axioms(U)
    assert report.passed, report.summary()
    assert U.dims == [2, 2, 4, 6]


def test_semidirect_needs_weight_zero():
    V = heisenberg(N=2)
    with pytest.raises(ConstructionError):
        semidirect(V, fock_module(V, 1))


def test_semidirect_products_of_module_part_vanish():
    V = heisenberg(N=3)
    U = semidirect(V, contragredient(V))
    Ms = [k for k in U.basis(1) if k[0] == "M"] + [k for k in U.basis(0) if k[0] == "M"]
    for x in Ms:
        for y in Ms:
            for m in range(-1, 2):
                assert U.mode_basis(x, m, y) == {}


def test_skew_action_matches_module_mode_in_adjoint():
    # in the adjoint module the skew action is the ordinary product u_m a
    V = heisenberg(N=4)
    a, b = generator_state(V, 0), generator_state(V, 0, -2)
    for m in range(-1, 3):
        assert skew_mode_action(V, a, m, b) == mode_action(V, a, m, b)


def test_intertwiner_derivative_property():
    # (L(-1) u)[m] f = -m u[m-1] f
    V = heisenberg(N=4)
    Vd = contragredient(V)
    u = generator_state(V, 0)
    Lu = virasoro_mode(V, -1, u)
    for f_key in [k for n in range(3) for k in Vd.basis(n)]:
        f = Vd.basis_vector(f_key)
        for m in range(-1, 3):
            try:
                lhs = intertwiner_WWp_Vp(Lu, m, f)
                rhs = intertwiner_WWp_Vp(u, m - 1, f) * (-m)
            except OutOfWindow:
                continue
            assert lhs == rhs


def test_flip_intertwiner_lands_in_dual_of_algebra():
    V = affine_sl2(N=2)
    Vd = contragredient(V)
    f = Vd.basis_vector(("*", V.basis(1)[0]))
    u = generator_state(V, 2)
    out = intertwiner_WpW_Vp(f, 0, u)
    assert out.space.tag == Vd.tag


def test_module_descriptors():
    V = heisenberg(N=2)
    assert parse_module_descriptor(V, "adjoint") is V
    assert parse_module_descriptor(V, "coadjoint").tag == contragredient(V).tag
    assert parse_module_descriptor(V, "fock:1/2").highest_weight == (Q("1/2"),)
    with pytest.raises(ValueError):
        parse_module_descriptor(V, "twisted")
