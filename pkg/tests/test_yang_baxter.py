import random

import pytest

from conftest import random_skew_tensor
from vybe import (
    CarrierMismatch,
    ConstructionError,
    DiagonalTensor,
    LevelwiseMatrix,
    NotSkewsymmetric,
    Q,
    affine_sl2,
    build_r_from_T,
    check_blocks_against_strong_axioms,
    check_form_transport,
    check_relative_rbo,
    check_strong_rbo,
    check_tensor_operator_identity,
    check_voybe,
    contragredient,
    fock_module,
    form_transport,
    generator_state,
    heisenberg,
    map_to_tensor,
    semidirect,
    skewsymmetrize,
    state,
    tensor_to_map,
    triple_products,
    voybe_residual,
)
from vybe.exact import add_into, matrix_inverse
from vybe.voa import residue_primed_op_terms, residue_primed_terms
from vybe.yang_baxter import (
    check_invariant_form,
    coadjoint_map,
    is_skewsymmetric_map,
    residual_blocks,
    standard_form,
    voybe_coverage,
)


# ---------------------------------------------------------------------------
# diagonal tensors


def test_sigma_is_an_involution(heis4, rng):
    for _ in range(5):
        g = DiagonalTensor.from_matrices(
            heis4, {t: [[rng.randint(-3, 3) for _ in range(heis4.dim(t))] for _ in range(heis4.dim(t))] for t in (2, 3)}
        )
        assert g.sigma().sigma() == g
        assert skewsymmetrize(g).is_skewsymmetric()


def test_tensor_rejects_mixed_levels(heis4):
    a = generator_state(heis4, 0)
    with pytest.raises(ValueError):
        DiagonalTensor.from_pairs(heis4, [(a, heis4.vacuum, 1)])


def test_zero_tensor_has_zero_products(heis4):
    zero = DiagonalTensor(heis4)
    for part in triple_products(heis4, zero, 0, 1, 2):
        assert part.is_zero()
    assert check_voybe(heis4, zero, 0).passed


def test_products_are_quadratic(sl2_2, rng):
    r = random_skew_tensor(sl2_2, [1, 2], rng)
    for m in (-1, 0, 1):
        for s, t in voybe_coverage(sl2_2, m):
            single = triple_products(sl2_2, r, m, s, t)
            double = triple_products(sl2_2, r * 2, m, s, t)
            for x, y in zip(single, double):
                assert y == x.scaled(4)


def test_non_skewsymmetric_tensor_is_rejected(heis4):
    v = generator_state(heis4, 0)
    r = DiagonalTensor.from_pairs(heis4, [(v, v, 1)])
    with pytest.raises(NotSkewsymmetric):
        check_voybe(heis4, r, 0)
    with pytest.raises(NotSkewsymmetric):
        tensor_to_map(heis4, r)


def test_coverage_is_exactly_the_window(heis4):
    for m in (-2, 0, 3):
        expected = {(s, t) for s in range(5) for t in range(5) if 0 <= s + t - m - 1 <= 4}
        assert set(voybe_residual(heis4, DiagonalTensor(heis4), m)) == expected


# ---------------------------------------------------------------------------
# independent expansion of the residual


def _outer(acc, x, y, z, c):
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            for k3, c3 in z.items():
                add_into(acc, {(k1, k2, k3): c * c1 * c2 * c3})


def brute_force_residual(U, pairs, m, s, t):
    """``alpha_{s,t}`` from a list ``(level, left, right, coeff)`` with residue-form primed products."""
    u = s + t - m - 1
    at = lambda lvl: [(a.terms, b.terms, c) for (n, a, b, c) in pairs if n == lvl]
    out = {}
    for ai, bi, ci in at(s):
        for aj, bj, cj in at(t):
            _outer(out, U.mode_terms(aj, m, ai), bi, bj, ci * cj)
    for ai, bi, ci in at(t):
        for aj, bj, cj in at(u):
            _outer(out, aj, residue_primed_terms(U, ai, m, bj), bi, -ci * cj)
    for ai, bi, ci in at(u):
        for aj, bj, cj in at(s):
            _outer(out, ai, aj, residue_primed_op_terms(U, bj, m, bi), ci * cj)
    return out


def test_residual_matches_brute_force_expansion():
    U = heisenberg(N=4)
    rng = random.Random(7)
    nonzero = 0
    for _ in range(4):
        v = U.vector({k: rng.randint(-2, 2) for k in U.basis(2)})
        w = U.vector({k: rng.randint(-2, 2) for k in U.basis(2)})
        x = U.vector({k: rng.randint(-2, 2) for k in U.basis(3)})
        y = U.vector({k: rng.randint(-2, 2) for k in U.basis(3)})
        pairs = [(2, v, w, 1), (2, w, v, -1), (3, x, y, 2), (3, y, x, -2)]
        r = DiagonalTensor.from_pairs(U, [(a, b, c) for _, a, b, c in pairs])
        for m in (-1, 0, 1, 2):
            res = voybe_residual(U, r, m)
            for (s, t), alpha in res.items():
                assert alpha.entries == brute_force_residual(U, pairs, m, s, t)
            nonzero += sum(1 for a in res.values() if not a.is_zero())
    assert nonzero > 0


def test_level_two_skewsymmetrization_is_generically_not_a_solution():
    U = heisenberg(N=4)
    v = state(U, (0, -1), (0, -1))
    w = generator_state(U, 0, -2)
    r = skewsymmetrize(DiagonalTensor.from_pairs(U, [(v, w, 1)]))
    assert not check_voybe(U, r, 0).passed


# ---------------------------------------------------------------------------
# tensors and maps


def test_phi_of_rank_two_tensor(sl2_2):
    U = sl2_2
    e, h = generator_state(U, 0), generator_state(U, 1)
    r = DiagonalTensor.from_pairs(U, [(e, h, 1), (h, e, -1)])
    T = tensor_to_map(U, r)
    Ud = contragredient(U)
    for key in U.basis(1):
        f = Ud.basis_vector(("*", key))
        expected = e * h.terms.get(key, 0) - h * e.terms.get(key, 0)
        assert T(f) == expected
    assert is_skewsymmetric_map(T)


def test_phi_psi_round_trip(heis3, rng):
    for _ in range(10):
        r = random_skew_tensor(heis3, range(4), rng)
        T = tensor_to_map(heis3, r)
        assert map_to_tensor(heis3, T) == r
        assert tensor_to_map(heis3, map_to_tensor(heis3, T)) == T


def test_psi_rejects_non_skew_maps(heis3):
    Ud = contragredient(heis3)
    T = LevelwiseMatrix(Ud, heis3, {1: [[1]]})
    with pytest.raises(NotSkewsymmetric):
        map_to_tensor(heis3, T)


@pytest.mark.parametrize("m", [-1, 0, 1, 2])
def test_tensor_operator_identity(heis4, rng, m):
    for _ in range(3):
        r = random_skew_tensor(heis4, rng.sample(range(5), 2), rng)
        report = check_tensor_operator_identity(heis4, r, m)
        assert report.passed, report.summary()


def test_tensor_operator_identity_on_sl2(sl2_2, rng):
    r = random_skew_tensor(sl2_2, [1, 2], rng)
    for m in (-1, 0, 1):
        assert check_tensor_operator_identity(sl2_2, r, m).passed


# ---------------------------------------------------------------------------
# relative Rota-Baxter operators


def test_lie_rbo_extension_on_heisenberg(fixtures_dir):
    V = heisenberg(N=5)
    for mu, P in [(0, 1), (3, Q("-2/5")), (-1, 7)]:
        T = LevelwiseMatrix(V, V, {0: [[mu]], 1: [[P]]})
        assert check_relative_rbo(V, V, T, 0).passed


def test_level_two_one_rbo_and_perturbation():
    V = heisenberg(N=5)
    T = LevelwiseMatrix(V, V, {2: [[1, -1], [1, -1]]})
    assert check_relative_rbo(V, V, T, 1).passed
    bad = LevelwiseMatrix(V, V, {2: [[1, -1], [1, 0]]})
    report = check_relative_rbo(V, V, bad, 1)
    assert not report.passed
    assert report.first_failure().witness["lhs"] != report.first_failure().witness["rhs"]


@pytest.mark.parametrize("lam", [1, 2, Q("1/2")])
def test_degree_minus_one_fock_map(lam):
    V = heisenberg(N=4)
    W = fock_module(V, lam)
    T = LevelwiseMatrix(W, V, {1: [[1]]}, -1)
    assert check_relative_rbo(V, W, T, 0).passed


def test_identity_map_is_not_a_one_rbo():
    V = heisenberg(N=4)
    T = LevelwiseMatrix(V, V, {n: [[int(i == j) for j in range(V.dim(n))] for i in range(V.dim(n))] for n in range(5)})
    report = check_relative_rbo(V, V, T, 1)
    witnesses = [f.witness for f in report.failures if f.instance[:4] == (1, 0, 1, 0)]
    assert witnesses == [
        {
            "u": "alpha(-1)|0>",
            "v": "alpha(-1)|0>",
            "lhs": repr(V.vacuum),
            "rhs": repr(V.vacuum * 2),
        }
    ]


def test_rbo_checks_carriers(heis3):
    W = fock_module(heis3, 1)
    T = LevelwiseMatrix(W, heis3, {1: [[1]]}, -1)
    with pytest.raises(CarrierMismatch):
        check_relative_rbo(heis3, heis3, T, 0)


def test_coadjoint_map_is_the_transpose(heis3):
    T = LevelwiseMatrix(heis3, heis3, {2: [[1, 2], [3, 4]]})
    Ts = coadjoint_map(heis3, heis3, T)
    assert Ts.block(2) == ((1, 3), (2, 4))


def test_strong_rbo_from_lie_extension(heis4):
    T = LevelwiseMatrix(heis4, heis4, {0: [[2]], 1: [[5]]})
    report = check_strong_rbo(heis4, heis4, T, 0)
    assert report.passed, report.summary()
    assert {"rbo", "coadjoint_mode", "coadjoint_skew"} <= set(report.coverage)


def test_strong_rbo_fails_at_rbo_stage_for_identity(heis3):
    T = LevelwiseMatrix(heis3, heis3, {n: [[int(i == j) for j in range(heis3.dim(n))] for i in range(heis3.dim(n))] for n in range(4)})
    report = check_strong_rbo(heis3, heis3, T, 1)
    assert "rbo" in report.failed_components()


def test_strong_rbo_needs_weight_zero_module(heis3):
    W = fock_module(heis3, 1)
    T = LevelwiseMatrix(W, heis3, {}, 0)
    with pytest.raises(ConstructionError):
        check_strong_rbo(heis3, W, T, 0)


def test_skewsymmetric_rbo_on_dual_is_strong():
    V = heisenberg(N=3)
    U = semidirect(V, contragredient(V))
    r = build_r_from_T(LevelwiseMatrix(V, V, {0: [[2]], 1: [[5]]}), U)
    T = tensor_to_map(U, r)
    assert check_relative_rbo(U, contragredient(U), T, 0).passed
    assert check_strong_rbo(U, contragredient(U), T, 0).passed


def test_solution_embeds_into_semidirect_with_double_dual(sl2_2):
    e, h = generator_state(sl2_2, 0), generator_state(sl2_2, 1)
    r = DiagonalTensor.from_pairs(sl2_2, [(e, h, 1), (h, e, -1)])
    assert check_voybe(sl2_2, r, 0).passed
    T = tensor_to_map(sl2_2, r)
    U = semidirect(sl2_2, contragredient(contragredient(sl2_2)))
    assert check_voybe(U, build_r_from_T(T, U), 0).passed


# ---------------------------------------------------------------------------
# tensors built from maps


def test_build_r_of_zero_and_rank_one(heis3):
    U = semidirect(heis3, contragredient(heis3))
    assert build_r_from_T(LevelwiseMatrix(heis3, heis3, {}), U).is_zero()
    T = LevelwiseMatrix(heis3, heis3, {1: [[3]]})
    r = build_r_from_T(T, U)
    a = heis3.basis(1)[0]
    assert r.levels == {1: {(("V", a), ("M", ("*", a))): 3, (("M", ("*", a)), ("V", a)): -3}}
    with pytest.raises(ConstructionError):
        build_r_from_T(LevelwiseMatrix(fock_module(heis3, 1), heis3, {1: [[1]]}, -1), U)


def test_build_r_is_basis_independent(sl2_2, rng):
    V = sl2_2
    U = semidirect(V, contragredient(V))
    T = LevelwiseMatrix(V, V, {1: [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]})
    r = build_r_from_T(T, U)
    # new basis b_i = sum P[i][j] v_j with dual basis b_i* = sum Pinv[j][i] v_j*
    while True:
        P = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        try:
            Pinv = matrix_inverse(P)
            break
        except ValueError:
            continue
    basis = V.basis(1)
    pairs = []
    for i in range(3):
        b = V.vector({basis[j]: P[i][j] for j in range(3)})
        b_star = U.vector({("M", ("*", basis[j])): Pinv[j][i] for j in range(3)})
        Tb = U.embed(T(b))
        pairs += [(Tb, b_star, 1), (b_star, Tb, -1)]
    assert DiagonalTensor.from_pairs(U, pairs) == r


def test_residual_blocks_follow_the_strong_axioms(heis3, rng):
    U = semidirect(heis3, contragredient(heis3))
    for _ in range(3):
        T = LevelwiseMatrix(heis3, heis3, {n: [[rng.randint(-1, 1) for _ in range(heis3.dim(n))] for _ in range(heis3.dim(n))] for n in range(4)})
        for m in (-1, 0, 1):
            report = check_blocks_against_strong_axioms(T, U, m)
            assert report.passed, report.summary()


def test_residual_blocks_split_by_slot_type(heis3):
    U = semidirect(heis3, contragredient(heis3))
    T = LevelwiseMatrix(heis3, heis3, {2: [[1, 0], [0, 1]]})
    r = build_r_from_T(T, U)
    for alpha in voybe_residual(U, r, 0).values():
        blocks = residual_blocks(alpha)
        assert blocks["other"].is_zero()
        total = blocks["A"] + blocks["B"] + blocks["C"]
        assert total == alpha


# ---------------------------------------------------------------------------
# invariant forms


def test_standard_form_on_heisenberg(heis3):
    form = standard_form(heis3)
    assert form.grams[0] == [[1]]
    assert form.grams[1] == [[-1]]
    assert check_invariant_form(form).passed


def test_transport_of_zero_tensor(heis3):
    Tt = form_transport(heis3, DiagonalTensor(heis3))
    assert Tt.blocks == {}


def test_degenerate_form_is_rejected():
    V = affine_sl2(k=1, N=2)
    assert not check_invariant_form(standard_form(V)).passed
    with pytest.raises(ConstructionError):
        form_transport(V, DiagonalTensor(V))


def test_transport_biconditional(heis3, rng):
    for _ in range(4):
        r = random_skew_tensor(heis3, rng.sample(range(4), 2), rng)
        for m in (-1, 0, 1, 2):
            report = check_form_transport(heis3, r, m)
            assert report.passed, report.info
