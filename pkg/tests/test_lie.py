import random

import pytest

from conftest import random_skew_tensor
from vybe import (
    DiagonalTensor,
    LevelwiseMatrix,
    build_r_from_T,
    LieTensor,
    Q,
    affine_sl2,
    check_cybe,
    check_level_one_signs,
    check_lie_o_operator,
    check_projection_signs,
    contragredient,
    cybe_brackets,
    cybe_terms,
    extend_level_one,
    generator_state,
    heisenberg,
    level1_lie,
    level1_module,
    reduce_map,
    reduce_tensor,
    semidirect,
    sl2_lie,
    tensor_to_map,
    verify_reduction,
)
from vybe.errors import ConstructionError
from vybe.exact import matmul, matrix_inverse
from vybe.lie import (
    LieMap,
    coadjoint_module_one,
    is_quasi_primary_level,
    lie_map_from_tensor,
    semidirect_level_one_tensor,
)


def test_heisenberg_level_one_is_abelian():
    lie = level1_lie(heisenberg(N=3))
    assert lie.dim == 1
    assert all(not t for t in lie.table.values())
    assert lie.quasi_primary


def test_sl2_level_one_brackets_match_structure_constants(sl2_2):
    lie = level1_lie(sl2_2)
    data = sl2_lie()
    for i, a in enumerate(lie.basis):
        for j, b in enumerate(lie.basis):
            expected = {lie.basis[k]: c for k, c in data.bracket(i, j).items()}
            assert lie.table[(a, b)] == expected
    assert lie.check().passed


def test_level_one_module_and_dual_action(sl2_2):
    mod = level1_module(sl2_2)
    report = mod.check()
    assert report.passed, report.summary()
    assert "contragredient" in report.coverage


def test_quasi_primary_detection(heis3):
    assert is_quasi_primary_level(heis3, 1)
    assert not is_quasi_primary_level(heis3, 2)


def _sl2_tensor(lie, rows):
    return LieTensor.from_matrix(lie, rows)


E_WEDGE_H = [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]


def test_cybe_of_zero_and_abelian(heis3, rng):
    lie = level1_lie(heis3)
    assert cybe_brackets(LieTensor(lie)).is_zero()
    assert cybe_brackets(LieTensor.from_matrix(lie, [[rng.randint(-5, 5)]])).is_zero()


def test_cybe_brackets_of_e_wedge_h(sl2_2):
    # hand expansion with [e,h] = -2e:
    #   [R12,R13] = 2 e(x)h(x)e - 2 e(x)e(x)h
    #   [R12,R23] = 2 e(x)e(x)h - 2 h(x)e(x)e
    #   [R13,R23] = 2 h(x)e(x)e - 2 e(x)h(x)e
    lie = level1_lie(sl2_2)
    e, h, _ = lie.basis
    b1213, b1223, b1323 = cybe_terms(_sl2_tensor(lie, E_WEDGE_H))
    assert b1213.entries == {(e, h, e): 2, (e, e, h): -2}
    assert b1223.entries == {(e, e, h): 2, (h, e, e): -2}
    assert b1323.entries == {(h, e, e): 2, (e, h, e): -2}
    assert cybe_brackets(_sl2_tensor(lie, E_WEDGE_H)).is_zero()


def test_e_wedge_f_is_not_a_solution(sl2_2):
    lie = level1_lie(sl2_2)
    report = check_cybe(_sl2_tensor(lie, [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]))
    assert not report.passed


def _sl2_automorphism(g):
    """Matrix of X -> g X g^-1 in the basis e, h, f."""
    basis = [[[0, 1], [0, 0]], [[1, 0], [0, -1]], [[0, 0], [1, 0]]]
    ginv = matrix_inverse(g)
    cols = []
    for X in basis:
        Y = matmul(matmul(g, X), ginv)
        cols.append([Y[0][1], Y[0][0], Y[1][0]])
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def test_cybe_is_equivariant_under_automorphisms(sl2_2):
    lie = level1_lie(sl2_2)
    B = lie.basis
    rng = random.Random(11)
    for _ in range(5):
        while True:
            a, b, c = (rng.randint(-3, 3) for _ in range(3))
            if a:
                break
        # det = a * d - b * c = 1
        g = [[a, b], [c, (1 + b * c) / Q(a)]]
        phi = _sl2_automorphism(g)
        R = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                R[i][j] = rng.randint(-2, 2)
                R[j][i] = -R[i][j]
        moved = matmul(matmul(phi, R), [list(r) for r in zip(*phi)])
        before = cybe_brackets(LieTensor.from_matrix(lie, R))
        after = cybe_brackets(LieTensor.from_matrix(lie, moved))
        expected = {}
        for (k1, k2, k3), v in before.entries.items():
            i1, i2, i3 = B.index(k1), B.index(k2), B.index(k3)
            for x in range(3):
                for y in range(3):
                    for z in range(3):
                        w = phi[x][i1] * phi[y][i2] * phi[z][i3] * v
                        if w:
                            key = (B[x], B[y], B[z])
                            expected[key] = expected.get(key, 0) + w
        assert after.entries == {k: v for k, v in expected.items() if v}


def test_o_operator_trivial_cases(heis3, sl2_2):
    mod = level1_module(heis3)
    assert check_lie_o_operator(mod, LieMap(mod.lie, mod.basis, [[4]])).passed
    mod = level1_module(sl2_2)
    assert check_lie_o_operator(mod, LieMap(mod.lie, mod.basis, [[0] * 3 for _ in range(3)])).passed


def test_o_operator_from_cybe_solution(sl2_2):
    lie = level1_lie(sl2_2)
    R = _sl2_tensor(lie, E_WEDGE_H)
    assert check_lie_o_operator(coadjoint_module_one(lie), lie_map_from_tensor(R), dual=True).passed
    bad = _sl2_tensor(lie, [[0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    assert not check_lie_o_operator(coadjoint_module_one(lie), lie_map_from_tensor(bad), dual=True).passed


def test_reduce_tensor_ignores_higher_levels(heis4, rng):
    r = random_skew_tensor(heis4, [2, 3, 4], rng)
    assert reduce_tensor(r).is_zero()


def test_reduction_commutes_with_phi(sl2_2, rng):
    for _ in range(5):
        r = random_skew_tensor(sl2_2, [1, 2], rng)
        assert reduce_map(tensor_to_map(sl2_2, r)) == lie_map_from_tensor(reduce_tensor(r)).rows


def test_level_one_sign_table(sl2_2):
    U = semidirect(sl2_2, contragredient(sl2_2))
    report = check_level_one_signs(U)
    assert report.passed, report.summary()
    assert len(report.coverage) == 9


def test_projection_signs_on_random_level_one_tensors(sl2_2, rng):
    for _ in range(5):
        r = random_skew_tensor(sl2_2, [1], rng)
        assert check_projection_signs(r).passed


def test_tensor_of_map_reduces_to_skewsymmetrized_level_one_map(sl2_2, rng):
    U = semidirect(sl2_2, contragredient(sl2_2))
    T1 = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
    r = build_r_from_T(extend_level_one(sl2_2, sl2_2, T1, phi=[1]), U)
    assert reduce_tensor(r) == semidirect_level_one_tensor(U, T1)


def test_verify_reduction_for_tensor_and_map(sl2_2):
    e, h = generator_state(sl2_2, 0), generator_state(sl2_2, 1)
    r = DiagonalTensor.from_pairs(sl2_2, [(e, h, 1), (h, e, -1)])
    report = verify_reduction(sl2_2, r=r)
    assert report.passed and report.info["cybe"] and report.info["voybe"]
    U = semidirect(sl2_2, contragredient(sl2_2))
    T = extend_level_one(sl2_2, sl2_2, [[0, 0, 1], [0, 0, 0], [0, 0, 0]], phi=[2])
    report = verify_reduction(U, T=T)
    assert report.passed and report.info["strong"] and report.info["o_operator"]


def test_verify_reduction_only_for_m_zero(sl2_2):
    with pytest.raises(ConstructionError):
        verify_reduction(sl2_2, r=DiagonalTensor(sl2_2), m=1)
