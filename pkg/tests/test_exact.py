import gmpy2
import pytest
from hypothesis import given, strategies as st

from vybe import CarrierMismatch, LevelwiseMatrix, OutOfWindow, PBWMonomial, Q, heisenberg, linear_combine
from vybe.exact import add_into, binom, format_rational, inv_factorial, matmul, matrix_inverse, matrix_rank


def test_rational_parsing():
    assert Q("-3/2") == gmpy2.mpq(-3, 2)
    assert Q(4) == 4
    assert format_rational(Q("6/4")) == "3/2"
    assert format_rational(Q(-5)) == "-5"


@pytest.mark.parametrize("bad", [0.5, True, None])
def test_rational_rejects_inexact(bad):
    with pytest.raises(TypeError):
        Q(bad)


def test_binomial_with_negative_top():
    # C(-1, k) = (-1)^k and C(-2, 3) = -4
    assert [binom(-1, k) for k in range(4)] == [1, -1, 1, -1]
    assert binom(-2, 3) == -4
    assert binom(5, 2) == 10
    assert inv_factorial(4) == Q("1/24")


def test_add_into_drops_cancelled_terms():
    acc = {"a": Q(1), "b": Q(2)}
    add_into(acc, {"a": Q(1)}, Q(-1))
    assert acc == {"b": 2}


def test_pbw_monomial_order_is_enforced():
    assert PBWMonomial(((0, -1), (0, -2))).weight == 3
    with pytest.raises(ValueError):
        PBWMonomial(((0, -2), (0, -1)))
    with pytest.raises(ValueError):
        PBWMonomial(((0, 0),))


def test_vector_arithmetic_and_equality():
    V = heisenberg(N=3)
    a = V.basis_vector(V.basis(1)[0])
    b = V.basis_vector(V.basis(2)[1])
    v = a * 2 + b - a
    assert v == a + b
    assert (v - v).is_zero()
    assert v.levels() == [1, 2]
    assert v.component(2) == b
    assert linear_combine([1, -1], [a, a]).is_zero()


def test_vectors_from_different_spaces_do_not_mix():
    V, W = heisenberg(N=3), heisenberg(N=2)
    with pytest.raises(CarrierMismatch):
        V.basis_vector(V.basis(0)[0]) + W.basis_vector(W.basis(0)[0])


def test_basis_above_window_raises():
    V = heisenberg(N=2)
    with pytest.raises(OutOfWindow):
        V.basis(3)
    assert V.basis(-1) == ()


def test_levelwise_matrix_shape_and_application():
    V = heisenberg(N=3)
    with pytest.raises(ValueError):
        LevelwiseMatrix(V, V, {2: [[1]]})
    T = LevelwiseMatrix(V, V, {2: [[1, 2], [3, 4]]})
    x, y = V.basis(2)
    assert T(V.basis_vector(y)) == V.vector({x: 2, y: 4})
    assert T.block(1) == ((0,),)


def test_dense_helpers():
    A = [[1, 2], [3, 4]]
    inv = matrix_inverse(A)
    assert matmul(A, inv) == [[1, 0], [0, 1]]
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    with pytest.raises(ValueError):
        matrix_inverse([[1, 2], [2, 4]])


@given(st.integers(-50, 50), st.integers(1, 50), st.integers(-50, 50), st.integers(1, 50))
def test_rational_round_trip(p, q, r, s):
    x = Q(f"{p}/{q}") + Q(f"{r}/{s}")
    assert Q(format_rational(x)) == x
