import random

import pytest

from monodyn.errors import ParseError, ShapeError
from monodyn.matrix import (
    IntMatrix,
    charpoly,
    det,
    kron,
    mat_vec_mul,
    parse_matrix,
    serialize_matrix,
    vec_mat_mul,
)


def rand_matrix(rng, n, lo=-9, hi=9):
    return IntMatrix(n, n, tuple(rng.randint(lo, hi) for _ in range(n * n)))


def test_basic_ops():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.from_rows([[0, 1], [1, 0]])
    assert (a @ b).to_rows() == [[2, 1], [4, 3]]
    assert a.add(b).to_rows() == [[1, 3], [4, 4]]
    assert a.sub(b).to_rows() == [[1, 1], [2, 4]]
    assert a.transpose().to_rows() == [[1, 3], [2, 4]]
    assert a.trace() == 5
    assert a.max_entry() == 4
    assert IntMatrix.identity(3).to_rows() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_pow():
    fib = IntMatrix.from_rows([[1, 1], [1, 0]])
    assert fib.pow(0) == IntMatrix.identity(2)
    assert fib.pow(1) == fib
    # F(10) = 55, F(11) = 89
    assert fib.pow(10).at(0, 0) == 89
    assert fib.pow(10).at(0, 1) == 55


def test_shape_errors():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.from_rows([[1, 2, 3]])
    with pytest.raises(ShapeError):
        a @ IntMatrix.from_rows([[1, 2, 3]])
    with pytest.raises(ShapeError):
        a.add(b)
    with pytest.raises(ShapeError):
        b.trace()
    with pytest.raises(ShapeError):
        IntMatrix(2, 2, (1, 2, 3))


def test_vector_products():
    a = IntMatrix.from_rows([[1, 1], [1, 0]])
    assert vec_mat_mul((1, 0), a) == (1, 1)
    assert vec_mat_mul((2, 3), a) == (5, 2)
    assert mat_vec_mul(a, (1, 0)) == (1, 1)


def test_det_small_known():
    assert det(IntMatrix.from_rows([[2]])) == 2
    assert det(IntMatrix.from_rows([[1, 3], [2, 1]])) == -5
    assert det(IntMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert det(IntMatrix.from_rows([[1, 2], [2, 4]])) == 0


def test_det_matches_cofactor_expansion():
    def cofactor_det(rows):
        n = len(rows)
        if n == 1:
            return rows[0][0]
        total = 0
        for j in range(n):
            minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * cofactor_det(minor)
        return total

    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n)
        assert det(m) == cofactor_det(m.to_rows())


def test_charpoly_known():
    assert charpoly(IntMatrix.from_rows([[1, 3], [2, 1]])) == (1, -2, -5)  # t^2 - 2t - 5
    assert charpoly(IntMatrix.from_rows([[1, 6], [1, 1]])) == (1, -2, -5)
    ones = IntMatrix.from_rows([[1, 1], [1, 1]])
    assert charpoly(ones) == (1, -2, 0)  # t^2 - 2t
    assert charpoly(IntMatrix.from_rows([[2]])) == (1, -2)


def test_charpoly_agrees_with_det_evaluation():
    # p(x) must equal det(xI - M) pointwise; the determinant route is independent.
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n)
        coeffs = charpoly(m)
        for x in (-3, -1, 0, 1, 2, 5):
            direct = det(IntMatrix.identity(n).scale(x).sub(m))
            horner = 0
            for c in coeffs:
                horner = horner * x + c
            assert horner == direct


def test_kron():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    i2 = IntMatrix.identity(2)
    k = kron(a, i2)
    assert k.rows == 4 and k.cols == 4
    assert k.at(0, 0) == 1 and k.at(0, 2) == 2 and k.at(2, 0) == 3
    assert k.at(1, 1) == 1 and k.at(1, 3) == 2


def test_parse_serialize_roundtrip():
    text = "2 3\n1 2 3\n4 5 6\n"
    m = parse_matrix(text)
    assert m.rows == 2 and m.cols == 3
    assert serialize_matrix(m) == text
    assert parse_matrix(serialize_matrix(m)) == m


def test_parse_comments_and_errors():
    m = parse_matrix("# header\n1 1\n7\n")
    assert m.to_rows() == [[7]]
    with pytest.raises(ParseError):
        parse_matrix("2 2\n1 2 3\n")
    with pytest.raises(ParseError):
        parse_matrix("1 1\nx\n")
    with pytest.raises(ParseError):
        parse_matrix("")
