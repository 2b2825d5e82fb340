from fractions import Fraction as F

import numpy as np
import pytest

from crnelim import exact


def dense_rows(m):
    return [{j: F(v) for j, v in enumerate(row) if v} for row in m]


def test_solve_matches_numpy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.integers(-5, 6, size=(5, 5))
        if abs(np.linalg.det(a)) < 1e-9:
            continue
        b = rng.integers(-5, 6, size=5)
        x = exact.solve(dense_rows(a), [F(int(v)) for v in b], 5)
        assert np.allclose([float(v) for v in x], np.linalg.solve(a, b))
        # exact residual
        for row, rhs in zip(a, b):
            assert sum(F(int(c)) * v for c, v in zip(row, x)) == rhs


def test_solve_singular():
    with pytest.raises(exact.SingularSystemError):
        exact.solve(dense_rows([[1, 2], [2, 4]]), [F(1), F(2)], 2)


def test_null_vector_one_dimensional():
    v = exact.null_vector(dense_rows([[1, -1, 0], [0, 1, -1]]), 3)
    assert v[0] == v[1] == v[2] != 0


def test_null_vector_rejects_larger_kernel():
    with pytest.raises(exact.NullityError) as info:
        exact.null_vector(dense_rows([[1, -1, 0]]), 3)
    assert info.value.args


def test_rank():
    assert exact.rank(dense_rows([[1, 2], [2, 4], [0, 0]])) == 1


def test_feasible_point_found_and_valid():
    a = [[F(1), F(1), F(0)], [F(0), F(1), F(1)]]
    b = [F(2), F(3)]
    x = exact.feasible_point(a, b)
    assert x is not None and min(x) >= 0
    assert [sum(c * v for c, v in zip(row, x)) for row in a] == b


def test_feasible_point_infeasible():
    # x + y = -1 with x, y >= 0
    assert exact.feasible_point([[F(1), F(1)]], [F(-1)]) is None


def test_integer_scaling_primitive():
    assert exact.integer_scaling([F(1, 2), F(3, 4), F(0)]) == [2, 3, 0]
    assert exact.integer_scaling([F(4), F(6)]) == [2, 3]
