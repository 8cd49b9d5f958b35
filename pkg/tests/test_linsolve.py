from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from conftest import rng_of, seeds
from nonsplit.linsolve import solve_sparse


def test_empty_system():
    sol = solve_sparse([], [])
    assert sol.solvable and sol.values == {} and sol.rank == 0


def test_single_equation():
    sol = solve_sparse([{0: 2}], [4])
    assert sol.solvable and sol.values == {0: 2}


def test_inconsistent_rows():
    sol = solve_sparse([{}], [1])
    assert not sol.solvable and sol.inconsistent_row == 0
    sol = solve_sparse([{0: 1, 1: 1}, {0: 2, 1: 2}], [1, 3])
    assert not sol.solvable and sol.inconsistent_row == 1


def test_free_variables_are_zero():
    sol = solve_sparse([{0: 1, 1: 1}], [5])
    assert sol.solvable and sol.rank == 1
    assert sol.values.get(1, 0) == 0 and sol.values[0] == 5


def test_length_mismatch():
    with pytest.raises(ValueError):
        solve_sparse([{0: 1}], [])


def _random_system(rng, n_rows, n_cols, density=0.3):
    rows = []
    for _ in range(n_rows):
        row = {c: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
               for c in range(n_cols) if rng.random() < density}
        rows.append({c: v for c, v in row.items() if v})
    return rows


@given(seeds)
def test_agrees_with_sympy_rank_and_solution(seed):
    rng = rng_of(seed)
    n_rows, n_cols = rng.randint(1, 7), rng.randint(1, 7)
    rows = _random_system(rng, n_rows, n_cols)
    if rng.random() < 0.5:
        x = [Fraction(rng.randint(-3, 3)) for _ in range(n_cols)]
        rhs = [sum((v * x[c] for c in r.keys() for v in [r[c]]), Fraction(0)) for r in rows]
    else:
        rhs = [Fraction(rng.randint(-3, 3)) for _ in rows]
    A = sympy.Matrix([[sympy.Rational(r.get(c, 0)) for c in range(n_cols)] for r in rows])
    b = sympy.Matrix([sympy.Rational(v) for v in rhs])
    solvable = A.rank() == A.row_join(b).rank()
    sol = solve_sparse(rows, rhs)
    assert sol.solvable == solvable
    if solvable:
        assert sol.rank == A.rank()
        for r, v in zip(rows, rhs):
            assert sum((c * sol.values.get(k, 0) for k, c in r.items()), Fraction(0)) == v
