import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import rng_of, seeds
from nonsplit.algebra import (
    SignatureError,
    Superfunction,
    evaluate_at_point,
    mul,
    parity_and_degree,
    project_degree,
)
from nonsplit.randomgen import random_homogeneous_function, random_superfunction

P, Q = 2, 4
x1 = Superfunction.even_var(P, Q, 0)
x2 = Superfunction.even_var(P, Q, 1)
xi = [Superfunction.odd_var(P, Q, j) for j in range(Q)]
eta = xi[0] * xi[1] + xi[2] * xi[3]


def test_odd_generator_squares_to_zero():
    assert mul(xi[0], xi[0]).is_zero()


def test_anticommuting_generators_normal_form():
    assert mul(xi[1], xi[0]) == -(xi[0] * xi[1])
    assert Superfunction.monomial(P, Q, [1, 0]) == -Superfunction.monomial(P, Q, [0, 1])


def test_nilpotent_cross_term_cancels():
    a = x1 + xi[0] * xi[1]
    b = x1 - xi[0] * xi[1]
    assert mul(a, b) == x1 * x1


def test_project_degree_examples():
    a = 3 + x1 * xi[0] * xi[1] + xi[0] * xi[1] * xi[2] * xi[3]
    assert project_degree(a, 2) == x1 * xi[0] * xi[1]
    assert project_degree(eta, 2) == eta
    assert project_degree(x1 * x2 + eta, 1).is_zero()


def test_project_degree_sums_back():
    a = 3 + x1 * xi[0] + x2 * xi[0] * xi[1] * xi[2]
    assert sum((project_degree(a, k) for k in range(Q + 1)), Superfunction.zero(P, Q)) == a


def test_evaluate_at_point_examples():
    a = x1 * x2 + x2 * xi[0] * xi[1]
    assert evaluate_at_point(a, [1, 2]) == 2 + 2 * xi[0] * xi[1]
    assert evaluate_at_point(eta, [Fraction(3, 7), -5]) == eta
    assert evaluate_at_point(x1 * xi[0], [0, 0]).is_zero()


def test_evaluate_rejects_wrong_length():
    with pytest.raises(SignatureError):
        evaluate_at_point(x1, [1])


@pytest.mark.parametrize("a, parity, degree, floor", [
    (xi[0] * xi[1], "even", 2, 2),
    (x1 + xi[0] * xi[1], "even", "mixed", 0),
    (xi[0] + xi[0] * xi[1] * xi[2], "odd", "mixed", 1),
])
def test_parity_and_degree(a, parity, degree, floor):
    rep = parity_and_degree(a)
    assert (rep.parity, rep.degree, rep.floor) == (parity, degree, floor)


def test_mixed_parity_reported():
    assert parity_and_degree(xi[0] + x1).parity == "mixed"


def test_signature_mismatch_rejected():
    with pytest.raises(SignatureError):
        mul(x1, Superfunction.even_var(3, Q, 0))


def test_rationals_are_reduced():
    a = Superfunction.constant(P, Q, Fraction(4, 8))
    (_, c), = a.items()
    assert c == Fraction(1, 2) and c.denominator == 2


def test_zero_is_empty_mapping():
    assert (x1 - x1).terms == {}
    assert Superfunction.zero(P, Q) == 0 * x1


def test_json_format_and_roundtrip():
    a = Fraction(2, 3) * x1 * x1 * xi[1] * xi[3] - 5
    data = a.to_json()
    assert json.loads(json.dumps(data)) == data
    term = next(t for t in data if t["odd"] == [2, 4])
    assert term["coeff"] == [{"exp": [2, 0], "num": "2", "den": "3"}]
    assert Superfunction.from_json(P, Q, data) == a


def test_json_unreduced_input_is_normalized():
    data = [{"odd": [1], "coeff": [{"exp": [0, 0], "num": "2", "den": "4"}]}]
    a = Superfunction.from_json(P, Q, data)
    assert a == Fraction(1, 2) * xi[0]
    assert a.to_json()[0]["coeff"][0]["den"] == "2"


def test_json_rejects_bad_odd_index():
    with pytest.raises((ValueError, SignatureError)):
        Superfunction.from_json(P, Q, [{"odd": [5], "coeff": [{"exp": [0, 0], "num": "1", "den": "1"}]}])


# -- properties --------------------------------------------------------------------------------


def _pair(seed):
    rng = rng_of(seed)
    pa, pb = rng.randint(0, 1), rng.randint(0, 1)
    a = random_homogeneous_function(rng, P, Q, pa)
    b = random_homogeneous_function(rng, P, Q, pb)
    return a, b, pa, pb


@given(seeds)
def test_graded_commutativity(seed):
    a, b, pa, pb = _pair(seed)
    assert mul(a, b) == (-1) ** (pa * pb) * mul(b, a)


@given(seeds)
def test_associativity_and_distributivity(seed):
    rng = rng_of(seed)
    a, b, c = (random_superfunction(rng, P, Q, terms=3) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(seeds)
def test_degree_additivity(seed):
    rng = rng_of(seed)
    a, b = random_superfunction(rng, P, Q), random_superfunction(rng, P, Q)
    prod = mul(a, b)
    if not (a.is_zero() or b.is_zero() or prod.is_zero()):
        assert prod.floor() >= a.floor() + b.floor()


@given(seeds)
def test_nilpotency_of_positive_floor(seed):
    rng = rng_of(seed)
    a = random_superfunction(rng, P, Q, odd_degrees=(1, 2, 3), terms=4)
    assert (a ** (Q + 1)).is_zero()


@given(seeds, st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=6),
                       min_size=P, max_size=P))
def test_evaluation_is_a_homomorphism(seed, point):
    rng = rng_of(seed)
    a, b = random_superfunction(rng, P, Q), random_superfunction(rng, P, Q)
    ev = lambda f: evaluate_at_point(f, point)
    assert ev(a * b) == ev(a) * ev(b)
    assert ev(a + b) == ev(a) + ev(b)


@given(seeds)
def test_json_roundtrip_is_exact(seed):
    a = random_superfunction(rng_of(seed), P, Q, odd_degrees=(0, 1, 2, 3, 4))
    text = json.dumps(a.to_json(), sort_keys=True)
    b = Superfunction.from_json(P, Q, json.loads(text))
    assert b == a and json.dumps(b.to_json(), sort_keys=True) == text
