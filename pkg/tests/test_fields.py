import json

import pytest
from hypothesis import given

from conftest import rng_of, seeds
from nonsplit.algebra import SignatureError, Superfunction
from nonsplit.fields import (
    Automorphism,
    SuperVectorField,
    apply_field,
    compose,
    conjugate_field,
    de_rham,
    exp_automorphism,
    lie_bracket,
)
from nonsplit.model import build_model, matrix_commutator, pi_apply, xi_embed
from nonsplit.randomgen import (
    random_even_zeta,
    random_field,
    random_homogeneous_function,
    random_superfunction,
)

P, Q = 2, 3
x = [Superfunction.even_var(P, Q, i) for i in range(P)]
xi = [Superfunction.odd_var(P, Q, j) for j in range(Q)]


def dx(i, c=None):
    return SuperVectorField.frame(P, Q, i, c)


def dxi(j, c=None):
    return SuperVectorField.frame(P, Q, P + j, c)


def random_automorphism(rng, p=P, q=Q):
    even = [[1 if i == k else 0 for k in range(p)] for i in range(p)]
    for i in range(p):
        for k in range(i + 1, p):
            even[i][k] = rng.randint(-2, 2)
    if rng.random() < 0.5:
        even = even[::-1]
    odd = [[Superfunction.constant(p, q, 1 if j == k else 0) for k in range(q)] for j in range(q)]
    for j in range(q):
        for k in range(j + 1, q):
            if rng.random() < 0.5:
                odd[j][k] = random_superfunction(rng, p, q, (0,), 1, 2)
    zeta = random_even_zeta(rng, p, q, (2,), 1, terms=2)
    return Automorphism(p, q, even, odd, None if zeta.is_zero() else zeta)


# -- examples -----------------------------------------------------------------------------------


def test_odd_partial_on_generators():
    assert apply_field(dxi(0), xi[0] * xi[1]) == xi[1]


def test_odd_coefficient_field_on_polynomial():
    assert apply_field(dx(0, xi[0]), x[0] * x[0]) == 2 * x[0] * xi[0]


def test_euler_action_on_eta():
    # pi(xi_Id) is the odd Euler operator on the form model; it doubles a 2-form.
    m = build_model(2)
    assert m.pi_xi_Id.apply(m.eta) == 2 * m.eta


def test_bracket_examples():
    assert lie_bracket(dx(0), dx(1)).is_zero()
    assert lie_bracket(dxi(0), dx(0, xi[0])) == dx(0)


def test_bracket_of_pi_images():
    m = build_model(2)
    E12 = [[1 if (i, k) == (0, 1) else 0 for k in range(m.p)] for i in range(m.p)]
    lhs = lie_bracket(pi_apply(xi_embed(m.JM, m.q)), pi_apply(xi_embed(E12, m.q)))
    rhs = -pi_apply(xi_embed(matrix_commutator(m.JM, E12, m.p, m.q), m.q))
    assert not lhs.is_zero() and lhs == rhs


def test_de_rham_examples():
    assert de_rham(x[0]).pair(dx(0)) == 1
    assert de_rham(Superfunction.constant(P, Q, 7)).is_zero()
    m = build_model(2)
    assert de_rham(m.eta).pair(m.pi_xi_Id) == 2 * m.eta


def test_exp_automorphism_terminates():
    zeta = dx(0, xi[0] * xi[1])
    assert exp_automorphism(zeta).apply(x[0]) == x[0] + xi[0] * xi[1]


def test_exp_zero_is_identity():
    phi = exp_automorphism(SuperVectorField.zero(P, Q))
    for g in x + xi:
        assert phi.apply(g) == g


def test_exp_inverse_law():
    zeta = dx(0, xi[0] * xi[1]) + dxi(2, x[1] * xi[0] * xi[1] * xi[2])
    phi, inv = exp_automorphism(zeta), exp_automorphism(-zeta)
    for g in x + xi:
        assert phi.apply(inv.apply(g)) == g
    assert compose(phi, inv).zeta.is_zero()


def test_exp_rejects_bad_zeta():
    with pytest.raises(ValueError):
        exp_automorphism(dx(0, xi[0]))           # odd
    with pytest.raises(ValueError):
        exp_automorphism(dxi(0, xi[1]))          # even but degree 0


def test_conjugate_identity_and_rotation():
    X = dx(0, x[1]) + dxi(1, xi[0])
    assert conjugate_field(Automorphism.identity(P, Q), X) == X
    rot = Automorphism(P, Q, even_matrix=[[0, 1], [-1, 0]])   # x1 -> x2, x2 -> -x1
    Y = conjugate_field(rot, dx(0))
    for f in (x[0], x[1], x[0] * x[1]):
        assert Y.apply(f) == rot.apply(dx(0).apply(rot.inverse().apply(f)))
    assert Y == dx(1)


def test_conjugate_by_exponential():
    phi = exp_automorphism(dx(0, xi[0] * xi[1]))
    assert conjugate_field(phi, dxi(0)) == dxi(0) - dx(0, xi[1])


def test_compose_examples():
    rng = rng_of(4)
    phi = random_automorphism(rng)
    ident = Automorphism.identity(P, Q)
    assert compose(phi, ident) == phi
    z1, z2 = dx(0, xi[0] * xi[1]), dx(1, xi[0] * xi[2])
    assert lie_bracket(z1, z2).is_zero()
    assert compose(exp_automorphism(z1), exp_automorphism(z2)) == exp_automorphism(z1 + z2)
    phi0 = Automorphism(P, Q, [[0, 1], [-1, 0]], zeta=z1)
    back = compose(phi0, Automorphism(P, Q, [[0, -1], [1, 0]]))
    assert back.is_degree_preserving_identity()
    assert back.zeta == z1


def test_signature_mismatch():
    with pytest.raises(SignatureError):
        apply_field(dx(0), Superfunction.even_var(3, Q, 0))


def test_field_and_automorphism_json_roundtrip():
    rng = rng_of(11)
    X = random_field(rng, P, Q)
    data = json.loads(json.dumps(X.to_json()))
    assert SuperVectorField.from_json(data) == X
    assert set(data["coeffs"]) <= {"dx_1", "dx_2", "dxi_1", "dxi_2", "dxi_3"}
    phi = random_automorphism(rng)
    assert Automorphism.from_json(json.loads(json.dumps(phi.to_json()))) == phi


# -- properties --------------------------------------------------------------------------------


@given(seeds)
def test_graded_leibniz(seed):
    rng = rng_of(seed)
    pX = rng.randint(0, 1)
    X = random_field(rng, P, Q, parity=pX, max_even_degree=1)
    f = random_homogeneous_function(rng, P, Q, rng.randint(0, 1))
    g = random_superfunction(rng, P, Q)
    sign = (-1) ** (pX * f.parity()) if not f.is_zero() else 1
    assert X.apply(f * g) == X.apply(f) * g + sign * (f * X.apply(g))


@given(seeds)
def test_bracket_antisymmetry_and_jacobi(seed):
    rng = rng_of(seed)
    ps = [rng.randint(0, 1) for _ in range(3)]
    X, Y, Z = (random_field(rng, P, Q, parity=pp, max_even_degree=1, terms=1) for pp in ps)
    a, b, c = ps
    assert lie_bracket(X, Y) == -(-1) ** (a * b) * lie_bracket(Y, X)
    jac = ((-1) ** (a * c) * lie_bracket(X, lie_bracket(Y, Z))
           + (-1) ** (b * a) * lie_bracket(Y, lie_bracket(Z, X))
           + (-1) ** (c * b) * lie_bracket(Z, lie_bracket(X, Y)))
    assert jac.is_zero()


@given(seeds)
def test_bracket_is_the_commutator(seed):
    rng = rng_of(seed)
    a, b = rng.randint(0, 1), rng.randint(0, 1)
    X = random_field(rng, P, Q, parity=a, max_even_degree=1, terms=1)
    Y = random_field(rng, P, Q, parity=b, max_even_degree=1, terms=1)
    f = random_superfunction(rng, P, Q)
    assert lie_bracket(X, Y).apply(f) == X.apply(Y.apply(f)) - (-1) ** (a * b) * Y.apply(X.apply(f))


@given(seeds)
def test_automorphism_is_multiplicative(seed):
    rng = rng_of(seed)
    phi = random_automorphism(rng)
    f, g = random_superfunction(rng, P, Q), random_superfunction(rng, P, Q)
    assert phi.apply(f * g) == phi.apply(f) * phi.apply(g)
    h = random_homogeneous_function(rng, P, Q, 1)
    assert phi.apply(h).parity() in (1, None if h.is_zero() else 1)
    dev = phi.apply(f) - phi.apply_degree_preserving(f)
    if not (dev.is_zero() or f.is_zero()):
        assert dev.floor() >= f.floor() + 2


@given(seeds)
def test_conjugation_is_invertible(seed):
    rng = rng_of(seed)
    phi = random_automorphism(rng)
    X = random_field(rng, P, Q, max_even_degree=1)
    assert conjugate_field(phi.inverse(), conjugate_field(phi, X)) == X
    f = random_superfunction(rng, P, Q, max_even_degree=1)
    assert conjugate_field(phi, X).apply(f) == phi.apply(X.apply(phi.inverse().apply(f)))


@given(seeds)
def test_compose_matches_action(seed):
    rng = rng_of(seed)
    a, b = random_automorphism(rng), random_automorphism(rng)
    ab = compose(a, b)
    for g in x + xi:
        assert ab.apply(g) == a.apply(b.apply(g))
