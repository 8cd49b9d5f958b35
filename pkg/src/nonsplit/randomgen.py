"""Seeded random instances for property checks and the verification suite."""
from __future__ import annotations

import random
from fractions import Fraction

from .algebra import Superfunction, monomials, odd_masks
from .fields import SuperVectorField, frame_parity
from .splitting import unknown_basis
from .tensors import EndoTensor


def random_coefficient(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))


def random_superfunction(rng: random.Random, p: int, q: int, odd_degrees=(0, 1, 2),
                         max_even_degree: int = 2, terms: int = 3) -> Superfunction:
    out = {}
    degs = [d for d in odd_degrees if d <= q]
    for _ in range(terms):
        d = rng.choice(degs)
        key = (rng.choice(odd_masks(q, d)), rng.choice(monomials(p, max_even_degree)))
        out[key] = out.get(key, 0) + random_coefficient(rng)
    return Superfunction(p, q, out)


def random_homogeneous_function(rng, p, q, parity: int, max_even_degree: int = 2, terms: int = 3):
    degs = [d for d in range(q + 1) if d % 2 == parity] or [parity]
    return random_superfunction(rng, p, q, degs, max_even_degree, terms)


def random_field(rng: random.Random, p: int, q: int, parity: int | None = None, floor: int = 0,
                 max_even_degree: int = 2, terms: int = 2) -> SuperVectorField:
    """Random field; with ``parity`` set it is homogeneous, every term has degree >= ``floor``."""
    coeffs = []
    for k in range(p + q):
        shift = frame_parity(p, k)
        degs = [d for d in range(q + 1) if d - shift >= floor
                and (parity is None or (d + shift) % 2 == parity)]
        if not degs or rng.random() < 0.3:
            coeffs.append(Superfunction.zero(p, q))
        else:
            coeffs.append(random_superfunction(rng, p, q, degs, max_even_degree, terms))
    return SuperVectorField(p, q, coeffs)


def random_even_zeta(rng: random.Random, p: int, q: int, degrees=(2,), bound: int = 1,
                     terms: int = 3, odd_frames_only: bool = False) -> SuperVectorField:
    """Sum of a few monomial even fields of the given Z-degrees, coefficient degree <= bound."""
    frames = range(p, p + q) if odd_frames_only else None
    basis = [u for d in degrees for u in unknown_basis(p, q, d, bound, frames)]
    out = [dict() for _ in range(p + q)]
    for k, mask, exps in rng.sample(basis, min(terms, len(basis))):
        out[k][(mask, exps)] = random_coefficient(rng)
    return SuperVectorField(p, q, [Superfunction(p, q, t) for t in out])


def random_even_endo(rng: random.Random, p: int, q: int, floor: int = 2,
                     max_even_degree: int = 2, density: float = 0.25) -> EndoTensor:
    """Even endomorphism all of whose terms have degree >= ``floor``."""
    n = p + q
    rows = []
    for l in range(n):
        row = []
        for k in range(n):
            offset = (-frame_parity(p, l)) - (-frame_parity(p, k))
            parity = (frame_parity(p, l) + frame_parity(p, k)) % 2
            degs = [d for d in range(q + 1) if d % 2 == parity and d + offset >= floor]
            if degs and rng.random() < density:
                row.append(random_superfunction(rng, p, q, degs, max_even_degree, 2))
            else:
                row.append(Superfunction.zero(p, q))
        rows.append(row)
    return EndoTensor(p, q, rows)


def random_polynomial_matrix(rng: random.Random, p: int, q: int, max_even_degree: int = 2,
                             terms: int = 2) -> list[list[Superfunction]]:
    return [[random_superfunction(rng, p, q, (0,), max_even_degree, terms) for _ in range(p)]
            for _ in range(p)]


def random_two_form(rng: random.Random, p: int, q: int, max_even_degree: int = 2,
                    terms: int = 3) -> Superfunction:
    return random_superfunction(rng, p, q, (2,), max_even_degree, terms)
