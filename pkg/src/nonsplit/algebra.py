"""Exact arithmetic in the coefficient algebra  Q[x_1..x_p] (x) Lambda[xi_1..xi_q].

A :class:`Superfunction` is a finite sum of terms ``c * x^e * xi_S`` where ``S`` is a
set of odd generators written in increasing index order (stored as a bit mask) and
``c`` is an exact rational.  Integral coefficients are kept as ``int`` and everything
else as :class:`fractions.Fraction`; both compare equal to each other, so arithmetic
never needs to care which one it got.

Indices are 0-based in Python.  The JSON form uses 1-based odd indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]


class SignatureError(ValueError):
    """Operands live over different (p, q) signatures."""


def normalize_scalar(c) -> Scalar:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


@lru_cache(maxsize=None)
def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=1 << 16)
def odd_product(a: int, b: int) -> tuple[int, int]:
    """Return (sign, mask) of xi_a * xi_b in normal order; sign 0 if they overlap."""
    if a & b:
        return 0, 0
    swaps = 0
    m = b
    while m:
        low = m & -m
        swaps += popcount(a & ~((low << 1) - 1))
        m ^= low
    return (-1 if swaps & 1 else 1), a | b


def _add_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def mask_to_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def indices_to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def monomials(p: int, max_degree: int) -> list[tuple]:
    """All exponent vectors of length p with total degree <= max_degree, sorted."""
    out = []

    def rec(prefix, left, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, slots - 1)

    rec([], max_degree, p)
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out


def odd_masks(q: int, degree: int) -> list[int]:
    if degree < 0 or degree > q:
        return []
    return [indices_to_mask(c) for c in combinations(range(q), degree)]


class Superfunction:
    """Immutable element of the graded-commutative algebra over signature (p, q)."""

    __slots__ = ("p", "q", "_terms", "_hash")

    def __init__(self, p: int, q: int, terms: Mapping[tuple[int, tuple], Scalar] | None = None):
        self.p = p
        self.q = q
        clean = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[key] = normalize_scalar(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, p, q, terms):
        obj = cls.__new__(cls)
        obj.p = p
        obj.q = q
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, p: int, q: int) -> "Superfunction":
        return cls._raw(p, q, {})

    @classmethod
    def constant(cls, p: int, q: int, c) -> "Superfunction":
        return cls(p, q, {(0, (0,) * p): c})

    @classmethod
    def even_var(cls, p: int, q: int, i: int) -> "Superfunction":
        if not 0 <= i < p:
            raise IndexError(f"even variable index {i} outside 0..{p - 1}")
        e = [0] * p
        e[i] = 1
        return cls._raw(p, q, {(0, tuple(e)): 1})

    @classmethod
    def odd_var(cls, p: int, q: int, j: int) -> "Superfunction":
        if not 0 <= j < q:
            raise IndexError(f"odd variable index {j} outside 0..{q - 1}")
        return cls._raw(p, q, {(1 << j, (0,) * p): 1})

    @classmethod
    def monomial(cls, p: int, q: int, odd: Sequence[int] = (), exps: Sequence[int] | None = None,
                 coeff=1) -> "Superfunction":
        """``coeff * x^exps * xi_odd[0] * xi_odd[1] * ...`` in the given (any) order."""
        exps = tuple(exps) if exps is not None else (0,) * p
        if len(exps) != p:
            raise SignatureError(f"exponent vector of length {len(exps)} for p={p}")
        sign, mask = 1, 0
        for j in odd:
            s, mask = odd_product(mask, 1 << j)
            sign *= s
        return cls(p, q, {(mask, exps): sign * normalize_scalar(coeff)})

    # -- basic protocol -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[int, tuple], Scalar]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def _check(self, other: "Superfunction"):
        if self.p != other.p or self.q != other.q:
            raise SignatureError(f"signature ({self.p},{self.q}) vs ({other.p},{other.q})")

    def _coerce(self, other) -> "Superfunction":
        if isinstance(other, Superfunction):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Superfunction.constant(self.p, self.q, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Superfunction.constant(self.p, self.q, other)
        if not isinstance(other, Superfunction):
            return NotImplemented
        return (self.p, self.q) == (other.p, other.q) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.q, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = normalize_scalar(v)
            else:
                out.pop(k, None)
        return Superfunction._raw(self.p, self.q, out)

    __radd__ = __add__

    def __neg__(self):
        return Superfunction._raw(self.p, self.q, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Superfunction":
        c = normalize_scalar(c)
        if not c:
            return Superfunction.zero(self.p, self.q)
        return Superfunction._raw(self.p, self.q,
                                  {k: normalize_scalar(v * c) for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Superfunction):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for (ma, ea), ca in self._terms.items():
            for (mb, eb), cb in other._terms.items():
                sign, m = odd_product(ma, mb)
                if not sign:
                    continue
                key = (m, _add_exps(ea, eb))
                v = out.get(key, 0) + (ca * cb if sign > 0 else -ca * cb)
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return Superfunction._raw(self.p, self.q, {k: normalize_scalar(v) for k, v in out.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / c)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        result = Superfunction.constant(self.p, self.q, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- gradings -------------------------------------------------------------

    def project_degree(self, k: int) -> "Superfunction":
        return Superfunction._raw(self.p, self.q,
                                  {key: c for key, c in self._terms.items() if popcount(key[0]) == k})

    def filtration_part(self, k: int) -> "Superfunction":
        """Sum of the terms of odd degree >= k."""
        return Superfunction._raw(self.p, self.q,
                                  {key: c for key, c in self._terms.items() if popcount(key[0]) >= k})

    def degrees(self) -> set[int]:
        return {popcount(m) for m, _ in self._terms}

    def floor(self) -> int | None:
        d = self.degrees()
        return min(d) if d else None

    def even_degree(self) -> int:
        """Maximal total polynomial degree in the even variables (-1 for zero)."""
        return max((sum(e) for _, e in self._terms), default=-1)

    def parity_part(self, parity: int) -> "Superfunction":
        return Superfunction._raw(self.p, self.q,
                                  {key: c for key, c in self._terms.items()
                                   if popcount(key[0]) % 2 == parity})

    def grade_involution(self) -> "Superfunction":
        """a -> (-1)^{|a|} a on homogeneous components."""
        return Superfunction._raw(self.p, self.q,
                                  {key: (-c if popcount(key[0]) & 1 else c)
                                   for key, c in self._terms.items()})

    def parity(self) -> int | None:
        """0 or 1 for homogeneous nonzero elements, None if mixed; zero counts as even."""
        ps = {d % 2 for d in self.degrees()}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def body(self) -> "Superfunction":
        return self.project_degree(0)

    # -- calculus -------------------------------------------------------------

    def d_even(self, i: int) -> "Superfunction":
        out = {}
        for (m, e), c in self._terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[(m, ne)] = out.get((m, ne), 0) + c * k
        return Superfunction(self.p, self.q, out)

    def d_odd(self, j: int) -> "Superfunction":
        """Left derivative with respect to xi_j."""
        bit = 1 << j
        below = bit - 1
        out = {}
        for (m, e), c in self._terms.items():
            if m & bit:
                key = (m ^ bit, e)
                out[key] = -c if popcount(m & below) & 1 else c
        return Superfunction._raw(self.p, self.q, out)

    def derivative(self, k: int) -> "Superfunction":
        """Derivative along frame index k: even variables first, then odd ones."""
        return self.d_even(k) if k < self.p else self.d_odd(k - self.p)

    def evaluate_at_point(self, point: Sequence) -> "Superfunction":
        if len(point) != self.p:
            raise SignatureError(f"point of length {len(point)} for p={self.p}")
        pt = [normalize_scalar(Fraction(v)) for v in point]
        out: dict = {}
        zero_e = (0,) * self.p
        for (m, e), c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v = v * x ** k
            out[(m, zero_e)] = out.get((m, zero_e), 0) + v
        return Superfunction(self.p, self.q, out)

    def substitute(self, even_images: Sequence["Superfunction"],
                   odd_images: Sequence["Superfunction"]) -> "Superfunction":
        """Apply the algebra morphism determined by the images of the generators."""
        result = Superfunction.zero(self.p, self.q)
        one = Superfunction.constant(self.p, self.q, 1)
        pow_cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = even_images[i] ** k
            return pow_cache[key]

        odd_cache: dict = {}
        for (m, e), c in self._terms.items():
            if m not in odd_cache:
                t = one
                for j in mask_to_indices(m):
                    t = t * odd_images[j]
                odd_cache[m] = t
            t = one
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            result = result + (t * odd_cache[m]).scale(c)
        return result

    # -- views ------------------------------------------------------------------

    def coefficient(self, odd: Sequence[int] | int) -> dict[tuple, Scalar]:
        """Polynomial coefficient of the odd monomial (mask or index list)."""
        mask = odd if isinstance(odd, int) else indices_to_mask(odd)
        return {e: c for (m, e), c in self._terms.items() if m == mask}

    def sorted_terms(self) -> list[tuple[tuple[int, tuple], Scalar]]:
        return sorted(self._terms.items(),
                      key=lambda kv: (popcount(kv[0][0]), mask_to_indices(kv[0][0]), kv[0][1]))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (m, e), c in self.sorted_terms():
            factors = [f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
            factors += [f"xi{j + 1}" for j in mask_to_indices(m)]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> list:
        groups: dict[int, list] = {}
        for (m, e), c in self.sorted_terms():
            c = Fraction(c)
            groups.setdefault(m, []).append(
                {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)})
        return [{"odd": [j + 1 for j in mask_to_indices(m)], "coeff": coeffs}
                for m, coeffs in groups.items()]

    @classmethod
    def from_json(cls, p: int, q: int, data) -> "Superfunction":
        if not isinstance(data, list):
            raise ValueError("superfunction must be a JSON array of terms")
        out: dict = {}
        for term in data:
            odd = [int(j) - 1 for j in term["odd"]]
            if any(j < 0 or j >= q for j in odd) or len(set(odd)) != len(odd):
                raise ValueError(f"invalid odd index list {term['odd']} for q={q}")
            sign, mask = 1, 0
            for j in odd:
                s, mask = odd_product(mask, 1 << j)
                sign *= s
            for c in term["coeff"]:
                e = tuple(int(k) for k in c["exp"])
                if len(e) != p or any(k < 0 for k in e):
                    raise ValueError(f"invalid exponent vector {c['exp']} for p={p}")
                value = Fraction(str(c["num"])) / Fraction(str(c.get("den", "1")))
                out[(mask, e)] = out.get((mask, e), 0) + sign * value
        return cls(p, q, out)


@dataclass(frozen=True)
class HomogeneityReport:
    parity: str      # "even", "odd" or "mixed"
    degree: int | str | None   # the common degree, "mixed", or None for zero
    floor: int | None


def parity_and_degree(a: Superfunction) -> HomogeneityReport:
    degs = a.degrees()
    par = a.parity()
    parity = "mixed" if par is None else ("odd" if par else "even")
    if not degs:
        return HomogeneityReport(parity, None, None)
    degree = next(iter(degs)) if len(degs) == 1 else "mixed"
    return HomogeneityReport(parity, degree, min(degs))


def mul(a: Superfunction, b: Superfunction) -> Superfunction:
    return a * b


def project_degree(a: Superfunction, k: int) -> Superfunction:
    return a.project_degree(k)


def evaluate_at_point(a: Superfunction, point: Sequence) -> Superfunction:
    return a.evaluate_at_point(point)
