"""Super vector fields, 1-forms, the graded bracket and automorphisms of the model.

Conventions (fixed once for the whole package):

* A field is written ``X = sum_k c_k e_k`` with coefficients on the left, where the
  frame is ``e_k = d/dx_k`` for ``k < p`` and ``e_{p+j} = d/dxi_j``.  ``X(f) = sum_k
  c_k * d_k f`` with left odd derivatives, so the graded Leibniz rule holds.
* The frame degree of ``d/dx`` is 0 and of ``d/dxi`` is -1; the Z-degree of a term
  is the odd degree of its coefficient plus the frame degree.
* A 1-form is given by its values ``alpha_k`` on the frame and pairs as
  ``alpha(X) = sum_k c_k alpha_k``, hence ``alpha(f X) = f alpha(X)`` with no sign.
  With this, ``d f`` has components ``d_k f`` and ``(d f)(X) = X(f)``.
* An automorphism acts on functions as ``f -> exp(zeta)(phi0(f))`` where ``phi0`` is
  degree preserving.  Conjugation of a field ``X`` is ``Phi o X o Phi^{-1}``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy

from .algebra import (
    SignatureError,
    Superfunction,
    normalize_scalar,
)


def frame_parity(p: int, k: int) -> int:
    return 0 if k < p else 1


def frame_degree(p: int, k: int) -> int:
    return 0 if k < p else -1


def frame_name(p: int, k: int) -> str:
    return f"dx_{k + 1}" if k < p else f"dxi_{k - p + 1}"


class SuperVectorField:
    """A graded derivation written in the coordinate frame."""

    __slots__ = ("p", "q", "coeffs")

    def __init__(self, p: int, q: int, coeffs: Sequence[Superfunction] | None = None):
        self.p = p
        self.q = q
        if coeffs is None:
            coeffs = [Superfunction.zero(p, q)] * (p + q)
        coeffs = tuple(coeffs)
        if len(coeffs) != p + q:
            raise SignatureError(f"{len(coeffs)} coefficients for frame of size {p + q}")
        for c in coeffs:
            if (c.p, c.q) != (p, q):
                raise SignatureError("coefficient signature mismatch")
        self.coeffs = coeffs

    @classmethod
    def zero(cls, p: int, q: int) -> "SuperVectorField":
        return cls(p, q)

    @classmethod
    def frame(cls, p: int, q: int, k: int, coeff: Superfunction | None = None) -> "SuperVectorField":
        zero = Superfunction.zero(p, q)
        cs = [zero] * (p + q)
        cs[k] = coeff if coeff is not None else Superfunction.constant(p, q, 1)
        return cls(p, q, cs)

    def _check(self, other):
        if (self.p, self.q) != (other.p, other.q):
            raise SignatureError(f"signature ({self.p},{self.q}) vs ({other.p},{other.q})")

    def __eq__(self, other):
        if not isinstance(other, SuperVectorField):
            return NotImplemented
        return (self.p, self.q) == (other.p, other.q) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.q, self.coeffs))

    def __add__(self, other: "SuperVectorField") -> "SuperVectorField":
        self._check(other)
        return SuperVectorField(self.p, self.q, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "SuperVectorField") -> "SuperVectorField":
        self._check(other)
        return SuperVectorField(self.p, self.q, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return SuperVectorField(self.p, self.q, [-a for a in self.coeffs])

    def __rmul__(self, f):
        """Left module structure ``f * X``; scalars are accepted too."""
        if isinstance(f, (int, Fraction)):
            return SuperVectorField(self.p, self.q, [c.scale(f) for c in self.coeffs])
        if isinstance(f, Superfunction):
            return SuperVectorField(self.p, self.q, [f * c for c in self.coeffs])
        return NotImplemented

    def scale(self, c) -> "SuperVectorField":
        return SuperVectorField(self.p, self.q, [a.scale(c) for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    # -- gradings ----------------------------------------------------------------

    def parity_part(self, parity: int) -> "SuperVectorField":
        return SuperVectorField(self.p, self.q, [
            c.parity_part((parity + frame_parity(self.p, k)) % 2) for k, c in enumerate(self.coeffs)])

    def parity(self) -> int | None:
        even, odd = self.parity_part(0), self.parity_part(1)
        if odd.is_zero():
            return 0
        if even.is_zero():
            return 1
        return None

    def degrees(self) -> set[int]:
        out = set()
        for k, c in enumerate(self.coeffs):
            out |= {d + frame_degree(self.p, k) for d in c.degrees()}
        return out

    def floor(self) -> int | None:
        d = self.degrees()
        return min(d) if d else None

    def degree_part(self, d: int) -> "SuperVectorField":
        return SuperVectorField(self.p, self.q, [
            c.project_degree(d - frame_degree(self.p, k)) for k, c in enumerate(self.coeffs)])

    def even_degree(self) -> int:
        return max(c.even_degree() for c in self.coeffs)

    # -- action --------------------------------------------------------------------

    def apply(self, f: Superfunction) -> Superfunction:
        if (f.p, f.q) != (self.p, self.q):
            raise SignatureError("field and function signatures differ")
        out = Superfunction.zero(self.p, self.q)
        for k, c in enumerate(self.coeffs):
            if c:
                d = f.derivative(k)
                if d:
                    out = out + c * d
        return out

    __call__ = apply

    def evaluate_at_point(self, point) -> "SuperVectorField":
        return SuperVectorField(self.p, self.q, [c.evaluate_at_point(point) for c in self.coeffs])

    def __repr__(self):
        parts = [f"({c})*{frame_name(self.p, k)}" for k, c in enumerate(self.coeffs) if c]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"kind": "field", "p": self.p, "q": self.q,
                "coeffs": {frame_name(self.p, k): c.to_json()
                           for k, c in enumerate(self.coeffs) if c}}

    @classmethod
    def from_json(cls, data: dict) -> "SuperVectorField":
        p, q = int(data["p"]), int(data["q"])
        names = {frame_name(p, k): k for k in range(p + q)}
        cs = [Superfunction.zero(p, q)] * (p + q)
        for name, value in data.get("coeffs", {}).items():
            if name not in names:
                raise ValueError(f"unknown frame key {name!r}")
            cs[names[name]] = Superfunction.from_json(p, q, value)
        return cls(p, q, cs)


def apply_field(X: SuperVectorField, f: Superfunction) -> Superfunction:
    return X.apply(f)


def lie_bracket(X: SuperVectorField, Y: SuperVectorField) -> SuperVectorField:
    """Graded commutator ``X o Y - (-1)^{|X||Y|} Y o X``, extended bilinearly."""
    X._check(Y)
    p, q = X.p, X.q
    out = [Superfunction.zero(p, q)] * (p + q)
    for a in (0, 1):
        Xa = X.parity_part(a)
        if Xa.is_zero():
            continue
        for b in (0, 1):
            Yb = Y.parity_part(b)
            if Yb.is_zero():
                continue
            sign = -1 if a * b else 1
            for k in range(p + q):
                term = Xa.apply(Yb.coeffs[k])
                back = Yb.apply(Xa.coeffs[k])
                out[k] = out[k] + term - (back if sign > 0 else -back)
    return SuperVectorField(p, q, out)


def ad_power_series(zeta: SuperVectorField, X: SuperVectorField, sign: int = 1) -> SuperVectorField:
    """``exp(sign * ad(zeta)) X``; ``zeta`` must be even with floor >= 1."""
    result = X
    term = X
    m = 1
    bound = 2 * (zeta.q + zeta.p + X.even_degree() + zeta.even_degree() + 4)
    while True:
        term = lie_bracket(zeta, term)
        if term.is_zero():
            return result
        term = term.scale(Fraction(sign, m))
        result = result + term
        m += 1
        if m > bound:
            raise RuntimeError("exp(ad zeta) series failed to terminate")


class SuperCovector:
    """Super 1-form given by its values on the coordinate frame."""

    __slots__ = ("p", "q", "comps")

    def __init__(self, p: int, q: int, comps: Sequence[Superfunction]):
        comps = tuple(comps)
        if len(comps) != p + q:
            raise SignatureError(f"{len(comps)} components for frame of size {p + q}")
        self.p, self.q, self.comps = p, q, comps

    @classmethod
    def zero(cls, p, q):
        return cls(p, q, [Superfunction.zero(p, q)] * (p + q))

    def __eq__(self, other):
        if not isinstance(other, SuperCovector):
            return NotImplemented
        return (self.p, self.q, self.comps) == (other.p, other.q, other.comps)

    def __hash__(self):
        return hash((self.p, self.q, self.comps))

    def __add__(self, other):
        return SuperCovector(self.p, self.q, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return SuperCovector(self.p, self.q, [a - b for a, b in zip(self.comps, other.comps)])

    def __rmul__(self, f):
        if isinstance(f, (int, Fraction)):
            return SuperCovector(self.p, self.q, [c.scale(f) for c in self.comps])
        if isinstance(f, Superfunction):
            return SuperCovector(self.p, self.q, [f * c for c in self.comps])
        return NotImplemented

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)

    def parity_part(self, parity: int) -> "SuperCovector":
        return SuperCovector(self.p, self.q, [
            c.parity_part((parity + frame_parity(self.p, k)) % 2) for k, c in enumerate(self.comps)])

    def parity(self) -> int | None:
        even, odd = self.parity_part(0), self.parity_part(1)
        if odd.is_zero():
            return 0
        if even.is_zero():
            return 1
        return None

    def pair(self, X: SuperVectorField) -> Superfunction:
        out = Superfunction.zero(self.p, self.q)
        for c, a in zip(X.coeffs, self.comps):
            if c and a:
                out = out + c * a
        return out

    __call__ = pair

    def __repr__(self):
        parts = [f"({c})*d{frame_name(self.p, k)[1:]}" for k, c in enumerate(self.comps) if c]
        return " + ".join(parts) if parts else "0"


def de_rham(f: Superfunction) -> SuperCovector:
    return SuperCovector(f.p, f.q, [f.derivative(k) for k in range(f.p + f.q)])


# -- automorphisms --------------------------------------------------------------------


def _poly_matrix_inverse(p: int, q: int, rows: Sequence[Sequence[Superfunction]]) -> list[list[Superfunction]]:
    """Inverse of a square matrix of even polynomials whose determinant is a nonzero constant."""
    n = len(rows)
    if n == 0:
        return []
    if all(not any(sum(e) for (_, e), _c in c.items()) for r in rows for c in r):
        m = sympy.Matrix(n, n, lambda i, j: _const_value(rows[i][j]))
        if m.det() == 0:
            raise ValueError("matrix is singular")
        inv = m.inv()
        return [[Superfunction.constant(p, q, Fraction(int(sympy.fraction(inv[i, j])[0]),
                                                        int(sympy.fraction(inv[i, j])[1])))
                 for j in range(n)] for i in range(n)]
    xs = sympy.symbols(f"x1:{p + 1}")
    m = sympy.Matrix(n, n, lambda i, j: _to_sympy(rows[i][j], xs))
    det = sympy.expand(m.det())
    if det == 0 or not det.is_number:
        raise ValueError("polynomial matrix does not have a constant nonzero determinant")
    adj = m.adjugate()
    return [[_from_sympy(sympy.expand(adj[i, j] / det), xs, p, q) for j in range(n)] for i in range(n)]


def _const_value(f: Superfunction):
    items = list(f.items())
    if not items:
        return sympy.Integer(0)
    if len(items) > 1 or items[0][0][0] != 0:
        raise ValueError("expected a constant")
    c = Fraction(items[0][1])
    return sympy.Rational(c.numerator, c.denominator)


def _to_sympy(f: Superfunction, xs):
    expr = sympy.Integer(0)
    for (m, e), c in f.items():
        if m:
            raise ValueError("expected a polynomial without odd generators")
        c = Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for x, k in zip(xs, e):
            term *= x ** k
        expr += term
    return expr


def _from_sympy(expr, xs, p, q) -> Superfunction:
    if expr == 0:
        return Superfunction.zero(p, q)
    poly = sympy.Poly(expr, *xs) if xs else None
    out = {}
    if poly is None:
        c = sympy.Rational(expr)
        return Superfunction.constant(p, q, Fraction(int(c.p), int(c.q)))
    for monom, coeff in poly.terms():
        c = sympy.Rational(coeff)
        out[(0, tuple(int(k) for k in monom))] = Fraction(int(c.p), int(c.q))
    return Superfunction(p, q, out)


class Automorphism:
    """``f -> exp(zeta)(phi0(f))``.

    ``phi0(x_i) = sum_k even_matrix[i][k] x_k`` (constant invertible matrix) and
    ``phi0(xi_j) = sum_k odd_matrix[j][k] xi_k`` with polynomial entries whose
    determinant is a nonzero constant.  ``zeta`` is even with floor >= 2.
    """

    def __init__(self, p: int, q: int, even_matrix=None, odd_matrix=None,
                 zeta: SuperVectorField | None = None):
        self.p, self.q = p, q
        if even_matrix is None:
            even_matrix = [[1 if i == k else 0 for k in range(p)] for i in range(p)]
        self.even_matrix = tuple(tuple(normalize_scalar(Fraction(v)) for v in row) for row in even_matrix)
        if odd_matrix is None:
            odd_matrix = [[1 if j == k else 0 for k in range(q)] for j in range(q)]
        self.odd_matrix = tuple(tuple(v if isinstance(v, Superfunction) else Superfunction.constant(p, q, v)
                                      for v in row) for row in odd_matrix)
        self.zeta = zeta if zeta is not None else SuperVectorField.zero(p, q)
        if (self.zeta.p, self.zeta.q) != (p, q):
            raise SignatureError("zeta signature mismatch")
        if not self.zeta.is_zero():
            if self.zeta.parity() != 0:
                raise ValueError("filtered part must be an even field")
            if self.zeta.floor() < 2:
                raise ValueError("filtered part must have filtration floor >= 2")
        for row in self.odd_matrix:
            for v in row:
                if v.floor() not in (None, 0) or len(v.degrees()) > 1:
                    raise ValueError("odd frame change must have polynomial entries")
        self._images = None
        self._inverse = None

    @classmethod
    def identity(cls, p: int, q: int) -> "Automorphism":
        return cls(p, q)

    def is_degree_preserving_identity(self) -> bool:
        return self == Automorphism.identity(self.p, self.q) or (
            self.even_matrix == Automorphism.identity(self.p, self.q).even_matrix
            and self.odd_matrix == Automorphism.identity(self.p, self.q).odd_matrix)

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return ((self.p, self.q, self.even_matrix, self.odd_matrix, self.zeta)
                == (other.p, other.q, other.even_matrix, other.odd_matrix, other.zeta))

    def __hash__(self):
        return hash((self.p, self.q, self.even_matrix, self.odd_matrix, self.zeta))

    # -- action ------------------------------------------------------------------

    def _phi0_images(self):
        p, q = self.p, self.q
        xs = [Superfunction.even_var(p, q, k) for k in range(p)]
        xis = [Superfunction.odd_var(p, q, k) for k in range(q)]
        even = []
        for row in self.even_matrix:
            img = Superfunction.zero(p, q)
            for k, v in enumerate(row):
                if v:
                    img = img + xs[k].scale(v)
            even.append(img)
        odd = []
        for row in self.odd_matrix:
            img = Superfunction.zero(p, q)
            for k, v in enumerate(row):
                if v:
                    img = img + v * xis[k]
            odd.append(img)
        return even, odd

    def apply_degree_preserving(self, f: Superfunction) -> Superfunction:
        if self.is_degree_preserving_identity():
            return f
        even, odd = self._phi0_images()
        return f.substitute(even, odd)

    def apply(self, f: Superfunction) -> Superfunction:
        return exp_series(self.zeta, self.apply_degree_preserving(f))

    __call__ = apply

    def coordinate_images(self) -> tuple[list[Superfunction], list[Superfunction]]:
        if self._images is None:
            p, q = self.p, self.q
            self._images = ([self.apply(Superfunction.even_var(p, q, i)) for i in range(p)],
                            [self.apply(Superfunction.odd_var(p, q, j)) for j in range(q)])
        return self._images

    def inverse(self) -> "Automorphism":
        if self._inverse is None:
            p, q = self.p, self.q
            if self.is_degree_preserving_identity():
                inv = Automorphism(p, q, zeta=-self.zeta if not self.zeta.is_zero() else None)
            else:
                L = sympy.Matrix(self.even_matrix)
                if L.det() == 0:
                    raise ValueError("even part is singular")
                Linv = L.inv()
                Linv_rows = [[Fraction(int(sympy.fraction(Linv[i, k])[0]), int(sympy.fraction(Linv[i, k])[1]))
                              for k in range(p)] for i in range(p)]
                tmp = Automorphism(p, q, even_matrix=Linv_rows)
                even_imgs, _ = tmp._phi0_images()
                xis = [Superfunction.odd_var(p, q, k) for k in range(q)]
                shifted = [[v.substitute(even_imgs, xis) for v in row] for row in self.odd_matrix]
                odd_inv = _poly_matrix_inverse(p, q, shifted)
                phi0_inv = Automorphism(p, q, even_matrix=Linv_rows, odd_matrix=odd_inv)
                zeta = SuperVectorField.zero(p, q)
                if not self.zeta.is_zero():
                    zeta = -conjugate_field(phi0_inv, self.zeta)
                inv = Automorphism(p, q, even_matrix=Linv_rows, odd_matrix=odd_inv,
                                   zeta=None if zeta.is_zero() else zeta)
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def to_json(self) -> dict:
        def rat(v):
            v = Fraction(v)
            return {"num": str(v.numerator), "den": str(v.denominator)}
        return {"kind": "automorphism", "p": self.p, "q": self.q,
                "evenMatrix": [[rat(v) for v in row] for row in self.even_matrix],
                "oddMatrix": [[v.to_json() for v in row] for row in self.odd_matrix],
                "zeta": self.zeta.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Automorphism":
        p, q = int(data["p"]), int(data["q"])
        even = [[Fraction(str(v["num"])) / Fraction(str(v.get("den", "1"))) for v in row]
                for row in data["evenMatrix"]]
        odd = [[Superfunction.from_json(p, q, v) for v in row] for row in data["oddMatrix"]]
        zeta = SuperVectorField.from_json(data["zeta"])
        return cls(p, q, even, odd, None if zeta.is_zero() else zeta)

    def __repr__(self):
        return f"Automorphism(p={self.p}, q={self.q}, zeta={self.zeta!r})"


def exp_series(zeta: SuperVectorField, f: Superfunction) -> Superfunction:
    """``sum_m zeta^m(f) / m!``; finite because zeta raises the odd degree."""
    if zeta.is_zero():
        return f
    result = f
    term = f
    m = 1
    bound = zeta.q + max(f.even_degree(), 0) + zeta.even_degree() * (zeta.q + 1) + 2
    while True:
        term = zeta.apply(term)
        if term.is_zero():
            return result
        term = term.scale(Fraction(1, m))
        result = result + term
        m += 1
        if m > bound:
            raise RuntimeError("exp(zeta) series did not terminate within its structural bound")


def exp_automorphism(zeta: SuperVectorField) -> Automorphism:
    if not zeta.is_zero():
        if zeta.parity() != 0:
            raise ValueError("exp is only defined for even fields")
        if zeta.floor() < 2:
            raise ValueError("exp needs a field of filtration floor >= 2")
    return Automorphism(zeta.p, zeta.q, zeta=None if zeta.is_zero() else zeta)


def conjugate_field(phi: Automorphism, X: SuperVectorField) -> SuperVectorField:
    """The field ``f -> Phi(X(Phi^{-1} f))``."""
    if (phi.p, phi.q) != (X.p, X.q):
        raise SignatureError("automorphism and field signatures differ")
    Y = X
    if not phi.is_degree_preserving_identity():
        phi0 = Automorphism(phi.p, phi.q, phi.even_matrix, phi.odd_matrix)
        inv0 = phi0.inverse()
        p, q = X.p, X.q
        coords = [Superfunction.even_var(p, q, i) for i in range(p)] + \
                 [Superfunction.odd_var(p, q, j) for j in range(q)]
        Y = SuperVectorField(p, q, [phi0.apply(X.apply(inv0.apply(z))) for z in coords])
    if phi.zeta.is_zero():
        return Y
    return ad_power_series(phi.zeta, Y)


def log_unipotent(p: int, q: int, images_minus_id) -> SuperVectorField:
    """Derivation ``log(U)`` of a unipotent algebra map ``U = Id + N``.

    ``images_minus_id`` is the map ``N`` on superfunctions.
    """
    coords = [Superfunction.even_var(p, q, i) for i in range(p)] + \
             [Superfunction.odd_var(p, q, j) for j in range(q)]
    coeffs = []
    for z in coords:
        total = Superfunction.zero(p, q)
        term = z
        m = 1
        while True:
            term = images_minus_id(term)
            if term.is_zero():
                break
            total = total + term.scale(Fraction((-1) ** (m + 1), m))
            m += 1
            if m > 2 * (p + q) + 8:
                raise RuntimeError("log series did not terminate")
        coeffs.append(total)
    return SuperVectorField(p, q, coeffs)


def compose(phi1: Automorphism, phi2: Automorphism) -> Automorphism:
    """Normal form of ``Phi1 o Phi2`` (apply ``Phi2`` first)."""
    if (phi1.p, phi1.q) != (phi2.p, phi2.q):
        raise SignatureError("automorphism signatures differ")
    p, q = phi1.p, phi1.q
    phi0 = Automorphism(p, q, phi1.even_matrix, phi1.odd_matrix)
    psi0 = Automorphism(p, q, phi2.even_matrix, phi2.odd_matrix)
    # exp(z1) phi0 exp(z2) psi0 = exp(z1) exp(phi0 z2 phi0^-1) phi0 psi0
    z2 = phi2.zeta if phi0.is_degree_preserving_identity() or phi2.zeta.is_zero() \
        else conjugate_field(phi0, phi2.zeta)
    z1 = phi1.zeta
    if z1.is_zero():
        zeta = z2
    elif z2.is_zero():
        zeta = z1
    elif lie_bracket(z1, z2).is_zero():
        zeta = z1 + z2
    else:
        zeta = log_unipotent(p, q, lambda f: exp_series(z1, exp_series(z2, f)) - f)
    # degree-preserving composite read off from generator images
    xs = [Superfunction.even_var(p, q, i) for i in range(p)]
    xis = [Superfunction.odd_var(p, q, j) for j in range(q)]
    even_rows = []
    for x in xs:
        img = phi0.apply(psi0.apply(x))
        even_rows.append([img.coefficient(0).get(tuple(1 if t == k else 0 for t in range(p)), 0)
                          for k in range(p)])
    odd_rows = []
    for xi in xis:
        img = phi0.apply(psi0.apply(xi))
        row = []
        for k in range(q):
            poly = img.coefficient(1 << k)
            row.append(Superfunction(p, q, {(0, e): c for e, c in poly.items()}))
        odd_rows.append(row)
    return Automorphism(p, q, even_rows, odd_rows, None if zeta.is_zero() else zeta)
