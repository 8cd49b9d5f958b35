"""Endomorphism and metric tensors over the coordinate frame.

An :class:`EndoTensor` stores ``entries[l][k]``, the coefficient of ``e_l`` in
``T(e_k)``.  A tensor of parity ``t`` acts on ``X = sum_k c_k e_k`` by
``T(X) = sum_k (-1)^{t|c_k|} c_k T(e_k)``, so ``T(f X) = (-1)^{|T||f|} f T(X)``.
Composition, exp and log all go through this action.

A :class:`MetricTensor` stores ``B[k][l] = g(e_k, e_l)``; ``g(f X, Y) = f g(X, Y)``
and ``g(X, f Y) = (-1)^{|X||f|} f g(X, Y)``.  ``g_R^{-1}`` applied to a bilinear form
``h`` is the endomorphism ``A`` with ``g_R(A X, Y) = h(X, Y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import SignatureError, Superfunction, popcount
from .fields import (
    Automorphism,
    SuperCovector,
    SuperVectorField,
    conjugate_field,
    de_rham,
    frame_degree,
    frame_name,
    frame_parity,
    lie_bracket,
    _poly_matrix_inverse,
)


class TensorError(ValueError):
    """Input tensor violates a structural precondition."""


def _zero_matrix(p, q):
    z = Superfunction.zero(p, q)
    n = p + q
    return [[z] * n for _ in range(n)]


def _endo_term_degree(p, l, k, mask):
    return popcount(mask) + frame_degree(p, l) - frame_degree(p, k)


def _metric_term_degree(p, k, l, mask):
    return popcount(mask) - frame_degree(p, k) - frame_degree(p, l)


class _FrameMatrix:
    __slots__ = ("p", "q", "entries", "_parts")

    def __init__(self, p: int, q: int, entries: Sequence[Sequence[Superfunction]]):
        n = p + q
        rows = tuple(tuple(r) for r in entries)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise SignatureError(f"expected a {n}x{n} matrix")
        for r in rows:
            for c in r:
                if (c.p, c.q) != (p, q):
                    raise SignatureError("entry signature mismatch")
        self.p, self.q, self.entries = p, q, rows
        self._parts = None

    @property
    def n(self):
        return self.p + self.q

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.p, self.q, self.entries) == (other.p, other.q, other.entries)

    def __hash__(self):
        return hash((type(self).__name__, self.p, self.q, self.entries))

    def _same(self, other):
        if type(other) is not type(self) or (self.p, self.q) != (other.p, other.q):
            raise SignatureError("tensor kind or signature mismatch")

    def __add__(self, other):
        self._same(other)
        return type(self)(self.p, self.q, [[a + b for a, b in zip(r, s)]
                                           for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.p, self.q, [[a - b for a, b in zip(r, s)]
                                           for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return type(self)(self.p, self.q, [[-a for a in r] for r in self.entries])

    def scale(self, c):
        return type(self)(self.p, self.q, [[a.scale(c) for a in r] for r in self.entries])

    def __rmul__(self, f):
        if isinstance(f, (int, Fraction)):
            return self.scale(f)
        if isinstance(f, Superfunction):
            return type(self)(self.p, self.q, [[f * a for a in r] for r in self.entries])
        return NotImplemented

    def is_zero(self) -> bool:
        return all(c.is_zero() for r in self.entries for c in r)

    def evaluate_at_point(self, point):
        return type(self)(self.p, self.q, [[a.evaluate_at_point(point) for a in r] for r in self.entries])

    def even_degree(self) -> int:
        return max(c.even_degree() for r in self.entries for c in r)

    def _term_degree(self, i, j, mask):
        raise NotImplementedError

    def degrees(self) -> set[int]:
        out = set()
        for i, r in enumerate(self.entries):
            for j, c in enumerate(r):
                for (m, _e), _c in c.items():
                    out.add(self._term_degree(i, j, m))
        return out

    def floor(self) -> int | None:
        d = self.degrees()
        return min(d) if d else None

    def _offset(self, i: int, j: int) -> int:
        """Degree of a term in entry ``(i, j)`` minus its odd-monomial size."""
        return self._term_degree(i, j, 0)

    def _select(self, keep: Callable[[int], bool]):
        """Keep the terms whose degree satisfies ``keep``; zero entries are skipped."""
        p, q = self.p, self.q
        rows = []
        for i, r in enumerate(self.entries):
            row = []
            for j, c in enumerate(r):
                if not c:
                    row.append(c)
                    continue
                off = self._offset(i, j)
                kept = {key: v for key, v in c.items() if keep(popcount(key[0]) + off)}
                row.append(c if len(kept) == len(c) else Superfunction._raw(p, q, kept))
            rows.append(row)
        return type(self)(p, q, rows)

    def degree_part(self, d: int):
        return self._select(lambda deg: deg == d)

    def degree_range(self, lo: int, hi: int | None = None):
        """Terms of degree in ``[lo, hi)`` (``hi=None`` for no upper bound)."""
        return self._select(lambda deg: deg >= lo and (hi is None or deg < hi))

    def parity_violations(self, parity: int = 0) -> list[tuple[int, int]]:
        bad = []
        for i, r in enumerate(self.entries):
            for j, c in enumerate(r):
                want = (parity + frame_parity(self.p, i) + frame_parity(self.p, j)) % 2
                if not c.parity_part(1 - want).is_zero():
                    bad.append((i, j))
        return bad

    def to_json(self) -> dict:
        return {"kind": self.KIND, "p": self.p, "q": self.q,
                "entries": [[c.to_json() for c in r] for r in self.entries]}

    def __repr__(self):
        lines = [f"{type(self).__name__}(p={self.p}, q={self.q})"]
        for i, r in enumerate(self.entries):
            for j, c in enumerate(r):
                if c:
                    lines.append(f"  [{frame_name(self.p, i)}, {frame_name(self.p, j)}] = {c}")
        return "\n".join(lines)


class EndoTensor(_FrameMatrix):
    KIND = "endo"

    @classmethod
    def identity(cls, p, q) -> "EndoTensor":
        m = _zero_matrix(p, q)
        for i in range(p + q):
            m[i][i] = Superfunction.constant(p, q, 1)
        return cls(p, q, m)

    @classmethod
    def zero(cls, p, q) -> "EndoTensor":
        return cls(p, q, _zero_matrix(p, q))

    @classmethod
    def from_columns(cls, columns: Sequence[SuperVectorField]) -> "EndoTensor":
        p, q = columns[0].p, columns[0].q
        n = p + q
        return cls(p, q, [[columns[k].coeffs[l] for k in range(n)] for l in range(n)])

    @classmethod
    def from_constant(cls, p, q, matrix) -> "EndoTensor":
        return cls(p, q, [[Superfunction.constant(p, q, v) for v in row] for row in matrix])

    def _term_degree(self, i, j, mask):
        return _endo_term_degree(self.p, i, j, mask)

    def column(self, k: int) -> SuperVectorField:
        return SuperVectorField(self.p, self.q, [self.entries[l][k] for l in range(self.n)])

    def columns(self) -> list[SuperVectorField]:
        return [self.column(k) for k in range(self.n)]

    def parity_parts(self) -> tuple["EndoTensor", "EndoTensor"]:
        if self._parts is None:
            odd = self.parity_part(1)
            self._parts = (self, odd) if odd.is_zero() else (self.parity_part(0), odd)
        return self._parts

    def parity_part(self, parity: int) -> "EndoTensor":
        return EndoTensor(self.p, self.q, [
            [c.parity_part((parity + frame_parity(self.p, i) + frame_parity(self.p, j)) % 2)
             for j, c in enumerate(r)] for i, r in enumerate(self.entries)])

    def parity(self) -> int | None:
        even, odd = self.parity_parts()
        if odd.is_zero():
            return 0
        if even.is_zero():
            return 1
        return None

    def apply(self, X: SuperVectorField) -> SuperVectorField:
        if (X.p, X.q) != (self.p, self.q):
            raise SignatureError("tensor and field signatures differ")
        p, q = self.p, self.q
        out = [Superfunction.zero(p, q)] * self.n
        for t, part in enumerate(self.parity_parts()):
            if part.is_zero():
                continue
            for k, c in enumerate(X.coeffs):
                if not c:
                    continue
                cc = c.grade_involution() if t else c
                for l in range(self.n):
                    e = part.entries[l][k]
                    if e:
                        out[l] = out[l] + cc * e
        return SuperVectorField(p, q, out)

    __call__ = apply

    def compose(self, other: "EndoTensor") -> "EndoTensor":
        """``self o other``."""
        self._same(other)
        return EndoTensor.from_columns([self.apply(col) for col in other.columns()])

    def __matmul__(self, other):
        return self.compose(other)

    def power(self, m: int) -> "EndoTensor":
        out = EndoTensor.identity(self.p, self.q)
        for _ in range(m):
            out = self.compose(out)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "EndoTensor":
        return _tensor_from_json(cls, data)


class MetricTensor(_FrameMatrix):
    KIND = "metric"

    @classmethod
    def from_constant(cls, p, q, matrix) -> "MetricTensor":
        return cls(p, q, [[Superfunction.constant(p, q, v) for v in row] for row in matrix])

    def _term_degree(self, i, j, mask):
        return _metric_term_degree(self.p, i, j, mask)

    def pair(self, X: SuperVectorField, Y: SuperVectorField) -> Superfunction:
        """``g(X, Y)`` for the even bilinear form (extended bilinearly)."""
        p, q = self.p, self.q
        out = Superfunction.zero(p, q)
        for k, c in enumerate(X.coeffs):
            if not c:
                continue
            fk = frame_parity(p, k)
            for l, d in enumerate(Y.coeffs):
                if not d:
                    continue
                b = self.entries[k][l]
                if not b:
                    continue
                dd = d.grade_involution() if fk else d
                out = out + c * dd * b
        return out

    __call__ = pair

    def supersymmetry_violations(self) -> list[tuple[int, int]]:
        bad = []
        for k in range(self.n):
            for l in range(k, self.n):
                s = frame_parity(self.p, k) * frame_parity(self.p, l)
                a, b = self.entries[k][l], self.entries[l][k]
                if a != (-b if s else b):
                    bad.append((k, l))
        return bad

    def reduction(self) -> "MetricTensor":
        """Degree 0 plus degree 2 part ``g_0 + g_2``."""
        return self._select(lambda deg: deg in (0, 2))

    def body_matrix(self) -> list[list[Superfunction]]:
        return [[c.body() for c in r] for r in self.entries]

    def is_nondegenerate(self) -> bool:
        try:
            _body_inverse(self)
        except ValueError:
            return False
        return True

    @classmethod
    def from_json(cls, data: dict) -> "MetricTensor":
        return _tensor_from_json(cls, data)


def _tensor_from_json(cls, data):
    kind = data.get("kind")
    if kind != cls.KIND:
        raise ValueError(f"expected kind {cls.KIND!r}, got {kind!r}")
    p, q = int(data["p"]), int(data["q"])
    entries = data["entries"]
    n = p + q
    if not isinstance(entries, list) or len(entries) != n or any(
            not isinstance(r, list) or len(r) != n for r in entries):
        raise ValueError(f"entries must be a {n}x{n} matrix for p={p}, q={q}")
    return cls(p, q, [[Superfunction.from_json(p, q, c) for c in r] for r in entries])


def tensor_from_json(data: dict) -> EndoTensor | MetricTensor:
    kind = data.get("kind")
    if kind == "endo":
        return EndoTensor.from_json(data)
    if kind == "metric":
        return MetricTensor.from_json(data)
    raise ValueError(f"unknown tensor kind {kind!r}")


# -- plain matrix helpers (ordered products) ----------------------------------------


def _matmul(a, b, p, q):
    n = len(a)
    z = Superfunction.zero(p, q)
    out = []
    for i in range(n):
        row = []
        for k in range(n):
            s = z
            for j in range(n):
                x, y = a[i][j], b[j][k]
                if x and y:
                    s = s + x * y
            row.append(s)
        out.append(row)
    return out


def _body_inverse(g: MetricTensor):
    """Exact inverse of the body, block by block (even-even and odd-odd)."""
    p, q = g.p, g.q
    body = g.body_matrix()
    for k in range(p + q):
        for l in range(p + q):
            if frame_parity(p, k) != frame_parity(p, l) and body[k][l]:
                raise ValueError("body has mixed entries")
    even = [[body[k][l] for l in range(p)] for k in range(p)]
    odd = [[body[p + k][p + l] for l in range(q)] for k in range(q)]
    inv_e = _poly_matrix_inverse(p, q, even) if p else []
    inv_o = _poly_matrix_inverse(p, q, odd) if q else []
    out = _zero_matrix(p, q)
    for k in range(p):
        for l in range(p):
            out[k][l] = inv_e[k][l]
    for k in range(q):
        for l in range(q):
            out[p + k][p + l] = inv_o[k][l]
    return out


def metric_matrix_inverse(g: MetricTensor) -> list[list[Superfunction]]:
    """Two-sided inverse ``C`` of ``B`` (ordered products) via a finite Neumann series."""
    p, q = g.p, g.q
    try:
        b0inv = _body_inverse(g)
    except ValueError as exc:
        raise TensorError(f"reduction degenerate: {exc}") from exc
    nil = [[c - c.body() for c in r] for r in g.entries]
    step = _matmul(b0inv, nil, p, q)
    step = [[-c for c in r] for r in step]
    term = b0inv
    total = b0inv
    for _ in range(q + 2):
        term = _matmul(step, term, p, q)
        if all(not c for r in term for c in r):
            break
        total = [[a + b for a, b in zip(r, s)] for r, s in zip(total, term)]
    return total


def form_from_endo(g: MetricTensor, A: EndoTensor) -> MetricTensor:
    """Bilinear form ``(X, Y) -> g(A X, Y)``."""
    p, q = g.p, g.q
    n = p + q
    z = Superfunction.zero(p, q)
    out = []
    for k in range(n):
        row = []
        for l in range(n):
            s = z
            for m in range(n):
                a, b = A.entries[m][k], g.entries[m][l]
                if a and b:
                    s = s + a * b
            row.append(s)
        out.append(row)
    return MetricTensor(p, q, out)


def endo_from_form(g: MetricTensor, h: MetricTensor, inverse=None) -> EndoTensor:
    """The endomorphism ``A`` with ``g(A X, Y) = h(X, Y)``, i.e. ``g^{-1} h``."""
    p, q = g.p, g.q
    n = p + q
    C = inverse if inverse is not None else metric_matrix_inverse(g)
    z = Superfunction.zero(p, q)
    out = [[z] * n for _ in range(n)]
    for k in range(n):
        for nn in range(n):
            s = z
            for l in range(n):
                a, b = h.entries[k][l], C[l][nn]
                if a and b:
                    s = s + a * b
            out[nn][k] = s
    return EndoTensor(p, q, out)


# -- exp / log -----------------------------------------------------------------------


def nilpotent_exp(Y: EndoTensor) -> EndoTensor:
    p, q = Y.p, Y.q
    result = EndoTensor.identity(p, q)
    term = EndoTensor.identity(p, q)
    m = 1
    while True:
        term = Y.compose(term).scale(Fraction(1, m))
        if term.is_zero():
            return result
        result = result + term
        m += 1
        if m > q + 3:
            raise TensorError("exp series of a non-nilpotent endomorphism")


def nilpotent_log(U: EndoTensor) -> EndoTensor:
    """``log(Id + N)`` for ``N = U - Id`` nilpotent."""
    p, q = U.p, U.q
    N = U - EndoTensor.identity(p, q)
    result = EndoTensor.zero(p, q)
    term = EndoTensor.identity(p, q)
    m = 1
    while True:
        term = N.compose(term)
        if term.is_zero():
            return result
        result = result + term.scale(Fraction((-1) ** (m + 1), m))
        m += 1
        if m > q + 3:
            raise TensorError("log series of a non-unipotent endomorphism")


def degree_decompose(T: EndoTensor | MetricTensor) -> dict[int, EndoTensor | MetricTensor]:
    return {d: T.degree_part(d) for d in sorted(T.degrees())}


def recompose(parts: dict) -> EndoTensor | MetricTensor:
    items = list(parts.values())
    out = items[0]
    for t in items[1:]:
        out = out + t
    return out


# -- almost complex structures ----------------------------------------------------------


def _minus_id(p, q):
    return -EndoTensor.identity(p, q)


def nilpotent_split_acs(J: EndoTensor) -> tuple[EndoTensor, EndoTensor]:
    """``J = J_R exp(Y)`` with ``J_R`` the degree-0 part."""
    if J.parity_violations(0):
        raise TensorError("not even")
    p, q = J.p, J.q
    JR = J.degree_part(0)
    if JR.compose(JR) != _minus_id(p, q):
        raise TensorError("reduction not almost complex")
    JN = -(JR.compose(J)) - EndoTensor.identity(p, q)
    return JR, nilpotent_log(EndoTensor.identity(p, q) + JN)


def recompose_acs(JR: EndoTensor, Y: EndoTensor) -> EndoTensor:
    return JR.compose(nilpotent_exp(Y))


@dataclass
class ValidityReport:
    valid: bool
    checks: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"valid": self.valid, "checks": dict(self.checks), "witnesses": dict(self.witnesses)}


def _first_nonzero(T):
    for i, r in enumerate(T.entries):
        for j, c in enumerate(r):
            if c:
                return {"row": frame_name(T.p, i), "col": frame_name(T.p, j), "value": c.to_json()}
    return None


def check_acs(J: EndoTensor) -> ValidityReport:
    p, q = J.p, J.q
    checks, wit = {}, {}
    bad = J.parity_violations(0)
    checks["even"] = not bad
    if bad:
        wit["even"] = [[frame_name(p, i), frame_name(p, j)] for i, j in bad]
    defect = J.compose(J) + EndoTensor.identity(p, q)
    checks["square_is_minus_id"] = defect.is_zero()
    if not defect.is_zero():
        wit["square_is_minus_id"] = _first_nonzero(defect)
    JR = J.degree_part(0)
    rdef = JR.compose(JR) + EndoTensor.identity(p, q)
    checks["reduction_square_is_minus_id"] = rdef.is_zero()
    anti_ok = False
    if rdef.is_zero() and not bad:
        _, Y = nilpotent_split_acs(J)
        anti = Y.compose(JR) + JR.compose(Y)
        anti_ok = anti.is_zero()
        if not anti_ok:
            wit["nilpotent_anticommutes"] = _first_nonzero(anti)
    else:
        wit["reduction_square_is_minus_id"] = _first_nonzero(rdef)
    checks["nilpotent_anticommutes"] = anti_ok
    route2 = checks["reduction_square_is_minus_id"] and anti_ok
    checks["routes_agree"] = checks["square_is_minus_id"] == route2
    valid = checks["even"] and checks["square_is_minus_id"] and route2
    return ValidityReport(valid, checks, wit)


def F_acs(JR: EndoTensor, gamma: EndoTensor) -> EndoTensor:
    """``gamma + J_R gamma J_R``."""
    if JR.compose(JR) != _minus_id(JR.p, JR.q):
        raise TensorError("J_R does not square to -Id")
    return gamma + JR.compose(gamma.compose(JR))


def ad_columns(zeta: SuperVectorField) -> list[SuperVectorField]:
    p, q = zeta.p, zeta.q
    return [lie_bracket(zeta, SuperVectorField.frame(p, q, k)) for k in range(p + q)]


def F_acs_ad(JR: EndoTensor, zeta: SuperVectorField) -> EndoTensor:
    """``F_{J_R}(ad zeta)``; module-linear because ``J_R^2 = -Id``."""
    return EndoTensor.from_columns([F_acs_ad_action(JR, zeta, SuperVectorField.frame(zeta.p, zeta.q, k))
                                    for k in range(zeta.p + zeta.q)])


def F_acs_ad_action(JR: EndoTensor, zeta: SuperVectorField, X: SuperVectorField) -> SuperVectorField:
    """``[zeta, X] + J_R [zeta, J_R X]`` evaluated on an arbitrary field."""
    return lie_bracket(zeta, X) + JR.apply(lie_bracket(zeta, JR.apply(X)))


def commutator_ad(zeta: SuperVectorField, T: EndoTensor) -> EndoTensor:
    """``[ad zeta, T]`` for even ``zeta`` and even ``T``: ``X -> [zeta, T X] - T [zeta, X]``."""
    p, q = zeta.p, zeta.q
    cols = []
    for k in range(p + q):
        e = SuperVectorField.frame(p, q, k)
        cols.append(lie_bracket(zeta, T.apply(e)) - T.apply(lie_bracket(zeta, e)))
    return EndoTensor.from_columns(cols)


# -- metrics -----------------------------------------------------------------------------


def nilpotent_split_metric(g: MetricTensor) -> tuple[MetricTensor, EndoTensor]:
    if g.parity_violations(0):
        raise TensorError("not a metric candidate: not even")
    if g.supersymmetry_violations():
        raise TensorError("not a metric candidate: supersymmetry violated")
    gR = g.reduction()
    inv = metric_matrix_inverse(gR)
    A = endo_from_form(gR, g, inv)
    return gR, nilpotent_log(A)


def recompose_metric(gR: MetricTensor, W: EndoTensor) -> MetricTensor:
    return form_from_endo(gR, nilpotent_exp(W))


def adjoint(gR: MetricTensor, gamma: EndoTensor, inverse=None) -> EndoTensor:
    """``g_R^{-1} gamma^* g_R``: ``g_R(adj X, Y) = (-1)^{|gamma||X|} g_R(X, gamma Y)``."""
    p, q = gR.p, gR.q
    n = p + q
    out = EndoTensor.zero(p, q)
    frames = [SuperVectorField.frame(p, q, k) for k in range(n)]
    for t in (0, 1):
        part = gamma.parity_part(t)
        if part.is_zero():
            continue
        images = [part.apply(e) for e in frames]
        rows = []
        for k in range(n):
            sign = -1 if t and frame_parity(p, k) else 1
            rows.append([gR.pair(frames[k], images[l]).scale(sign) for l in range(n)])
        out = out + endo_from_form(gR, MetricTensor(p, q, rows), inverse)
    return out


def F_metric(gR: MetricTensor, gamma: EndoTensor, inverse=None) -> EndoTensor:
    """``gamma + g_R^{-1} gamma^* g_R``."""
    return gamma + adjoint(gR, gamma, inverse)


def lie_derivative_form(zeta: SuperVectorField, g: MetricTensor) -> MetricTensor:
    """``(L_zeta g)(X, Y) = zeta(g(X, Y)) - g([zeta, X], Y) - g(X, [zeta, Y])`` for even zeta."""
    p, q = g.p, g.q
    n = p + q
    ad = ad_columns(zeta)
    frames = [SuperVectorField.frame(p, q, k) for k in range(n)]
    rows = []
    for k in range(n):
        row = []
        for l in range(n):
            v = zeta.apply(g.entries[k][l]) - g.pair(ad[k], frames[l]) - g.pair(frames[k], ad[l])
            row.append(v)
        rows.append(row)
    return MetricTensor(p, q, rows)


def G_metric(gR: MetricTensor, zeta: SuperVectorField, inverse=None) -> EndoTensor:
    """``ad(zeta) + g_R^{-1}(ad^*(zeta) - zeta) g_R``, computed as ``-g_R^{-1}(L_zeta g_R)``."""
    if not zeta.is_zero() and zeta.parity() != 0:
        raise TensorError("G is defined for even fields")
    return endo_from_form(gR, -lie_derivative_form(zeta, gR), inverse)


def G_metric_action(gR: MetricTensor, zeta: SuperVectorField, X: SuperVectorField,
                    inverse=None) -> SuperVectorField:
    return G_metric(gR, zeta, inverse).apply(X)


def self_adjoint_defect(gR: MetricTensor, W: EndoTensor) -> MetricTensor:
    """``g_R(W X, Y) - g_R(X, W Y)`` on the frame."""
    p, q = gR.p, gR.q
    n = p + q
    frames = [SuperVectorField.frame(p, q, k) for k in range(n)]
    images = [W.apply(e) for e in frames]
    return MetricTensor(p, q, [[gR.pair(images[k], frames[l]) - gR.pair(frames[k], images[l])
                                for l in range(n)] for k in range(n)])


def check_metric(g: MetricTensor) -> ValidityReport:
    p = g.p
    checks, wit = {}, {}
    bad = g.parity_violations(0)
    checks["even"] = not bad
    if bad:
        wit["even"] = [[frame_name(p, i), frame_name(p, j)] for i, j in bad]
    sym = g.supersymmetry_violations()
    checks["supersymmetric"] = not sym
    if sym:
        wit["supersymmetric"] = [[frame_name(p, i), frame_name(p, j)] for i, j in sym]
    gR = g.reduction()
    checks["reduction_nondegenerate"] = gR.is_nondegenerate()
    checks["nilpotent_symmetric"] = False
    if all(checks.values()) or (checks["even"] and checks["supersymmetric"] and checks["reduction_nondegenerate"]):
        _, W = nilpotent_split_metric(g)
        if W.is_zero():
            checks["nilpotent_symmetric"] = True
        else:
            k2 = W.floor()
            defect = self_adjoint_defect(gR, W)
            fl = defect.floor()
            checks["nilpotent_symmetric"] = fl is None or fl >= 2 * k2 + 2
            wit["nilpotent_floor"] = k2
            wit["symmetry_defect_floor"] = fl
    valid = all(checks.values())
    return ValidityReport(valid, checks, wit)


# -- rank one, pullbacks, Theta --------------------------------------------------------


def rank_one(chi: SuperVectorField, alpha: SuperCovector) -> EndoTensor:
    """``(chi (x) alpha)(X) = (-1)^{|chi||alpha| + (|chi|+|alpha|)|X|} alpha(X) chi``."""
    p, q = chi.p, chi.q
    n = p + q
    out = EndoTensor.zero(p, q)
    for a in (0, 1):
        ca = chi.parity_part(a)
        if ca.is_zero():
            continue
        for b in (0, 1):
            al = alpha.parity_part(b)
            if al.is_zero():
                continue
            cols = []
            for k in range(n):
                sign = (-1) ** (a * b + (a + b) * frame_parity(p, k))
                cols.append(al.comps[k].scale(sign) * ca)
            out = out + EndoTensor.from_columns(cols)
    return out


def pullback_field_map(phi: Automorphism, J: EndoTensor) -> EndoTensor:
    """``chi -> Phi o J(Phi^{-1} o chi o Phi) o Phi^{-1}`` on the frame."""
    p, q = J.p, J.q
    inv = phi.inverse()
    cols = []
    for k in range(p + q):
        e = SuperVectorField.frame(p, q, k)
        cols.append(conjugate_field(phi, J.apply(conjugate_field(inv, e))))
    return EndoTensor.from_columns(cols)


def pullback_acs(phi: Automorphism, J: EndoTensor) -> EndoTensor:
    return pullback_field_map(phi, J)


def pullback_metric(phi: Automorphism, g: MetricTensor) -> MetricTensor:
    p, q = g.p, g.q
    n = p + q
    inv = phi.inverse()
    pulled = [conjugate_field(inv, SuperVectorField.frame(p, q, k)) for k in range(n)]
    return MetricTensor(p, q, [[phi.apply(g.pair(pulled[k], pulled[l])) for l in range(n)]
                               for k in range(n)])


def eq1_truncation(zeta: SuperVectorField, g: MetricTensor) -> MetricTensor:
    """``g - g(ad zeta (x) Id + Id (x) ad zeta) + zeta g``."""
    return g + lie_derivative_form(zeta, g)


def theta_identity_check(chi: SuperVectorField, f: Superfunction) -> EndoTensor:
    """``chi (x) d f - (-1)^{|f||chi|} (f ad(chi) - ad(f chi))`` on the frame; should vanish."""
    pc, pf = chi.parity(), f.parity()
    if pc is None or pf is None:
        raise TensorError("theta identity needs homogeneous arguments")
    p, q = chi.p, chi.q
    fchi = f * chi
    cols = []
    for k in range(p + q):
        e = SuperVectorField.frame(p, q, k)
        cols.append(f * lie_bracket(chi, e) - lie_bracket(fchi, e))
    rhs = EndoTensor.from_columns(cols)
    if pc * pf:
        rhs = -rhs
    return rank_one(chi, de_rham(f)) - rhs
