"""Degree-by-degree splitting of almost complex structures and metrics.

At degree ``2j`` the unknown is an even field ``zeta`` of degree ``2j`` whose
coefficients are polynomials of even degree ``<= D``.  Pulling back along
``exp(zeta)`` changes the lowest nilpotent block by ``-F_{J_R}(ad zeta)``
(resp. ``-G_{g_R}(zeta)``), so the systems solved are

    F_{J_R}(ad zeta) = Y_{2j}          (acs)
    G_{g_R}(zeta)_{2j} = W_{2j}        (metric)
    L_zeta g_0 = 0                     (metric side rows)

``G_{g_R}(zeta)`` itself also has a degree ``2j+2`` part coming from ``g_2``;
only its degree ``2j`` part enters the transformation law.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import Superfunction, mask_to_indices, monomials, odd_masks, popcount
from .fields import (
    Automorphism,
    SuperVectorField,
    compose,
    exp_automorphism,
    frame_degree,
    frame_name,
    frame_parity,
)
from .linsolve import solve_sparse
from .tensors import (
    EndoTensor,
    MetricTensor,
    TensorError,
    F_acs_ad,
    G_metric,
    check_acs,
    check_metric,
    form_from_endo,
    lie_derivative_form,
    metric_matrix_inverse,
    nilpotent_split_acs,
    nilpotent_split_metric,
    pullback_acs,
    pullback_metric,
    self_adjoint_defect,
)

OBSTRUCTION_QUALIFIER = ("no polynomial solution with coefficient degree <= D; "
                         "non-polynomial smooth solutions are not excluded")


class SplitInputError(ValueError):
    """Input tensor fails validity or homogeneity preconditions."""


# -- unknowns ----------------------------------------------------------------------------


def unknown_basis(p: int, q: int, degree: int, bound: int, frames: Sequence[int] | None = None):
    """``(frame k, odd mask, exponents)`` for even fields of Z-degree ``degree``."""
    out = []
    for k in (range(p + q) if frames is None else frames):
        odd_deg = degree + (1 if k >= p else 0)
        if odd_deg > q:
            continue
        for mask in odd_masks(q, odd_deg):
            for exps in monomials(p, bound):
                out.append((k, mask, exps))
    return out


def _basis_field(p, q, k, mask, exps) -> SuperVectorField:
    return SuperVectorField.frame(p, q, k, Superfunction(p, q, {(mask, exps): 1}))


def _ad_matrix_column(p, q, k, mono: Superfunction):
    """``[m e_k, e_l] = -d_l(m) e_k`` for the even field ``m e_k``; returns ``[-d_l m]``."""
    return [-mono.derivative(l) for l in range(p + q)]


def _is_constant(T) -> bool:
    return all(c.even_degree() <= 0 and c.floor() in (None, 0) for r in T.entries for c in r)


# -- systems -----------------------------------------------------------------------------


@dataclass
class ObstructionSystem:
    structure: str
    p: int
    q: int
    degree: int
    bound: int
    unknowns: list
    rows: list
    rhs: list
    row_keys: list
    side_rows: int = 0

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def field_from(self, values: dict) -> SuperVectorField:
        p, q = self.p, self.q
        terms = [dict() for _ in range(p + q)]
        for u, v in values.items():
            k, mask, exps = self.unknowns[u]
            terms[k][(mask, exps)] = v
        return SuperVectorField(p, q, [Superfunction(p, q, t) for t in terms])


@dataclass
class SolveResult:
    solvable: bool
    witness: SuperVectorField | None
    inconsistent_row: tuple | None = None
    rank: int = 0


def _collect(images, target_entries, p, q, extra_keys=()):
    """Turn per-unknown frame matrices into sparse rows keyed by (tag, i, j, mask, exps)."""
    rows: dict = {}
    for u, (tag_entries) in enumerate(images):
        for tag, entries in tag_entries:
            for i, r in enumerate(entries):
                for j, c in enumerate(r):
                    if not c:
                        continue
                    for key, v in c.items():
                        rows.setdefault((tag, i, j) + key, {})[u] = v
    rhs: dict = {}
    for tag, entries in target_entries:
        for i, r in enumerate(entries):
            for j, c in enumerate(r):
                for key, v in c.items():
                    rhs[(tag, i, j) + key] = v
    keys = sorted(set(rows) | set(rhs), key=lambda k: (k[0], k[1], k[2], k[3], k[4]))
    return keys, [rows.get(k, {}) for k in keys], [rhs.get(k, 0) for k in keys]


def _check_homogeneous(T: EndoTensor, degree: int, what: str):
    if T.parity_violations(0):
        raise SplitInputError(f"{what} is not even")
    degs = T.degrees()
    if degs and degs != {degree}:
        raise SplitInputError(f"{what} is not homogeneous of degree {degree}: degrees {sorted(degs)}")


def default_bound(T) -> int:
    return (T.even_degree() if not T.is_zero() else 0) + 1


def constant_matrix(T) -> list[list] | None:
    """Numeric entries of a constant frame matrix, or ``None``."""
    if not _is_constant(T):
        return None
    zero_key = (0, (0,) * T.p)
    return [[c.terms.get(zero_key, 0) for c in r] for r in T.entries]


def acs_image(JR: EndoTensor, zeta: SuperVectorField, J: list | None | bool = False) -> EndoTensor:
    """``F_{J_R}(ad zeta)``, with a direct formula when ``J_R`` is constant and ``zeta = m e_i``.

    ``J`` may carry the precomputed :func:`constant_matrix` of ``J_R``.
    """
    if J is False:
        J = constant_matrix(JR)
    nz = [i for i, c in enumerate(zeta.coeffs) if c]
    if J is None or len(nz) != 1:
        return F_acs_ad(JR, zeta)
    p, q = JR.p, JR.q
    n = p + q
    i = nz[0]
    A = _ad_matrix_column(p, q, i, zeta.coeffs[i])
    z = Superfunction.zero(p, q)
    s = [z] * n  # s_c = sum_l J_lc A_l
    for c in range(n):
        acc = z
        for l in range(n):
            if J[l][c] and A[l]:
                acc = acc + A[l].scale(J[l][c])
        s[c] = acc
    entries = [[z] * n for _ in range(n)]
    for c in range(n):
        entries[i][c] = A[c]
        if s[c]:
            for r in range(n):
                if J[r][i]:
                    entries[r][c] = entries[r][c] + s[c].scale(J[r][i])
    return EndoTensor(p, q, entries)


def build_system_acs(JR: EndoTensor, Y2j: EndoTensor, D: int | None = None,
                     degree: int | None = None) -> ObstructionSystem:
    p, q = JR.p, JR.q
    if degree is None:
        degs = Y2j.degrees()
        if len(degs) > 1:
            raise SplitInputError(f"target is not homogeneous: degrees {sorted(degs)}")
        degree = degs.pop() if degs else 2
    _check_homogeneous(Y2j, degree, "target")
    if not (Y2j.compose(JR) + JR.compose(Y2j)).is_zero():
        raise SplitInputError("target does not anticommute with J_R")
    D = default_bound(Y2j) if D is None else D
    unknowns = unknown_basis(p, q, degree, D)
    J = constant_matrix(JR)
    images = []
    for k, mask, exps in unknowns:
        T = acs_image(JR, _basis_field(p, q, k, mask, exps), J)
        images.append([("F", T.entries)])
    keys, rows, rhs = _collect(images, [("F", Y2j.entries)], p, q)
    return ObstructionSystem("acs", p, q, degree, D, unknowns, rows, rhs, keys)


def _lie_form_const(p, q, A, B):
    """``L_zeta g`` for ``zeta = m e_k`` with ``[zeta, e_l] = A[l] e_k`` and numeric ``B``."""
    n = p + q
    z = Superfunction.zero(p, q)
    out = [[z] * n for _ in range(n)]
    k = A.frame
    for a in range(n):
        if not A[a]:
            continue
        for b in range(n):
            if B[k][b]:
                out[a][b] = out[a][b] - A[a].scale(B[k][b])
    for b in range(n):
        if not A[b]:
            continue
        for a in range(n):
            if B[a][k]:
                coeff = A.involuted(b) if frame_parity(p, a) else A[b]
                out[a][b] = out[a][b] - coeff.scale(B[a][k])
    return out


class _AdColumn(list):
    """``[-d_l m]`` for ``zeta = m e_k``, with cached grade involutions."""

    def __init__(self, p, q, k, mono):
        super().__init__(_ad_matrix_column(p, q, k, mono))
        self.frame = k
        self._inv = {}

    def involuted(self, l):
        if l not in self._inv:
            self._inv[l] = self[l].grade_involution()
        return self._inv[l]


def _metric_image(gR, inverse, k, mono, degree, numeric):
    """``G_{g_R}(m e_k)`` in degree ``degree`` and ``L_{m e_k} g_0``.

    ``numeric`` holds the constant matrices ``(g_R, g_0, g_R^{-1})`` when ``g_R`` is
    constant, else ``None``.
    """
    p, q = gR.p, gR.q
    n = p + q
    if numeric is None:
        zeta = SuperVectorField.frame(p, q, k, mono)
        G = G_metric(gR, zeta, inverse).degree_part(degree)
        return G.entries, lie_derivative_form(zeta, gR.degree_part(0)).entries
    Bc, B0c, inv = numeric
    A = _AdColumn(p, q, k, mono)
    L = _lie_form_const(p, q, A, Bc)
    z = Superfunction.zero(p, q)
    out = [[z] * n for _ in range(n)]
    for a in range(n):
        for l in range(n):
            h = L[a][l]
            if not h:
                continue
            # entry (nn, a) of G has degree popcount + frameDeg(nn) - frameDeg(a)
            by_target = {}
            for nn in range(n):
                c = inv[l][nn]
                if not c:
                    continue
                want = degree - frame_degree(p, nn) + frame_degree(p, a)
                if want not in by_target:
                    by_target[want] = Superfunction._raw(p, q, {
                        key: v for key, v in h.items() if popcount(key[0]) == want})
                part = by_target[want]
                if part:
                    out[nn][a] = out[nn][a] - part.scale(c)
    return out, _lie_form_const(p, q, A, B0c)


def build_system_metric(gR: MetricTensor, W2j: EndoTensor, D: int | None = None,
                        degree: int | None = None) -> ObstructionSystem:
    """Rows for ``G_{g_R}(zeta)_{2j} = W_{2j}`` plus ``L_zeta g_0 = 0``."""
    p, q = gR.p, gR.q
    if degree is None:
        degs = W2j.degrees()
        if len(degs) > 1:
            raise SplitInputError(f"target is not homogeneous: degrees {sorted(degs)}")
        degree = degs.pop() if degs else 2
    _check_homogeneous(W2j, degree, "target")
    if not self_adjoint_defect(gR, W2j).degree_part(degree).is_zero():
        raise SplitInputError("target outside the admissible space: not g_R-symmetric in its lowest degree")
    D = default_bound(W2j) if D is None else D
    unknowns = unknown_basis(p, q, degree, D)
    inverse = metric_matrix_inverse(gR)
    numeric = None
    if _is_constant(gR):
        numeric = (constant_matrix(gR), constant_matrix(gR.degree_part(0)),
                   [[c.terms.get((0, (0,) * p), 0) for c in row] for row in inverse])
    images = []
    for k, mask, exps in unknowns:
        mono = Superfunction(p, q, {(mask, exps): 1})
        G, L0 = _metric_image(gR, inverse, k, mono, degree, numeric)
        images.append([("G", G), ("V", L0)])
    keys, rows, rhs = _collect(images, [("G", W2j.entries)], p, q)
    side = sum(1 for key in keys if key[0] == "V")
    return ObstructionSystem("metric", p, q, degree, D, unknowns, rows, rhs, keys, side)


def solve(system: ObstructionSystem) -> SolveResult:
    sol = solve_sparse(system.rows, system.rhs)
    if not sol.solvable:
        return SolveResult(False, None, system.row_keys[sol.inconsistent_row], sol.rank)
    return SolveResult(True, system.field_from(sol.values), None, sol.rank)


# -- reports -----------------------------------------------------------------------------


@dataclass
class SplitStep:
    degree: int
    status: str
    witness: SuperVectorField | None = None
    certificate: dict | None = None
    unknowns: int = 0
    rows: int = 0

    def to_json(self) -> dict:
        return {"degree": self.degree, "status": self.status,
                "witness": self.witness.to_json() if self.witness is not None else None,
                "certificate": self.certificate}


@dataclass
class SplitReport:
    structure: str
    degree_bound: int | None
    steps: list[SplitStep] = field(default_factory=list)
    final_nilpotent_zero: bool = False
    final: EndoTensor | None = None
    automorphism: Automorphism | None = None

    @property
    def obstructed(self) -> bool:
        return any(s.status == "obstructed" for s in self.steps)

    @property
    def obstruction_degree(self) -> int | None:
        for s in self.steps:
            if s.status == "obstructed":
                return s.degree
        return None

    def to_json(self) -> dict:
        return {"structure": self.structure, "degreeBound": self.degree_bound,
                "steps": [s.to_json() for s in self.steps]}


CertificateHook = Callable[[int, EndoTensor], dict]


def _residual_certificate(degree, residual, system, result, hook):
    cert = {"qualifier": OBSTRUCTION_QUALIFIER,
            "degreeBound": system.bound,
            "residual": residual.to_json(),
            "unknowns": system.n_unknowns,
            "rows": system.n_rows,
            "rank": result.rank}
    key = result.inconsistent_row
    if key is not None:
        tag, i, j, mask, exps = key
        cert["inconsistentRow"] = {"equation": tag, "row": frame_name(system.p, i),
                                   "col": frame_name(system.p, j),
                                   "odd": [m + 1 for m in mask_to_indices(mask)],
                                   "exp": list(exps)}
    if hook is not None:
        cert.update(hook(degree, residual))
    return cert


def _max_degree(q: int) -> int:
    return q + 1


def iterative_split_acs(J: EndoTensor, D: int | None = None,
                        certificate_hook: CertificateHook | None = None) -> SplitReport:
    rep = check_acs(J)
    if not rep.valid:
        raise SplitInputError(f"not an almost complex structure: {rep.checks}")
    JR, Y = nilpotent_split_acs(J)
    cur = J
    total = Automorphism.identity(J.p, J.q)
    report = SplitReport("acs", D)
    Jc = constant_matrix(JR)
    for degree in range(2, _max_degree(J.q) + 1, 2):
        target = Y.degree_part(degree)
        if not Y.degree_range(0, degree).is_zero():
            raise TensorError("nilpotent part below the current degree")
        system = build_system_acs(JR, target, D, degree)
        result = solve(system)
        if not result.solvable:
            report.steps.append(SplitStep(degree, "obstructed", None,
                                          _residual_certificate(degree, target, system, result,
                                                                certificate_hook),
                                          system.n_unknowns, system.n_rows))
            report.final = Y
            report.automorphism = total
            return report
        zeta = result.witness
        if acs_image(JR, zeta, Jc) != target:
            raise TensorError("witness failed re-verification")
        if not zeta.is_zero():
            phi = exp_automorphism(zeta)
            cur = pullback_acs(phi, cur)
            total = compose(phi, total)
            JR2, Y = nilpotent_split_acs(cur)
            if JR2 != JR or not Y.degree_range(0, degree + 1).is_zero():
                raise TensorError("pullback did not raise the floor of the nilpotent part")
        report.steps.append(SplitStep(degree, "split", zeta, None, system.n_unknowns, system.n_rows))
    report.final = Y
    report.final_nilpotent_zero = Y.is_zero()
    report.automorphism = total
    return report


def iterative_split_metric(g: MetricTensor, D: int | None = None,
                           certificate_hook: CertificateHook | None = None) -> SplitReport:
    rep = check_metric(g)
    if not rep.valid:
        raise SplitInputError(f"not a metric: {rep.checks}")
    gR, W = nilpotent_split_metric(g)
    cur = g
    total = Automorphism.identity(g.p, g.q)
    report = SplitReport("metric", D)
    inverse = metric_matrix_inverse(gR)
    for degree in range(2, _max_degree(g.q) + 1, 2):
        target = W.degree_part(degree)
        system = build_system_metric(gR, target, D, degree)
        result = solve(system)
        if not result.solvable:
            report.steps.append(SplitStep(degree, "obstructed", None,
                                          _residual_certificate(degree, target, system, result,
                                                                certificate_hook),
                                          system.n_unknowns, system.n_rows))
            report.final = W
            report.automorphism = total
            return report
        zeta = result.witness
        if G_metric(gR, zeta, inverse).degree_part(degree) != target:
            raise TensorError("witness failed re-verification")
        if not zeta.is_zero():
            phi = exp_automorphism(zeta)
            cur = pullback_metric(phi, cur)
            total = compose(phi, total)
            gR2, W = nilpotent_split_metric(cur)
            if gR2 != gR or not W.degree_range(0, degree + 1).is_zero():
                raise TensorError("pullback did not raise the floor of the nilpotent part")
        report.steps.append(SplitStep(degree, "split", zeta, None, system.n_unknowns, system.n_rows))
    report.final = W
    report.final_nilpotent_zero = W.is_zero()
    report.automorphism = total
    return report


# -- deformation paths -------------------------------------------------------------------


def _poly_mul(a: list, b: list, mul, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + mul(x, y)
    return out


def _poly_exp(W: list, p, q) -> list:
    """``exp`` of a t-polynomial of endomorphisms with zero constant term."""
    one = EndoTensor.identity(p, q)
    zero = EndoTensor.zero(p, q)
    result = [one]
    term = [one]
    m = 1
    while True:
        term = [t.scale(Fraction(1, m)) for t in _poly_mul(W, term, EndoTensor.compose, zero)]
        if all(t.is_zero() for t in term):
            break
        width = max(len(result), len(term))
        result = [(result[i] if i < len(result) else zero) + (term[i] if i < len(term) else zero)
                  for i in range(width)]
        m += 1
        if m > q + 3:
            raise TensorError("exp series of a non-nilpotent path")
    while len(result) > 1 and result[-1].is_zero():
        result.pop()
    return result


@dataclass
class PathReport:
    structure: str
    valid: bool
    checks: dict
    offending_powers: dict
    coefficients: int

    def to_json(self) -> dict:
        return {"structure": self.structure, "valid": self.valid, "checks": dict(self.checks),
                "offendingPowers": {k: list(v) for k, v in self.offending_powers.items()},
                "tDegree": self.coefficients - 1}


def acs_path_coefficients(JR: EndoTensor, Y: EndoTensor) -> list[EndoTensor]:
    """Coefficients in ``t`` of ``J_R exp(t Y)``."""
    p, q = JR.p, JR.q
    return [JR.compose(c) for c in _poly_exp([EndoTensor.zero(p, q), Y], p, q)]


def deformation_path_check_acs(JR: EndoTensor, Y: EndoTensor) -> PathReport:
    p, q = JR.p, JR.q
    path = acs_path_coefficients(JR, Y)
    square = _poly_mul(path, path, EndoTensor.compose, EndoTensor.zero(p, q))
    square[0] = square[0] + EndoTensor.identity(p, q)
    bad = [k for k, c in enumerate(square) if not c.is_zero()]
    anti = (Y.compose(JR) + JR.compose(Y)).is_zero()
    checks = {"square_is_minus_id": not bad, "nilpotent_anticommutes": anti}
    return PathReport("acs", not bad, checks, {"square_is_minus_id": bad} if bad else {}, len(path))


def metric_path_coefficients(gR: MetricTensor, W: EndoTensor) -> list[MetricTensor]:
    """Coefficients in ``t`` of ``(g_0 + t g_2) exp(sum_j t^j W_{2j})``."""
    p, q = gR.p, gR.q
    g0, g2 = gR.degree_part(0), gR.degree_part(2)
    zero = EndoTensor.zero(p, q)
    parts = [zero] * (max(W.degrees(), default=0) // 2 + 1)
    for d in W.degrees():
        if d % 2:
            raise TensorError("odd degree in nilpotent part")
        parts[d // 2] = W.degree_part(d)
    E = _poly_exp(parts, p, q)
    out = []
    for k in range(len(E) + 1):
        c = MetricTensor(p, q, [[Superfunction.zero(p, q)] * (p + q) for _ in range(p + q)])
        if k < len(E):
            c = c + form_from_endo(g0, E[k])
        if k >= 1:
            c = c + form_from_endo(g2, E[k - 1])
        out.append(c)
    return out


def deformation_path_check_metric(gR: MetricTensor, W: EndoTensor) -> PathReport:
    path = metric_path_coefficients(gR, W)
    bad_sym = [k for k, c in enumerate(path) if c.supersymmetry_violations()]
    bad_par = [k for k, c in enumerate(path) if c.parity_violations(0)]
    defect = self_adjoint_defect(gR, W)
    floor = W.floor()
    trunc_ok = defect.is_zero() or floor is None or defect.floor() >= 2 * floor + 2
    checks = {"supersymmetric": not bad_sym, "even": not bad_par, "truncated_symmetry": trunc_ok}
    offending = {}
    if bad_sym:
        offending["supersymmetric"] = bad_sym
    if bad_par:
        offending["even"] = bad_par
    return PathReport("metric", all(checks.values()), checks, offending, len(path))


def deformation_path_check(reduction, nilpotent: EndoTensor) -> PathReport:
    if isinstance(reduction, MetricTensor):
        return deformation_path_check_metric(reduction, nilpotent)
    return deformation_path_check_acs(reduction, nilpotent)
