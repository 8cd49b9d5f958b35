"""The form supermanifold of flat ``R^{2n}`` with its standard complex structure.

Coordinates are ``x_1..x_{2n}`` and ``xi_1..xi_{2n}`` with ``xi_i`` playing the
role of ``dx_i``.  ``pi`` swaps ``d/dx_i`` and ``d/dxi_i`` and is extended
module-linearly without a sign; this is the only choice for which the
bracket rule ``[pi(xi_f), pi(xi_g)] = -pi(xi_[f,g])`` holds.

Bilinear forms and 2-forms are converted by
``omega(u, v) = iota_v iota_u omega`` and ``B -> sum_{a,b} B_ab xi_a xi_b``.
With these, ``pi(xi_f)(omega)`` is the symmetrized pullback of ``omega`` along
``f`` for every ``f``; note that ``pi(xi_Id)`` is then the odd Euler operator,
so ``pi(xi_Id)(eta) = 2 eta``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .algebra import Superfunction
from .fields import SuperCovector, SuperVectorField, de_rham
from .tensors import (
    EndoTensor,
    MetricTensor,
    F_acs,
    F_acs_ad,
    F_metric,
    G_metric,
    metric_matrix_inverse,
    rank_one,
)


class ModelError(ValueError):
    pass


def standard_complex_matrix(n: int) -> list[list[int]]:
    """``J(d/dx_{2i-1}) = d/dx_{2i}``, ``J(d/dx_{2i}) = -d/dx_{2i-1}``; ``M[row][col]``."""
    m = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        a, b = 2 * i, 2 * i + 1
        m[b][a] = 1
        m[a][b] = -1
    return m


def _as_function(p, q, v) -> Superfunction:
    return v if isinstance(v, Superfunction) else Superfunction.constant(p, q, v)


def xi_embed(f: Sequence[Sequence], q: int | None = None) -> SuperVectorField:
    """``sum_ij f_ij xi_j d/dx_i`` for an endomorphism ``f`` of the even frame."""
    p = len(f)
    q = p if q is None else q
    coeffs = [Superfunction.zero(p, q)] * (p + q)
    for i in range(p):
        for j in range(p):
            c = _as_function(p, q, f[i][j])
            if c:
                coeffs[i] = coeffs[i] + Superfunction.odd_var(p, q, j) * c
    return SuperVectorField(p, q, coeffs)


def pi_apply(X: SuperVectorField) -> SuperVectorField:
    if X.p != X.q:
        raise ModelError("pi needs matching even and odd dimensions")
    p = X.p
    return SuperVectorField(p, X.q, list(X.coeffs[p:]) + list(X.coeffs[:p]))


def eta_form(n: int) -> Superfunction:
    p = 2 * n
    out = Superfunction.zero(p, p)
    for i in range(n):
        out = out + Superfunction.odd_var(p, p, 2 * i) * Superfunction.odd_var(p, p, 2 * i + 1)
    return out


def bilinear_of_form(omega: Superfunction) -> list[list[Superfunction]]:
    """``B_ab = iota_b iota_a omega`` for a 2-form ``omega``."""
    p = omega.p
    return [[omega.d_odd(a).d_odd(b) for b in range(p)] for a in range(p)]


def form_of_bilinear(B: Sequence[Sequence[Superfunction]], q: int) -> Superfunction:
    p = len(B)
    out = Superfunction.zero(p, q)
    for a in range(p):
        for b in range(p):
            if B[a][b]:
                out = out + B[a][b] * Superfunction.odd_var(p, q, a) * Superfunction.odd_var(p, q, b)
    return out


def lemma_a_rhs(f: Sequence[Sequence], omega: Superfunction) -> Superfunction:
    """``1/2 (omega(f., .) + omega(., f.))`` converted back to a 2-form."""
    p, q = omega.p, omega.q
    B = bilinear_of_form(omega)
    F = [[_as_function(p, q, v) for v in row] for row in f]
    z = Superfunction.zero(p, q)
    C = [[z] * p for _ in range(p)]
    for a in range(p):
        for b in range(p):
            s = z
            for c in range(p):
                s = s + F[c][a] * B[c][b] + F[c][b] * B[a][c]
            C[a][b] = s.scale(Fraction(1, 2))
    return form_of_bilinear(C, q)


def matrix_commutator(f, g, p, q):
    F = [[_as_function(p, q, v) for v in row] for row in f]
    G = [[_as_function(p, q, v) for v in row] for row in g]
    z = Superfunction.zero(p, q)
    out = []
    for i in range(p):
        row = []
        for j in range(p):
            s = z
            for k in range(p):
                s = s + F[i][k] * G[k][j] - G[i][k] * F[k][j]
            row.append(s)
        out.append(row)
    return out


@dataclass(frozen=True)
class StandardModel:
    n: int

    @property
    def p(self) -> int:
        return 2 * self.n

    @property
    def q(self) -> int:
        return 2 * self.n

    @cached_property
    def JM(self) -> list[list[int]]:
        return standard_complex_matrix(self.n)

    @cached_property
    def identity(self) -> list[list[int]]:
        return [[int(i == j) for j in range(self.p)] for i in range(self.p)]

    @cached_property
    def eta(self) -> Superfunction:
        return eta_form(self.n)

    @cached_property
    def g_prime(self) -> list[list[Superfunction]]:
        """``eta(., J_M .)`` on the even frame."""
        B = bilinear_of_form(self.eta)
        p = self.p
        return [[sum((B[a][c] * Superfunction.constant(p, p, self.JM[c][b]) for c in range(p)),
                     Superfunction.zero(p, p)) for b in range(p)] for a in range(p)]

    @cached_property
    def JR(self) -> EndoTensor:
        p = self.p
        m = [[0] * (2 * p) for _ in range(2 * p)]
        for i in range(p):
            for j in range(p):
                m[i][j] = self.JM[i][j]
                m[p + i][p + j] = self.JM[i][j]
        return EndoTensor.from_constant(p, p, m)

    @cached_property
    def gR(self) -> MetricTensor:
        """``g'`` on the even frame, ``eta o (pi (x) pi)`` on the odd frame.

        Moving the odd ``pi`` past the first odd argument costs a sign, so
        ``g_R(d/dxi_a, d/dxi_b) = -eta(d/dx_a, d/dx_b)``; then
        ``g_R^{-1}(d eta) = pi(xi_Id)``.
        """
        p = self.p
        z = Superfunction.zero(p, p)
        B = bilinear_of_form(self.eta)
        rows = [[z] * (2 * p) for _ in range(2 * p)]
        for a in range(p):
            for b in range(p):
                rows[a][b] = self.g_prime[a][b].body()
                rows[p + a][p + b] = -B[a][b]
        return MetricTensor(p, p, rows)

    @cached_property
    def gR_inverse(self):
        return metric_matrix_inverse(self.gR)

    @cached_property
    def xi_Id(self) -> SuperVectorField:
        return xi_embed(self.identity)

    @cached_property
    def xi_JM(self) -> SuperVectorField:
        return xi_embed(self.JM)

    @cached_property
    def pi_xi_Id(self) -> SuperVectorField:
        return pi_apply(self.xi_Id)

    @cached_property
    def pi_xi_JM(self) -> SuperVectorField:
        return pi_apply(self.xi_JM)

    @cached_property
    def d_eta(self) -> SuperCovector:
        return de_rham(self.eta)

    @cached_property
    def seed_tensor(self) -> EndoTensor:
        """``pi(xi_{J_M}) (x) d eta``."""
        return rank_one(self.pi_xi_JM, self.d_eta)

    @cached_property
    def Y_eta(self) -> EndoTensor:
        return F_acs(self.JR, self.seed_tensor)

    @cached_property
    def W_eta(self) -> EndoTensor:
        return F_metric(self.gR, self.seed_tensor, self.gR_inverse)

    def acs(self) -> EndoTensor:
        """``J_R exp(eta Y_eta)``."""
        from .tensors import recompose_acs
        return recompose_acs(self.JR, self.eta * self.Y_eta)

    def metric(self) -> MetricTensor:
        """``g_R exp(eta W_eta)``."""
        from .tensors import recompose_metric
        return recompose_metric(self.gR, self.eta * self.W_eta)

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "q": self.q,
                "eta": self.eta.to_json(),
                "JR": self.JR.to_json(), "gR": self.gR.to_json()}


def build_model(n: int) -> StandardModel:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ModelError("n must be an integer >= 1")
    return StandardModel(n)


def build_Y_eta(model: StandardModel) -> EndoTensor:
    return model.Y_eta


def build_W_eta(model: StandardModel) -> EndoTensor:
    return model.W_eta


def Y_eta_expanded(model: StandardModel) -> EndoTensor:
    """``pi(xi_JM) (x) d eta - pi(xi_Id) (x) (d eta o J_R)``."""
    p = model.p
    comps = [model.d_eta.pair(model.JR.column(k)) for k in range(2 * p)]
    return model.seed_tensor - rank_one(model.pi_xi_Id, SuperCovector(p, p, comps))


def inverse_form_field(model: StandardModel, alpha: SuperCovector) -> SuperVectorField:
    """``g_R^{-1}(alpha)``: the field ``V`` with ``g_R(V, Y) = alpha(Y)``."""
    C = model.gR_inverse
    p = model.p
    coeffs = []
    for nn in range(2 * p):
        s = Superfunction.zero(p, p)
        for l in range(2 * p):
            if alpha.comps[l] and C[l][nn]:
                s = s + alpha.comps[l] * C[l][nn]
        coeffs.append(s)
    return SuperVectorField(p, p, coeffs)


def sample_points(p: int, count: int, seed: int) -> list[list[Fraction]]:
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(p)] for _ in range(count)]


@dataclass
class CertificateReport:
    n: int
    identities: dict
    values: dict
    points: list

    @property
    def ok(self) -> bool:
        return all(self.identities.values()) and all(
            all(v != [] for v in pt["values"].values()) for pt in self.points)

    def to_json(self) -> dict:
        return {"n": self.n, "identities": dict(self.identities),
                "values": {k: v.to_json() for k, v in self.values.items()},
                "points": self.points}


def acs_certificate_value(model: StandardModel) -> Superfunction:
    """``F_{J_R}(ad(eta pi(xi_JM)))(pi(xi_JM))(eta)``."""
    zeta = model.eta * model.pi_xi_JM
    return F_acs_ad(model.JR, zeta).apply(model.pi_xi_JM).apply(model.eta)


def metric_certificate_value(model: StandardModel) -> Superfunction:
    """``G_{g_R}(eta pi(xi_JM))(pi(xi_JM))(eta)``."""
    zeta = model.eta * model.pi_xi_JM
    return G_metric(model.gR, zeta, model.gR_inverse).apply(model.pi_xi_JM).apply(model.eta)


def nowhere_split_certificates(model: StandardModel, points: Sequence[Sequence] = (),
                               ) -> CertificateReport:
    if model.n <= 2:
        raise ModelError("theorem hypothesis violated: needs n > 2")
    eta, chi = model.eta, model.pi_xi_JM
    zeta = eta * chi
    F_big = F_acs_ad(model.JR, zeta)
    F_small = F_acs_ad(model.JR, chi)
    G_big = G_metric(model.gR, zeta, model.gR_inverse)
    G_small = G_metric(model.gR, chi, model.gR_inverse)
    identities = {
        "acs_operator_identity": F_big == eta * F_small - model.Y_eta,
        "metric_operator_identity": G_big == eta * G_small - model.W_eta,
        "acs_small_vanishes": F_small.apply(chi).is_zero(),
        "metric_small_pairing_floor_ge_4": (lambda v: v.floor() is None or v.floor() >= 4)(
            G_small.apply(chi).apply(eta)),
    }
    acs_val = F_big.apply(chi).apply(eta)
    met_val = G_big.apply(chi).apply(eta)
    values = {
        "acs": acs_val,
        "acs_expected": -(model.Y_eta.apply(chi).apply(eta)),
        "metric": met_val,
        "metric_degree4": met_val.project_degree(4),
        "metric_expected_degree4": -(model.W_eta.apply(chi).apply(eta)).project_degree(4),
    }
    identities["acs_matches_Y_pairing"] = acs_val == values["acs_expected"]
    identities["metric_matches_W_pairing_degree4"] = (
        values["metric_degree4"] == values["metric_expected_degree4"])
    pts = []
    for pt in points:
        a = acs_val.evaluate_at_point(pt)
        m = met_val.project_degree(4).evaluate_at_point(pt)
        pts.append({"point": [str(Fraction(v)) for v in pt],
                    "values": {"acs": a.to_json(), "metric_degree4": m.to_json()}})
    return CertificateReport(model.n, identities, values, pts)
