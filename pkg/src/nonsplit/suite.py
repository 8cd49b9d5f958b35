"""The verification suite: every registered identity, certificate and round trip."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import Superfunction
from .fields import exp_automorphism, lie_bracket
from .model import (
    StandardModel,
    build_model,
    inverse_form_field,
    lemma_a_rhs,
    matrix_commutator,
    nowhere_split_certificates,
    pi_apply,
    sample_points,
    xi_embed,
)
from .randomgen import (
    random_even_endo,
    random_even_zeta,
    random_field,
    random_homogeneous_function,
    random_polynomial_matrix,
    random_two_form,
)
from .splitting import (
    build_system_acs,
    build_system_metric,
    deformation_path_check,
    iterative_split_acs,
    iterative_split_metric,
    solve,
    acs_image,
)
from .tensors import (
    EndoTensor,
    F_acs,
    G_metric,
    eq1_truncation,
    commutator_ad,
    nilpotent_split_acs,
    pullback_acs,
    pullback_metric,
    recompose_acs,
    theta_identity_check,
)

SUITES = ("lemma", "theorem", "solver", "deformation")


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    n: int = 3
    degree_bound: int = 3
    seed: int = 1
    points: int | list = 10
    suites: tuple = SUITES
    samples: int = 5
    timings: bool = False

    def validate(self) -> "SuiteConfig":
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ConfigError("n must be an integer >= 1")
        if not isinstance(self.degree_bound, int) or self.degree_bound < 0:
            raise ConfigError("degree bound must be a nonnegative integer")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if isinstance(self.points, int):
            if self.points < 0:
                raise ConfigError("points must be nonnegative")
        else:
            for pt in self.points:
                if len(pt) != 2 * self.n:
                    raise ConfigError(f"sample point {pt} must have {2 * self.n} coordinates")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown or not self.suites:
            raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        return self

    def sample_points(self) -> list:
        if isinstance(self.points, int):
            return sample_points(2 * self.n, self.points, self.seed)
        return [[Fraction(v) for v in pt] for pt in self.points]

    def to_json(self) -> dict:
        pts = self.points if isinstance(self.points, int) else [[str(Fraction(v)) for v in pt]
                                                                 for pt in self.points]
        return {"n": self.n, "degreeBound": self.degree_bound, "seed": self.seed,
                "points": pts, "suites": list(self.suites), "samples": self.samples}


@dataclass
class CheckResult:
    name: str
    anchor: str
    suite: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float | None = None

    def to_json(self, timings: bool = False) -> dict:
        out = {"name": self.name, "anchor": self.anchor, "suite": self.suite,
               "status": self.status, "detail": self.detail}
        if timings and self.seconds is not None:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class SuiteReport:
    config: SuiteConfig
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.status in ("pass", "skipped") for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]

    def to_json(self) -> dict:
        return {"config": self.config.to_json(), "pass": self.passed,
                "checks": [c.to_json(self.config.timings)
                           for c in sorted(self.checks, key=lambda c: c.name)]}

    def summary_lines(self) -> list[str]:
        lines = [f"{c.status.upper():7} {c.name}  [{c.anchor}]"
                 for c in sorted(self.checks, key=lambda c: c.name)]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} "
                     f"({len(self.failures())} failing of {len(self.checks)})")
        return lines


# -- registry ------------------------------------------------------------------------------

_REGISTRY: list[tuple[str, str, str, Callable]] = []


def check(name: str, suite: str, anchor: str):
    def deco(fn):
        _REGISTRY.append((name, suite, anchor, fn))
        return fn
    return deco


def registered_checks() -> list[tuple[str, str, str]]:
    return [(name, suite, anchor) for name, suite, anchor, _ in _REGISTRY]


def anchor_map() -> dict[str, str]:
    """Check name -> the identity it verifies."""
    return {name: anchor for name, _, anchor, _ in _REGISTRY}


@dataclass
class _Context:
    config: SuiteConfig
    model: StandardModel
    rng: random.Random
    points: list


def _residual(x) -> object:
    if x is None:
        return None
    return x.to_json() if hasattr(x, "to_json") else x


def _floor_at_least(x, k: int) -> bool:
    f = x.floor()
    return f is None or f >= k


def _result(ok: bool, **detail) -> tuple[bool, dict]:
    return ok, {k: _residual(v) for k, v in detail.items()}


# -- lemma suite -----------------------------------------------------------------------------


@check("acs_lemma_equivalence", "lemma", "J_R exp(Y) is almost complex iff Y J_R + J_R Y = 0")
def _acs_lemma(ctx: _Context):
    m = ctx.model
    p, q = m.p, m.q
    for _ in range(ctx.config.samples):
        Y = F_acs(m.JR, random_even_endo(ctx.rng, p, q, floor=2))
        J = recompose_acs(m.JR, Y)
        if not (J.compose(J) + EndoTensor.identity(p, q)).is_zero():
            return _result(False, failing_nilpotent=Y)
        zeta = random_even_zeta(ctx.rng, p, q, (2,), 1)
        _, Y2 = nilpotent_split_acs(pullback_acs(exp_automorphism(zeta), m.JR))
        if not (Y2.compose(m.JR) + m.JR.compose(Y2)).is_zero():
            return _result(False, failing_zeta=zeta)
    return _result(True, samples=ctx.config.samples)


@check("pi_lemma_a", "lemma", "pi(xi_f)(omega) = 1/2 (omega(f., .) + omega(., f.))")
def _lemma_a(ctx: _Context):
    m = ctx.model
    for _ in range(ctx.config.samples):
        f = random_polynomial_matrix(ctx.rng, m.p, m.q)
        omega = random_two_form(ctx.rng, m.p, m.q)
        lhs = pi_apply(xi_embed(f)).apply(omega)
        rhs = lemma_a_rhs(f, omega)
        if lhs != rhs:
            return _result(False, residual=lhs - rhs)
    return _result(True, samples=ctx.config.samples)


@check("pi_lemma_b", "lemma", "[pi(xi_f), pi(xi_g)] = -pi(xi_[f,g])")
def _lemma_b(ctx: _Context):
    m = ctx.model
    for _ in range(ctx.config.samples):
        f = random_polynomial_matrix(ctx.rng, m.p, m.q)
        g = random_polynomial_matrix(ctx.rng, m.p, m.q)
        lhs = lie_bracket(pi_apply(xi_embed(f)), pi_apply(xi_embed(g)))
        rhs = -pi_apply(xi_embed(matrix_commutator(f, g, m.p, m.q)))
        if lhs != rhs:
            return _result(False, residual=lhs - rhs)
    return _result(True, samples=ctx.config.samples)


@check("pi_lemma_c", "lemma", "J_R(xi_JM) = -xi_Id and J_R(pi(xi_JM)) = -pi(xi_Id)")
def _lemma_c(ctx: _Context):
    m = ctx.model
    a = m.JR.apply(m.xi_JM) + m.xi_Id
    b = m.JR.apply(m.pi_xi_JM) + m.pi_xi_Id
    return _result(a.is_zero() and b.is_zero(), residual_xi=a, residual_pi=b)


@check("eta_compatibility", "lemma", "pi(xi_JM)(eta) = 0 since eta is compatible with J_M")
def _compat(ctx: _Context):
    m = ctx.model
    v = m.pi_xi_JM.apply(m.eta)
    return _result(v.is_zero(), residual=v)


@check("pi_xi_id_on_eta", "lemma", "pi(xi_Id)(eta) = eta")
def _euler(ctx: _Context):
    m = ctx.model
    v = m.pi_xi_Id.apply(m.eta)
    return _result(v == m.eta, value=v, expected=m.eta)


@check("inverse_metric_on_d_eta", "lemma", "g_R^{-1}(d eta) = pi(xi_Id)")
def _ginv(ctx: _Context):
    m = ctx.model
    v = inverse_form_field(m, m.d_eta) - m.pi_xi_Id
    return _result(_floor_at_least(v, 2), residual=v)


@check("theta_identity", "lemma", "chi (x) d f = (-1)^{|f||chi|} (f ad(chi) - ad(f chi))")
def _theta(ctx: _Context):
    m = ctx.model
    for _ in range(ctx.config.samples):
        pc, pf = ctx.rng.randint(0, 1), ctx.rng.randint(0, 1)
        chi = random_field(ctx.rng, m.p, m.q, parity=pc, max_even_degree=1)
        f = random_homogeneous_function(ctx.rng, m.p, m.q, pf, 1)
        if chi.is_zero() or f.is_zero():
            continue
        r = theta_identity_check(chi, f)
        if not r.is_zero():
            return _result(False, residual=r, chi=chi, f=f)
    return _result(True, samples=ctx.config.samples)


@check("pullback_expansion", "lemma", "phi.g = g - g(ad zeta (x) Id + Id (x) ad zeta) + zeta g")
def _eq1(ctx: _Context):
    m = ctx.model
    for _ in range(ctx.config.samples):
        zeta = random_even_zeta(ctx.rng, m.p, m.q, (2,), 1)
        phi = exp_automorphism(zeta)
        dm = pullback_metric(phi, m.gR) - eq1_truncation(zeta, m.gR)
        da = pullback_acs(phi, m.JR) - m.JR - commutator_ad(zeta, m.JR)
        if not (_floor_at_least(dm, 4) and _floor_at_least(da, 4)):
            return _result(False, zeta=zeta, metric_floor=dm.floor(), acs_floor=da.floor())
    return _result(True, samples=ctx.config.samples)


# -- theorem suite ---------------------------------------------------------------------------


def _euler_square(m: StandardModel) -> Superfunction:
    v = m.pi_xi_Id.apply(m.eta)
    return v * v


@check("Y_eta_pairing", "theorem", "(Y_eta(pi(xi_JM)))(eta) = eta^2")
def _y_pair(ctx: _Context):
    m = ctx.model
    v = m.Y_eta.apply(m.pi_xi_JM).apply(m.eta)
    return _result(v == m.eta * m.eta, value=v, expected=m.eta * m.eta)


@check("Y_eta_pairing_structure", "theorem",
       "(Y_eta(pi(xi_JM)))(eta) = (pi(xi_JM)(eta))^2 + (pi(xi_Id)(eta))^2")
def _y_struct(ctx: _Context):
    m = ctx.model
    v = m.Y_eta.apply(m.pi_xi_JM).apply(m.eta)
    want = _euler_square(m)
    return _result(v == want and (m.n < 2 or not v.is_zero()), value=v)


@check("W_eta_pairing", "theorem", "(W_eta(pi(xi_JM)))(eta) = eta^2 up to degree >= 6")
def _w_pair(ctx: _Context):
    m = ctx.model
    v = m.W_eta.apply(m.pi_xi_JM).apply(m.eta) - m.eta * m.eta
    return _result(_floor_at_least(v, 6), residual=v)


@check("W_eta_pairing_structure", "theorem",
       "(W_eta(pi(xi_JM)))(eta) = (g_R^{-1}(d eta))(eta) eta(xi_JM, xi_JM) up to degree >= 6")
def _w_struct(ctx: _Context):
    m = ctx.model
    v = m.W_eta.apply(m.pi_xi_JM).apply(m.eta)
    want = inverse_form_field(m, m.d_eta).apply(m.eta) * m.gR.pair(m.pi_xi_JM, m.pi_xi_JM)
    r = v - want
    return _result(_floor_at_least(r, 6) and (m.n < 2 or not v.is_zero()),
                   residual=r)


def _certificates(ctx: _Context):
    if ctx.model.n <= 2:
        return None
    return nowhere_split_certificates(ctx.model, ctx.points)


@check("operator_identities", "theorem",
       "F(ad(eta chi)) = eta F(ad chi) - Y_eta and G(eta chi) = eta G(chi) - W_eta")
def _op_ids(ctx: _Context):
    cert = _certificates(ctx)
    if cert is None:
        return None
    return _result(all(cert.identities.values()), identities=cert.identities)


@check("certificate_values", "theorem", "F(ad(eta chi))(chi)(eta) = -eta^2")
def _cert_values(ctx: _Context):
    cert = _certificates(ctx)
    if cert is None:
        return None
    m = ctx.model
    e2 = m.eta * m.eta
    ok = cert.values["acs"] == -e2 and cert.values["metric_degree4"] == -e2
    return _result(ok, acs=cert.values["acs"], metric_degree4=cert.values["metric_degree4"],
                   expected=-e2)


@check("certificate_values_structure", "theorem",
       "F(ad(eta chi))(chi)(eta) = -(Y_eta(chi))(eta), nonzero at every sample point")
def _cert_struct(ctx: _Context):
    cert = _certificates(ctx)
    if cert is None:
        return None
    m = ctx.model
    want = -_euler_square(m)
    ok = (cert.values["acs"] == want and cert.values["metric_degree4"] == want
          and all(pt["values"]["acs"] and pt["values"]["metric_degree4"] for pt in cert.points))
    return _result(ok, acs=cert.values["acs"], metric_degree4=cert.values["metric_degree4"],
                   points=len(cert.points))


def _verdict(ctx: _Context, structure: str):
    m = ctx.model
    if m.n <= 2:
        return None
    if structure == "acs":
        rep = iterative_split_acs(m.acs(), ctx.config.degree_bound)
    else:
        rep = iterative_split_metric(m.metric(), ctx.config.degree_bound)
    steps = [{"degree": s.degree, "status": s.status} for s in rep.steps]
    return _result(rep.obstruction_degree == 4, steps=steps,
                   final_nilpotent_zero=rep.final_nilpotent_zero)


@check("acs_nonsplit_verdict", "theorem", "J = J_R exp(eta Y_eta) is nowhere split")
def _acs_verdict(ctx: _Context):
    return _verdict(ctx, "acs")


@check("metric_nonsplit_verdict", "theorem", "g = g_R exp(eta W_eta) is nowhere split")
def _metric_verdict(ctx: _Context):
    return _verdict(ctx, "metric")


# -- solver suite ----------------------------------------------------------------------------


@check("solver_acs_roundtrip", "solver", "Y_2j = F_{J_R}(ad(zeta_2j)) solvable for images")
def _solver_acs(ctx: _Context):
    m = ctx.model
    D = max(ctx.config.degree_bound, 1)
    for _ in range(ctx.config.samples):
        zeta = random_even_zeta(ctx.rng, m.p, m.q, (2,), min(D, 1))
        target = acs_image(m.JR, zeta)
        res = solve(build_system_acs(m.JR, target, D, 2))
        if not res.solvable or acs_image(m.JR, res.witness) != target:
            return _result(False, zeta=zeta)
    return _result(True, samples=ctx.config.samples)


@check("solver_metric_roundtrip", "solver", "W_2j = G_{g_R}(zeta_2j) solvable for admissible zeta")
def _solver_metric(ctx: _Context):
    m = ctx.model
    D = max(ctx.config.degree_bound, 1)
    for _ in range(ctx.config.samples):
        zeta = random_even_zeta(ctx.rng, m.p, m.q, (2,), min(D, 1), odd_frames_only=True)
        target = G_metric(m.gR, zeta, m.gR_inverse).degree_part(2)
        res = solve(build_system_metric(m.gR, target, D, 2))
        if not res.solvable or G_metric(m.gR, res.witness, m.gR_inverse).degree_part(2) != target:
            return _result(False, zeta=zeta)
    return _result(True, samples=ctx.config.samples)


@check("iterative_split_roundtrip", "solver", "Y' in End^(2(j+1)) after exp(zeta_2j)")
def _iterative(ctx: _Context):
    m = ctx.model
    if m.n > 2:
        return None  # covered by the acceptance tests; too slow for the default suite
    D = max(ctx.config.degree_bound, 1)
    for _ in range(2):
        zeta = random_even_zeta(ctx.rng, m.p, m.q, (2,), 1)
        ra = iterative_split_acs(pullback_acs(exp_automorphism(zeta), m.JR), D)
        za = random_even_zeta(ctx.rng, m.p, m.q, (2,), 1, odd_frames_only=True)
        rm = iterative_split_metric(pullback_metric(exp_automorphism(za), m.gR), D)
        if not (ra.final_nilpotent_zero and rm.final_nilpotent_zero):
            return _result(False, zeta=zeta, metric_zeta=za)
    return _result(True, samples=2)


# -- deformation suite ------------------------------------------------------------------------


@check("acs_deformation_path", "deformation", "t -> J_R exp(t Y) is almost complex")
def _acs_path(ctx: _Context):
    m = ctx.model
    rep = deformation_path_check(m.JR, m.eta * m.Y_eta)
    return _result(rep.valid, report=rep.to_json())


@check("metric_deformation_path", "deformation",
       "t -> (g_0 + t g_2) exp(sum t^j W_2j) is supersymmetric")
def _metric_path(ctx: _Context):
    m = ctx.model
    rep = deformation_path_check(m.gR, m.eta * m.W_eta)
    return _result(rep.valid, report=rep.to_json())


def run_paper_suite(config: SuiteConfig) -> SuiteReport:
    config.validate()
    model = build_model(config.n)
    points = config.sample_points()
    results = []
    for name, suite, anchor, fn in _REGISTRY:
        if suite not in config.suites:
            continue
        ctx = _Context(config, model, random.Random(f"{config.seed}:{name}"), points)
        t0 = time.perf_counter()
        out = fn(ctx)
        dt = time.perf_counter() - t0
        if out is None:
            results.append(CheckResult(name, anchor, suite, "skipped",
                                       {"reason": "not applicable for this n"}, dt))
            continue
        ok, detail = out
        results.append(CheckResult(name, anchor, suite, "pass" if ok else "fail", detail, dt))
    return SuiteReport(config, results)
