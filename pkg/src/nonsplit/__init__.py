"""Exact tensor calculus on split supermanifold models with polynomial coefficients."""
from .algebra import Superfunction, mul, parity_and_degree, project_degree, evaluate_at_point
from .fields import (
    Automorphism,
    SuperCovector,
    SuperVectorField,
    apply_field,
    compose,
    conjugate_field,
    de_rham,
    exp_automorphism,
    lie_bracket,
)
from .tensors import (
    EndoTensor,
    MetricTensor,
    F_acs,
    F_metric,
    G_metric,
    check_acs,
    check_metric,
    degree_decompose,
    nilpotent_split_acs,
    nilpotent_split_metric,
    pullback_acs,
    pullback_metric,
    rank_one,
    theta_identity_check,
)
from .model import (
    StandardModel,
    build_W_eta,
    build_Y_eta,
    build_model,
    nowhere_split_certificates,
    pi_apply,
    xi_embed,
)
from .splitting import (
    ObstructionSystem,
    SplitReport,
    build_system_acs,
    build_system_metric,
    deformation_path_check,
    iterative_split_acs,
    iterative_split_metric,
    solve,
)
from .io import parse_tensor_file
from .suite import SuiteConfig, SuiteReport, run_paper_suite

__all__ = [name for name in dir() if not name.startswith("_")]
