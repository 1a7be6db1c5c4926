"""Exact computations with synthetic spectra modelled as bigraded τ-modules."""

from .algebra import AbHom, FgAbGroup, eigen_order, hom_parts, padic_valuation, smith_normal_form
from .detection import hurewicz_report, im_j_order, verify_surjectivity
from .exact_couple import brute_force_exact_couple
from .hfpss import hfpss_c2_ku
from .les import ExtensionHint, solve_les
from .models import build_ell, build_j, build_ko, build_ku, build_periodic, moore, psi_minus_one, wood_ko
from .sseq import check_relation, compare_charts, gamma_ss, page
from .taumod import BigradedModule, TauColumn, mod_tau, tau_invert, validate_model

__all__ = [
    "AbHom",
    "BigradedModule",
    "ExtensionHint",
    "FgAbGroup",
    "TauColumn",
    "brute_force_exact_couple",
    "build_ell",
    "build_j",
    "build_ko",
    "build_ku",
    "build_periodic",
    "check_relation",
    "compare_charts",
    "eigen_order",
    "gamma_ss",
    "hfpss_c2_ku",
    "hom_parts",
    "hurewicz_report",
    "im_j_order",
    "mod_tau",
    "moore",
    "padic_valuation",
    "page",
    "psi_minus_one",
    "smith_normal_form",
    "solve_les",
    "tau_invert",
    "validate_model",
    "verify_surjectivity",
    "wood_ko",
]
