"""
bounds 명령: 모든 κ 와 유효성, 예측 구간(기본/개선/균등), 간격 α 를 출력한다.
"""
from dataclasses import dataclass
import logging
from typing import Optional

from scipy import linalg

from commands.common import (FORMAT_REPORT, fmt_real, resolve_model, resolve_perturbation, resolve_shift,
                             write_csv, write_report)
from utils.bounds import (GapInclusion, KappaBundle, analyse_perturbation, gap_bound, isolated_count,
                          perturbation_constants, perturbation_norm, perturbed_system, pessimistic_norm_interval,
                          predict_inclusion)
from utils.errors import ContractionNotLessThanOne
from utils.operator import assemble_system
from utils.spectral import Interval, eigen_spectrum, sign_operator

logger = logging.getLogger(__name__)

HEADER = ["name", "kappa_minus", "kappa_plus", "valid"]


@dataclass(frozen=True)
class BoundsResult:
    shift: float
    contraction: float
    gap_alpha: float
    bundle: KappaBundle
    inclusion: Optional[GapInclusion]
    pessimistic: Optional[Interval]
    perturbation_norm: float
    norm_j1: float
    isolated: Optional[tuple]


def compute_bounds(config, settings) -> BoundsResult:
    spec = resolve_model(config, settings)
    shift = resolve_shift(config, spec)
    system = assemble_system(spec, shift)
    if system.contraction >= 1.0:
        raise ContractionNotLessThanOne(system.contraction)

    pert = analyse_perturbation(system, resolve_perturbation(config, spec))
    bundle = perturbation_constants(system, pert)
    report = eigen_spectrum(system)
    j1 = sign_operator(system)
    a = perturbation_norm(system, perturbed_system(system, pert))

    inclusion = None
    pessimistic = None
    isolated = None
    if report.is_real_spectrum and not report.central_gap.is_empty:
        inclusion = predict_inclusion(report.central_gap, bundle, shift, a=a, norm_j1=j1.norm_j1)
        g_inv_norm = 1.0 / linalg.eigvalsh(system.shifted_gram)[0]
        pessimistic = pessimistic_norm_interval(report.central_gap, a, g_inv_norm, shift)
        if bundle.kappa < 1.0:
            isolated = isolated_count(report, bundle.kappa)

    return BoundsResult(shift=shift, contraction=system.contraction, gap_alpha=gap_bound(system),
                        bundle=bundle, inclusion=inclusion, pessimistic=pessimistic,
                        perturbation_norm=a, norm_j1=j1.norm_j1, isolated=isolated)


def cmd_bounds(config, settings) -> BoundsResult:
    result = compute_bounds(config, settings)
    bundle = result.bundle
    logger.info("bounds: b=%.6g, c=%.6g, best %s = (%.6g, %.6g)",
                bundle.b, bundle.c, bundle.best_name, bundle.best[0], bundle.best[1])

    if config.output_format == FORMAT_REPORT:
        write_report(result, config.output_path)
    else:
        digits = settings.digits
        rows = [[name, fmt_real(kappa_minus, digits), fmt_real(kappa_plus, digits), bundle.valid[name]]
                for name, (kappa_minus, kappa_plus) in bundle.pairs().items()]
        rows.append(["gap_alpha", "", fmt_real(result.gap_alpha, digits), True])
        write_csv(HEADER, rows, config.output_path)
    return result
