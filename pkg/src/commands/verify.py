import logging

import numpy as np

from commands.common import (FORMAT_REPORT, SHIFT_NONE, check_residuals, fmt_real, resolve_model,
                             resolve_perturbation, resolve_shift, write_csv, write_report)
from utils.bounds import VerificationReport, verify_bounds

logger = logging.getLogger(__name__)

HEADER = ["row", "index", "lambda", "lambda_perturbed", "relative_deviation", "kappa", "valid", "holds",
          "pencil_residual", "pencil_residual_perturbed"]


def pair_residuals(spec, report, values, by_order):
    # 순서 쌍이 아니면 실수부로 정렬한 복소 고유값의 잔차
    if by_order:
        return check_residuals(spec, values)
    order = np.argsort(report.eigenvalues, kind="stable")
    return check_residuals(spec, report.complex_eigenvalues[order])


def cmd_verify(config, settings) -> VerificationReport:
    spec = resolve_model(config, settings)
    pert = resolve_perturbation(config, spec)
    shift = resolve_shift(config, spec)
    if config.shift_policy == SHIFT_NONE and config.model_kind == "square_well":
        logger.info("square well verified at mu=0; use --paper-shift for the shifted table values")
    result = verify_bounds(spec, pert, shift)
    spec_p = spec.with_potential(spec.v.entries + pert.delta_v.entries)
    residuals = pair_residuals(spec, result.unperturbed, result.pairs[:, 0], result.paired_by_order)
    residuals_p = pair_residuals(spec_p, result.perturbed, result.pairs[:, 1], result.paired_by_order)

    for check in result.checks:
        if check.valid and not check.holds:
            logger.error("%s = (%.6g, %.6g) does not bound the observed motion", check.name,
                         check.kappa_minus, check.kappa_plus)

    if config.output_format == FORMAT_REPORT:
        write_report({
            "model": spec.label,
            "perturbation": pert.label,
            "shift": result.shift,
            "contraction": result.contraction,
            "contraction_perturbed": result.contraction_perturbed,
            "paired_by_order": result.paired_by_order,
            "max_deviation": result.max_deviation,
            "pairs": result.pairs,
            "deviations": result.deviations,
            "pencil_residuals": residuals,
            "pencil_residuals_perturbed": residuals_p,
            "bundle": result.bundle,
            "checks": result.checks,
            "inclusion": result.inclusion,
            "inclusion_holds": result.inclusion_holds,
        }, config.output_path)
    else:
        digits = settings.digits
        rows = [["pair", k, fmt_real(before, digits), fmt_real(after, digits), fmt_real(dev, digits), "", "", "",
                 fmt_real(res, digits), fmt_real(res_p, digits)]
                for k, ((before, after), dev, res, res_p) in enumerate(zip(result.pairs, result.deviations,
                                                                           residuals, residuals_p))]
        rows.append(["max", "", "", "", fmt_real(result.max_deviation, digits), "", "", "", "", ""])
        for check in result.checks:
            kappa = max(abs(check.kappa_minus), abs(check.kappa_plus))
            rows.append([check.name, "", "", "", fmt_real(result.max_deviation, digits),
                         fmt_real(kappa, digits), check.valid, check.holds, "", ""])
        write_csv(HEADER, rows, config.output_path)
    return result
