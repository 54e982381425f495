import logging

from commands.common import FORMAT_REPORT, check_residuals, fmt_real, resolve_model, resolve_shift, write_csv, write_report
from utils.operator import assemble_system
from utils.spectral import SpectrumReport, defect_check, eigen_spectrum

logger = logging.getLogger(__name__)

HEADER = ["index", "eigenvalue_re", "eigenvalue_im", "sign_type", "pencil_residual"]


def cmd_spectrum(config, settings) -> SpectrumReport:
    spec = resolve_model(config, settings)
    shift = resolve_shift(config, spec)
    system = assemble_system(spec, shift)
    report = eigen_spectrum(system)
    residuals = check_residuals(spec, report.complex_eigenvalues)
    logger.info("spectrum of %s: %d eigenvalues, real=%s, defective=%s, path=%s",
                spec.label or "model", report.dimension, report.is_real_spectrum, report.defective, report.path)

    digits = settings.digits
    if config.output_format == FORMAT_REPORT:
        witness = defect_check(system, report)
        write_report({
            "model": spec.label,
            "shift": shift,
            "contraction": system.contraction,
            "path": report.path,
            "is_real_spectrum": report.is_real_spectrum,
            "defective": report.defective,
            "defect": {
                "eigenvalue": witness.eigenvalue,
                "algebraic_multiplicity": witness.algebraic_multiplicity,
                "geometric_multiplicity": witness.geometric_multiplicity,
                "reason": witness.reason,
            } if witness.defective else None,
            "central_gap": report.central_gap,
            "residual_max": report.residual_max,
            "eigenvalues": [
                {"re": re, "im": im, "sign_type": sign, "pencil_residual": residual}
                for re, im, sign, residual in zip(report.eigenvalues, report.eigenvalues_imag,
                                                  report.sign_types, residuals)
            ],
        }, config.output_path)
    else:
        rows = [
            [k, fmt_real(re, digits), fmt_real(im, digits), sign.value, fmt_real(residual, digits)]
            for k, (re, im, sign, residual) in enumerate(zip(report.eigenvalues, report.eigenvalues_imag,
                                                             report.sign_types, residuals))
        ]
        write_csv(HEADER, rows, config.output_path)
    return report
