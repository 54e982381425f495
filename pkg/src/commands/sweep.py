"""
sweep 명령: V(t) = t·V_base 의 고유값 궤적과 임계 결합 상수.

제곱 우물은 τ = 1, 조화 진동자는 α = 1 인 모델을 기준으로 하므로
t 가 곧 τ 또는 α 이다. 모델 파일은 자기 V 를 그대로 늘린다.
"""
from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np

from commands.common import (FORMAT_REPORT, SHIFT_EXPLICIT, SHIFT_OPTIMIZED, SHIFT_PAPER, check_residuals,
                             fmt_real, harmonic_params, resolve_model, write_csv, write_report)
from commands.task_runner import TaskRunner
from models.examples import harmonic_model, square_well_model, square_well_shift
from utils.errors import ValidationError
from utils.operator import ModelSpec, SymmetricMatrix, assemble_system, optimize_shift
from utils.spectral import SignType, eigen_spectrum

logger = logging.getLogger(__name__)

HEADER = ["parameter", "index", "eigenvalue_re", "eigenvalue_im", "sign_type", "defective", "pencil_residual"]


@dataclass(frozen=True, eq=False)
class SweepPoint:
    parameter: float
    shift: float
    eigenvalues: np.ndarray
    eigenvalues_imag: np.ndarray
    sign_types: Tuple[SignType, ...]
    is_real: bool
    defective: bool
    inner_gap: float
    residuals: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class SweepResult:
    parameters: np.ndarray
    points: Tuple[SweepPoint, ...]
    critical_value: Optional[float]
    label: str = ""


def sweep_base(config, settings) -> ModelSpec:
    kind = config.model_kind
    if kind == "square_well":
        return square_well_model(1.0)
    if kind == "harmonic":
        return harmonic_model(harmonic_params(config, settings, alpha=1.0))
    return resolve_model(config, settings)


def scaled_model(base: ModelSpec, t: float) -> ModelSpec:
    return ModelSpec(base.u_squared, SymmetricMatrix(t * base.v.entries), label=f"{base.label}*{t:g}")


def inner_gap(eigenvalues, eigenvalues_imag, sign_types, defective) -> float:
    """Distance between the lowest positive-type and highest negative-type eigenvalue."""
    if defective:
        return 0.0
    if np.any(eigenvalues_imag != 0.0):
        return float("nan")
    positive = [x for x, s in zip(eigenvalues, sign_types) if s is SignType.POSITIVE]
    negative = [x for x, s in zip(eigenvalues, sign_types) if s is SignType.NEGATIVE]
    if not positive or not negative:
        return float("nan")
    return float(min(positive) - max(negative))


class Sweeper:
    def __init__(self, config, base: ModelSpec):
        self.config = config
        self.base = base

    def shift_for(self, t, spec):
        policy = self.config.shift_policy
        if policy == SHIFT_EXPLICIT:
            return float(self.config.shift)
        if policy in (SHIFT_PAPER, SHIFT_OPTIMIZED) and self.config.model_kind == "square_well":
            return square_well_shift(t)
        if policy in (SHIFT_PAPER, SHIFT_OPTIMIZED):
            return optimize_shift(spec)[0]
        return 0.0

    def spectrum(self, t):
        spec = scaled_model(self.base, t)
        shift = self.shift_for(t, spec)
        return spec, shift, eigen_spectrum(assemble_system(spec, shift))

    def evaluate(self, t) -> SweepPoint:
        spec, shift, report = self.spectrum(t)
        residuals = check_residuals(spec, report.complex_eigenvalues)
        return SweepPoint(
            parameter=float(t), shift=shift, eigenvalues=report.eigenvalues,
            eigenvalues_imag=report.eigenvalues_imag, sign_types=report.sign_types,
            is_real=report.is_real_spectrum, defective=report.defective,
            inner_gap=inner_gap(report.eigenvalues, report.eigenvalues_imag, report.sign_types, report.defective),
            residuals=tuple(residuals),
        )

    def is_real(self, t) -> bool:
        # 이분법 중간점은 출력되지 않으므로 잔차 검사 없이 판정만 한다
        return self.spectrum(t)[2].is_real_spectrum

    def bisect(self, lower, upper, tol) -> float:
        """Boundary between a real spectrum at ``lower`` and a non-real one at ``upper``."""
        while upper - lower > tol:
            middle = 0.5 * (lower + upper)
            if self.is_real(middle):
                lower = middle
            else:
                upper = middle
        return 0.5 * (lower + upper)


def critical_value(sweeper: Sweeper, points, tol) -> Optional[float]:
    for point in points:
        if point.defective and point.is_real:
            return point.parameter
    for left, right in zip(points, points[1:]):
        if left.is_real and not right.is_real:
            value = sweeper.bisect(left.parameter, right.parameter, tol)
            logger.info("critical coupling bracketed in [%.9g, %.9g], bisected to %.9g",
                        left.parameter, right.parameter, value)
            return value
    return None


def run_sweep(config, settings) -> SweepResult:
    if config.sweep_range is None:
        raise ValidationError("sweep needs --sweep-range a:b")
    start, stop = config.sweep_range
    if not stop > start:
        raise ValidationError(f"sweep range must be increasing (got {start}:{stop})")
    if config.steps < 2:
        raise ValidationError(f"steps must be at least 2 (got {config.steps})")

    base = sweep_base(config, settings)
    sweeper = Sweeper(config, base)
    parameters = np.linspace(start, stop, config.steps)
    logger.debug("sweeping %s over %d points with %d workers", base.label, parameters.size, settings.workers)
    points = TaskRunner.run(sweeper.evaluate, parameters, workers=settings.workers)
    critical = critical_value(sweeper, points, settings.bisection_tol)
    if critical is not None:
        logger.info("critical coupling of %s at t=%.9g", base.label or "model", critical)
    parameters.setflags(write=False)
    return SweepResult(parameters=parameters, points=tuple(points), critical_value=critical, label=base.label)


def cmd_sweep(config, settings) -> SweepResult:
    result = run_sweep(config, settings)
    if config.output_format == FORMAT_REPORT:
        write_report({
            "model": result.label,
            "critical_value": result.critical_value,
            "points": [
                {"parameter": p.parameter, "shift": p.shift, "is_real": p.is_real, "defective": p.defective,
                 "inner_gap": p.inner_gap, "eigenvalues_re": p.eigenvalues, "eigenvalues_im": p.eigenvalues_imag,
                 "sign_types": p.sign_types, "pencil_residuals": p.residuals}
                for p in result.points
            ],
        }, config.output_path)
    else:
        digits = settings.digits
        rows = []
        for point in result.points:
            for k, (re, im, sign, residual) in enumerate(zip(point.eigenvalues, point.eigenvalues_imag,
                                                             point.sign_types, point.residuals)):
                rows.append([fmt_real(point.parameter, digits), k, fmt_real(re, digits), fmt_real(im, digits),
                             sign.value, point.defective, fmt_real(residual, digits)])
        write_csv(HEADER, rows, config.output_path)
    return result
