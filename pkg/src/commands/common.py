"""
명령 공통 부분: 실행 설정, 모델/시프트/섭동 결정, CSV 와 보고서 출력.
"""
import csv
import dataclasses
from dataclasses import dataclass
from enum import Enum
import json
import logging
import math
import sys
from typing import Optional, Tuple

import numpy as np

from models.examples import (harmonic_model, random_perturbation, square_well_model, square_well_perturbation,
                             square_well_shift, square_well_table_perturbation)
from models.model_io import load_model
from models.model_spec import HarmonicParams, Perturbation, SquareWellParams
from utils.errors import SolverError, ValidationError
from utils.operator import ModelSpec, SymmetricMatrix, optimize_shift
from utils.spectral import pencil_residual, pencil_scale

logger = logging.getLogger(__name__)

RESIDUAL_LIMIT = 1e-6

SHIFT_NONE = "none"
SHIFT_EXPLICIT = "explicit"
SHIFT_OPTIMIZED = "optimized"
SHIFT_PAPER = "paper"

FORMAT_CSV = "csv"
FORMAT_REPORT = "report"


@dataclass(frozen=True)
class RunConfig:
    command: str
    model_path: Optional[str] = None
    tau: Optional[float] = None
    eta: Optional[float] = None
    alpha: Optional[float] = None
    beta: float = 0.0
    grid_points: Optional[int] = None
    half_width: Optional[float] = None
    shift_policy: str = SHIFT_NONE
    shift: Optional[float] = None
    sweep_range: Optional[Tuple[float, float]] = None
    steps: int = 101
    seed: int = 0
    scale: Optional[float] = None
    output_path: Optional[str] = None
    output_format: str = FORMAT_CSV
    which: Optional[str] = None

    @property
    def model_kind(self) -> str:
        sources = [name for name, value in (("file", self.model_path), ("square_well", self.tau),
                                            ("harmonic", self.alpha)) if value is not None]
        if len(sources) != 1:
            raise ValidationError(
                "exactly one model source is required: --model, --tau or --alpha"
                + (f" (got {', '.join(sources)})" if sources else ""))
        return sources[0]


def harmonic_params(config: RunConfig, settings, alpha=None) -> HarmonicParams:
    return HarmonicParams(
        alpha=config.alpha if alpha is None else alpha,
        beta=config.beta,
        grid_points=config.grid_points or settings.grid_points,
        half_width=config.half_width or settings.half_width,
    )


def resolve_model(config: RunConfig, settings) -> ModelSpec:
    kind = config.model_kind
    if kind == "file":
        return load_model(config.model_path, grid_points=config.grid_points or settings.grid_points,
                          half_width=config.half_width or settings.half_width)
    if kind == "square_well":
        return square_well_model(SquareWellParams(config.tau, config.eta))
    return harmonic_model(harmonic_params(config, settings))


def resolve_shift(config: RunConfig, spec: ModelSpec, tau: Optional[float] = None) -> float:
    """
    Shift μ for the configured policy.

    For the square well --paper-shift (and --optimize-shift) gives
    μ = −τ/2; other models fall back to the optimizer.
    """
    policy = config.shift_policy
    tau = config.tau if tau is None else tau
    if policy == SHIFT_EXPLICIT:
        return float(config.shift)
    if policy in (SHIFT_PAPER, SHIFT_OPTIMIZED) and config.model_kind == "square_well":
        return square_well_shift(tau)
    if policy == SHIFT_PAPER:
        logger.warning("--paper-shift is only defined for the square well, optimizing instead")
    if policy in (SHIFT_PAPER, SHIFT_OPTIMIZED):
        shift, _ = optimize_shift(spec)
        return shift
    return 0.0


def resolve_perturbation(config: RunConfig, spec: ModelSpec) -> Perturbation:
    """
    δV = η·e₁e₁ᵀ with --eta, a seeded random δV with --scale, otherwise zero.

    The square well with --paper-shift uses δV = −η·e₁e₁ᵀ, the deepening
    orientation the tabulated distances are measured for.
    """
    if config.eta is not None and config.scale is not None:
        raise ValidationError("--eta and --scale are mutually exclusive")
    if config.eta is not None:
        if config.model_kind == "square_well" and config.shift_policy == SHIFT_PAPER:
            return square_well_table_perturbation(config.eta)
        if spec.n == 2:
            return square_well_perturbation(config.eta)
        delta_v = np.zeros((spec.n, spec.n))
        delta_v[0, 0] = config.eta
        return Perturbation(SymmetricMatrix(delta_v), label=f"delta_v(eta={config.eta:g})")
    if config.scale is not None:
        return random_perturbation(spec.n, config.scale, config.seed)
    return Perturbation(SymmetricMatrix(np.zeros((spec.n, spec.n))), label="zero")


def check_residuals(spec: ModelSpec, eigenvalues, limit=RESIDUAL_LIMIT):
    """Pencil residual of every eigenvalue; SolverError when one exceeds limit·scale."""
    residuals = []
    for lam in eigenvalues:
        residual = pencil_residual(spec, lam)
        scale = pencil_scale(spec, lam)
        if residual > limit * scale:
            logger.error("pencil residual %.3e at eigenvalue %s exceeds %.1e x scale %.3e",
                         residual, lam, limit, scale)
            raise SolverError(f"pencil residual {residual:.3e} at eigenvalue {lam} exceeds tolerance")
        residuals.append(residual)
    return residuals


def fmt_real(x, digits=17) -> str:
    if x is None:
        return ""
    return f"{float(x):.{digits}g}"


def fmt_display(x, digits=5) -> str:
    """Scientific notation with ``digits`` significant digits (1.3409e-01)."""
    if x is None:
        return ""
    return f"{float(x):.{digits - 1}e}"


def fmt_bound(x, digits=5) -> str:
    """Like fmt_display, but trailing zeros of the mantissa are dropped (2e-01, 6.6667e-03)."""
    text = fmt_display(x, digits)
    if not math.isfinite(float(x)):
        return text
    mantissa, exponent = text.split("e")
    if "." in mantissa:
        mantissa = mantissa.rstrip("0").rstrip(".")
    return f"{mantissa}e{exponent}"


def make_json_safe(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: make_json_safe(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return make_json_safe(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _open_output(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def write_csv(header, rows, path=None):
    stream, owned = _open_output(path)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        stream.flush()
    finally:
        if owned:
            stream.close()
    if path is not None:
        logger.info("wrote %d rows to %s", len(rows), path)


def write_report(payload, path=None):
    stream, owned = _open_output(path)
    try:
        json.dump(make_json_safe(payload), stream, indent=2)
        stream.write("\n")
        stream.flush()
    finally:
        if owned:
            stream.close()
    if path is not None:
        logger.info("wrote report to %s", path)
