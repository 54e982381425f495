"""
예제 시스템 모음.

- 질량항이 있는 1차원 조화 진동자 + 선형 전위 V = αx (Dirichlet 유한차분)
- 2x2 사각 우물 U² = [[2, -1], [-1, 2]], V = τ·diag(-1, 0)
- 재현 가능한 난수 섭동
"""
from dataclasses import dataclass
import logging
import math
from typing import Iterable, List, Tuple

import numpy as np
from scipy import linalg, sparse

from models.model_spec import HarmonicParams, Perturbation, SquareWellParams
from utils.errors import AlphaOutOfRange, ValidationError
from utils.operator import ModelSpec, SymmetricMatrix, assemble_system
from utils.spectral import eigen_spectrum

logger = logging.getLogger(__name__)

SQUARE_WELL_U_SQUARED = ((2.0, -1.0), (-1.0, 2.0))


def harmonic_grid(p: HarmonicParams) -> np.ndarray:
    """Interior points x_i = −L + i·h, i = 1..N."""
    return -p.half_width + p.step * np.arange(1, p.grid_points + 1)


def harmonic_model(p: HarmonicParams) -> ModelSpec:
    x = harmonic_grid(p)
    h2 = p.step * p.step
    n = p.grid_points
    laplacian = sparse.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h2
    u_squared = laplacian.toarray() + np.diag(x * x + p.beta)
    v = np.diag(p.alpha * x)
    return ModelSpec(SymmetricMatrix(u_squared), SymmetricMatrix(v),
                     label=f"harmonic(alpha={p.alpha:g}, beta={p.beta:g}, N={n}, L={p.half_width:g})")


def _check_alpha(alpha):
    if not 0.0 <= alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1) (got {alpha})")


def _check_level(n):
    if int(n) != n or n < 0:
        raise ValidationError(f"level n must be a nonnegative integer (got {n})")


def exact_harmonic_eigs(alpha: float, beta: float, n: int) -> Tuple[float, float]:
    """±√((1−α²)β + (1−α²)^{3/2}(1+2n))."""
    _check_alpha(alpha)
    _check_level(n)
    s = 1.0 - alpha * alpha
    value = math.sqrt(s * beta + s ** 1.5 * (1 + 2 * n))
    return value, -value


def printed_harmonic_eigs(alpha: float, beta: float, n: int) -> Tuple[float, float]:
    # 원래 인쇄된 형태: (1+2n) 대신 √(1+2n). n = 0 에서만 일치한다
    _check_alpha(alpha)
    _check_level(n)
    s = 1.0 - alpha * alpha
    value = math.sqrt(s * beta + s ** 1.5 * math.sqrt(1 + 2 * n))
    return value, -value


def harmonic_sensitivity(alpha: float) -> float:
    """μ′(α)/μ(α) = −(3/2)·α/(1−α²) at β = 0."""
    _check_alpha(alpha)
    return -1.5 * alpha / (1.0 - alpha * alpha)


def discretized_harmonic_eigs(p: HarmonicParams, n: int) -> Tuple[float, float]:
    """n-th positive and negative eigenvalue of the discretized H (shift 0)."""
    _check_level(n)
    report = eigen_spectrum(assemble_system(harmonic_model(p), 0.0))
    if n >= min(report.positive_ordered.size, report.negative_ordered.size):
        raise ValidationError(f"level {n} is not available on a grid of {p.grid_points} points")
    return float(report.positive_ordered[n]), float(report.negative_ordered[n])


@dataclass(frozen=True)
class SensitivityComparison:
    alpha: float
    epsilon: float
    exact_ratio: float
    finite_difference: float
    discretized: float
    bound: float
    factor: float


def sensitivity_comparison(alpha: float, epsilon: float, grid_points: int = 1000,
                           half_width: float = 12.0, discretized: bool = True) -> SensitivityComparison:
    """
    Relative change of the lowest positive eigenvalue when α → α + ε (β = 0).

    ``bound`` is the certified ε/(1 − α); ``factor`` = (3/2)α/(1 + α) is the
    ratio of the first-order change to that bound.
    """
    _check_alpha(alpha)
    _check_alpha(alpha + epsilon)
    base, _ = exact_harmonic_eigs(alpha, 0.0, 0)
    moved, _ = exact_harmonic_eigs(alpha + epsilon, 0.0, 0)
    fd = (moved - base) / base

    fd_grid = math.nan
    if discretized:
        grid_base, _ = discretized_harmonic_eigs(HarmonicParams(alpha, 0.0, grid_points, half_width), 0)
        grid_moved, _ = discretized_harmonic_eigs(HarmonicParams(alpha + epsilon, 0.0, grid_points, half_width), 0)
        fd_grid = (grid_moved - grid_base) / grid_base

    return SensitivityComparison(
        alpha=alpha, epsilon=epsilon, exact_ratio=harmonic_sensitivity(alpha) * epsilon,
        finite_difference=fd, discretized=fd_grid, bound=epsilon / (1.0 - alpha),
        factor=1.5 * alpha / (1.0 + alpha),
    )


@dataclass(frozen=True)
class SharpnessPoint:
    alpha: float
    contraction: float
    gap_half_width: float
    certified_half_width: float


def harmonic_sharpness_probe(alphas: Iterable[float], grid_points: int = 200, half_width: float = 10.0,
                             beta: float = 0.0) -> List[SharpnessPoint]:
    """b and the central gap half-width along an increasing α ladder."""
    points = []
    for alpha in alphas:
        system = assemble_system(harmonic_model(HarmonicParams(alpha, beta, grid_points, half_width)), 0.0)
        report = eigen_spectrum(system)
        if report.is_real_spectrum:
            gap = report.central_gap
            half = 0.0 if gap.is_empty else min(gap.upper, -gap.lower)
        else:
            half = 0.0
        certified = (1.0 - system.contraction) * system.min_u if system.contraction < 1.0 else 0.0
        logger.debug("sharpness probe alpha=%g: b=%.6g, gap half-width=%.6g", alpha, system.contraction, half)
        points.append(SharpnessPoint(float(alpha), system.contraction, float(half), float(certified)))
    return points


def square_well_model(p) -> ModelSpec:
    if not isinstance(p, SquareWellParams):
        p = SquareWellParams(float(p))
    v = p.tau * np.diag([-1.0, 0.0])
    return ModelSpec(SymmetricMatrix(np.array(SQUARE_WELL_U_SQUARED)), SymmetricMatrix(v),
                     label=f"square_well(tau={p.tau:g})")


def square_well_shift(tau: float) -> float:
    """μ = −τ/2, where the contraction equals τ/2."""
    return -0.5 * tau


def square_well_perturbation(eta: float) -> Perturbation:
    return Perturbation(SymmetricMatrix(np.diag([float(eta), 0.0])), label=f"delta_v(eta={eta:g})")


def square_well_table_perturbation(eta: float) -> Perturbation:
    # 표의 실제 거리는 우물을 깊게 하는 방향 δV = diag(-η, 0) 기준
    return Perturbation(SymmetricMatrix(np.diag([-float(eta), 0.0])), label=f"delta_v(eta={eta:g}, deepening)")


@dataclass(frozen=True)
class SquareWellDiagnostics:
    tau: float
    contraction: float
    potential_ratio: float
    potential_ratio_squared: float


def square_well_diagnostics(tau: float) -> SquareWellDiagnostics:
    """
    Contraction at μ = −τ/2 and the two normalized potential norms
    ‖V·U⁻¹‖/τ (= √(2/3)) and ‖V·(U²)⁻¹‖/τ (= √5/3 ≈ 0.745).
    """
    spec = square_well_model(SquareWellParams(tau))
    system = assemble_system(spec, square_well_shift(tau))
    unit = np.diag([-1.0, 0.0])
    ratio = float(linalg.norm(unit @ system.u_inv, 2))
    ratio_squared = float(linalg.norm(unit @ linalg.inv(spec.u_squared.entries), 2))
    return SquareWellDiagnostics(tau=tau, contraction=system.contraction,
                                 potential_ratio=ratio, potential_ratio_squared=ratio_squared)


def random_perturbation(order: int, scale: float, seed: int) -> Perturbation:
    """Symmetrized δV with entries drawn uniformly from [−scale, scale] (PCG64)."""
    if not scale >= 0.0:
        raise ValidationError(f"scale must be nonnegative (got {scale})")
    if order < 1:
        raise ValidationError(f"order must be positive (got {order})")
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-scale, scale, size=(order, order))
    return Perturbation(SymmetricMatrix(0.5 * (raw + raw.T)), label=f"random(n={order}, scale={scale:g}, seed={seed})")
