"""
상대 섭동 상한 (κ) 계산과 검증.

δV 로 생기는 δG = G′ − G 에 대해 |δG(ψ,ψ)| ≤ κ·(G − μJ)(ψ,ψ) 이면
시프트 μ 에서 잰 고유값은 (1 ± κ) 배 안에서만 움직인다.
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from utils.errors import (ContractionNotLessThanOne, DimensionMismatch, KappaMinusNotAboveMinusOne,
                          KappaOutOfRange, NotPositiveDefinite, ValidationError)
from utils.operator import (KleinGordonSystem, ModelSpec, SymmetricMatrix, as_array, assemble_system,
                            spd_eigh)
from utils.spectral import Interval, SpectrumReport, eigen_spectrum

logger = logging.getLogger(__name__)

SIGN_TOL = 1e-10
SINGULAR_TOL = 1e-12
CHECK_TOL = 1e-10

NEGATIVE = "negative"
POSITIVE = "positive"

POSITIVE_GAP = "positive-gap"
STRADDLING = "straddling"
NEGATIVE_GAP = "negative-gap"


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    delta_v: SymmetricMatrix
    delta_a: np.ndarray
    c: float
    c_norm: float
    nu: Optional[float]
    disjoint: bool
    signed: Optional[str]
    label: str = ""


@dataclass(frozen=True)
class KappaBundle:
    b: float
    c: float
    kappa_general: float
    kappa_sum: float
    kappa_norm: float
    kappa_relative: Optional[float]
    kappa_disjoint: Optional[float]
    kappa_signed: Optional[Tuple[float, float]]
    kappa_structured: Optional[Tuple[float, float]]
    kappa_exact: Optional[Tuple[float, float]]
    kappa0_hat: float
    kappa_prime_hat: float
    best: Tuple[float, float]
    best_name: str
    valid: Dict[str, bool] = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        """max(|κ₋|, |κ₊|) of the tightest available pair."""
        return max(abs(self.best[0]), abs(self.best[1]))

    def pairs(self) -> Dict[str, Tuple[float, float]]:
        result = {
            "kappa_general": (-self.kappa_general, self.kappa_general),
            "kappa_sum": (-self.kappa_sum, self.kappa_sum),
            "kappa_norm": (-self.kappa_norm, self.kappa_norm),
        }
        if self.kappa_relative is not None:
            result["kappa_relative"] = (-self.kappa_relative, self.kappa_relative)
        if self.kappa_disjoint is not None:
            result["kappa_disjoint"] = (-self.kappa_disjoint, self.kappa_disjoint)
        for name in ("kappa_signed", "kappa_structured", "kappa_exact"):
            value = getattr(self, name)
            if value is not None:
                result[name] = value
        return result


@dataclass(frozen=True)
class GapInclusion:
    original: Interval
    predicted: Optional[Interval]
    improved: Optional[Interval]
    uniform: Optional[Interval]
    case_tag: str
    shift: float = 0.0


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """𝐀⁻¹ 의 블록 Cholesky 인수 L 로 본 L*δ𝐀L."""
    matrix: np.ndarray
    a_minus: float
    a_plus: float
    norm_b: float
    t_plus: float
    t_minus: float

    @property
    def kappa_pair(self) -> Tuple[float, float]:
        return (-self.t_minus, self.t_plus)


@dataclass(frozen=True, eq=False)
class EigenvalueBounds:
    positive: np.ndarray
    negative: np.ndarray
    kappa_minus: float
    kappa_plus: float
    shift: float


@dataclass(frozen=True)
class KappaCheck:
    name: str
    kappa_minus: float
    kappa_plus: float
    valid: bool
    holds: bool


@dataclass(frozen=True, eq=False)
class VerificationReport:
    shift: float
    reference: float
    contraction: float
    contraction_perturbed: float
    unperturbed: SpectrumReport
    perturbed: SpectrumReport
    pairs: np.ndarray
    ratios: np.ndarray
    deviations: np.ndarray
    max_deviation: float
    paired_by_order: bool
    bundle: Optional[KappaBundle]
    checks: Tuple[KappaCheck, ...]
    inclusion: Optional[GapInclusion]
    inclusion_holds: Optional[bool]

    @property
    def all_valid_hold(self) -> bool:
        return all(check.holds for check in self.checks if check.valid)


def _require_contraction(system: KleinGordonSystem):
    if system.contraction >= 1.0:
        raise ContractionNotLessThanOne(system.contraction)


def gap_bound(system: KleinGordonSystem) -> float:
    """α = (1 − b)·min σ(U); no eigenvalue of H lies in (μ − α, μ + α)."""
    _require_contraction(system)
    return (1.0 - system.contraction) * system.min_u


def analyse_perturbation(system: KleinGordonSystem, perturbation, label=None) -> PerturbationSpec:
    """δV 로부터 c, ν, 지지 집합 분리, 부호 조건을 구한다."""
    delta_v = getattr(perturbation, "delta_v", perturbation)
    if not isinstance(delta_v, SymmetricMatrix):
        delta_v = SymmetricMatrix(as_array(delta_v))
    if delta_v.order != system.n:
        raise DimensionMismatch(f"perturbation has order {delta_v.order}, system has order {system.n}")
    if label is None:
        label = getattr(perturbation, "label", "")

    dv = delta_v.entries
    delta_a = dv @ system.u_inv
    c = float(linalg.norm(delta_a, 2))
    c_norm = float(linalg.norm(dv, 2) * linalg.norm(system.u_inv, 2))

    shifted_v = system.spec.v.entries - system.shift * np.eye(system.n)
    singular = linalg.svdvals(shifted_v)
    if singular[-1] <= SINGULAR_TOL * max(singular[0], 1.0):
        nu = None
    else:
        nu = float(linalg.norm(dv @ linalg.inv(shifted_v), 2))

    a = system.a_matrix
    product = delta_a.T @ a + a.T @ delta_a
    tol = SIGN_TOL * linalg.norm(a, 2) * c
    eigs = linalg.eigvalsh(0.5 * (product + product.T))
    disjoint = bool(np.max(np.abs(eigs)) <= tol)
    if eigs[-1] <= tol:
        signed = NEGATIVE
    elif eigs[0] >= -tol:
        signed = POSITIVE
    else:
        signed = None

    delta_a = np.array(delta_a)
    delta_a.setflags(write=False)
    return PerturbationSpec(delta_v=delta_v, delta_a=delta_a, c=c, c_norm=c_norm, nu=nu,
                            disjoint=disjoint, signed=signed, label=label)


def t_bound(a: float, norm_b: float) -> float:
    """Largest eigenvalue of [[a, β], [β, 0]] with β = norm_b."""
    half = 0.5 * a
    return half + math.sqrt(half * half + norm_b * norm_b)


def block_structure_analysis(a_matrix, delta_a) -> BlockStructure:
    # K = (I − AᵀA)^{1/2} 일 때
    # L*δ𝐀L = [[−K⁻¹(δAᵀA + AᵀδA)K⁻¹, K⁻¹δAᵀ], [δAK⁻¹, 0]]
    # 양 끝 고유값이 정확한 (κ₋, κ₊)
    a = np.asarray(a_matrix, dtype=float)
    da = np.asarray(delta_a, dtype=float)
    if a.shape != da.shape:
        raise DimensionMismatch(f"A has shape {a.shape} but δA has shape {da.shape}")
    contraction = float(linalg.norm(a, 2))
    if contraction >= 1.0:
        raise ContractionNotLessThanOne(contraction)

    n = a.shape[0]
    w, q = spd_eigh(np.eye(n) - a.T @ a)
    k_inv = (q / np.sqrt(w)) @ q.T
    k_inv = 0.5 * (k_inv + k_inv.T)

    upper_left = -k_inv @ (da.T @ a + a.T @ da) @ k_inv
    upper_left = 0.5 * (upper_left + upper_left.T)
    b_block = da @ k_inv
    matrix = np.block([[upper_left, b_block.T], [b_block, np.zeros((n, n))]])
    matrix.setflags(write=False)

    corner = linalg.eigvalsh(upper_left)
    a_minus, a_plus = float(corner[0]), float(corner[-1])
    norm_b = float(linalg.norm(b_block, 2))
    return BlockStructure(
        matrix=matrix, a_minus=a_minus, a_plus=a_plus, norm_b=norm_b,
        t_plus=t_bound(max(a_plus, 0.0), norm_b), t_minus=t_bound(max(-a_minus, 0.0), norm_b),
    )


def exact_kappa_pm(g, delta_g) -> Tuple[float, float]:
    """Extreme eigenvalues of the pencil δg·x = λ·g·x."""
    g = as_array(g)
    delta_g = as_array(delta_g)
    if g.shape != delta_g.shape:
        raise DimensionMismatch(f"g has shape {g.shape} but delta_g has shape {delta_g.shape}")
    w, q = spd_eigh(g)
    g_inv_half = (q / np.sqrt(w)) @ q.T
    m = g_inv_half @ delta_g @ g_inv_half
    eigs = linalg.eigvalsh(0.5 * (m + m.T))
    return float(eigs[0]), float(eigs[-1])


def rescale_kappa(kappa_minus: float, kappa_plus: float) -> Tuple[float, float]:
    """(κ̂₀, κ̂′) = ((κ₊ + κ₋)/2, (κ₊ − κ₋)/(2 + κ₊ + κ₋))."""
    if not kappa_minus > -1.0:
        raise KappaMinusNotAboveMinusOne(f"kappa_minus must exceed -1 (got {kappa_minus})")
    if kappa_minus > kappa_plus:
        raise KappaOutOfRange(f"kappa_minus {kappa_minus} exceeds kappa_plus {kappa_plus}")
    return 0.5 * (kappa_plus + kappa_minus), (kappa_plus - kappa_minus) / (2.0 + kappa_plus + kappa_minus)


def perturbed_system(system: KleinGordonSystem, perturbation) -> KleinGordonSystem:
    """같은 시프트에서 V + δV 로 바꾼 시스템."""
    delta_v = as_array(getattr(perturbation, "delta_v", perturbation))
    spec_p = system.spec.with_potential(system.spec.v.entries + delta_v)
    return assemble_system(spec_p, system.shift)


def perturbation_norm(system: KleinGordonSystem, system_p: KleinGordonSystem) -> float:
    """‖H′ − H‖."""
    return float(linalg.norm(system_p.hamiltonian - system.hamiltonian, 2))


def perturbation_constants(system: KleinGordonSystem, pert, exact: bool = True) -> KappaBundle:
    """가정을 확인할 수 있는 모든 κ."""
    _require_contraction(system)
    if not isinstance(pert, PerturbationSpec):
        pert = analyse_perturbation(system, pert)

    b, c = system.contraction, pert.c
    kappa_general = c / (1.0 - b)
    kappa_sum = c + b
    kappa_norm = pert.c_norm / (1.0 - b)
    kappa_relative = None if pert.nu is None else pert.nu * b / (1.0 - b)

    kappa_disjoint = None
    if pert.disjoint and b * b + c * c < 1.0:
        kappa_disjoint = c / math.sqrt(1.0 - b * b)

    kappa_signed = None
    if pert.signed == NEGATIVE:
        kappa_signed = (-c / math.sqrt(1.0 - b * b), kappa_general)
    elif pert.signed == POSITIVE:
        kappa_signed = (-kappa_general, c / math.sqrt(1.0 - b * b))

    structure = block_structure_analysis(system.a_matrix, pert.delta_a)
    kappa_structured = structure.kappa_pair
    if pert.signed == NEGATIVE:
        kappa_structured = (-structure.norm_b, structure.t_plus)
    elif pert.signed == POSITIVE:
        kappa_structured = (-structure.t_minus, structure.norm_b)

    kappa_exact = None
    if exact:
        delta_g = perturbed_system(system, pert).gram - system.gram
        kappa_exact = exact_kappa_pm(system.shifted_gram, delta_g)

    valid = {
        "kappa_general": kappa_general < 1.0,
        "kappa_sum": kappa_sum < 1.0,
        "kappa_norm": kappa_norm < 1.0,
        "kappa_relative": kappa_relative is not None and kappa_relative < 1.0,
        "kappa_disjoint": kappa_disjoint is not None and kappa_disjoint < 1.0,
        "kappa_signed": kappa_signed is not None and kappa_signed[0] > -1.0,
        "kappa_structured": kappa_structured[0] > -1.0,
        "kappa_exact": kappa_exact is not None and kappa_exact[0] > -1.0,
    }

    # 가장 좁은 쌍을 고른다: exact > structured > signed > general
    for name, pair in (("kappa_exact", kappa_exact), ("kappa_structured", kappa_structured),
                       ("kappa_signed", kappa_signed)):
        if pair is not None and valid[name]:
            best, best_name = pair, name
            break
    else:
        best, best_name = (-kappa_general, kappa_general), "kappa_general"

    if best[0] > -1.0:
        kappa0_hat, kappa_prime_hat = rescale_kappa(*best)
    else:
        kappa0_hat, kappa_prime_hat = math.nan, math.nan

    return KappaBundle(
        b=b, c=c, kappa_general=kappa_general, kappa_sum=kappa_sum, kappa_norm=kappa_norm,
        kappa_relative=kappa_relative, kappa_disjoint=kappa_disjoint, kappa_signed=kappa_signed,
        kappa_structured=kappa_structured, kappa_exact=kappa_exact,
        kappa0_hat=kappa0_hat, kappa_prime_hat=kappa_prime_hat,
        best=best, best_name=best_name, valid=valid,
    )


def _case_of(lower, upper):
    if lower >= 0.0:
        return POSITIVE_GAP
    if upper <= 0.0:
        return NEGATIVE_GAP
    return STRADDLING


def _relative(gap: Interval, shift: float):
    if gap.is_empty:
        raise ValidationError("spectral gap is empty")
    return gap.lower - shift, gap.upper - shift


def _scaled(lower, upper, lower_factor, upper_factor, shift):
    return Interval(lower_factor * lower + shift, upper_factor * upper + shift)


def gap_inclusion(gap: Interval, kappa: float, shift: float = 0.0) -> GapInclusion:
    # |δg| ≤ κ·g 일 때 섭동된 스펙트럼이 들어오지 않는 구간
    if not 0.0 <= kappa < 1.0:
        raise KappaOutOfRange(f"kappa must lie in [0, 1) (got {kappa})")
    lower, upper = _relative(gap, shift)
    case = _case_of(lower, upper)
    if case == POSITIVE_GAP:
        predicted = _scaled(lower, upper, 1.0 + kappa, 1.0 - kappa, shift)
    elif case == NEGATIVE_GAP:
        predicted = _scaled(lower, upper, 1.0 - kappa, 1.0 + kappa, shift)
    else:
        predicted = _scaled(lower, upper, 1.0 - kappa, 1.0 - kappa, shift)
    return GapInclusion(original=gap, predicted=predicted, improved=None, uniform=None,
                        case_tag=case, shift=float(shift))


def improved_inclusion(gap: Interval, kappa_minus: float, kappa_plus: float, shift: float = 0.0) -> Interval:
    """g → (1 + κ̂₀)g 로 늘린 뒤 κ̂′ 로 다시 적용한 포함 구간."""
    # 양의 간격 ((1+κ₊)λ⁻, (1+κ₋)λ⁺), 걸친 간격 ((1+κ₋)λ⁻, (1+κ₋)λ⁺),
    # 음의 간격 ((1+κ₋)λ⁻, (1+κ₊)λ⁺)
    kappa0_hat, kappa_prime_hat = rescale_kappa(kappa_minus, kappa_plus)
    lower, upper = _relative(gap, shift)
    stretch = 1.0 + kappa0_hat
    shrink, grow = stretch * (1.0 - kappa_prime_hat), stretch * (1.0 + kappa_prime_hat)
    case = _case_of(lower, upper)
    if case == POSITIVE_GAP:
        return _scaled(lower, upper, grow, shrink, shift)
    if case == NEGATIVE_GAP:
        return _scaled(lower, upper, shrink, grow, shift)
    return _scaled(lower, upper, shrink, shrink, shift)


def norm_bound_interval(gap: Interval, a: float, norm_j1: float) -> Interval:
    """노름 a 인 유계 섭동: (λ⁻ + a‖J₁‖, λ⁺ − a‖J₁‖)."""
    spread = a * norm_j1
    return Interval(gap.lower + spread, gap.upper - spread)


def pessimistic_norm_interval(gap: Interval, a: float, g_inv_norm: float, shift: float = 0.0) -> Interval:
    # |δg| ≤ ‖δG‖‖G⁻¹‖·g, a = ‖δG‖. a‖G⁻¹‖ ≥ 1 이면 빈 구간
    kappa = a * g_inv_norm
    if kappa >= 1.0:
        return Interval.empty(shift)
    return gap_inclusion(gap, kappa, shift).predicted


def predict_inclusion(gap: Interval, bundle: KappaBundle, shift: float = 0.0,
                      a: Optional[float] = None, norm_j1: Optional[float] = None) -> GapInclusion:
    """기본, 재조정(κ̂₀, κ̂′), 균등(‖J₁‖) 세 예측."""
    kappa = bundle.kappa
    if kappa < 1.0:
        result = gap_inclusion(gap, kappa, shift)
    else:
        lower, upper = _relative(gap, shift)
        result = GapInclusion(original=gap, predicted=None, improved=None, uniform=None,
                              case_tag=_case_of(lower, upper), shift=float(shift))
    improved = None
    if bundle.best[0] > -1.0:
        improved = improved_inclusion(gap, bundle.best[0], bundle.best[1], shift)
    uniform = None
    if a is not None and norm_j1 is not None:
        uniform = norm_bound_interval(gap, a, norm_j1)
    return GapInclusion(original=gap, predicted=result.predicted, improved=improved, uniform=uniform,
                        case_tag=result.case_tag, shift=float(shift))


def form_domain_constant(kappa_plus: float) -> float:
    """((κ₊ − 1)/(κ₊ + 1))·(1 + (κ₊ − 1)/2) for g ≤ g′ ≤ (κ₊ + 1)g."""
    if not kappa_plus > -1.0:
        raise KappaOutOfRange(f"kappa_plus must exceed -1 (got {kappa_plus})")
    return (kappa_plus - 1.0) / (kappa_plus + 1.0) * (1.0 + 0.5 * (kappa_plus - 1.0))


def is_spectral_by_domination(system: KleinGordonSystem, delta_g) -> bool:
    """δG ≥ 0 이면 G′ − μJ 도 양의 정부호이므로 H′ = JG′ 는 J-스펙트럴."""
    delta_g = as_array(delta_g)
    if delta_g.shape != system.gram.shape:
        raise DimensionMismatch(f"delta_g has shape {delta_g.shape}, expected {system.gram.shape}")
    scale = max(float(linalg.norm(delta_g, 2)), 1.0)
    if linalg.eigvalsh(0.5 * (delta_g + delta_g.T))[0] < -SIGN_TOL * scale:
        raise ValidationError("delta_g is not positive semidefinite")
    try:
        spd_eigh(system.shifted_gram + delta_g)
    except NotPositiveDefinite:
        return False
    return True


def eigenvalue_interval_bounds(report: SpectrumReport, kappa: float,
                               kappa_plus: Optional[float] = None) -> EigenvalueBounds:
    # κ 하나면 (1 − κ, 1 + κ) 배, kappa_plus 가 있으면 kappa 는 κ₋ 이고 (1 + κ₋, 1 + κ₊) 배
    if kappa_plus is None:
        if not 0.0 <= kappa < 1.0:
            raise KappaOutOfRange(f"kappa must lie in [0, 1) (got {kappa})")
        kappa_minus, kappa_plus = -kappa, kappa
    else:
        kappa_minus = kappa
        if not kappa_minus > -1.0:
            raise KappaMinusNotAboveMinusOne(f"kappa_minus must exceed -1 (got {kappa_minus})")
    shift = report.shift

    def rows(values):
        d = np.asarray(values, dtype=float) - shift
        ends = np.stack([shift + (1.0 + kappa_minus) * d, shift + (1.0 + kappa_plus) * d], axis=1)
        return np.sort(ends, axis=1) if ends.size else np.zeros((0, 2))

    return EigenvalueBounds(positive=rows(report.positive_ordered), negative=rows(report.negative_ordered),
                            kappa_minus=kappa_minus, kappa_plus=kappa_plus, shift=shift)


def _leading_isolated(intervals):
    count = 0
    for k in range(intervals.shape[0]):
        others = np.delete(intervals, k, axis=0)
        overlaps = np.any((others[:, 0] <= intervals[k, 1]) & (intervals[k, 0] <= others[:, 1]))
        if overlaps:
            break
        count += 1
    return count


def isolated_count(report: SpectrumReport, kappa: float) -> Tuple[int, int]:
    # 시프트에서 바깥쪽으로 세어, κ 구간이 같은 쪽 다른 구간과 겹치지 않는 고유값 수
    bounds = eigenvalue_interval_bounds(report, kappa)
    return _leading_isolated(bounds.positive), _leading_isolated(bounds.negative)


def _pair(report: SpectrumReport, report_p: SpectrumReport):
    # 양쪽 개수가 같으면 시프트 기준 순서로, 아니면 실수부 정렬로 짝짓는다
    if (report.is_real_spectrum and report_p.is_real_spectrum
            and report.positive_ordered.size == report_p.positive_ordered.size
            and report.negative_ordered.size == report_p.negative_ordered.size):
        before = np.concatenate([report.negative_ordered[::-1], report.positive_ordered])
        after = np.concatenate([report_p.negative_ordered[::-1], report_p.positive_ordered])
        return before, after, True
    logger.warning("spectra are not both real with matching sides, pairing sorted real parts")
    return np.sort(report.eigenvalues), np.sort(report_p.eigenvalues), False


def verify_bounds(spec: ModelSpec, pert, shift: float = 0.0, reference: Optional[float] = None) -> VerificationReport:
    """V → V + δV 의 실제 상대 이동을 모든 κ 와 비교한다."""
    # 이동은 |λ′_k − λ_k| / |λ_k − reference|, reference 기본값은 시프트
    system = assemble_system(spec, shift)
    system_p = perturbed_system(system, pert)
    report = eigen_spectrum(system)
    report_p = eigen_spectrum(system_p)
    reference = system.shift if reference is None else float(reference)

    before, after, by_order = _pair(report, report_p)
    ratios = (after - before) / (before - reference)
    deviations = np.abs(ratios)
    max_deviation = float(np.max(deviations)) if deviations.size else 0.0

    bundle = None
    checks = []
    inclusion = None
    inclusion_holds = None
    if system.contraction < 1.0:
        bundle = perturbation_constants(system, pert)
        for name, (kappa_minus, kappa_plus) in bundle.pairs().items():
            holds = bool(np.all(ratios >= kappa_minus - CHECK_TOL) and np.all(ratios <= kappa_plus + CHECK_TOL))
            checks.append(KappaCheck(name, kappa_minus, kappa_plus, bundle.valid[name], holds))
        if report.is_real_spectrum and not report.central_gap.is_empty:
            inclusion = predict_inclusion(report.central_gap, bundle, system.shift)
            perturbed_values = report_p.complex_eigenvalues
            real_values = perturbed_values.real[perturbed_values.imag == 0.0]
            inclusion_holds = True
            for interval in (inclusion.predicted, inclusion.improved):
                if interval is not None and any(interval.contains(x, margin=CHECK_TOL) for x in real_values):
                    inclusion_holds = False
    else:
        logger.warning("contraction b=%.6g is not below one, no bounds are checked", system.contraction)

    pairs = np.stack([before, after], axis=1)
    for array in (pairs, ratios, deviations):
        array.setflags(write=False)
    logger.info("verified %s: max deviation %.5e", spec.label or "model", max_deviation)
    return VerificationReport(
        shift=system.shift, reference=reference, contraction=system.contraction,
        contraction_perturbed=system_p.contraction, unperturbed=report, perturbed=report_p,
        pairs=pairs, ratios=ratios, deviations=deviations, max_deviation=max_deviation,
        paired_by_order=by_order, bundle=bundle, checks=tuple(checks),
        inclusion=inclusion, inclusion_holds=inclusion_holds,
    )
