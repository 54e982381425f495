"""
H = JG 의 스펙트럼.

b < 1 이면 G − μJ = W² 가 양의 정부호이고 H − μI = JW² 는 대칭 행렬
M = WJW 와 닮음이므로 스펙트럼이 실수다. 고유벡터는 W⁻¹ 로 되돌린다.
b 가 1 에 가깝거나 넘으면 일반 고유값 풀이로 넘어가 복소 쌍을 보고한다.
"""
from dataclasses import dataclass, replace
from enum import Enum
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from utils.errors import (EmptySpectrum, NonRealSpectrum, NotPositiveDefinite,
                          ZeroInSpectrum)
from utils.operator import KleinGordonSystem, ModelSpec, as_array, spd_eigh, swap_symmetry

logger = logging.getLogger(__name__)

PATH_MARGIN = 0.02
NEUTRAL_TOL = 1e-6
CLUSTER_TOL = 1e-8
IMAG_TOL = 1e-8
SNAP_TOL = 1e-6


class SignType(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Interval:
    """Open interval (lower, upper); empty when lower >= upper."""
    lower: float
    upper: float

    @classmethod
    def empty(cls, at=0.0):
        return cls(float(at), float(at))

    @property
    def is_empty(self) -> bool:
        return not self.lower < self.upper

    @property
    def width(self) -> float:
        return 0.0 if self.is_empty else self.upper - self.lower

    def contains(self, x, margin=0.0) -> bool:
        """True if x lies strictly inside, at least ``margin`` away from both ends."""
        if self.is_empty:
            return False
        return self.lower + margin < x < self.upper - margin

    def contains_interval(self, other, tol=0.0) -> bool:
        if other.is_empty:
            return True
        return self.lower <= other.lower + tol and other.upper <= self.upper + tol

    def as_tuple(self):
        return (self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvalues_imag: np.ndarray
    eigenvectors: np.ndarray
    sign_types: Tuple[SignType, ...]
    positive_ordered: np.ndarray
    negative_ordered: np.ndarray
    central_gap: Optional[Interval]
    defective: bool
    residual_max: float
    is_real_spectrum: bool
    shift: float
    path: str
    hamiltonian_norm: float

    @property
    def complex_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues + 1j * self.eigenvalues_imag

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class SignOperator:
    j1: np.ndarray
    norm_j1: float


@dataclass(frozen=True)
class DefectWitness:
    defective: bool
    eigenvalue: Optional[float] = None
    vector: Optional[np.ndarray] = None
    algebraic_multiplicity: int = 0
    geometric_multiplicity: int = 0
    reason: str = ""


def _similarity_factor(shifted_gram):
    w, q = spd_eigh(shifted_gram)
    root = (q * np.sqrt(w)) @ q.T
    root_inv = (q / np.sqrt(w)) @ q.T
    return 0.5 * (root + root.T), 0.5 * (root_inv + root_inv.T)


def _similarity_eigs(shifted_gram, j):
    # M = WJW 로 JW² 의 고유쌍, 고유값은 시프트 기준
    root, root_inv = _similarity_factor(shifted_gram)
    m = root @ j @ root
    lam, q = linalg.eigh(0.5 * (m + m.T))
    return lam, root_inv @ q, (root, root_inv, q)


def _general_eigs(hamiltonian, snap_tol=SNAP_TOL):
    # 일반 고유값 풀이. 갈라진 결함 묶음은 다시 합친다
    lam, vecs = linalg.eig(hamiltonian)
    h_norm = max(linalg.norm(hamiltonian, 2), np.finfo(float).tiny)
    identity = np.eye(hamiltonian.shape[0])
    merged = set()
    for i in range(lam.shape[0]):
        if i in merged:
            continue
        for k in range(i + 1, lam.shape[0]):
            if k in merged or abs(lam[i] - lam[k]) > snap_tol * h_norm:
                continue
            centre = 0.5 * (lam[i] + lam[k]).real
            smallest = linalg.svdvals(hamiltonian - centre * identity)[-1]
            if smallest <= CLUSTER_TOL * h_norm:
                logger.info("merged near-defective eigenvalue pair at %.12g (split %.3e)",
                            centre, abs(lam[i] - lam[k]))
                lam[i] = lam[k] = centre
                merged.update((i, k))
                break
    return lam, vecs


def _build_report(hamiltonian, j, lam, vecs, shift, path) -> SpectrumReport:
    lam = np.asarray(lam, dtype=complex)
    vecs = np.asarray(vecs)
    h_norm = float(linalg.norm(hamiltonian, 2))
    imag_tol = IMAG_TOL * max(h_norm, 1.0)

    real = lam.real.copy()
    imag = np.where(np.abs(lam.imag) <= imag_tol, 0.0, lam.imag)
    order = np.lexsort((imag, real))
    real, imag, vecs = real[order], imag[order], vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    if np.all(imag == 0.0):
        vecs = np.real_if_close(vecs, tol=1e6)

    sign_types = []
    for col in range(vecs.shape[1]):
        x = vecs[:, col]
        value = float(np.real(np.vdot(x, j @ x)))
        if abs(value) < NEUTRAL_TOL:
            sign_types.append(SignType.NEUTRAL)
        elif value > 0:
            sign_types.append(SignType.POSITIVE)
        else:
            sign_types.append(SignType.NEGATIVE)

    values = real + 1j * imag
    residuals = np.linalg.norm(hamiltonian @ vecs - vecs * values, axis=0)
    residual_max = float(np.max(residuals) / max(h_norm, np.finfo(float).tiny))

    is_real = bool(np.all(imag == 0.0))
    real_only = real[imag == 0.0]
    positive = np.sort(real_only[real_only > shift])
    negative = np.sort(real_only[real_only < shift])[::-1]
    gap = _gap_from(real_only, shift, h_norm) if is_real else None

    for array in (real, imag, vecs, positive, negative):
        array.setflags(write=False)
    return SpectrumReport(
        eigenvalues=real, eigenvalues_imag=imag, eigenvectors=vecs,
        sign_types=tuple(sign_types), positive_ordered=positive, negative_ordered=negative,
        central_gap=gap, defective=False, residual_max=residual_max, is_real_spectrum=is_real,
        shift=float(shift), path=path, hamiltonian_norm=h_norm,
    )


def _gap_from(values, shift, scale):
    values = np.asarray(values, dtype=float)
    if np.any(np.abs(values - shift) <= CLUSTER_TOL * max(scale, 1.0)):
        return Interval.empty(shift)
    below = values[values < shift]
    above = values[values > shift]
    lower = float(below.max()) if below.size else -math.inf
    upper = float(above.min()) if above.size else math.inf
    return Interval(lower, upper)


def eigen_spectrum(system: KleinGordonSystem, path_margin: float = PATH_MARGIN) -> SpectrumReport:
    """H 의 고유값, 고유벡터, 부호 유형."""
    # b < 1 − path_margin 이면 닮음 경로, 아니거나 G − μJ 가 수치적으로 부정이면 일반 풀이
    hamiltonian, j = system.hamiltonian, system.j
    report = None
    if system.contraction < 1.0 - path_margin:
        try:
            lam, vecs, _ = _similarity_eigs(system.shifted_gram, j)
            report = _build_report(hamiltonian, j, lam + system.shift, vecs, system.shift, "similarity")
        except NotPositiveDefinite as exc:
            logger.warning("similarity route failed (%s), falling back to general eigensolver", exc)
    else:
        logger.warning("contraction b=%.6g is within %.3g of one, using general eigensolver",
                       system.contraction, path_margin)
    if report is None:
        lam, vecs = _general_eigs(hamiltonian)
        report = _build_report(hamiltonian, j, lam, vecs, system.shift, "general")

    witness = defect_check(system, report)
    return replace(report, defective=witness.defective)


def gram_spectrum(gram, shift: float = 0.0) -> SpectrumReport:
    """G − μJ 가 양의 정부호인 임의의 대칭 G 에 대한 H = JG 의 스펙트럼."""
    g = as_array(gram)
    n = g.shape[0] // 2
    j = swap_symmetry(n)
    lam, vecs, _ = _similarity_eigs(0.5 * (g + g.T) - shift * j, j)
    report = _build_report(j @ g, j, lam + shift, vecs, shift, "similarity")
    witness = _defect_witness(j @ g, j, report)
    return replace(report, defective=witness.defective)


def sign_operator(system: KleinGordonSystem) -> SignOperator:
    """J₁ = sign(H − μI) = W⁻¹ sign(M) W with M = WJW."""
    if system.contraction >= 1.0:
        raise NotPositiveDefinite(
            f"sign operator needs b < 1 (got b = {system.contraction:.6g})")
    return sign_operator_of_gram(system.shifted_gram)


def sign_operator_of_gram(shifted_gram) -> SignOperator:
    g = as_array(shifted_gram)
    j = swap_symmetry(g.shape[0] // 2)
    root, root_inv = _similarity_factor(g)
    lam, q = linalg.eigh(0.5 * (root @ j @ root + (root @ j @ root).T))
    j1 = root_inv @ (q * np.sign(lam)) @ q.T @ root
    j1.setflags(write=False)
    return SignOperator(j1=j1, norm_j1=float(linalg.norm(j1, 2)))


def central_gap(report: SpectrumReport, shift: Optional[float] = None) -> Interval:
    """시프트를 포함하고 고유값이 없는 가장 큰 열린 구간."""
    if not report.is_real_spectrum:
        raise NonRealSpectrum("central gap is only defined for a real spectrum")
    shift = report.shift if shift is None else float(shift)
    return _gap_from(report.eigenvalues, shift, report.hamiltonian_norm)


def relative_distance(lam: float, spectrum: Sequence[float]) -> float:
    """inf over s in the spectrum of |(s − λ)/s|."""
    values = np.asarray(list(spectrum), dtype=complex)
    if values.size == 0:
        raise EmptySpectrum("relative distance to an empty spectrum")
    if np.any(values == 0):
        raise ZeroInSpectrum("relative distance is undefined when 0 is in the spectrum")
    return float(np.min(np.abs((values - lam) / values)))


def pencil_matrix(spec: ModelSpec, lam: complex) -> np.ndarray:
    """Q(λ) = (λI − V)² − U²."""
    shifted = lam * np.eye(spec.n) - spec.v.entries
    return shifted @ shifted - spec.u_squared.entries


def pencil_residual(spec: ModelSpec, lam: complex) -> float:
    return float(linalg.svdvals(pencil_matrix(spec, complex(lam)))[-1])


def pencil_scale(spec: ModelSpec, lam: complex) -> float:
    return (linalg.norm(spec.u_squared.entries, 2) + abs(lam) ** 2
            + linalg.norm(spec.v.entries, 2) ** 2)


def _clusters(values, tol):
    groups = []
    for idx in np.argsort(values):
        if groups and abs(values[idx] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _geometric_multiplicity(hamiltonian, lam, tol):
    singular = linalg.svdvals(hamiltonian - lam * np.eye(hamiltonian.shape[0]))
    return int(np.sum(singular <= tol))


def _defect_witness(hamiltonian, j, report: SpectrumReport) -> DefectWitness:
    h_norm = max(report.hamiltonian_norm, np.finfo(float).tiny)
    tol = CLUSTER_TOL * h_norm
    real_idx = np.flatnonzero(report.eigenvalues_imag == 0.0)
    values = report.eigenvalues[real_idx]

    for group in _clusters(values, tol):
        members = real_idx[group]
        lam = float(np.mean(report.eigenvalues[members]))
        algebraic = len(members)
        neutral = [m for m in members if report.sign_types[m] is SignType.NEUTRAL]
        if not neutral and algebraic == 1:
            continue
        geometric = _geometric_multiplicity(hamiltonian, lam, tol)
        if neutral:
            return DefectWitness(True, lam, report.eigenvectors[:, neutral[0]], algebraic,
                                 geometric, "J-neutral eigenvector")
        if geometric < algebraic:
            return DefectWitness(True, lam, report.eigenvectors[:, members[0]], algebraic,
                                 geometric, "geometric multiplicity below algebraic")
    return DefectWitness(False)


def defect_check(system: KleinGordonSystem, report: SpectrumReport) -> DefectWitness:
    """결함(또는 거의 결함인) 실수 고유값 검사."""
    return _defect_witness(system.hamiltonian, system.j, report)
