"""
Klein-Gordon 블록 연산자 조립.

행렬 자료 (U², V) 로부터 H = JG, G, H₀, U 블록, A = (V − μ)U⁻¹ 와
축약 상수 b = ‖A‖ 를 만든다. 모든 객체는 생성 후 변경되지 않는다.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

from utils.errors import DimensionMismatch, NotPositiveDefinite, ValidationError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
PD_TOL = 1e-12
SHIFT_XATOL = 1e-10


def _frozen(array):
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def as_array(m):
    if isinstance(m, SymmetricMatrix):
        return m.entries
    return np.asarray(m, dtype=float)


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix, checked on construction."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise DimensionMismatch(f"expected a nonempty square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValidationError("matrix has non-finite entries")
        scale = 1.0 + np.max(np.abs(entries))
        if np.max(np.abs(entries - entries.T)) > SYMMETRY_TOL * scale:
            raise ValidationError("matrix is not symmetric")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SymmetricMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class ModelSpec:
    """The pair (U², V): U² positive definite, V symmetric, same order."""
    u_squared: SymmetricMatrix
    v: SymmetricMatrix
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.u_squared, SymmetricMatrix):
            object.__setattr__(self, "u_squared", SymmetricMatrix(self.u_squared))
        if not isinstance(self.v, SymmetricMatrix):
            object.__setattr__(self, "v", SymmetricMatrix(self.v))
        if self.u_squared.order != self.v.order:
            raise DimensionMismatch(
                f"u_squared has order {self.u_squared.order} but v has order {self.v.order}"
            )
        spd_eigh(self.u_squared)

    @property
    def n(self) -> int:
        return self.u_squared.order

    def with_potential(self, v, label=None):
        return ModelSpec(self.u_squared, SymmetricMatrix(as_array(v)), self.label if label is None else label)


def spd_eigh(m, tol=PD_TOL):
    """Eigendecomposition of a symmetric positive definite matrix.

    Raises NotPositiveDefinite when the smallest eigenvalue is not above
    ``tol`` times the spectral norm.
    """
    a = as_array(m)
    a = 0.5 * (a + a.T)
    w, q = linalg.eigh(a)
    norm = max(np.max(np.abs(w)), np.finfo(float).tiny)
    if w[0] <= tol * norm:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (smallest eigenvalue {w[0]:.3e})", min_eigenvalue=w[0]
        )
    return w, q


def spd_power(m, power, tol=PD_TOL):
    w, q = spd_eigh(m, tol=tol)
    return SymmetricMatrix(_symmetrize((q * w ** power) @ q.T))


def sqrt_spd(m, tol=PD_TOL) -> SymmetricMatrix:
    return spd_power(m, 0.5, tol=tol)


def _symmetrize(a):
    return 0.5 * (a + a.T)


def swap_symmetry(n: int) -> np.ndarray:
    """The hermitian symmetry J = [[0, I], [I, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]])


@dataclass(frozen=True, eq=False)
class _URoots:
    u: np.ndarray
    u_inv: np.ndarray
    u_half: np.ndarray
    u_inv_half: np.ndarray
    min_u: float


def _u_roots(spec: ModelSpec) -> _URoots:
    # U, U⁻¹, U^{1/2}, U^{-1/2} 를 U² 의 고유분해 한 번으로 계산
    w, q = spd_eigh(spec.u_squared)

    def power(p):
        return _frozen(_symmetrize((q * w ** p) @ q.T))

    return _URoots(
        u=power(0.5), u_inv=power(-0.5), u_half=power(0.25), u_inv_half=power(-0.25),
        min_u=float(np.sqrt(w[0])),
    )


@dataclass(frozen=True, eq=False)
class KleinGordonSystem:
    """Assembled 2n-dimensional Klein-Gordon blocks for a given shift μ."""
    spec: ModelSpec
    shift: float
    u: np.ndarray
    u_inv: np.ndarray
    u_half: np.ndarray
    u_inv_half: np.ndarray
    hamiltonian: np.ndarray
    gram: np.ndarray
    free_hamiltonian: np.ndarray
    u_block: np.ndarray
    a_matrix: np.ndarray
    contraction: float
    min_u: float
    j: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def shifted_gram(self) -> np.ndarray:
        """G − μJ."""
        return _symmetrize(self.gram - self.shift * self.j)

    @property
    def hamiltonian_norm(self) -> float:
        return float(linalg.norm(self.hamiltonian, 2))


def assemble_free(spec: ModelSpec):
    """Free Hamiltonian H₀ = [[0, U], [U, 0]] and U_block = diag(U, U) = J H₀ = |H₀|."""
    roots = _u_roots(spec)
    return _free_blocks(roots.u)


def _free_blocks(u):
    zero = np.zeros_like(u)
    free_hamiltonian = np.block([[zero, u], [u, zero]])
    u_block = np.block([[u, zero], [zero, u]])
    return _frozen(free_hamiltonian), _frozen(u_block)


def operator_a(spec: ModelSpec, shift: float) -> np.ndarray:
    """A = (V − μI) U⁻¹."""
    roots = _u_roots(spec)
    return _shifted_a(spec, roots.u_inv, shift)


def _shifted_a(spec, u_inv, shift):
    v = spec.v.entries
    return (v - shift * np.eye(spec.n)) @ u_inv


def contraction_bound(spec: ModelSpec, shift: float) -> float:
    return float(linalg.norm(operator_a(spec, shift), 2))


def assemble_system(spec: ModelSpec, shift: float = 0.0) -> KleinGordonSystem:
    """
    Assemble H, G = JH, H₀ and A for the given shift.

    The contraction b = ‖(V − μ)U⁻¹‖ is recorded but not required to be
    below one; callers decide what to do with b ≥ 1.
    """
    if not isinstance(spec, ModelSpec):
        raise ValidationError("assemble_system expects a ModelSpec")
    shift = float(shift)
    roots = _u_roots(spec)
    n = spec.n
    v = spec.v.entries

    upper_left = roots.u_half @ v @ roots.u_inv_half
    lower_right = roots.u_inv_half @ v @ roots.u_half
    hamiltonian = np.block([[upper_left, roots.u], [roots.u, lower_right]])
    gram = _symmetrize(np.block([[roots.u, lower_right], [upper_left, roots.u]]))

    free_hamiltonian, u_block = _free_blocks(roots.u)
    a_matrix = _shifted_a(spec, roots.u_inv, shift)
    contraction = float(linalg.norm(a_matrix, 2))

    return KleinGordonSystem(
        spec=spec,
        shift=shift,
        u=roots.u,
        u_inv=roots.u_inv,
        u_half=roots.u_half,
        u_inv_half=roots.u_inv_half,
        hamiltonian=_frozen(hamiltonian),
        gram=_frozen(gram),
        free_hamiltonian=free_hamiltonian,
        u_block=u_block,
        a_matrix=_frozen(a_matrix),
        contraction=contraction,
        min_u=roots.min_u,
        j=_frozen(swap_symmetry(n)),
    )


def block_a(a_matrix) -> np.ndarray:
    """𝐀 = [[I, Aᵀ], [A, I]]."""
    a = np.asarray(a_matrix, dtype=float)
    eye = np.eye(a.shape[0])
    return np.block([[eye, a.T], [a, eye]])


def gram_factorization(system: KleinGordonSystem):
    """Return (U_block^{1/2}, 𝐀) with G − μJ = U_block^{1/2} 𝐀 U_block^{1/2}."""
    zero = np.zeros_like(system.u_half)
    u_block_half = np.block([[system.u_half, zero], [zero, system.u_half]])
    return u_block_half, block_a(system.a_matrix)


def shift_bracket(spec: ModelSpec):
    v_eigs = linalg.eigvalsh(spec.v.entries)
    u_norm = float(np.sqrt(linalg.eigvalsh(spec.u_squared.entries)[-1]))
    return float(v_eigs[0] - u_norm), float(v_eigs[-1] + u_norm)


def optimize_shift(spec: ModelSpec, xatol: float = SHIFT_XATOL):
    """
    μ* minimizing μ ↦ ‖(V − μ)U⁻¹‖ together with the minimal contraction.

    The objective is convex in μ, so a bounded scalar search on
    [min σ(V) − ‖U‖, max σ(V) + ‖U‖] converges to the minimizer.
    """
    roots = _u_roots(spec)

    def objective(mu):
        return float(linalg.norm(_shifted_a(spec, roots.u_inv, mu), 2))

    lower, upper = shift_bracket(spec)
    result = minimize_scalar(objective, bounds=(lower, upper), method="bounded",
                             options={"xatol": xatol})

    # 닫힌 구간 끝점과 μ = 0 도 비교해서 가장 작은 값을 택한다
    candidates = [(float(result.x), float(result.fun)), (0.0, objective(0.0)),
                  (lower, objective(lower)), (upper, objective(upper))]
    shift, contraction = min(candidates, key=lambda item: item[1])
    logger.info("optimized shift for %s: mu=%.12g, b=%.12g", spec.label or "model", shift, contraction)
    return shift, contraction
