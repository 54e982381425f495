import numpy as np
import pytest
from scipy import linalg

from utils.config import SettingManager, Settings
from utils.operator import ModelSpec, SymmetricMatrix

PROPERTY_SEEDS = range(200)


def random_spd(rng, n):
    x = rng.normal(size=(n, n))
    return x @ x.T / n + rng.uniform(0.5, 2.0) * np.eye(n)


def random_symmetric(rng, n):
    x = rng.uniform(-1.0, 1.0, size=(n, n))
    return 0.5 * (x + x.T)


def u_inverse(u_squared):
    w, q = linalg.eigh(u_squared)
    return (q / np.sqrt(w)) @ q.T


def scale_to_contraction(v, u_squared, target):
    """Rescale V so that ‖V U⁻¹‖ = target at shift 0."""
    norm = linalg.norm(v @ u_inverse(u_squared), 2)
    return v * (target / norm) if norm > 0 else v


def random_spec(seed, max_order=8, max_contraction=0.7):
    """Seeded (U², V) of order 2..max_order with b = ‖V U⁻¹‖ < max_contraction at μ = 0."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_order + 1))
    u_squared = random_spd(rng, n)
    target = rng.uniform(0.0, max_contraction)
    v = scale_to_contraction(random_symmetric(rng, n), u_squared, target)
    return ModelSpec(SymmetricMatrix(u_squared), SymmetricMatrix(v), label=f"random(seed={seed})")


def random_delta_v(seed, spec, contraction, fraction=0.9):
    """Seeded δV with c = ‖δV U⁻¹‖ below fraction·(1 − b)."""
    rng = np.random.default_rng(10_000 + seed)
    delta = random_symmetric(rng, spec.n)
    c = rng.uniform(0.0, fraction) * (1.0 - contraction)
    return scale_to_contraction(delta, spec.u_squared.entries, c)


@pytest.fixture
def settings():
    return Settings(workers=2)


@pytest.fixture
def fresh_settings_manager():
    SettingManager.reset()
    yield SettingManager
    SettingManager.reset()


@pytest.fixture
def free_spec():
    return ModelSpec(SymmetricMatrix(np.diag([1.0, 3.0])), SymmetricMatrix(np.zeros((2, 2))), label="free")
