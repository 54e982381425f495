"""
Seeded property checks over random (U², V) of order 2..8 with b < 0.7.
"""
import math

import numpy as np
import pytest
from scipy import linalg

from conftest import PROPERTY_SEEDS, random_delta_v, random_spd, random_spec, scale_to_contraction
from utils.bounds import (gap_bound, perturbation_constants, perturbed_system, rescale_kappa, t_bound,
                          verify_bounds)
from utils.operator import ModelSpec, SymmetricMatrix, assemble_system
from utils.spectral import eigen_spectrum, gram_spectrum, pencil_residual, pencil_scale, sign_operator

STRUCTURED_SEEDS = range(100)


def _checks(result):
    return {check.name: check for check in result.checks}


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_sign_operator_norm_bounds(seed):
    system = assemble_system(random_spec(seed), 0.0)
    norm_j1 = sign_operator(system).norm_j1
    assert 1.0 - 1e-10 <= norm_j1 <= 1.0 / (1.0 - system.contraction) + 1e-10


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_no_eigenvalue_inside_certified_gap(seed):
    system = assemble_system(random_spec(seed), 0.0)
    alpha = gap_bound(system)
    report = eigen_spectrum(system)
    assert report.is_real_spectrum
    assert np.all(np.abs(report.eigenvalues - system.shift) >= alpha * (1.0 - 1e-10))
    assert np.all(report.positive_ordered > system.shift)
    assert np.all(report.negative_ordered < system.shift)


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_exact_kappa_bounds_every_pair(seed):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    delta_v = random_delta_v(seed, spec, system.contraction)
    result = verify_bounds(spec, delta_v, shift=0.0)
    assert result.paired_by_order
    kappa_minus, kappa_plus = result.bundle.kappa_exact
    kappa = max(abs(kappa_minus), abs(kappa_plus))
    assert np.all(result.deviations <= kappa + 1e-10)
    assert _checks(result)["kappa_exact"].holds
    assert result.all_valid_hold


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_rescaled_kappa_never_exceeds_kappa(seed):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    bundle = perturbation_constants(system, random_delta_v(seed, spec, system.contraction))
    kappa_minus, kappa_plus = bundle.kappa_exact
    kappa = max(abs(kappa_minus), abs(kappa_plus))
    _, kappa_prime = rescale_kappa(kappa_minus, kappa_plus)
    assert kappa_prime <= kappa + 1e-14


@pytest.mark.parametrize("kappa", [0.0, 0.1, 0.5, 0.9])
def test_rescaled_kappa_equality_for_symmetric_pair(kappa):
    _, kappa_prime = rescale_kappa(-kappa, kappa)
    assert kappa_prime == pytest.approx(kappa)
    if kappa > 0:
        assert rescale_kappa(-0.5 * kappa, kappa)[1] < kappa
        assert rescale_kappa(-kappa, 0.5 * kappa)[1] < kappa


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_inclusions_exclude_perturbed_spectrum(seed):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    result = verify_bounds(spec, random_delta_v(seed, spec, system.contraction), shift=0.0)
    assert result.inclusion is not None
    assert result.inclusion.predicted is not None
    assert result.inclusion.improved is not None
    assert result.inclusion_holds


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_semidefinite_gram_perturbation_keeps_gap(seed):
    system = assemble_system(random_spec(seed), 0.0)
    rng = np.random.default_rng(20_000 + seed)
    x = rng.normal(size=(2 * system.n, int(rng.integers(1, 2 * system.n + 1))))
    delta_g = 0.1 * x @ x.T / x.shape[1]
    before = eigen_spectrum(system).central_gap
    after = gram_spectrum(system.gram + delta_g, system.shift).central_gap
    assert after.contains_interval(before, tol=1e-10 * system.hamiltonian_norm)


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_similarity_route_matches_dense_solver(seed):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    report = eigen_spectrum(system)
    assert report.path == "similarity"
    dense = linalg.eigvals(system.hamiltonian)
    dense = np.sort(dense.real)
    np.testing.assert_allclose(report.eigenvalues, dense, rtol=0.0, atol=1e-8 * system.hamiltonian_norm)
    for value in report.eigenvalues:
        assert pencil_residual(spec, value) <= 1e-8 * pencil_scale(spec, value)


def _disjoint_pair(seed):
    rng = np.random.default_rng(30_000 + seed)
    n = int(rng.integers(2, 9))
    u_squared = random_spd(rng, n)
    support = rng.permutation(n) < max(1, n // 2)
    v = np.diag(np.where(support, rng.uniform(-1.0, 1.0, n), 0.0))
    delta_v = np.diag(np.where(support, 0.0, rng.uniform(-1.0, 1.0, n)))
    b = rng.uniform(0.0, 0.7)
    v = scale_to_contraction(v, u_squared, b)
    delta_v = scale_to_contraction(delta_v, u_squared, rng.uniform(0.0, 0.9) * math.sqrt(1.0 - b * b))
    return ModelSpec(SymmetricMatrix(u_squared), SymmetricMatrix(v)), delta_v


@pytest.mark.parametrize("seed", STRUCTURED_SEEDS)
def test_disjoint_support_bound_holds(seed):
    spec, delta_v = _disjoint_pair(seed)
    result = verify_bounds(spec, delta_v, shift=0.0)
    bundle = result.bundle
    assert bundle.kappa_disjoint is not None
    assert bundle.kappa_disjoint <= bundle.kappa_general + 1e-15
    assert np.all(result.deviations <= bundle.kappa_disjoint + 1e-10)


@pytest.mark.parametrize("seed", STRUCTURED_SEEDS)
@pytest.mark.parametrize("direction", [-1.0, 1.0])
def test_sign_condition_bound_holds(seed, direction):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    b = system.contraction
    if b < 1e-6:
        pytest.skip("potential too small for a sign condition")
    rng = np.random.default_rng(40_000 + seed)
    s = rng.uniform(0.05, 0.9) * min(1.0, (1.0 - b) / b)
    result = verify_bounds(spec, direction * s * spec.v.entries, shift=0.0)
    check = _checks(result).get("kappa_signed")
    assert check is not None
    assert check.valid and check.holds


@pytest.mark.parametrize("seed", STRUCTURED_SEEDS)
def test_retrieval_of_general_bound(seed):
    rng = np.random.default_rng(50_000 + seed)
    b = rng.uniform(0.0, 0.99)
    c = rng.uniform(0.0, 1.0)
    a = 2.0 * b * c / (1.0 - b * b)
    assert t_bound(a, c / math.sqrt(1.0 - b * b)) >= c / (1.0 - b) - 1e-12


@pytest.mark.parametrize("seed", range(0, 200, 20))
def test_perturbed_system_keeps_contraction_below_one(seed):
    spec = random_spec(seed)
    system = assemble_system(spec, 0.0)
    system_p = perturbed_system(system, random_delta_v(seed, spec, system.contraction))
    assert system_p.contraction < 1.0
