import math

import numpy as np
import pytest
from scipy import linalg

from conftest import PROPERTY_SEEDS, random_spd, random_spec
from models.examples import square_well_model, square_well_shift
from utils.errors import DimensionMismatch, NotPositiveDefinite, ValidationError
from utils.operator import (ModelSpec, SymmetricMatrix, assemble_system, block_a, contraction_bound,
                            gram_factorization, operator_a, optimize_shift, shift_bracket, sqrt_spd, swap_symmetry)


def test_symmetric_matrix_rejects_bad_input():
    with pytest.raises(ValidationError):
        SymmetricMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionMismatch):
        SymmetricMatrix(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        SymmetricMatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_symmetric_matrix_is_read_only():
    m = SymmetricMatrix(np.eye(2))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5.0


def test_model_spec_validation():
    with pytest.raises(DimensionMismatch):
        ModelSpec(SymmetricMatrix(np.eye(2)), SymmetricMatrix(np.eye(3)))
    with pytest.raises(NotPositiveDefinite):
        ModelSpec(SymmetricMatrix(np.diag([1.0, -1.0])), SymmetricMatrix(np.zeros((2, 2))))


def test_swap_symmetry_is_involution():
    j = swap_symmetry(3)
    np.testing.assert_array_equal(j @ j, np.eye(6))
    np.testing.assert_array_equal(j, j.T)


def test_sqrt_spd_squares_back():
    a = np.array([[2.0, -1.0], [-1.0, 2.0]])
    root = sqrt_spd(a).entries
    np.testing.assert_allclose(root @ root, a, atol=1e-14)


@pytest.mark.parametrize("seed, n", [(7, 6), (0, 2), (3, 8)])
def test_sqrt_spd_random_commutes(seed, n):
    m = random_spd(np.random.default_rng(seed), n)
    root = sqrt_spd(m).entries
    assert linalg.norm(root @ root - m, 2) <= 1e-10
    assert linalg.norm(root @ m - m @ root, 2) <= 1e-10 * linalg.norm(m, 2)
    assert np.all(linalg.eigvalsh(root) > 0.0)


@pytest.mark.parametrize("seed", PROPERTY_SEEDS)
def test_contraction_bound_is_convex_in_shift(seed):
    spec = random_spec(seed)
    rng = np.random.default_rng(10_000 + seed)
    for _ in range(5):
        mu_1, mu_2 = rng.uniform(-3.0, 3.0, size=2)
        theta = rng.uniform(0.0, 1.0)
        mixed = contraction_bound(spec, theta * mu_1 + (1.0 - theta) * mu_2)
        chord = theta * contraction_bound(spec, mu_1) + (1.0 - theta) * contraction_bound(spec, mu_2)
        assert mixed <= chord + 1e-12 * (1.0 + chord)


def test_free_system_equals_free_hamiltonian(free_spec):
    system = assemble_system(free_spec)
    np.testing.assert_allclose(system.hamiltonian, system.free_hamiltonian, atol=1e-15)
    np.testing.assert_allclose(system.u_block, system.j @ system.free_hamiltonian, atol=1e-15)
    assert system.contraction == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_gram_is_j_times_hamiltonian(seed):
    system = assemble_system(random_spec(seed), 0.3)
    np.testing.assert_allclose(system.gram, system.gram.T, atol=1e-14)
    np.testing.assert_allclose(system.j @ system.hamiltonian, system.gram, atol=1e-12)


@pytest.mark.parametrize("seed", [4, 5, 6])
def test_shifted_gram_factorization(seed):
    system = assemble_system(random_spec(seed), -0.2)
    u_block_half, a_block = gram_factorization(system)
    np.testing.assert_allclose(u_block_half @ a_block @ u_block_half, system.shifted_gram, atol=1e-12)
    np.testing.assert_allclose(a_block, block_a(system.a_matrix))


def test_operator_a_definition(free_spec):
    a = operator_a(free_spec, 0.5)
    expected = -0.5 * np.diag([1.0, 1.0 / math.sqrt(3.0)])
    np.testing.assert_allclose(a, expected, atol=1e-15)
    assert contraction_bound(free_spec, 0.5) == pytest.approx(0.5)


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0, 1.7, 2.0])
def test_square_well_contraction_at_half_coupling_shift(tau):
    system = assemble_system(square_well_model(tau), square_well_shift(tau))
    assert abs(system.contraction - tau / 2) <= 1e-12


def test_optimize_shift_beats_reference_points():
    spec = random_spec(7)
    shift, contraction = optimize_shift(spec)
    lower, upper = shift_bracket(spec)
    assert lower <= shift <= upper
    assert contraction == pytest.approx(contraction_bound(spec, shift))
    for mu in (0.0, lower, upper, shift + 1e-3, shift - 1e-3):
        assert contraction <= contraction_bound(spec, mu) + 1e-9


def test_optimize_shift_square_well():
    shift, contraction = optimize_shift(square_well_model(1.0))
    assert contraction <= 0.5 + 1e-9


def test_system_arrays_are_frozen():
    system = assemble_system(square_well_model(1.0))
    with pytest.raises(ValueError):
        system.hamiltonian[0, 0] = 1.0
    assert linalg.norm(system.hamiltonian, 2) == pytest.approx(system.hamiltonian_norm)
