import math

import numpy as np
import pytest
from scipy import linalg

from conftest import random_spec
from models.examples import square_well_model, square_well_shift
from utils.errors import EmptySpectrum, NonRealSpectrum, NotPositiveDefinite, ZeroInSpectrum
from utils.operator import ModelSpec, SymmetricMatrix, assemble_system
from utils.spectral import (SignType, central_gap, defect_check, eigen_spectrum, gram_spectrum, pencil_residual,
                            relative_distance, sign_operator)

SQRT3 = math.sqrt(3.0)


def test_free_case_eigenvalues_and_sign_types(free_spec):
    report = eigen_spectrum(assemble_system(free_spec))
    np.testing.assert_allclose(report.eigenvalues, [-SQRT3, -1.0, 1.0, SQRT3], atol=1e-12)
    for value, sign in zip(report.eigenvalues, report.sign_types):
        assert sign is (SignType.POSITIVE if value > 0 else SignType.NEGATIVE)
    assert report.is_real_spectrum
    assert not report.defective
    assert report.path == "similarity"


def test_square_well_tau_zero():
    report = eigen_spectrum(assemble_system(square_well_model(0.0)))
    np.testing.assert_allclose(report.eigenvalues, [-SQRT3, -1.0, 1.0, SQRT3], atol=1e-12)
    np.testing.assert_allclose(report.positive_ordered, [1.0, SQRT3], atol=1e-12)
    np.testing.assert_allclose(report.negative_ordered, [-1.0, -SQRT3], atol=1e-12)


def test_square_well_tau_two_is_defective():
    system = assemble_system(square_well_model(2.0), square_well_shift(2.0))
    report = eigen_spectrum(system)
    assert report.is_real_spectrum
    assert report.defective
    assert report.path == "general"
    assert np.sum(np.abs(report.eigenvalues + 1.0) < 1e-9) == 2

    witness = defect_check(system, report)
    assert witness.defective
    assert witness.eigenvalue == pytest.approx(-1.0, abs=1e-9)
    assert witness.algebraic_multiplicity == 2
    assert witness.geometric_multiplicity == 1
    x = witness.vector
    assert abs(np.vdot(x, system.j @ x)) / np.vdot(x, x).real < 1e-6


def test_square_well_tau_one_is_not_defective():
    system = assemble_system(square_well_model(1.0), square_well_shift(1.0))
    report = eigen_spectrum(system)
    assert not report.defective
    assert not defect_check(system, report).defective
    for value in report.eigenvalues:
        assert pencil_residual(system.spec, value) < 1e-8


def test_square_well_beyond_two_has_complex_pair():
    report = eigen_spectrum(assemble_system(square_well_model(2.2)))
    assert not report.is_real_spectrum
    assert report.central_gap is None
    assert np.count_nonzero(report.eigenvalues_imag) == 2
    with pytest.raises(NonRealSpectrum):
        central_gap(report, 0.0)


def test_free_case_sign_operator_is_j(free_spec):
    system = assemble_system(free_spec)
    j1 = sign_operator(system)
    np.testing.assert_allclose(j1.j1, system.j, atol=1e-12)
    assert j1.norm_j1 == pytest.approx(1.0)


def test_sign_operator_square_well():
    system = assemble_system(square_well_model(1.0), -0.5)
    j1 = sign_operator(system)
    assert 1.0 - 1e-12 <= j1.norm_j1 <= 2.0
    np.testing.assert_allclose(j1.j1 @ j1.j1, np.eye(4), atol=1e-8)


def test_sign_operator_defines_scalar_product():
    system = assemble_system(random_spec(11), 0.0)
    j1 = sign_operator(system)
    product = system.j @ j1.j1
    np.testing.assert_allclose(product, product.T, atol=1e-9)
    assert linalg.eigvalsh(0.5 * (product + product.T))[0] >= 1.0 / j1.norm_j1 - 1e-9


def test_sign_operator_requires_contraction():
    with pytest.raises(NotPositiveDefinite):
        sign_operator(assemble_system(square_well_model(2.2)))


def test_central_gap_free_case(free_spec):
    report = eigen_spectrum(assemble_system(free_spec))
    gap = central_gap(report, 0.0)
    assert gap.as_tuple() == pytest.approx((-1.0, 1.0))


def test_central_gap_square_well_width():
    report = eigen_spectrum(assemble_system(square_well_model(1.0), -0.5))
    gap = report.central_gap
    assert gap.lower < -0.5 < gap.upper
    assert gap.width >= 2 * 0.5 - 1e-12


def test_central_gap_single_sided_and_empty():
    spec = ModelSpec(SymmetricMatrix(np.eye(1)), SymmetricMatrix(np.zeros((1, 1))))
    report = eigen_spectrum(assemble_system(spec))
    assert central_gap(report, 0.0).as_tuple() == pytest.approx((-1.0, 1.0))
    assert central_gap(report, 2.0).as_tuple() == (1.0, math.inf)
    assert central_gap(report, 1.0).is_empty


def test_relative_distance():
    assert relative_distance(0.0, [1.0, -2.0, 5.0]) == 1.0
    assert relative_distance(0.5, [1.0]) == pytest.approx(0.5)
    assert relative_distance(1.1, [1.0, -2.0]) == pytest.approx(0.1)
    with pytest.raises(EmptySpectrum):
        relative_distance(1.0, [])
    with pytest.raises(ZeroInSpectrum):
        relative_distance(1.0, [0.0, 1.0])


def test_pencil_residual(free_spec):
    assert pencil_residual(square_well_model(2.0), -1.0) < 1e-12
    assert pencil_residual(free_spec, 1.0) < 1e-12
    assert pencil_residual(free_spec, 0.5) > 0.1


def test_gram_spectrum_matches_system_route():
    system = assemble_system(random_spec(3), 0.1)
    direct = eigen_spectrum(system)
    via_gram = gram_spectrum(system.gram, 0.1)
    np.testing.assert_allclose(via_gram.eigenvalues, direct.eigenvalues, atol=1e-10)


def test_residuals_are_small():
    report = eigen_spectrum(assemble_system(random_spec(21), 0.0))
    assert report.residual_max <= 1e-8
