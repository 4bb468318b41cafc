from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from tomodesign.basis import BlochState, build_basis, diagonal_mask, marginal_mask, pauli_product_basis
from tomodesign.example_data import get_example_design, get_qutrit7, get_tetrahedron, get_trine, get_two_qubit_family
from tomodesign.measurements import (
    Povm,
    VonNeumannFamily,
    check_mub,
    check_quasi_orthogonal,
    check_sic,
    computational_basis,
    design_from_dict,
    design_to_json,
    eigenbasis,
    family_from_json,
    fourier_basis,
    known_direction_residuals,
    load_design,
    pairwise_quasi_orthogonality,
    povm_from_json,
    probabilities,
    projective_povm,
    qutrit_conditional_sic,
    tetrahedron_povm,
    trine_povm,
    two_qubit_optimal_family,
    validate_family,
    validate_povm,
)
from tomodesign.utils.exceptions import (
    DegenerateElementError,
    DesignParseError,
    FileExtensionError,
    InvalidBasisError,
    InvalidDimensionError,
)

TEST_DATA_PATH = Path(__file__).parent.joinpath("test_data")

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@contextmanager
def does_not_raise():
    yield


class TestValidatePovm:
    @pytest.mark.parametrize(
        ("povm", "invariants"),
        [
            (Povm([np.eye(2)]), []),
            (tetrahedron_povm(), []),
            (trine_povm(), []),
            (qutrit_conditional_sic(), []),
            (Povm([1.5 * np.diag([1.0, 0.0]), np.eye(2) - 1.5 * np.diag([1.0, 0.0])]), ["positivity"]),
            (Povm([np.diag([0.5, 0.0]), np.diag([0.0, 0.4])]), ["completeness"]),
            (Povm([np.array([[0.5, 0.1], [0.0, 0.5]]), np.array([[0.5, -0.1], [0.0, 0.5]])]), ["hermiticity"] * 2),
        ],
    )
    def test_validate_povm(self, povm, invariants):
        assert [v.invariant for v in validate_povm(povm)] == invariants

    def test_violation_magnitude(self):
        povm = Povm([1.5 * np.diag([1.0, 0.0]), np.eye(2) - 1.5 * np.diag([1.0, 0.0])])
        (violation,) = validate_povm(povm)
        assert violation.element == 1
        assert violation.magnitude == pytest.approx(0.5)

    def test_validate_family(self):
        assert validate_family(two_qubit_optimal_family()) == []
        violations = validate_family(VonNeumannFamily([np.diag([1.2, 0.0]), np.diag([0.5, -0.1])]))
        assert [(v.invariant, v.element) for v in violations] == [("contraction", 0), ("positivity", 1)]

    @pytest.mark.parametrize(
        ("matrices", "expected"),
        [
            ([np.eye(2)], does_not_raise()),
            ([], pytest.raises(InvalidDimensionError)),
            ([np.eye(1)], pytest.raises(InvalidDimensionError)),
            ([np.ones((2, 3))], pytest.raises(InvalidDimensionError)),
        ],
    )
    def test_shapes(self, matrices, expected):
        with expected:
            Povm(matrices)


class TestProbabilities:
    def test_maximally_mixed(self):
        povm = tetrahedron_povm()
        p = probabilities(BlochState(np.zeros(3)), povm)
        assert np.allclose(p, np.trace(povm.elements, axis1=1, axis2=2).real / 2)

    def test_eigenstate(self):
        ground = BlochState([0, 0, 1 / np.sqrt(2)])
        p = probabilities(ground, Povm([(np.eye(2) + PAULI_Z) / 2, (np.eye(2) - PAULI_Z) / 2]))
        assert np.allclose(p, [1, 0], atol=1e-15)

    def test_tetrahedron_at_ground_state(self):
        p = probabilities(BlochState([0, 0, 1 / np.sqrt(2)]), tetrahedron_povm())
        assert np.allclose(p, [1 / 2, 1 / 6, 1 / 6, 1 / 6])
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            probabilities(BlochState(np.zeros(8)), tetrahedron_povm())


class TestComplementarity:
    def test_qubit_mub(self):
        report = check_mub(computational_basis(2), eigenbasis(PAULI_X))
        assert report.is_complementary
        assert report.max_deviation < 1e-12

    def test_same_basis(self):
        report = check_mub(computational_basis(2), computational_basis(2))
        assert not report.is_complementary
        assert report.max_deviation == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_fourier(self, n):
        assert check_mub(computational_basis(n), fourier_basis(n)).is_complementary

    def test_not_orthonormal(self):
        with pytest.raises(InvalidBasisError):
            check_mub(np.ones((2, 2)), computational_basis(2))

    def test_quasi_orthogonal(self):
        report = check_quasi_orthogonal(PAULI_X / np.sqrt(2), PAULI_Y / np.sqrt(2))
        assert report.holds
        assert report.residual == pytest.approx(0.0, abs=1e-15)
        report = check_quasi_orthogonal(PAULI_X / np.sqrt(2), PAULI_X / np.sqrt(2))
        assert not report.holds
        assert report.residual == pytest.approx(1.0)

    def test_quasi_orthogonal_elements(self):
        # tetrahedron element along +z against an in-plane trine element
        report = check_quasi_orthogonal(tetrahedron_povm()[0], trine_povm()[0])
        assert report.holds
        report = check_quasi_orthogonal(tetrahedron_povm()[1], trine_povm()[0])
        assert not report.holds

    def test_projective_povm(self):
        povm = projective_povm(fourier_basis(3))
        assert validate_povm(povm) == []
        assert povm.k == 3


class TestSic:
    @pytest.mark.parametrize(
        ("povm", "mask", "k", "lam", "mu"),
        [
            (tetrahedron_povm(), None, 4, 2.0, 1 / 3),
            (trine_povm(), [2], 3, 1.5, 0.25),
            (qutrit_conditional_sic(), diagonal_mask(build_basis(3)), 7, 7 / 3, 2 / 9),
        ],
    )
    def test_constants(self, povm, mask, k, lam, mu):
        report = check_sic(povm, known_mask=mask)
        assert report.k == k
        assert report.lambda_ == pytest.approx(lam, abs=1e-10)
        assert report.mu == pytest.approx(mu, abs=1e-10)
        assert report.all_rank_one
        assert report.is_symmetric(1e-10)
        assert report.quasi_orthogonal_to_known

    def test_trine_not_orthogonal_to_x(self):
        assert not check_sic(trine_povm(), known_mask=[0]).quasi_orthogonal_to_known

    def test_qutrit_elements_are_conjugate(self):
        povm = qutrit_conditional_sic()
        assert np.allclose(povm.elements[4:], np.conj(povm.elements[1:4]))

    def test_degenerate_element(self):
        with pytest.raises(DegenerateElementError):
            check_sic(Povm([np.eye(2), np.zeros((2, 2))]))

    def test_serialization_keys(self):
        assert set(check_sic(tetrahedron_povm()).to_dict()) >= {"k", "lambda", "mu", "all_rank_one"}


class TestTwoQubitFamily:
    def test_shape(self):
        family = two_qubit_optimal_family()
        assert family.k == 9
        assert family.dim == 4

    def test_spectrum(self):
        for effect in two_qubit_optimal_family():
            assert np.allclose(np.linalg.eigvalsh(effect), [0, 0, 1, 1], atol=1e-12)

    def test_pairwise_quasi_orthogonal(self):
        assert pairwise_quasi_orthogonality(two_qubit_optimal_family().effects).max() < 1e-12

    def test_orthogonal_to_marginals(self):
        basis = pauli_product_basis(2)
        residuals = known_direction_residuals(two_qubit_optimal_family().effects, marginal_mask(basis), basis)
        assert residuals.shape == (9, 6)
        assert residuals.max() < 1e-12


class TestDesignIo:
    @pytest.mark.parametrize(
        ("name", "expected"),
        [
            ("tetrahedron", tetrahedron_povm()),
            ("trine", trine_povm()),
            ("qutrit7", qutrit_conditional_sic()),
            ("two_qubit_family", two_qubit_optimal_family()),
        ],
    )
    def test_example_designs(self, name, expected):
        design = get_example_design(name)
        assert type(design) is type(expected)
        assert np.allclose(np.array(list(design)), np.array(list(expected)), atol=1e-15)

    def test_example_getters(self):
        assert get_tetrahedron().k == 4
        assert get_trine().k == 3
        assert get_qutrit7().dim == 3
        assert get_two_qubit_family().k == 9
        with pytest.raises(ValueError):
            get_example_design("octahedron")

    def test_write_and_reload(self, tmp_path):
        path = tmp_path.joinpath("design.json")
        design_to_json(two_qubit_optimal_family(), path)
        assert np.allclose(family_from_json(path).effects, two_qubit_optimal_family().effects)
        with pytest.raises(DesignParseError):
            povm_from_json(path)

    def test_unwraps_reports(self):
        design = design_from_dict({"config": {}, "design": tetrahedron_povm().to_dict()})
        assert isinstance(design, Povm)

    @pytest.mark.parametrize(
        ("file_name", "expected"),
        [
            ("non_summing.json", does_not_raise()),
            ("dim_mismatch.json", pytest.raises(DesignParseError)),
            ("malformed.json", pytest.raises(DesignParseError)),
        ],
    )
    def test_test_data(self, file_name, expected):
        with expected:
            design = load_design(TEST_DATA_PATH.joinpath(file_name))
            assert [v.invariant for v in validate_povm(design)] == ["completeness"]

    def test_wrong_extension(self, tmp_path):
        with pytest.raises(FileExtensionError):
            load_design(tmp_path.joinpath("design.csv"))

    @pytest.mark.parametrize(
        "data",
        [
            {"elements": [[[1, 0], [0, 1]]]},
            {"dim": 2},
            {"dim": 2, "elements": [[[1, 0], [0, "a"]]]},
            {"dim": 2, "elements": [[[1, 0, 0], [0, 1]]]},
            {"dim": 3, "exponents": [[[0, 0], [0, 0]]]},
            {"dim": 2, "effects": []},
        ],
    )
    def test_malformed_documents(self, data):
        with pytest.raises(DesignParseError):
            design_from_dict(data)
