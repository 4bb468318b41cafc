from contextlib import contextmanager

import numpy as np
import pytest

from tomodesign.basis import (
    BlochState,
    OperatorBasis,
    as_mask,
    bloch_to_density,
    build_basis,
    density_to_bloch,
    diagonal_mask,
    from_n_scale,
    from_pauli_scale,
    get_basis,
    marginal_mask,
    pauli_product_basis,
    positivity_bound_check,
    state_from_density,
    state_from_json,
    state_to_json,
    to_n_scale,
    to_pauli_scale,
)
from tomodesign.utils._random import haar_unitary, random_density_matrix
from tomodesign.utils.exceptions import (
    DesignParseError,
    FileExtensionError,
    InvalidBasisError,
    InvalidDimensionError,
    InvalidStateError,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@contextmanager
def does_not_raise():
    yield


class TestOperatorBasis:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_orthonormal(self, n):
        basis = build_basis(n)
        assert basis.n_params == n**2 - 1
        assert max(basis.residuals()) < 1e-12

    def test_qubit_is_pauli(self):
        basis = build_basis(2)
        for element, pauli in zip(basis, (PAULI_X, PAULI_Y, PAULI_Z)):
            assert np.allclose(element, pauli / np.sqrt(2), atol=1e-14)

    def test_ordering(self):
        basis = build_basis(3)
        assert basis.labels == ("S01", "S02", "S12", "A01", "A02", "A12", "D1", "D2")

    @pytest.mark.parametrize(
        ("n", "expected"),
        [
            (2, does_not_raise()),
            (1, pytest.raises(InvalidDimensionError)),
            (0, pytest.raises(InvalidDimensionError)),
            (2.5, pytest.raises(InvalidDimensionError)),
            (True, pytest.raises(InvalidDimensionError)),
        ],
    )
    def test_build_basis_raises(self, n, expected):
        with expected:
            build_basis(n)

    def test_invalid_elements_raise(self):
        with pytest.raises(InvalidBasisError):
            OperatorBasis(np.array([PAULI_X, PAULI_Y, PAULI_Z]), order="custom")

    def test_pauli_product_order(self):
        basis = pauli_product_basis(2)
        assert basis.labels[:6] == ("IX", "IY", "IZ", "XI", "YI", "ZI")
        assert basis.n_params == 15
        assert max(basis.residuals()) < 1e-12

    @pytest.mark.parametrize(
        ("dim", "order", "expected"),
        [
            (4, "pauli-product", does_not_raise()),
            (3, "pauli-product", pytest.raises(InvalidDimensionError)),
            (3, "gell-mann", does_not_raise()),
            (3, "unknown", pytest.raises(InvalidBasisError)),
        ],
    )
    def test_get_basis(self, dim, order, expected):
        with expected:
            assert get_basis(dim, order).dim == dim

    def test_masks(self):
        assert np.flatnonzero(diagonal_mask(build_basis(3))).tolist() == [6, 7]
        assert marginal_mask(pauli_product_basis(2)).sum() == 6
        with pytest.raises(InvalidBasisError):
            marginal_mask(build_basis(4))

    @pytest.mark.parametrize(
        ("mask", "expected", "raises"),
        [
            (None, [False, False, False], does_not_raise()),
            ([2], [False, False, True], does_not_raise()),
            (np.array([True, False, True]), [True, False, True], does_not_raise()),
            ([3], None, pytest.raises(InvalidDimensionError)),
            (np.array([True, False]), None, pytest.raises(InvalidDimensionError)),
        ],
    )
    def test_as_mask(self, mask, expected, raises):
        with raises:
            assert as_mask(mask, 3).tolist() == expected


class TestBlochConversion:
    def test_maximally_mixed(self):
        assert np.allclose(density_to_bloch(np.eye(3) / 3).theta, 0, atol=1e-14)
        assert np.allclose(bloch_to_density(BlochState(np.zeros(8))), np.eye(3) / 3)

    def test_qubit_ground_state(self):
        state = density_to_bloch(np.diag([1.0, 0.0]))
        assert np.allclose(state.theta, [0, 0, 1 / np.sqrt(2)], atol=1e-14)
        assert np.allclose(bloch_to_density(state), np.diag([1.0, 0.0]), atol=1e-14)

    def test_pauli_scale(self):
        pauli_vector = np.array([0.3, -0.2, 0.5])
        rho = (np.eye(2) + pauli_vector[0] * PAULI_X + pauli_vector[1] * PAULI_Y + pauli_vector[2] * PAULI_Z) / 2
        theta = density_to_bloch(rho).theta
        assert np.allclose(theta, pauli_vector / np.sqrt(2), atol=1e-14)
        assert np.allclose(to_pauli_scale(theta), pauli_vector)
        assert np.allclose(from_pauli_scale(pauli_vector), theta)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_round_trip_random_states(self, n):
        rng = np.random.default_rng(n)
        for _ in range(20):
            rho = random_density_matrix(n, rng)
            state = density_to_bloch(rho)
            assert np.allclose(bloch_to_density(state), rho, atol=1e-12)
            assert state.norm_sq <= (n - 1) / n + 1e-12

    def test_pure_qubit_has_projector_spectrum(self):
        state = BlochState([0.5, 0.0, 0.5])
        assert np.allclose(np.linalg.eigvalsh(bloch_to_density(state)), [0, 1], atol=1e-14)

    @pytest.mark.parametrize(
        ("rho", "expected"),
        [
            (np.diag([0.5, 0.5]), does_not_raise()),
            (np.diag([0.6, 0.6]), pytest.raises(InvalidStateError)),
            (np.array([[0.5, 0.1], [0.2, 0.5]]), pytest.raises(InvalidStateError)),
            (np.eye(3) / 3, does_not_raise()),
        ],
    )
    def test_invalid_density(self, rho, expected):
        with expected:
            density_to_bloch(rho)

    def test_invalid_length(self):
        with pytest.raises(InvalidDimensionError):
            BlochState(np.zeros(4))

    def test_known_partition(self):
        state = BlochState([0.1, 0.2, 0.3], known_mask=[2])
        assert state.known_theta.tolist() == [0.3]
        assert state.unknown_theta.tolist() == [0.1, 0.2]
        assert state.with_mask(None).known_mask.sum() == 0

    def test_json(self, tmp_path):
        state = BlochState([0.1, 0.2, 0.3], known_mask=[2])
        path = tmp_path.joinpath("state.json")
        state_to_json(state, path)
        loaded = state_from_json(path)
        assert np.allclose(loaded.theta, state.theta)
        assert loaded.known_mask.tolist() == [False, False, True]
        with pytest.raises(FileExtensionError):
            state_to_json(state, tmp_path.joinpath("state.txt"))

    def test_json_missing_theta(self, tmp_path):
        path = tmp_path.joinpath("state.json")
        path.write_text('{"dim": 2}', encoding="utf-8")
        with pytest.raises(DesignParseError):
            state_from_json(path)


class TestPositivityBound:
    def test_equality_case(self):
        report = positivity_bound_check([0, 0, np.sqrt(2)], build_basis(2))
        assert report.is_positive
        assert report.norm_sq == pytest.approx(2.0)
        assert report.bound == 2.0
        assert report.is_rank_one_multiple

    def test_zero(self):
        report = positivity_bound_check(np.zeros(8), build_basis(3))
        assert report.is_positive
        assert report.norm_sq == 0
        assert not report.is_rank_one_multiple

    def test_outside(self):
        report = positivity_bound_check([0, 0, 2.0], build_basis(2))
        assert not report.is_positive

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_bound_on_random_states(self, n):
        basis = build_basis(n)
        rng = np.random.default_rng(10 + n)
        for _ in range(200):
            g = to_n_scale(density_to_bloch(random_density_matrix(n, rng), basis).theta, n)
            report = positivity_bound_check(g, basis)
            assert report.is_positive
            assert report.norm_sq <= n**2 - n + 1e-9

    @pytest.mark.parametrize("n", [2, 3])
    def test_pure_states_reach_bound(self, n):
        basis = build_basis(n)
        rng = np.random.default_rng(n)
        rho = random_density_matrix(n, rng, rank=1)
        g = to_n_scale(density_to_bloch(rho, basis).theta, n)
        report = positivity_bound_check(g, basis)
        assert report.norm_sq == pytest.approx(n**2 - n)
        assert report.is_rank_one_multiple

    def test_wrong_length(self):
        with pytest.raises(InvalidDimensionError):
            positivity_bound_check([0, 0], build_basis(2))


class TestHelpers:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_haar_unitary(self, n):
        u = haar_unitary(n, np.random.default_rng(n))
        assert np.allclose(u @ u.conj().T, np.eye(n), atol=1e-12)

    def test_n_scale(self):
        theta = np.array([0.1, -0.2, 0.05])
        assert np.allclose(to_n_scale(theta, 2), 2 * theta)
        assert np.allclose(from_n_scale(to_n_scale(theta, 2), 2), theta)

    def test_state_from_density(self):
        rho = np.diag([0.5, 0.25, 0.25, 0.0])
        state = state_from_density(rho, order="pauli-product", known_mask=[0])
        assert state.basis_order == "pauli-product"
        assert state.known_mask.tolist()[:2] == [True, False]
        assert np.allclose(bloch_to_density(state), rho, atol=1e-14)
