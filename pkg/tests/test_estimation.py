from contextlib import contextmanager

import numpy as np
import pytest

from tomodesign.basis import BlochState, build_basis, density_to_bloch, marginal_mask, pauli_product_basis
from tomodesign.estimation import (
    DesignMatrices,
    as_design,
    bernoulli_w,
    build_design,
    build_design_vn,
    covariance_w,
    error_matrix,
    estimate,
    full_theta,
    propagate,
    qubit_variance,
)
from tomodesign.measurements import (
    Povm,
    VonNeumannFamily,
    probabilities,
    qutrit_conditional_sic,
    tetrahedron_povm,
    trine_povm,
    two_qubit_optimal_family,
)
from tomodesign.optimization import OptimizationProblem, random_feasible_designs
from tomodesign.priors import make_prior
from tomodesign.utils._random import random_density_matrix
from tomodesign.utils.exceptions import (
    InvalidBasisError,
    InvalidDimensionError,
    InvalidProbabilityError,
    InvalidStateError,
    NonEstimatingDirectionError,
    OvercompleteDesignError,
    SingularDesignError,
    UnderdeterminedDesignError,
    ValidationError,
)

GROUND_STATE_EFFECT = np.diag([1.0, 0.0]).astype(complex)


@contextmanager
def does_not_raise():
    yield


def diagonal_povm() -> Povm:
    return Povm([np.diag([0.5, 0.0]), np.diag([0.0, 0.5]), np.diag([0.25, 0.25]), np.diag([0.25, 0.25])])


class TestBuildDesign:
    def test_tetrahedron(self):
        design = build_design(tetrahedron_povm())
        assert design.d == 3
        assert design.T.shape == (3, 3)
        assert abs(design.det_t) > 1e-3
        assert np.allclose(design.offsets, 0.25)

    def test_trine_with_known_z(self):
        design = build_design(trine_povm(), known_mask=[2])
        assert design.d == 2
        assert abs(design.det_t) > 1e-3

    @pytest.mark.parametrize(
        ("povm", "mask", "expected"),
        [
            (tetrahedron_povm(), None, does_not_raise()),
            (diagonal_povm(), None, pytest.raises(SingularDesignError)),
            (trine_povm(), None, pytest.raises(UnderdeterminedDesignError)),
            (tetrahedron_povm(), [0], pytest.raises(OvercompleteDesignError)),
            (qutrit_conditional_sic(), None, pytest.raises(UnderdeterminedDesignError)),
            (tetrahedron_povm(), [0, 1, 2], pytest.raises(ValidationError)),
        ],
    )
    def test_raises(self, povm, mask, expected):
        with expected:
            build_design(povm, known_mask=mask)

    def test_known_values_shift_offsets(self):
        design = build_design(trine_povm(), known_mask=[2], known_values=[0.3])
        reference = build_design(trine_povm(), known_mask=[2])
        shift = design.full_rows[:, 2] * 0.3
        assert np.allclose(design.offsets, reference.offsets + shift)
        assert np.array_equal(design.T, reference.T)
        with pytest.raises(InvalidDimensionError):
            build_design(trine_povm(), known_mask=[2], known_values=[0.3, 0.1])

    @pytest.mark.parametrize("n", [2, 3])
    def test_affine_consistency(self, n):
        rng = np.random.default_rng(n)
        problem = OptimizationProblem(dim=n, prior=make_prior("haar_orbit", spectrum=[1.0] + [0.0] * (n - 1)))
        for povm in random_feasible_designs(problem, 20, seed=n):
            design = build_design(povm)
            state = density_to_bloch(random_density_matrix(n, rng))
            expected = probabilities(state, povm)[: design.d]
            assert np.allclose(design.probabilities(state.theta), expected, atol=1e-12)
            assert np.allclose(design.full_probabilities(state.theta), expected, atol=1e-12)


class TestBuildDesignVn:
    def test_two_qubit_family(self):
        basis = pauli_product_basis(2)
        design = build_design_vn(two_qubit_optimal_family(), known_mask=marginal_mask(basis), basis=basis)
        assert design.d == 9
        # every effect sees exactly one correlation direction with unit weight
        assert np.allclose(np.abs(design.T) @ np.ones(9), 1)
        assert np.allclose(design.T @ design.T.T, np.eye(9), atol=1e-12)
        assert abs(design.det_t) == pytest.approx(1.0)
        assert np.allclose(design.offsets, 0.5)

    def test_single_qubit_effect(self):
        design = build_design_vn(VonNeumannFamily([GROUND_STATE_EFFECT]), known_mask=[0, 1])
        assert design.d == 1
        assert design.T[0, 0] == pytest.approx(1 / np.sqrt(2))

    @pytest.mark.parametrize(
        ("effects", "expected"),
        [
            ([GROUND_STATE_EFFECT], does_not_raise()),
            ([np.eye(2) / 2], pytest.raises(SingularDesignError)),
            ([GROUND_STATE_EFFECT, GROUND_STATE_EFFECT], pytest.raises(OvercompleteDesignError)),
        ],
    )
    def test_raises(self, effects, expected):
        with expected:
            build_design_vn(VonNeumannFamily(effects), known_mask=[0, 1])

    def test_underdetermined(self):
        with pytest.raises(UnderdeterminedDesignError):
            build_design_vn(VonNeumannFamily([GROUND_STATE_EFFECT]))


class TestEstimate:
    def test_noiseless_inversion(self):
        design = build_design(tetrahedron_povm())
        theta = np.array([0.1, -0.2, 0.3])
        result = estimate(design, design.probabilities(theta))
        assert np.allclose(result.theta, theta, atol=1e-12)
        assert result.is_physical

    def test_symmetric_frequencies(self):
        result = estimate(build_design(tetrahedron_povm()), [0.25, 0.25, 0.25])
        assert np.allclose(result.theta, 0, atol=1e-14)

    @pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 1.0])
    def test_single_effect(self, nu):
        design = build_design_vn(VonNeumannFamily([GROUND_STATE_EFFECT]), known_mask=[0, 1])
        result = estimate(design, [nu])
        # in Pauli-normalized units the estimator is 2ν - 1
        assert np.sqrt(2) * result.theta[0] == pytest.approx(2 * nu - 1)

    def test_known_values_are_filled_in(self):
        design = build_design(trine_povm(), known_mask=[2], known_values=[0.2])
        result = estimate(design, design.probabilities([0.1, 0.1]))
        assert np.allclose(result.state.theta, [0.1, 0.1, 0.2])
        assert np.allclose(full_theta(design, np.array([[0.1, 0.1]])), [[0.1, 0.1, 0.2]])

    def test_unphysical_is_flagged(self):
        design = build_design(tetrahedron_povm())
        result = estimate(design, [1.0, 0.0, 0.0])
        assert not result.is_physical
        assert result.min_eigenvalue < 0
        with pytest.warns(UserWarning):
            estimate(design, [1.0, 0.0, 0.0], error_handling="warn")
        with pytest.raises(InvalidStateError):
            estimate(design, [1.0, 0.0, 0.0], error_handling="raise")

    @pytest.mark.parametrize(
        ("nu", "expected"),
        [
            ([0.2, 0.3, 0.4], does_not_raise()),
            ([0.5, 0.5, 0.5], pytest.raises(InvalidProbabilityError)),
            ([-0.1, 0.3, 0.4], pytest.raises(InvalidProbabilityError)),
            ([0.2, 0.3], pytest.raises(InvalidDimensionError)),
        ],
    )
    def test_invalid_frequencies(self, nu, expected):
        with expected:
            estimate(build_design(tetrahedron_povm()), nu)


class TestQubitVariance:
    @pytest.mark.parametrize(
        ("lam", "theta", "expected"),
        [
            ([0, 0, 1], [0.3, 0.4, 0.5], 0.75),
            ([0, 0, 1], [0, 0, 0], 1.0),
            ([0.6, 0, 0.8], [0.6, 0, 0.8], 0.0),
            ([0.6, 0, 0.8], [0, 0, 0], 1 / 0.64),
        ],
    )
    def test_values(self, lam, theta, expected):
        assert qubit_variance(lam, theta) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize(
        ("lam", "expected"),
        [
            ([1, 0, 0], pytest.raises(NonEstimatingDirectionError)),
            ([0, 0, 2], pytest.raises(InvalidDimensionError)),
            ([0, 1], pytest.raises(InvalidDimensionError)),
        ],
    )
    def test_raises(self, lam, expected):
        with expected:
            qubit_variance(lam, [0, 0, 0])


class TestErrorMatrices:
    def test_bernoulli(self):
        assert np.allclose(covariance_w([0.5]), [[0.25]])
        assert np.allclose(bernoulli_w([0.5, 0.1]), np.diag([0.25, 0.09]))

    def test_symmetric_multinomial(self):
        w = covariance_w([1 / 3, 1 / 3, 1 / 3])
        assert np.allclose(np.diag(w), 2 / 9)
        assert np.allclose(w[~np.eye(3, dtype=bool)], -1 / 9)

    @pytest.mark.parametrize("p_vec", [[1.2], [0.6, 0.6], [-0.1, 0.5]])
    def test_invalid_probabilities(self, p_vec):
        with pytest.raises(InvalidProbabilityError):
            covariance_w(p_vec)

    def test_psd(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            p_vec = rng.dirichlet(np.ones(5))[:4]
            assert np.linalg.eigvalsh(covariance_w(p_vec))[0] >= -1e-12

    @pytest.mark.parametrize("theta3", [0.0, 0.3, -0.6, 1.0])
    def test_single_effect_variance(self, theta3):
        design = build_design_vn(VonNeumannFamily([GROUND_STATE_EFFECT]), known_mask=[0, 1])
        state = BlochState([0.0, 0.0, theta3 / np.sqrt(2)], known_mask=[0, 1])
        v = error_matrix(design, state).V
        # Pauli-normalized variance is twice the canonical one
        assert 2 * v[0, 0] == pytest.approx(1 - theta3**2, abs=1e-12)

    def test_identity_design(self):
        w = np.diag([0.1, 0.2])
        design = DesignMatrices(
            offsets=np.zeros(2),
            T=np.eye(2),
            base_offsets=np.zeros(2),
            full_rows=np.eye(2),
            known_mask=np.zeros(2, dtype=bool),
            known_values=np.zeros(0),
            kind="povm",
            dim=2,
            basis_order="gell-mann",
        )
        assert np.allclose(propagate(design, w), w)

    def test_tetrahedron_mixed_state(self):
        design = build_design(tetrahedron_povm())
        matrices = error_matrix(design, BlochState(np.zeros(3)))
        assert np.allclose(matrices.V, matrices.V.T)
        assert np.allclose(matrices.V, 1.5 * np.eye(3))

    def test_shots_scaling(self):
        design = build_design(tetrahedron_povm())
        state = BlochState([0.1, 0.2, -0.1])
        single = error_matrix(design, state).V
        for m in (10, 100):
            assert np.allclose(error_matrix(design, state, shots=m).V * m, single)
        with pytest.raises(ValueError):
            error_matrix(design, state, shots=0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            error_matrix(build_design(tetrahedron_povm()), BlochState(np.zeros(8)))

    def test_basis_argument(self):
        design = build_design(trine_povm(), known_mask=[2], basis=build_basis(2))
        assert design.basis_order == "gell-mann"

    def test_basis_order_mismatch(self):
        basis = pauli_product_basis(2)
        design = build_design_vn(two_qubit_optimal_family(), marginal_mask(basis), basis)
        rho = np.diag([0.7, 0.1, 0.1, 0.1])
        v = error_matrix(design, density_to_bloch(rho, basis)).V
        # only the ZZ effect sees the state: p = 0.8
        assert np.allclose(np.sort(np.diag(v)), [0.16] + [0.25] * 8)
        # same density matrix, Gell-Mann coordinates
        with pytest.raises(InvalidBasisError):
            error_matrix(design, density_to_bloch(rho))
        with pytest.raises(InvalidBasisError):
            as_design(design, basis=build_basis(4))
        assert as_design(design, basis=basis) is design
