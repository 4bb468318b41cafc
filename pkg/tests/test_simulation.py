from contextlib import contextmanager

import numpy as np
import pandas as pd
import pytest

from tomodesign.basis import BlochState, from_pauli_scale, marginal_mask, pauli_product_basis
from tomodesign.estimation import build_design, error_matrix
from tomodesign.measurements import Povm, VonNeumannFamily, tetrahedron_povm, trine_povm, two_qubit_optimal_family
from tomodesign.simulation import ExperimentSpec, run_experiments, unphysical_decay
from tomodesign.utils.exceptions import (
    FileExtensionError,
    InvalidBasisError,
    InvalidDimensionError,
    InvalidStateError,
    SingularDesignError,
    ValidationError,
)

INTERIOR_STATE = BlochState([0.1, 0.05, 0.2])


@contextmanager
def does_not_raise():
    yield


class TestExperimentSpec:
    @pytest.mark.parametrize(
        ("kwargs", "expected"),
        [
            ({"shots": 10, "runs": 5}, does_not_raise()),
            ({"shots": 0, "runs": 5}, pytest.raises(ValidationError)),
            ({"shots": 10, "runs": 0}, pytest.raises(ValidationError)),
            ({"shots": 10, "runs": 5, "true_state": BlochState(np.zeros(8))}, pytest.raises(InvalidDimensionError)),
            ({"shots": 10, "runs": 5, "basis": pauli_product_basis(1)}, pytest.raises(InvalidBasisError)),
        ],
    )
    def test_validation(self, kwargs, expected):
        params = {"design": tetrahedron_povm(), "true_state": INTERIOR_STATE}
        params.update(kwargs)
        with expected:
            ExperimentSpec(**params)

    def test_known_values_come_from_the_state(self):
        state = BlochState([0.1, 0.1, 0.3], known_mask=[2])
        design = ExperimentSpec(trine_povm(), state, shots=10, runs=1).design_matrices()
        assert design.d == 2
        assert design.known_values.tolist() == [0.3]


class TestRunExperiments:
    @pytest.fixture(scope="class")
    def report(self):
        return run_experiments(ExperimentSpec(tetrahedron_povm(), INTERIOR_STATE, shots=100, runs=2000, seed=7))

    def test_shapes(self, report):
        assert report.estimates.shape == (2000, 3)
        assert report.empirical_cov.shape == (3, 3)
        assert report.cov_stderr.shape == (3, 3)
        assert np.allclose(report.empirical_cov, report.empirical_cov.T)

    def test_unbiased(self, report):
        assert np.all(np.abs(report.mean_estimate - report.true_theta) <= 4 * report.mean_stderr)

    def test_covariance_matches_error_matrix(self, report):
        design = build_design(tetrahedron_povm())
        assert np.allclose(report.analytic_cov, error_matrix(design, INTERIOR_STATE, shots=100).V)
        assert np.all(np.abs(report.empirical_cov - report.analytic_cov) <= 4 * report.cov_stderr)

    def test_comparison_table(self, report):
        table = report.comparison_table()
        assert len(table) == 6
        assert list(table.columns) == ["row", "col", "empirical", "analytic", "stderr", "z_score"]
        assert (table["z_score"].abs() <= 4).all()

    def test_dataframe(self, report):
        data = report.to_dataframe()
        assert data.index.name == "run"
        assert list(data.columns) == ["theta_0", "theta_1", "theta_2", "min_eigenvalue", "is_physical"]
        assert data["is_physical"].mean() == pytest.approx(1 - report.unphysical_fraction)

    def test_csv(self, report, tmp_path):
        path = tmp_path.joinpath("estimates.csv")
        report.to_csv(path)
        loaded = pd.read_csv(path, index_col="run")
        assert np.allclose(loaded[["theta_0", "theta_1", "theta_2"]].to_numpy(), report.estimates)
        with pytest.raises(FileExtensionError):
            report.to_csv(tmp_path.joinpath("estimates.xlsx"))

    def test_serialization(self, report):
        data = report.to_dict()
        assert data["runs"] == 2000
        assert "estimates" not in data

    def test_thread_independence(self):
        kwargs = {"design": tetrahedron_povm(), "true_state": INTERIOR_STATE, "shots": 50, "runs": 700, "seed": 3}
        single = run_experiments(ExperimentSpec(threads=1, **kwargs))
        multi = run_experiments(ExperimentSpec(threads=4, **kwargs))
        assert np.array_equal(single.estimates, multi.estimates)
        other = run_experiments(ExperimentSpec(threads=1, **{**kwargs, "seed": 4}))
        assert not np.array_equal(single.estimates, other.estimates)

    def test_von_neumann_family(self):
        basis = pauli_product_basis(2)
        state = BlochState(np.zeros(15), known_mask=marginal_mask(basis), basis_order="pauli-product")
        report = run_experiments(ExperimentSpec(two_qubit_optimal_family(), state, shots=40, runs=1500, seed=1))
        assert report.estimates.shape == (1500, 9)
        # orthogonal design matrix: V = diag(p(1 - p)) / m
        assert np.allclose(report.analytic_cov, 0.25 / 40 * np.eye(9))
        diag = np.diag(report.empirical_cov)
        assert np.all(np.abs(diag - 0.25 / 40) <= 4 * np.diag(report.cov_stderr))
        off_diagonal = ~np.eye(9, dtype=bool)
        assert np.all(np.abs(report.empirical_cov[off_diagonal]) <= 5 * report.cov_stderr[off_diagonal])

    def test_single_effect_variance(self):
        state = BlochState(from_pauli_scale([0.0, 0.0, 0.6]), known_mask=[0, 1])
        report = run_experiments(
            ExperimentSpec(VonNeumannFamily([np.diag([1.0, 0.0])]), state, shots=1, runs=100_000, seed=2)
        )
        # Pauli-normalized variance 4p(1 - p) with p = 0.8 is twice the canonical one
        assert 2 * report.analytic_cov[0, 0] == pytest.approx(0.64)
        assert 2 * report.empirical_cov[0, 0] == pytest.approx(0.64, rel=0.02)

    def test_singular_design(self):
        povm = Povm([np.diag([0.5, 0.0]), np.diag([0.0, 0.5]), np.diag([0.25, 0.25]), np.diag([0.25, 0.25])])
        with pytest.raises(SingularDesignError):
            run_experiments(ExperimentSpec(povm, INTERIOR_STATE, shots=10, runs=10))


class TestUnphysicalDecay:
    def test_interior_state_decays(self):
        state = BlochState(from_pauli_scale([0.0, 0.0, 0.6]))
        spec = ExperimentSpec(tetrahedron_povm(), state, shots=1, runs=2000, seed=0)
        decay = unphysical_decay(spec, [10, 1000], error_handling="raise")
        assert [m for m, _ in decay] == [10, 1000]
        assert decay[0][1] > 0.05
        assert decay[1][1] < decay[0][1]
        assert decay[1][1] < 0.01

    def test_boundary_state(self):
        pure = BlochState(from_pauli_scale([0.0, 0.0, 1.0]))
        spec = ExperimentSpec(tetrahedron_povm(), pure, shots=1, runs=100, seed=0)
        with pytest.raises(InvalidStateError):
            unphysical_decay(spec, [10], error_handling="raise")
        with pytest.warns(UserWarning):
            decay = unphysical_decay(spec, [10], error_handling="warn")
        assert len(decay) == 1
