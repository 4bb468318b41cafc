import io
import json
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from tomodesign.basis import build_basis, pauli_product_basis
from tomodesign.measurements import Povm, design_to_json
from tomodesign.scripts.tomodesign_cli import cli
from tomodesign.utils import resolve_mask, resolve_prior, validate_float_list, validate_mask, validate_prior

TEST_DATA_PATH = Path(__file__).parent.joinpath("test_data")
EXAMPLE_DATA_PATH = Path(__file__).parent.parent.joinpath("example_data")

TETRAHEDRON = str(EXAMPLE_DATA_PATH.joinpath("tetrahedron.json"))
TRINE = str(EXAMPLE_DATA_PATH.joinpath("trine.json"))
TWO_QUBIT_FAMILY = str(EXAMPLE_DATA_PATH.joinpath("two_qubit_family.json"))


@contextmanager
def does_not_raise():
    yield


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, args):
    return runner.invoke(cli, args, catch_exceptions=False)


class TestValidate:
    @pytest.mark.parametrize(
        ("path", "exit_code"),
        [
            (TETRAHEDRON, 0),
            (TWO_QUBIT_FAMILY, 0),
            (str(TEST_DATA_PATH.joinpath("non_summing.json")), 1),
            (str(TEST_DATA_PATH.joinpath("malformed.json")), 2),
            (str(TEST_DATA_PATH.joinpath("dim_mismatch.json")), 2),
        ],
    )
    def test_exit_codes(self, runner, path, exit_code):
        assert _invoke(runner, ["validate", "--input", path]).exit_code == exit_code

    def test_report(self, runner):
        result = _invoke(runner, ["validate", "--input", TETRAHEDRON])
        report = json.loads(result.output)
        assert report["valid"]
        assert report["kind"] == "povm"
        assert report["config"]["command"] == "validate"

    def test_violations_are_written(self, runner, tmp_path):
        output = tmp_path.joinpath("report.json")
        path = str(TEST_DATA_PATH.joinpath("non_summing.json"))
        result = _invoke(runner, ["validate", "--input", path, "--output", str(output)])
        assert result.exit_code == 1
        report = json.loads(output.read_text(encoding="utf-8"))
        assert [v["invariant"] for v in report["violations"]] == ["completeness"]

    def test_wrong_extension(self, runner, tmp_path):
        path = tmp_path.joinpath("design.txt")
        path.write_text("{}", encoding="utf-8")
        assert _invoke(runner, ["validate", "--input", str(path)]).exit_code == 2

    def test_missing_file(self, runner, tmp_path):
        assert _invoke(runner, ["validate", "--input", str(tmp_path.joinpath("missing.json"))]).exit_code == 2


class TestObjective:
    def test_tetrahedron(self, runner):
        result = _invoke(runner, ["objective", "--input", TETRAHEDRON])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["closed_form"]["det_value"] == pytest.approx(64 / 27)
        assert report["prior"]["alpha"] == pytest.approx(1 / 6)

    def test_mixed_prior(self, runner):
        result = _invoke(runner, ["objective", "--input", TETRAHEDRON, "--prior", "mixed"])
        assert json.loads(result.output)["closed_form"]["det_value"] == pytest.approx(27 / 8)

    def test_both_methods(self, runner):
        args = ["objective", "--input", TETRAHEDRON, "--method", "both", "--samples", "2000", "--seed", "1"]
        report = json.loads(_invoke(runner, args).output)
        assert report["monte_carlo"]["method"] == "monte_carlo"
        assert report["monte_carlo"]["samples"] == 2000
        assert report["config"]["seed"] == 1

    def test_trine_with_inline_prior(self, runner):
        prior = '{"kind": "circle_qubit", "theta3": 0, "radius": 1}'
        result = _invoke(runner, ["objective", "--input", TRINE, "--mask", "2", "--prior", prior])
        assert result.exit_code == 0
        assert json.loads(result.output)["closed_form"]["det_value"] == pytest.approx(0.5625)

    def test_prior_file(self, runner):
        prior = str(EXAMPLE_DATA_PATH.joinpath("pure_prior.json"))
        result = _invoke(runner, ["objective", "--input", TETRAHEDRON, "--prior", prior])
        assert json.loads(result.output)["closed_form"]["det_value"] == pytest.approx(64 / 27)

    def test_overcomplete(self, runner):
        assert _invoke(runner, ["objective", "--input", TETRAHEDRON, "--mask", "0"]).exit_code == 3

    def test_singular(self, runner, tmp_path):
        path = tmp_path.joinpath("diagonal.json")
        design_to_json(
            Povm([np.diag([0.5, 0.0]), np.diag([0.0, 0.5]), np.diag([0.25, 0.25]), np.diag([0.25, 0.25])]), path
        )
        assert _invoke(runner, ["objective", "--input", str(path)]).exit_code == 3

    def test_unphysical_prior(self, runner):
        prior = '{"kind": "haar_orbit", "spectrum": [0.6, 0.6]}'
        assert _invoke(runner, ["objective", "--input", TETRAHEDRON, "--prior", prior]).exit_code == 2

    def test_output_file(self, runner, tmp_path):
        output = tmp_path.joinpath("objective.json")
        result = _invoke(runner, ["objective", "--input", TETRAHEDRON, "--output", str(output)])
        assert result.exit_code == 0
        assert json.loads(output.read_text(encoding="utf-8"))["closed_form"]["det_value"] == pytest.approx(64 / 27)
        bad = tmp_path.joinpath("objective.txt")
        assert _invoke(runner, ["objective", "--input", TETRAHEDRON, "--output", str(bad)]).exit_code == 2


class TestOptimize:
    def test_von_neumann(self, runner):
        args = ["optimize", "--dim", "2", "--kind", "von_neumann", "--spectrum", "0,1", "--restarts", "1"]
        result = _invoke(runner, [*args, "--max-iters", "200"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["objective_name"] == "abs_det_t"
        assert report["problem"]["spectrum"] == [0.0, 1.0]
        assert 0 < report["objective"] <= 1 / (2 * np.sqrt(2)) + 1e-9

    def test_povm(self, runner):
        args = ["optimize", "--dim", "2", "--mask", "2", "--restarts", "1", "--max-iters", "100"]
        report = json.loads(_invoke(runner, args).output)
        assert report["problem"]["known"] == [2]
        assert len(report["design"]["elements"]) == 3

    def test_missing_spectrum(self, runner):
        assert _invoke(runner, ["optimize", "--dim", "2", "--kind", "von_neumann"]).exit_code == 2

    def test_dimension_out_of_range(self, runner):
        assert _invoke(runner, ["optimize", "--dim", "9"]).exit_code == 2


class TestSimulate:
    def test_json(self, runner):
        args = ["simulate", "--input", TETRAHEDRON, "--state", "0.1,0.05,0.2", "--shots", "50", "--runs", "200"]
        result = _invoke(runner, args)
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["runs"] == 200
        assert len(report["comparison"]) == 6
        assert report["true_theta"] == pytest.approx([0.1, 0.05, 0.2])

    def test_csv(self, runner, tmp_path):
        output = tmp_path.joinpath("estimates.csv")
        args = ["simulate", "--input", TETRAHEDRON, "--shots", "20", "--runs", "30", "--format", "csv"]
        assert _invoke(runner, [*args, "--output", str(output)]).exit_code == 0
        assert len(pd.read_csv(output, index_col="run")) == 30
        config = json.loads(tmp_path.joinpath("estimates.config.json").read_text(encoding="utf-8"))["config"]
        assert config["command"] == "simulate"
        assert config["shots"] == 20
        assert config["runs"] == 30
        assert config["seed"] == 0

        stdout = _invoke(runner, args).output
        lines = stdout.splitlines()
        header = [line[2:] for line in lines if line.startswith("#")]
        assert json.loads("\n".join(header))["config"]["runs"] == 30
        assert lines[len(header)].startswith("run,theta_0")
        assert len(pd.read_csv(io.StringIO(stdout), comment="#", index_col="run")) == 30

    def test_csv_wrong_extension(self, runner, tmp_path):
        output = tmp_path.joinpath("estimates.json")
        args = ["simulate", "--input", TETRAHEDRON, "--runs", "10", "--format", "csv", "--output", str(output)]
        assert _invoke(runner, args).exit_code == 2
        assert not tmp_path.joinpath("estimates.config.json").exists()

    def test_von_neumann_family(self, runner):
        args = ["simulate", "--input", TWO_QUBIT_FAMILY, "--mask", "marginals", "--basis", "pauli-product"]
        result = _invoke(runner, [*args, "--shots", "20", "--runs", "50"])
        assert result.exit_code == 0
        assert len(json.loads(result.output)["mean_estimate"]) == 9

    def test_state_dimension_mismatch(self, runner):
        assert _invoke(runner, ["simulate", "--input", TETRAHEDRON, "--state", "0,0"]).exit_code == 2


class TestStructureCommands:
    @pytest.mark.parametrize(
        ("path", "mask", "exit_code"), [(TETRAHEDRON, "none", 0), (TRINE, "2", 0), (TRINE, "0", 1)]
    )
    def test_verify_sic(self, runner, path, mask, exit_code):
        assert _invoke(runner, ["verify-sic", "--input", path, "--mask", mask]).exit_code == exit_code

    def test_verify_sic_constants(self, runner):
        report = json.loads(_invoke(runner, ["verify-sic", "--input", TRINE, "--mask", "2"]).output)
        assert report["sic"]["lambda"] == pytest.approx(1.5)
        assert report["sic"]["mu"] == pytest.approx(0.25)

    def test_verify_sic_rejects_family(self, runner):
        assert _invoke(runner, ["verify-sic", "--input", TWO_QUBIT_FAMILY]).exit_code == 2

    def test_demo_qutrit(self, runner):
        result = _invoke(runner, ["demo-qutrit"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["passed"]
        assert report["sic"]["mu"] == pytest.approx(2 / 9)
        assert len(report["design"]["elements"]) == 7

    @pytest.mark.parametrize(("dim", "order", "n_labels"), [("2", "gell-mann", 3), ("4", "pauli-product", 15)])
    def test_bases(self, runner, dim, order, n_labels):
        result = _invoke(runner, ["bases", "--dim", dim, "--basis", order])
        assert result.exit_code == 0
        assert len(json.loads(result.output)["basis"]["labels"]) == n_labels

    def test_bases_invalid(self, runner):
        assert _invoke(runner, ["bases", "--dim", "3", "--basis", "pauli-product"]).exit_code == 2


class TestClickHelper:
    @pytest.mark.parametrize(
        ("value", "expected", "raises"),
        [
            (None, "none", does_not_raise()),
            ("Diagonal", "diagonal", does_not_raise()),
            ("0, 2", [0, 2], does_not_raise()),
            ("a,b", None, pytest.raises(click.BadParameter)),
            ("-1", None, pytest.raises(click.BadParameter)),
        ],
    )
    def test_validate_mask(self, value, expected, raises):
        with raises:
            assert validate_mask(None, None, value) == expected

    def test_resolve_mask(self):
        assert resolve_mask("none", build_basis(2)).tolist() == [False, False, False]
        assert np.flatnonzero(resolve_mask("diagonal", build_basis(3))).tolist() == [6, 7]
        assert resolve_mask("marginals", pauli_product_basis(2)).sum() == 6
        assert resolve_mask([1], build_basis(2)).tolist() == [False, True, False]

    @pytest.mark.parametrize(
        ("value", "expected", "raises"),
        [
            (None, None, does_not_raise()),
            ("", None, does_not_raise()),
            ("0.5, 0,1", [0.5, 0.0, 1.0], does_not_raise()),
            ("0.5,x", None, pytest.raises(click.BadParameter)),
        ],
    )
    def test_validate_float_list(self, value, expected, raises):
        with raises:
            assert validate_float_list(None, None, value) == expected

    @pytest.mark.parametrize(
        ("value", "raises"),
        [
            ("pure", does_not_raise()),
            ('{"kind": "haar_orbit", "spectrum": [1, 0]}', does_not_raise()),
            ('{"kind": ', pytest.raises(click.BadParameter)),
            ("prior.txt", pytest.raises(click.BadParameter)),
        ],
    )
    def test_validate_prior(self, value, raises):
        with raises:
            validate_prior(None, None, value)

    def test_resolve_prior(self):
        assert resolve_prior("pure", 3).alpha == pytest.approx(1 / 12)
        assert resolve_prior("mixed", 2).alpha == pytest.approx(0.0)
        assert resolve_prior(None, 2).alpha == pytest.approx(1 / 6)
        assert resolve_prior({"kind": "two_point_qubit", "theta3": 0.6}, 2).alpha == pytest.approx(0.18)
