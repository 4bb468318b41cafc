"""Main script for the CLI interface of the tomodesign package."""
import functools
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
import numpy as np
from trogon import tui

from tomodesign.basis import BASIS_ORDERS, BlochState, get_basis
from tomodesign.measurements import (
    Povm,
    check_sic,
    load_design,
    qutrit_conditional_sic,
    validate_family,
    validate_povm,
)
from tomodesign.optimization import OptimizationProblem, optimize
from tomodesign.priors import avg_error_matrix, avg_error_matrix_mc
from tomodesign.simulation import ExperimentSpec, run_experiments
from tomodesign.utils import (
    resolve_mask,
    resolve_prior,
    to_json_string,
    validate_float_list,
    validate_json_path,
    validate_mask,
    validate_prior,
    write_to_file,
)
from tomodesign.utils._datatype_validation_helper import _assert_file_extension
from tomodesign.utils._tolerances import COMPLETENESS_TOL, POSITIVITY_TOL, QUASI_ORTH_TOL
from tomodesign.utils.exceptions import DesignError, DesignParseError, FileExtensionError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3

SIC_TOL = 1e-10


def _exit_codes(func: Callable) -> Callable:
    """Map package exceptions to the exit codes of the CLI."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except (DesignParseError, FileExtensionError, ValidationError) as e:
            click.secho(f"Error: {e}", fg="red", err=True)
            ctx.exit(EXIT_PARSE)
        except DesignError as e:
            click.secho(f"Numerical failure: {e}", fg="red", err=True)
            ctx.exit(EXIT_NUMERICAL)

    return wrapper


def _config() -> Dict[str, Any]:
    ctx = click.get_current_context()
    params = {k: list(v) if isinstance(v, tuple) else v for k, v in ctx.params.items()}
    return {"command": ctx.info_name, **params}


def _emit(report: Dict[str, Any], output: Optional[str]):
    content = to_json_string({"config": _config(), **report})
    if output:
        _assert_file_extension(output, ".json")
        write_to_file(Path(output), content)
    else:
        click.echo(content, nl=False)


def _input_option(required: bool = True):
    return click.option(
        "--input",
        "input_path",
        required=required,
        type=click.Path(exists=True, file_okay=True, dir_okay=False),
        callback=validate_json_path,
        help="Path to the *.json file holding a POVM or a von Neumann family.",
    )


_output_option = click.option(
    "--output",
    "output",
    default=None,
    type=click.Path(file_okay=True, dir_okay=False),
    help="Output file. The report is written to stdout if omitted.",
)
_seed_option = click.option("--seed", default=0, show_default=True, type=int, envvar="TOMODESIGN_SEED", help="Seed.")
_threads_option = click.option("--threads", default=1, show_default=True, type=click.IntRange(1), help="Worker cap.")
_basis_option = click.option(
    "--basis",
    "basis_order",
    default="gell-mann",
    show_default=True,
    type=click.Choice(BASIS_ORDERS),
    help="Coordinate basis the mask and all vectors refer to.",
)
_mask_option = click.option(
    "--mask",
    default="none",
    show_default=True,
    callback=validate_mask,
    help="Known coordinates: comma-separated indices or one of 'none', 'diagonal', 'marginals'.",
)
_known_values_option = click.option(
    "--known-values",
    default=None,
    callback=validate_float_list,
    help="Comma-separated values of the known coordinates (canonical units). Default: zeros.",
)
_prior_option = click.option(
    "--prior",
    default="pure",
    show_default=True,
    callback=validate_prior,
    help="Prior as *.json file, inline JSON object, or one of 'pure', 'mixed' (Haar orbits).",
)


@tui()
@click.group(name="tomodesign")
def cli():
    """Design, evaluate and simulate measurement schemes for quantum state tomography."""


@cli.command()
@_input_option()
@_output_option
@click.option("--tol", default=POSITIVITY_TOL, show_default=True, type=float, help="Positivity tolerance.")
@click.option(
    "--completeness-tol", default=COMPLETENESS_TOL, show_default=True, type=float, help="Completeness tolerance."
)
@_exit_codes
def validate(input_path: str, output: Optional[str], tol: float, completeness_tol: float):
    """Check positivity and completeness of a POVM (or the contraction property of a family)."""
    design = load_design(input_path)
    if isinstance(design, Povm):
        violations = validate_povm(design, positivity_tol=tol, completeness_tol=completeness_tol)
        kind = "povm"
    else:
        violations = validate_family(design, positivity_tol=tol)
        kind = "von_neumann"
    _emit(
        {"kind": kind, "dim": design.dim, "valid": not violations, "violations": [v.to_dict() for v in violations]},
        output,
    )
    if violations:
        click.secho(
            "Invalid design: " + ", ".join(sorted({v.invariant for v in violations})) + " violated.", fg="red", err=True
        )
        click.get_current_context().exit(EXIT_VALIDATION)


@cli.command()
@_input_option()
@_output_option
@_prior_option
@_mask_option
@_known_values_option
@_basis_option
@click.option(
    "--method",
    default="closed_form",
    show_default=True,
    type=click.Choice(["closed_form", "monte_carlo", "both"]),
    help="Evaluation method of the prior average.",
)
@click.option("--samples", default=100_000, show_default=True, type=click.IntRange(1), help="Monte Carlo samples.")
@_seed_option
@_threads_option
@_exit_codes
def objective(input_path: str, output: Optional[str], prior, mask, known_values, basis_order: str, **kwargs):
    """Evaluate the prior-averaged error matrix and its determinant."""
    design = load_design(input_path)
    basis = get_basis(design.dim, basis_order)
    known_mask = resolve_mask(mask, basis)
    prior_obj = resolve_prior(prior, design.dim)
    report: Dict[str, Any] = {"prior": prior_obj.to_dict()}
    if kwargs["method"] in ("closed_form", "both"):
        report["closed_form"] = avg_error_matrix(design, prior_obj, known_mask, basis, known_values).to_dict()
    if kwargs["method"] in ("monte_carlo", "both"):
        report["monte_carlo"] = avg_error_matrix_mc(
            design,
            prior_obj,
            known_mask,
            samples=kwargs["samples"],
            seed=kwargs["seed"],
            basis=basis,
            known_values=known_values,
            threads=kwargs["threads"],
        ).to_dict()
    _emit(report, output)


@cli.command(name="optimize")
@_output_option
@click.option("--dim", required=True, type=click.IntRange(2, 8), help="Hilbert space dimension.")
@click.option(
    "--kind",
    default="povm",
    show_default=True,
    type=click.Choice(["povm", "von_neumann"]),
    help="Design kind.",
)
@click.option("--outcomes", default=None, type=int, help="Number of POVM outcomes. Default: unknowns + 1.")
@click.option(
    "--spectrum",
    default=None,
    callback=validate_float_list,
    help="Comma-separated common spectrum of the von Neumann effects.",
)
@_prior_option
@_mask_option
@_known_values_option
@_basis_option
@click.option(
    "--objective",
    "objective_name",
    default=None,
    type=click.Choice(["det_avg_cov", "abs_det_t"]),
    help="Objective. Default: det_avg_cov for POVMs, abs_det_t for von Neumann families.",
)
@click.option("--restarts", default=32, show_default=True, type=click.IntRange(1), help="Number of restarts.")
@click.option("--max-iters", default=5000, show_default=True, type=click.IntRange(1), help="Iterations per stage.")
@click.option("--tol", default=1e-10, show_default=True, type=float, help="Objective-change tolerance.")
@_seed_option
@_threads_option
@_exit_codes
def optimize_cmd(output: Optional[str], dim: int, kind: str, prior, mask, known_values, basis_order: str, **kwargs):
    """Search for the design with the smallest averaged error determinant."""
    basis = get_basis(dim, basis_order)
    objective_name = kwargs["objective_name"] or ("det_avg_cov" if kind == "povm" else "abs_det_t")
    problem = OptimizationProblem(
        dim=dim,
        design_kind=kind,
        outcomes=kwargs["outcomes"],
        spectrum=kwargs["spectrum"],
        known_mask=resolve_mask(mask, basis),
        known_values=known_values,
        prior=resolve_prior(prior, dim) if objective_name == "det_avg_cov" else None,
        objective=objective_name,
        basis_order=basis_order,
        seed=kwargs["seed"],
        restarts=kwargs["restarts"],
        max_iters=kwargs["max_iters"],
        tol=kwargs["tol"],
        threads=kwargs["threads"],
    )
    result = optimize(problem, error_handling="ignore")
    _emit({"problem": problem.to_dict(), **result.to_dict()}, output)


@cli.command()
@_input_option()
@_output_option
@click.option(
    "--state",
    default=None,
    callback=validate_float_list,
    help="Comma-separated canonical Bloch vector of the true state. Default: maximally mixed state.",
)
@_mask_option
@_basis_option
@click.option("--shots", default=1000, show_default=True, type=click.IntRange(1), help="Shots per run.")
@click.option("--runs", default=10_000, show_default=True, type=click.IntRange(1), help="Number of runs.")
@click.option(
    "--format",
    "output_format",
    default="json",
    show_default=True,
    type=click.Choice(["json", "csv"]),
    help="'json' for the summary, 'csv' for the per-run estimates with the run configuration in a '.config.json' "
    "file next to the output (or as '#' comment lines on stdout).",
)
@_seed_option
@_threads_option
@_exit_codes
def simulate(input_path: str, output: Optional[str], state, mask, basis_order: str, output_format: str, **kwargs):
    """Simulate repeated experiments and compare the empirical with the analytic covariance."""
    design = load_design(input_path)
    basis = get_basis(design.dim, basis_order)
    theta = np.zeros(basis.n_params) if state is None else np.asarray(state)
    true_state = BlochState(theta, known_mask=resolve_mask(mask, basis), basis_order=basis_order)
    spec = ExperimentSpec(
        design=design,
        true_state=true_state,
        shots=kwargs["shots"],
        runs=kwargs["runs"],
        seed=kwargs["seed"],
        basis=basis,
        threads=kwargs["threads"],
    )
    report = run_experiments(spec)
    if output_format == "csv":
        config = to_json_string({"config": _config()})
        if output:
            report.to_csv(output)
            write_to_file(Path(output).with_suffix(".config.json"), config)
        else:
            header = "".join(f"# {line}\n" for line in config.splitlines())
            click.echo(header + report.to_dataframe().to_csv(), nl=False)
        return
    _emit({**report.to_dict(), "comparison": report.comparison_table().to_dict(orient="records")}, output)


def _sic_report(design: Povm, mask, basis_order: str, tol: float) -> Dict[str, Any]:
    basis = get_basis(design.dim, basis_order)
    known_mask = resolve_mask(mask, basis)
    violations = validate_povm(design, completeness_tol=1e-12)
    sic = check_sic(design, known_mask=known_mask, basis=basis, quasi_orth_tol=tol)
    passed = (
        not violations
        and sic.all_rank_one
        and sic.is_symmetric(SIC_TOL)
        and (sic.quasi_orthogonal_to_known or not known_mask.any())
    )
    return {
        "valid": not violations,
        "violations": [v.to_dict() for v in violations],
        "sic": sic.to_dict(),
        "passed": passed,
    }


@cli.command(name="verify-sic")
@_input_option()
@_output_option
@_mask_option
@_basis_option
@click.option("--tol", default=QUASI_ORTH_TOL, show_default=True, type=float, help="Quasi-orthogonality tolerance.")
@_exit_codes
def verify_sic(input_path: str, output: Optional[str], mask, basis_order: str, tol: float):
    """Report the symmetry constants of a POVM rescaled to projections."""
    design = load_design(input_path)
    if not isinstance(design, Povm):
        raise DesignParseError(f"{input_path}: expected a POVM document, found a von Neumann family")
    report = _sic_report(design, mask, basis_order, tol)
    _emit(report, output)
    if not report["passed"]:
        click.get_current_context().exit(EXIT_VALIDATION)


@cli.command(name="demo-qutrit")
@_output_option
@_exit_codes
def demo_qutrit(output: Optional[str]):
    """Rebuild the seven-outcome qutrit POVM from the 7th roots of unity and verify its structure."""
    design = qutrit_conditional_sic()
    report = _sic_report(design, "diagonal", "gell-mann", QUASI_ORTH_TOL)
    report["expected"] = {"lambda": 7 / 3, "mu": 2 / 9}
    report["passed"] = bool(
        report["passed"]
        and abs(report["sic"]["lambda"] - 7 / 3) <= SIC_TOL
        and abs(report["sic"]["mu"] - 2 / 9) <= SIC_TOL
    )
    report["design"] = design.to_dict()
    _emit(report, output)
    if not report["passed"]:
        click.get_current_context().exit(EXIT_VALIDATION)


@cli.command()
@_output_option
@click.option("--dim", required=True, type=click.IntRange(2), help="Hilbert space dimension.")
@_basis_option
@_exit_codes
def bases(output: Optional[str], dim: int, basis_order: str):
    """Print the coordinate basis: labels and matrices in coordinate order."""
    _emit({"basis": get_basis(dim, basis_order).to_dict()}, output)
