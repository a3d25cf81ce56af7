"""
spinbath CLI - command-line interface for RB decay experiments.

Results go to stdout (or --out) as CSV with '#' metadata headers; logs and
rich tables go to stderr.

Usage:
    spinbath decay --preset reference_nonmarkovian --out decay.csv
    spinbath decay --config run.json --method montecarlo --seed 7
    spinbath witness --preset reference_witness --out witness.csv
    spinbath photon --preset reference_photon
    spinbath fit decay.csv --json fit.json
    spinbath verify
"""
import json
import sys
from pathlib import Path
from typing import NoReturn, Optional

try:
    import typer
    from rich.console import Console
    from rich.table import Table
except ImportError:
    print("CLI dependencies not installed. Run: pip install spinbath-rb")
    sys.exit(1)

from spinbath.core.exceptions import (
    CompatibilityError,
    ConfigurationError,
    DataFormatError,
    FitError,
    SpinBathError,
    ValidationError,
)
from spinbath.core.schemas import ExperimentConfig

app = typer.Typer(
    name="spinbath",
    help="Randomized-benchmarking decay of qubits coupled to a truncated bosonic bath",
    add_completion=False,
)
console = Console(stderr=True)

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_COMPATIBILITY = 3
EXIT_DATA_FORMAT = 4


def _exit_code(exc: SpinBathError) -> int:
    if isinstance(exc, ConfigurationError):
        return EXIT_CONFIG
    if isinstance(exc, CompatibilityError):
        return EXIT_COMPATIBILITY
    if isinstance(exc, DataFormatError):
        return EXIT_DATA_FORMAT
    return EXIT_CONFIG


def _abort(exc: SpinBathError) -> NoReturn:
    console.print(f"[red]Error: {exc}[/red]")
    raise typer.Exit(code=_exit_code(exc))


def _load_config(
    config: Optional[Path],
    preset: Optional[str],
    seed: Optional[int],
    method: Optional[str],
    mode: Optional[str],
) -> ExperimentConfig:
    from spinbath.pipelines.experiments import RBExperiment

    if config is not None and preset is not None:
        raise ConfigurationError("pass either --config or --preset, not both")
    if config is not None:
        base = ExperimentConfig.from_file(config)
    elif preset is not None:
        base = RBExperiment.from_preset(preset).config
    else:
        raise ConfigurationError("an experiment needs --config <path> or --preset <name>")
    return base.with_overrides(seed=seed, method=method, mode=mode)


ConfigOption = typer.Option(None, "--config", "-c", help="Path to a JSON experiment file")
PresetOption = typer.Option(None, "--preset", "-p", help="Built-in experiment preset")
OutOption = typer.Option(None, "--out", "-o", help="Output CSV path (default: stdout)")
SeedOption = typer.Option(None, "--seed", help="Override the experiment seed (u64)")
MethodOption = typer.Option(None, "--method", help="averaged | montecarlo | closed | trajectory")
ModeOption = typer.Option(None, "--mode", help="nonmarkovian | markovian | xi")


@app.command()
def decay(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    method: Optional[str] = MethodOption,
    mode: Optional[str] = ModeOption,
):
    """
    Compute an RB decay curve: columns depth,value,stderr.

    stderr is empty for exact methods.
    """
    from spinbath.io.writers import render_csv, write_text
    from spinbath.pipelines.experiments import RBExperiment

    try:
        cfg = _load_config(config, preset, seed, method, mode)
        curve = RBExperiment(cfg).run_decay()
    except SpinBathError as exc:
        _abort(exc)
    write_text(render_csv(curve.to_frame(), "decay", cfg), out)


@app.command()
def witness(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    mode: Optional[str] = ModeOption,
):
    """
    Trace-distance witness over random circuits: rows circuit_id,depth,D,deltaD
    plus a '#'-prefixed summary of the positive-increment fraction per depth.
    """
    from spinbath.io.writers import render_csv, write_text
    from spinbath.pipelines.experiments import RBExperiment

    try:
        cfg = _load_config(config, preset, seed, None, mode)
        frame, summary = RBExperiment(cfg).run_witness()
    except SpinBathError as exc:
        _abort(exc)
    write_text(render_csv(frame, "witness", cfg, trailer=summary), out)
    positive = int((frame["deltaD"] > 1e-10).sum()) if len(frame) else 0
    console.print(f"Backflow steps: {positive} of {len(frame)}")


@app.command()
def photon(
    config: Optional[Path] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[Path] = OutOption,
):
    """Average bath photon number and its variance: columns cutoff,depth,n_avg,n_var."""
    from spinbath.io.writers import render_csv, write_text
    from spinbath.pipelines.experiments import RBExperiment

    try:
        cfg = _load_config(config, preset, None, None, None)
        frame = RBExperiment(cfg).run_photon()
    except SpinBathError as exc:
        _abort(exc)
    write_text(render_csv(frame, "photon", cfg), out)


@app.command()
def fit(
    input_path: Path = typer.Argument(..., help="CSV produced by 'decay' (depth,value[,stderr])"),
    model: str = typer.Option("compare", "--model", "-m", help="exp | powexp | compare"),
    json_out: Optional[Path] = typer.Option(None, "--json", help="Write the report as JSON"),
):
    """Fit a decay curve and classify it as exponential or non-exponential."""
    from spinbath.evaluation import compare_models, fit_exponential, fit_power_exponential
    from spinbath.io.readers import read_decay_csv

    if model not in ("exp", "powexp", "compare"):
        _abort(ConfigurationError(f"unknown model '{model}', expected exp, powexp or compare"))
    try:
        curve, _ = read_decay_csv(input_path)
        if model == "exp":
            fits, report = [fit_exponential(curve)], None
        elif model == "powexp":
            fits, report = [fit_power_exponential(curve)], None
        else:
            report = compare_models(curve)
            fits = [report.exponential, report.power_exponential]
    except (ValidationError, FitError) as exc:
        # a readable CSV that cannot be fitted is still bad input data
        _abort(DataFormatError(f"cannot fit {input_path.name}: {exc}"))
    except SpinBathError as exc:
        _abort(exc)

    table = Table(title=f"Decay fit: {input_path.name}")
    table.add_column("Model", style="cyan")
    table.add_column("Parameters", style="white")
    table.add_column("Offset", style="dim")
    table.add_column("SSE", style="green")
    table.add_column("Converged", style="yellow")
    for result in fits:
        params = ", ".join(f"{k}={v:.8g}" for k, v in result.params.items())
        table.add_row(result.model, params, f"{result.offset:.6g}", f"{result.sse:.3e}", str(result.converged))
    console.print(table)

    payload = report.to_dict() if report is not None else fits[0].to_dict()
    if report is not None:
        console.print(
            f"Classification: [bold]{report.classification}[/bold] "
            f"(sse ratio {report.sse_ratio:.3g}, threshold {report.threshold:g})"
        )
    text = json.dumps(payload, indent=2, sort_keys=True)
    if json_out is not None:
        json_out.parent.mkdir(parents=True, exist_ok=True)
        json_out.write_text(text + "\n", encoding="utf-8")
        console.print(f"Report saved to: {json_out}")
    else:
        sys.stdout.write(text + "\n")


@app.command()
def verify(
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Also write the report as CSV"),
):
    """Run the cross-check battery; exits 1 if any check fails."""
    from spinbath.io.writers import render_csv, write_text
    from spinbath.pipelines.verify import run_verify

    report = run_verify()
    table = Table(title="Verification")
    table.add_column("Check", style="cyan")
    table.add_column("Criterion", style="dim")
    table.add_column("Observed", style="white")
    table.add_column("Result")
    for check in report.checks:
        status = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.name, check.criterion, f"{check.observed:.3e}", status)
    console.print(table)

    if out is not None:
        write_text(render_csv(report.to_frame(), "verify"), out)
    if not report.passed:
        console.print(f"[red]Failed checks: {', '.join(report.failures)}[/red]")
        raise typer.Exit(code=EXIT_VERIFY_FAILED)
    console.print("[bold green]All checks passed[/bold green]")


@app.command()
def presets():
    """List built-in experiment presets."""
    from spinbath.pipelines.experiments import EXPERIMENT_PRESETS

    table = Table(title="Experiment Presets")
    table.add_column("Name", style="cyan")
    table.add_column("Mode", style="yellow")
    table.add_column("Method", style="white")
    table.add_column("Depths", style="dim")
    for name, preset in EXPERIMENT_PRESETS.items():
        depths = preset["depths"]
        table.add_row(name, preset["mode"], preset["method"], f"{depths[0]}..{depths[-1]}")
    console.print(table)


def main():
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
