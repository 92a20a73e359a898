"""Command-line interface for feature selection via discriminability."""

import logging
import sys
from typing import Any, Callable, List, Optional

import click
from colorama import Fore, Style, just_fix_windows_console

from . import FeatureSelector, __version__, create_default_selector, create_selector_from_config_file
from .config import SelectorConfig, create_default_config_file
from .core import available_threads
from .io import render_document, write_scores_csv
from .models import ConfigurationError, DataError, DataMatrix, ResultDocument, SelectionError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3

BASELINE_METHODS = ["random", "variance", "correlation", "rrfs"]


class ThreadsType(click.ParamType):
    """A positive thread count or 'max' (all available CPUs)."""
    name = "threads"

    def convert(self, value: Any, param: Optional[click.Parameter],
                ctx: Optional[click.Context]) -> Optional[int]:
        if value is None or isinstance(value, int):
            return value
        if str(value).lower() == "max":
            return available_threads()
        try:
            threads = int(value)
        except ValueError:
            self.fail(f"{value!r} is not a thread count or 'max'", param, ctx)
        if threads < 1:
            self.fail("thread count must be >= 1", param, ctx)
        return threads


def _status(message: str, color: str = Fore.GREEN) -> None:
    click.echo(f"{color}{message}{Style.RESET_ALL}", err=True)


def _configure_logging(verbose: bool, level: str) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _delimiter(value: Optional[str]) -> Optional[str]:
    if value in ("\\t", "tab", "TAB"):
        return "\t"
    return value


def _data_options(command: Callable) -> Callable:
    """Options shared by every command that reads a dataset."""
    options = [
        click.argument("path", type=click.Path(dir_okay=False)),
        click.option("--delimiter", help="Field delimiter (default ','; use 'tab' for TSV)"),
        click.option("--no-header", is_flag=True,
                     help="The first line holds data, not column names"),
        click.option("--columns", help="Comma-separated column names or indices to use"),
        click.option("--threads", type=ThreadsType(),
                     help="Scoring threads: a count or 'max' (default: all CPUs)"),
        click.option("--out", "-o", help="Output file path (default: stdout)"),
        click.option("--format", "-f", "fmt", type=click.Choice(["json", "yaml", "text"]),
                     help="Output format"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _load(selector: FeatureSelector, path: str, delimiter: Optional[str],
          no_header: bool, columns: Optional[str]) -> DataMatrix:
    delimiter = _delimiter(delimiter)
    if delimiter is not None and len(delimiter) != 1:
        raise click.BadParameter("must be a single character", param_hint="--delimiter")
    column_filter = [c.strip() for c in columns.split(",")] if columns else None
    return selector.load(path, delimiter, False if no_header else None, column_filter)


def _emit(ctx: click.Context, document: ResultDocument, out: Optional[str],
          fmt: Optional[str], csv_path: Optional[str] = None,
          selected_only: bool = False) -> None:
    selector: FeatureSelector = ctx.obj["selector"]
    output_config = selector.config.get_output_config()
    fmt = fmt or output_config["format"]
    if fmt == "text":
        content = _format_text_report(document)
    else:
        content = render_document(document, fmt, output_config["indent"])

    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(content + "\n")
        if ctx.obj["verbose"]:
            _status(f"Report written to: {out}")
    else:
        click.echo(content)

    if csv_path:
        write_scores_csv(document, csv_path, selected_only=selected_only)
        if ctx.obj["verbose"]:
            _status(f"Scores written to: {csv_path}")


def _format_text_report(document: ResultDocument) -> str:
    """Format a document as human-readable text."""
    lines = [f"Feature selection: {document.method}", "=" * 50]
    for key, value in document.dataset.items():
        lines.append(f"{key}: {value}")
    for key, value in document.params.items():
        if value is not None:
            lines.append(f"{key}: {value}")
    lines.append("")

    if document.ranking:
        lines.append(f"{'rank':>5}  {'index':>5}  {'name':<20} scores")
        lines.append("-" * 50)
        for row in document.ranking:
            scores = "  ".join(f"{k}={v:.6g}" for k, v in row.score_fields().items())
            lines.append(f"{row.rank:>5}  {row.index:>5}  {row.name:<20} {scores}")
        lines.append("")

    if document.selected:
        lines.append(f"Selected ({len(document.selected)}): {', '.join(document.selected_names)}")
    if document.discarded:
        lines.append(f"Discarded by correlation: {', '.join(map(str, document.discarded))}")
    if document.error_report is not None:
        lines.append(f"Maximal error ratio: {document.error_report.max_error_ratio:.6f}")
        if document.error_report.true_error_ratio is not None:
            lines.append(f"True error ratio: {document.error_report.true_error_ratio:.6f}")
    if document.sweep:
        lines.append(f"{'relative':>9}  {'l':>8}  {'effective':>9}  max_error_ratio")
        for point in document.sweep:
            lines.append(f"{point.relative_length:>9.3f}  {point.requested_length:>8}  "
                         f"{point.effective_length:>9}  {point.max_error_ratio:.6f}")
    if document.method == "bench":
        lines.append(f"{'method':<12} mean recall")
        for method, recall in document.metadata["mean_recall"].items():
            shown = "n/a" if recall is None else f"{recall:.3f}"
            lines.append(f"{method:<12} {shown}")
    elif document.metadata and not document.ranking:
        for key, value in document.metadata.items():
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


@click.group()
@click.version_option(version=__version__)
@click.option("--config", "-c", "config_path", help="Path to configuration YAML file")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool) -> None:
    """Feature selection via discriminability."""
    just_fix_windows_console()
    if config_path:
        try:
            selector = create_selector_from_config_file(config_path)
        except FileNotFoundError as e:
            raise ConfigurationError(str(e)) from e
    else:
        selector = create_default_selector()
    _configure_logging(verbose, selector.config.get_log_level())
    ctx.obj = {"selector": selector, "verbose": verbose}


@cli.command()
@_data_options
@click.option("--budget", "-k", help="Features to select: count, 'P%' or fraction "
              "(default: the whole ranking)")
@click.option("--discard-correlated", type=click.IntRange(min=0),
              help="Discard this many correlated features first (FSDC)")
@click.option("--csv", "csv_path", help="Also write a flat CSV of the ranking")
@click.pass_context
def rank(ctx: click.Context, path: str, delimiter: Optional[str], no_header: bool,
         columns: Optional[str], threads: Optional[int], out: Optional[str],
         fmt: Optional[str], budget: Optional[str], discard_correlated: Optional[int],
         csv_path: Optional[str]) -> None:
    """Rank all features by exact intrinsic dimension (FSD/FSDC)."""
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    document = selector.rank(matrix, budget=budget, discard_correlated=discard_correlated,
                             threads=threads, source=path,
                             full=budget is None)
    _emit(ctx, document, out, fmt, csv_path)


@cli.command()
@_data_options
@click.option("--budget", "-k", help="Features to select: count, 'P%' or fraction "
              "(default from config: 10%)")
@click.option("--discard-correlated", type=click.IntRange(min=0),
              help="Discard this many correlated features first (FSDC)")
@click.option("--csv", "csv_path", help="Also write a flat CSV of the selected features")
@click.pass_context
def select(ctx: click.Context, path: str, delimiter: Optional[str], no_header: bool,
           columns: Optional[str], threads: Optional[int], out: Optional[str],
           fmt: Optional[str], budget: Optional[str], discard_correlated: Optional[int],
           csv_path: Optional[str]) -> None:
    """Select the budget-prefix of the exact ranking (FSD/FSDC)."""
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    document = selector.rank(matrix, budget=budget, discard_correlated=discard_correlated,
                             threads=threads, source=path)
    _emit(ctx, document, out, fmt, csv_path, selected_only=True)


@cli.command("approx-rank")
@_data_options
@click.option("--support-length", "-l", type=click.IntRange(min=2),
              help="Requested support-sequence length l")
@click.option("--relative-length", "-r", type=click.FloatRange(min=0, min_open=True),
              help="Relative support length r, l = floor(r * n)")
@click.option("--verify-exact", is_flag=True,
              help="Also compute exact scores and the true error ratio")
@click.option("--budget", "-k", help="Features to select: count, 'P%' or fraction")
@click.option("--discard-correlated", type=click.IntRange(min=0),
              help="Discard this many correlated features first (LSFSDC)")
@click.option("--csv", "csv_path", help="Also write a flat CSV of the ranking")
@click.pass_context
def approx_rank(ctx: click.Context, path: str, delimiter: Optional[str],
                no_header: bool, columns: Optional[str], threads: Optional[int],
                out: Optional[str], fmt: Optional[str], support_length: Optional[int],
                relative_length: Optional[float], verify_exact: bool, budget: Optional[str],
                discard_correlated: Optional[int], csv_path: Optional[str]) -> None:
    """Rank features by approximated intrinsic dimension (LSFSD/LSFSDC)."""
    if support_length is not None and relative_length is not None:
        raise click.UsageError("--support-length and --relative-length are mutually exclusive")
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    document = selector.approx_rank(
        matrix, support_length=support_length, relative_length=relative_length,
        verify_exact=verify_exact, budget=budget, discard_correlated=discard_correlated,
        threads=threads, source=path,
    )
    _emit(ctx, document, out, fmt, csv_path)
    report = document.error_report
    if ctx.obj["verbose"] and report is not None and report.bound_holds is False:
        _status("True error ratio exceeds the maximal error ratio", Fore.RED)


@cli.command("error-bound")
@_data_options
@click.option("--support-length", "-l", type=click.IntRange(min=2),
              help="Requested support-sequence length l")
@click.option("--relative-length", "-r", type=click.FloatRange(min=0, min_open=True),
              help="Relative support length r, l = floor(r * n)")
@click.option("--sweep", is_flag=True,
              help="Sweep the configured relative lengths (default 0.01..0.20)")
@click.pass_context
def error_bound(ctx: click.Context, path: str, delimiter: Optional[str],
                no_header: bool, columns: Optional[str], threads: Optional[int],
                out: Optional[str], fmt: Optional[str], support_length: Optional[int],
                relative_length: Optional[float], sweep: bool) -> None:
    """Maximal error ratio of the approximate ranking."""
    given = sum(x is not None for x in (support_length, relative_length)) + int(sweep)
    if given > 1:
        raise click.UsageError("use exactly one of --support-length, --relative-length, --sweep")
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    sweep_lengths: Optional[List[float]] = \
        selector.config.get_sweep_lengths() if sweep else None
    document = selector.error_bound(matrix, support_length=support_length,
                                    relative_length=relative_length, sweep=sweep_lengths,
                                    threads=threads, source=path)
    _emit(ctx, document, out, fmt)


@cli.command()
@_data_options
@click.option("--method", "-m", required=True, type=click.Choice(BASELINE_METHODS),
              help="Baseline selector")
@click.option("--budget", "-k", help="Features to select: count, 'P%' or fraction")
@click.option("--seed", type=int, help="Random seed (random baseline)")
@click.option("--threshold", type=click.FloatRange(0.0, 1.0),
              help="RRFS similarity threshold (default: from the correlation prefilter)")
@click.option("--discard-correlated", type=click.IntRange(min=1),
              help="Prefilter discards used to derive the RRFS threshold")
@click.pass_context
def baseline(ctx: click.Context, path: str, delimiter: Optional[str],
             no_header: bool, columns: Optional[str], threads: Optional[int],
             out: Optional[str], fmt: Optional[str], method: str, budget: Optional[str],
             seed: Optional[int], threshold: Optional[float],
             discard_correlated: Optional[int]) -> None:
    """Select features with a reference method."""
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    document = selector.baseline(matrix, method, budget=budget, seed=seed,
                                 threshold=threshold, discard_correlated=discard_correlated,
                                 source=path)
    _emit(ctx, document, out, fmt)


@cli.command()
@_data_options
@click.option("--alpha", type=click.FloatRange(0.0, 1.0, max_open=True),
              help="Also report the observable diameter at measure level 1 - alpha")
@click.pass_context
def describe(ctx: click.Context, path: str, delimiter: Optional[str],
             no_header: bool, columns: Optional[str], threads: Optional[int],
             out: Optional[str], fmt: Optional[str], alpha: Optional[float]) -> None:
    """Dataset-level discriminability and intrinsic dimension."""
    selector: FeatureSelector = ctx.obj["selector"]
    matrix = _load(selector, path, delimiter, no_header, columns)
    document = selector.describe(matrix, alpha=alpha, threads=threads,
                                 source=path)
    _emit(ctx, document, out, fmt)


@cli.command()
@click.option("--rows", type=click.IntRange(min=2), help="Rows per generated dataset")
@click.option("--features", type=click.IntRange(min=1), help="Features per dataset")
@click.option("--planted", type=click.IntRange(min=0), help="Planted spread features")
@click.option("--seeds", type=click.IntRange(min=1), help="Number of generated datasets")
@click.option("--seed", type=int, help="First generator seed")
@click.option("--relative-length", "-r", type=click.FloatRange(min=0, min_open=True),
              help="Relative support length for LSFSD")
@click.option("--sweep", is_flag=True, help="Also sweep the configured relative lengths")
@click.option("--no-exact", is_flag=True, help="Skip exact FSD (quadratic in rows)")
@click.option("--threads", type=ThreadsType(), help="Scoring threads: a count or 'max'")
@click.option("--out", "-o", help="Output file path (default: stdout)")
@click.option("--format", "-f", "fmt", type=click.Choice(["json", "yaml", "text"]),
              help="Output format")
@click.pass_context
def bench(ctx: click.Context, rows: Optional[int], features: Optional[int],
          planted: Optional[int], seeds: Optional[int], seed: Optional[int],
          relative_length: Optional[float], sweep: bool, no_exact: bool,
          threads: Optional[int], out: Optional[str], fmt: Optional[str]) -> None:
    """Compare all methods on synthetic planted-feature data."""
    selector: FeatureSelector = ctx.obj["selector"]
    config = selector.config.get_bench_config()
    if (planted if planted is not None else config["planted"]) > \
            (features or config["features"]):
        raise click.UsageError("--planted cannot exceed --features")
    document = selector.bench(
        rows=rows, features=features, planted=planted, seeds=seeds, seed=seed,
        relative_length=relative_length,
        sweep=selector.config.get_sweep_lengths() if sweep else None,
        exact=not no_exact, threads=threads,
    )
    _emit(ctx, document, out, fmt)


@cli.command("init-config")
@click.option("--output", "-o", default="discriminability_config.yaml",
              help="Output configuration file path")
def init_config(output: str) -> None:
    """Create a default configuration file."""
    create_default_config_file(output)
    _status(f"Created configuration file: {output}")


@cli.command("validate-config")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def validate_config(config_file: str) -> None:
    """Validate a configuration file."""
    issues = SelectorConfig.from_file(config_file).validate()
    if issues:
        _status("Configuration issues found:", Fore.RED)
        for issue in issues:
            click.echo(f"  - {issue}", err=True)
        raise click.exceptions.Exit(EXIT_USAGE)
    _status("Configuration is valid")


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run the CLI on ``argv`` and return its exit code.

    0 success, 2 usage or configuration error, 3 data error, 1 anything else.
    """
    try:
        result = cli.main(args=argv, prog_name="discriminability", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        _status("Aborted", Fore.RED)
        return EXIT_FAILURE
    except DataError as e:
        _status(f"Data error: {e}", Fore.RED)
        return EXIT_DATA
    except (SelectionError, ConfigurationError) as e:
        _status(f"Error: {e}", Fore.RED)
        return EXIT_USAGE
    except OSError as e:
        _status(f"Error: {e}", Fore.RED)
        return EXIT_FAILURE
    except Exception as e:
        logging.getLogger(__name__).debug("Unhandled error", exc_info=True)
        _status(f"Error: {e}", Fore.RED)
        return EXIT_FAILURE
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    """Main entry point for CLI."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
