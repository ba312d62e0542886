"""Command-line interface.

Exit codes: 0 on success, 1 for usage or configuration problems, 2 for
runtime failures (a ladder point erroring out, a fit that did not converge).
"""

from __future__ import annotations

import logging
import sys

import click

from . import __version__
from .config import ConfigError, bundled_config_names, bundled_config_path, load_config
from .io_files import IngestError, ingest_spectrum
from .pipeline import PipelineError, run_fit, run_ladder, run_simulate
from .spectrum import find_peaks

log = logging.getLogger(__name__)


def _load(config_arg):
    """Accept either a filesystem path or the bare name of a bundled config."""
    from pathlib import Path

    p = Path(config_arg)
    if p.is_file():
        return load_config(p)
    if "/" not in config_arg and "\\" not in config_arg:
        return load_config(bundled_config_path(config_arg))
    raise ConfigError(f"config file not found: {config_arg}")


@click.group()
@click.version_option(version=__version__, prog_name="modesplit")
@click.option("-v", "--verbose", is_flag=True, help="Log progress and defaulted keys.")
def cli(verbose):
    """Simulate and fit transmission spectra of an atom-filled standing-wave cavity."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


@cli.command()
@click.option("--config", "config_arg", required=True,
              help="Config file path, or the name of a bundled config "
                   f"({', '.join(bundled_config_names())}).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for spectrum.csv, peaks.json, plot.svg.")
def simulate(config_arg, out_dir):
    """Sweep the transmission spectrum and report its peaks."""
    config = _load(config_arg)
    result = run_simulate(config, out_dir)
    g = result.splitting.g_sqrt_n_hz
    click.echo(f"{len(result.peaks)} peaks -> {out_dir}/peaks.json; "
               f"g*sqrt(N) = {'n/a' if g is None else f'{g / 1e6:.1f} MHz'}; "
               f"superstrong = {result.splitting.superstrong}")


@cli.command()
@click.option("--config", "config_arg", required=True,
              help="Config with a [ladder] section (path or bundled name).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for ladder.json and crossing.svg.")
def ladder(config_arg, out_dir):
    """Run the full pipeline over a list of optical depths or temperatures."""
    config = _load(config_arg)
    entries = run_ladder(config, out_dir)
    counts = [e.get("split_mode_count") for e in entries if "error" not in e]
    click.echo(f"{len(entries)} ladder points -> {out_dir}/ladder.json; "
               f"split-mode counts {counts}")


@cli.command()
@click.option("--config", "config_arg", required=True,
              help="Config with a [fit] section (path or bundled name).")
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Two-column spectrum CSV to fit.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for fit.json.")
def fit(config_arg, data_path, out_dir):
    """Recover model parameters from a measured spectrum."""
    config = _load(config_arg)
    result = run_fit(config, data_path, out_dir)
    click.echo(f"converged = {result.converged}, residual = {result.residual:.3e}, "
               f"best fit = {result.best_fit}")
    if not result.converged:
        raise PipelineError(
            f"fit did not converge within {result.iterations} iterations "
            f"(best-so-far written to {out_dir}/fit.json)")


@cli.command()
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Two-column spectrum CSV.")
@click.option("--threshold", default=1e-3, show_default=True,
              help="Minimum normalized peak height.")
@click.option("--normalize/--no-normalize", default=False, show_default=True,
              help="Rescale the ingested values so their maximum is 1.")
def peaks(in_path, threshold, normalize):
    """Detect peaks in a spectrum file and print them as CSV."""
    spectrum = ingest_spectrum(in_path, normalize_to=1.0 if normalize else None)
    found = find_peaks(spectrum, threshold)
    click.echo("position_hz,height,fwhm_hz")
    for p in found:
        click.echo(f"{p.position_hz!r},{p.height!r},{p.fwhm_hz!r}")


def main(argv=None) -> int:
    """Run the CLI and map exceptions onto the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="modesplit", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except (ConfigError, IngestError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (PipelineError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entry():
    sys.exit(main())
